"""Tests for the Hoeffding exponent and mixed-criterion sample sizing.

Frozen constants were computed with a 50-digit mpmath evaluation of the
defining formulas; each is a plain re-evaluation, independent of the
log1p-based implementation under test.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from probcert import (
    DomainError,
    ErrorSpec,
    InvalidSpecError,
    achieved_confidence,
    hoeffding_exponent,
    hoeffding_exponent_dmu,
    lower_tail_bound,
    minimum_sample_size,
    upper_tail_bound,
    validate_spec,
)
from support import random_valid_specs

# 50-digit oracle values (mpmath, direct evaluation of the two-term formula)
G_01_05 = -0.0201355135506888734205127789688
G_02_05 = -0.0822828785050518463915611582608
G_005_025 = -0.0064014569973203718321216138732
DG_01_05 = -0.00546510810816438197801311546435
DG_01_04 = 0.0112015585585022846886535512023
UPPER_100_01_05 = 0.133513677251316603791597911618
LOWER_10_02_05 = 0.439187528538054254379935006205
ACH_577 = 0.0497625041681963602055784651914
ACH_576 = 0.0500820784779992552553308155978


class TestHoeffdingExponent:
    def test_reference_value(self):
        assert hoeffding_exponent(0.1, 0.5) == pytest.approx(G_01_05, abs=1e-6)
        # the implementation should be far tighter than the stated tolerance
        assert hoeffding_exponent(0.1, 0.5) == pytest.approx(G_01_05, rel=1e-14)

    def test_vanishes_at_zero_offset(self):
        assert hoeffding_exponent(0.0, 0.3) == 0.0
        assert abs(hoeffding_exponent(1e-5, 0.3)) < 1e-8

    def test_negative_offset_symmetry_at_half(self):
        assert hoeffding_exponent(-0.2, 0.5) == pytest.approx(G_02_05, abs=1e-6)
        assert hoeffding_exponent(0.2, 0.5) == pytest.approx(
            hoeffding_exponent(-0.2, 0.5), rel=1e-14
        )

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            hoeffding_exponent(0.6, 0.5)  # mu + eps = 1.1
        with pytest.raises(DomainError):
            hoeffding_exponent(0.1, 0.0)
        with pytest.raises(DomainError):
            hoeffding_exponent(0.1, 1.0)
        with pytest.raises(DomainError):
            hoeffding_exponent(-0.5, 0.5)  # mu + eps = 0

    def test_nonpositive_on_grid(self):
        for eps in np.concatenate([np.linspace(1e-3, 0.4, 40), -np.linspace(1e-3, 0.4, 40)]):
            for mu in np.linspace(0.05, 0.95, 37):
                if not 0.0 < mu + eps < 1.0:
                    continue
                assert hoeffding_exponent(float(eps), float(mu)) < 0.0

    def test_symmetry_identity_on_grid(self):
        # g(-eps, mu) = g(eps, 1 - mu), an algebraic identity of the formula
        for eps in np.linspace(1e-3, 0.4, 40):
            for mu in np.linspace(0.05, 0.95, 37):
                eps, mu = float(eps), float(mu)
                if not (0.0 < mu - eps and mu + eps < 1.0):
                    continue
                lhs = hoeffding_exponent(-eps, mu)
                rhs = hoeffding_exponent(eps, 1.0 - mu)
                assert lhs == pytest.approx(rhs, abs=1e-12)

    @given(
        eps=st.floats(1e-3, 0.4),
        mu=st.floats(0.05, 0.95),
        sign=st.sampled_from([-1.0, 1.0]),
    )
    @settings(max_examples=200)
    def test_nonpositivity_property(self, eps, mu, sign):
        eps = sign * eps
        assume(0.0 < mu + eps < 1.0)
        assert hoeffding_exponent(eps, mu) < 0.0


class TestExponentDerivative:
    def test_closed_form_value(self):
        # ln(0.8/1.2) + 0.2 + 0.2 at (0.1, 0.5)
        assert hoeffding_exponent_dmu(0.1, 0.5) == pytest.approx(DG_01_05, abs=1e-6)

    def test_sign_flip_at_half(self):
        assert hoeffding_exponent_dmu(-0.1, 0.5) == pytest.approx(-DG_01_05, abs=1e-6)

    def test_matches_finite_difference(self):
        h = 1e-6
        fd = (hoeffding_exponent(0.1, 0.4 + h) - hoeffding_exponent(0.1, 0.4 - h)) / (2 * h)
        assert hoeffding_exponent_dmu(0.1, 0.4) == pytest.approx(fd, rel=1e-6)
        assert hoeffding_exponent_dmu(0.1, 0.4) == pytest.approx(DG_01_04, rel=1e-12)

    def test_finite_difference_grid(self):
        h = 1e-6
        for eps in (-0.2, -0.05, 0.05, 0.2):
            for mu in (0.3, 0.45, 0.6):
                if not 0.0 < mu + eps < 1.0:
                    continue
                fd = (
                    hoeffding_exponent(eps, mu + h) - hoeffding_exponent(eps, mu - h)
                ) / (2 * h)
                assert hoeffding_exponent_dmu(eps, mu) == pytest.approx(fd, rel=1e-6)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            hoeffding_exponent_dmu(0.9, 0.5)


class TestTailBounds:
    def test_upper_bound_value(self):
        assert upper_tail_bound(100, 0.1, 0.5) == pytest.approx(UPPER_100_01_05, abs=1e-4)

    def test_lower_bound_value(self):
        assert lower_tail_bound(10, 0.2, 0.5) == pytest.approx(LOWER_10_02_05, abs=1e-4)

    def test_limits_to_one(self):
        assert 1.0 - 1e-12 < upper_tail_bound(1, 1e-9, 0.5) <= 1.0
        assert 1.0 - 1e-12 < lower_tail_bound(1, 1e-9, 0.3) <= 1.0

    def test_count_and_domain_errors(self):
        with pytest.raises(DomainError):
            upper_tail_bound(0, 0.1, 0.5)
        with pytest.raises(DomainError):
            lower_tail_bound(10, 0.6, 0.5)  # eps >= mu
        with pytest.raises(DomainError):
            upper_tail_bound(10, 0.5, 0.5)  # eps >= 1 - mu

    def test_bounds_in_unit_interval(self):
        # zero only through exp underflow, when n*g < ln(DBL_MIN)
        rng = np.random.default_rng(3)
        for _ in range(100):
            mu = rng.uniform(0.05, 0.95)
            n = int(rng.integers(1, 500))
            eps_up = rng.uniform(0.01, 0.99) * (1.0 - mu)
            eps_lo = rng.uniform(0.01, 0.99) * mu
            up = upper_tail_bound(n, eps_up, mu)
            lo = lower_tail_bound(n, eps_lo, mu)
            assert 0.0 <= up <= 1.0
            assert 0.0 <= lo <= 1.0
            assert up > 0.0 or n * hoeffding_exponent(eps_up, mu) < -700.0
            assert lo > 0.0 or n * hoeffding_exponent(-eps_lo, mu) < -700.0


class TestValidateSpec:
    def test_valid(self):
        spec = validate_spec(0.02, 0.2, 0.05)
        assert (spec.eps_a, spec.eps_r, spec.delta) == (0.02, 0.2, 0.05)

    def test_ratio_violation(self):
        with pytest.raises(InvalidSpecError, match="eps_a/eps_r"):
            validate_spec(0.05, 0.05, 0.1)

    def test_delta_violation(self):
        with pytest.raises(InvalidSpecError, match="delta"):
            validate_spec(0.01, 0.1, 1.0)

    def test_all_violations_reported(self):
        with pytest.raises(InvalidSpecError) as exc_info:
            validate_spec(-0.1, 2.0, 0.0)
        assert len(exc_info.value.violations) == 3

    def test_dataclass_construction_validates(self):
        with pytest.raises(InvalidSpecError):
            ErrorSpec(eps_a=0.3, eps_r=0.5, delta=0.1)

    def test_boundary_equality_allowed(self):
        # eps_a/eps_r + eps_a = 0.125/0.5 + 0.125 = 0.375 <= 0.5; push to equality
        validate_spec(0.25 / 1.5, 0.5, 0.1)  # ratio + eps_a = 0.5 exactly


class TestMinimumSampleSize:
    def test_reference_plans(self):
        plan = minimum_sample_size(validate_spec(0.05, 0.2, 0.05))
        assert plan.n == 577
        assert plan.worst_case_exponent == pytest.approx(G_005_025, rel=1e-13)
        assert minimum_sample_size(validate_spec(0.02, 0.2, 0.05)).n == 1755

    def test_plan_invariants(self):
        plan = minimum_sample_size(validate_spec(0.05, 0.2, 0.05))
        half = plan.spec.delta / 2.0
        assert math.exp(plan.n * plan.worst_case_exponent) < half
        assert math.exp((plan.n - 1) * plan.worst_case_exponent) >= half
        assert plan.worst_case_exponent < 0.0

    def test_invalid_spec_rejected(self):
        with pytest.raises(InvalidSpecError, match="eps_a/eps_r"):
            validate_spec(0.3, 0.5, 0.1)

    def test_tightness_random_specs(self):
        for spec in random_valid_specs(100, seed=91):
            plan = minimum_sample_size(spec)
            assert achieved_confidence(plan.n, spec.eps_a, spec.eps_r) < spec.delta
            if plan.n > 1:
                assert (
                    achieved_confidence(plan.n - 1, spec.eps_a, spec.eps_r) >= spec.delta
                )

    def test_two_algebraic_forms_agree(self):
        # the printed ratio formula equals ln(2/delta) / (-g) identically
        for spec in random_valid_specs(100, seed=17):
            ea, er, d = spec.eps_a, spec.eps_r, spec.delta
            printed = (er * math.log(2.0 / d)) / (
                (ea + ea * er) * math.log1p(er)
                + (er - ea - ea * er) * math.log1p(-ea * er / (er - ea))
            )
            via_exponent = math.log(2.0 / d) / -hoeffding_exponent(ea, ea / er)
            assert printed == pytest.approx(via_exponent, rel=1e-10)


class TestAchievedConfidence:
    def test_reference_values(self):
        assert achieved_confidence(577, 0.05, 0.2) == pytest.approx(ACH_577, rel=1e-12)
        assert achieved_confidence(577, 0.05, 0.2) < 0.05
        assert achieved_confidence(576, 0.05, 0.2) == pytest.approx(ACH_576, rel=1e-12)
        assert achieved_confidence(576, 0.05, 0.2) >= 0.05

    def test_monotone_decreasing(self):
        values = [achieved_confidence(n, 0.05, 0.2) for n in (1, 10, 100, 1000, 5000)]
        assert values[0] == 1.0  # capped
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-10

    def test_cap_at_one(self):
        assert achieved_confidence(1, 0.02, 0.2) == 1.0

    def test_constraint_errors(self):
        with pytest.raises(InvalidSpecError):
            achieved_confidence(100, 0.3, 0.5)
        with pytest.raises(DomainError):
            achieved_confidence(0, 0.05, 0.2)
