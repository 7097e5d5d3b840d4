"""Tests for the exact binomial oracle, lemma scans, and experiments."""

import math
from fractions import Fraction

import numpy as np
import pytest

from probcert import (
    DomainError,
    GridSpec,
    ScanReport,
    binomial_tail_exact,
    coverage_experiment,
    domination_experiment,
    lemma56_check,
    lemma_scan,
    lower_tail_bound,
    upper_tail_bound,
    validate_spec,
)

SPEC = validate_spec(0.05, 0.2, 0.05)


def binomial_tail_fraction(n: int, mu: float, k: int) -> Fraction:
    """Exact rational lower tail for the double value of mu."""
    p = Fraction(mu)
    q = 1 - p
    return sum(
        Fraction(math.comb(n, j)) * p**j * q ** (n - j) for j in range(k + 1)
    )


class TestBinomialTailExact:
    def test_reference_value(self):
        assert binomial_tail_exact(10, 0.5, 3) == pytest.approx(
            176 / 1024, rel=1e-12
        )

    def test_full_support_is_one(self):
        assert binomial_tail_exact(5, 0.5, 5) == 1.0

    def test_single_term(self):
        assert binomial_tail_exact(5, 0.3, 0) == pytest.approx(0.7**5, rel=1e-12)

    def test_k_out_of_range(self):
        with pytest.raises(DomainError):
            binomial_tail_exact(5, 0.5, 6)
        with pytest.raises(DomainError):
            binomial_tail_exact(5, 0.5, -1)

    def test_mu_domain(self):
        with pytest.raises(DomainError):
            binomial_tail_exact(5, 0.0, 2)

    def test_exhaustive_against_rational_arithmetic(self):
        # every (n, k) for n <= 30 across assorted mu, vs fractions.Fraction
        rng = np.random.default_rng(8)
        mus = [0.5, 0.3, 0.05, 0.95] + list(rng.uniform(0.01, 0.99, 4))
        for mu in mus:
            for n in range(1, 31):
                for k in range(n + 1):
                    exact = float(binomial_tail_fraction(n, mu, k))
                    assert binomial_tail_exact(n, float(mu), k) == pytest.approx(
                        exact, rel=5e-13, abs=1e-300
                    )

    def test_large_n_stays_in_range(self):
        value = binomial_tail_exact(577, 0.05, 10)
        assert 0.0 < value < 1.0


class TestLemmaScans:
    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.3])
    def test_l2_monotonicity(self, eps):
        report = lemma_scan("L2", GridSpec(eps=eps))
        assert report.passed, report.to_text()

    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.3])
    def test_l3_domination(self, eps):
        report = lemma_scan("L3", GridSpec(eps=eps))
        assert report.passed, report.to_text()

    @pytest.mark.parametrize("eps", [0.1, 0.3, 0.5, 0.9])
    def test_l4_proportional_offsets(self, eps):
        report = lemma_scan("L4", GridSpec(eps=eps))
        assert report.passed, report.to_text()

    def test_unknown_lemma(self):
        with pytest.raises(DomainError):
            lemma_scan("L7", GridSpec(eps=0.1))

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            GridSpec(eps=0.1, step=0.0)
        with pytest.raises(DomainError):
            GridSpec(eps=0.1, margin=1e-4)
        with pytest.raises(DomainError):
            lemma_scan("L2", GridSpec(eps=0.6))  # L2 needs eps < 1/2

    def test_report_shape(self):
        report = lemma_scan("L2", GridSpec(eps=0.1))
        assert report.lemma_id == "L2"
        assert report.passed == (not report.violations)
        d = report.to_dict()
        assert set(d) == {"lemma_id", "grid_description", "violations", "passed"}


class TestHoeffdingBoundVsExactBinomial:
    def test_bound_dominates_exact_tails(self):
        # Lemma-1 inequalities against exact binomial tails, no slack
        rng = np.random.default_rng(19)
        for _ in range(200):
            n = int(rng.integers(1, 201))
            mu = float(rng.uniform(0.05, 0.95))
            frac = float(rng.uniform(0.05, 0.95))
            eps_up = frac * (1.0 - mu)
            eps_lo = frac * mu
            k_up = int(math.ceil(n * (mu + eps_up)))
            upper_exact = (
                0.0 if k_up > n else binomial_tail_exact(n, 1.0 - mu, n - k_up)
            )
            assert upper_tail_bound(n, eps_up, mu) >= upper_exact
            k_lo = int(math.floor(n * (mu - eps_lo)))
            lower_exact = 0.0 if k_lo < 0 else binomial_tail_exact(n, mu, k_lo)
            assert lower_tail_bound(n, eps_lo, mu) >= lower_exact

    def test_reference_domination_case(self):
        # n=10, mu=0.5, eps=0.2: bound 0.4392 vs exact tails 176/1024
        bound = lower_tail_bound(10, 0.2, 0.5)
        assert bound == pytest.approx(0.4392, abs=1e-4)
        assert bound >= 176 / 1024
        assert upper_tail_bound(10, 0.2, 0.5) >= 176 / 1024


class TestLemma56Check:
    def test_lower_range_reference(self):
        report = lemma56_check(SPEC, [0.05, 0.1, 0.15, 0.2, 0.25], 577)
        assert report.lemma_id == "L5"
        assert report.passed, report.to_text()

    def test_upper_range_reference(self):
        report = lemma56_check(SPEC, [0.3, 0.45, 0.6, 0.75, 0.9], 577)
        assert report.lemma_id == "L6"
        assert report.passed, report.to_text()

    def test_tiny_mu_tail_is_zero(self):
        # mu < eps_a: the lower-deviation event is impossible
        report = lemma56_check(SPEC, [0.01, 0.04], 100)
        assert report.passed

    def test_mu_above_relative_ceiling(self):
        # mu > 1/(1+eps_r): the upper-deviation event is impossible
        report = lemma56_check(SPEC, [0.85, 0.9, 0.99], 100)
        assert report.passed

    def test_mixed_grid_rejected(self):
        with pytest.raises(DomainError):
            lemma56_check(SPEC, [0.1, 0.5], 100)

    def test_grid_range_validation(self):
        with pytest.raises(DomainError):
            lemma56_check(SPEC, [0.0, 0.1], 100)
        with pytest.raises(DomainError):
            lemma56_check(SPEC, [], 100)


class TestCoverageExperiment:
    def test_small_run_passes(self):
        report = coverage_experiment(SPEC, [0.5], trials=300, seed=23)
        assert report.lemma_id == "coverage"
        assert report.passed, report.to_text()

    def test_weak_guarantee_passes_trivially(self):
        weak = validate_spec(0.05, 0.2, 0.5)
        report = coverage_experiment(weak, [0.3, 0.7], trials=200, seed=29)
        assert report.passed

    def test_zero_trials_rejected(self):
        with pytest.raises(DomainError):
            coverage_experiment(SPEC, [0.5], trials=0, seed=1)

    def test_deterministic(self):
        a = coverage_experiment(SPEC, [0.25, 0.5], trials=200, seed=37)
        b = coverage_experiment(SPEC, [0.25, 0.5], trials=200, seed=37)
        assert a == b


class TestDominationExperiment:
    def test_quadratic_well_passes(self):
        report = domination_experiment("quadratic_well", SPEC, points=20, seed=41)
        assert report.lemma_id == "domination"
        assert report.passed, report.to_text()

    def test_affine_and_uniform_models(self):
        for model_id in ("affine", "uniform_gap"):
            report = domination_experiment(model_id, SPEC, points=10, seed=43)
            assert report.passed, report.to_text()

    def test_zero_points_rejected(self):
        with pytest.raises(DomainError):
            domination_experiment("quadratic_well", SPEC, points=0, seed=1)

    def test_unknown_model(self):
        from probcert import ConfigError

        with pytest.raises(ConfigError):
            domination_experiment("mystery", SPEC, points=5, seed=1)

    def test_deterministic(self):
        a = domination_experiment("quadratic_well", SPEC, points=10, seed=47)
        b = domination_experiment("quadratic_well", SPEC, points=10, seed=47)
        assert a == b


class TestScanReport:
    def test_passed_iff_no_violations(self):
        clean = ScanReport(lemma_id="L2", grid_description="test")
        assert clean.passed
        dirty = ScanReport(
            lemma_id="L2", grid_description="test", violations=[((0.5,), {"v": 1.0})]
        )
        assert not dirty.passed

    def test_text_rendering(self):
        report = ScanReport(lemma_id="coverage", grid_description="2 points")
        assert "PASS" in report.to_text()

    def test_bad_lemma_id(self):
        with pytest.raises(DomainError):
            ScanReport(lemma_id="L9", grid_description="x")
