"""Certified mean estimation for [0, 1]-bounded i.i.d. samples.

Two workflows:

* plan-then-sample: ``estimate_with_plan`` sizes the sample for a requested
  (eps_a, eps_r, delta) and consumes exactly that many draws;
* post-hoc: ``estimate_from_batch`` certifies a fixed batch by reporting the
  smallest risk its length supports (eps_a and eps_r stay as requested, only
  delta is inverted).

Sample sources are single-owner, seeded streams; values outside [0, 1] abort
the estimate rather than being clamped, since the guarantee's boundedness
hypothesis is a precondition, not a preference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, SampleValueError, SourceExhaustedError
from .tail_bounds import ErrorSpec, achieved_confidence, minimum_sample_size

__all__ = [
    "SampleSource",
    "BernoulliSource",
    "ConstantSource",
    "SequenceSource",
    "Certificate",
    "estimate_with_plan",
    "estimate_from_batch",
    "stable_mean",
]

_BOUNDARY_NOTE = (
    "estimate lies on the boundary of [0, 1]; the guarantee assumes a true "
    "mean strictly inside (0, 1)"
)


class SampleSource:
    """Deterministic stream of values in [0, 1].

    Subclasses implement ``_generate(k)``.  The same seed always reproduces
    the same sequence; ``draws_made`` counts values emitted so far.  Each
    source instance is single-owner: do not share across threads.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.draws_made = 0

    def _generate(self, k: int) -> np.ndarray:
        raise NotImplementedError

    def draw(self, k: int) -> np.ndarray:
        """Emit the next k values, validated into [0, 1]."""
        if k < 0:
            raise DomainError(f"draw count must be nonnegative, got {k!r}")
        values = np.asarray(self._generate(k), dtype=float)
        if values.shape != (k,):
            raise SourceExhaustedError(
                f"source produced {values.shape[0] if values.ndim else 0} of "
                f"{k} requested values"
            )
        bad = np.flatnonzero((values < 0.0) | (values > 1.0) | ~np.isfinite(values))
        if bad.size:
            i = int(bad[0])
            raise SampleValueError(float(values[i]), self.draws_made + i)
        self.draws_made += k
        return values

    def next(self) -> float:
        """Emit one value."""
        return float(self.draw(1)[0])


class BernoulliSource(SampleSource):
    """Bernoulli(p) draws as 0.0/1.0 floats."""

    def __init__(self, p: float, seed: int = 0):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {p!r}")
        super().__init__(seed)
        self.p = float(p)
        self._rng = np.random.default_rng(seed)

    def _generate(self, k: int) -> np.ndarray:
        return (self._rng.random(k) < self.p).astype(float)


class ConstantSource(SampleSource):
    """Emits the same value forever.  Out-of-range constants fail at draw time."""

    def __init__(self, value: float, seed: int = 0):
        super().__init__(seed)
        self.value = float(value)

    def _generate(self, k: int) -> np.ndarray:
        return np.full(k, self.value)


class SequenceSource(SampleSource):
    """Replays a fixed sequence; exhausting it raises SourceExhaustedError."""

    def __init__(self, values: Sequence[float], seed: int = 0):
        super().__init__(seed)
        self._values = np.asarray(list(values), dtype=float)
        self._cursor = 0

    def _generate(self, k: int) -> np.ndarray:
        remaining = len(self._values) - self._cursor
        if k > remaining:
            raise SourceExhaustedError(
                f"sequence exhausted: {remaining} values left, {k} requested"
            )
        out = self._values[self._cursor : self._cursor + k]
        self._cursor += k
        return out


@dataclass(frozen=True)
class Certificate:
    """An estimate together with the exact guarantee it carries.

    With probability > 1 - delta_achieved over the sampling randomness,
    |mu_hat - mu| < eps_a or |mu_hat - mu| < eps_r * mu.  When the sample was
    too small to certify any risk below 1, ``no_guarantee`` is set and
    delta_achieved is reported as 1.
    """

    mu_hat: float
    n: int
    eps_a: float
    eps_r: float
    delta_achieved: float
    kind: str  # "planned" or "post_hoc"
    no_guarantee: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "mu_hat": self.mu_hat,
            "n": self.n,
            "eps_a": self.eps_a,
            "eps_r": self.eps_r,
            "delta_achieved": self.delta_achieved,
            "kind": self.kind,
            "no_guarantee": self.no_guarantee,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(
            mu_hat=d["mu_hat"],
            n=d["n"],
            eps_a=d["eps_a"],
            eps_r=d["eps_r"],
            delta_achieved=d["delta_achieved"],
            kind=d["kind"],
            no_guarantee=d.get("no_guarantee", False),
            note=d.get("note", ""),
        )


def stable_mean(values: Sequence[float]) -> float:
    """Compensated mean: exact (error-free) summation, then one rounding."""
    n = len(values)
    if n == 0:
        raise DomainError("cannot take the mean of an empty sequence")
    return math.fsum(values) / n


def _certificate(mu_hat: float, n: int, eps_a: float, eps_r: float, kind: str) -> Certificate:
    delta_hat = achieved_confidence(n, eps_a, eps_r)
    return Certificate(
        mu_hat=mu_hat,
        n=n,
        eps_a=eps_a,
        eps_r=eps_r,
        delta_achieved=delta_hat,
        kind=kind,
        no_guarantee=delta_hat >= 1.0,
        note=_BOUNDARY_NOTE if mu_hat in (0.0, 1.0) else "",
    )


def estimate_with_plan(source: SampleSource, spec: ErrorSpec) -> Certificate:
    """Draw exactly the planned number of samples and certify the mean.

    The returned certificate has delta_achieved < spec.delta by construction
    of the plan.  Samples are consumed in a single sequential pass so the
    certificate is reproducible from the source seed.
    """
    plan = minimum_sample_size(spec)
    values = source.draw(plan.n)
    return _certificate(stable_mean(values), plan.n, spec.eps_a, spec.eps_r, "planned")


def estimate_from_batch(
    values: Sequence[float], eps_a: float, eps_r: float
) -> Certificate:
    """Certify a fixed batch post hoc, inverting the risk for its length.

    Every value must lie in [0, 1]; the first offender is reported by index.
    """
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise DomainError("batch is empty")
    bad = np.flatnonzero((arr < 0.0) | (arr > 1.0) | ~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise SampleValueError(float(arr[i]), i)
    return _certificate(stable_mean(arr), int(arr.size), eps_a, eps_r, "post_hoc")
