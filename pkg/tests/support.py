"""Shared helpers for the test suite."""

import numpy as np

from probcert import ErrorSpec


def random_valid_specs(count: int, seed: int) -> list[ErrorSpec]:
    """Uniformly scattered specs satisfying the mixed-criterion constraint.

    eps_a is drawn as a fraction of its admissible ceiling
    0.5 * eps_r / (1 + eps_r), with a floor keeping sample sizes small
    enough for fast arithmetic checks.
    """
    rng = np.random.default_rng(seed)
    specs = []
    while len(specs) < count:
        eps_r = rng.uniform(0.05, 0.95)
        cap = 0.5 * eps_r / (1.0 + eps_r)
        eps_a = rng.uniform(0.1, 0.999) * cap
        if eps_a < 5e-3:
            continue
        delta = rng.uniform(0.001, 0.5)
        specs.append(ErrorSpec(eps_a=eps_a, eps_r=eps_r, delta=delta))
    return specs
