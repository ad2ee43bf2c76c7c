"""Independent oracles used to freeze expected values in the tests.

These deliberately avoid the package's evaluation strategies: direct
series summation with compensated accumulation for the Bessel values, and
a jump-chain level simulation for exit probabilities.
"""

from __future__ import annotations

import math

import numpy as np


def bessel_series(n: int, z: float) -> float:
    """I_n(z) summed straight from its power series.

    Terms accumulate through math.fsum until they drop below 1e-18
    relative; valid for moderate |z| only (unscaled).
    """
    half = 0.5 * z
    term = 1.0
    for j in range(1, n + 1):
        term *= half / j
    terms = [term]
    l = 0
    while True:
        l += 1
        term *= half * half / (l * (n + l))
        terms.append(term)
        if abs(term) <= 1e-18 * abs(math.fsum(terms)):
            return math.fsum(terms)
        if l > 500:
            raise RuntimeError("series oracle stalled")


def scaled_bessel_series(n: int, t: float) -> float:
    return math.exp(-t) * bessel_series(n, t)


def poissonized_walk_probability(t: float, d: int, *, eps: float = 1e-20) -> float:
    """P(V(t) = d | V(0) = 0) by Poissonizing exact binomial step counts."""
    d = abs(d)
    weight = math.exp(-t)
    terms = []
    j = 0
    while True:
        if j >= d and (j - d) % 2 == 0 and weight > 0:
            terms.append(weight * (math.comb(j, (j + d) // 2) / 2.0 ** j))
        if j > t and weight < eps:
            break
        j += 1
        weight *= t / j
    return math.fsum(terms)


def survival_probability_jump_chain(u: tuple[int, ...], horizon: float,
                                    n_samples: int, seed: int) -> tuple[float, float]:
    """P(no ordering violation up to the horizon) by simulating the
    embedded jump chain directly: exponential waiting times with total
    rate N, a uniformly chosen walker, a +-1 step.  Returns (estimate,
    standard error)."""
    rng = np.random.default_rng(seed)
    n_walks = len(u)
    hits = 0
    for _ in range(n_samples):
        pos = list(u)
        t = 0.0
        alive = True
        while True:
            t += rng.exponential(1.0 / n_walks)
            if t > horizon:
                break
            i = int(rng.integers(n_walks))
            pos[i] += 2 * int(rng.integers(2)) - 1
            if (i > 0 and pos[i] <= pos[i - 1]) or \
               (i < n_walks - 1 and pos[i] >= pos[i + 1]):
                alive = False
                break
        hits += alive
    p = hits / n_samples
    return p, math.sqrt(max(p * (1 - p), 1e-12) / n_samples)
