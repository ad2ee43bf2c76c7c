"""Monte Carlo cross-validation of the analytic kernels.

Two independent estimators express expectations of the noncolliding walk
through plain independent walks started from the same configuration:

* h-transform: weight surviving paths (no ordering violation up to the
  horizon T) by the Vandermonde ratio h(V(T))/h(u);
* martingale determinant: weight *all* paths by det of the site
  martingales at T - signed weights, no conditioning.

Both give unbiased estimates of the same quantities and must agree with
each other and with the kernel determinants within statistical error.

Sampling is reproducible by construction: sample i draws from its own
generator seeded by (seed, i), and reductions run in sample order, so
results are bit-identical however the work is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from .correlations import (CorrelationEntry, CorrelationTable,
                           MultiTimePointSet)
from .martingales import FiniteConfiguration, site_martingale_row


@dataclass(frozen=True)
class WalkPath:
    """One continuous-time +-1 walk: jump times in (0, horizon] and steps."""

    start: int
    horizon: float
    jump_times: np.ndarray
    steps: np.ndarray

    def __post_init__(self):
        jt = np.asarray(self.jump_times, dtype=float)
        st = np.asarray(self.steps, dtype=np.int64)
        if jt.shape != st.shape:
            raise ValueError("jump_times and steps must have equal length")
        if jt.size and (jt[0] <= 0.0 or jt[-1] > self.horizon
                        or np.any(np.diff(jt) <= 0.0)):
            raise ValueError("jump times must increase strictly within (0, horizon]")
        if st.size and not np.all(np.abs(st) == 1):
            raise ValueError("steps must be +-1")
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "steps", st)
        object.__setattr__(self, "_cum", np.cumsum(st))

    def position(self, t: float) -> int:
        """Right-continuous position at time t <= horizon."""
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"query time {t} outside [0, {self.horizon}]")
        idx = int(np.searchsorted(self.jump_times, t, side="right"))
        return self.start + (int(self._cum[idx - 1]) if idx else 0)


@dataclass(frozen=True)
class WalkEnsemble:
    """Independent walks labeled by the (strictly increasing) start sites."""

    config: FiniteConfiguration
    paths: tuple[WalkPath, ...]

    def __post_init__(self):
        if len(self.paths) != len(self.config):
            raise ValueError("one path per configuration site required")
        horizons = {p.horizon for p in self.paths}
        if len(horizons) != 1:
            raise ValueError(f"paths carry mismatched horizons {horizons}")
        for p, u in zip(self.paths, self.config.sites):
            if p.start != u:
                raise ValueError("path starts must match the configuration")

    @property
    def horizon(self) -> float:
        return self.paths[0].horizon

    def positions(self, t: float) -> np.ndarray:
        return np.array([p.position(t) for p in self.paths])


def sample_walk(start: int, horizon: float, rng: np.random.Generator) -> WalkPath:
    """Unit-rate Poisson jump times on (0, horizon], i.i.d. +-1 steps."""
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    n = int(rng.poisson(horizon)) if horizon > 0 else 0
    times = np.sort(horizon * (1.0 - rng.random(n)))
    steps = 2 * rng.integers(0, 2, size=n) - 1
    return WalkPath(int(start), float(horizon), times, steps)


def sample_ensemble(config: FiniteConfiguration, horizon: float,
                    rng: np.random.Generator) -> WalkEnsemble:
    return WalkEnsemble(config, tuple(sample_walk(u, horizon, rng)
                                      for u in config.sites))


def exit_time(ensemble: WalkEnsemble) -> float:
    """First jump time at which the strict ordering fails; inf if none.

    The ordering can only change at jump instants, and with +-1 steps from
    a strictly ordered integer start the first violation is an equality of
    neighbors.  Simultaneous jumps have probability zero; if float ties
    occur they are processed in walk-index order.
    """
    paths = ensemble.paths
    n_walks = len(paths)
    if n_walks == 1:
        return math.inf
    pos = np.array(ensemble.config.sites, dtype=np.int64)
    times = np.concatenate([p.jump_times for p in paths])
    if times.size == 0:
        return math.inf
    walk = np.concatenate([np.full(p.jump_times.size, i, dtype=np.int64)
                           for i, p in enumerate(paths)])
    steps = np.concatenate([p.steps for p in paths])
    order = np.lexsort((walk, times))
    for idx in order:
        i = walk[idx]
        pos[i] += steps[idx]
        if (i > 0 and pos[i] <= pos[i - 1]) or \
           (i < n_walks - 1 and pos[i] >= pos[i + 1]):
            return float(times[idx])
    return math.inf


def vandermonde_ratio(v: Sequence[float], u: Sequence[float]) -> float:
    """h(v)/h(u) as a product of pairwise ratios."""
    if len(v) != len(u):
        raise ValueError("length mismatch")
    total = 1.0
    for j in range(len(v)):
        for k in range(j + 1, len(v)):
            total *= (v[k] - v[j]) / (u[k] - u[j])
    return total


# ---------------------------------------------------------------------------
# path functionals (bounded multi-time occupation statistics)
# ---------------------------------------------------------------------------

class PathFunctional(Protocol):
    """Bounded functional of the unlabeled configuration path.

    ``times`` lists the query times; ``evaluate`` receives the walk
    positions at each of them.  Restricting to this structure keeps the
    two estimators consuming exactly the same observable.
    """

    @property
    def times(self) -> tuple[float, ...]: ...

    def evaluate(self, positions: dict[float, np.ndarray]) -> float: ...


@dataclass(frozen=True)
class One:
    """Constant functional; its estimate checks estimator normalization."""

    @property
    def times(self) -> tuple[float, ...]:
        return ()

    def evaluate(self, positions) -> float:
        return 1.0


@dataclass(frozen=True)
class OccupationProduct:
    """Product over the point set of indicators {site occupied at time}."""

    points: MultiTimePointSet

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.points.groups)

    def evaluate(self, positions) -> float:
        for t, sites in self.points.groups:
            occupied = positions[t]
            if not all(s in occupied for s in sites):
                return 0.0
        return 1.0


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    std_error: float
    n_samples: int
    effective_samples: float


@lru_cache(maxsize=200_000)
def _martingale_row_cached(config: FiniteConfiguration, t: float,
                           y: int) -> np.ndarray:
    row = site_martingale_row(config, t, y)
    row.setflags(write=False)
    return row


def _determinant_weight(config: FiniteConfiguration, t: float,
                        positions: np.ndarray) -> float:
    rows = np.stack([_martingale_row_cached(config, t, int(y))
                     for y in positions])
    if rows.shape[0] == 1:
        return float(rows[0, 0])
    if rows.shape[0] == 2:
        return float(rows[0, 0] * rows[1, 1] - rows[0, 1] * rows[1, 0])
    return float(np.linalg.det(rows))


def estimate_many(config: FiniteConfiguration,
                  functionals: Sequence[PathFunctional], T: float,
                  n_samples: int, seed: int, estimator: str = "h", *,
                  threads: int = 1) -> list[EstimatorResult]:
    """Estimate several functionals from one shared sample sweep.

    ``estimator="h"``: conditioned-path weight 1(no collision up to T) *
    h(V(T))/h(u).  ``estimator="dmr"``: determinant of site martingales at
    T over unconditioned paths (signed weights).

    Per-sample values land in arrays indexed by the sample and are reduced
    by compensated summation afterwards, so the result does not depend on
    ``threads``.
    """
    if estimator not in ("h", "dmr"):
        raise ValueError(f"estimator must be 'h' or 'dmr', got {estimator!r}")
    if n_samples < 1:
        raise ValueError(f"need n_samples >= 1, got {n_samples}")
    if seed < 0 or seed != int(seed):
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    T = float(T)
    query_times = sorted({t for f in functionals for t in f.times})
    if query_times and query_times[-1] > T:
        raise ValueError(f"functional time {query_times[-1]} beyond horizon {T}")
    if query_times and query_times[0] < 0:
        raise ValueError("functional times must be >= 0")
    u = config.sites
    vals = np.empty((len(functionals), n_samples))
    weights = np.empty(n_samples)

    def run_range(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            rng = np.random.default_rng((int(seed), i))
            ens = sample_ensemble(config, T, rng)
            if estimator == "h":
                w = 0.0 if exit_time(ens) <= T else \
                    float(vandermonde_ratio(ens.positions(T), u))
            else:
                w = _determinant_weight(config, T, ens.positions(T))
            weights[i] = w
            if w == 0.0:
                vals[:, i] = 0.0
            else:
                positions = {t: ens.positions(t) for t in query_times}
                for k, f in enumerate(functionals):
                    vals[k, i] = f.evaluate(positions) * w

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        chunk = 2048
        bounds = [(lo, min(lo + chunk, n_samples))
                  for lo in range(0, n_samples, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: run_range(*b), bounds))
    else:
        run_range(0, n_samples)

    w_sq = math.fsum(float(w) * float(w) for w in weights)
    w_abs = math.fsum(abs(float(w)) for w in weights)
    ess = float(w_abs * w_abs / w_sq) if w_sq > 0 else 0.0
    out = []
    for k in range(len(functionals)):
        mean = math.fsum(vals[k]) / n_samples
        se = float(np.std(vals[k], ddof=1)) / math.sqrt(n_samples) \
            if n_samples > 1 else math.inf
        out.append(EstimatorResult(mean, se, n_samples, ess))
    return out


def h_transform_estimator(config: FiniteConfiguration,
                          functional: PathFunctional, T: float,
                          n_samples: int, seed: int) -> EstimatorResult:
    """Conditioned-path estimator: E[F * 1(no collision <= T) h(V(T))/h(u)]."""
    return estimate_many(config, [functional], T, n_samples, seed, "h")[0]


def martingale_determinant_estimator(config: FiniteConfiguration,
                                     functional: PathFunctional, T: float,
                                     n_samples: int,
                                     seed: int) -> EstimatorResult:
    """Unconditioned estimator weighted by det of the site martingales."""
    return estimate_many(config, [functional], T, n_samples, seed, "dmr")[0]


def absorbed_weight_mean(config: FiniteConfiguration, T: float,
                         n_samples: int, seed: int) -> EstimatorResult:
    """Mean of 1(collision by T) * h(V(T))/h(u); zero in expectation.

    The antisymmetry of h under exchanging the colliding pair kills this
    term exactly, which is what makes the unconditioned determinant
    estimator equal the conditioned one.
    """
    if n_samples < 1:
        raise ValueError(f"need n_samples >= 1, got {n_samples}")
    u = config.sites
    vals = np.empty(n_samples)
    for i in range(n_samples):
        rng = np.random.default_rng((int(seed), i))
        ens = sample_ensemble(config, float(T), rng)
        if exit_time(ens) <= T:
            vals[i] = vandermonde_ratio(ens.positions(float(T)), u)
        else:
            vals[i] = 0.0
    mean = math.fsum(vals) / n_samples
    se = float(np.std(vals, ddof=1)) / math.sqrt(n_samples) \
        if n_samples > 1 else math.inf
    return EstimatorResult(mean, se, n_samples, float(n_samples))


def empirical_correlation(config: FiniteConfiguration,
                          point_sets: Sequence[MultiTimePointSet] | MultiTimePointSet,
                          estimator: str, n_samples: int, seed: int, *,
                          T: float | None = None,
                          threads: int = 1) -> CorrelationTable:
    """Correlation estimates (occupation products) with standard errors."""
    if isinstance(point_sets, MultiTimePointSet):
        point_sets = [point_sets]
    if T is None:
        T = max(p.max_time for p in point_sets)
    functionals = [OccupationProduct(p) for p in point_sets]
    results = estimate_many(config, functionals, T, n_samples, seed, estimator,
                            threads=threads)
    entries = tuple(CorrelationEntry(p, r.mean, r.std_error)
                    for p, r in zip(point_sets, results))
    return CorrelationTable(entries)
