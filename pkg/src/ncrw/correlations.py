"""Determinantal correlation functions and finite Fredholm determinants.

Every spatio-temporal correlation of the noncolliding walk is the
determinant of the kernel matrix over the chosen space-time points, and
moment generating functionals over finitely supported test functions are
finite determinants det(I + K chi).  Determinants are evaluated by dense
LU; the expansion over point subsets is kept only as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .kernels import KernelSpec, as_point

MAX_CORRELATION_POINTS = 12
MAX_FREDHOLM_SUPPORT = 14


@dataclass(frozen=True)
class MultiTimePointSet:
    """Site groups at strictly increasing times, sites ordered within groups."""

    groups: tuple[tuple[float, tuple[int, ...]], ...]

    def __post_init__(self):
        norm = []
        for t, sites in self.groups:
            pt = float(t)
            if not math.isfinite(pt) or pt < 0:
                raise ValueError(f"times must be finite and >= 0, got {t}")
            ss = tuple(int(s) for s in sites)
            if not ss:
                raise ValueError("every time group needs at least one site")
            if any(b <= a for a, b in zip(ss, ss[1:])):
                raise ValueError(f"sites within a group must increase, got {ss}")
            norm.append((pt, ss))
        times = [t for t, _ in norm]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"times must be strictly increasing, got {times}")
        object.__setattr__(self, "groups", tuple(norm))

    def flatten(self) -> list[tuple[float, int]]:
        return [(t, x) for t, sites in self.groups for x in sites]

    @property
    def n_points(self) -> int:
        return sum(len(sites) for _, sites in self.groups)

    @property
    def max_time(self) -> float:
        return self.groups[-1][0]


@dataclass(frozen=True)
class CorrelationEntry:
    points: MultiTimePointSet
    value: float
    std_error: float | None = None


@dataclass(frozen=True)
class CorrelationTable:
    entries: tuple[CorrelationEntry, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def kernel_matrix(spec: KernelSpec, points: Sequence[tuple[float, int]],
                  **opts) -> np.ndarray:
    pts = [as_point(p) for p in points]
    n = len(pts)
    out = np.empty((n, n))
    for i, pi in enumerate(pts):
        for j, pj in enumerate(pts):
            out[i, j] = spec.evaluate(pi, pj, **opts)
    return out


def correlation_from_points(spec: KernelSpec,
                            points: Sequence[tuple[float, int]],
                            **opts) -> float:
    """det K over an explicit point list (no ordering constraints)."""
    if not points:
        return 1.0
    return float(np.linalg.det(kernel_matrix(spec, points, **opts)))


def correlation_function(spec: KernelSpec, pts: MultiTimePointSet,
                         **opts) -> float:
    """Correlation of occupying all sites of ``pts`` at their times.

    Determinant of the n x n kernel matrix over the flattened points;
    independent of the gauge carried by ``spec``.
    """
    n = pts.n_points
    if n > MAX_CORRELATION_POINTS:
        raise ValueError(
            f"point set has {n} points, above the determinant guard "
            f"{MAX_CORRELATION_POINTS}")
    return correlation_from_points(spec, pts.flatten(), **opts)


def density_profile(spec: KernelSpec, t: float, window: Sequence[int],
                    **opts) -> np.ndarray:
    """One-point correlation K(t,x;t,x) for x over the window."""
    return np.array([spec.evaluate((t, x), (t, x), **opts)
                     for x in window])


@dataclass(frozen=True)
class TestFunctionSet:
    """Finitely supported test functions f_t, one per (increasing) time.

    Stored as ((t, ((site, f_value), ...)), ...); the moment generating
    functional pairs the kernel with chi = e^f - 1, so f = -inf encodes
    chi = -1 (void-probability weights).
    """

    groups: tuple[tuple[float, tuple[tuple[int, float], ...]], ...]

    def __post_init__(self):
        norm = []
        for t, support in self.groups:
            pt = float(t)
            if not math.isfinite(pt) or pt < 0:
                raise ValueError(f"times must be finite and >= 0, got {t}")
            sup = tuple(sorted((int(x), float(f)) for x, f in support))
            sites = [x for x, _ in sup]
            if len(set(sites)) != len(sites):
                raise ValueError(f"duplicate support site at time {t}")
            norm.append((pt, sup))
        times = [t for t, _ in norm]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"times must be strictly increasing, got {times}")
        object.__setattr__(self, "groups", tuple(norm))

    @classmethod
    def from_chi(cls, groups) -> "TestFunctionSet":
        """Build from chi values; f = log(1 + chi), chi = -1 -> f = -inf."""
        conv = []
        for t, support in groups:
            conv.append((t, tuple((x, math.log1p(c) if c > -1.0 else -math.inf)
                                  for x, c in support)))
        return cls(tuple(conv))

    def chi_points(self) -> list[tuple[float, int, float]]:
        return [(t, x, math.expm1(f)) for t, sup in self.groups
                for x, f in sup]


def fredholm_generating_function(spec: KernelSpec, tests: TestFunctionSet,
                                 **opts) -> float:
    """Moment generating functional det(I + K chi) over the test support.

    Exact (up to kernel truncation error) because chi is supported on
    finitely many space-time points: the operator determinant collapses to
    an ordinary determinant indexed by the support.
    """
    chi_pts = tests.chi_points()
    n = len(chi_pts)
    if n > MAX_FREDHOLM_SUPPORT:
        raise ValueError(f"test support of {n} points above guard {MAX_FREDHOLM_SUPPORT}")
    if n == 0:
        return 1.0
    points = [(t, x) for t, x, _ in chi_pts]
    chi = np.array([c for _, _, c in chi_pts])
    mat = np.eye(n) + kernel_matrix(spec, points, **opts) * chi[None, :]
    return float(np.linalg.det(mat))
