"""End-to-end numerical self-checks behind the ``selftest`` subcommand.

Each check pins an identity of the model to a fixed tolerance and runtime
budget: the three transition-probability routes, martingale and
determinant identities, the projection property of equal-time kernels,
gauge invariance of correlations, the finite-window limit to the lattice
kernel, relaxation to the sine kernel, and the stationary-kernel
rewrites.  The Monte Carlo comparisons live in the test suite instead
(they take minutes, not seconds).

The tau = 32 relaxation gap and its friends are regression fixtures:
computed once from this code base, then frozen.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

import numpy as np

from .bessel import (scaled_bessel_i_all, transition_probability,
                     transition_probability_poisson,
                     transition_probability_quadrature, truncation_radius)
from .correlations import correlation_from_points
from .kernels import (KernelSpec, LatticeSpec, StationarySpec, kernel_finite,
                      kernel_lattice, kernel_stationary,
                      equal_time_kernel_matrix, sine_kernel)
from .martingales import (FiniteConfiguration, backward_transform_exp,
                          lagrange_basis, martingale_polynomial, vandermonde)
from .quadrature import gauss_legendre
from .relaxation import relaxation_sweep, remainder_damping_max

# Equal-time relaxation gap max_{|dx|<=5} at tau = 32, a = 2 (criterion 8
# fixture, frozen after first computation by this implementation).
RELAXATION_GAP_FIXTURE_TAU32 = 0.004974808911999862
RELAXATION_FIXTURE_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: {self.detail} [{self.seconds:.2f}s]"


def _finish(name: str, started: float, passed: bool, detail: str,
            budget: float | None = None) -> CheckResult:
    elapsed = time.perf_counter() - started
    if budget is not None and elapsed >= budget:
        passed = False
        detail += f"; runtime {elapsed:.2f}s over budget {budget:g}s"
    return CheckResult(name, passed, detail, elapsed)


def check_transition_triple() -> CheckResult:
    """Bessel form, Fourier quadrature and Poissonization agree pairwise."""
    started = time.perf_counter()
    worst = 0.0
    for t in (0.5, 1.0, 2.0, 5.0, 10.0):
        for d in range(31):
            a = transition_probability(t, 0, d)
            b = transition_probability_quadrature(t, 0, d)
            c = transition_probability_poisson(t, 0, d)
            worst = max(worst, abs(a - b), abs(a - c), abs(b - c))
    return _finish("transition-triple-agreement", started, worst <= 1e-12,
                   f"max pairwise difference {worst:.2e} (tol 1e-12)",
                   budget=1.0)


def check_martingale_identities() -> CheckResult:
    """Semigroup inverts the polynomials; exponential transform identity."""
    started = time.perf_counter()
    worst_poly = 0.0
    for t in (0.5, 1.0, 2.0):
        radius = truncation_radius(t, 1e-30) + 4
        for u in range(-2, 3):
            it = scaled_bessel_i_all(radius, t)
            for n in range(9):
                total = math.fsum(
                    it[abs(y - u)] * martingale_polynomial(n, t, float(y))
                    for y in range(u - radius, u + radius + 1))
                worst_poly = max(worst_poly, abs(total - float(u) ** n))
    worst_exp = 0.0
    for t in (0.5, 1.0, 2.0, 5.0):
        for alpha in (-1.0, -0.5, -0.25, 0.25, 0.5, 1.0):
            got = backward_transform_exp(alpha, t, 3)
            want = math.exp(-t * (math.cosh(alpha) - 1.0))
            worst_exp = max(worst_exp, abs(got - want))
    ok = worst_poly <= 1e-8 and worst_exp <= 1e-10
    return _finish("martingale-identities", started, ok,
                   f"semigroup residual {worst_poly:.2e} (tol 1e-8), "
                   f"exponential residual {worst_exp:.2e} (tol 1e-10)",
                   budget=5.0)


def check_lagrange_determinant_identity() -> CheckResult:
    """h(z)/h(u) equals det of the Lagrange basis matrix, random instances."""
    started = time.perf_counter()
    rng = np.random.default_rng(20240)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 6))
        u = np.sort(rng.choice(np.arange(-10, 11), size=n, replace=False))
        z = rng.choice(np.arange(-10, 11), size=n, replace=False)
        config = FiniteConfiguration(tuple(int(v) for v in u))
        ratio = vandermonde(z) / vandermonde(u)
        mat = np.array([[lagrange_basis(config, k, float(zj)) for k in range(n)]
                        for zj in z])
        det = float(np.linalg.det(mat))
        worst = max(worst, abs(det - ratio) / abs(ratio))
    return _finish("lagrange-determinant-identity", started, worst <= 1e-10,
                   f"max relative residual {worst:.2e} (tol 1e-10)")


def check_equal_time_projection() -> CheckResult:
    """Equal-time kernel is a rank-N projection on a truncated window."""
    started = time.perf_counter()
    worst_proj = 0.0
    worst_trace = 0.0
    for sites in ((0, 2), (-2, 0, 3)):
        config = FiniteConfiguration(sites)
        for t in (0.5, 1.0, 2.0):
            radius = truncation_radius(t, 1e-24) + 4
            window = range(min(sites) - radius, max(sites) + radius + 1)
            kt = equal_time_kernel_matrix(config, t, window)
            worst_proj = max(worst_proj, float(np.abs(kt @ kt - kt).max()))
            worst_trace = max(worst_trace,
                              abs(float(np.trace(kt)) - len(sites)))
    ok = worst_proj <= 1e-8 and worst_trace <= 1e-8
    return _finish("equal-time-projection", started, ok,
                   f"max |K.K - K| {worst_proj:.2e}, "
                   f"max |trace - N| {worst_trace:.2e} (tol 1e-8)",
                   budget=10.0)


_GAUGE_POINT_SETS = (
    [(0.5, 0), (0.5, 1)],
    [(0.3, 0), (0.8, 2), (1.2, 1)],
    [(0.4, -1), (0.4, 0), (1.1, 2), (1.6, 3)],
    [(1.0, 0)],
)


def check_gauge_invariance() -> CheckResult:
    """Correlation determinants identical in both gauge conventions."""
    started = time.perf_counter()
    variants = (FiniteConfiguration((0, 2)), LatticeSpec(2),
                StationarySpec(0.5))
    worst = 0.0
    for variant in variants:
        for points in _GAUGE_POINT_SETS:
            dp = correlation_from_points(KernelSpec(variant, "prob"), points)
            da = correlation_from_points(KernelSpec(variant, "paper"), points)
            worst = max(worst, abs(dp - da) / max(abs(dp), 1e-12))
    return _finish("gauge-invariance", started, worst <= 1e-10,
                   f"max relative determinant mismatch {worst:.2e} (tol 1e-10)")


def check_lattice_from_finite() -> CheckResult:
    """Finite equidistant windows converge to the lattice kernel.

    The error decrease over L in {10, 20, 40} must be monotone and the
    stated acceptance threshold 1e-6 applies at L = 40.
    """
    started = time.perf_counter()
    lattice = LatticeSpec(2)
    target = {(x, y): kernel_lattice(lattice, (0.5, x), (0.5, y))
              for x in (0, 1) for y in (0, 1)}
    errs = []
    for half_width in (10, 20, 40):
        config = FiniteConfiguration.equidistant(2, half_width)
        errs.append({xy: abs(kernel_finite(config, (0.5, xy[0]), (0.5, xy[1]))
                             - target[xy]) for xy in target})
    monotone = all(errs[0][xy] > errs[1][xy] > errs[2][xy] for xy in target)
    final = max(errs[2].values())
    ok = monotone and final <= 1e-6
    return _finish(
        "lattice-from-finite-convergence", started, ok,
        f"monotone={monotone}, max error at L=40 is {final:.2e} "
        "(tol 1e-6; the window limit converges at rate ~1/L, see notes)")


def check_relaxation() -> CheckResult:
    """Equal-time gap to the sine kernel shrinks along the tau grid."""
    started = time.perf_counter()
    lattice = LatticeSpec(2)
    report = relaxation_sweep(lattice, [(0.0, dx) for dx in range(-5, 6)],
                              (4.0, 8.0, 16.0, 32.0))
    per_tau = report.max_gap()
    monotone = bool(np.all(np.diff(per_tau) <= 1e-12))
    fixture_dev = abs(per_tau[-1] - RELAXATION_GAP_FIXTURE_TAU32)
    damping = remainder_damping_max(lattice)
    ok = monotone and fixture_dev <= RELAXATION_FIXTURE_TOL and damping < 1.0
    return _finish(
        "relaxation-to-sine-kernel", started, ok,
        f"max gaps per tau {np.array2string(per_tau, precision=3)}, "
        f"fixture deviation {fixture_dev:.2e}, damping max {damping:.6f} < 1",
        budget=30.0)


def check_stationary_identities() -> CheckResult:
    """Fourier rewrite of the transition law; sine kernel consistency."""
    started = time.perf_counter()
    worst_rewrite = 0.0
    for t in (0.5, 1.0, 2.0):
        for dx in (0, 1, 2, 5):
            lhs = transition_probability_quadrature(t, 0, dx)

            def integrand(u, dx=dx, t=t):
                return np.cos(u * math.pi * dx) * \
                    np.exp(-(1.0 - np.cos(u * math.pi)) * t)

            rhs = gauss_legendre(integrand, 0.0, 1.0)
            worst_rewrite = max(worst_rewrite, abs(lhs - rhs))
    exact = all(
        kernel_stationary(rho, 0.0, n) == sine_kernel(rho, n)
        for rho in (0.5, 1.0 / 3.0) for n in range(-10, 11))
    ok = worst_rewrite <= 1e-12 and exact
    return _finish("stationary-kernel-identities", started, ok,
                   f"rewrite residual {worst_rewrite:.2e} (tol 1e-12), "
                   f"equal-time closed form exact: {exact}")


ALL_CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_transition_triple,
    check_martingale_identities,
    check_lagrange_determinant_identity,
    check_equal_time_projection,
    check_gauge_invariance,
    check_lattice_from_finite,
    check_relaxation,
    check_stationary_identities,
)


def run_selftest(stream: TextIO = sys.stdout,
                 checks: Sequence[Callable[[], CheckResult]] = ALL_CHECKS
                 ) -> int:
    """Run every check, print one pass/fail line each; 0 iff all passed."""
    results = []
    for check in checks:
        result = check()
        results.append(result)
        print(result.line(), file=stream, flush=True)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed",
          file=stream, flush=True)
    return 1 if failed else 0
