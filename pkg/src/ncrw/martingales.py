"""Martingale functions of the continuous-time simple random walk.

The walk's exponential martingale ``exp(a*x - t*(cosh a - 1))`` generates a
family of monic martingale polynomials m_n (discrete heat polynomials).
The same polynomials arise from the signed Bessel transform

    (B f)(t, x) = e^t * sum_w I_{|w-x|}(-t) f(w),

which inverts the transition semigroup on polynomials: m_n = B[w^n] and
sum_y p(t, y|x) m_n(t, y) = x^n.  Applying B to the Lagrange basis
polynomials of a finite configuration (or to their sinc limit for the
infinite equidistant lattice) yields the site martingales whose
determinants drive everything else in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .bessel import scaled_bessel_i_all
from .errors import ConvergenceError
from .quadrature import gauss_legendre

MAX_MARTINGALE_DEGREE = 12


@dataclass(frozen=True)
class FiniteConfiguration:
    """Strictly increasing integer sites of a finite particle configuration."""

    sites: tuple[int, ...]

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        if len(sites) < 1:
            raise ValueError("configuration needs at least one site")
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ValueError(f"sites must be strictly increasing, got {sites}")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "_site_index",
                           {s: i for i, s in enumerate(sites)})

    def __len__(self) -> int:
        return len(self.sites)

    @classmethod
    def equidistant(cls, a: int, half_width: int) -> "FiniteConfiguration":
        """Sites a*Z intersected with [-half_width, half_width]."""
        k_max = half_width // a
        return cls(tuple(a * k for k in range(-k_max, k_max + 1)))


@dataclass(frozen=True)
class LatticeSpec:
    """Infinite equidistant configuration a*Z with integer spacing a >= 2."""

    a: int

    def __post_init__(self):
        if self.a != int(self.a) or self.a < 2:
            raise ValueError(f"lattice spacing must be an integer >= 2, got {self.a}")
        object.__setattr__(self, "a", int(self.a))

    @property
    def density(self) -> float:
        return 1.0 / self.a


def esscher_weight(alpha: float, t: float, x: int) -> float:
    """Exponential martingale exp(alpha*x - t*(cosh(alpha) - 1))."""
    if not math.isfinite(alpha):
        raise ValueError(f"tilt parameter must be finite, got {alpha}")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    return math.exp(alpha * x - t * (math.cosh(alpha) - 1.0))


@lru_cache(maxsize=None)
def _generating_coeffs(m: int) -> tuple[Fraction, ...]:
    # Taylor coefficients of exp(-t*(cosh a - 1)) in a: b_m(t) as a tuple of
    # Fractions indexed by the power of t.  Standard exp-of-series recurrence
    # b_m = (1/m) * sum_k k c_k b_{m-k} with c_k = -t/k! for even k >= 2.
    if m == 0:
        return (Fraction(1),)
    acc: dict[int, Fraction] = {}
    for k in range(2, m + 1, 2):
        prev = _generating_coeffs(m - k)
        scale = Fraction(-1, math.factorial(k - 1))
        for p, c in enumerate(prev):
            if c:
                acc[p + 1] = acc.get(p + 1, Fraction(0)) + scale * c
    top = max(acc) if acc else 0
    return tuple(Fraction(acc.get(p, 0), m) for p in range(top + 1))


@lru_cache(maxsize=None)
def _martingale_table(n: int) -> tuple[tuple[Fraction, ...], ...]:
    fact_n = math.factorial(n)
    rows = []
    for j in range(n + 1):
        scale = Fraction(fact_n, math.factorial(j))
        rows.append(tuple(scale * c for c in _generating_coeffs(n - j)))
    return tuple(rows)


def martingale_coefficients(n: int, *, n_max: int = MAX_MARTINGALE_DEGREE
                            ) -> tuple[tuple[Fraction, ...], ...]:
    """Exact coefficient table of m_n: entry j is the t-polynomial on x^j.

    m_n(t, x) = sum_j (sum_p coeffs[j][p] t^p) x^j, generated once by exact
    rational convolution of exp(a*x) with the even series of
    exp(-t*(cosh a - 1)).  Monic with m_n(0, x) = x^n by construction.
    Degrees above ``n_max`` are refused; raise the guard explicitly if a
    caller really wants them.
    """
    if n < 0 or n > n_max:
        raise ValueError(f"degree must be in 0..{n_max}, got {n}")
    return _martingale_table(n)


def martingale_polynomial(n: int, t: float, x: float, *,
                          n_max: int = MAX_MARTINGALE_DEGREE) -> float:
    """m_n(t, x); monic in x, m_n(0, x) = x^n, martingale along the walk."""
    table = martingale_coefficients(n, n_max=n_max)
    total = 0.0
    for row in reversed(table):  # Horner in x
        cj = 0.0
        for c in reversed(row):  # Horner in t
            cj = cj * t + float(c)
        total = total * x + cj
    return total


def vandermonde(xs: Sequence[float]) -> float:
    """prod_{j<k} (x_k - x_j); zero iff two entries coincide."""
    x = [float(v) for v in xs]
    total = 1.0
    for j in range(len(x)):
        for k in range(j + 1, len(x)):
            total *= x[k] - x[j]
    return total


def lagrange_basis(config: FiniteConfiguration, k: int, z: float) -> float:
    """prod_{j != k} (z - u_j) / (u_k - u_j); equals delta_{jk} at z = u_j."""
    u = config.sites
    if not 0 <= k < len(u):
        raise IndexError(f"site index {k} out of range for N={len(u)}")
    total = 1.0
    for j, uj in enumerate(u):
        if j != k:
            total *= (z - uj) / (u[k] - uj)
    return total


# ---------------------------------------------------------------------------
# signed Bessel transform (inverse of the transition semigroup on polynomials)
# ---------------------------------------------------------------------------

def _signed_weight_scan(t: float, eps_tail: float, max_radius: int):
    # Yields (k, weight_k) with weight_k = (-1)^k e^{2t} itilde_k(t), the
    # coefficient of f(x +- k) in e^t sum_w I_{|w-x|}(-t) f(w).
    size = 64
    vals = scaled_bessel_i_all(size, t)
    amp = math.exp(2.0 * t)
    k = 0
    while k <= max_radius:
        if k > size:
            size *= 2
            vals = scaled_bessel_i_all(size, t)
        yield k, (amp if k % 2 == 0 else -amp) * vals[k]
        k += 1


def backward_transform(f: Callable[[int], float], degree: int, t: float,
                       x: int, *, eps_tail: float = 1e-14,
                       max_radius: int = 4096) -> float:
    """e^t sum_w I_{|w-x|}(-t) f(w) for f of at most polynomial growth.

    ``degree`` bounds the growth of f so the truncation radius is safe:
    the signed weights decay super-exponentially, and the scan stops after
    three consecutive rings contribute less than ``eps_tail`` beyond radius
    t + degree.  Compensated summation keeps the alternating cancellation
    (the weights sum to e^{-2t} times the result scale) at roughly
    eps * e^{2t} absolute error.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if t == 0.0:
        return float(f(x))
    x = int(x)
    terms = []
    quiet = 0
    floor = t + degree
    for k, w in _signed_weight_scan(t, eps_tail, max_radius):
        contrib = w * f(x) if k == 0 else w * (f(x + k) + f(x - k))
        terms.append(contrib)
        if k > floor and abs(contrib) < eps_tail:
            quiet += 1
            if quiet >= 3:
                return math.fsum(terms)
        else:
            quiet = 0
    raise ConvergenceError("backward_transform",
                           f"terms still above {eps_tail:g} at radius {max_radius}")


def backward_transform_exp(alpha: float, t: float, x: int, *,
                           eps_tail: float = 1e-14,
                           max_radius: int = 4096) -> float:
    """The transform applied to w -> exp(alpha*(w - x)).

    Only non-polynomial input the package needs; its exact value is
    exp(-t*(cosh(alpha) - 1)), the reciprocal of the walk's moment
    generating factor, which tests verify against this truncated sum.
    """
    if not math.isfinite(alpha):
        raise ValueError(f"tilt parameter must be finite, got {alpha}")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if t == 0.0:
        return 1.0
    terms = []
    quiet = 0
    floor = t * math.exp(abs(alpha))
    for k, w in _signed_weight_scan(t, eps_tail, max_radius):
        contrib = w if k == 0 else w * (math.exp(alpha * k) + math.exp(-alpha * k))
        terms.append(contrib)
        if k > floor and abs(contrib) < eps_tail:
            quiet += 1
            if quiet >= 3:
                return math.fsum(terms)
        else:
            quiet = 0
    raise ConvergenceError("backward_transform",
                           f"terms still above {eps_tail:g} at radius {max_radius}")


# ---------------------------------------------------------------------------
# site martingales of a finite configuration
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _lagrange_denominators(config: FiniteConfiguration) -> np.ndarray:
    u = np.asarray(config.sites, dtype=float)
    diffs = u[:, None] - u[None, :]
    np.fill_diagonal(diffs, 1.0)
    d = diffs.prod(axis=1)
    d.setflags(write=False)
    return d


def _lagrange_row(config: FiniteConfiguration, w: int,
                  denom: np.ndarray) -> np.ndarray:
    # Phi^{u_k}(w) for all k at an integer point w.
    u = config.sites
    if w in config._site_index:
        row = np.zeros(len(u))
        row[config._site_index[w]] = 1.0
        return row
    dw = w - np.asarray(u, dtype=float)
    full = dw.prod()
    return full / (dw * denom)


def site_martingale_row(config: FiniteConfiguration, t: float, y: int, *,
                        eps_tail: float = 1e-14,
                        max_radius: int = 4096) -> np.ndarray:
    """Backward transform of every Lagrange basis polynomial at (t, y).

    Entry k is the martingale attached to site u_k evaluated at (t, y);
    at t = 0 the row collapses to the Kronecker row Phi^{u_k}(y).
    """
    denom = _lagrange_denominators(config)
    if t == 0.0:
        return _lagrange_row(config, int(y), denom)
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    y = int(y)
    rings = []
    quiet = 0
    floor = t + len(config) - 1
    for k, w in _signed_weight_scan(t, eps_tail, max_radius):
        if k == 0:
            ring = w * _lagrange_row(config, y, denom)
        else:
            ring = w * (_lagrange_row(config, y + k, denom)
                        + _lagrange_row(config, y - k, denom))
        rings.append(ring)
        peak = np.max(np.abs(ring))
        if not np.isfinite(peak):
            raise ConvergenceError(
                "site_martingale",
                f"basis polynomial overflow at ring {k} for N={len(config)} "
                "sites (configuration too wide for the direct route)")
        if k > floor and peak < eps_tail:
            quiet += 1
            if quiet >= 3:
                stacked = np.stack(rings)
                return np.array([math.fsum(stacked[:, j])
                                 for j in range(stacked.shape[1])])
        else:
            quiet = 0
    raise ConvergenceError("site_martingale",
                           f"terms still above {eps_tail:g} at radius {max_radius}")


def site_martingale(config: FiniteConfiguration, k: int, t: float, y: int, *,
                    eps_tail: float = 1e-14) -> float:
    """Martingale of site u_k: backward transform of its Lagrange polynomial."""
    if not 0 <= k < len(config):
        raise IndexError(f"site index {k} out of range for N={len(config)}")
    return float(site_martingale_row(config, t, y, eps_tail=eps_tail)[k])


# ---------------------------------------------------------------------------
# infinite equidistant lattice: sinc basis and its martingale
# ---------------------------------------------------------------------------

def lattice_basis(lattice: LatticeSpec, k: int, z: float) -> float:
    """sin(pi(z/a - k)) / (pi(z/a - k)): Lagrange basis of the lattice a*Z."""
    c = math.pi * (z / lattice.a - k)
    if abs(c) < 1e-4:
        c2 = c * c
        return 1.0 - c2 / 6.0 * (1.0 - c2 / 20.0 * (1.0 - c2 / 42.0))
    return math.sin(c) / c


def lattice_martingale(lattice: LatticeSpec, k: int, t: float, y: int, *,
                       tol: float = 1e-13) -> float:
    """Martingale of lattice site a*k:

    (1/2pi) int_{-pi}^{pi} exp(i*(y/a - k)*lam + t*(1 - cos(lam/a))) dlam,
    the backward transform of the sinc basis.  Reduces to the sinc itself
    at t = 0 and to the Kronecker delta at lattice points.
    """
    return float(lattice_martingale_batch(lattice, [k], t, y, tol=tol)[0])


def lattice_martingale_batch(lattice: LatticeSpec, ks: Sequence[int],
                             t: float, y: int, *,
                             tol: float = 1e-13) -> np.ndarray:
    """Vector of lattice site martingales for several indices at once."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    a = lattice.a
    karr = np.asarray(list(ks), dtype=float)

    def integrand(lam):
        phase = np.exp(1j * np.outer(lam, y / a - karr))
        damp = np.exp(t * (1.0 - np.cos(lam / a)))
        return phase * damp[:, None]

    vals = gauss_legendre(integrand, -math.pi, math.pi, tol=tol) / (2.0 * math.pi)
    scale = max(1.0, float(np.max(np.abs(vals.real))))
    worst = float(np.max(np.abs(vals.imag)))
    if worst > 1e-12 * scale:
        raise ConvergenceError("lattice_martingale",
                               f"imaginary residue {worst:g} above 1e-12")
    return vals.real
