"""Scaled modified Bessel functions and the walk transition probability.

Everything downstream is built from the scaled function

    itilde_n(t) = exp(-t) * I_n(t),   n >= 0, t >= 0,

which stays in [0, 1] and therefore never overflows.  ``I_n`` is the
modified Bessel function of the first kind of integer order.  The single
step transition probability of the continuous-time simple symmetric
random walk on Z is exactly ``p(t, y|x) = itilde_{|y-x|}(t)``; two
independent evaluation routes (Fourier quadrature and Poissonization of
the discrete walk) are provided as oracles for it.

Evaluation strategy: power series for small ``t``, Miller backward
recurrence normalized with ``itilde_0 + 2*sum_k itilde_k = 1`` for large
``t``.  Both routes avoid the unscaled ``I_n`` entirely.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError
from .quadrature import periodic_mean

# Crossover between the series and the backward recurrence.  Below this the
# series needs O(t) terms and its first term exp(-t) is far from underflow.
_SERIES_T_MAX = 50.0
_RESCALE = 1e250


def _check_order_time(n: int, t: float) -> None:
    if n != int(n) or n < 0:
        raise ValueError(f"Bessel order must be a nonnegative integer, got {n}")
    if not math.isfinite(t):
        raise ValueError(f"time argument must be finite, got {t}")
    if t < 0:
        raise ValueError(f"time argument must be >= 0, got {t}")


def _series_single(n: int, t: float) -> float:
    # itilde_n(t) = exp(-t) (t/2)^n sum_l (t/2)^(2l) / (l! (n+l)!)
    half = 0.5 * t
    term = math.exp(-t)
    for j in range(1, n + 1):
        term *= half / j
        if term == 0.0:
            return 0.0
    h2 = half * half
    total = term
    for l in range(1, 1000):
        term *= h2 / (l * (n + l))
        total += term
        if term <= total * 1e-18:
            return total
    raise ConvergenceError("scaled_bessel_i", f"series stalled at n={n}, t={t}")


def _miller_all(n_max: int, t: float) -> np.ndarray:
    # Backward recurrence I_{k-1} = I_{k+1} + (2k/t) I_k from a start index
    # high enough that the wanted orders are fully converged, then normalize
    # with I_0 + 2 sum_{k>=1} I_k = e^t  (i.e. itilde sums to 1).
    top = max(n_max, int(math.ceil(t)))
    start = top + 10 + int(2.0 * math.sqrt(40.0 * (top + 1)))
    f = np.zeros(start + 1)
    fp = 0.0  # f_{k+1}
    fc = 1.0  # f_k
    f[start] = fc
    for k in range(start, 0, -1):
        fm = fp + (2.0 * k / t) * fc
        fp, fc = fc, fm
        f[k - 1] = fm
        if fm > _RESCALE:
            f[k - 1:] /= _RESCALE
            fp /= _RESCALE
            fc /= _RESCALE
    norm = f[0] + 2.0 * f[1:].sum()
    return f[:n_max + 1] / norm


def scaled_bessel_i(n: int, t: float) -> float:
    """exp(-t) * I_n(t) for integer order n >= 0 and t >= 0."""
    _check_order_time(n, t)
    n = int(n)
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    if t < _SERIES_T_MAX:
        return _series_single(n, t)
    return float(_miller_all(n, t)[n])


@lru_cache(maxsize=512)
def _scaled_all_cached(n_max: int, t: float) -> np.ndarray:
    if t < _SERIES_T_MAX:
        out = np.empty(n_max + 1)
        half = 0.5 * t
        h2 = half * half
        pref = math.exp(-t)
        for n in range(n_max + 1):
            if n > 0:
                pref *= half / n
            if pref == 0.0:
                out[n:] = 0.0
                break
            term = pref
            total = term
            for l in range(1, 1000):
                term *= h2 / (l * (n + l))
                total += term
                if term <= total * 1e-18:
                    break
            out[n] = total
    else:
        out = _miller_all(n_max, t)
    out.setflags(write=False)
    return out


def scaled_bessel_i_all(n_max: int, t: float) -> np.ndarray:
    """Read-only array of exp(-t) I_n(t) for n = 0..n_max."""
    _check_order_time(n_max, t)
    if t == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        out.setflags(write=False)
        return out
    return _scaled_all_cached(int(n_max), float(t))


def signed_bessel_i(n: int, z: float) -> float:
    """I_n(z) for any real z, via the parity I_n(-t) = (-1)^n I_n(t)."""
    if not math.isfinite(z):
        raise ValueError(f"argument must be finite, got {z}")
    mag = math.exp(abs(z)) * scaled_bessel_i(n, abs(z))
    if z < 0 and n % 2 == 1:
        return -mag
    return mag


def truncation_radius(t: float, eps_tail: float = 1e-16) -> int:
    """Largest order n with itilde_n(t) >= eps_tail (0 if none).

    itilde_n(t) is decreasing in n, so lattice sums over |y - x| <= radius
    capture all but an O(eps_tail) tail.  Found by scanning outward from
    ceil(t) + 10.
    """
    _check_order_time(0, t)
    if not 0.0 < eps_tail < 1.0:
        raise ValueError(f"eps_tail must be in (0, 1), got {eps_tail}")
    if t == 0.0:
        return 0
    guess = int(math.ceil(t)) + 10
    while True:
        vals = scaled_bessel_i_all(guess, t)
        below = np.nonzero(vals < eps_tail)[0]
        if below.size:
            return int(below[0]) - 1 if below[0] > 0 else 0
        guess *= 2
        if guess > 10_000_000:
            raise ConvergenceError("truncation_radius",
                                   f"no decay below {eps_tail:g} found for t={t}")


def transition_probability(t: float, x: int, y: int) -> float:
    """p(t, y|x) = exp(-t) I_{|y-x|}(t); Kronecker delta at t = 0."""
    return scaled_bessel_i(abs(int(y) - int(x)), t)


def transition_probability_quadrature(t: float, x: int, y: int, *,
                                      tol: float = 1e-14,
                                      n_start: int = 16) -> float:
    """p(t, y|x) as (1/2pi) int_{-pi}^{pi} e^{ik(y-x)} e^{-(1-cos k)t} dk.

    The integrand is entire and 2pi-periodic, so the equally weighted
    periodic rule converges spectrally; nodes double until successive
    levels agree.  Independent of the Bessel evaluation path.
    """
    _check_order_time(0, t)
    if n_start < 4:
        raise ValueError(f"node count must be >= 4, got {n_start}")
    d = abs(int(y) - int(x))

    def integrand(k):
        return np.cos(d * k) * np.exp(-(1.0 - np.cos(k)) * t)

    # resolve the cos(d*k) oscillation from the first level on: coarser
    # grids alias it onto low harmonics that survive one doubling.
    return periodic_mean(integrand, n_start=max(n_start, 2 * d + 16), tol=tol)


def transition_probability_poisson(t: float, x: int, y: int, *,
                                   eps: float = 1e-18) -> float:
    """p(t, y|x) by Poissonization of the discrete-time simple walk.

    sum_j e^{-t} t^j / j! * P(S_j = y - x) with S_j the j-step +-1 walk,
    P(S_j = d) = C(j, (j+d)/2) / 2^j for j >= |d|, j = d (mod 2).
    Binomial masses come from exact integer combinatorics; the outer sum
    is compensated.  Third independent route for the transition kernel.
    """
    _check_order_time(0, t)
    d = abs(int(y) - int(x))
    weight = math.exp(-t)  # e^{-t} t^j / j! at j = 0
    terms = []
    j = 0
    while True:
        if j >= d and (j - d) % 2 == 0 and weight > 0.0:
            terms.append(weight * (math.comb(j, (j + d) // 2) / 2.0 ** j))
        if j > t and (weight < eps or weight == 0.0):
            break
        j += 1
        weight *= t / j
        if j > 100_000:
            raise ConvergenceError("transition_probability_poisson",
                                   f"Poisson tail did not close for t={t}")
    return math.fsum(terms)


def characteristic_function(t: float, z: complex) -> complex:
    """E[e^{izV(t)}] = exp(t (cos z - 1)) for the continuous-time walk."""
    _check_order_time(0, t)
    zc = complex(z)
    if not (math.isfinite(zc.real) and math.isfinite(zc.imag)):
        raise ValueError(f"argument must be finite, got {z}")
    return complex(np.exp(t * (np.cos(zc) - 1.0)))
