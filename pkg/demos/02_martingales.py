"""Martingales of the walk: exponential weights, polynomials, site bases.

The exponential martingale exp(a*x - t(cosh a - 1)) generates monic
polynomials m_n with m_n(0, x) = x^n whose expectations are frozen in
time.  The signed Bessel transform realizes them as images of monomials
and, applied to Lagrange basis polynomials of an initial configuration,
produces the site martingales whose determinant weights the noncolliding
conditioning.
"""

import math

from ncrw import (FiniteConfiguration, backward_transform,
                  backward_transform_exp, martingale_polynomial,
                  site_martingale, scaled_bessel_i_all, truncation_radius)

print("martingale polynomials m_n(t, x):")
for n in range(5):
    row = "  ".join(f"{martingale_polynomial(n, 1.0, float(x)):8.3f}"
                    for x in range(-2, 3))
    print(f"  n={n}: {row}")

print("\nthe walk semigroup undoes them: sum_y p(t,y|u) m_n(t,y) = u^n")
t, u = 1.5, 2
radius = truncation_radius(t, 1e-24) + 6
weights = scaled_bessel_i_all(radius, t)
for n in range(6):
    total = math.fsum(weights[abs(y - u)] * martingale_polynomial(n, t, float(y))
                      for y in range(u - radius, u + radius + 1))
    print(f"  n={n}: recovered {total:.12f}   exact {float(u) ** n:.1f}")

print("\nsigned Bessel transform of monomials reproduces m_n:")
for n in range(4):
    bt = backward_transform(lambda w, n=n: float(w) ** n, n, 1.5, 2)
    print(f"  n={n}: transform {bt:.12f}   m_n(1.5, 2) "
          f"{martingale_polynomial(n, 1.5, 2.0):.12f}")

print("\nexponential case has a closed form 1/E[e^{aV(t)}]:")
for alpha in (0.25, 1.0):
    got = backward_transform_exp(alpha, 2.0, 0)
    want = math.exp(-2.0 * (math.cosh(alpha) - 1.0))
    print(f"  alpha={alpha:5.2f}: {got:.14f}  vs  {want:.14f}")

print("\nsite martingales of the configuration {0, 2}: "
      "mean row stays the Kronecker delta")
config = FiniteConfiguration((0, 2))
t = 1.0
radius = truncation_radius(t, 1e-22) + 6
weights = scaled_bessel_i_all(radius, t)
for j, uj in enumerate(config.sites):
    means = []
    for k in range(len(config)):
        m = math.fsum(weights[abs(y - uj)] * site_martingale(config, k, t, y)
                      for y in range(uj - radius, uj + radius + 1))
        means.append(m)
    print(f"  start site u_{j}={uj}: E[M_k] = "
          + ", ".join(f"{m:+.10f}" for m in means))
