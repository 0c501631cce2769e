"""Zeros of two-sided Laplace transforms and what they say about PF kernels."""
import math

from totpos.kernels import cosine_w
from totpos.laplace import (
    mkernel_power_analysis,
    riemann_polynomial,
    root_sector_check,
    strip_zero_check,
    transform_function,
)

for alpha in (0.5, 1, 2, 3.5):
    h = alpha + 2
    r = strip_zero_check(transform_function(cosine_w(), alpha), h - 1e-6, box=(-5, 5, -h - 1, h + 1))
    print(f"cos^{alpha}: zeros {[f'{z.imag:+.10f}i' for z in r.zeros]}  zero-free below |Im|={h}: {r.zero_free}")

# Riemann sums of the cosine kernel give polynomials whose roots avoid a sector
for m in (5, 10, 20, 40, 80):
    theta = 3 * math.pi / (m + 2)
    s = root_sector_check(riemann_polynomial(cosine_w(), math.pi, m), theta)
    print(f"m={m:<3} min |arg root|={s.min_abs_arg:.4f} >= {theta:.4f}: {s.zero_free}")

# the two-sided kernel M is PF, but its square and cube are not
for n in (1, 2, 3):
    r = mkernel_power_analysis(n)
    print(f"M^{n}: PF={r.pf} numerator coefficients={[str(c) for c in r.p_n]}")
