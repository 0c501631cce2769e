"""How entrywise powers of the kernel max(1 + xy, 0) lose total positivity.

For order p the power alpha stays TP above p - 2, collapses to rank alpha + 1
at integers below that, and has a negative minor at every other exponent.
"""
from fractions import Fraction

from totpos.kernels import Power, jks, sample_matrix
from totpos.numerics import det
from totpos.probes import jain_matrix_probe, omega_shift_witness, tn3_power_probe

xs = (Fraction(1, 10), Fraction(2, 10), Fraction(3, 10), Fraction(4, 10))
p = len(xs)
print(f"order {p} on x = y = {[str(v) for v in xs]}")
for alpha in (0, 0.5, 1, 1.5, 2, 2.5, 3.3):
    rep = jain_matrix_probe(xs, xs, alpha)
    print(f"  alpha={alpha:<4} predicted={rep.predicted.kind.value:<8} "
          f"observed={rep.classification.status.value:<14} rank={rep.rank} agrees={rep.agrees}")

# the unpowered kernel itself is not TP on a mixed-sign grid
a = (-2, -1, 1, 2)
m = sample_matrix(jks(), [], a, [Fraction(v, 2) for v in a])
print("\n4x4 kernel matrix, exact determinant:", det(m))
print("3x3 zeroth power on (-1, 0, 1), exact determinant:",
      det(sample_matrix(jks(), [Power(0)], (-1, 0, 1), (-1, 0, 1))))

# a single shift of the exponential kernel exposes every non-integer alpha below p - 2
rep = omega_shift_witness(range(1, 9), range(1, 9), 5, (0.5, 1.5, 2.5))
for alpha, w in sorted(rep.witnesses.items()):
    print(f"shift a={float(rep.constant):g}: alpha={alpha} minor={float(w.value):.6e}")

# powers below 1 do not preserve TN_3 on the cosine kernel
for alpha in (0.5, 1, 2):
    r = tn3_power_probe(alpha)
    print(f"TN_3 power {alpha}: preserves={r.preserves} det={r.determinant}")
