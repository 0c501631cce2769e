"""Deforming point tuples along a path and counting zeros of power sums."""
import numpy as np

from totpos.homotopy import descartes_zero_count, homotopy_delta, homotopy_violations
from totpos.suite import random_descartes_instance

for xs, ys in (((-8.5, 0.1), (1, 2)), ((-199, 0), (1, 2))):
    v = homotopy_violations(xs, ys, 1.0)
    print(f"x={xs} y={ys}: violations at eps=1 on t in {v.intervals}")
    print(f"  safe step delta = {homotopy_delta(xs, ys):.6g}")

# sign changes of c (ordered by x) bound the zeros of sum c_j (1 + u x_j)^r
rng = np.random.default_rng(42)
for _ in range(5):
    inst = random_descartes_instance(rng, 6)
    res = descartes_zero_count(inst)
    print(f"n={res.n} r={inst.r:.3g} sign changes={res.sign_changes} zeros found={res.zero_count}")
