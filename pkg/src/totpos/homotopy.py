"""Zero counting for sums of shifted powers, and homotopies of admissible tuples.

``phi(u) = sum_j c_j (1 + u x_j)^r`` has at most ``s`` zeros on its natural
domain ``(A_x, B_x)``, where ``s`` counts sign changes of ``c``. That bound
drives the nonsingularity of ``(1 + x_j y_k)^alpha`` and hence the
homotopies below, which move tuples while keeping every ``1 + x_j y_k > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, StructuralError
from .kernels import IncreasingTuple


@dataclass(frozen=True)
class DescartesInstance:
    x: tuple
    c: tuple
    r: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if len(self.x) != len(self.c) or not self.x:
            raise StructuralError("x and c must be non-empty and of equal length")
        if len(set(self.x)) != len(self.x):
            raise DomainError("x entries must be pairwise distinct")
        if not any(self.c):
            raise DomainError("c must not be identically zero")

    @property
    def sign_changes(self) -> int:
        """Sign changes of ``c`` read in increasing order of ``x``."""
        return coefficient_sign_changes([c for _, c in sorted(zip(self.x, self.c))])

    @property
    def lower(self) -> float:
        m = max(self.x)
        return -1.0 / m if m > 0 else -math.inf

    @property
    def upper(self) -> float:
        m = min(self.x)
        return -1.0 / m if m < 0 else math.inf

    def phi(self, u):
        u = np.asarray(u, dtype=float)
        x = np.asarray(self.x)[:, None]
        c = np.asarray(self.c)[:, None]
        return np.sum(c * (1.0 + u[None, :] * x) ** self.r, axis=0)


@dataclass(frozen=True)
class DescartesResult:
    zero_count: int
    sign_changes: int
    roots: tuple
    n: int

    @property
    def bound_holds(self) -> bool:
        return self.zero_count <= self.sign_changes <= self.n - 1

    def to_dict(self) -> dict:
        return {
            "zero_count": self.zero_count,
            "sign_changes": self.sign_changes,
            "roots": list(self.roots),
            "n": self.n,
            "bound_holds": self.bound_holds,
        }


def coefficient_sign_changes(c: Sequence[float]) -> int:
    signs = [1 if v > 0 else -1 for v in c if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _domain_map(lo: float, hi: float, scale: float):
    """A map from (0, 1) onto (lo, hi) that also handles infinite ends."""
    if math.isfinite(lo) and math.isfinite(hi):
        return lambda t: lo + (hi - lo) * t
    if math.isfinite(hi):
        return lambda t: hi - scale * (1 - t) / t
    if math.isfinite(lo):
        return lambda t: lo + scale * t / (1 - t)
    return lambda t: scale * (2 * t - 1) / (t * (1 - t))


def descartes_zero_count(inst: DescartesInstance, grid_resolution: int = 1024,
                         refinements: int = 3, tol: float = 1e-12) -> DescartesResult:
    """Lower bound on the number of zeros of ``phi`` on ``(A_x, B_x)``.

    Sign changes are counted on a dyadically refined grid (the finest level
    wins, counts can only grow under refinement) and each one is bisected to
    ``tol``. Runs of exact zeros count once. Multiplicities are not resolved.
    """
    if inst.r == 0:
        if sum(inst.c) == 0:
            raise DomainError("phi is identically zero")
        return DescartesResult(0, inst.sign_changes, (), len(inst.x))
    lo, hi = inst.lower, inst.upper
    scale = 1.0 / max(abs(v) for v in inst.x) if any(inst.x) else 1.0
    to_u = _domain_map(lo, hi, scale)
    n_pts = grid_resolution * 2 ** refinements
    t = np.arange(1, n_pts) / n_pts
    u = to_u(t)
    v = inst.phi(u)
    size = np.sum(np.abs(np.asarray(inst.c)[:, None]) * (1.0 + u[None, :] * np.asarray(inst.x)[:, None]) ** inst.r, axis=0)
    if np.all(np.abs(v) <= 1e-13 * size):
        raise DomainError("phi vanishes on the whole grid; it is likely identically zero")

    roots = []
    last_sign, last_idx, in_zero_run = 0, None, False
    for i, val in enumerate(v):
        if val == 0:
            if not in_zero_run:
                roots.append(float(u[i]))
                in_zero_run = True
            continue
        sgn = 1 if val > 0 else -1
        if last_sign and sgn != last_sign and not in_zero_run:
            roots.append(_bisect(inst, to_u, t[last_idx], t[i], last_sign, tol))
        in_zero_run = False
        last_sign, last_idx = sgn, i
    return DescartesResult(len(roots), inst.sign_changes, tuple(roots), len(inst.x))


def _bisect(inst, to_u, a, b, sign_a, tol):
    for _ in range(200):
        ua, ub = to_u(a), to_u(b)
        if abs(ub - ua) <= tol * max(1.0, abs(ua)):
            break
        m = 0.5 * (a + b)
        fm = inst.phi([to_u(m)])[0]
        if fm == 0:
            return float(to_u(m))
        if (fm > 0) == (sign_a > 0):
            a = m
        else:
            b = m
    return float(to_u(0.5 * (a + b)))


# -- homotopies ---------------------------------------------------------------------

def _validate_homotopy(xs, ys):
    xs = IncreasingTuple(float(v) for v in xs)
    ys = IncreasingTuple(float(v) for v in ys)
    if len(xs) != len(ys):
        raise StructuralError("x and y must have the same length")
    if ys[0] <= 0:
        raise DomainError("y coordinates must be positive")
    if 1 + xs[0] * xs[-1] <= 0:
        raise DomainError("need 1 + x_j x_k > 0 for all j, k")
    return xs, ys


def _g(eps, xs, ys):
    x1, xn, y1, yn = xs[0], xs[-1], ys[0], ys[-1]
    num = eps * eps * (xn * y1 - x1 * yn) ** 2
    return 1.0 - num / (4.0 * (eps * y1 - x1) * (eps * yn - xn))


DELTA_CAP = 2.0 ** 20


def homotopy_delta(xs, ys) -> float:
    """A scale ``delta`` such that for every ``0 < eps <= delta`` the straight
    path from ``x`` to ``eps * y`` keeps all ``1 + x_j(t) x_k(t) > 0``.

    If ``x_1 >= 0`` this is 1. If ``x_1 < 0 <= x_n`` it is ``1/(|x_1| y_n)``.
    If all ``x`` are negative it is the largest ``delta`` (capped at
    ``DELTA_CAP``) with ``g > 0`` on ``[0, delta]`` where
    ``g(eps) = 1 - eps^2 (x_n y_1 - x_1 y_n)^2 / (4 (eps y_1 - x_1)(eps y_n - x_n))``;
    ``g`` is decreasing in ``eps``, so bisection finds the crossing.

    ``g`` only approximates the smallest value of ``1 + x_1(t) x_n(t)`` and
    ignores the other pairs, so in that case the estimate is checked against
    the exact pairwise quadratics and, if needed, lowered by a second
    bisection on the exact criterion. The result carries a ``1e-9`` relative
    safety margin.
    """
    xs, ys = _validate_homotopy(xs, ys)
    x1, xn = xs[0], xs[-1]
    if x1 >= 0:
        return 1.0
    if xn >= 0:
        return 1.0 / (abs(x1) * ys[-1])
    est = _bisect_positive(lambda e: _g(e, xs, ys) > 0, DELTA_CAP)
    if not _path_admissible(xs, ys, est):
        est = _bisect_positive(lambda e: _path_admissible(xs, ys, e), est)
    return est * (1 - 1e-9)


def _bisect_positive(ok, hi: float) -> float:
    """Largest point of ``(0, hi]`` where the monotone predicate ``ok`` holds."""
    if ok(hi):
        return hi
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return lo


def _path_admissible(xs, ys, eps: float) -> bool:
    x = np.asarray(xs)
    d = eps * np.asarray(ys) - x
    return not any(
        _nonpositive_intervals(d[j] * d[k], x[j] * d[k] + x[k] * d[j], 1 + x[j] * x[k])
        for j in range(len(x)) for k in range(j + 1, len(x))
    )


@dataclass(frozen=True)
class HomotopyViolations:
    points: tuple = ()
    intervals: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.points and not any(self.intervals.values())

    def to_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "intervals": {f"{j},{k}": [list(iv) for iv in ivs] for (j, k), ivs in self.intervals.items()},
        }


def _quadratic_roots(a, b, c):
    """Real roots of a t^2 + b t + c, ascending, computed without cancellation."""
    if a == 0:
        return [] if b == 0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0:
        return [0.0]
    return sorted([q / a, c / q])


def _nonpositive_intervals(a, b, c):
    """Sub-intervals of [0, 1] where a t^2 + b t + c <= 0."""
    roots = _quadratic_roots(a, b, c)
    f = lambda t: (a * t + b) * t + c
    cuts = [0.0] + [r for r in roots if 0 < r < 1] + [1.0]
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        if f(0.5 * (lo + hi)) <= 0:
            out.append((float(lo), float(hi)))
    for r in roots:  # isolated touching points
        if 0 <= r <= 1 and not any(lo <= r <= hi for lo, hi in out):
            out.append((float(r), float(r)))
    return sorted(out)


def homotopy_violations(xs, ys, epsilon: float, t_grid=None) -> HomotopyViolations:
    """Where the path ``x_j(t) = x_j + t (eps y_j - x_j)`` breaks ``1 + x_j x_k > 0``.

    Every pair gives a quadratic in ``t``; its nonpositive sub-intervals of
    ``[0, 1]`` are returned exactly. Grid points ``(j, k, t)`` with a
    violation are listed as well.
    """
    xs, ys = _validate_homotopy(xs, ys)
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    x = np.asarray(xs)
    d = epsilon * np.asarray(ys) - x
    n = len(x)
    intervals = {}
    for j in range(n):
        for k in range(j + 1, n):
            a = d[j] * d[k]
            b = x[j] * d[k] + x[k] * d[j]
            c = 1 + x[j] * x[k]
            ivs = _nonpositive_intervals(a, b, c)
            if ivs:
                intervals[(j, k)] = ivs
    t = np.linspace(0.0, 1.0, 10001) if t_grid is None else np.asarray(t_grid, dtype=float)
    path = x[None, :] + t[:, None] * d[None, :]
    points = []
    for j in range(n):
        for k in range(j + 1, n):
            bad = np.nonzero(1 + path[:, j] * path[:, k] <= 0)[0]
            points.extend((j, k, float(t[i])) for i in bad)
    return HomotopyViolations(tuple(points), intervals)


@dataclass(frozen=True)
class PiecewiseHomotopy:
    """Three linear segments on [0, 1/3], [1/3, 2/3], [2/3, 1].

    1. ``x`` moves to ``delta1 * p`` while ``y`` stays;
    2. ``y`` moves to ``delta2 * q`` while ``x`` stays;
    3. both move to ``p`` and ``q``.
    """

    xs: tuple
    ys: tuple
    ps: tuple
    qs: tuple
    delta1: float
    delta2: float
    min_value: float
    violations: tuple
    monotone: bool
    breakpoints: tuple = (1 / 3, 2 / 3)

    @property
    def certified(self) -> bool:
        return not self.violations and self.monotone and self.min_value > 0

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        x, y = np.asarray(self.xs), np.asarray(self.ys)
        xp, yq = self.delta1 * np.asarray(self.ps), self.delta2 * np.asarray(self.qs)
        if t <= 1 / 3:
            s = 3 * t
            return x + s * (xp - x), y.copy()
        if t <= 2 / 3:
            s = 3 * t - 1
            return xp.copy(), y + s * (yq - y)
        s = 3 * t - 2
        return xp + s * (np.asarray(self.ps) - xp), yq + s * (np.asarray(self.qs) - yq)

    def to_dict(self) -> dict:
        return {
            "delta1": self.delta1,
            "delta2": self.delta2,
            "breakpoints": list(self.breakpoints),
            "min_value": self.min_value,
            "monotone": self.monotone,
            "certified": self.certified,
            "violations": [list(v) for v in self.violations],
        }


def piecewise_homotopy(xs, ys, ps, qs, points_per_segment: int = 1000) -> PiecewiseHomotopy:
    """Path from ``(x, y)`` to ``(p, q)`` keeping ``1 + x_j(t) y_k(t) > 0``.

    ``delta1 = 1 / (2 |y_1| p_n)`` (or 1 if ``y_1 = 0``); ``delta2`` mirrors it
    with the roles of the tuples swapped. Positivity and monotonicity are
    verified on a grid of ``points_per_segment`` points per segment.
    """
    xs, ys = IncreasingTuple(map(float, xs)), IncreasingTuple(map(float, ys))
    ps, qs = IncreasingTuple(map(float, ps)), IncreasingTuple(map(float, qs))
    if len(xs) != len(ps) or len(ys) != len(qs):
        raise StructuralError("x/p and y/q must have matching lengths")
    if ps[0] <= 0 or qs[0] <= 0:
        raise DomainError("p_1 and q_1 must be positive")
    x, y = np.asarray(xs), np.asarray(ys)
    if np.any(1 + np.outer(x, y) <= 0):
        raise DomainError("need 1 + x_j y_k > 0 for all j, k")
    delta1 = 1.0 / (2 * abs(ys[0]) * ps[-1]) if ys[0] != 0 else 1.0
    x_mid1 = delta1 * ps[0]
    delta2 = 1.0 / (2 * abs(x_mid1) * qs[-1])
    path = PiecewiseHomotopy(xs, ys, ps, qs, delta1, delta2, math.nan, (), True)
    ts = np.unique(np.concatenate([
        np.linspace(a, b, points_per_segment) for a, b in ((0, 1 / 3), (1 / 3, 2 / 3), (2 / 3, 1))
    ]))
    min_value = math.inf
    violations = []
    monotone = True
    for t in ts:
        xt, yt = path.at(float(t))
        vals = 1 + np.outer(xt, yt)
        m = float(vals.min())
        min_value = min(min_value, m)
        if m <= 0:
            j, k = np.unravel_index(np.argmin(vals), vals.shape)
            violations.append((int(j), int(k), float(t)))
        if np.any(np.diff(xt) <= 0) or np.any(np.diff(yt) <= 0):
            monotone = False
    return PiecewiseHomotopy(xs, ys, ps, qs, delta1, delta2, min_value, tuple(violations), monotone)
