"""Loewner-order power tests on the encoder pair ``A = 1 + x x^T``, ``B = 1``.

For pairwise distinct ``x`` the entrywise power ``t -> t^alpha`` is

* positivity preserving on ``A`` iff ``alpha`` is a non-negative integer or ``>= n - 2``,
* monotone on ``A >= B`` iff ``alpha`` is a non-negative integer or ``>= n - 1``,
* convex on ``A >= B`` iff ``alpha`` is a non-negative integer or ``>= n``.

The tests below check each statement numerically and return a witness when the
matrix under test has a negative eigenvalue. The module also covers Hankel
kernels composed with polynomials whose coefficients are given explicitly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Real
from typing import Sequence

import mpmath
import numpy as np

from .errors import DomainError, NumericError, StructuralError
from .kernels import KernelSpec, evaluate, hankel_rank_two, to_json
from .numerics import (
    DEFAULT_PROFILE,
    EXTENDED_PREC,
    EXTENDED_PROFILE,
    ToleranceProfile,
    to_mpf,
)
from .tptest import hankel_tn


class LoewnerProperty(str, enum.Enum):
    POSITIVITY = "Positivity"
    MONOTONICITY = "Monotonicity"
    CONVEXITY = "Convexity"


PRESERVED = "preserved"
VIOLATED = "violated"

# Offset from n to the critical exponent of each property.
_THRESHOLD_SHIFT = {
    LoewnerProperty.POSITIVITY: 2,
    LoewnerProperty.MONOTONICITY: 1,
    LoewnerProperty.CONVEXITY: 0,
}

DEFAULT_LAMBDA_GRID = tuple(k / 16 for k in range(17))


@dataclass(frozen=True)
class PSDResult:
    is_psd: bool
    min_eigenvalue: float
    scale: float
    tolerance_limited: bool = False

    def to_dict(self) -> dict:
        return {
            "verdict": "PSD" if self.is_psd else "NotPSD",
            "min_eigenvalue": self.min_eigenvalue,
            "scale": self.scale,
            "tolerance_limited": self.tolerance_limited,
        }


def _is_mp(arr: np.ndarray) -> bool:
    return arr.dtype == object and any(isinstance(v, mpmath.mpf) for v in arr.ravel())


def psd_check(matrix, profile: ToleranceProfile = DEFAULT_PROFILE) -> PSDResult:
    """Smallest-eigenvalue test for a real symmetric matrix.

    PSD iff ``lambda_min >= -zero_band * ||A||_2``. Float input is solved with
    LAPACK, mpf input with ``mpmath.eigsy`` under the extended profile.
    ``tolerance_limited`` flags a float verdict that only held thanks to the band.
    """
    arr = np.asarray(matrix, dtype=object if isinstance(matrix, np.ndarray) and matrix.dtype == object else None)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise StructuralError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if _is_mp(arr):
        with mpmath.workprec(EXTENDED_PREC):
            m = mpmath.matrix([[to_mpf(v) for v in row] for row in arr])
            asym = max((abs(m[i, j] - m[j, i]) for i in range(m.rows) for j in range(m.cols)), default=0)
            big = max(abs(v) for v in m)
            if asym > EXTENDED_PROFILE.rel_eps * max(big, 1):
                raise StructuralError("matrix is not symmetric")
            ev = mpmath.eigsy(m, eigvals_only=True)
            ev = [ev[i] for i in range(len(ev))]
            lo, scale = min(ev), max(abs(v) for v in ev)
            ok = lo >= -EXTENDED_PROFILE.zero_band * scale
        return PSDResult(bool(ok), float(lo), float(scale))
    a = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix contains NaN or infinite entries")
    big = float(np.abs(a).max())
    if np.abs(a - a.T).max() > profile.rel_eps * max(big, 1.0):
        raise StructuralError("matrix is not symmetric")
    ev = np.linalg.eigvalsh((a + a.T) / 2)
    lo, scale = float(ev[0]), float(np.abs(ev).max())
    band = profile.zero_band * scale
    return PSDResult(lo >= -band, lo, scale, tolerance_limited=abs(lo) <= band and lo != 0)


# -- the encoder pair ------------------------------------------------------------------

@dataclass(frozen=True)
class LoewnerWitness:
    upper: np.ndarray
    lower: np.ndarray
    lam: float | None
    min_eigenvalue: float

    def to_dict(self) -> dict:
        return {
            "upper": np.asarray(self.upper, dtype=float).tolist(),
            "lower": np.asarray(self.lower, dtype=float).tolist(),
            "lambda": self.lam,
            "min_eigenvalue": self.min_eigenvalue,
        }


@dataclass(frozen=True)
class LoewnerReport:
    property: LoewnerProperty
    n: int
    alpha: float
    verdict: str
    min_eigenvalue: float
    witness: LoewnerWitness | None = None
    mode: str = "float"
    xs: tuple = ()

    def __post_init__(self):
        if self.verdict not in (PRESERVED, VIOLATED):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if (self.verdict == VIOLATED) != (self.witness is not None):
            raise ValueError("violated verdicts carry a witness and only they do")

    @property
    def predicted(self) -> str:
        return PRESERVED if power_preserves(self.property, self.n, self.alpha) else VIOLATED

    @property
    def agrees(self) -> bool:
        return self.verdict == self.predicted

    def to_dict(self) -> dict:
        return {
            "property": self.property.value,
            "n": self.n,
            "alpha": self.alpha,
            "xs": [float(v) for v in self.xs],
            "verdict": self.verdict,
            "predicted": self.predicted,
            "min_eigenvalue": self.min_eigenvalue,
            "mode": self.mode,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def power_preserves(prop: LoewnerProperty, n: int, alpha) -> bool:
    """Predicted verdict: non-negative integers always, otherwise ``alpha >= n - shift``."""
    prop = LoewnerProperty(prop)
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    return float(alpha).is_integer() or alpha >= n - _THRESHOLD_SHIFT[prop]


def _check_xs(xs, nonzero: bool) -> tuple:
    xs = tuple(xs)
    if len(xs) < 1:
        raise DomainError("need at least one point")
    if len(set(xs)) != len(xs):
        raise DomainError("points must be pairwise distinct")
    if any(1 + a * b <= 0 for a in xs for b in xs):
        raise DomainError("need 1 + x_j x_k > 0 for all j, k")
    if nonzero and any(v == 0 for v in xs):
        raise DomainError("points must be nonzero")
    return xs


def _encoder(xs, mode):
    if mode == "extended":
        x = [to_mpf(v) for v in xs]
        return np.array([[1 + a * b for b in x] for a in x], dtype=object)
    x = np.asarray(xs, dtype=float)
    return 1.0 + np.outer(x, x)


def _pow(m, alpha, mode):
    if mode == "extended":
        a = to_mpf(alpha)
        return np.vectorize(lambda v: mpmath.power(v, a), otypes=[object])(m)
    return np.power(m, float(alpha))


def _pairs(prop, xs, alpha, lambdas, mode):
    """Yield ``(lam, upper, lower)`` triples whose difference must be PSD."""
    a = _encoder(xs, mode)
    ones = np.ones_like(a)
    if prop is LoewnerProperty.POSITIVITY:
        yield None, _pow(a, alpha, mode), 0 * ones
    elif prop is LoewnerProperty.MONOTONICITY:
        yield None, _pow(a, alpha, mode), ones
    else:
        fa = _pow(a, alpha, mode)
        for lam in lambdas:
            lm = to_mpf(lam) if mode == "extended" else float(lam)
            yield float(lam), lm * fa + (1 - lm) * ones, _pow(lm * a + (1 - lm) * ones, alpha, mode)


def _run(prop, xs, alpha, lambdas, profile, mode):
    worst = None
    limited = False
    with mpmath.workprec(EXTENDED_PREC):
        for lam, upper, lower in _pairs(prop, xs, alpha, lambdas, mode):
            res = psd_check(upper - lower, profile)
            limited |= res.tolerance_limited
            if worst is None or res.min_eigenvalue < worst[0].min_eigenvalue:
                worst = (res, lam, upper, lower)
            if not res.is_psd:
                return worst, limited
    return worst, limited


def _loewner_test(prop, xs, alpha, lambdas, profile) -> LoewnerReport:
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    (res, lam, upper, lower), limited = _run(prop, xs, alpha, lambdas, profile, "float")
    mode = "float"
    if limited:
        (res, lam, upper, lower), _ = _run(prop, xs, alpha, lambdas, profile, "extended")
        mode = "extended"
    witness = None
    if not res.is_psd:
        witness = LoewnerWitness(np.asarray(upper, dtype=float), np.asarray(lower, dtype=float),
                                 lam, res.min_eigenvalue)
    return LoewnerReport(prop, len(xs), float(alpha), PRESERVED if res.is_psd else VIOLATED,
                         res.min_eigenvalue, witness, mode, tuple(xs))


def jain_positivity_test(xs, alpha, profile: ToleranceProfile = DEFAULT_PROFILE) -> LoewnerReport:
    """Is ``(1 + x_j x_k)^alpha`` positive semidefinite?"""
    xs = _check_xs(xs, nonzero=False)
    return _loewner_test(LoewnerProperty.POSITIVITY, xs, alpha, (), profile)


def jain_monotonicity_test(xs, alpha, profile: ToleranceProfile = DEFAULT_PROFILE) -> LoewnerReport:
    """Is ``(1 + x_j x_k)^alpha >= 1`` in the Loewner order?"""
    xs = _check_xs(xs, nonzero=True)
    return _loewner_test(LoewnerProperty.MONOTONICITY, xs, alpha, (), profile)


def jain_convexity_test(xs, alpha, lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
                        profile: ToleranceProfile = DEFAULT_PROFILE) -> LoewnerReport:
    """Is ``lam f[A] + (1 - lam) f[B] >= f[lam A + (1 - lam) B]`` on the grid?"""
    xs = _check_xs(xs, nonzero=True)
    lambdas = tuple(lambda_grid)
    if not lambdas or any(not (0 <= v <= 1) for v in lambdas):
        raise DomainError("lambda grid must be a non-empty subset of [0, 1]")
    return _loewner_test(LoewnerProperty.CONVEXITY, xs, alpha, lambdas, profile)


# -- the perturbative counterexample ---------------------------------------------------

@dataclass(frozen=True)
class HornResult:
    v: tuple
    epsilon: float
    value: float
    halvings: int

    def to_dict(self) -> dict:
        return {"v": list(self.v), "epsilon": self.epsilon, "value": self.value, "halvings": self.halvings}


def horn_vector(n: int, order: int) -> tuple:
    """Finite-difference stencil of the given order padded to length ``n``.

    Against ``t = (1, ..., n)`` it annihilates ``t^j`` for ``j < order`` and
    pairs with ``t^order`` to ``(-1)^order * order!``.
    """
    if not (0 <= order < n):
        raise DomainError(f"need 0 <= order < n, got order={order}, n={n}")
    return tuple((-1) ** (order - i) * math.comb(order, i) for i in range(order + 1)) + (0,) * (n - order - 1)


def horn_counterexample(n: int, alpha, epsilon: float = 1.0, max_halvings: int = 60) -> HornResult:
    """Quadratic form ``v^T (1 + x x^T)^alpha v`` at ``x = epsilon (1..n)``.

    ``v`` is orthogonal to ``1, x, ..., x^(floor(alpha) + 1)`` so the form is
    ``C(alpha, floor(alpha) + 2) (v^T t^(floor(alpha)+2))^2 epsilon^(2 floor(alpha) + 4)``
    to leading order, which is negative. ``epsilon`` is halved until the
    computed value is negative.
    """
    if n < 3:
        raise DomainError("n must be at least 3")
    if float(alpha).is_integer() or not (0 < alpha < n - 2):
        raise DomainError(f"alpha={alpha} must be a non-integer in (0, {n - 2})")
    order = math.floor(alpha) + 2
    if order > n - 1:
        raise DomainError("no vector with the required orthogonality exists")
    v = horn_vector(n, order)
    eps = mpmath.mpf(epsilon)
    for halvings in range(max_halvings + 1):
        # The O(1) terms cancel down to eps^(2 order); carry enough bits to see it.
        bits = 64 + int(2 * order * max(0.0, -math.log2(float(eps)))) + 32
        with mpmath.workprec(bits):
            a = to_mpf(alpha)
            q = mpmath.fsum(
                v[j] * v[k] * mpmath.power(1 + eps * eps * (j + 1) * (k + 1), a)
                for j in range(n) for k in range(n) if v[j] and v[k]
            )
        if q < 0:
            return HornResult(v, float(eps), float(q), halvings)
        eps /= 2
    raise NumericError(f"form stayed non-negative after {max_halvings} halvings (last value {float(q)!r})")


# -- Hankel kernels composed with polynomials ------------------------------------------

@dataclass(frozen=True)
class HankelPreserverReport:
    coefficients: tuple
    p: int
    kernel: KernelSpec
    preserved: bool
    tested: int
    witness: dict | None = None
    search_index: int | None = None
    critical_coefficient: float | None = None

    def to_dict(self) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients],
            "p": self.p,
            "kernel": to_json(self.kernel),
            "verdict": "preserved" if self.preserved else "violated",
            "tested": self.tested,
            "witness": self.witness,
            "search_index": self.search_index,
            "critical_coefficient": self.critical_coefficient,
        }


def default_progressions(p: int) -> tuple:
    """Arithmetic progressions ``(start, step, length)`` used to sample a Hankel kernel."""
    return tuple((float(s), float(h), p + 2)
                 for s in np.linspace(-2.0, 1.0, 7) for h in (0.125, 0.25, 0.5, 1.0))


def _coefficients(f) -> tuple:
    if isinstance(f, np.polynomial.Polynomial):
        f = f.coef
    if callable(f) or isinstance(f, (str, bytes)) or not hasattr(f, "__iter__"):
        raise DomainError("f must be given by its coefficient list (ascending degree)")
    coef = tuple(f)
    if not coef or not all(isinstance(c, Real) and math.isfinite(c) for c in coef):
        raise DomainError("coefficients must be finite reals")
    return coef


def _tunbdd_shape(coef, p, index) -> bool:
    # p positive coefficients on each side of index, nothing else nonzero.
    support = [i for i, c in enumerate(coef) if c != 0 and i != index]
    below = [i for i in support if i < index]
    above = [i for i in support if i > index]
    return len(below) == p and len(above) == p and all(coef[i] > 0 for i in support)


def _samples(spec, transforms, progressions):
    for start, step, length in progressions:
        pts = [start + k * step for k in range(length)]
        yield (start, step, length), np.array([[float(evaluate(spec, transforms, a, b)) for b in pts] for a in pts])


def _first_failure(coef, p, sampled, profile):
    poly = np.polynomial.Polynomial(coef)
    for key, h in sampled:
        cls = hankel_tn(poly(h), p, profile)
        if not cls.is_tn:
            return {"progression": list(key), "classification": cls.to_dict()}
    return None


def hankel_preserver_test(f, p: int, H: KernelSpec | None = None, grid: Sequence | None = None,
                          transforms: Sequence = (), search_index: int | None = None,
                          profile: ToleranceProfile = DEFAULT_PROFILE, search_floor: float = -1e6,
                          iterations: int = 60) -> HankelPreserverReport:
    """Apply the polynomial with coefficients ``f`` to sampled Hankel matrices
    and check TN_p via contiguous minors.

    When ``search_index`` is set (or the coefficients have exactly one negative
    entry with ``p`` positive coefficients on either side) the coefficient at
    that index is bisected for the most negative value keeping every sample TN_p.
    """
    coef = _coefficients(f)
    if p < 1:
        raise DomainError("p must be at least 1")
    H = hankel_rank_two() if H is None else H
    if H.structure != "hankel":
        raise DomainError("H must be a Hankel kernel")
    grid = default_progressions(p) if grid is None else tuple(grid)
    sampled = list(_samples(H, transforms, grid))
    if search_index is None:
        neg = [i for i, c in enumerate(coef) if c < 0]
        if len(neg) == 1 and _tunbdd_shape(coef, p, neg[0]):
            search_index = neg[0]
    witness = _first_failure(coef, p, sampled, profile)
    critical = None
    if search_index is not None:
        if not (0 <= search_index < len(coef)) or not _tunbdd_shape(coef, p, search_index):
            raise DomainError("search index needs p positive coefficients on each side")
        critical = _bisect_coefficient(coef, search_index, p, sampled, profile, search_floor, iterations)
    return HankelPreserverReport(coef, p, H, witness is None, len(sampled), witness, search_index, critical)


def _bisect_coefficient(coef, index, p, sampled, profile, floor, iterations) -> float:
    def ok(c):
        trial = list(coef)
        trial[index] = c
        return _first_failure(trial, p, sampled, profile) is None

    if not ok(0.0):
        raise DomainError("the polynomial with a zero searched coefficient already fails")
    lo, hi = -1.0, 0.0
    while ok(lo):
        hi, lo = lo, 2 * lo
        if lo < floor:
            raise NumericError(f"no failure found above {floor}")
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, abs(hi)):
            break
    return hi
