"""Total nonnegativity / positivity testers.

* ``minor_scan``: brute force over every minor of order <= p.
* ``fekete_tp``: contiguous minors only (valid for TP verdicts).
* ``hankel_tn``: contiguous principal minors of a Hankel matrix and of its
  truncation (first row and last column removed).
* ``predicted_signature`` / ``observed_signature``: sign patterns of
  ``(1 + x_j y_k)^alpha`` minors.
* ``tn2_logconcavity``: the sampled form of "TN_2 iff log-concave on an
  interval".
"""
from __future__ import annotations

import enum
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations

import mpmath
import numpy as np

from .errors import SignConflict, StructuralError
from .numerics import (
    DEFAULT_PROFILE,
    EXACT,
    EXTENDED,
    EXTENDED_PREC,
    EXTENDED_PROFILE,
    FLOAT,
    Sign3,
    ToleranceProfile,
    _bareiss,
    _gauss_pivot,
    as_matrix,
    batch_det,
    format_scalar,
    matrix_mode,
)


class TPStatus(str, enum.Enum):
    TP = "TP_p"
    TN_NOT_TP = "TN_p_not_TP_p"
    NOT_TN = "Not_TN_p"
    NOT_TP = "Not_TP_p"  # only produced by fekete_tp, which cannot certify TN


@dataclass(frozen=True)
class MinorWitness:
    rows: tuple
    cols: tuple
    value: object
    sign: Sign3

    def __post_init__(self):
        if len(self.rows) != len(self.cols) or not self.rows:
            raise StructuralError("witness rows and cols must have equal positive length")
        if any(a >= b for a, b in zip(self.rows, self.rows[1:])) or any(
            a >= b for a, b in zip(self.cols, self.cols[1:])
        ):
            raise StructuralError("witness indices must be strictly increasing")

    @property
    def order(self) -> int:
        return len(self.rows)

    def to_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "value": format_scalar(self.value),
            "sign": int(self.sign),
        }


@dataclass(frozen=True)
class TPClassification:
    status: TPStatus
    order: int
    witness: MinorWitness | None = None
    tolerance_limited: bool = False

    def __post_init__(self):
        if self.status is TPStatus.NOT_TN and (self.witness is None or self.witness.sign != Sign3.NEGATIVE):
            raise StructuralError("a Not_TN_p verdict needs a negative witness")
        if self.status is TPStatus.TN_NOT_TP and (self.witness is None or self.witness.sign != Sign3.ZERO):
            raise StructuralError("a TN_p_not_TP_p verdict needs a zero witness")

    @property
    def is_tn(self) -> bool:
        return self.status in (TPStatus.TP, TPStatus.TN_NOT_TP)

    @property
    def is_tp(self) -> bool:
        return self.status is TPStatus.TP

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "order": self.order,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "tolerance_limited": self.tolerance_limited,
        }


@dataclass(frozen=True)
class SignSignature:
    signs: tuple
    tolerance_limited: bool = field(default=False, compare=False)

    def __len__(self):
        return len(self.signs)

    def to_dict(self) -> dict:
        return {"signs": list(self.signs), "tolerance_limited": self.tolerance_limited}


# -- minor evaluation -------------------------------------------------------------

def _classify(values, mags, profile: ToleranceProfile):
    """Vectorized sign3 for float determinants. Returns (signs, banded) arrays."""
    thresh = np.maximum(profile.abs_eps, profile.zero_band * mags)
    zero = np.abs(values) <= thresh
    signs = np.where(zero, 0, np.sign(values)).astype(int)
    banded = zero & (values != 0)
    return signs, banded


def _sign_of(v, mag, mode, profile):
    if mode == EXACT:
        return (v > 0) - (v < 0), False
    if abs(v) <= max(profile.abs_eps, profile.zero_band * mag):
        return 0, v != 0
    return (1 if v > 0 else -1), False


def minors_of_order(arr: np.ndarray, index_sets, profile: ToleranceProfile = DEFAULT_PROFILE):
    """Evaluate the minors at the given ``(rows, cols)`` index pairs.

    Returns ``(values, signs, banded)`` lists aligned with ``index_sets``.
    ``banded`` marks inexact values that were rounded to zero by the profile.
    """
    mode = matrix_mode(arr)
    index_sets = list(index_sets)
    if not index_sets:
        return [], [], []
    if mode == FLOAT:
        rows = np.array([r for r, _ in index_sets])
        cols = np.array([c for _, c in index_sets])
        sub = arr[rows[:, :, None], cols[:, None, :]]
        values, mags = batch_det(sub)
        signs, banded = _classify(values, mags, profile)
        return [float(v) for v in values], [int(v) for v in signs], [bool(v) for v in banded]
    values, signs, banded = [], [], []
    for r, c in index_sets:
        block = [[arr[i, j] for j in c] for i in r]
        if mode == EXACT:
            v, m = _bareiss(block), None
        else:
            with mpmath.workprec(EXTENDED_PREC):
                v, m = _gauss_pivot(block)
        s, b = _sign_of(v, m, mode, profile)
        values.append(v)
        signs.append(s)
        banded.append(b)
    return values, signs, banded


def _profile_for(arr, profile):
    if matrix_mode(arr) == EXTENDED and profile is DEFAULT_PROFILE:
        return EXTENDED_PROFILE
    return profile


def _scan(arr, candidates_by_order, p, profile):
    """Shared reduction: first negative, else first zero, in candidate order."""
    first_zero = None
    limited = False
    for k in range(1, p + 1):
        idx = list(candidates_by_order(k))
        values, signs, banded = minors_of_order(arr, idx, profile)
        limited = limited or any(banded)
        for (r, c), v, s in zip(idx, values, signs):
            if s < 0:
                w = MinorWitness(tuple(r), tuple(c), v, Sign3.NEGATIVE)
                return TPClassification(TPStatus.NOT_TN, p, w, limited)
            if s == 0 and first_zero is None:
                first_zero = MinorWitness(tuple(r), tuple(c), v, Sign3.ZERO)
    if first_zero is not None:
        return TPClassification(TPStatus.TN_NOT_TP, p, first_zero, limited)
    return TPClassification(TPStatus.TP, p, None, limited)


def _all_minors(n_rows, n_cols):
    def gen(k):
        col_sets = list(combinations(range(n_cols), k))
        for r in combinations(range(n_rows), k):
            for c in col_sets:
                yield r, c
    return gen


def minor_scan(matrix, p: int, profile: ToleranceProfile = DEFAULT_PROFILE) -> TPClassification:
    """Classify a matrix as TP_p, TN_p but not TP_p, or not TN_p by brute force.

    The witness is the first negative minor in lexicographic order of
    ``(order, rows, cols)``, else the first zero minor.
    """
    arr = as_matrix(matrix)
    n_rows, n_cols = arr.shape
    if not 1 <= p <= min(n_rows, n_cols):
        raise StructuralError(f"order p={p} must lie in 1..{min(n_rows, n_cols)}")
    return _scan(arr, _all_minors(n_rows, n_cols), p, _profile_for(arr, profile))


def fekete_tp(matrix, p: int, profile: ToleranceProfile = DEFAULT_PROFILE) -> TPClassification:
    """TP_p test from contiguous minors only.

    Returns status ``TP`` or ``NOT_TP`` with the first contiguous minor that
    is not positive.
    """
    arr = as_matrix(matrix)
    n_rows, n_cols = arr.shape
    if not 1 <= p <= min(n_rows, n_cols):
        raise StructuralError(f"order p={p} must lie in 1..{min(n_rows, n_cols)}")
    profile = _profile_for(arr, profile)
    limited = False
    for k in range(1, p + 1):
        idx = [
            (tuple(range(i, i + k)), tuple(range(j, j + k)))
            for i in range(n_rows - k + 1)
            for j in range(n_cols - k + 1)
        ]
        values, signs, banded = minors_of_order(arr, idx, profile)
        limited = limited or any(banded)
        for (r, c), v, s in zip(idx, values, signs):
            if s <= 0:
                w = MinorWitness(r, c, v, Sign3(s))
                return TPClassification(TPStatus.NOT_TP, p, w, limited)
    return TPClassification(TPStatus.TP, p, None, limited)


def is_hankel(arr: np.ndarray, profile: ToleranceProfile = DEFAULT_PROFILE) -> bool:
    n, m = arr.shape
    if n != m:
        return False
    exact = matrix_mode(arr) == EXACT
    scale = max((abs(v) for v in arr.ravel()), default=0)
    for i in range(n - 1):
        for j in range(1, n):
            a, b = arr[i, j], arr[i + 1, j - 1]
            if exact:
                if a != b:
                    return False
            elif abs(a - b) > profile.rel_eps * scale:
                return False
    return True


def hankel_tn(matrix, p: int, profile: ToleranceProfile = DEFAULT_PROFILE) -> TPClassification:
    """TN_p / TP_p test for a square Hankel matrix.

    Only contiguous principal minors of ``A`` and of ``A[1:, :-1]`` are
    evaluated; witnesses are reported with indices into ``A``.
    """
    arr = as_matrix(matrix)
    n = arr.shape[0]
    if arr.shape[0] != arr.shape[1]:
        raise StructuralError("hankel_tn needs a square matrix")
    if not is_hankel(arr, profile):
        raise StructuralError("matrix is not Hankel")
    if not 1 <= p <= n:
        raise StructuralError(f"order p={p} must lie in 1..{n}")

    def candidates(k):
        out = [(tuple(range(i, i + k)), tuple(range(i, i + k))) for i in range(n - k + 1)]
        out += [(tuple(range(i + 1, i + k + 1)), tuple(range(i, i + k))) for i in range(n - k)]
        return sorted(out)

    return _scan(arr, candidates, p, _profile_for(arr, profile))


# -- signatures -------------------------------------------------------------------

def _epsilon(p: int, alpha) -> int:
    """Sign factor for order-p minors of (1 + x_j y_k)^alpha, before the
    ``(-1)^floor(p/2)`` prefactor."""
    if alpha > p - 2:
        return (-1) ** (p // 2)
    if float(alpha).is_integer():
        return 0
    s = math.floor(alpha / 2)
    if 2 * s < alpha < 2 * s + 1:
        return (-1) ** (p - s + 1)
    return (-1) ** (s + 1)


def predicted_signature(n: int, alpha) -> SignSignature:
    """Predicted per-order signs of the minors of ``(1 + x_j y_k)^alpha``
    for increasing ``x`` and ``y`` with all ``1 + x_j y_k > 0``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    signs = []
    for p in range(1, n + 1):
        if float(alpha).is_integer() and alpha <= n - 2 and p > alpha + 1:
            signs.append(0)
        else:
            signs.append((-1) ** (p // 2) * _epsilon(p, alpha))
    return SignSignature(tuple(signs))


def observed_signature(matrix, profile: ToleranceProfile = DEFAULT_PROFILE) -> SignSignature:
    """Common sign of the minors of each order; raises SignConflict otherwise."""
    arr = as_matrix(matrix)
    n = arr.shape[0]
    if arr.shape[0] != arr.shape[1]:
        raise StructuralError("observed_signature needs a square matrix")
    profile = _profile_for(arr, profile)
    signs = []
    limited = False
    gen = _all_minors(n, n)
    for k in range(1, n + 1):
        idx = list(gen(k))
        values, s, banded = minors_of_order(arr, idx, profile)
        limited = limited or any(banded)
        pos = next((i for i, v in enumerate(s) if v > 0), None)
        neg = next((i for i, v in enumerate(s) if v < 0), None)
        if pos is not None and neg is not None:
            w1 = MinorWitness(*idx[pos], values[pos], Sign3.POSITIVE)
            w2 = MinorWitness(*idx[neg], values[neg], Sign3.NEGATIVE)
            raise SignConflict(k, w1, w2)
        signs.append(1 if pos is not None else (-1 if neg is not None else 0))
    return SignSignature(tuple(signs), limited)


# -- TN_2 via log-concavity -------------------------------------------------------

@dataclass(frozen=True)
class LogConcavityResult:
    consistent: bool
    witness: tuple | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        return {"consistent": self.consistent, "witness": self.witness, "reason": self.reason}


def tn2_logconcavity(samples, profile: ToleranceProfile = DEFAULT_PROFILE) -> LogConcavityResult:
    """Check sampled values of ``Lambda`` against TN_2 of ``Lambda(x - y)``.

    Two conditions: the positive samples form one contiguous run, and
    ``L(b)^2 >= L(a) L(c)`` on every equispaced positive triple ``a < b < c``.
    The first violation is reported as ``(x_a, x_b, x_c)``.
    """
    pts = [(float(x), float(v)) for x, v in samples]
    xs = [x for x, _ in pts]
    if any(a >= b for a, b in zip(xs, xs[1:])):
        raise StructuralError("samples must be sorted by strictly increasing x")
    vals = [v for _, v in pts]
    if any(v < 0 for v in vals):
        raise StructuralError("sampled values must be non-negative")
    pos = [i for i, v in enumerate(vals) if v > 0]
    if pos:
        gap = next((i for i in range(pos[0], pos[-1] + 1) if vals[i] == 0), None)
        if gap is not None:
            right = next(i for i in pos if i > gap)
            left = max(i for i in pos if i < gap)
            return LogConcavityResult(False, (xs[left], xs[gap], xs[right]), "non-contiguous support")
    span = (xs[-1] - xs[0]) if len(xs) > 1 else 1.0
    tol = 1e-12 * max(span, 1.0)
    for i in range(len(xs)):
        if vals[i] <= 0:
            continue
        for k in range(i + 2, len(xs)):
            if vals[k] <= 0:
                continue
            mid = 0.5 * (xs[i] + xs[k])
            j = bisect_left(xs, mid - tol)
            if j < len(xs) and abs(xs[j] - mid) <= tol and i < j < k:
                lhs = vals[j] ** 2
                rhs = vals[i] * vals[k]
                if lhs < rhs * (1 - profile.zero_band):
                    return LogConcavityResult(False, (xs[i], xs[j], xs[k]), "log-concavity fails")
    return LogConcavityResult(True)
