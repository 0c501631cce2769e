"""Scalar handling, determinants and rank with explicit tolerance semantics.

Three scalar modes coexist:

* ``exact``: ``int`` / ``fractions.Fraction`` entries, no rounding anywhere.
* ``float``: IEEE doubles, zero-classification through a ToleranceProfile.
* ``extended``: ``mpmath.mpf`` entries at ``EXTENDED_PREC`` bits.

Python's numeric tower already gives the required promotion rules: exact op
exact stays exact, exact op float demotes to float.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational

import mpmath
import numpy as np

from .errors import NumericError, StructuralError

EXTENDED_PREC = 160

EXACT = "exact"
FLOAT = "float"
EXTENDED = "extended"
MODES = (EXACT, FLOAT, EXTENDED)


@dataclass(frozen=True)
class ToleranceProfile:
    abs_eps: float = 1e-12
    rel_eps: float = 1e-9
    zero_band: float = 1e-9

    def __post_init__(self):
        for name in ("abs_eps", "rel_eps", "zero_band"):
            v = getattr(self, name)
            if not (v >= 0):
                raise ValueError(f"{name} must be non-negative, got {v!r}")


DEFAULT_PROFILE = ToleranceProfile()
# Used for mpmath entries; roughly 90 of the 160 bits are trusted.
EXTENDED_PROFILE = ToleranceProfile(abs_eps=1e-40, rel_eps=1e-30, zero_band=1e-30)


class Sign3(enum.IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def is_exact(v) -> bool:
    return isinstance(v, Rational) and not isinstance(v, bool)


def to_fraction(v) -> Fraction:
    """Convert an exact scalar (int, Fraction, "num/den" string) to Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    if is_exact(v):
        return Fraction(v.numerator, v.denominator)
    raise TypeError(f"not an exact scalar: {v!r}")


def scalar_mode(entries) -> str:
    """Infer the scalar mode of an iterable (or array) of entries."""
    mode = EXACT
    for v in np.asarray(entries, dtype=object).ravel():
        if isinstance(v, mpmath.mpf):
            return EXTENDED
        if not is_exact(v):
            mode = FLOAT
    return mode


def as_matrix(matrix, mode: str | None = None) -> np.ndarray:
    """Return a 2-D array in the requested (or inferred) scalar mode.

    Float matrices come back as ``float64`` arrays, the other modes as object
    arrays of Fraction or mpf.
    """
    if isinstance(matrix, np.ndarray) and matrix.dtype != object and mode in (None, FLOAT):
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim != 2:
            raise StructuralError(f"expected a 2-D matrix, got shape {arr.shape}")
        return arr
    arr = np.array(matrix, dtype=object)
    if arr.ndim != 2:
        raise StructuralError(f"expected a 2-D matrix, got shape {arr.shape}")
    if mode is None:
        mode = scalar_mode(arr)
    if mode == FLOAT:
        return arr.astype(float)
    if mode == EXACT:
        return np.vectorize(to_fraction, otypes=[object])(arr) if arr.size else arr
    if mode == EXTENDED:
        with mpmath.workprec(EXTENDED_PREC):
            conv = np.vectorize(to_mpf, otypes=[object])
            return conv(arr) if arr.size else arr
    raise ValueError(f"unknown mode {mode!r}")


def to_mpf(v):
    """Exact or float scalar to ``mpmath.mpf`` without an intermediate float."""
    if is_exact(v):
        f = to_fraction(v)
        return mpmath.mpf(f.numerator) / f.denominator
    return mpmath.mpf(v)


def matrix_mode(arr: np.ndarray) -> str:
    if arr.dtype != object:
        return FLOAT
    return scalar_mode(arr)


def _check_square(arr: np.ndarray):
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise StructuralError(f"determinant needs a non-empty square matrix, got shape {arr.shape}")


def _bareiss(rows: list[list[Fraction]]) -> Fraction:
    # Fraction-free elimination; with integer input every intermediate stays integral.
    a = [row[:] for row in rows]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) / prev
            row_i[k] = Fraction(0)
        prev = pivot
    return sign * a[n - 1][n - 1]


def _gauss_pivot(rows: list[list]) -> tuple:
    """Partially pivoted elimination on generic field elements (float or mpf)."""
    a = [row[:] for row in rows]
    n = len(a)
    value = 1
    magnitude = 1
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        piv = a[p][k]
        if piv == 0:
            # The column is zero below k; the scale is still meaningful for sign3.
            return 0 * value, magnitude * max(abs(x) for r in a[k:] for x in r[k:])
        if p != k:
            a[k], a[p] = a[p], a[k]
            value = -value
        value = value * piv
        magnitude = magnitude * abs(piv)
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                row_i, row_k = a[i], a[k]
                for j in range(k + 1, n):
                    row_i[j] -= f * row_k[j]
    return value, magnitude


def det_with_magnitude(matrix) -> tuple:
    """Return ``(determinant, magnitude)``.

    The magnitude is the product of pivot magnitudes on the float and extended
    paths and ``abs(det)`` on the exact path.
    """
    arr = as_matrix(matrix)
    _check_square(arr)
    mode = matrix_mode(arr)
    if mode == EXACT:
        d = _bareiss([list(r) for r in arr])
        return d, abs(d)
    if mode == EXTENDED:
        with mpmath.workprec(EXTENDED_PREC):
            return _gauss_pivot([list(r) for r in arr])
    if not np.all(np.isfinite(arr)):
        raise NumericError("matrix contains NaN or infinite entries")
    v, m = batch_det(arr[None, :, :])
    return float(v[0]), float(m[0])


def det(matrix):
    """Determinant in the matrix's own scalar mode.

    >>> det([[1, 1], [1, 2]])
    Fraction(1, 1)
    """
    return det_with_magnitude(matrix)[0]


def batch_det(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized partially pivoted LU over a ``(batch, n, n)`` float stack.

    Returns determinant values and pivot-product magnitudes.
    """
    a = np.array(stack, dtype=float, copy=True)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise StructuralError(f"expected (batch, n, n), got {a.shape}")
    b, n, _ = a.shape
    idx = np.arange(b)
    value = np.ones(b)
    mag = np.ones(b)
    for k in range(n):
        p = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = p != k
        if np.any(swap):
            rows_k = a[idx, k, :].copy()
            a[idx, k, :] = a[idx, p, :]
            a[idx, p, :] = rows_k
            value[swap] = -value[swap]
        piv = a[:, k, k]
        value *= piv
        zero = piv == 0
        if np.any(zero):
            # Fall back to the remaining block's max entry as scale.
            rest = np.abs(a[zero, k:, k:]).reshape(int(zero.sum()), -1).max(axis=1)
            mag[zero] *= rest
        mag[~zero] *= np.abs(piv[~zero])
        if k + 1 < n:
            safe = np.where(zero, 1.0, piv)
            f = a[:, k + 1:, k] / safe[:, None]
            f[zero] = 0.0
            a[:, k + 1:, k + 1:] -= f[:, :, None] * a[:, k, None, k + 1:]
    return value, mag


def sign3(value, magnitude=0, profile: ToleranceProfile = DEFAULT_PROFILE) -> Sign3:
    """Classify ``value`` as negative, zero or positive.

    Exact values use their true sign. Inexact values are zero iff
    ``|value| <= max(abs_eps, zero_band * magnitude)``.
    """
    if is_exact(value):
        return Sign3((value > 0) - (value < 0))
    if isinstance(value, mpmath.mpf):
        if mpmath.isnan(value):
            raise NumericError("NaN value")
    elif math.isnan(value):
        raise NumericError("NaN value")
    if magnitude < 0:
        raise ValueError("magnitude must be non-negative")
    if abs(value) <= max(profile.abs_eps, profile.zero_band * magnitude):
        return Sign3.ZERO
    return Sign3.POSITIVE if value > 0 else Sign3.NEGATIVE


def _echelon_rank(rows: list[list[Fraction]]) -> int:
    a = [row[:] for row in rows]
    n_rows, n_cols = len(a), len(a[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, n_rows):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                for j in range(c, n_cols):
                    a[i][j] -= f * a[r][j]
        r += 1
        if r == n_rows:
            break
    return r


def rank(matrix, profile: ToleranceProfile = DEFAULT_PROFILE) -> int:
    """Exact row-echelon rank, or the count of singular values above
    ``rel_eps * sigma_max`` for inexact matrices."""
    arr = as_matrix(matrix)
    if arr.size == 0:
        raise StructuralError("rank of an empty matrix")
    mode = matrix_mode(arr)
    if mode == EXACT:
        return _echelon_rank([list(r) for r in arr])
    if mode == EXTENDED:
        with mpmath.workprec(EXTENDED_PREC):
            sv = mpmath.svd_r(mpmath.matrix(arr.tolist()), compute_uv=False)
            sv = [abs(v) for v in sv]
    else:
        sv = np.linalg.svd(arr, compute_uv=False)
    smax = max(sv)
    if smax == 0:
        return 0
    return int(sum(1 for v in sv if v > profile.rel_eps * smax))


def minor_index_sets(n_rows: int, n_cols: int, order: int):
    """All (rows, cols) index pairs of a given order, in lexicographic order."""
    col_sets = list(combinations(range(n_cols), order))
    for rows in combinations(range(n_rows), order):
        for cols in col_sets:
            yield rows, cols


def format_scalar(v) -> str | float:
    """Render exact values as "num/den" strings, floats unchanged."""
    if is_exact(v):
        f = to_fraction(v)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    if isinstance(v, mpmath.mpf):
        return float(v)
    return float(v)


def parse_scalar(v):
    """Inverse of :func:`format_scalar`."""
    if isinstance(v, str):
        if v in ("inf", "+inf", "-inf", "nan"):
            return float(v)
        return Fraction(v)
    return v
