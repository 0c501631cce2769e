"""Bilateral Laplace transforms ``B{L}(s) = int exp(-s x) L(x) dx``.

Closed forms cover the kernel zoo (with entrywise powers where a formula is
known), composite Gauss-Legendre quadrature gives an independent check, and
the Riemann-sum machinery (``p_m``, ``F_m``, root sectors, zero strips)
tests where the transforms can vanish.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import gamma, rgamma

from .errors import DomainError, NumericError
from .kernels import (
    ArgScale,
    DiagScale,
    KernelSpec,
    Power,
    RowColReverse,
    Shift,
    ZERO_TO_ONE,
    evaluate,
    to_json,
)
from .numerics import DEFAULT_PROFILE, ToleranceProfile, is_exact, to_fraction

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
MAX_DEGREE = 200

_EPS = np.finfo(float).eps
# Documented accuracy of scipy's complex reciprocal gamma on |Im| <= 20.
_GAMMA_REL_ERR = 1e-13


@dataclass(frozen=True)
class TransformValue:
    s: complex
    value: complex
    method: str
    error_bound: float

    def to_dict(self) -> dict:
        v = complex(self.value)
        s = complex(self.s)
        return {
            "s": [s.real, s.imag],
            "value": [v.real, v.imag],
            "exact": str(self.value) if is_exact(self.value) else None,
            "method": self.method,
            "error_bound": self.error_bound,
        }


# -- closed forms ---------------------------------------------------------------------

def _is_int(v) -> bool:
    return float(v).is_integer()


def _exact_s(s) -> bool:
    return is_exact(s)


def w_power_transform(s, alpha):
    """``int_{-pi/2}^{pi/2} exp(-s x) cos(x)^alpha dx`` via reciprocal gammas.

    Vectorized over ``s``; entire in ``s`` with zeros at ``+-(alpha + 2 + 2k) i``.
    """
    s = np.asarray(s, dtype=complex)
    pre = math.pi * gamma(alpha + 1) / 2.0 ** alpha
    return pre * rgamma((alpha + 2 + 1j * s) / 2) * rgamma((alpha + 2 - 1j * s) / 2)


def mkernel_power_terms(n: int):
    """``(coefficient, pole)`` pairs with ``B{M^n}(s) = sum c / (s^2 - pole^2)``."""
    return [(2 * (-1) ** (k + 1) * math.comb(n, k) * 2 ** (n - k) * (n + k), n + k) for k in range(n + 1)]


def omega_qr_terms(q, r, alpha: int):
    """``(coefficient, shift)`` pairs with ``B{(Omega^(q,r))^alpha}(s) = sum c / (s + shift)``."""
    exact = is_exact(q) and is_exact(r)
    if exact:
        q, r = to_fraction(q), to_fraction(r)
    base = (q * r / (r - q)) ** alpha
    return [(base * math.comb(alpha, j) * (-1) ** j, j * r + (alpha - j) * q) for j in range(alpha + 1)]


def _strip(s, lo, hi, name):
    re = complex(s).real
    if not (lo < re < hi):
        raise DomainError(f"{name}: need {lo} < Re(s) < {hi}, got s={s}")


def _power_of(alpha, allowed: str):
    if not alpha > 0 and not (allowed == "nonneg" and alpha == 0):
        raise DomainError(f"power must be {'non-negative' if allowed == 'nonneg' else 'positive'}, got {alpha}")
    if allowed == "int" and not _is_int(alpha):
        raise DomainError(f"only integer powers have a closed form here, got {alpha}")


def closed_form_transform(spec: KernelSpec, s, alpha=1, check_region: bool = True) -> TransformValue:
    """``B{L^alpha}(s)`` for a zoo kernel ``L`` from its closed form.

    Rational forms with exact ``s`` and exact parameters give exact values.
    ``check_region=False`` evaluates the meromorphic continuation instead of
    rejecting ``s`` outside the strip of convergence.
    """
    v = spec.variant
    p = spec.p
    exact = _exact_s(s) and is_exact(alpha)
    sf = Fraction(to_fraction(s)) if exact else complex(s)

    def region(lo, hi):
        if check_region:
            _strip(s, lo, hi, v)

    if v == "Omega":
        _power_of(alpha, "pos")
        region(-float(alpha), math.inf)
        if exact and _is_int(alpha):
            a = int(alpha)
            return _rational(s, Fraction(math.factorial(a)) / (sf + a) ** (a + 1))
        val = gamma(float(alpha) + 1) / (complex(s) + float(alpha)) ** (float(alpha) + 1)
        return TransformValue(complex(s), val, CLOSED_FORM, _GAMMA_REL_ERR * abs(val))
    if v == "OmegaQR":
        q, r = p["q"], p["r"]
        _power_of(alpha, "pos")
        region(-float(alpha) * float(min(q, r)), math.inf)
        if q == r:
            val = gamma(float(alpha) + 1) * float(r) ** (2 * float(alpha)) / (complex(s) + float(alpha) * float(r)) ** (float(alpha) + 1)
            return TransformValue(complex(s), val, CLOSED_FORM, _GAMMA_REL_ERR * abs(val))
        _power_of(alpha, "int")
        terms = omega_qr_terms(q, r, int(alpha))
        return _partial_fractions(s, [(c, sf + sh) for c, sh in terms], exact and is_exact(q) and is_exact(r))
    if v == "LambdaD":
        _power_of(alpha, "pos")
        region(-float(alpha), math.inf)
        if exact:
            return _rational(s, Fraction(1) / (sf + to_fraction(alpha)))
        val = 1 / (complex(s) + float(alpha))
        return TransformValue(complex(s), val, CLOSED_FORM, 4 * _EPS * abs(val))
    if v == "LambdaAlpha":
        if alpha != 1:
            raise DomainError("LambdaAlpha has a closed form for the first power only")
        region(-1.0, math.inf)
        a = p["alpha"]
        if exact and is_exact(a) and _is_int(a):
            return _rational(s, Fraction(1) / (sf + 1) ** int(a))
        val = (1 + complex(s)) ** (-float(a))
        return TransformValue(complex(s), val, CLOSED_FORM, 16 * _EPS * abs(val))
    if v == "CosineW":
        _power_of(alpha, "nonneg")
        val = complex(w_power_transform(complex(s), float(alpha)))
        return TransformValue(complex(s), val, CLOSED_FORM, 2 * _GAMMA_REL_ERR * abs(val) + 1e-300)
    if v == "Gaussian":
        _power_of(alpha, "pos")
        a = float(alpha)
        val = math.sqrt(math.pi / a) * cmath.exp(complex(s) ** 2 / (4 * a))
        return TransformValue(complex(s), val, CLOSED_FORM, 16 * _EPS * abs(val))
    if v == "MKernel":
        _power_of(alpha, "int")
        n = int(alpha)
        region(-n, n)
        terms = mkernel_power_terms(n)
        return _partial_fractions(s, [(c, sf * sf - k * k) for c, k in terms], exact)
    if v == "TwoSidedExp":
        _power_of(alpha, "pos")
        a, b, c, x0 = p["alpha"], p["beta"], p["c"], p["x0"]
        k = alpha
        lo = -math.inf if a == -math.inf else float(k * a)
        hi = math.inf if b == math.inf else float(k * b)
        region(lo, hi)
        ok_exact = exact and _is_int(k) and x0 == 0 and all(is_exact(t) for t in (c,) + tuple(t for t in (a, b) if abs(t) != math.inf))
        if ok_exact:
            total = Fraction(0)
            if a != -math.inf:
                total += 1 / (sf - k * to_fraction(a))
            if b != math.inf:
                total += 1 / (k * to_fraction(b) - sf)
            return _rational(s, to_fraction(c) ** int(k) * total)
        sc = complex(s)
        total = 0j
        if a != -math.inf:
            total += 1 / (sc - float(k) * float(a))
        if b != math.inf:
            total += 1 / (float(k) * float(b) - sc)
        val = float(c) ** float(k) * cmath.exp(-sc * float(x0)) * total
        return TransformValue(sc, val, CLOSED_FORM, 16 * _EPS * abs(val))
    raise DomainError(f"no closed form for {v}")


def _rational(s, value) -> TransformValue:
    return TransformValue(s, value, CLOSED_FORM, 0.0)


def _partial_fractions(s, pairs, exact: bool) -> TransformValue:
    if exact:
        if any(d == 0 for _, d in pairs):
            raise DomainError(f"s={s} is a pole")
        return _rational(s, sum((Fraction(c) / d for c, d in pairs), Fraction(0)))
    terms = [complex(float(c)) / complex(d) for c, d in pairs]
    val = sum(terms)
    return TransformValue(complex(s), val, CLOSED_FORM, 8 * _EPS * sum(abs(t) for t in terms))


def transform_function(spec: KernelSpec, alpha=1) -> Callable:
    """Vectorized meromorphic continuation of ``s -> B{L^alpha}(s)``."""
    if spec.variant == "CosineW":
        _power_of(alpha, "nonneg")
        return functools.partial(w_power_transform, alpha=float(alpha))

    def scalar(z):
        try:
            with np.errstate(divide="ignore", invalid="ignore"):
                return complex(closed_form_transform(spec, complex(z), alpha, check_region=False).value)
        except ZeroDivisionError:
            return complex(math.inf)

    vec = np.vectorize(scalar, otypes=[complex])
    return lambda s: vec(np.asarray(s, dtype=complex))


# -- quadrature -----------------------------------------------------------------------

_GL_POINTS = 16
_BASE_PANELS = 4
TRUNCATION_RATIO = 1e-16


def _base_support(spec: KernelSpec):
    """Support interval and breakpoints of the untransformed Toeplitz symbol."""
    v = spec.variant
    if v in ("Omega", "OmegaQR", "LambdaD", "LambdaAlpha", "Heaviside"):
        return (0.0, math.inf), (0.0,)
    if v == "CosineW":
        return (-math.pi / 2, math.pi / 2), (0.0,)
    if v == "TwoSidedExp":
        p = spec.p
        x0 = float(p["x0"])
        lo = x0 if p["beta"] == math.inf else -math.inf
        hi = x0 if p["alpha"] == -math.inf else math.inf
        return (lo, hi), (x0,)
    if v in ("Gaussian", "MKernel"):
        return (-math.inf, math.inf), (0.0,)
    if spec.structure == "toeplitz":
        return (-math.inf, math.inf), ()
    raise DomainError(f"{v} is not a Toeplitz kernel")


def _support(spec: KernelSpec, transforms: Sequence):
    (lo, hi), bps = _base_support(spec)
    for t in transforms:
        if isinstance(t, Shift):
            a = float(t.a)
            lo, hi, bps = lo + a, hi + a, tuple(b + a for b in bps)
        elif isinstance(t, ArgScale):
            m = float(t.m)
            lo, hi, bps = lo / m, hi / m, tuple(b / m for b in bps)
        elif isinstance(t, RowColReverse):
            lo, hi, bps = -hi, -lo, tuple(-b for b in bps)
        elif isinstance(t, Power):
            if t.alpha == 0 and t.zero_convention == ZERO_TO_ONE:
                lo, hi = -math.inf, math.inf
        elif isinstance(t, DiagScale):
            pass
        else:
            raise TypeError(f"unknown transform {t!r}")
    return (lo, hi), bps


def _symbol(spec, transforms):
    transforms = tuple(transforms)
    return np.vectorize(lambda x: float(evaluate(spec, transforms, float(x), 0.0)), otypes=[float])


@functools.lru_cache(maxsize=256)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panel_nodes(edges: tuple, level: int):
    x0, w0 = _gl(_GL_POINTS)
    xs, ws = [], []
    for a, b in zip(edges, edges[1:]):
        cuts = np.linspace(a, b, _BASE_PANELS * 2 ** level + 1)
        lo, hi = cuts[:-1, None], cuts[1:, None]
        xs.append(((hi - lo) / 2 * x0 + (hi + lo) / 2).ravel())
        ws.append(((hi - lo) / 2 * w0).ravel())
    return np.concatenate(xs), np.concatenate(ws)


@functools.lru_cache(maxsize=64)
def _cached_samples(spec, transforms, edges, level):
    x, w = _panel_nodes(edges, level)
    return x, w, _symbol(spec, transforms)(x)


def _samples(spec, transforms, edges, level):
    if spec.variant == "Custom":
        x, w = _panel_nodes(edges, level)
        return x, w, _symbol(spec, transforms)(x)
    return _cached_samples(spec, tuple(transforms), edges, level)


def _truncate(spec, transforms, s, lo, hi):
    """Grow infinite ends until ``|exp(-s x) L(x)|`` drops below the ratio of its peak."""
    f = _symbol(spec, transforms)
    re = complex(s).real
    t = 1.0
    while t <= 2.0 ** 12:
        a = lo if math.isfinite(lo) else -t
        b = hi if math.isfinite(hi) else t
        if a < b:
            x = np.linspace(a, b, 513)
            g = np.abs(f(x)) * np.exp(-re * x)
            peak = float(np.max(g))
            ends = []
            if not math.isfinite(lo):
                ends.append(float(np.max(g[:4])))
            if not math.isfinite(hi):
                ends.append(float(np.max(g[-4:])))
            if peak > 0 and np.isfinite(peak) and max(ends, default=0.0) <= TRUNCATION_RATIO * peak:
                tail = sum(e * max(1.0, b - a) for e in ends)
                return a, b, tail
        t *= 2
    raise NumericError(f"integrand does not decay on a window of half-width {2.0 ** 12:g} at s={s}")


def quadrature_transform(spec: KernelSpec, s, transforms: Sequence = (), refinement: int = 5,
                         window: tuple | None = None) -> TransformValue:
    """``B{L}(s)`` by composite 16-point Gauss-Legendre on a truncated window.

    The window is the support of ``L`` with infinite ends cut where the
    integrand falls below ``1e-16`` of its peak (or ``window`` when given).
    Level ``k`` uses ``4 * 2**k`` panels per piece between breakpoints. The
    error bound at level ``k`` is twice the largest change between consecutive
    levels from ``k`` up to a fixed top level, plus a rounding floor and the
    truncation tail, so it cannot grow as ``refinement`` increases.
    """
    if refinement < 0:
        raise ValueError("refinement must be non-negative")
    transforms = tuple(transforms)
    (lo, hi), bps = _support(spec, transforms)
    tail = 0.0
    if window is not None:
        lo, hi = max(lo, float(window[0])), min(hi, float(window[1]))
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi, tail = _truncate(spec, transforms, s, lo, hi)
    if not lo < hi:
        raise DomainError("empty integration window")
    edges = tuple(sorted({lo, hi, *(b for b in bps if lo < b < hi)}))
    sc = complex(s)
    top = max(8, refinement + 2)
    vals = []
    l1 = 0.0
    for level in range(top + 1):
        x, w, fx = _samples(spec, transforms, edges, level)
        g = np.exp(-sc * x) * fx
        vals.append(complex(np.sum(w * g)))
        l1 = float(np.sum(w * np.abs(g)))
    if not all(map(cmath.isfinite, vals)):
        raise NumericError(f"non-finite quadrature value at s={s}")
    diffs = [abs(a - b) for a, b in zip(vals, vals[1:])]
    bound = 2 * max(diffs[refinement:]) + 64 * _EPS * l1 + tail
    return TransformValue(sc, vals[refinement], QUADRATURE, float(bound))


# -- Riemann sums and their polynomials -----------------------------------------------

def real_polynomial(coefficients) -> Polynomial:
    """Ascending real coefficients, trailing zeros trimmed."""
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
        raise DomainError("need a non-empty list of finite real coefficients")
    poly = Polynomial(c).trim()
    if poly.degree() > MAX_DEGREE:
        raise DomainError(f"degree {poly.degree()} exceeds the cap of {MAX_DEGREE}")
    return poly


def polynomial_to_list(poly: Polynomial) -> list:
    return [float(format(c, ".17g")) for c in poly.coef]


def riemann_nodes(rho: float, m: int) -> np.ndarray:
    """``(2 nu - m) rho / (2m + 2)`` for ``nu = 0..m``."""
    return (2 * np.arange(m + 1) - m) * rho / (2 * m + 2)


def _riemann_weights(spec, rho, m, transforms):
    if not rho > 0:
        raise DomainError("rho must be positive")
    if m < 0 or m > MAX_DEGREE:
        raise DomainError(f"need 0 <= m <= {MAX_DEGREE}")
    t = riemann_nodes(rho, m)
    a = _symbol(spec, transforms)(t)
    bad = np.flatnonzero(~(a > 0))
    if bad.size:
        nu = int(bad[0])
        raise DomainError(f"L must be positive on (-rho/2, rho/2); L({t[nu]!r}) = {a[nu]!r} at nu={nu}")
    return t, a


def riemann_polynomial(spec: KernelSpec, rho: float, m: int, transforms: Sequence = ()) -> Polynomial:
    """``p_m(z) = rho/(m+1) sum_nu L((2 nu - m) rho / (2m + 2)) z^nu``."""
    _, a = _riemann_weights(spec, rho, m, tuple(transforms))
    return real_polynomial(rho / (m + 1) * a)


def riemann_sum_function(spec: KernelSpec, rho: float, m: int, transforms: Sequence = ()) -> Callable:
    """Vectorized ``F_m(s) = rho/(m+1) sum_nu exp(-s t_nu) L(t_nu)``."""
    t, a = _riemann_weights(spec, rho, m, tuple(transforms))
    w = rho / (m + 1) * a

    def fm(s):
        s = np.asarray(s, dtype=complex)
        return np.exp(-s[..., None] * t) @ w

    return fm


@dataclass(frozen=True)
class SectorCheck:
    zero_free: bool
    theta: float
    min_abs_arg: float
    violating_root: complex | None
    roots: tuple

    def to_dict(self) -> dict:
        v = self.violating_root
        return {
            "zero_free": self.zero_free,
            "theta": self.theta,
            "min_abs_arg": self.min_abs_arg,
            "violating_root": None if v is None else [v.real, v.imag],
            "roots": [[z.real, z.imag] for z in self.roots],
        }


def root_sector_check(poly, theta: float, profile: ToleranceProfile = DEFAULT_PROFILE) -> SectorCheck:
    """Do all roots satisfy ``|arg z| >= theta`` (up to a relative ``rel_eps`` margin)?"""
    if not isinstance(poly, Polynomial):
        poly = real_polynomial(poly)
    if poly.degree() > MAX_DEGREE:
        raise DomainError(f"degree {poly.degree()} exceeds the cap of {MAX_DEGREE}")
    roots = tuple(complex(z) for z in poly.roots()) if poly.degree() >= 1 else ()
    if not roots:
        return SectorCheck(True, theta, math.pi, None, ())
    args = [abs(cmath.phase(z)) for z in roots]
    i = int(np.argmin(args))
    ok = args[i] >= theta * (1 - profile.rel_eps)
    return SectorCheck(ok, theta, args[i], None if ok else roots[i], roots)


# -- zero search in a rectangle -------------------------------------------------------

@dataclass(frozen=True)
class StripCheckReport:
    half_height: float
    box: tuple
    grid: tuple
    zeros: tuple
    verdict: str
    winding_total: int
    ambiguous_cells: int
    consistent: bool
    label: str = ""

    @property
    def zero_free(self) -> bool:
        return self.verdict == "zero-free"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "half_height": self.half_height,
            "box": list(self.box),
            "grid": list(self.grid),
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "verdict": self.verdict,
            "winding_total": self.winding_total,
            "ambiguous_cells": self.ambiguous_cells,
            "consistent": self.consistent,
        }


def _call(fn, z):
    out = np.asarray(fn(np.asarray(z, dtype=complex)), dtype=complex)
    return out.reshape(np.shape(z))


def _polish(fn, z, h_scale, max_iter=100):
    """Damped Newton with a central-difference derivative."""
    fz = complex(_call(fn, z))
    for _ in range(max_iter):
        if fz == 0 or not cmath.isfinite(fz):
            break
        h = 1e-6 * max(1.0, abs(z))
        d = (complex(_call(fn, z + h)) - complex(_call(fn, z - h))) / (2 * h)
        if d == 0 or not cmath.isfinite(d):
            break
        step = fz / d
        for _ in range(40):
            zn = z - step
            fn_ = complex(_call(fn, zn))
            if cmath.isfinite(fn_) and abs(fn_) < abs(fz):
                break
            step /= 2
        else:
            break
        z, fz = zn, fn_
        if abs(step) <= 4 * _EPS * max(1.0, abs(z)):
            break
        if abs(z) > 1e3 * h_scale:
            break
    return z, fz


def strip_zero_check(fn: Callable, half_height: float, box: tuple = (-5.0, 5.0, -5.0, 5.0),
                     grid: tuple = (101, 101), profile: ToleranceProfile = DEFAULT_PROFILE,
                     label: str = "") -> StripCheckReport:
    """Locate zeros of a holomorphic ``fn`` in ``box = (re_lo, re_hi, im_lo, im_hi)``.

    Seeds are grid-local minima of ``|fn|`` and cells with non-zero winding;
    each is polished by damped Newton. A polished point counts as a zero when
    ``|fn(z)| <= abs_eps`` times the largest ``|fn|`` on a small circle around
    it. The per-cell winding numbers are a cross-check only.
    """
    re_lo, re_hi, im_lo, im_hi = map(float, box)
    nx, ny = grid
    if nx < 3 or ny < 3 or not (re_lo < re_hi and im_lo < im_hi):
        raise DomainError("need a non-degenerate box and at least a 3x3 grid")
    re = np.linspace(re_lo, re_hi, nx)
    im = np.linspace(im_lo, im_hi, ny)
    Z = re[None, :] + 1j * im[:, None]
    F = _call(fn, Z)
    A = np.abs(F)
    finite = np.isfinite(F)
    dx, dy = re[1] - re[0], im[1] - im[0]
    cell = math.hypot(dx, dy)

    # Winding per cell from the phase increments along its four edges.
    with np.errstate(all="ignore"):
        def dphase(a, b):
            return np.angle(b / a)
        c00, c01, c11, c10 = F[:-1, :-1], F[:-1, 1:], F[1:, 1:], F[1:, :-1]
        edges = [dphase(c00, c01), dphase(c01, c11), dphase(c11, c10), dphase(c10, c00)]
        winding = np.rint(sum(edges) / (2 * np.pi))
        cell_max = np.maximum.reduce([np.abs(c) for c in (c00, c01, c11, c10)])
        cell_min = np.minimum.reduce([np.abs(c) for c in (c00, c01, c11, c10)])
        ambiguous = (
            ~(finite[:-1, :-1] & finite[:-1, 1:] & finite[1:, 1:] & finite[1:, :-1])
            | (cell_min <= profile.abs_eps * cell_max)
            | np.any([np.abs(e) > 0.75 * np.pi for e in edges], axis=0)
        )
        winding = np.where(ambiguous | ~np.isfinite(winding), 0, winding).astype(int)

    seeds = []
    for j, k in zip(*np.nonzero(winding)):
        seeds.append(complex((re[k] + re[k + 1]) / 2, (im[j] + im[j + 1]) / 2))
    for j in range(ny):
        for k in range(nx):
            if not finite[j, k]:
                continue
            nb = A[max(j - 1, 0):j + 2, max(k - 1, 0):k + 2]
            nb = nb[np.isfinite(nb)]
            if A[j, k] <= nb.min() and (A[j, k] < nb.max() or A[j, k] == 0):
                seeds.append(complex(Z[j, k]))

    zeros: list[complex] = []
    scale = max(abs(re_lo), abs(re_hi), abs(im_lo), abs(im_hi), 1.0)
    slack = 1e-9 * scale
    for z0 in seeds:
        z, fz = _polish(fn, z0, scale)
        if not (re_lo - slack <= z.real <= re_hi + slack and im_lo - slack <= z.imag <= im_hi + slack):
            continue
        ring = _call(fn, z + cell / 4 * np.exp(2j * np.pi * np.arange(8) / 8))
        local = float(np.max(np.abs(ring[np.isfinite(ring)]))) if np.any(np.isfinite(ring)) else 0.0
        if not (cmath.isfinite(fz) and abs(fz) <= profile.abs_eps * local):
            continue
        if all(abs(z - w) > cell / 10 for w in zeros):
            zeros.append(z)
    zeros.sort(key=lambda w: (round(w.imag, 9), round(w.real, 9)))

    # Cross-check: each unambiguous cell winds once per zero inside it.
    counts = np.zeros_like(winding)
    for z in zeros:
        k = min(int((z.real - re_lo) // dx), nx - 2)
        j = min(int((z.imag - im_lo) // dy), ny - 2)
        counts[j, k] += 1
    consistent = bool(np.all((winding == counts) | ambiguous))
    inside = [z for z in zeros if abs(z.imag) < half_height]
    return StripCheckReport(float(half_height), (re_lo, re_hi, im_lo, im_hi), (nx, ny), tuple(zeros),
                            "zeros present" if inside else "zero-free", int(winding.sum()),
                            int(ambiguous.sum()), consistent, label)


# -- integer powers with rational transforms ------------------------------------------

@dataclass(frozen=True)
class OmegaQRPowerTransform:
    q: object
    r: object
    alpha: int
    f_constant: object
    g_shifts: tuple
    g: Polynomial
    max_relative_error: float

    def value(self, s):
        """``f / g(s)``; exact for exact ``s`` and parameters."""
        den = 1
        for sh in self.g_shifts:
            den = den * (s + sh)
        return self.f_constant / den

    def to_dict(self) -> dict:
        return {
            "q": str(self.q),
            "r": str(self.r),
            "alpha": self.alpha,
            "f_constant": str(self.f_constant),
            "g_roots": [str(-sh) for sh in self.g_shifts],
            "g": polynomial_to_list(self.g),
            "max_relative_error": self.max_relative_error,
        }


def omega_qr_integer_power_transform(q, r, alpha: int, seed: int = 0) -> OmegaQRPowerTransform:
    """Write ``B{(Omega^(q,r))^alpha}`` as ``f / g`` with constant ``f``.

    ``f = alpha! (q r)^alpha`` and ``g(s) = prod_j (s + j r + (alpha - j) q)``.
    The partial-fraction expansion is compared against ``f / g`` at three
    random points.
    """
    if not (q > 0 and r > 0) or q == r:
        raise DomainError("need distinct q, r > 0")
    if not (_is_int(alpha) and alpha >= 1):
        raise DomainError("alpha must be an integer >= 1")
    alpha = int(alpha)
    exact = is_exact(q) and is_exact(r)
    qq, rr = (to_fraction(q), to_fraction(r)) if exact else (float(q), float(r))
    f = math.factorial(alpha) * (qq * rr) ** alpha
    shifts = tuple(j * rr + (alpha - j) * qq for j in range(alpha + 1))
    g = Polynomial([1.0])
    for sh in shifts:
        g = g * Polynomial([float(sh), 1.0])
    terms = omega_qr_terms(qq, rr, alpha)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in rng.uniform(0.1, 5.0, 3) + 1j * rng.uniform(-3.0, 3.0, 3):
        pf = sum(complex(float(c)) / (s + float(sh)) for c, sh in terms)
        direct = float(f) / complex(g(s))
        worst = max(worst, abs(pf - direct) / abs(direct))
    if worst > 1e-12:
        raise NumericError(f"partial fractions disagree with f/g (relative error {worst:.3g})")
    return OmegaQRPowerTransform(qq, rr, alpha, f, shifts, g, worst)


@dataclass(frozen=True)
class MKernelPowerReport:
    n: int
    p_n: tuple
    q_roots: tuple
    p_values: dict
    ratio: Fraction
    pf: bool

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial([float(c) for c in self.p_n])

    def transform(self, s):
        """``p_n(s) / q_n(s)``; exact for exact ``s``."""
        num = sum(c * s ** i for i, c in enumerate(self.p_n))
        den = 1
        for k in range(self.n + 1):
            den = den * (s * s - (self.n + k) ** 2)
        return num / den

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p_n": [str(c) for c in self.p_n],
            "q_roots": list(self.q_roots),
            "p_values": {str(k): str(v) for k, v in self.p_values.items()},
            "ratio": str(self.ratio),
            "verdict": "PF" if self.pf else "not PF",
        }


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_eval(c: Sequence, x):
    acc = Fraction(0)
    for v in reversed(c):
        acc = acc * x + v
    return acc


def mkernel_power_analysis(n: int) -> MKernelPowerReport:
    """Clear denominators in ``B{M^n}`` with ``M(x) = 2 exp(-|x|) - exp(-2|x|)``.

    ``q_n(s) = prod_{k=0}^n (s^2 - (n+k)^2)`` and ``p_n = q_n B{M^n}``. The
    reciprocal transform is a polynomial iff ``p_n`` is constant; that is the
    PF verdict. For ``n >= 2`` the report also records ``p_n(+-(n+k))`` and
    ``p_n(n) / p_n(2n)``.
    """
    if not (_is_int(n) and n >= 1):
        raise DomainError("n must be an integer >= 1")
    n = int(n)
    # Work in u = s^2; every factor is (u - (n+k)^2).
    p_u = [Fraction(0)]
    for k, (c, root) in enumerate(mkernel_power_terms(n)):
        term = [Fraction(c)]
        for j in range(n + 1):
            if j != k:
                term = _poly_mul(term, [Fraction(-(n + j) ** 2), Fraction(1)])
        p_u = [a + b for a, b in zip(p_u + [Fraction(0)] * (len(term) - len(p_u)), term + [Fraction(0)] * (len(p_u) - len(term)))]
    while len(p_u) > 1 and p_u[-1] == 0:
        p_u.pop()
    p_s = []
    for c in p_u:
        p_s.extend([c, Fraction(0)])
    p_s = tuple(p_s[:-1])
    roots = tuple(sorted({sign * (n + k) for k in range(n + 1) for sign in (1, -1)}))
    values = {x: _poly_eval(p_s, x) for x in roots}
    ratio = _poly_eval(p_s, n) / _poly_eval(p_s, 2 * n)
    pf = len(p_s) == 1
    return MKernelPowerReport(n, p_s, roots, values, ratio, pf)


def kernel_label(spec: KernelSpec, alpha=1) -> str:
    d = to_json(spec)
    return f"{d['variant']}^{alpha}" if alpha != 1 else d["variant"]
