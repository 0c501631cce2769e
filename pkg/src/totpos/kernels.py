"""Kernel zoo, transform stacks, matrix sampling and the two JKS factorizations.

A kernel is a :class:`KernelSpec` (which base function) plus a tuple of
transforms applied left to right. Toeplitz-type variants evaluate as
``Lambda(x - y)``, Hankel-type as ``f(x + y)``, and the JKS kernel directly as
``max(1 + x*y, 0)``.

Values are exact ``Fraction`` whenever the closed form allows it, e.g. JKS at
rational points, Heaviside values and zeros outside a support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import mpmath
import numpy as np

from .errors import DomainError, StructuralError
from .numerics import as_matrix, format_scalar, is_exact, parse_scalar, to_fraction, to_mpf

TOEPLITZ = "toeplitz"
HANKEL = "hankel"
BIVARIATE = "bivariate"

_STRUCTURE = {
    "Omega": TOEPLITZ,
    "OmegaQR": TOEPLITZ,
    "CosineW": TOEPLITZ,
    "JKS": BIVARIATE,
    "HankelRankTwo": HANKEL,
    "Heaviside": TOEPLITZ,
    "LambdaD": TOEPLITZ,
    "Gaussian": TOEPLITZ,
    "TwoSidedExp": TOEPLITZ,
    "MKernel": TOEPLITZ,
    "LambdaAlpha": TOEPLITZ,
}
VARIANTS = tuple(_STRUCTURE)

ZERO_TO_ZERO = "0^0=0"
ZERO_TO_ONE = "0^0=1"


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a base kernel.

    ``params`` is stored as a sorted tuple of ``(name, value)`` pairs so specs
    are hashable and compare by value. Use the factory functions below rather
    than the constructor.
    """

    variant: str
    params: tuple = ()
    callback: Callable | None = field(default=None, compare=False, repr=False)
    custom_structure: str | None = None

    @property
    def structure(self) -> str:
        if self.variant == "Custom":
            return self.custom_structure
        return _STRUCTURE[self.variant]

    @property
    def p(self) -> dict:
        return dict(self.params)


def _spec(variant, **params) -> KernelSpec:
    return KernelSpec(variant, tuple(sorted(params.items())))


def omega() -> KernelSpec:
    return _spec("Omega")


def omega_qr(q, r) -> KernelSpec:
    if not (q > 0 and r > 0):
        raise DomainError("OmegaQR needs q > 0 and r > 0")
    return _spec("OmegaQR", q=q, r=r)


def cosine_w() -> KernelSpec:
    return _spec("CosineW")


def jks() -> KernelSpec:
    return _spec("JKS")


def hankel_rank_two(a0=1, c0=1, u0=2) -> KernelSpec:
    if not (a0 >= 0 and c0 > 0 and u0 > 0 and u0 != 1):
        raise DomainError("HankelRankTwo needs a0 >= 0, c0 > 0, u0 > 0, u0 != 1")
    return _spec("HankelRankTwo", a0=a0, c0=c0, u0=u0)


def heaviside(d=Fraction(1, 2)) -> KernelSpec:
    if not 0 <= d <= 1:
        raise DomainError("Heaviside needs d in [0, 1]")
    return _spec("Heaviside", d=d)


def lambda_d(d=Fraction(1, 2)) -> KernelSpec:
    if not 0 <= d <= 1:
        raise DomainError("LambdaD needs d in [0, 1]")
    return _spec("LambdaD", d=d)


def gaussian() -> KernelSpec:
    return _spec("Gaussian")


def two_sided_exp(alpha, beta, c=1, x0=0) -> KernelSpec:
    if not alpha < beta:
        raise DomainError("TwoSidedExp needs alpha < beta")
    if alpha == math.inf or beta == -math.inf or not c > 0:
        raise DomainError("TwoSidedExp needs alpha < +inf, beta > -inf, c > 0")
    return _spec("TwoSidedExp", alpha=alpha, beta=beta, c=c, x0=x0)


def m_kernel() -> KernelSpec:
    return _spec("MKernel")


def lambda_alpha(alpha) -> KernelSpec:
    if not alpha >= 1:
        raise DomainError("LambdaAlpha needs alpha >= 1")
    return _spec("LambdaAlpha", alpha=alpha)


def custom(fn: Callable, structure: str = TOEPLITZ, name: str = "custom") -> KernelSpec:
    """Plug-in kernel: ``fn(t)`` for Toeplitz/Hankel structure, ``fn(x, y)`` otherwise."""
    if structure not in (TOEPLITZ, HANKEL, BIVARIATE):
        raise ValueError(f"unknown structure {structure!r}")
    return KernelSpec("Custom", (("name", name),), fn, structure)


# -- transforms ---------------------------------------------------------------

@dataclass(frozen=True)
class Power:
    alpha: Any
    zero_convention: str = ZERO_TO_ZERO

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError("Power needs alpha >= 0")
        if self.zero_convention not in (ZERO_TO_ZERO, ZERO_TO_ONE):
            raise ValueError(f"unknown zero convention {self.zero_convention!r}")


@dataclass(frozen=True)
class Shift:
    """``K(x - a, y)``; for Toeplitz kernels this is ``Lambda(t - a)``."""

    a: Any


@dataclass(frozen=True)
class ArgScale:
    """``K(m x, m y)``; for Toeplitz kernels this is ``Lambda(m t)``."""

    m: Any

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError("ArgScale needs m > 0")


@dataclass(frozen=True)
class RowColReverse:
    """``K(-x, -y)``: reverses rows and columns of every sample."""


@dataclass(frozen=True)
class DiagScale:
    """``r(x) K(x, y) c(y)`` with pointwise positive ``r`` and ``c``."""

    row_fn: Callable
    col_fn: Callable


def _is_identity(t) -> bool:
    return (
        (isinstance(t, Shift) and t.a == 0)
        or (isinstance(t, ArgScale) and t.m == 1)
        or (isinstance(t, Power) and t.alpha == 1)
    )


def normalize(transforms: Sequence) -> tuple:
    """Canonical form of a transform stack.

    Shifts are moved in front of scalings (``[ArgScale(m), Shift(a)]`` equals
    ``[Shift(m*a), ArgScale(m)]``), neighbours of the same kind are merged, and
    identities are dropped.
    """
    stack = [t for t in transforms if not _is_identity(t)]
    changed = True
    while changed:
        changed = False
        for i in range(len(stack) - 1):
            a, b = stack[i], stack[i + 1]
            repl = None
            if isinstance(a, ArgScale) and isinstance(b, Shift):
                repl = [Shift(a.m * b.a), a]
            elif isinstance(a, Shift) and isinstance(b, Shift):
                repl = [Shift(a.a + b.a)]
            elif isinstance(a, ArgScale) and isinstance(b, ArgScale):
                repl = [ArgScale(a.m * b.m)]
            elif isinstance(a, RowColReverse) and isinstance(b, RowColReverse):
                repl = []
            elif isinstance(a, Power) and isinstance(b, Power) and a.alpha > 0 and b.alpha > 0:
                repl = [Power(a.alpha * b.alpha)]
            if repl is not None:
                stack[i:i + 2] = [t for t in repl if not _is_identity(t)]
                changed = True
                break
    return tuple(stack)


# -- scalar helpers -------------------------------------------------------------

def _is_sympy(v) -> bool:
    return type(v).__module__.startswith("sympy")


def _exactify(v):
    """Map sympy numbers to Fraction when rational, to float otherwise."""
    if _is_sympy(v):
        if v.is_Rational:
            return Fraction(int(v.p), int(v.q))
        return float(v)
    return v


def _real(v):
    """A value usable with math/mpmath functions."""
    return v if isinstance(v, mpmath.mpf) else float(v)


def _lib(*vals):
    return mpmath if any(isinstance(v, mpmath.mpf) for v in vals) else math


def _sign(t) -> int:
    if _is_sympy(t):
        if t.is_zero:
            return 0
        return 1 if t.is_positive else -1
    return int(t > 0) - int(t < 0)


def _pi(t):
    if _is_sympy(t):
        import sympy
        return sympy.pi
    if isinstance(t, mpmath.mpf):
        return +mpmath.pi
    return math.pi


_ZERO = Fraction(0)
_ONE = Fraction(1)


def _exp(t, lib):
    if lib is mpmath:
        return mpmath.exp(t)
    return math.exp(t)


def _base_toeplitz(spec: KernelSpec, t):
    v = spec.variant
    p = spec.p
    lib = _lib(t, *p.values())
    if v == "Omega":
        if _sign(t) <= 0:
            return _ZERO
        t = _real(t)
        return t * _exp(-t, lib)
    if v == "OmegaQR":
        if _sign(t) <= 0:
            return _ZERO
        t = _real(t)
        q, r = _real(p["q"]), _real(p["r"])
        if q == r:
            return r * r * t * _exp(-r * t, lib)
        # qr (e^{-qt} - e^{-rt}) / (r - q), via expm1 to avoid cancellation
        return -q * r * _exp(-q * t, lib) * lib.expm1(-(r - q) * t) / (r - q)
    if v == "CosineW":
        if _sign(t) == 0:
            return _ONE
        pi = _pi(t)
        inside = abs(t) < pi / 2
        if not bool(inside):
            return _ZERO
        return lib.cos(_real(t))
    if v == "Heaviside":
        s = _sign(t)
        return _ZERO if s < 0 else (p["d"] if s == 0 else _ONE)
    if v == "LambdaD":
        s = _sign(t)
        if s < 0:
            return _ZERO
        if s == 0:
            return p["d"]
        return _exp(-_real(t), lib)
    if v == "Gaussian":
        if _sign(t) == 0:
            return _ONE
        t = _real(t)
        return _exp(-t * t, lib)
    if v == "TwoSidedExp":
        alpha, beta, c, x0 = p["alpha"], p["beta"], p["c"], p["x0"]
        d = t - x0
        s = _sign(d)
        if s <= 0:
            if beta == math.inf:
                return c if s == 0 else _ZERO
            if s == 0:
                return c
            return _real(c) * _exp(_real(beta) * _real(d), lib)
        if alpha == -math.inf:
            return _ZERO
        return _real(c) * _exp(_real(alpha) * _real(d), lib)
    if v == "MKernel":
        if _sign(t) == 0:
            return _ONE
        a = abs(_real(t))
        return 2 * _exp(-a, lib) - _exp(-2 * a, lib)
    if v == "LambdaAlpha":
        if _sign(t) <= 0:
            return _ZERO
        alpha = _real(p["alpha"])
        t = _real(t)
        om = t * _exp(-t, lib)
        return _exp((alpha - 2) * t, lib) * om ** (alpha - 1) / lib.gamma(alpha)
    raise ValueError(f"not a Toeplitz variant: {v}")


def _base(spec: KernelSpec, x, y):
    structure = spec.structure
    if spec.variant == "Custom":
        if structure == TOEPLITZ:
            return spec.callback(x - y)
        if structure == HANKEL:
            return spec.callback(x + y)
        return spec.callback(x, y)
    if structure == TOEPLITZ:
        return _exactify(_base_toeplitz(spec, x - y))
    if spec.variant == "JKS":
        v = _exactify(1 + x * y)
        return v if v > 0 else _ZERO
    if spec.variant == "HankelRankTwo":
        p = spec.p
        s = _exactify(x + y)
        a0, c0, u0 = p["a0"], p["c0"], p["u0"]
        if is_exact(s) and to_fraction(s).denominator == 1 and all(map(is_exact, (a0, c0, u0))):
            return to_fraction(a0) + to_fraction(c0) * to_fraction(u0) ** int(s)
        if isinstance(s, mpmath.mpf):
            return mpmath.mpf(_real(a0)) + _real(c0) * mpmath.power(_real(u0), s)
        return float(a0) + float(c0) * float(u0) ** float(s)
    raise ValueError(f"unknown variant {spec.variant}")


def power(v, alpha, zero_convention: str = ZERO_TO_ZERO):
    """Entrywise power with the chosen ``0**0`` convention."""
    if v == 0:
        if alpha == 0:
            return _ONE if zero_convention == ZERO_TO_ONE else _ZERO
        return _ZERO
    if v < 0:
        if is_exact(alpha) and to_fraction(alpha).denominator == 1:
            return v ** int(alpha)
        raise DomainError(f"negative base {v} under non-integer power {alpha}")
    if is_exact(alpha) and to_fraction(alpha).denominator == 1:
        return v ** int(alpha)
    if isinstance(alpha, float) and alpha.is_integer() and is_exact(v):
        return v ** int(alpha)
    if isinstance(v, mpmath.mpf) or isinstance(alpha, mpmath.mpf):
        return mpmath.power(to_mpf(v), to_mpf(alpha))
    return float(v) ** float(alpha)


def evaluate(spec: KernelSpec, transforms: Sequence, x, y):
    """Kernel value at ``(x, y)`` after applying the transform stack."""
    return _evaluate(spec, tuple(transforms), x, y)


def _evaluate(spec, transforms, x, y):
    if not transforms:
        return _base(spec, x, y)
    *inner, t = transforms
    if isinstance(t, Power):
        return power(_evaluate(spec, inner, x, y), t.alpha, t.zero_convention)
    if isinstance(t, Shift):
        return _evaluate(spec, inner, x - t.a, y)
    if isinstance(t, ArgScale):
        return _evaluate(spec, inner, t.m * x, t.m * y)
    if isinstance(t, RowColReverse):
        return _evaluate(spec, inner, -x, -y)
    if isinstance(t, DiagScale):
        return t.row_fn(x) * _evaluate(spec, inner, x, y) * t.col_fn(y)
    raise TypeError(f"unknown transform {t!r}")


class IncreasingTuple(tuple):
    """A non-empty tuple of strictly increasing real coordinates."""

    def __new__(cls, coords):
        coords = tuple(c.item() if isinstance(c, np.generic) else c for c in coords)
        if not coords:
            raise StructuralError("an increasing tuple must be non-empty")
        for a, b in zip(coords, coords[1:]):
            if not bool(a < b):
                raise DomainError(f"coordinates must be strictly increasing: {a!r} >= {b!r}")
        return super().__new__(cls, coords)


def sample_matrix(spec: KernelSpec, transforms: Sequence, xs, ys) -> np.ndarray:
    """The matrix ``K[x; y]`` with entries ``K(x_j, y_k)``.

    Returns a float64 array unless every entry is exact (object array of
    Fraction) or some entry is extended precision (object array of mpf).
    """
    xs, ys = IncreasingTuple(xs), IncreasingTuple(ys)
    transforms = tuple(transforms)
    rows = [[_evaluate(spec, transforms, x, y) for y in ys] for x in xs]
    return as_matrix(rows)


# -- factorizations -------------------------------------------------------------

def arctan_factorization(xs, ys, alpha) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of ``K_JKS[x;y]^a = D_u^a T_W[u;v]^a D_v^a`` with ``u = arctan x``.

    The diagonal factors hold ``sec(u_j)`` and ``sec(v_k)``.
    """
    xs = np.asarray([float(v) for v in IncreasingTuple(xs)])
    ys = np.asarray([float(v) for v in IncreasingTuple(ys)])
    lhs = sample_matrix(jks(), [Power(alpha)], xs, ys).astype(float)
    u, v = np.arctan(xs), np.arctan(ys)
    tw = sample_matrix(cosine_w(), [Power(alpha)], u, v).astype(float)
    du = (1.0 / np.cos(u)) ** float(alpha)
    dv = (1.0 / np.cos(v)) ** float(alpha)
    return lhs, du[:, None] * tw * dv[None, :]


def jks_omega_factorization(xs, ys, alpha) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the identity linking powers of Omega to powers of JKS.

    ``lhs = (T_Omega[x;y]^a)^T``. The right side is
    ``D^a K_JKS[y';x']^a D1^a`` with the increasing tuples
    ``y' = (-y_p, ..., -y_1)``, ``x' = (1/x_p, ..., 1/x_1)``,
    ``D = diag(e^{y_p}, ..., e^{y_1})`` and
    ``D1 = diag(x_p e^{-x_p}, ..., x_1 e^{-x_1})``. Because the primed tuples
    run in reverse, that product is returned with rows and columns reversed so
    it lines up entrywise with ``lhs``.
    """
    xs = np.asarray([float(v) for v in IncreasingTuple(xs)])
    ys = np.asarray([float(v) for v in IncreasingTuple(ys)])
    if np.any(xs <= 0):
        raise DomainError("all x coordinates must be positive")
    lhs = sample_matrix(omega(), [Power(alpha)], xs, ys).astype(float).T
    y_rev, x_rev = ys[::-1], xs[::-1]
    core = sample_matrix(jks(), [Power(alpha)], -y_rev, 1.0 / x_rev).astype(float)
    a = float(alpha)
    d = np.exp(y_rev) ** a
    d1 = (x_rev * np.exp(-x_rev)) ** a
    rhs = d[:, None] * core * d1[None, :]
    return lhs, rhs[::-1, ::-1]


# -- JSON -----------------------------------------------------------------------

def _encode(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format_scalar(v)


def _encode_transform(t) -> dict:
    if isinstance(t, Power):
        return {"type": "Power", "alpha": _encode(t.alpha), "zero_convention": t.zero_convention}
    if isinstance(t, Shift):
        return {"type": "Shift", "a": _encode(t.a)}
    if isinstance(t, ArgScale):
        return {"type": "ArgScale", "m": _encode(t.m)}
    if isinstance(t, RowColReverse):
        return {"type": "RowColReverse"}
    raise TypeError(f"{type(t).__name__} carries callables and cannot be serialized")


def _decode_transform(d: dict):
    kind = d["type"]
    if kind == "Power":
        return Power(parse_scalar(d["alpha"]), d.get("zero_convention", ZERO_TO_ZERO))
    if kind == "Shift":
        return Shift(parse_scalar(d["a"]))
    if kind == "ArgScale":
        return ArgScale(parse_scalar(d["m"]))
    if kind == "RowColReverse":
        return RowColReverse()
    raise ValueError(f"unknown transform type {kind!r}")


def to_json(spec: KernelSpec, transforms: Sequence = ()) -> dict:
    """Serialize a kernel; exact parameters become "num/den" strings."""
    if spec.variant == "Custom":
        raise TypeError("custom kernels carry a callback and cannot be serialized")
    return {
        "variant": spec.variant,
        "params": {k: _encode(v) for k, v in spec.params},
        "transforms": [_encode_transform(t) for t in transforms],
    }


_FACTORIES = {
    "Omega": omega,
    "OmegaQR": omega_qr,
    "CosineW": cosine_w,
    "JKS": jks,
    "HankelRankTwo": hankel_rank_two,
    "Heaviside": heaviside,
    "LambdaD": lambda_d,
    "Gaussian": gaussian,
    "TwoSidedExp": two_sided_exp,
    "MKernel": m_kernel,
    "LambdaAlpha": lambda_alpha,
}


def from_json(d: dict) -> tuple[KernelSpec, tuple]:
    variant = d["variant"]
    if variant not in _FACTORIES:
        raise ValueError(f"unknown kernel variant {variant!r}")
    params = {k: parse_scalar(v) for k, v in d.get("params", {}).items()}
    spec = _FACTORIES[variant](**params)
    return spec, tuple(_decode_transform(t) for t in d.get("transforms", []))


def from_name(name: str, **params) -> KernelSpec:
    """Build a spec from its variant name, e.g. ``from_name("OmegaQR", q=1, r=2)``."""
    if name not in _FACTORIES:
        raise ValueError(f"unknown kernel variant {name!r}; choose from {', '.join(VARIANTS)}")
    return _FACTORIES[name](**params)
