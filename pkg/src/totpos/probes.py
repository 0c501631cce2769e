"""Critical-exponent probes.

Entrywise powers ``(1 + x_j y_k)^alpha`` of the rank-two JKS sample are TP
above ``p - 2``, TN of rank ``alpha + 1`` at the integers ``0..p-2``, and not
TN at the non-integers below ``p - 2``. The probes here check that trichotomy
directly, transport it to shifted Omega kernels and rescaled cosine kernels,
and test the largest-minor characterization of TN_p Toeplitz kernels.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import DomainError, TheoremViolation
from .kernels import (
    ArgScale,
    IncreasingTuple,
    KernelSpec,
    Power,
    Shift,
    cosine_w,
    evaluate,
    jks,
    omega,
    sample_matrix,
    to_json,
)
from .numerics import (
    DEFAULT_PROFILE,
    EXTENDED_PREC,
    EXTENDED_PROFILE,
    ToleranceProfile,
    batch_det,
    det,
    format_scalar,
    is_exact,
    rank,
    to_mpf,
)
from .tptest import TPClassification, TPStatus, minor_scan


class PowerClass(str, enum.Enum):
    TP = "TP"
    TN_RANK = "TN_rank"
    NOT_TN = "NotTN"


@dataclass(frozen=True)
class PowerPrediction:
    kind: PowerClass
    rank: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "rank": self.rank}


def _is_int(alpha) -> bool:
    return float(alpha).is_integer()


def classify_power(p: int, alpha) -> PowerPrediction:
    """Predicted class of ``(1 + x_j y_k)^alpha`` restricted to order ``p``."""
    if p < 2:
        raise ValueError("p must be at least 2")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha > p - 2:
        return PowerPrediction(PowerClass.TP)
    if _is_int(alpha):
        return PowerPrediction(PowerClass.TN_RANK, int(alpha) + 1)
    return PowerPrediction(PowerClass.NOT_TN)


@dataclass(frozen=True)
class PowerProbeReport:
    kernel: KernelSpec
    p: int
    alpha: object
    classification: TPClassification
    predicted: PowerPrediction
    rank: int | None = None
    constant: dict = field(default_factory=dict)
    mode: str = "float"

    @property
    def agrees(self) -> bool:
        kind = self.predicted.kind
        status = self.classification.status
        if kind is PowerClass.TP:
            return status is TPStatus.TP
        if kind is PowerClass.TN_RANK:
            return self.classification.is_tn and self.rank == self.predicted.rank
        return status is TPStatus.NOT_TN

    def to_dict(self) -> dict:
        return {
            "kernel": to_json(self.kernel),
            "p": self.p,
            "alpha": format_scalar(self.alpha),
            "constant": {k: format_scalar(v) for k, v in self.constant.items()},
            "classification": self.classification.to_dict(),
            "predicted": self.predicted.to_dict(),
            "rank": self.rank,
            "mode": self.mode,
            "agrees": self.agrees,
        }


def jks_power_matrix(xs, ys, alpha, mode: str = "auto"):
    """``(1 + x_j y_k)^alpha`` in the requested scalar mode.

    ``auto`` is exact when coordinates and ``alpha`` are exact integers or
    rationals with integral ``alpha``, and float otherwise.
    """
    xs, ys = IncreasingTuple(xs), IncreasingTuple(ys)
    exact_ok = all(map(is_exact, (*xs, *ys))) and _is_int(alpha)
    if mode == "auto":
        mode = "exact" if exact_ok else "float"
    if mode == "exact":
        if not exact_ok:
            raise DomainError("exact mode needs rational coordinates and an integer exponent")
        return sample_matrix(jks(), [Power(int(alpha))], xs, ys)
    if mode == "float":
        m = sample_matrix(jks(), [Power(float(alpha))], [float(v) for v in xs], [float(v) for v in ys])
        return np.asarray(m, dtype=float)
    if mode == "extended":
        with mpmath.workprec(EXTENDED_PREC):
            a = alpha if _is_int(alpha) and is_exact(alpha) else to_mpf(alpha)
            return sample_matrix(jks(), [Power(a)], [to_mpf(v) for v in xs], [to_mpf(v) for v in ys])
    raise ValueError(f"unknown mode {mode!r}")


def scan_with_escalation(build, p: int, profile: ToleranceProfile = DEFAULT_PROFILE):
    """Run ``minor_scan`` on ``build(mode)``; if the float verdict depended on
    the zero band, redo it in extended precision.

    Returns ``(classification, matrix, mode)``.
    """
    m = build("auto")
    mode = "exact" if m.dtype == object else "float"
    cls = minor_scan(m, p, profile)
    if cls.tolerance_limited:
        m = build("extended")
        mode = "extended"
        cls = minor_scan(m, p, EXTENDED_PROFILE)
    return cls, m, mode


def jain_matrix_probe(xs, ys, alpha, profile: ToleranceProfile = DEFAULT_PROFILE) -> PowerProbeReport:
    """Compare the computed class of ``(1 + x_j y_k)^alpha`` with the prediction."""
    xs, ys = IncreasingTuple(xs), IncreasingTuple(ys)
    if len(xs) != len(ys):
        raise DomainError("x and y must have the same length")
    if any(1 + x * y <= 0 for x in xs for y in ys):
        raise DomainError("need 1 + x_j y_k > 0 for all j, k")
    p = len(xs)
    cls, m, mode = scan_with_escalation(lambda md: jks_power_matrix(xs, ys, alpha, md), p, profile)
    r = None
    if _is_int(alpha):
        r = rank(m, profile if mode == "float" else EXTENDED_PROFILE)
        if all(map(is_exact, (*xs, *ys))) and mode != "exact":
            exact_rank = rank(jks_power_matrix(xs, ys, alpha, "exact"))
            if exact_rank != r:
                raise TheoremViolation(f"float rank {r} disagrees with exact rank {exact_rank}")
    return PowerProbeReport(jks(), p, alpha, cls, classify_power(p, alpha), r, mode=mode)


# -- witnesses for shifted and rescaled kernels ---------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    kernel: KernelSpec
    p: int
    constant_name: str
    constant: float
    rows: tuple
    cols: tuple
    witnesses: dict

    def to_dict(self) -> dict:
        return {
            "kernel": to_json(self.kernel),
            "p": self.p,
            self.constant_name: self.constant,
            "rows": list(self.rows),
            "cols": list(self.cols),
            "witnesses": {str(a): w.to_dict() for a, w in self.witnesses.items()},
        }


def _check_alphas(p, alphas):
    alphas = list(alphas)
    if not alphas:
        raise DomainError("need at least one exponent")
    for a in alphas:
        if not (0 < a < p - 2) or _is_int(a):
            raise DomainError(f"alpha={a} must be a non-integer in (0, {p - 2})")
    return alphas


def _negative_witness(spec, transforms_for, xs, ys, p, profile):
    def build(mode):
        if mode == "extended":
            with mpmath.workprec(EXTENDED_PREC):
                return sample_matrix(spec, transforms_for(mode), [to_mpf(v) for v in xs], [to_mpf(v) for v in ys])
        return np.asarray(sample_matrix(spec, transforms_for(mode), xs, ys), dtype=float)

    cls, _, _ = scan_with_escalation(build, p, profile)
    if cls.status is not TPStatus.NOT_TN:
        raise TheoremViolation(f"no negative minor found ({cls.status.value})", cls.to_dict())
    return cls.witness


def omega_shift_witness(X, Y, p: int, alphas, variant: KernelSpec | None = None,
                        profile: ToleranceProfile = DEFAULT_PROFILE) -> WitnessReport:
    """One shift ``a`` making every ``Omega(x - y - a)^alpha`` fail TN_p on X x Y.

    The first ``p`` points of X and the last ``p`` of Y are used, with
    ``a = x_1 - y_p - 1``, so every sampled argument exceeds 1.
    """
    variant = omega() if variant is None else variant
    if variant.variant not in ("Omega", "OmegaQR"):
        raise DomainError("variant must be Omega or OmegaQR")
    alphas = _check_alphas(p, alphas)
    X, Y = sorted(set(X)), sorted(set(Y))
    if len(X) < p or len(Y) < p:
        raise DomainError(f"X and Y need at least p={p} points")
    xs, ys = X[:p], Y[-p:]
    a = xs[0] - ys[-1] - 1
    out = {}
    for alpha in alphas:
        out[alpha] = _negative_witness(
            variant, lambda mode, al=alpha: [Shift(a), Power(to_mpf(al) if mode == "extended" else al)],
            xs, ys, p, profile,
        )
    return WitnessReport(variant, p, "a", a, tuple(xs), tuple(ys), out)


def cosine_scale_witness(X, Y, p: int, alphas, profile: ToleranceProfile = DEFAULT_PROFILE) -> WitnessReport:
    """One scale ``m`` making every ``W(m (x - y))^alpha`` fail TN_p on X x Y.

    Uses the first ``p`` points of each set and ``m = (pi/5) / max|coord|``,
    which keeps every ``|m x|`` below ``pi/4``.
    """
    alphas = _check_alphas(p, alphas)
    X, Y = sorted(set(X)), sorted(set(Y))
    if len(X) < p or len(Y) < p:
        raise DomainError(f"X and Y need at least p={p} points")
    xs, ys = X[:p], Y[:p]
    biggest = max(abs(v) for v in (*xs, *ys))
    if biggest == 0:
        raise DomainError("coordinates must not all vanish")
    m = (math.pi / 5) / biggest
    out = {}
    for alpha in alphas:
        def transforms(mode, al=alpha):
            if mode == "extended":
                return [ArgScale((mpmath.pi / 5) / biggest), Power(to_mpf(al))]
            return [ArgScale(m), Power(al)]
        out[alpha] = _negative_witness(cosine_w(), transforms, xs, ys, p, profile)
    return WitnessReport(cosine_w(), p, "m", m, tuple(xs), tuple(ys), out)


# -- largest-minor characterization ---------------------------------------------------

@dataclass(frozen=True)
class LargestMinorReport:
    kernel: dict | None
    p: int
    verdict: str  # consistent | premise_failed | violation | exempt_exponential
    decay_satisfied: bool
    min_minor_by_order: dict
    negative_by_order: dict
    samples_per_order: int
    t_star: float

    @property
    def violation(self) -> bool:
        return self.verdict == "violation"

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "p": self.p,
            "verdict": self.verdict,
            "decay_satisfied": self.decay_satisfied,
            "min_minor_by_order": {str(k): v for k, v in self.min_minor_by_order.items()},
            "negative_by_order": {str(k): v for k, v in self.negative_by_order.items()},
            "samples_per_order": self.samples_per_order,
            "t_star": self.t_star,
        }


def _profile_fn(spec, transforms):
    return lambda t: float(evaluate(spec, transforms, t, 0.0))


def _is_exponential(values: np.ndarray) -> bool:
    if np.any(values <= 0):
        return False
    logs = np.log(values)
    second = logs[2:] - 2 * logs[1:-1] + logs[:-2]
    return bool(np.all(np.abs(second) <= 1e-9 * np.maximum(1.0, np.abs(logs).max())))


def largest_minor_characterization_check(spec: KernelSpec, transforms=(), p: int = 3, window=None,
                                         samples_per_order: int = 400, seed: int = 0,
                                         profile: ToleranceProfile = DEFAULT_PROFILE) -> LargestMinorReport:
    """Sampled check that nonnegative p x p minors plus decay give TN_p.

    Random increasing tuples are drawn from the window grid for every order
    ``1..p``. If no sampled p x p minor is negative and the decay product
    ``Lambda(x0 - y) Lambda(t* + y - y0)`` falls below ``1e-8 Lambda(t*)^2``
    for some ``y`` beyond the window (for every anchor pair), a negative
    lower-order minor is a violation. Exponentials ``c e^{ax}`` are the
    exempt branch: all their minors of order >= 2 vanish.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    grid = np.arange(-6.0, 6.0 + 1e-9, 0.5) if window is None else np.asarray(window, dtype=float)
    grid = np.asarray(IncreasingTuple(grid))
    lam = _profile_fn(spec, tuple(transforms))
    span = grid[-1] - grid[0]
    diffs = np.linspace(-span, span, 4 * len(grid) + 1)
    lam_d = np.array([lam(t) for t in diffs])
    t_star = float(diffs[int(np.argmax(lam_d))])
    peak = float(lam_d.max())
    kernel = to_json(spec, transforms) if spec.variant != "Custom" else None

    K = np.array([[lam(x - y) for y in grid] for x in grid])
    rng = np.random.default_rng(seed)
    n = len(grid)
    mins, negs = {}, {}
    for r in range(1, p + 1):
        rows = np.sort(np.array([rng.choice(n, r, replace=False) for _ in range(samples_per_order)]), axis=1)
        cols = np.sort(np.array([rng.choice(n, r, replace=False) for _ in range(samples_per_order)]), axis=1)
        sub = K[rows[:, :, None], cols[:, None, :]]
        vals, mags = batch_det(sub)
        thresh = np.maximum(profile.abs_eps, profile.zero_band * mags)
        negs[r] = int(np.sum(vals < -thresh))
        mins[r] = float(vals.min())

    if _is_exponential(lam_d):
        verdict = "exempt_exponential" if all(negs[r] == 0 for r in negs) and all(
            abs(mins[r]) <= 1e-9 * peak ** r for r in range(2, p + 1)) else "violation"
        return LargestMinorReport(kernel, p, verdict, False, mins, negs, samples_per_order, t_star)

    anchors = [grid[0], grid[len(grid) // 2], grid[-1]]
    decay = True
    for x0 in anchors:
        for y0 in anchors:
            ys = grid[-1] + span * np.arange(1, 401) / 4
            prod = np.array([lam(x0 - y) * lam(t_star + y - y0) for y in ys])
            if not np.any(prod < 1e-8 * peak * peak):
                decay = False
    if negs[p] > 0 or not decay:
        verdict = "premise_failed"
    elif any(negs[r] > 0 for r in range(1, p)):
        verdict = "violation"
    else:
        verdict = "consistent"
    return LargestMinorReport(kernel, p, verdict, decay, mins, negs, samples_per_order, t_star)


# -- TN_3 powers -------------------------------------------------------------------------

@dataclass(frozen=True)
class Tn3ProbeResult:
    alpha: float
    preserves: bool
    points: tuple | None = None
    matrix: np.ndarray | None = None
    determinant: float | None = None

    def to_dict(self) -> dict:
        return {
            "alpha": format_scalar(self.alpha),
            "preserves": self.preserves,
            "points": None if self.points is None else list(self.points),
            "matrix": None if self.matrix is None else [[format_scalar(v) for v in row] for row in self.matrix],
            "determinant": None if self.determinant is None else format_scalar(self.determinant),
        }


def tn3_power_probe(alpha) -> Tn3ProbeResult:
    """Whether ``x -> x^alpha`` keeps TN_3 functions TN_3.

    It does for ``alpha >= 1``. Below 1, the cosine kernel on
    ``(-pi/4, 0, pi/4)`` gives a 3 x 3 matrix whose power has negative
    determinant (``0^0 = 0``).
    """
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    if alpha >= 1:
        return Tn3ProbeResult(alpha, True)
    pts = (-math.pi / 4, 0.0, math.pi / 4)
    m = sample_matrix(cosine_w(), [Power(alpha)], pts, pts)
    d = det(m)
    if not d < 0:
        raise TheoremViolation(f"expected a negative determinant, got {d}")
    return Tn3ProbeResult(alpha, False, pts, m, d)
