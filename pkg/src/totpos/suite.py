"""Probe orchestration and report assembly.

A probe runs one family of checks and returns a ``ProbeOutcome``: how many
individual predictions it tested and which of them failed. ``run_suite``
executes the probes selected by a ``ProbeConfig`` (optionally on a thread
pool), then assembles a ``ReportDocument`` in declaration order.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from . import __version__
from .errors import ConfigError, DomainError, NumericError, SignConflict, TheoremViolation
from .homotopy import (
    DescartesInstance,
    descartes_zero_count,
    homotopy_delta,
    homotopy_violations,
    piecewise_homotopy,
)
from .kernels import Power, cosine_w, custom, gaussian, jks, m_kernel, omega, omega_qr, sample_matrix, two_sided_exp
from .laplace import (
    closed_form_transform,
    mkernel_power_analysis,
    omega_qr_integer_power_transform,
    quadrature_transform,
    riemann_polynomial,
    riemann_sum_function,
    root_sector_check,
    strip_zero_check,
    transform_function,
)
from .loewner import (
    LoewnerProperty,
    hankel_preserver_test,
    horn_counterexample,
    jain_convexity_test,
    jain_monotonicity_test,
    jain_positivity_test,
)
from .numerics import DEFAULT_PROFILE, EXTENDED_PREC, MODES, ToleranceProfile, as_matrix, det, format_scalar, to_mpf
from .probes import (
    cosine_scale_witness,
    jain_matrix_probe,
    jks_power_matrix,
    largest_minor_characterization_check,
    omega_shift_witness,
    tn3_power_probe,
)
from .tptest import fekete_tp, hankel_tn, minor_scan, observed_signature, predicted_signature

SCHEMA_VERSION = 1
RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence(seed).spawn, one stream per probe"
CONFIRMED = "confirmed"
VIOLATION = "violation"
ERROR = "error"


# -- random instance generators -------------------------------------------------------

def random_increasing(rng: np.random.Generator, n: int, lo: float = -2.0, hi: float = 2.0,
                      denom: int = 20) -> tuple:
    """``n`` distinct sorted rationals ``k / denom`` in ``[lo, hi]``."""
    ks = np.sort(rng.choice(np.arange(math.ceil(lo * denom), math.floor(hi * denom) + 1), n, replace=False))
    return tuple(Fraction(int(k), denom) for k in ks)


def random_admissible_pair(rng: np.random.Generator, n: int, lo: float = -2.0, hi: float = 2.0,
                           denom: int = 20) -> tuple:
    """Increasing rational tuples with every ``1 + x_j y_k > 0``."""
    for _ in range(10_000):
        xs = random_increasing(rng, n, lo, hi, denom)
        ys = random_increasing(rng, n, lo, hi, denom)
        if all(1 + x * y > 0 for x in xs for y in ys):
            return xs, ys
    raise NumericError("could not draw an admissible pair")


def random_tp_builder(rng: np.random.Generator, n: int, kind: str = "gaussian") -> Callable:
    """A TP matrix as ``build(mode) -> array``.

    ``"gaussian"`` samples ``exp(-(x - y)^2)`` on rational increasing tuples
    (no exact form, so the exact request is served in extended precision);
    ``"cauchy"`` gives the exact matrix ``1 / (x_j + y_k)`` with positive
    increasing ``x, y``.
    """
    if kind == "cauchy":
        xs = random_increasing(rng, n, 0.05, 3.0, 20)
        ys = random_increasing(rng, n, 0.05, 3.0, 20)
        m = as_matrix([[1 / (x + y) for y in ys] for x in xs])
        return lambda mode: as_matrix(m, mode)
    if kind != "gaussian":
        raise DomainError(f"unknown TP generator {kind!r}")
    xs = random_increasing(rng, n, -1.5, 1.5, 10)
    ys = random_increasing(rng, n, -1.5, 1.5, 10)

    def build(mode):
        if mode == "float":
            return as_matrix(sample_matrix(gaussian(), [], xs, ys), "float")
        with mpmath.workprec(EXTENDED_PREC):
            return sample_matrix(gaussian(), [], [to_mpf(v) for v in xs], [to_mpf(v) for v in ys])
    return build


def perturbed(rng: np.random.Generator, build: Callable) -> Callable:
    """Scale one entry by a random rational factor in ``[1/4, 4]``, in any mode."""
    n = build("float").shape[0]
    j, k = (int(v) for v in rng.integers(0, n, 2))
    factor = Fraction(int(rng.integers(1, 17)), 4)

    def build2(mode):
        m = build(mode).copy()
        if m.dtype == object and isinstance(m[j, k], mpmath.mpf):
            with mpmath.workprec(EXTENDED_PREC):
                m[j, k] = m[j, k] * to_mpf(factor)
        else:
            m[j, k] = m[j, k] * (factor if m.dtype == object else float(factor))
        return m
    return build2


def random_hankel_moments(rng: np.random.Generator, n: int, perturb: bool = False) -> np.ndarray:
    """Exact Hankel matrix of moments of a positive measure with at most three atoms in ``(0, 2]``.

    With ``perturb`` one moment (a whole anti-diagonal) is scaled, which keeps
    the Hankel structure but usually destroys total nonnegativity.
    """
    atoms = int(rng.integers(1, 4))
    nodes = [Fraction(int(k), 8) for k in rng.choice(np.arange(1, 17), atoms, replace=False)]
    weights = [Fraction(int(k), 8) for k in rng.integers(1, 9, atoms)]
    moments = [sum(w * t ** k for w, t in zip(weights, nodes)) for k in range(2 * n - 1)]
    if perturb:
        k = int(rng.integers(0, 2 * n - 1))
        moments[k] = moments[k] * Fraction(int(rng.integers(1, 13)), 8)
    return as_matrix([[moments[j + k] for k in range(n)] for j in range(n)])


def random_descartes_instance(rng: np.random.Generator, max_n: int = 6,
                              rs=(-1.5, -0.5, 0.5, 1.5, 2.0)) -> DescartesInstance:
    n = int(rng.integers(2, max_n + 1))
    x = rng.choice(np.arange(-30, 31), n, replace=False) / 10
    c = np.round(rng.normal(size=n), 3)
    c[c == 0] = 1.0
    return DescartesInstance(tuple(x), tuple(c), float(rng.choice(rs)))


# -- configuration ----------------------------------------------------------------------

def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


@dataclass(frozen=True)
class Probe:
    name: str
    section: str
    fn: Callable
    params: dict  # name -> (parser, default)


@dataclass
class ProbeOutcome:
    checked: int = 0
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def check(self, ok: bool, **info):
        self.checked += 1
        if not ok:
            self.violations.append(info)


@dataclass(frozen=True)
class ProbeContext:
    rng: np.random.Generator
    mode: str
    profile: ToleranceProfile


PROBES: dict[str, Probe] = {}


def probe(name: str, section: str, **params):
    def register(fn):
        PROBES[name] = Probe(name, section, fn, params)
        return fn
    return register


HARNESS_KEYS = {"mode", "seed", "probes", "out", "format"}
NUMERICS_KEYS = {"abs_eps", "rel_eps", "zero_band"}


@dataclass(frozen=True)
class ProbeConfig:
    mode: str = "float"
    profile: ToleranceProfile = DEFAULT_PROFILE
    seed: int = 0
    probes: tuple = ()
    params: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must be an unsigned 64-bit integer")
        probes = self.probes or tuple(PROBES)
        unknown = [p for p in probes if p not in PROBES]
        if unknown:
            raise ConfigError(f"unknown probe(s): {', '.join(unknown)}")
        if len(set(probes)) != len(probes):
            raise ConfigError("probe list contains duplicates")
        object.__setattr__(self, "probes", tuple(probes))
        resolved = {}
        for name in probes:
            spec = PROBES[name].params
            given = dict(self.params.get(name, {}))
            extra = set(given) - set(spec)
            if extra:
                raise ConfigError(f"unknown parameter(s) for {name}: {', '.join(sorted(extra))}")
            resolved[name] = {k: given.get(k, default) for k, (_, default) in spec.items()}
        object.__setattr__(self, "params", resolved)

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ProbeConfig":
        """Parse the INI-style format: ``[harness]``, ``[numerics]`` and one
        section per module holding ``<probe>.<param> = value`` keys."""
        cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        sections = {p.section for p in PROBES.values()}
        kwargs: dict = {}
        params: dict = {}
        try:
            for sec in cp.sections():
                items = dict(cp.items(sec))
                if sec == "harness":
                    bad = set(items) - HARNESS_KEYS
                    if bad:
                        raise ConfigError(f"unknown key(s) in [harness]: {', '.join(sorted(bad))}")
                    if "mode" in items:
                        kwargs["mode"] = items["mode"].strip()
                    if "seed" in items:
                        kwargs["seed"] = int(items["seed"])
                    if "probes" in items:
                        kwargs["probes"] = tuple(v.strip() for v in items["probes"].split(",") if v.strip())
                    if "out" in items:
                        kwargs["out"] = items["out"].strip() or None
                    if "format" in items:
                        kwargs["format"] = items["format"].strip()
                elif sec == "numerics":
                    bad = set(items) - NUMERICS_KEYS
                    if bad:
                        raise ConfigError(f"unknown key(s) in [numerics]: {', '.join(sorted(bad))}")
                    kwargs["profile"] = ToleranceProfile(**{k: float(v) for k, v in items.items()})
                elif sec in sections:
                    for key, raw in items.items():
                        name, _, param = key.partition(".")
                        pr = PROBES.get(name)
                        if pr is None or pr.section != sec or param not in pr.params:
                            raise ConfigError(f"unknown key {key!r} in [{sec}]")
                        params.setdefault(name, {})[param] = pr.params[param][0](raw)
                else:
                    raise ConfigError(f"unknown section [{sec}]")
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(params=params, **kwargs)

    @classmethod
    def from_file(cls, path: str, **overrides) -> "ProbeConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), **overrides)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "profile": {"abs_eps": self.profile.abs_eps, "rel_eps": self.profile.rel_eps,
                        "zero_band": self.profile.zero_band},
            "seed": self.seed,
            "probes": list(self.probes),
            "params": {k: {p: _jsonable(v) for p, v in ps.items()} for k, ps in self.params.items()},
            "format": self.format,
        }


# -- reports ---------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, Fraction):
        return format_scalar(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, mpmath.mpf)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()] if v.dtype != object else [_jsonable(x) for x in v]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if hasattr(v, "to_dict"):
        return _jsonable(v.to_dict())
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


@dataclass(frozen=True)
class ProbeReport:
    name: str
    module: str
    status: str
    checked: int
    violations: tuple
    details: dict
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "module": self.module,
            "status": self.status,
            "checked": self.checked,
            "violations": _jsonable(list(self.violations)),
            "details": _jsonable(self.details),
            "error": self.error,
        }


@dataclass(frozen=True)
class ReportDocument:
    config: ProbeConfig
    probes: tuple
    timestamp: str

    @property
    def summary(self) -> dict:
        counts = {CONFIRMED: 0, VIOLATION: 0, ERROR: 0}
        for p in self.probes:
            counts[p.status] += 1
        return {"confirmed": counts[CONFIRMED], "violations": counts[VIOLATION], "errors": counts[ERROR]}

    @property
    def exit_code(self) -> int:
        s = self.summary
        return 0 if s["violations"] == 0 and s["errors"] == 0 else 1

    def to_dict(self, with_timestamp: bool = True) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "tool": "totpos",
            "version": __version__,
            "config": self.config.to_dict(),
            "rng": RNG_ALGORITHM,
            "summary": self.summary,
            "probes": [p.to_dict() for p in self.probes],
        }
        if with_timestamp:
            d = {"timestamp": self.timestamp, **d}
        return d

    def to_json(self, with_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(with_timestamp), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "module", "status", "checked", "violations", "error"])
        for p in self.probes:
            w.writerow([p.name, p.module, p.status, p.checked, len(p.violations), p.error or ""])
        return buf.getvalue()

    def render(self) -> str:
        return self.to_json() if self.config.format == "json" else self.to_csv()


def worker_count() -> int:
    raw = os.environ.get("TOTPOS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"TOTPOS_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def _run_one(pr: Probe, params: dict, ctx: ProbeContext) -> ProbeReport:
    try:
        out = pr.fn(params, ctx)
    except TheoremViolation as exc:
        return ProbeReport(pr.name, pr.section, VIOLATION, 1, ({"message": str(exc), "report": exc.report},), {})
    except Exception as exc:  # collected, never fatal
        return ProbeReport(pr.name, pr.section, ERROR, 0, (), {}, f"{type(exc).__name__}: {exc}")
    status = VIOLATION if out.violations else CONFIRMED
    return ProbeReport(pr.name, pr.section, status, out.checked, tuple(out.violations), out.details)


def run_suite(config: ProbeConfig, threads: int | None = None) -> ReportDocument:
    """Run the selected probes; results keep the configured order."""
    streams = np.random.SeedSequence(config.seed).spawn(len(config.probes))
    jobs = []
    for name, ss in zip(config.probes, streams):
        ctx = ProbeContext(np.random.Generator(np.random.PCG64(ss)), config.mode, config.profile)
        jobs.append((PROBES[name], config.params[name], ctx))
    threads = worker_count() if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda j: _run_one(*j), jobs))
    else:
        reports = [_run_one(*j) for j in jobs]
    stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return ReportDocument(config, tuple(reports), stamp)


# -- the probes -------------------------------------------------------------------------

def jks_sample_matrices() -> dict:
    """The two explicit JKS samples with negative determinants.

    ``x = y = (-2, -1, 1, 2) / sqrt(2)`` gives entries ``1 + a_j a_k / 2``; the
    same matrix arises from the rational tuples ``a`` and ``a / 2``.
    """
    a = (-2, -1, 1, 2)
    m4 = sample_matrix(jks(), [], a, [Fraction(v, 2) for v in a])
    m3 = sample_matrix(jks(), [Power(0)], (-1, 0, 1), (-1, 0, 1))
    return {"jks_4x4": m4, "jks_alpha0_3x3": m3}


@probe("jks_det", "kernels")
def _probe_jks_det(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    ms = jks_sample_matrices()
    d4, d3 = det(ms["jks_4x4"]), det(ms["jks_alpha0_3x3"])
    out.check(d4 == -2, check="4x4 determinant equals -2", value=d4)
    out.check(d3 < 0, check="alpha = 0 3x3 determinant is negative", value=d3)
    out.details = {
        "jks_4x4": {"matrix": ms["jks_4x4"], "determinant": d4},
        "jks_alpha0_3x3": {"matrix": ms["jks_alpha0_3x3"], "determinant": d3},
    }
    return out


@probe("trichotomy", "probes", pairs=(int, 10), orders=(_ints, (2, 3, 4, 5)))
def _probe_trichotomy(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    modes: dict = {}
    for p in params["orders"]:
        tp = [a for a in (p - 1.5, p - 1, p + 0.3) if a > p - 2]
        ranks = list(range(0, p - 1))
        negs = [k + 0.5 for k in range(0, p - 2)]
        for _ in range(params["pairs"]):
            xs, ys = random_admissible_pair(ctx.rng, p)
            for alpha in tp + ranks + negs:
                rep = jain_matrix_probe(xs, ys, alpha, ctx.profile)
                modes[rep.mode] = modes.get(rep.mode, 0) + 1
                out.check(rep.agrees, p=p, alpha=alpha, xs=xs, ys=ys, report=rep.to_dict())
    out.details = {"modes": modes}
    return out


def _non_integers_below(limit):
    return [k + 0.5 for k in range(0, math.ceil(limit)) if k + 0.5 < limit]


@probe("witnesses", "probes", points=(int, 8), orders=(_ints, (3, 4, 5)))
def _probe_witnesses(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    X = list(range(1, params["points"] + 1))
    found = {}
    for p in params["orders"]:
        alphas = _non_integers_below(p - 2)
        for label, fn in (("omega_shift", omega_shift_witness), ("cosine_scale", cosine_scale_witness)):
            try:
                rep = fn(X, X, p, alphas, profile=ctx.profile)
                found[f"{label}_p{p}"] = rep
                out.check(set(rep.witnesses) == set(alphas), p=p, kind=label)
            except TheoremViolation as exc:
                out.check(False, p=p, kind=label, message=str(exc))
    out.details = found
    return out


@probe("signature", "tptest", instances=(int, 40), max_n=(int, 5),
       alphas=(_floats, (0.5, 1.0, 1.5, 2.0, 2.5, 3.7)))
def _probe_signature(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    escalated = 0
    for _ in range(params["instances"]):
        n = int(ctx.rng.integers(2, params["max_n"] + 1))
        alpha = float(ctx.rng.choice(params["alphas"]))
        xs, ys = random_admissible_pair(ctx.rng, n)
        sig, mode = observed_signature_escalating(xs, ys, alpha, ctx.profile, ctx.mode)
        escalated += mode != ctx.mode
        pred = predicted_signature(n, alpha)
        out.check(sig == pred, n=n, alpha=alpha, xs=xs, ys=ys, observed=sig.signs, predicted=pred.signs)
    out.details = {"escalated": escalated}
    return out


def observed_signature_escalating(xs, ys, alpha, profile=DEFAULT_PROFILE, mode: str = "float"):
    """Observed signature of ``(1 + x_j y_k)^alpha``; reruns exactly (integer
    ``alpha``) or in extended precision when a float minor sits in the zero band."""
    integer = float(alpha).is_integer()
    if mode == "exact" and integer:
        return observed_signature(jks_power_matrix(xs, ys, int(alpha), "exact"), profile), "exact"
    if mode != "extended":
        try:
            sig = observed_signature(jks_power_matrix(xs, ys, alpha, "float"), profile)
            if not sig.tolerance_limited:
                return sig, "float"
        except SignConflict:
            pass
    if integer:
        return observed_signature(jks_power_matrix(xs, ys, int(alpha), "exact"), profile), "exact"
    return observed_signature(jks_power_matrix(xs, ys, alpha, "extended"), profile), "extended"


def _compare(ctx, build, p, a, b, out, verdict, **info):
    """Run both testers; tolerance-limited results are redone exactly when
    the matrix has an exact form, otherwise in extended precision."""
    mode = ctx.mode
    mm = build(mode)
    ra, rb = a(mm, p, ctx.profile), b(mm, p, ctx.profile)
    if mode != "exact" and (ra.tolerance_limited or rb.tolerance_limited):
        mode = "exact"
        mm = build(mode)
        ra, rb = a(mm, p, ctx.profile), b(mm, p, ctx.profile)
    out.check(verdict(ra) == verdict(rb), first=ra.to_dict(), second=rb.to_dict(), **info)
    return rb.status, mode != ctx.mode


@probe("fekete", "tptest", matrices=(int, 100), max_order=(int, 6))
def _probe_fekete(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    statuses: dict = {}
    escalated = 0
    for i in range(params["matrices"]):
        n = int(ctx.rng.integers(2, params["max_order"] + 1))
        build = random_tp_builder(ctx.rng, n, "gaussian" if i % 4 < 2 else "cauchy")
        if i % 2:
            build = perturbed(ctx.rng, build)
        s, esc = _compare(ctx, build, n, fekete_tp, minor_scan, out, lambda r: r.is_tp, n=n)
        statuses[s.value] = statuses.get(s.value, 0) + 1
        escalated += esc
    out.details = {"statuses": statuses, "escalated": escalated}
    return out


@probe("hankel", "tptest", matrices=(int, 50), max_order=(int, 6))
def _probe_hankel(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    statuses: dict = {}
    escalated = 0
    for i in range(params["matrices"]):
        n = int(ctx.rng.integers(2, params["max_order"] + 1))
        m = random_hankel_moments(ctx.rng, n, perturb=bool(i % 2))
        s, esc = _compare(ctx, lambda mode: as_matrix(m, mode), n, hankel_tn, minor_scan, out,
                          lambda r: r.is_tn, n=n)
        statuses[s.value] = statuses.get(s.value, 0) + 1
        escalated += esc
    out.details = {"statuses": statuses, "escalated": escalated}
    return out


@probe("homotopy", "homotopy", instances=(int, 50))
def _probe_homotopy(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    r61 = math.sqrt(61)
    v = homotopy_violations((-8.5, 0.1), (1, 2), 1.0)
    (lo, hi), = v.intervals[(0, 1)]
    out.check(abs(lo - (8 - r61) / 19) <= 1e-12 and abs(hi - (8 + r61) / 19) <= 1e-12,
              check="endpoints (8 -+ sqrt 61)/19", interval=[lo, hi])
    out.check(lo <= 0.01 and hi >= 0.8321, check="contains [0.01, 0.8321]", interval=[lo, hi])
    w = homotopy_violations((-199, 0), (1, 2), 1.0)
    (lo2, hi2), = w.intervals[(0, 1)]
    out.check(lo2 <= 0.0026 and hi2 >= 0.9924, check="contains [0.0026, 0.9924]", interval=[lo2, hi2])
    delta = homotopy_delta((-199, 0), (1, 2))
    out.check(abs(delta - 1 / 398) <= 1e-15, check="delta = 1/398", delta=delta)
    out.check(homotopy_violations((-199, 0), (1, 2), delta).empty, check="no violations at delta")
    for xs, ys, ps, qs in (((1, 2), (1, 2), (1, 2), (1, 2)), ((-0.5, 0.5), (-1, 1), (1, 2), (1, 2)),
                           ((-3, -2), (0.1, 0.3), (1, 2), (1, 2))):
        path = piecewise_homotopy(xs, ys, ps, qs)
        out.check(path.certified, check="piecewise path certified", xs=xs, ys=ys)
    # Random instances: moving to delta * y must stay admissible.
    for _ in range(params["instances"]):
        n = int(ctx.rng.integers(2, 5))
        ys = tuple(np.sort(ctx.rng.choice(np.arange(1, 40), n, replace=False)) / 10)
        while True:
            xs = tuple(np.sort(ctx.rng.choice(np.arange(-40, 40), n, replace=False)) / 10)
            if all(1 + a * b > 0 for i, a in enumerate(xs) for b in xs[i + 1:]):
                break
        d = homotopy_delta(xs, ys)
        out.check(homotopy_violations(xs, ys, d, np.linspace(0, 1, 2001)).empty, xs=xs, ys=ys, delta=d)
    out.details = {"interval_8_5": [lo, hi], "interval_199": [lo2, hi2], "delta_199": delta}
    return out


@probe("descartes", "homotopy", instances=(int, 100), max_n=(int, 6))
def _probe_descartes(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    worst = 0
    for _ in range(params["instances"]):
        inst = random_descartes_instance(ctx.rng, params["max_n"])
        res = descartes_zero_count(inst)
        bound = min(res.sign_changes, len(inst.x) - 1)
        worst = max(worst, res.zero_count - bound)
        out.check(res.zero_count <= bound, instance={"x": inst.x, "c": inst.c, "r": inst.r}, result=res.to_dict())
    out.details = {"max_excess": worst}
    return out


@probe("tn3", "probes", alphas=(_floats, (0.0, 0.25, 0.5, 0.75, 0.99, 1.0, 2.0)))
def _probe_tn3(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    dets = {}
    for alpha in params["alphas"]:
        r = tn3_power_probe(alpha)
        if alpha >= 1:
            out.check(r.preserves, alpha=alpha)
        else:
            out.check(not r.preserves and r.determinant < 0, alpha=alpha, determinant=r.determinant)
            dets[str(alpha)] = r.determinant
    out.details = {"determinants": dets}
    return out


@probe("largest_minor", "probes", samples=(int, 200))
def _probe_largest_minor(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    cases = (
        ("two_sided_exp", two_sided_exp(0.5, 2, 1, 0), 3, "consistent"),
        ("omega", omega(), 4, "consistent"),
        ("gaussian", gaussian(), 3, "consistent"),
        ("exponential", custom(lambda t: math.exp(0.3 * t), name="exp"), 3, "exempt_exponential"),
    )
    reports = {}
    for label, spec, p, expected in cases:
        seed = int(ctx.rng.integers(0, 2 ** 31))
        r = largest_minor_characterization_check(spec, (), p, samples_per_order=params["samples"], seed=seed,
                                                 profile=ctx.profile)
        reports[label] = r
        out.check(r.verdict == expected, kernel=label, verdict=r.verdict, expected=expected)
    out.details = reports
    return out


@probe("loewner", "loewner", orders=(_ints, (3, 4)), step=(Fraction, Fraction(1, 10)))
def _probe_loewner(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    tests = {LoewnerProperty.POSITIVITY: jain_positivity_test,
             LoewnerProperty.MONOTONICITY: jain_monotonicity_test,
             LoewnerProperty.CONVEXITY: jain_convexity_test}
    flips = {}
    step = Fraction(params["step"])
    for n in params["orders"]:
        xs = tuple(range(1, n + 1))
        k_max = int((n + 2) / step)
        for prop, fn in tests.items():
            verdicts = []
            for k in range(k_max + 1):
                alpha = float(k * step)
                r = fn(xs, alpha, profile=ctx.profile)
                verdicts.append(r.verdict)
                out.check(r.agrees, n=n, property=prop.value, alpha=alpha, report=r.to_dict())
            last_violation = max((float(k * step) for k, v in enumerate(verdicts) if v == "violated"), default=None)
            flips[f"{prop.value}_n{n}"] = last_violation
    out.details = {"last_violated_alpha": flips}
    return out


@probe("horn", "loewner", orders=(_ints, (3, 4, 5)))
def _probe_horn(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    found = {}
    for n in params["orders"]:
        for alpha in _non_integers_below(n - 2):
            try:
                r = horn_counterexample(n, alpha)
                found[f"n{n}_alpha{alpha}"] = r
                out.check(r.value < 0, n=n, alpha=alpha)
            except NumericError as exc:
                out.check(False, n=n, alpha=alpha, message=str(exc))
    out.details = found
    return out


@probe("hankel_preserver", "loewner")
def _probe_hankel_preserver(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    r1 = hankel_preserver_test([1, 1, 1], 3, profile=ctx.profile)
    out.check(r1.preserved, check="1 + x + x^2 preserves TN_3")
    r2 = hankel_preserver_test([1, 1, 0, 1, 1], 2, search_index=2, profile=ctx.profile)
    c = r2.critical_coefficient
    out.check(c is not None and c < 0, check="critical coefficient is negative", value=c)
    if c is not None and c < 0:
        inside = hankel_preserver_test([1, 1, c / 2, 1, 1], 2, profile=ctx.profile)
        beyond = hankel_preserver_test([1, 1, 2 * c, 1, 1], 2, search_index=None, profile=ctx.profile)
        out.check(inside.preserved, check="preserved between the critical value and 0")
        out.check(not beyond.preserved, check="violated beyond the critical value")
    out.details = {"polynomial": r1, "search": r2}
    return out


@probe("laplace_zeros", "laplace", alphas=(_floats, (0.5, 1.0, 2.0, 3.5)), grid=(int, 101))
def _probe_laplace_zeros(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    g = params["grid"]
    reports = {}
    for alpha in params["alphas"]:
        h = alpha + 2
        r = strip_zero_check(transform_function(cosine_w(), alpha), h - 1e-6, box=(-5, 5, -(h + 1), h + 1),
                             grid=(g, g), profile=ctx.profile, label=f"W^{alpha}")
        reports[f"W^{alpha}"] = r
        err = max((abs(abs(z.imag) - h) + abs(z.real) for z in r.zeros), default=math.inf)
        out.check(r.zero_free and len(r.zeros) == 2 and err <= 1e-8, alpha=alpha, zeros=r.zeros, error=err)
    r = strip_zero_check(transform_function(cosine_w(), 1), 3 - 1e-6, grid=(g, g), profile=ctx.profile, label="W")
    reports["W_strip"] = r
    out.check(r.zero_free, check="B{W} zero-free in |Im s| < 3 - 1e-6", zeros=r.zeros)
    out.details = reports
    return out


@probe("sector", "laplace", orders=(_ints, (5, 10, 20, 40, 80)))
def _probe_sector(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    ms = params["orders"]
    re, im = np.meshgrid(np.linspace(-3, 3, 13), np.linspace(-3, 3, 13))
    s = (re + 1j * im).ravel()
    s = s[np.abs(s) <= 3]
    quad = np.array([quadrature_transform(cosine_w(), z).value for z in s])
    errors, args = {}, {}
    for m in ms:
        chk = root_sector_check(riemann_polynomial(cosine_w(), math.pi, m), 3 * math.pi / (m + 2), ctx.profile)
        args[m] = chk.min_abs_arg
        out.check(chk.zero_free, m=m, min_abs_arg=chk.min_abs_arg, theta=chk.theta)
        errors[m] = float(np.max(np.abs(riemann_sum_function(cosine_w(), math.pi, m)(s) - quad)))
    c = min(ms) * errors[min(ms)]
    for m in ms:
        out.check(m * errors[m] <= c * (1 + 1e-9), m=m, error=errors[m], constant=c)
    out.details = {"min_abs_arg": args, "riemann_error": errors, "constant": c}
    return out


@probe("transforms", "laplace")
def _probe_transforms(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    b_omega = closed_form_transform(omega(), 0).value
    b_m = closed_form_transform(m_kernel(), 0).value
    out.check(b_omega == 1, check="B{Omega}(0) = 1", value=b_omega)
    out.check(b_m == 3, check="B{M}(0) = 3", value=b_m)
    qr = omega_qr_integer_power_transform(1, 2, 2)
    direct = quadrature_transform(omega_qr(1, 2), 0, [Power(2)])
    out.check(qr.value(0) == Fraction(1, 3), check="f/g at 0 is 1/3", value=qr.value(0))
    out.check(abs(direct.value - 1 / 3) <= 1e-12, check="direct integral is 1/3", value=direct.value)
    agree = []
    for spec, alpha in ((omega(), 1), (omega_qr(1, 2), 1), (omega_qr(1, 2), 2), (m_kernel(), 1),
                        (cosine_w(), 0), (cosine_w(), 1), (cosine_w(), 2), (cosine_w(), 3.5)):
        for z in (0.3, 0.5 + 1j, 2.5j, -0.4 + 2j):
            cf = closed_form_transform(spec, z, alpha)
            qd = quadrature_transform(spec, z, [Power(alpha)] if alpha != 1 else [])
            diff = abs(complex(cf.value) - qd.value)
            agree.append(diff)
            out.check(diff <= cf.error_bound + qd.error_bound, kernel=spec.variant, alpha=alpha, s=z, diff=diff)
    out.details = {"omega_qr_squared": qr, "largest_difference": max(agree)}
    return out


@probe("mkernel", "laplace", max_n=(int, 3))
def _probe_mkernel(params, ctx) -> ProbeOutcome:
    out = ProbeOutcome()
    reports = {}
    for n in range(1, params["max_n"] + 1):
        r = mkernel_power_analysis(n)
        reports[n] = r
        if n == 1:
            out.check(r.pf, n=n)
        else:
            out.check(not r.pf and all(v != 0 for v in r.p_values.values()) and r.ratio > 1, n=n)
    out.details = reports
    return out


# -- matrix dumps -----------------------------------------------------------------------

def render_matrix(matrix: np.ndarray, fmt: str = "csv") -> str:
    """CSV with 17 significant digits ('.' separator, locale independent), or
    JSON with exact entries as "num/den" strings."""
    if fmt == "json":
        return json.dumps({"rows": matrix.shape[0], "cols": matrix.shape[1],
                           "entries": [[format_scalar(v) for v in row] for row in matrix]}) + "\n"
    if fmt != "csv":
        raise DomainError(f"format must be json or csv, got {fmt!r}")
    lines = []
    for row in matrix:
        cells = []
        for v in row:
            f = float(v)
            cells.append(str(int(f)) if f.is_integer() and abs(f) < 2 ** 53 else format(f, ".17g"))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit_matrix(spec, transforms, xs, ys, fmt: str = "csv", out: str | None = None) -> str:
    """Sample ``spec`` (with ``transforms``) on ``xs x ys`` and write it to ``out``.

    Returns the rendered text; I/O errors propagate.
    """
    text = render_matrix(sample_matrix(spec, transforms, xs, ys), fmt)
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
