"""Command-line entry point: ``totpos <subcommand> [options]``.

Exit status is 0 when every check confirmed, 1 when a violation or probe
error was reported, and 2 for usage errors (bad flags, malformed config).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import ConfigError, TotposError
from .homotopy import homotopy_delta, homotopy_violations
from .kernels import Power, from_name
from .laplace import closed_form_transform, quadrature_transform
from .numerics import MODES, parse_scalar
from .suite import ProbeConfig, emit_matrix, observed_signature_escalating, run_suite, _jsonable
from .tptest import predicted_signature

SUITES = {
    "fekete-compare": ("fekete", "hankel"),
    "homotopy": ("homotopy", "descartes"),
    "laplace": ("laplace_zeros", "sector", "transforms", "mkernel"),
    "signature": ("signature",),
}


def _tuple(text: str) -> tuple:
    try:
        return tuple(parse_scalar(v.strip()) for v in text.split(",") if v.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


def _scalar(text: str):
    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI-style configuration file")
    p.add_argument("--seed", type=_u64, help="random seed (unsigned 64-bit)")
    p.add_argument("--mode", choices=MODES, help="scalar mode")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="report format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="totpos", description="Total-positivity verification probes.")
    ap.add_argument("--version", action="version", version=f"totpos {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", help="run the probe suite")
    _common(p)
    p.add_argument("--probes", help="comma-separated probe names (default: all)")

    p = sub.add_parser("signature", help="signature law: one instance or the random suite")
    _common(p)
    p.add_argument("--x", type=_tuple, help="increasing x tuple, e.g. -1,0,1/2")
    p.add_argument("--y", type=_tuple, help="increasing y tuple")
    p.add_argument("--alpha", type=float, help="entrywise power")

    p = sub.add_parser("fekete-compare", help="Fekete and Hankel testers against the full minor scan")
    _common(p)

    p = sub.add_parser("homotopy", help="admissibility along the homotopy: one instance or the suite")
    _common(p)
    p.add_argument("--x", type=_tuple, help="two-element x tuple")
    p.add_argument("--y", type=_tuple, help="increasing positive y tuple")
    p.add_argument("--epsilon", type=float, help="endpoint factor (default: the safe delta)")

    p = sub.add_parser("laplace", help="transform checks: one value or the suite")
    _common(p)
    p.add_argument("--kernel", help="kernel variant, e.g. CosineW")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="kernel parameter")
    p.add_argument("--alpha", type=_scalar, default=1, help="entrywise power (default 1)")
    p.add_argument("--s", type=complex, default=0j, help="evaluation point, e.g. 0.5+1j")

    p = sub.add_parser("emit", help="dump a sampled kernel matrix")
    p.add_argument("kernel", help="kernel variant, e.g. JKS")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="kernel parameter")
    p.add_argument("--power", type=_scalar, help="apply an entrywise power")
    p.add_argument("--x", type=_tuple, required=True)
    p.add_argument("--y", type=_tuple, required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    return ap


def _params(pairs) -> dict:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        out[key.strip()] = parse_scalar(value.strip())
    return out


def _config(args, probes=None) -> ProbeConfig:
    overrides = dict(seed=args.seed, mode=args.mode, out=args.out, format=args.format, probes=probes)
    if args.config:
        return ProbeConfig.from_file(args.config, **overrides)
    return ProbeConfig(**{k: v for k, v in overrides.items() if v is not None})


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _run(config: ProbeConfig) -> int:
    doc = run_suite(config)
    _write(doc.render(), config.out)
    s = doc.summary
    print(f"confirmed={s['confirmed']} violations={s['violations']} errors={s['errors']}", file=sys.stderr)
    return doc.exit_code


def _single(result: dict, ok: bool, out: str | None) -> int:
    _write(json.dumps(_jsonable(result), indent=2), out)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "emit":
            spec = from_name(args.kernel, **_params(args.param))
            transforms = [Power(args.power)] if args.power is not None else []
            text = emit_matrix(spec, transforms, args.x, args.y, args.format, args.out)
            if not args.out:
                sys.stdout.write(text)
            return 0
        if args.command == "probe":
            probes = tuple(v.strip() for v in args.probes.split(",")) if args.probes else None
            return _run(_config(args, probes))
        if args.command == "signature" and args.x is not None:
            if args.y is None or args.alpha is None:
                parser.error("signature needs --x, --y and --alpha together")
            sig, mode = observed_signature_escalating(args.x, args.y, args.alpha, mode=args.mode or "float")
            pred = predicted_signature(len(args.x), args.alpha)
            return _single({"observed": sig.signs, "predicted": pred.signs, "mode": mode}, sig == pred, args.out)
        if args.command == "homotopy" and args.x is not None:
            if args.y is None:
                parser.error("homotopy needs --x and --y together")
            delta = homotopy_delta(args.x, args.y)
            eps = args.epsilon if args.epsilon is not None else delta
            v = homotopy_violations(args.x, args.y, eps)
            intervals = {f"{j},{k}": iv for (j, k), iv in v.intervals.items()}
            return _single({"delta": delta, "epsilon": eps, "intervals": intervals}, v.empty, args.out)
        if args.command == "laplace" and args.kernel:
            spec = from_name(args.kernel, **_params(args.param))
            s = args.s.real if args.s.imag == 0 else args.s
            try:
                tv = closed_form_transform(spec, s, args.alpha)
            except TotposError:
                tv = quadrature_transform(spec, s, [Power(args.alpha)] if args.alpha != 1 else [])
            return _single(tv.to_dict(), True, args.out)
        return _run(_config(args, SUITES.get(args.command)))
    except ConfigError as exc:
        print(f"totpos: configuration error: {exc}", file=sys.stderr)
        return 2
    except (TotposError, ValueError) as exc:
        print(f"totpos: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
