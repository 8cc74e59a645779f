"""``loclab`` command line: sweep, locfunc, classify, check."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import oracle
from .sweep import (ConfigError, atomic_write, classify_point, curve_to_csv, load_config, locfunc_curve,
                    run_sweep, _json_default)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_ORACLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI recipe; flags override its values")
    p.add_argument("--model", choices=("ssh", "aa_free", "aa_interacting"))
    p.add_argument("--n", type=int, help="number of sites N")
    p.add_argument("--filling", type=int, help="particle number M (default N/2)")
    p.add_argument("--boundary", choices=("periodic", "open"))
    p.add_argument("--delta", help="a:b:step, comma list, or single value")
    p.add_argument("--v", help="interaction grid (aa_interacting)")
    p.add_argument("--J", type=float, dest="J")
    beta = p.add_mutually_exclusive_group()
    beta.add_argument("--beta", help="quasi-periodic wavenumber (float or p/q)")
    beta.add_argument("--beta-rational", dest="beta_rational", help="rational approximant p/q")
    p.add_argument("--phase", type=float)
    p.add_argument("--out", help="output path (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loclab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="indicator sweep over the parameter grid")
    _model_options(sw)
    sw.add_argument("--indicators", help="comma list from r,rc,mi,lf")
    sw.add_argument("--format", choices=("csv", "json"))
    sw.add_argument("--jobs", type=int, help="concurrent grid points (default: all cores)")
    sw.add_argument("--full-sf", dest="full_sf", action="store_true", default=None,
                    help="also build the full C_pq and record the identity residual")

    lf = sub.add_parser("locfunc", help="localization function curve at one model point")
    _model_options(lf)

    cl = sub.add_parser("classify", help="extended / localized / dimerized verdict")
    _model_options(cl)

    ck = sub.add_parser("check", help="oracle comparisons")
    ck.add_argument("suite", choices=(*oracle.SUITES, "all"))
    ck.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED)
    ck.add_argument("--instances", type=int, default=50)
    ck.add_argument("--out")
    return parser


def _overrides(args) -> dict:
    keys = ("model", "n", "filling", "boundary", "delta", "v", "J", "phase", "out", "indicators", "format",
            "jobs", "full_sf")
    out = {k: getattr(args, k, None) for k in keys}
    out["beta"] = args.beta_rational or args.beta
    return out


def _emit(text: str, path) -> None:
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _single_point(cfg):
    if len(cfg.delta) != 1 or (cfg.model == "aa_interacting" and len(cfg.v) != 1):
        raise ConfigError("locfunc/classify take a single model point (one delta, one V)")
    return cfg.delta[0], cfg.v[0] if cfg.model == "aa_interacting" else 0.0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            reports = oracle.run_suite(args.suite, seed=args.seed, instances=args.instances)
            payload = {"suite": args.suite, "passed": all(r.passed for r in reports),
                       "reports": [r.to_dict() for r in reports]}
            _emit(json.dumps(payload, indent=2, default=_json_default) + "\n", args.out)
            return EXIT_OK if payload["passed"] else EXIT_ORACLE

        cfg = load_config(args.config, _overrides(args))
        if args.command == "sweep":
            result = run_sweep(cfg)
            if cfg.fmt == "json":
                _emit(result.to_json() + "\n", cfg.out)
            else:
                _emit(result.to_csv(), cfg.out)
                if cfg.out:
                    # metadata (timing, solver diagnostics) lives beside the CSV
                    atomic_write(Path(cfg.out).with_suffix(".json"), result.to_json() + "\n")
            return EXIT_NUMERICAL if result.failed else EXIT_OK
        delta, v = _single_point(cfg)
        if args.command == "locfunc":
            _emit(curve_to_csv(locfunc_curve(cfg, delta, v)), cfg.out)
        else:
            verdict = classify_point(cfg, delta, v)
            _emit(json.dumps(verdict, indent=2, default=_json_default) + "\n", cfg.out)
        return EXIT_OK
    except ConfigError as exc:
        print(f"loclab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"loclab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
