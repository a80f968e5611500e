"""Command-line entry point: run, sweep, oracle, validate."""

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import __version__
from .asymptotics import oracle_table
from .params import ConfigError, SweepSpec, config_from_mapping, load_config, load_sweep
from .sweep import FAIL_FRACTION, csv_text, emit, resolve_workers, run_sweep

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_IO = 2
EXIT_CONFIG = 3

log = logging.getLogger("ptfriction")


def _overrides(pairs):
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        out[key] = value
    return out


def _formalisms(choice):
    return ("quantum", "classical") if choice == "both" else (choice,)


def _point_config(args):
    raw = {}
    if args.config:
        from .params import parse_config_text

        with open(args.config) as fh:
            raw = parse_config_text(fh.read())
    raw.update(_overrides(args.set))
    return config_from_mapping(raw, seed=args.seed)


def cmd_run(args):
    cfg = _point_config(args)
    # A single point is a one-value sweep over lambda_bar.
    spec = SweepSpec("lambda-sweep", (cfg.lambda_bar,), cfg, _formalisms(args.formalism))
    result = run_sweep(spec, workers=1, traj=args.traj)
    if args.out:
        for path in emit(result, args.out, stem="point"):
            log.info("wrote %s", path)
    else:
        sys.stdout.write(csv_text(result))
    return EXIT_FAILURES if result.failed_fraction > 0 else EXIT_OK


def cmd_sweep(args):
    if not args.config:
        raise ConfigError("sweep needs --config")
    spec = load_sweep(args.config, seed=args.seed)
    if args.formalism:
        spec = replace(spec, formalisms=_formalisms(args.formalism))
    extra = _overrides(args.set)
    if extra:
        base = config_from_mapping({**{k: str(v) for k, v in spec.base.to_dict().items()}, **extra})
        spec = replace(spec, base=base)
    result = run_sweep(spec, workers=resolve_workers(args.workers), traj=args.traj)
    for path in emit(result, args.out, stem="sweep"):
        log.info("wrote %s", path)
    frac = result.failed_fraction
    if frac > FAIL_FRACTION:
        log.error("%.0f%% of sweep points failed", 100 * frac)
        return EXIT_FAILURES
    return EXIT_OK


def cmd_oracle(args):
    if args.config:
        cfg = load_config(args.config)
        eta, lb, wt = cfg.eta, cfg.lambda_bar, cfg.omega_t
    else:
        if args.eta is None or args.lambda_bar is None:
            raise ConfigError("oracle needs --eta and --lambda-bar, or --config")
        eta, lb, wt = args.eta, args.lambda_bar, args.omega_t
    try:
        table = oracle_table(eta, lb, wt)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    json.dump(table, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_validate(args):
    from .validate import run_all

    checks = run_all()
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILURES


def build_parser():
    p = argparse.ArgumentParser(prog="ptfriction", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formalism_default):
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int, help="base seed for the classical ensembles")
        sp.add_argument("--workers", type=int, help="parallel points (default PT_FRICTION_WORKERS or 1)")
        sp.add_argument("--traj", action="store_true", help="also write per-point trajectories")
        sp.add_argument("--formalism", choices=("quantum", "classical", "both"),
                        default=formalism_default)
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key; repeatable")

    sp = sub.add_parser("run", help="single parameter point")
    common(sp, "both")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="sweep from a config file")
    common(sp, None)
    sp.set_defaults(func=cmd_sweep, out="results")

    sp = sub.add_parser("oracle", help="print closed-form values")
    sp.add_argument("--config")
    sp.add_argument("--eta", type=float)
    sp.add_argument("--lambda-bar", type=float)
    sp.add_argument("--omega-t", type=float, default=100.0)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("validate", help="run the built-in invariant checks")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
