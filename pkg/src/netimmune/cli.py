"""Command-line entry point.

    netimmune run --config FILE --seed N --out PREFIX [--replicates N] [--parallel]
    netimmune sweep --config FILE --param SECTION.KEY --values A,B,... --seed N --out PREFIX
    netimmune validate --config FILE
    netimmune oracle match --a HEX --b HEX --r N

Exit status: 0 success, 1 invalid configuration or usage, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from netimmune.config import ConfigError, parse_config
from netimmune.engine import run_replicates
from netimmune.metrics import write_outputs
from netimmune.oracle import hex_to_bits, naive_match

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit value, got {text}")
    return value


def build_parser():
    p = _Parser(prog="netimmune", description="Seeded network-immunity simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=_u64)
    r.add_argument("--out", required=True, help="output prefix; writes <out>.csv and <out>.json")
    r.add_argument("--replicates", type=int)
    r.add_argument("--parallel", action="store_true")
    r.add_argument("--workers", type=int)
    r.add_argument("--dump-topology", metavar="PATH", help="write the edge list, one 'u v' per line")

    s = sub.add_parser("sweep", help="run one scenario per value of a setting")
    s.add_argument("--config", required=True)
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True, help="comma separated")
    s.add_argument("--seed", type=_u64)
    s.add_argument("--out", required=True)
    s.add_argument("--parallel", action="store_true")

    v = sub.add_parser("validate", help="check a configuration file")
    v.add_argument("--config", required=True)

    o = sub.add_parser("oracle", help="reference computations")
    osub = o.add_subparsers(dest="oracle", required=True, parser_class=_Parser)
    m = osub.add_parser("match", help="naive r-contiguous match of two hex signatures")
    m.add_argument("--a", required=True)
    m.add_argument("--b", required=True)
    m.add_argument("--r", required=True, type=int)
    return p


def _load(path, seed=None):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read: {exc.strerror or exc}"]) from exc
    cfg = parse_config(text)
    if seed is not None:
        cfg = cfg.replace(**{"run.seed": seed})
    return cfg


def _replicate_prefix(out, i, n):
    return out if n == 1 else f"{out}_rep{i:03d}"


def cmd_run(args):
    cfg = _load(args.config, args.seed)
    if args.replicates is not None:
        if args.replicates < 1:
            raise ConfigError([f"--replicates must be >= 1, got {args.replicates}"])
        cfg = cfg.replace(**{"run.replicates": args.replicates})
    n = cfg.run.replicates
    if args.dump_topology:
        from netimmune.engine import World
        Path(args.dump_topology).write_text(World(cfg).topo.dump(), encoding="utf-8")
    results = run_replicates(cfg, n, parallel=args.parallel, workers=args.workers)
    for res in results:
        csv_path, json_path = write_outputs(res.timeseries, res.summary,
                                            _replicate_prefix(args.out, res.replicate, n))
        print(f"replicate {res.replicate}: {res.summary.status}, auc {res.summary.prevalence_auc} -> {csv_path.name}")
    return EXIT_OK


def cmd_sweep(args):
    base = _load(args.config, args.seed)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError(["--values: need at least one value"])
    configs = []
    errors = []
    for v in values:
        try:
            configs.append(base.replace(**{args.param: v}))
        except ConfigError as exc:
            errors.extend(f"{args.param}={v}: {e}" for e in exc.errors)
    if errors:
        raise ConfigError(errors)
    entries = []
    for i, (v, cfg) in enumerate(zip(values, configs)):
        res = run_replicates(cfg, 1, parallel=False)[0]
        prefix = f"{args.out}_{i:03d}"
        csv_path, json_path = write_outputs(res.timeseries, res.summary, prefix)
        entries.append({"index": i, "value": v, "csv": csv_path.name, "json": json_path.name,
                        "status": res.summary.status, "prevalence_auc": res.summary.prevalence_auc})
        print(f"{args.param}={v}: {res.summary.status}, auc {res.summary.prevalence_auc}")
    index = {"param": args.param, "seed": base.run.seed, "runs": entries}
    index_path = Path(f"{args.out}_index.json")
    try:
        index_path.write_text(json.dumps(index, indent=2) + "\n", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {index_path}: {exc}") from exc
    return EXIT_OK


def cmd_validate(args):
    cfg = _load(args.config)
    print(f"{args.config}: ok ({', '.join(cfg.defense.architectures) or 'no defenses'})")
    return EXIT_OK


def cmd_oracle(args):
    try:
        a, b = hex_to_bits(args.a), hex_to_bits(args.b)
        if len(a) != len(b):
            raise ValueError(f"--a has {len(a)} bits but --b has {len(b)}")
        if not 1 <= args.r <= len(a):
            raise ValueError(f"--r must be in [1, {len(a)}]")
    except ValueError as exc:
        raise UsageError(f"netimmune oracle match: error: {exc}") from exc
    print("true" if naive_match(a, b, args.r) else "false")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "validate": cmd_validate, "oracle": cmd_oracle}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure during a run is a runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
