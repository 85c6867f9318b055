"""Command-line front end.

Exit codes: 0 success, 2 invalid input (arguments, documents, configs),
3 engine errors (including comparisons with missing method pairs).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

import numpy as np

from . import bench
from .errors import DimensionMismatch, ReachError, SchemaError, UnknownActivation
from .interval import IntervalVector
from .network import (
    RandomNetConfig,
    box_to_dict,
    load_box,
    load_network,
    random_center,
    random_network,
    save_network,
)
from .reach import reach

log = logging.getLogger("mmreach")

EXIT_OK, EXIT_INPUT, EXIT_ENGINE = 0, 2, 3


class InputError(Exception):
    pass


def _range(text: str) -> tuple[int, int]:
    parts = text.replace(":", ",").split(",")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b' or a single integer, got {text!r}") from None
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two bounds, got {text!r}")
    return vals[0], vals[1]


def _emit(text: str, out):
    if out:
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _width_ratio(a: IntervalVector, b: IntervalVector):
    wa, wb = a.width, b.width
    return [float(x / y) if y > 0 else (1.0 if x == 0 else None) for x, y in zip(wa, wb)]


def cmd_reach(args) -> int:
    if not os.path.exists(args.network):
        raise InputError(f"network file not found: {args.network}")
    if not os.path.exists(args.box):
        raise InputError(f"box file not found: {args.box}")
    net = load_network(args.network)
    box = load_box(args.box, args.eps)
    if box.dim != net.n_inputs:
        raise InputError(f"box has dim {box.dim}, network expects {net.n_inputs}")
    methods = ["mm", "ibp"] if args.method == "both" else [args.method]

    results = {}
    for m in methods:
        kw = {"keep_partial": args.keep_partial, "workers": args.workers} if m == "mm" else {}
        results[m] = reach(net, box, m, **kw)

    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["method", "layer", "index", "lo", "hi"])
        for m, res in results.items():
            for layer, b in enumerate(res.per_layer, start=1):
                for i, (lo, hi) in enumerate(zip(b.lo, b.hi)):
                    w.writerow([m, layer, i, repr(float(lo)), repr(float(hi))])
        _emit(buf.getvalue(), args.out)
        return EXIT_OK

    report = {
        "network": args.network,
        "input": box.to_dict(),
        "results": {m: r.to_dict(keep_partial=args.keep_partial) for m, r in results.items()},
    }
    if len(results) == 2:
        report["width_ratio_mm_over_ibp"] = _width_ratio(results["mm"].output, results["ibp"].output)
    _emit(json.dumps(report, indent=2), args.out)
    return EXIT_OK


def _config_from_args(args) -> RandomNetConfig:
    kw = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read config {args.config}: {e}") from e
        preset = doc.pop("preset", "custom")
        for key in ("depth", "n_in", "n_out", "hidden"):
            if key in doc:
                doc[key] = tuple(doc[key])
        kw.update(doc)
    else:
        preset = args.preset
    for key in ("depth", "n_in", "n_out", "hidden", "activation", "eps", "count"):
        val = getattr(args, key, None)
        if val is not None:
            kw[key] = val
    if args.seed is not None:
        kw["base_seed"] = args.seed
    try:
        return RandomNetConfig.from_preset(preset, **kw)
    except TypeError as e:
        raise InputError(f"invalid config: {e}") from e


def cmd_gen(args) -> int:
    cfg = _config_from_args(args)
    os.makedirs(args.out, exist_ok=True)
    for i in range(cfg.count):
        seed = cfg.base_seed + i
        net = random_network(cfg, seed)
        save_network(net, os.path.join(args.out, f"net_{i:04d}.json"),
                     encoding=args.encoding, meta={"seed": seed, "config": cfg.to_dict()})
        center = random_center(net.n_inputs, seed)
        with open(os.path.join(args.out, f"box_{i:04d}.json"), "w") as fh:
            json.dump(box_to_dict(None, center, cfg.eps), fh)
    print(f"wrote {cfg.count} network/box pairs to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _config_from_args(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    records = bench.run_suite(cfg, methods, workers=args.workers)
    prefix = args.out
    if prefix:
        os.makedirs(os.path.dirname(prefix) or ".", exist_ok=True)
        bench.write_csv(records, prefix + ".csv")
    summary = bench.summarize(records)
    if prefix:
        bench.write_summary(summary, prefix + ".json", bench.suite_metadata(cfg, methods))
    if args.format == "structured":
        print(json.dumps(summary.to_dict(), indent=2))
    else:
        print(summary.table())
    return EXIT_OK


def cmd_eval(args) -> int:
    net = load_network(args.network)
    try:
        x = np.array(json.loads(args.point), dtype=float)
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise InputError(f"--point must be a JSON list of numbers: {e}") from e
    try:
        y = net.forward(x, args.from_layer, args.to_layer)
    except DimensionMismatch as e:
        raise InputError(str(e)) from e
    print(json.dumps(y.tolist()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmreach", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def reach_args(sp, default_method):
        sp.add_argument("--network", required=True, metavar="PATH")
        sp.add_argument("--box", required=True, metavar="PATH")
        sp.add_argument("--method", choices=["mm", "ibp", "both"], default=default_method)
        sp.add_argument("--eps", type=float, help="override the box radius around its center")
        sp.add_argument("--keep-partial", action="store_true", help="include every partial-network box")
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--format", choices=["structured", "csv"], default="structured")
        sp.set_defaults(func=cmd_reach)

    reach_args(sub.add_parser("reach", help="bound the output set of a network"), "mm")
    reach_args(sub.add_parser("ibp", help="shorthand for reach --method ibp"), "ibp")

    def suite_args(sp):
        sp.add_argument("--config", metavar="PATH", help="JSON file with RandomNetConfig fields")
        sp.add_argument("--preset", choices=["small", "large", "custom"], default="small")
        sp.add_argument("--depth", type=_range)
        sp.add_argument("--n-in", dest="n_in", type=_range)
        sp.add_argument("--n-out", dest="n_out", type=_range)
        sp.add_argument("--hidden", type=_range)
        sp.add_argument("--activation")
        sp.add_argument("--eps", type=float)
        sp.add_argument("--count", type=int)
        sp.add_argument("--seed", type=int)

    g = sub.add_parser("gen", help="generate random networks and input boxes")
    suite_args(g)
    g.add_argument("--out", required=True, metavar="DIR")
    g.add_argument("--encoding", choices=["decimal", "hex"], default="decimal")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run a random-network comparison suite")
    suite_args(b)
    b.add_argument("--methods", default="mm,ibp")
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--out", metavar="PREFIX", help="write PREFIX.csv and PREFIX.json")
    b.add_argument("--format", choices=["structured", "csv"], default="csv",
                   help="stdout summary: JSON ('structured') or a plain table")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("eval", help="evaluate the network at a point")
    e.add_argument("--network", required=True, metavar="PATH")
    e.add_argument("--point", required=True, help="JSON list, e.g. '[0.1, -0.2]'")
    e.add_argument("--from-layer", type=int, default=1)
    e.add_argument("--to-layer", type=int, default=None)
    e.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, SchemaError, UnknownActivation, OSError) as e:
        code, err = EXIT_INPUT, e
    except ReachError as e:
        code, err = EXIT_ENGINE, e
    except ValueError as e:
        code, err = EXIT_INPUT, e
    print(f"error: {err}", file=sys.stderr)
    return code

if __name__ == "__main__":
    sys.exit(main())
