"""Command-line front end.

Exit codes: 0 success, 1 usage error (including exhausted safety limits),
2 invalid configuration, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from contextlib import contextmanager

from . import analysis, fastfix, harness
from .errors import (
    ConfigurationSyntaxError,
    DivergenceError,
    GraphExplosionError,
    InvariantViolation,
    UnsupportedModeError,
)
from .model import IPM, SPM, Configuration, run_to_fixpoint_naive, trajectory

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3

_TOKEN = re.compile(r"\d+")


def parse_configuration(text: str) -> Configuration:
    """Non-negative integers separated by commas and/or whitespace."""
    body = text.strip()
    if not body:
        return Configuration(())
    tokens = re.split(r"\s*,\s*|\s+", body)
    heights = []
    for tok in tokens:
        if not tok:
            raise ConfigurationSyntaxError(f"empty entry in {text!r}")
        if tok.startswith("-") and _TOKEN.fullmatch(tok[1:]):
            raise ConfigurationSyntaxError(f"negative height {tok}")
        if not _TOKEN.fullmatch(tok):
            raise ConfigurationSyntaxError(f"not a non-negative integer: {tok!r}")
        heights.append(int(tok))
    return Configuration(tuple(heights))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _model_args(p):
    p.add_argument("--model", choices=("spm", "ipm"), default="spm")
    p.add_argument("--k", type=int, default=None, help="plateau bound for ipm")


def _input_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help='configuration, e.g. "3,2,2,1"')
    src.add_argument("--file", help="file holding the configuration")


def _output_args(p, formats):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sandfix", description="Fixed points of one-dimensional sandpiles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="naive simulation")
    _model_args(p)
    _input_args(p)
    _output_args(p, ("plain", "json"))
    p.add_argument("--mode", choices=("seq", "par"), default="seq")
    p.add_argument("--trajectory", action="store_true", help="print every configuration")
    p.add_argument("--max-steps", type=int, default=10_000_000)

    p = sub.add_parser("fixpoint", help="compute a fixed point")
    _model_args(p)
    _input_args(p)
    _output_args(p, ("plain", "json"))
    p.add_argument("--algo", choices=("naive", "fast", "merge"), default="merge")
    p.add_argument("--mode", choices=("seq", "par"), default="seq", help="naive only")
    p.add_argument("--max-steps", type=int, default=10_000_000)

    p = sub.add_parser("orbit", help="build the orbit graph")
    _model_args(p)
    _input_args(p)
    _output_args(p, ("plain", "dot", "json"))
    p.add_argument("--mode", choices=("seq", "par"), default="seq")
    p.add_argument("--check-lattice", action="store_true")
    p.add_argument("--max-vertices", type=int, default=100_000)

    p = sub.add_parser("gen", help="generate a configuration")
    _output_args(p, ("plain", "json"))
    p.add_argument("--kind", choices=tuple(harness.GENERATORS), default="single")
    p.add_argument("--n", type=int, default=0, help="grains (single, comb) or max height (random)")
    p.add_argument("--l", type=int, default=50, help="length (random)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="time fast algorithms against naive simulation")
    _output_args(p, ("csv",))
    p.add_argument("--generators", default="single,comb,random")
    p.add_argument("--sizes", default="1000,10000")
    p.add_argument("--algos", default=",".join(harness.ALGORITHMS))
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--l", type=int, default=50, help="length for the random generator")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratio-out", help="also write naive/fast-merge speedups here")
    return parser


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _model(args):
    if args.model == "ipm":
        if args.k is None or args.k < 1:
            raise UsageError("--model ipm needs --k >= 1")
        return IPM(args.k)
    if args.k is not None:
        raise UsageError("--k only applies to --model ipm")
    return SPM


def _read_configuration(args) -> Configuration:
    if args.file is not None:
        with open(args.file) as fh:
            return parse_configuration(fh.read())
    return parse_configuration(args.input)


def _fixpoint(args, out):
    model = _model(args)
    c = _read_configuration(args)
    if args.algo == "naive":
        fp, steps = run_to_fixpoint_naive(c, model, args.mode, args.max_steps)
        result = {"fixpoint": list(fp.canonical()), "transient": steps, "iterations": steps, "merges": 0}
    else:
        if model.kind != "spm":
            raise UsageError(f"--algo {args.algo} only supports spm")
        if args.algo == "fast":
            r = fastfix.run_fast_general(c)
        else:
            r = fastfix.run_fast_spm(c)
        result = {"fixpoint": list(r.fixpoint), "transient": r.transient, "iterations": r.iterations, "merges": r.merges}
    if args.format == "json":
        print(json.dumps(result), file=out)
    else:
        print(f"fixpoint: {','.join(map(str, result['fixpoint']))}", file=out)
        transient = "n/a" if result["transient"] is None else result["transient"]
        print(f"transient: {transient}", file=out)
        print(f"iterations: {result['iterations']}", file=out)
        print(f"merges: {result['merges']}", file=out)


def _simulate(args, out):
    model = _model(args)
    c = _read_configuration(args)
    if args.trajectory:
        states = [list(s.canonical()) for s in trajectory(c, model, args.mode, args.max_steps)]
        if args.format == "json":
            print(json.dumps({"trajectory": states, "steps": len(states) - 1}), file=out)
        else:
            for s in states:
                print(",".join(map(str, s)), file=out)
        return
    fp, steps = run_to_fixpoint_naive(c, model, args.mode, args.max_steps)
    if args.format == "json":
        print(json.dumps({"fixpoint": list(fp.canonical()), "steps": steps}), file=out)
    else:
        print(f"fixpoint: {fp.canonical()}", file=out)
        print(f"steps: {steps}", file=out)


def _orbit(args, out):
    model = _model(args)
    c = _read_configuration(args)
    g = analysis.build_orbit_graph(c, model, args.mode, args.max_vertices)
    if args.check_lattice:
        lines = [f"lattice: {str(analysis.is_lattice(g)).lower()}; vertices: {len(g.vertices)}"]
    else:
        lines = [f"vertices: {len(g.vertices)}"]
    lines.append(f"edges: {len(g.edges)}")
    root = g.root
    if model.kind == "spm" and args.mode == "seq" and len(root) <= 1:
        same = set(g.vertices) == analysis.reachable_set(root.n)
        lines.append(f"characterization: {str(same).lower()}")
    else:
        lines.append("characterization: n/a")
    sinks = g.sinks()
    lines.append("fixpoints: " + " | ".join(str(s) for s in sinks))
    if args.format == "dot":
        out.write(g.to_dot())
        report = sys.stderr if out is sys.stdout else sys.stdout
        for line in lines:
            print(line, file=report)
    elif args.format == "json":
        index = {v: i for i, v in enumerate(g.vertices)}
        payload = {
            "vertices": [list(v) for v in g.vertices],
            "edges": sorted([index[u], index[v]] for u, v in g.edges),
            "summary": lines,
        }
        print(json.dumps(payload), file=out)
    else:
        for line in lines:
            print(line, file=out)


def _gen(args, out):
    c = harness.GENERATORS[args.kind](args.n, seed=args.seed, l=args.l)
    if args.format == "json":
        print(json.dumps(list(c)), file=out)
    else:
        print(str(c), file=out)


def _bench(args, out):
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}")
    gens = [g for g in args.generators.split(",") if g]
    algos = [a for a in args.algos.split(",") if a]
    for g in gens:
        if g not in harness.GENERATORS:
            raise UsageError(f"unknown generator {g!r}")
    for a in algos:
        if a not in harness.ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    configs = [(g, harness.GENERATORS[g](n, seed=args.seed, l=args.l)) for g in gens for n in sizes]
    records = harness.bench_compare(configs, algos, args.repetitions)
    harness.write_csv(records, out)
    if args.ratio_out:
        with open(args.ratio_out, "w") as fh:
            harness.write_ratio_csv(harness.speedups(records), fh)


COMMANDS = {"fixpoint": _fixpoint, "simulate": _simulate, "orbit": _orbit, "gen": _gen, "bench": _bench}


def dispatch(args: argparse.Namespace) -> int:
    try:
        with _sink(args.out) as out:
            COMMANDS[args.command](args, out)
    except ConfigurationSyntaxError as exc:
        print(f"sandfix: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UsageError, UnsupportedModeError, DivergenceError, GraphExplosionError, OSError) as exc:
        print(f"sandfix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"sandfix: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
