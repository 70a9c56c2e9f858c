"""Command-line entry point.

    chm run --pipeline {variance|correlation|qntk|all} --family F --encoder {x|y}
            --qubits N --layers L --depths 1..5 --samples S --nx NX --hamming H
            --kcap CAP --seed SEED --threads T --out DIR [--config FILE]
    chm oracle [--out FILE]
    chm circuit dump --family F --encoder {x|y} --qubits N --layers L --depth D

Exit codes: 0 success, 1 validation error, 2 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .pipelines import (
    ConfigError,
    ExperimentConfig,
    dump_circuit,
    load_config,
    run_analytic_suite,
    run_pipelines,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVARIANT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _parse_depths(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in text.split(",") if tok)


def _build_parser() -> _Parser:
    parser = _Parser(prog="chm", description="circuit harmonic matrix experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment pipeline")
    run.add_argument("--pipeline", choices=("variance", "correlation", "qntk", "all"))
    run.add_argument("--family", choices=("yzy-noent", "yzy-ent", "circuit16", "circuit17"))
    run.add_argument("--encoder", choices=("x", "y"))
    run.add_argument("--qubits", type=int, dest="n")
    run.add_argument("--layers", type=int, dest="L")
    run.add_argument("--depths", type=_parse_depths)
    run.add_argument("--samples", type=int)
    run.add_argument("--nx", type=int)
    run.add_argument("--hamming", type=int)
    run.add_argument("--kcap", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int)
    run.add_argument("--out")
    run.add_argument("--mask-threshold", type=float, dest="mask_threshold")
    run.add_argument("--no-saturate-d1", action="store_false", dest="saturate_d1", default=None)
    run.add_argument("--save-cmatrix", action="store_true", dest="save_cmatrix", default=None)
    run.add_argument("--config", help="JSON config file; explicit flags override it")

    oracle = sub.add_parser("oracle", help="run the analytic exact-vs-MC identity suite")
    oracle.add_argument("--samples", type=int, default=50000)
    oracle.add_argument("--out", help="write the oracle report JSON here")

    circuit = sub.add_parser("circuit", help="circuit IR utilities")
    circuit_sub = circuit.add_subparsers(dest="circuit_command", required=True)
    dump = circuit_sub.add_parser("dump", help="emit the circuit JSON document")
    dump.add_argument("--family", required=True,
                      choices=("yzy-noent", "yzy-ent", "circuit16", "circuit17"))
    dump.add_argument("--encoder", default="y", choices=("x", "y"))
    dump.add_argument("--qubits", type=int, required=True)
    dump.add_argument("--layers", type=int, default=1)
    dump.add_argument("--depth", type=int, default=1)
    dump.add_argument("--out", help="output path (stdout when omitted)")
    return parser


def _run_command(args) -> int:
    flag_fields = (
        "pipeline", "family", "encoder", "n", "L", "depths", "samples", "nx",
        "hamming", "kcap", "seed", "threads", "out", "mask_threshold",
        "saturate_d1", "save_cmatrix",
    )
    overrides = {f: getattr(args, f) for f in flag_fields}
    if args.config:
        config = load_config(args.config, overrides)
    else:
        given = {k: v for k, v in overrides.items() if v is not None}
        config = ExperimentConfig.from_dict(given).validated()
    reports = run_pipelines(config)
    for name, report in reports.items():
        depths = report["depths"]
        line = ", ".join(f"d={d['depth']}" for d in depths)
        print(f"{name}: wrote {config.out}/{name}_report.json ({line})")
    return EXIT_OK


def _oracle_command(args) -> int:
    report = run_analytic_suite(samples=args.samples)
    for entry in report["checks"]:
        status = "pass" if entry["passed"] else "FAIL"
        detail = f"  [{entry['detail']}]" if entry["detail"] else ""
        print(f"[{status}] {entry['name']}{detail}")
    if report["runtime_warning"]:
        print(f"warning: oracle suite took {report['elapsed_seconds']:.0f}s (> soft budget)",
              file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=1)
    return EXIT_OK if report["passed"] else EXIT_INVARIANT


def _circuit_command(args) -> int:
    text = dump_circuit(args.family, args.encoder, args.qubits, args.layers, args.depth)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run_command(args)
        if args.command == "oracle":
            return _oracle_command(args)
        if args.command == "circuit":
            return _circuit_command(args)
        raise AssertionError("unreachable")
    except ConfigError as exc:
        print(f"chm: configuration error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, FileNotFoundError) as exc:
        print(f"chm: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AssertionError as exc:
        print(f"chm: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
