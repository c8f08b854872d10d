"""``hmmtrend`` command-line interface.

Exit codes: 0 success, 1 input/usage error, 2 numeric or validation error.
Option precedence: command-line flag > ``--config`` JSON file > default.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HmmError, InputError
from .generator import RngSpec, generate
from .inference import baum_welch_train, viterbi_decode
from .market import (
    BINNING_MODES,
    PAIRINGS,
    ZERO_POLICIES,
    BinningSpec,
    estimate,
    ingest_csv,
    joint_transition_table,
    label_series,
    read_labeled_csv,
)
from .model import (
    DEFAULT_STATES,
    DEFAULT_SYMBOLS,
    DEFAULT_TOLERANCE,
    HmmModel,
    load_model,
    model_to_dict,
    save_model,
)
from .stationary import METHODS
from .trend import find_optimum_sequence, fitness_table, trend_report

SEED_ENV = "HMMTREND_SEED"


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, output: str | None):
    data = text.encode("utf-8")
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _matrix_text(title, row_names, col_names, matrix) -> str:
    cols = [str(c) for c in col_names]
    rw = max(len(r) for r in row_names)
    cw = max(6, *(len(c) for c in cols))
    lines = [title, " " * rw + "  " + "  ".join(f"{c:>{cw}}" for c in cols)]
    for name, row in zip(row_names, matrix):
        lines.append(f"{name:<{rw}}  " + "  ".join(f"{x:>{cw}.2f}" for x in row))
    return "\n".join(lines) + "\n"


def _load_model(args) -> HmmModel:
    return load_model(_read(args.model), args.tolerance)


def _read_symbols(args, model: HmmModel) -> np.ndarray:
    if args.symbols and args.symbols_file:
        raise UsageError("give either --symbols or --symbols-file, not both")
    if args.symbols:
        labels = [s.strip() for s in args.symbols.replace(" ", ",").split(",") if s.strip()]
        return np.array([model.symbol_index(s) for s in labels], dtype=np.int64)
    if args.symbols_file:
        _, symbols, _ = read_labeled_csv(_read(args.symbols_file), symbols=model.symbols)
        return symbols
    raise UsageError("one of --symbols or --symbols-file is required")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return RngSpec.fresh().seed


# -- subcommands ---------------------------------------------------------------


def _binning(args) -> BinningSpec:
    thresholds = _floats(args.thresholds) if args.thresholds else None
    return BinningSpec(args.binning, thresholds, args.zero_policy)


def cmd_ingest(args) -> str:
    series = ingest_csv(_read(args.input), headerless=args.headerless)
    labeled = label_series(series, args.k, _binning(args))
    if labeled.zero_count:
        print(f"warning: {labeled.zero_count} zero difference(s) mapped by {args.zero_policy}",
              file=sys.stderr)
    if args.format == "json":
        rows = [
            {"date": lab, "diff": float(d), "symbol": DEFAULT_SYMBOLS[m], "state": DEFAULT_STATES[s]}
            for lab, d, m, s in zip(
                labeled.diffs.labels, labeled.diffs.values, labeled.symbols, labeled.states
            )
        ]
        return _json({"k": args.k, "rows": rows, "zero_count": labeled.zero_count})
    if args.format == "text":
        lines = [f"{'date':<12}  {'diff':>8}  sym  state"]
        for lab, d, m, s in zip(labeled.diffs.labels, labeled.diffs.values, labeled.symbols, labeled.states):
            lines.append(f"{lab:<12}  {d:>8.2f}  {DEFAULT_SYMBOLS[m]:>3}  {DEFAULT_STATES[s]}")
        return "\n".join(lines) + "\n"
    return labeled.to_csv()


def _estimate_doc(states, symbols, args) -> tuple[dict, HmmModel, np.ndarray]:
    counts, model = estimate(states, symbols, alpha=args.alpha, pairing=args.pairing)
    for w in counts.warnings:
        print(f"warning: {w}", file=sys.stderr)
    joint = joint_transition_table(model, counts)
    doc = model_to_dict(model)
    doc["meta"] = {
        "counts": counts.to_dict(),
        "joint_table": joint.reshape(model.n_states, -1).tolist(),
        "joint_columns": [f"{s}/{m}" for s in model.states for m in model.symbols],
    }
    return doc, model, joint


def cmd_estimate(args) -> str:
    _, symbols, states = read_labeled_csv(_read(args.input))
    doc, model, joint = _estimate_doc(states, symbols, args)
    if args.format == "text":
        short = [f"S{i + 1}" for i in range(model.n_states)]
        cols = [f"{s}{m}" for s in short for m in model.symbols]
        return (
            _matrix_text("transition", short, short, model.transition)
            + "\n" + _matrix_text("emission", short, model.symbols, model.emission)
            + "\n" + _matrix_text("joint transition/emission", short, cols,
                                  joint.reshape(model.n_states, -1))
        )
    return _json(doc)


def _report_text_or_json(report, args) -> str:
    if args.format == "text":
        return report.to_text()
    if args.format == "csv":
        out = io.StringIO()
        out.write("state,probability,percentage\n")
        for r in report.rows:
            out.write(f"{r.state},{r.probability!r},{r.percentage!r}\n")
        return out.getvalue()
    return _json(report.to_dict())


def cmd_stationary(args) -> str:
    model = _load_model(args)
    report = trend_report(
        model, args.label or Path(args.model).stem,
        method=args.method, max_iter=args.max_iter, residual_tol=args.residual_tol,
    )
    return _report_text_or_json(report, args)


def cmd_generate(args) -> str:
    model = _load_model(args)
    seed = _seed(args)
    print(f"seed: {seed}", file=sys.stderr)
    if args.trials > 1:
        result = find_optimum_sequence(model, args.length, args.trials, seed, args.include_start)
        doc = result.path.to_dict(model)
        doc["trials"] = args.trials
        doc["log_probability"] = result.log_probability
    else:
        path = generate(model, args.length, RngSpec(seed), args.include_start)
        doc = path.to_dict(model)
    if args.format == "text":
        return f"sequence: {' -> '.join(doc['symbols'])}\nstates  : {' '.join(doc['states'])}\n"
    return json.dumps(doc, ensure_ascii=False) + "\n"


def cmd_decode(args) -> str:
    model = _load_model(args)
    obs = _read_symbols(args, model)
    path, logp = viterbi_decode(model, obs)
    doc = {"states": [model.states[s] for s in path], "log_probability": logp}
    if args.format == "text":
        return f"states: {' '.join(doc['states'])}\nlog probability: {logp:.2f}\n"
    return _json(doc)


def cmd_train(args) -> str:
    model = _load_model(args)
    obs = _read_symbols(args, model)
    result = baum_welch_train(model, obs, args.max_iter, args.tol, args.floor)
    if args.format == "text":
        lines = [f"iteration {i}: {ll:.6f}" for i, ll in enumerate(result.trace)]
        lines.append(f"converged: {result.converged}")
        return "\n".join(lines) + "\n" + save_model(result.model).decode("utf-8")
    return _json({
        "model": model_to_dict(result.model),
        "trace": result.trace,
        "converged": result.converged,
    })


def _load_paths(data: bytes):
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed paths document: {exc}") from None
    reference = None
    if isinstance(doc, dict):
        reference = doc.get("reference_sums")
        doc = doc.get("sequences", doc.get("paths"))
    if not isinstance(doc, list):
        raise InputError("paths document must be a list or hold 'sequences'")
    labels, seqs = [], []
    for i, entry in enumerate(doc):
        if isinstance(entry, dict):
            states = entry.get("states")
            labels.append(str(entry.get("label", i + 1)))
        else:
            states = entry
            labels.append(str(i + 1))
        if isinstance(states, str):
            states = states.split()
        if not isinstance(states, list):
            raise InputError(f"sequence {i + 1}: 'states' must be a list or a string")
        seqs.append([str(s) for s in states])
    if reference is not None:
        try:
            reference = {str(k): float(v) for k, v in reference.items()}
        except (AttributeError, TypeError, ValueError):
            raise InputError("'reference_sums' must map labels to numbers") from None
    return labels, seqs, reference


def cmd_fitness(args) -> str:
    labels, seqs, reference = _load_paths(_read(args.paths))
    result = fitness_table(seqs, labels, reference)
    for row in result.rows:
        if row.diverges:
            print(
                f"note: row {row.label} compare sum {row.compare_sum:.2f} differs from "
                f"reference {row.reference_sum:.2f}", file=sys.stderr,
            )
    if args.format == "text":
        return result.to_text()
    if args.format == "csv":
        out = io.StringIO()
        out.write("label,compare_sum,fitness\n")
        for r in result.rows:
            fit = "inf" if math.isinf(r.fitness) else repr(r.fitness)
            out.write(f"{r.label},{r.compare_sum!r},{fit}\n")
        return out.getvalue()
    return _json(result.to_dict())


def cmd_report(args) -> str:
    series = ingest_csv(_read(args.input), headerless=args.headerless)
    labeled = label_series(series, args.k, _binning(args))
    _, model, _ = _estimate_doc(labeled.states, labeled.symbols, args)
    report = trend_report(model, args.label or f"{args.k}-day difference")
    return _report_text_or_json(report, args)


# -- parser --------------------------------------------------------------------

COMMANDS = {
    "ingest": (cmd_ingest, "CSV of closes -> labeled series (date,diff,symbol,state)"),
    "estimate": (cmd_estimate, "labeled series -> model JSON with counts and joint table"),
    "stationary": (cmd_stationary, "model JSON -> steady-state trend report"),
    "generate": (cmd_generate, "model JSON -> seeded random path (best of --trials)"),
    "decode": (cmd_decode, "model JSON + symbols -> Viterbi state path"),
    "train": (cmd_train, "model JSON + symbols -> Baum-Welch trained model + trace"),
    "fitness": (cmd_fitness, "candidate state sequences -> compare-sum/fitness table"),
    "report": (cmd_report, "prices CSV + lag -> trend report, end to end"),
}

_DEFAULT_FORMAT = {"ingest": "csv", "fitness": "text", "report": "text", "stationary": "text"}


def _build() -> tuple[argparse.ArgumentParser, dict]:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults (flags override it)")
    common.add_argument("--output", "-o", help="write result here instead of stdout")
    common.add_argument("--verbose", action="store_true", help="echo the effective config as JSON on stderr")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                        help="row-sum tolerance when loading models; use 0.01 for 2-decimal "
                             "transcriptions (default: %(default)g)")

    parser = _Parser(prog="hmmtrend", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    subs = {}
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.add_argument("--format", choices=("json", "csv", "text"),
                       default=_DEFAULT_FORMAT.get(name, "json"), help="output format (default: %(default)s)")
        subs[name] = p

    def binning_options(p):
        p.add_argument("--input", required=True, help="prices CSV (date,close)")
        p.add_argument("--headerless", action="store_true", help="input is a bare column of closes")
        p.add_argument("--k", type=int, default=1, help="difference lag in days (default: %(default)s)")
        p.add_argument("--binning", choices=BINNING_MODES, default="equal_width",
                       help="state assignment mode (default: %(default)s)")
        p.add_argument("--thresholds", help="5 ascending cut points for --binning explicit")
        p.add_argument("--zero-policy", choices=ZERO_POLICIES, default="map-zero-to-D",
                       help="symbol for zero differences (default: %(default)s)")

    def estimate_options(p):
        p.add_argument("--alpha", type=float, default=0.0, help="additive smoothing (default: %(default)s)")
        p.add_argument("--pairing", choices=PAIRINGS, default="same",
                       help="emission pairing: state_t with symbol_t or symbol_t+1 (default: %(default)s)")

    binning_options(subs["ingest"])

    subs["estimate"].add_argument("--input", required=True, help="labeled series CSV from `ingest`")
    estimate_options(subs["estimate"])

    p = subs["stationary"]
    p.add_argument("--model", required=True)
    p.add_argument("--method", choices=METHODS, default="linear", help="(default: %(default)s)")
    p.add_argument("--max-iter", type=int, default=100_000, help="power iteration cap (default: %(default)s)")
    p.add_argument("--residual-tol", type=float, default=1e-10, help="(default: %(default)g)")
    p.add_argument("--label", help="report label (default: model file stem)")

    p = subs["generate"]
    p.add_argument("--model", required=True)
    p.add_argument("--length", type=int, required=True, help="path length L")
    p.add_argument("--seed", type=int, help=f"RNG seed (default: ${SEED_ENV}, else random; always echoed)")
    p.add_argument("--include-start", action="store_true",
                   help="emit the start state with the start marker at position 0")
    p.add_argument("--trials", type=int, default=1,
                   help="keep the most probable of this many seeded samples (default: %(default)s)")

    for name in ("decode", "train"):
        p = subs[name]
        p.add_argument("--model", required=True)
        p.add_argument("--symbols", help="comma-separated symbol labels, e.g. D,D,I")
        p.add_argument("--symbols-file", help="labeled series CSV; its symbol column is used")
    p = subs["train"]
    p.add_argument("--max-iter", type=int, default=100, help="(default: %(default)s)")
    p.add_argument("--tol", type=float, default=1e-8, help="stop when the gain is below this (default: %(default)g)")
    p.add_argument("--floor", type=float, default=0.0, help="emission count floor (default: %(default)s)")

    subs["fitness"].add_argument("--paths", required=True,
                                 help="JSON list of sequences or {'sequences': [...], 'reference_sums': {...}}")

    p = subs["report"]
    binning_options(p)
    estimate_options(p)
    p.add_argument("--label")

    return parser, subs


def build_parser() -> argparse.ArgumentParser:
    return _build()[0]


def _config_defaults(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        cfg = json.loads(_read(known.config).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = _build()
    try:
        cfg = _config_defaults(argv)
    except InputError as exc:
        print(f"hmmtrend: error: {exc}", file=sys.stderr)
        return 1
    if cfg:
        for p in subs.values():
            known = {a.dest for a in p._actions}
            p.set_defaults(**{k: v for k, v in cfg.items() if k in known})
            # config may satisfy options marked required on the command line
            for action in p._actions:
                if action.dest in cfg:
                    action.required = False
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    if args.verbose:
        effective = {k: v for k, v in vars(args).items() if k != "func"}
        print(json.dumps({"effective_config": effective}, sort_keys=True), file=sys.stderr)
    handler = COMMANDS[args.command][0]
    try:
        _emit(handler(args), args.output)
    except InputError as exc:
        print(f"hmmtrend: error: {exc}", file=sys.stderr)
        return 1
    except HmmError as exc:
        print(f"hmmtrend: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
