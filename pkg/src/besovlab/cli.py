"""Command-line front door: norms, classification, experiments,
counterexample tables, membership diagnostics, corpus management.

Exit codes: 0 success, 2 validation error (flags, malformed files), 3 a
precondition gate rejected the request (the message carries the citation
when one governs the gate).  Reports embed the fully resolved configuration
and are byte-identical across reruns of the same invocation: all reductions
run in a fixed order, so --threads (or FSPACE_THREADS) never changes values.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .composition_lab import (
    NotAScalingFunction,
    composition_experiment,
    scaler_from_json,
    sinusoidal_scaler,
)
from .differences import membership_diagnostic
from .faber import FaberBoundaryError
from .fubini import FubiniPreconditionError, fubini_compare
from .grid import CorpusSpec, GridError, GridFunction, generate_corpus, sample
from .haar import haar_counterexample
from .spaces import ScalerMeta, SpaceError, SpaceParams, composition_verdict, norm_window_flags, truncation_verdict
from .truncation_lab import (
    NORM_KINDS,
    counterexample_csv,
    counterexample_scaling,
    discrete_norm,
    ratio_experiment,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PRECONDITION = 3


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise SystemExit(self.exit_with(message))

    def exit_with(self, message):
        print(f"error: {message}", file=sys.stderr)
        return EXIT_VALIDATION


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise GridError(f"cannot read {path}: {exc}") from exc


def _load_function(path: str) -> GridFunction:
    return GridFunction.from_json(_read_text(path))


def _parse_box(text: str) -> tuple[int, int]:
    try:
        corner, side = text.split(":")
        return int(corner), int(side)
    except ValueError as exc:
        raise GridError(f"box syntax is CORNER:SIDE, got {text!r}") from exc


def _threads(args) -> int:
    n = args.threads if args.threads is not None else os.environ.get("FSPACE_THREADS", "1")
    try:
        n = int(n)
    except ValueError as exc:
        raise GridError(f"bad thread count {n!r}") from exc
    return max(n, 1)


def _emit(args, payload: str):
    if getattr(args, "out", None):
        Path(args.out).write_text(payload)
        print(f"wrote {args.out}")
    else:
        print(payload)


def _cmd_norm(args) -> int:
    sp = SpaceParams.parse(args.space)
    f = _load_function(args.input)
    kwargs = {}
    if args.kind in ("faber-b", "faber-f"):
        kwargs["faber_kind"] = args.faber_kind
    if args.kind == "diff" and args.diff_order:
        kwargs["diff_order"] = args.diff_order
    value = discrete_norm(f, args.kind, sp, **kwargs)
    flags = norm_window_flags(args.kind, sp)
    print(json.dumps({"value": value, "flags": flags, "space": sp.label(),
                      "kind": args.kind, "version": __version__}, sort_keys=True))
    return EXIT_OK


def _cmd_classify(args) -> int:
    sp = SpaceParams.parse(args.space)
    if args.scaler:
        g = scaler_from_json(_read_text(args.scaler))
        meta = ScalerMeta(True, not args.gprime_seminorm_unknown)
        print(composition_verdict(sp, meta).to_json())
    else:
        print(truncation_verdict(sp).to_json())
    return EXIT_OK


def _standard_box(sp: SpaceParams, args):
    return _parse_box(args.box) if args.box else (0, 1)


def _cmd_experiment(args) -> int:
    sp = SpaceParams.parse(args.space)
    spec = CorpusSpec.from_json(_read_text(args.corpus))
    corner, side = _standard_box(sp, args)
    level = args.level
    corpus = generate_corpus(spec, level, (corner, side), sp.n)
    cfg = {"seed": spec.seed, "corpus": json.loads(spec.to_json()),
           "level": level, "box": {"corner": corner, "side": side},
           "threads": _threads(args)}
    if args.mode == "trunc":
        report = ratio_experiment(corpus, args.norm_kind, sp,
                                  operator=args.operator, config=cfg)
        payload = report.to_json()
        csv_payload = report.to_csv()
    elif args.mode == "compose":
        g = scaler_from_json(_read_text(args.scaler)) if args.scaler else sinusoidal_scaler()
        op = "g" if args.operator in ("abs", "g") else "abs-g"
        report = composition_experiment(corpus, g, args.norm_kind, sp,
                                        operator=op, config=cfg)
        payload = report.to_json()
        csv_payload = report.to_csv()
    else:  # fubini
        rows = []
        for f in corpus:
            rows.append(fubini_compare(f, sp, norm1d=args.norm_kind or "osc-b"))
        ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
        payload = json.dumps({"config": cfg, "space": sp.label(),
                              "rows": rows,
                              "band": {"min": min(ratios), "max": max(ratios),
                                       "spread": max(ratios) / min(ratios)}
                              if ratios else None,
                              "version": __version__}, sort_keys=True)
        csv_payload = "direct,assembled,ratio\n" + "\n".join(
            f"{r['direct']!r},{r['assembled']!r},{r['ratio']!r}" for r in rows) + "\n"
    _emit(args, payload)
    if args.csv:
        Path(args.csv).write_text(csv_payload)
        print(f"wrote {args.csv}")
    return EXIT_OK


def _cmd_counterexample(args) -> int:
    if args.family != "haar-scaling":
        raise GridError("known counterexample: haar-scaling")
    sp = SpaceParams.parse(args.space)
    rows = counterexample_scaling(sp.s, sp.p, sp.q, sp.n, args.jmax)
    payload = counterexample_csv(rows)
    _emit(args, payload)
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    sp = SpaceParams.parse(args.space)
    level = args.level
    if args.target == "chiQ":
        n = 2 ** level
        arr = np.zeros(3 * n + 1)
        arr[n:2 * n] = 1.0
        f = GridFunction(1, level, (-1.0,), arr, tag="unit-indicator")
        order = args.order or 1
    elif args.target == "hat":
        f = sample(lambda x: np.maximum(1.0 - np.abs(x), 0.0), level, (-2, 4), 1, tag="hat")
        order = args.order or 2
    else:
        f = _load_function(args.input)
        order = args.order or (1 if sp.s < 1 else 2)
    report = membership_diagnostic(f, sp.s, sp.p, sp.q, order=order)
    print(report.to_json())
    return EXIT_OK


def _cmd_corpus(args) -> int:
    spec = CorpusSpec.from_json(_read_text(args.spec))
    corner, side = _parse_box(args.box) if args.box else (0, 1)
    corpus = generate_corpus(spec, args.level, (corner, side), args.dim)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, f in enumerate(corpus):
        (outdir / f"member_{i:04d}.json").write_text(f.to_json())
    (outdir / "spec.json").write_text(spec.to_json())
    print(f"wrote {len(corpus)} members to {outdir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _CliParser(prog="besovlab", description=__doc__)
    ap.add_argument("--threads", type=int, default=None,
                    help="worker count (results are identical for any value)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="evaluate a discrete norm on a stored function")
    p.add_argument("--kind", required=True, choices=NORM_KINDS)
    p.add_argument("--space", required=True, help="FAMILY:s:p:q:n, inf allowed")
    p.add_argument("--input", required=True)
    p.add_argument("--faber-kind", default="unit-interval",
                   choices=("unit-interval", "real-line-compact"))
    p.add_argument("--diff-order", type=int, choices=(1, 2))
    p.set_defaults(fn=_cmd_norm)

    p = sub.add_parser("classify", help="theorem-window verdict for a parameter point")
    p.add_argument("--space", required=True)
    p.add_argument("--scaler", help="scaler JSON: classify composition instead of truncation")
    p.add_argument("--gprime-seminorm-unknown", action="store_true")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("experiment", help="corpus ratio experiments")
    p.add_argument("mode", choices=("trunc", "compose", "fubini"))
    p.add_argument("--space", required=True)
    p.add_argument("--corpus", required=True, help="corpus spec JSON")
    p.add_argument("--norm-kind", default=None)
    p.add_argument("--operator", default="abs", choices=("abs", "pos", "neg", "g", "abs-g"))
    p.add_argument("--scaler")
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--box", help="CORNER:SIDE (default 0:1)")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("counterexample", help="exact scaling table")
    p.add_argument("family", choices=("haar-scaling",))
    p.add_argument("--space", required=True)
    p.add_argument("--jmax", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_counterexample)

    p = sub.add_parser("diagnose", help="membership growth diagnostics")
    p.add_argument("what", choices=("membership",))
    p.add_argument("--target", required=True, choices=("chiQ", "hat", "file"))
    p.add_argument("--space", required=True)
    p.add_argument("--input")
    p.add_argument("--level", type=int, default=12)
    p.add_argument("--order", type=int, choices=(1, 2))
    p.set_defaults(fn=_cmd_diagnose)

    p = sub.add_parser("corpus", help="corpus management")
    p.add_argument("what", choices=("generate",))
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--box")
    p.set_defaults(fn=_cmd_corpus)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return EXIT_VALIDATION if code not in (0,) else EXIT_OK
    try:
        return args.fn(args)
    except (FubiniPreconditionError, NotAScalingFunction, FaberBoundaryError) as exc:
        print(f"precondition rejected: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (GridError, SpaceError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
