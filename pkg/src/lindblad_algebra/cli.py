"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 unreadable input,
3 invariant violation, 4 singular matrix.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import verify as verification
from .algebra import (
    GeneratorTerms,
    commutator_super,
    detect_negative_rates,
    hh_commutator_closed,
    hl_commutator_closed,
    ll_commutator_closed,
)
from .bch import EvolutionSegment, exact_combined_generator, schedule_bch
from .errors import LindbladAlgebraError, SingularMatrixError
from .generators import LindbladSpec, hamiltonian_superop, lindblad_single_superop, lindblad_superop
from .linalg import PINV_RTOL
from .projection import decompose, extract_lindblad_from_channel
from .serialization import (
    ParseError,
    dumps,
    encode_matrix,
    load_json,
    matrix_document,
    parse_matrix_document,
    read_matrix,
)

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_INVARIANT, EXIT_SINGULAR = 0, 1, 2, 3, 4

NON_MARKOVIAN_NOTE = (
    "negative canonical rates: the generator is not of time-independent Lindblad form; "
    "a BCH-combined sequence of Markovian segments matches the evolution only at its endpoints"
)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _terms_report(terms: GeneratorTerms) -> dict:
    return {
        "hamiltonian": encode_matrix(terms.hamiltonian),
        "lindblad_terms": [{"coefficient": c, "op": encode_matrix(op)} for c, op in terms.lindblad_terms],
        "physical": terms.physical,
    }


def _canonical_report(form) -> dict:
    return {
        "hamiltonian": encode_matrix(form.hamiltonian),
        "terms": [{"rate": r, "op": encode_matrix(op)} for r, op in form.terms],
    }


def _negative_report(report, terms: GeneratorTerms | None = None) -> dict:
    out = {
        "has_negative": report.has_negative,
        "negative_rates": report.negative_rates,
        "rates": report.rates,
    }
    if report.has_negative:
        out["explanation"] = NON_MARKOVIAN_NOTE
    if terms is not None:
        out["terms_have_negative_coefficients"] = not terms.physical
        if not terms.physical and not report.has_negative:
            out["explanation"] = (
                "closed-form terms carry negative coefficients, but they cancel after canonicalisation; "
                "the commutator has no negative rate"
            )
    return out


def _superop_input(kind: str, path: str, hbar: float) -> np.ndarray:
    m = read_matrix(path, "operator")
    if kind == "hs":
        return hamiltonian_superop(m, hbar)
    return lindblad_single_superop(m)


def cmd_superop(args) -> tuple[dict, bool]:
    if args.kind == "ls":
        if args.gamma is None:
            raise ParseError("'ls' needs --gamma")
        gamma = read_matrix(args.gamma, "gamma")
        ops = tuple(read_matrix(p, "operator") for p in args.inputs)
        g = lindblad_superop(LindbladSpec(gamma, ops, physical=False))
    else:
        if len(args.inputs) != 1:
            raise ParseError(f"'{args.kind}' takes exactly one operator file")
        g = _superop_input(args.kind, args.inputs[0], args.hbar)
    return matrix_document(g, "superoperator"), False


def cmd_commute(args, argv) -> dict:
    lhs = read_matrix(args.lhs_file, "operator")
    rhs = read_matrix(args.rhs_file, "operator")
    hbar = args.hbar
    numeric = commutator_super(
        _superop_input(args.lhs, args.lhs_file, hbar), _superop_input(args.rhs, args.rhs_file, hbar)
    )
    report = {"command": argv, "hbar": hbar, "mode": args.mode, "warnings": []}
    if args.mode == "closed":
        pair = (args.lhs, args.rhs)
        if pair == ("hs", "hs"):
            terms = hh_commutator_closed(lhs, rhs, hbar)
        elif pair == ("hs", "l1s"):
            terms = hl_commutator_closed(lhs, rhs, hbar)
        elif pair == ("l1s", "hs"):
            terms = -hl_commutator_closed(rhs, lhs, hbar)
        else:
            terms = ll_commutator_closed(lhs, rhs, hbar)
        closed = terms.superoperator()
        dev = float(np.linalg.norm(closed - numeric)) / max(float(np.linalg.norm(numeric)), 1.0)
        report["terms"] = _terms_report(terms)
        report["closed_vs_numeric_deviation"] = dev
        report["modes_agree"] = dev <= 1e-10
        if dev > 1e-10:
            report["warnings"].append(f"closed form deviates from numeric commutator by {dev:.3e}")
        commutator = closed
        report["negative_rates"] = _negative_report(detect_negative_rates(terms), terms)
    else:
        commutator = numeric
        report["negative_rates"] = _negative_report(detect_negative_rates(decompose(numeric).canonical))
    dec = decompose(commutator, hbar).decomposition
    report["commutator"] = encode_matrix(commutator)
    report["projection"] = {
        "h": dec.h.tolist(),
        "gamma": encode_matrix(dec.gamma),
        "residual_norm": dec.residual_norm,
    }
    return report


def _segment_generator(entry, base: Path) -> np.ndarray:
    src = entry.get("generator")
    if isinstance(src, str):
        return read_matrix(base / src, "superoperator")
    if isinstance(src, dict):
        return parse_matrix_document(src, "superoperator")[0]
    raise ParseError("segment 'generator' must be a file path or an inline matrix document")


def load_schedule(path) -> tuple[list[EvolutionSegment], list[int]]:
    doc = load_json(path)
    if not isinstance(doc, dict) or not isinstance(doc.get("segments"), list):
        raise ParseError("schedule must be an object with a 'segments' list")
    base = Path(path).parent
    segments = []
    for i, entry in enumerate(doc["segments"]):
        if not isinstance(entry, dict) or "duration" not in entry:
            raise ParseError(f"segment {i} needs 'generator' and 'duration'")
        try:
            duration = float(entry["duration"])
        except (TypeError, ValueError):
            raise ParseError(f"segment {i} has a non-numeric duration") from None
        segments.append(EvolutionSegment(_segment_generator(entry, base), duration))
    scaled = doc.get("scaling_segments", [])
    if not isinstance(scaled, list) or not all(isinstance(i, int) and 0 <= i < len(segments) for i in scaled):
        raise ParseError("'scaling_segments' must list valid segment indices")
    return segments, scaled


def _difference(segments, order) -> tuple:
    exact, warn = exact_combined_generator(segments)
    approx = schedule_bch(segments, order)
    return exact, warn, approx, float(np.linalg.norm(exact - approx.generator))


def cmd_sequence(args, argv) -> dict:
    segments, scaled = load_schedule(args.schedule)
    if not segments:
        raise CliError("schedule has no segments", EXIT_INVARIANT)
    exact, warn, approx, diff = _difference(segments, args.order)
    warnings_out = []
    if warn:
        warnings_out.append("branch: propagator has eigenvalues near the negative real axis")
    if approx.norm_warning:
        warnings_out.append("norm: total generator norm exceeds ln 2; BCH series may not converge")
    report = {
        "command": argv,
        "hbar": args.hbar,
        "order": args.order,
        "segments": len(segments),
        "exact_generator": encode_matrix(exact),
        "branch_warning": warn,
        "bch_generator": encode_matrix(approx.generator),
        "norm_warning": approx.norm_warning,
        "difference_norm": diff,
        "warnings": warnings_out,
    }
    if scaled:
        factor = 0.5
        halved = [
            EvolutionSegment(s.generator, s.duration * factor) if i in scaled else s for i, s in enumerate(segments)
        ]
        diff_half = _difference(halved, args.order)[3]
        exponent = float(np.log(diff / diff_half) / np.log(1 / factor)) if diff > 0 and diff_half > 0 else None
        report["scaling_check"] = {
            "segments": scaled,
            "factor": factor,
            "difference_norm": diff,
            "difference_norm_scaled": diff_half,
            "observed_exponent": exponent,
        }
    return report


def cmd_extract(args, argv) -> dict:
    t = read_matrix(args.channel, "superoperator")
    ext = extract_lindblad_from_channel(t, tol=args.tol, hbar=args.hbar)
    dec = ext.decomposition
    warnings_out = []
    if ext.branch_warning:
        warnings_out.append("branch: channel has eigenvalues near the negative real axis; logarithm branch is ambiguous")
    if ext.has_negative:
        warnings_out.append(NON_MARKOVIAN_NOTE)
    if not dec.in_span:
        warnings_out.append(f"residual: generator has a component of norm {ext.residual_norm:.3e} outside Lindblad form")
    return {
        "command": argv,
        "hbar": args.hbar,
        "tol": args.tol,
        "h": dec.h.tolist(),
        "gamma": encode_matrix(dec.gamma),
        "canonical": _canonical_report(ext.canonical),
        "residual_norm": ext.residual_norm,
        "divisible_norm": ext.divisible_norm,
        "in_span": bool(dec.in_span),
        "branch_warning": bool(ext.branch_warning),
        "negative_rates": {"has_negative": ext.has_negative, "negative_rates": ext.negative_rates},
        "warnings": warnings_out,
    }


def _parse_dims(text: str) -> list[int]:
    try:
        dims = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"--dims must be a comma-separated list of integers, got {text!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise ParseError("--dims entries must be integers >= 2")
    return dims


def cmd_verify(args, argv) -> tuple[dict, int]:
    report = verification.run_suite(args.suite, args.trials, args.seed, _parse_dims(args.dims))
    report = {"command": argv, "hbar": args.hbar, **report}
    failures = [c["failure"] for c in report["checks"] if "failure" in c]
    if failures and args.replay_dir:
        out_dir = Path(args.replay_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for f in failures:
            path = out_dir / f"replay-{f['check']}-N{f['dim']}-t{f['trial']}.json"
            path.write_text(json.dumps(f) + "\n", encoding="utf-8")
            f["replay"] = f"lindblad-algebra replay {path}"
    return report, (EXIT_OK if report["passed"] else EXIT_VERIFY)


def cmd_replay(args, argv) -> tuple[dict, int]:
    doc = load_json(args.file)
    if not isinstance(doc, dict) or doc.get("check") not in verification.CHECKS:
        raise ParseError("not a replay file")
    result = verification.replay(doc)
    return {"command": argv, **result}, (EXIT_OK if result["passed"] else EXIT_VERIFY)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=float, default=argparse.SUPPRESS, help="reduced Planck constant (default 1.0)")
    common.add_argument("--output", default=argparse.SUPPRESS, help="write the result here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="lindblad-algebra",
        description="Lindblad semigroup generators as explicit superoperator matrices.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("superop", parents=[common], help="build a superoperator file")
    p.add_argument("kind", choices=["hs", "l1s", "ls"])
    p.add_argument("inputs", nargs="+", help="operator files (Hamiltonian, Lindblad operator, or ops for 'ls')")
    p.add_argument("--gamma", help="rate matrix file for 'ls'")

    p = sub.add_parser("commute", parents=[common], help="commutator of two generators")
    p.add_argument("lhs_file")
    p.add_argument("rhs_file")
    p.add_argument("--mode", choices=["numeric", "closed"], default="closed")
    p.add_argument("--lhs", choices=["hs", "l1s"], default="l1s", help="kind of the left generator")
    p.add_argument("--rhs", choices=["hs", "l1s"], default="l1s", help="kind of the right generator")

    p = sub.add_parser("sequence", parents=[common], help="combine a schedule of segments")
    p.add_argument("schedule")
    p.add_argument("--order", type=int, choices=[1, 2, 3, 4], default=2)

    p = sub.add_parser("extract", parents=[common], help="Lindblad form of a channel")
    p.add_argument("channel")
    p.add_argument("--tol", type=float, default=PINV_RTOL, help="pseudo-inverse cutoff relative to sigma_max")

    p = sub.add_parser("verify", parents=[common], help="run randomised verification suites")
    p.add_argument("suite", choices=["identities", "bch", "projection", "all"])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", default="2,3,4")
    p.add_argument("--replay-dir", default=None, help="directory for replay files of failing instances")

    p = sub.add_parser("replay", parents=[common], help="re-evaluate a failing verification instance")
    p.add_argument("file")
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    # global flags may sit before or after the subcommand
    args.hbar = getattr(args, "hbar", 1.0)
    args.output = getattr(args, "output", None)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "superop":
                doc, _ = cmd_superop(args)
                _emit(json.dumps(doc) + "\n", args.output)
                return EXIT_OK
            if args.command == "commute":
                report = cmd_commute(args, argv)
            elif args.command == "sequence":
                report = cmd_sequence(args, argv)
            elif args.command == "extract":
                report = cmd_extract(args, argv)
            elif args.command == "verify":
                report, code = cmd_verify(args, argv)
            else:
                report, code = cmd_replay(args, argv)
        if caught:
            report.setdefault("warnings", []).extend(str(w.message) for w in caught)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SingularMatrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except LindbladAlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    report["timing_seconds"] = round(time.perf_counter() - start, 6)
    _emit(dumps(report), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
