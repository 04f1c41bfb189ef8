"""Command-line entry point: `m2a translate | check | verify`."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .diagnostics import Diagnostic, M2AError
from .emitter import emit
from .oracle import OracleBudget, verify_equivalence
from .parser import parse_source
from .signature import analyze
from .translate import Translator

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_DISAGREE = 0, 1, 2, 3


@dataclass
class FileResult:
    """Everything produced for one input file; printed in input order."""

    path: str
    diagnostics: list[Diagnostic] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    reports: list[dict] = field(default_factory=list)
    status: int = EXIT_OK

    def fail(self, exc: M2AError) -> None:
        self.diagnostics += [d.located(self.path) for d in exc.diagnostics]
        self.status = max(self.status, EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="m2a", description="Translate Maude functional modules into Athena.")
    p.add_argument("--version", action="version", version=f"m2a {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("inputs", nargs="+", metavar="FILE", help="Maude source files")
        sp.add_argument("--json", action="store_true", help="machine-readable output on stdout")
        sp.add_argument("--builtins", action=argparse.BooleanOptionalAction, default=True,
                        help="allow 'protecting BOOL/NAT/INT' (default: on)")
        sp.add_argument("--strict", action="store_true", help="treat warnings as errors")

    t = sub.add_parser("translate", help="write one .ath file per module")
    common(t)
    t.add_argument("-o", "--output", default=".", help="output directory, or a .ath file for a single module")
    t.add_argument("--no-induction", action="store_true", help="omit primitive induction methods")

    c = sub.add_parser("check", help="report strict sensibility and preregularity")
    common(c)

    v = sub.add_parser("verify", help="compare source and target equality on sampled ground terms")
    common(v)
    v.add_argument("--pairs", type=_positive, default=50, help="pairs per kind (default: 50)")
    v.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
    v.add_argument("--depth", type=_positive, default=3, help="maximum term depth (default: 3)")
    return p


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _load(path: str, args, res: FileResult):
    try:
        source = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        res.diagnostics.append(Diagnostic("error", "unreadable-input", str(exc), None, path))
        res.status = EXIT_INPUT
        return None
    try:
        return parse_source(source, builtins=args.builtins)
    except M2AError as exc:
        res.fail(exc)
        return None


def _warn(res: FileResult, warnings: list[Diagnostic], strict: bool) -> None:
    for w in warnings:
        if strict:
            w = Diagnostic("error", w.rule, w.message, w.span)
            res.status = max(res.status, EXIT_INPUT)
        res.diagnostics.append(w.located(res.path))


def _translate_file(path: str, args) -> tuple[FileResult, list[tuple[str, str]]]:
    res = FileResult(path)
    modules = _load(path, args, res)
    texts = []
    for module in modules or []:
        try:
            theory = Translator(module, induction=not args.no_induction).translate()
        except M2AError as exc:
            res.fail(exc)
            continue
        _warn(res, theory.warnings, args.strict)
        texts.append((module.name, emit(theory)))
    return res, texts


def _check_file(path: str, args) -> FileResult:
    res = FileResult(path)
    for module in _load(path, args, res) or []:
        try:
            _, _, report = analyze(module)
        except M2AError as exc:
            res.fail(exc)
            continue
        res.diagnostics += [d.located(path) for d in report.violations]
        res.reports.append({"module": module.name, **report.to_dict()})
        if not (report.strictly_sensible and report.preregular):
            res.status = max(res.status, EXIT_INPUT)
    return res


def _verify_file(path: str, args) -> FileResult:
    res = FileResult(path)
    budget = OracleBudget(seed=args.seed)
    for module in _load(path, args, res) or []:
        try:
            theory = Translator(module).translate()
            report = verify_equivalence(module, theory, budget, pairs=args.pairs, depth=args.depth, seed=args.seed)
        except M2AError as exc:
            res.fail(exc)
            continue
        _warn(res, theory.warnings, args.strict)
        res.reports.append(report.to_dict())
        if report.disagreements:
            res.status = max(res.status, EXIT_DISAGREE)
    return res


def _color(stream) -> bool:
    mode = os.environ.get("M2A_COLOR", "auto")
    if mode == "always":
        return True
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _print_diagnostics(results: list[FileResult]) -> None:
    color = _color(sys.stderr)
    for res in results:
        for d in res.diagnostics:
            line = d.format()
            if color:
                code = "31" if d.severity == "error" else "33"
                line = line.replace(f"{d.severity}[", f"\033[{code}m{d.severity}\033[0m[", 1)
            print(line, file=sys.stderr)


def _human_report(command: str, report: dict) -> str:
    if command == "check":
        verdict = "strictly sensible" if report["strictly_sensible"] else "NOT strictly sensible"
        flags = ", ".join(f"{k.replace('_', ' ')}: {'yes' if report[k] else 'no'}"
                          for k in ("strongly_sensible", "maximal_bounding", "preregular"))
        return f"{report['module']}: {verdict} ({flags})"
    lines = [
        f"{report['module']}: {report['pairs']} pairs, {report['agreements']} agree, "
        f"{len(report['disagreements'])} disagree, {report['inconclusive']} inconclusive "
        f"(seed {report['seed']}, depth {report['depth']})"
    ]
    for d in report["disagreements"]:
        lines.append(f"  {d['left']}  vs  {d['right']}: source {d['source']}, target {d['target']}")
    return "\n".join(lines)


def _write_outputs(args, results, texts_per_file) -> None:
    out = Path(args.output)
    all_texts = [t for texts in texts_per_file for t in texts]
    single_file = out.suffix == ".ath"
    if single_file and len(all_texts) > 1:
        raise _Usage("-o names a single .ath file but the inputs hold several modules")
    for res, texts in zip(results, texts_per_file):
        for name, text in texts:
            target = out if single_file else out / f"{name}.ath"
            try:
                target.parent.mkdir(parents=True, exist_ok=True)
                with open(target, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
            except OSError as exc:
                res.diagnostics.append(Diagnostic("error", "unwritable-output", str(exc), None, res.path))
                res.status = max(res.status, EXIT_INPUT)
                continue
            res.outputs.append(str(target))


class _Usage(Exception):
    pass


def run(args: argparse.Namespace) -> int:
    work = {"translate": _translate_file, "check": _check_file, "verify": _verify_file}[args.command]
    with ThreadPoolExecutor(max_workers=min(8, len(args.inputs))) as pool:
        done = list(pool.map(lambda p: work(p, args), args.inputs))
    if args.command == "translate":
        results = [r for r, _ in done]
        texts = [t for _, t in done]
        _write_outputs(args, results, texts)
    else:
        results = done
    status = max(r.status for r in results)

    if args.json:
        payload = {
            "command": args.command,
            "status": status,
            "files": [
                {"file": r.path, "status": r.status, "outputs": r.outputs, "reports": r.reports,
                 "diagnostics": [d.to_dict() for d in r.diagnostics]}
                for r in results
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        _print_diagnostics(results)
        for r in results:
            for rep in r.reports:
                print(_human_report(args.command, rep))
            for o in r.outputs:
                print(f"wrote {o}")
    return status


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except _Usage as exc:
        parser.error(str(exc))  # exits with status 2
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
