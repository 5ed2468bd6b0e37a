"""Command-line front end.

Exit status: 0 on success, 1 when a check or translation fails, 2 on
parse or usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .cutelim import MaxStepsExceeded, PreconditionViolated, VerificationFailed, find_maximal_class, normalize, prefer
from .expansion import DependencyGraph, ShapeError, check_proof
from .lk import InvalidInput, NotRegular, Stuck, check_lk, expand, sequentialize
from .logic import CaptureError
from .syntax import ParseError, parse_expansion_proof, parse_formula, parse_lk_proof, print_expansion_proof, print_lk_proof


class _Usage(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None


def _is_lk(path, text):
    if path.endswith(".lk"):
        return True
    if path.endswith(".exp"):
        return False
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).lstrip()
    return body.startswith("(") and body[1:].lstrip().split(" ", 1)[0] in ("init", "forall", "exists", "and", "or", "cut")


def _interactive(stdin, stderr):
    def choose(p, classes):
        default = find_maximal_class(p)
        stderr.write(f"{len(p.cuts)} cut(s); classes:\n")
        for i, c in enumerate(classes):
            mark = " *" if c == default else ""
            stderr.write(f"  [{i}] {c}{mark}\n")
        while True:
            stderr.write("class index (empty for *): ")
            stderr.flush()
            line = stdin.readline()
            if not line or not line.strip():
                return default
            try:
                k = int(line)
            except ValueError:
                k = -1
            if 0 <= k < len(classes):
                return classes[k]
            stderr.write("no such class\n")

    return choose


def _strategy(text, stdin, stderr):
    if text == "maximal":
        return "maximal"
    if text == "interactive":
        return _interactive(stdin, stderr)
    if text.startswith("class="):
        return prefer(parse_formula(text[len("class=") :]))
    raise _Usage(f"unknown strategy {text!r}")


def build_parser():
    ap = argparse.ArgumentParser(prog="expcut", description="Expansion proofs with cut.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file")
        sp.add_argument("--sequent-semantics", choices=("set", "multiset"), default=None)
        return sp

    add("check", "check an expansion proof (.exp) or LK proof (.lk)")
    add("expand", "translate an LK proof to an expansion proof")
    add("sequentialize", "translate an expansion proof to an LK proof")
    el = add("eliminate", "eliminate cuts from an expansion proof")
    el.add_argument("--strategy", default="maximal", help="maximal | interactive | class=<formula>")
    el.add_argument("--verify-each-step", action="store_true")
    el.add_argument("--dedup", action="store_true")
    el.add_argument("--max-steps", type=int, default=10000)
    el.add_argument("--trace", metavar="PATH")
    add("depgraph", "print the dependency graph in DOT")
    add("fmt", "reprint a proof in canonical form")
    return ap


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args, stdin, stdout, stderr)
    except (_Usage, ParseError, ShapeError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except (NotRegular, InvalidInput, Stuck, PreconditionViolated, VerificationFailed, MaxStepsExceeded, CaptureError) as exc:
        stderr.write(f"failed: {exc}\n")
        return 1


def _dispatch(args, stdin, stdout, stderr) -> int:
    text = _read(args.file)
    lk_input = _is_lk(args.file, text)
    cmd = args.command
    if cmd == "fmt":
        out = print_lk_proof(parse_lk_proof(text)) if lk_input else print_expansion_proof(parse_expansion_proof(text))
        stdout.write(out)
        return 0
    if cmd == "check":
        if lk_input:
            pi = parse_lk_proof(text)
            report = check_lk(pi, semantics=args.sequent_semantics or "multiset")
        else:
            report = check_proof(parse_expansion_proof(text))
        stream = stdout if report.ok else stderr
        stream.write("\n".join(report.lines()) + "\n")
        return 0 if report.ok else 1
    if cmd == "expand":
        if not lk_input:
            raise _Usage("expand needs an LK proof")
        stdout.write(print_expansion_proof(expand(parse_lk_proof(text))))
        return 0
    if lk_input:
        raise _Usage(f"{cmd} needs an expansion proof")
    p = parse_expansion_proof(text)
    if cmd == "sequentialize":
        pi = sequentialize(p)
        report = check_lk(pi, semantics=args.sequent_semantics or "set")
        if not report.ok:
            stderr.write("\n".join(report.lines()) + "\n")
            return 1
        stdout.write(print_lk_proof(pi))
        return 0
    if cmd == "depgraph":
        stdout.write(DependencyGraph(p).to_dot())
        return 0
    # eliminate
    if args.max_steps < 0:
        raise _Usage("--max-steps must be non-negative")
    strategy = _strategy(args.strategy, stdin, stderr)
    if not check_proof(p).ok:
        stderr.write("warning: input is not an expansion proof; reducing anyway\n")
    q, trace = normalize(
        p,
        strategy=strategy,
        verify_each_step=args.verify_each_step,
        dedup_each_step=args.dedup,
        max_steps=args.max_steps,
    )
    if args.trace:
        try:
            with open(args.trace, "w", encoding="utf-8") as fh:
                fh.write(trace.to_json(indent=2) + "\n")
        except OSError as exc:
            raise _Usage(f"cannot write {args.trace}: {exc.strerror}") from None
    stdout.write(print_expansion_proof(q))
    return 0


def main():
    sys.exit(run())


__all__ = ["build_parser", "main", "run"]
