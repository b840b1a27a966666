"""Batch front end: adem, resolve, ext, verify.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import paper_lab, steenrod as st, umod
from . import resolve as rs
from .errors import BudgetExceeded, UsageError

SPEC_HELP = """\
module specs:
  J(n)            Brown-Gitler module J(n)
  F(n)            free unstable module on a class of degree n (cut at --max-degree)
  H(k)            the finite module H_k inside J(2^(k-1))
  F2              the trivial module in degree 0
  Sigma[^s] X     s-fold suspension of X, e.g. "Sigma F2", "SigmaF2", "Sigma^3 F2"
  Phi[^r] X       r-fold Frobenius double of X, e.g. "Phi^2 F(1)"
  T(X,Y)          tensor product, e.g. "T(F(1),F(1))"

operation words: "Sq2 Sq2", "Sq^2 Sq^3", "Sq^{6,1}", separated by spaces or "*".
"""


def _emit(args, text: str, payload) -> None:
    out = json.dumps(payload, sort_keys=True, indent=2) if args.json else text
    print(out)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")


def cmd_adem(args) -> int:
    e = st.adem_normalize(st.parse_word(" ".join(args.word)))
    text = st.format_element(e)
    _emit(args, text, {"input": " ".join(args.word), "normal_form": text, "degree": e.degree})
    return 0


def cmd_resolve(args) -> int:
    D = args.max_degree
    M = umod.build_from_spec(args.spec, D)
    if args.projective:
        R = rs.ProjectiveResolver(M, D)
        R.extend(args.steps)
        res = rs.resolution_from_resolver(R)
        res.certificates = rs.projective_certificates(R)
    else:
        if M.truncated:
            raise UsageError(f"{args.spec} is not finite; use --projective")
        if not umod.is_nilpotent(M):
            raise UsageError(f"{args.spec} is not nilpotent; use --projective")
        res = rs.minimal_injective_resolution(M, args.steps)
    report = rs.resolution_report(res, with_blocks=not args.projective)
    lines = [res.describe() or "0"]
    if res.flavor == "injective" and res.complete:
        lines.append("exact: resolution terminates")
    for j, block in enumerate(report.get("differentials", []), start=1):
        lines.append(f"d{j}: " + "; ".join("[" + ", ".join(row) + "]" for row in block))
    lines.append("certificates: " + ", ".join(f"{k}={v}" for k, v in sorted(report["certificates"].items())))
    _emit(args, "\n".join(lines), report)
    return 0


def cmd_ext(args) -> int:
    D = args.max_degree
    if args.d < 0:
        raise UsageError("--d must be non-negative")
    M = umod.build_from_spec(args.source, D)
    N = umod.build_from_spec(args.target, D)
    table = rs.ext_groups(M, N, args.d, D)
    lines = [f"Ext^d({table.source}, {table.target}) at max degree {D}"]
    for d in range(args.d + 1):
        v = table.dim(d)
        lines.append(f"  d={d}: {'unavailable' if v is None else v}")
    _emit(args, "\n".join(lines), table.to_json())
    return 0


def cmd_verify(args) -> int:
    report = paper_lab.run_suite(args.suite, D=args.max_degree)
    if args.json:
        _emit(args, "", report.to_json())
    else:
        lines = []
        for f in report.findings:
            tag = f.verdict.upper() + ("" if f.blocking else " (non-blocking)")
            lines.append(f"{tag:<24} {f.check} {json.dumps(f.inputs, sort_keys=True)}")
            lines.append(f"    expected {json.dumps(f.expected, sort_keys=True, default=str)} [{f.provenance}]")
            lines.append(f"    actual   {json.dumps(f.actual, sort_keys=True, default=str)}")
            if f.note:
                lines.append(f"    note     {f.note}")
        lines.append("limitation: " + report.limitation)
        lines.append("suite " + args.suite + (": all blocking checks pass" if report.passed
                                             else ": some blocking checks did not pass"))
        _emit(args, "\n".join(lines), None)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unstable-ext", description=__doc__, epilog=SPEC_HELP,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=int, default=64, help="internal degree cut (default 64)")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--out", help="also write the report to this file")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("adem", parents=[common], help="admissible normal form of a word")
    a.add_argument("word", nargs="+")
    a.set_defaults(func=cmd_adem)

    r = sub.add_parser("resolve", parents=[common], help="minimal resolution of a module",
                       epilog=SPEC_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    r.add_argument("spec")
    r.add_argument("--steps", type=int, default=3)
    r.add_argument("--projective", action="store_true", help="projective instead of injective")
    r.set_defaults(func=cmd_resolve)

    e = sub.add_parser("ext", parents=[common], help="dimensions of Ext^d(source, target)",
                       epilog=SPEC_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    e.add_argument("source")
    e.add_argument("target")
    e.add_argument("--d", type=int, default=4, help="largest homological degree")
    e.set_defaults(func=cmd_ext)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", default="all", help="tables, ext, counterexamples or all")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if getattr(args, "steps", 1) < 0 or args.max_degree < 1:
        print("error: --steps and --max-degree must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
