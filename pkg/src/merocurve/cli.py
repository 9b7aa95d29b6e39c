"""Command line front end: parse polynomials, run a command, print a report.

    merocurve factor  "Y^4 + X^5"
    merocurve tree    "(Y^2 - X^3)^2 - X^5*Y" --json
    merocurve dfactor "Y^4+X^5"
    merocurve jfactor "(Y^2-X^3)^2-X^5*Y" "Y"
    merocurve verify  --family tr5 --n 3 --seed 1

Exit status: 0 on success, 2 when a hypothesis of the command is not met,
1 on any other error (including a failed verdict).
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from fractions import Fraction

from .charseq import char_seq
from .coeff import frac_str, serialize, to_text
from .contact_tree import (
    contact,
    contact_set,
    d_double_prime,
    d_prime,
    int_branches,
    noc,
    tree_of,
)
from .errors import HypothesisNotMet, MeroError, NegativeYExponent, ParseError
from .meropoly import MeroPoly, format_mero, format_series
from .newton import DEFAULT_CAP_FACTOR, Context
from .series import INF

__all__ = ["parse", "pretty", "main", "build_parser", "run"]


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([XY])|(.))")


def _tokens(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos or (m.group(0).strip() == "" and m.end() >= len(text)):
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("var", m.group(2), start))
        elif m.group(3):
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.peek()
        return cls(msg, tok[2])

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise self.error(f"expected '{op}'", t)
        return t

    def parse(self) -> MeroPoly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected '{self.peek()[1]}'")
        return e

    def expr(self) -> MeroPoly:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def _starts_factor(self, t) -> bool:
        return t[0] in ("num", "var") or (t[0] == "op" and t[1] == "(")

    def term(self) -> MeroPoly:
        acc = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                acc = acc * self.factor()
            elif self._starts_factor(t):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> MeroPoly:
        start = self.peek()
        base = self.base()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.exponent()
            return self._power(base, e, start)
        return base

    def exponent(self) -> int:
        t = self.peek()
        paren = t[0] == "op" and t[1] == "("
        if paren:
            self.take()
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        t = self.take()
        if t[0] != "num" or "/" in t[1]:
            raise self.error("expected an integer exponent", t)
        if paren:
            self.expect(")")
        return sign * int(t[1])

    def _power(self, base: MeroPoly, e: int, tok) -> MeroPoly:
        if e >= 0:
            return base ** e
        if base.deg_y > 0:
            raise self.error("negative exponent on an expression in Y", tok, NegativeYExponent)
        terms = base.coeff(0).terms() if not base.is_zero() else []
        if len(terms) != 1:
            raise self.error("negative exponent needs a monomial base", tok)
        (ex, co), = terms
        return (MeroPoly.const(1 / co) * MeroPoly.X(-ex)) ** (-e)

    def base(self) -> MeroPoly:
        t = self.take()
        if t[0] == "num":
            return MeroPoly.const(Fraction(t[1]))
        if t[0] == "var":
            return MeroPoly.X() if t[1] == "X" else MeroPoly.Y()
        if t[0] == "op" and t[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "end":
            raise self.error("unexpected end of input", t)
        raise self.error(f"unexpected '{t[1]}'", t)


def parse(text: str) -> MeroPoly:
    """Parse an expression in X, Y with rational literals into a MeroPoly."""
    return _Parser(text).parse()


def pretty(F: MeroPoly) -> str:
    """Canonical text; parseable again when the coefficients are rational."""
    return format_mero(F)


# ---------------------------------------------------------------------------
# report assembly


def _q(x):
    if x is None:
        return None
    if x == INF:
        return "inf"
    return frac_str(x)


def _root(b, ctx):
    bound = ctx.base_budget(b)
    b.refine_x(bound)
    y = b.puiseux()
    return y if y.trunc <= bound else y.truncate(bound)


def _root_terms(y) -> list:
    return [{"exponent": frac_str(e), "coeff": serialize(c)} for e, c in y.terms()]


def _charseq_doc(b) -> dict:
    cs = char_seq(b)
    return {
        "h": cs.h,
        "m": list(cs.m),
        "d": list(cs.d),
        "q": list(cs.q),
        "s": list(cs.s),
        "r": list(cs.r),
        "c": [frac_str(c) for c in cs.c],
    }


def _factors_doc(fac, ctx) -> list:
    out = []
    for b, m in fac.factors:
        y = _root(b, ctx)
        out.append({"degree": b.n, "multiplicity": m, "root": format_series(y), "root_terms": _root_terms(y)})
    return out


def _tree_doc(T) -> dict:
    buds = []
    for B in T:
        buds.append(
            {
                "id": B.id,
                "level": "-inf" if B.level is None else frac_str(B.level),
                "stem": [T.index(b) for b in B.stem],
                "D": B.D,
                "Dstar": B.Dstar,
                "S": _q(B.S),
                "Dprime": d_prime(T, B),
                "Ddprime": d_double_prime(T, B),
                "parent": B.parent.id if B.parent is not None else None,
            }
        )
    return {"levels": ["-inf"] + [frac_str(x) for x in T.levels], "buds": buds}


def _slices_doc(report) -> list:
    A = report.assignment
    out = []
    for e in report.entries:
        out.append(
            {
                "bud": e.bud.id,
                "degree": e.degree,
                "omega_degree": e.omega_degree,
                "predicted": e.predicted,
                "Dprime": e.Dprime,
                "Ddprime": e.Ddprime,
                "factors": [A.H.factors[j][0].n for j in e.prime],
                "intersections": [
                    {"stem": i, "int": _q(got), "nSdeg": _q(want)} for i, got, want in e.intersections
                ],
            }
        )
    return out


def _verdicts_doc(vs) -> list:
    return [
        {"name": v.name, "where": v.where, "status": "skip" if v.ok is None else ("pass" if v.ok else "fail"),
         "detail": v.detail}
        for v in vs
    ]


def _doc(args, ctx, F, G=None, fac=None, T=None, report=None, extra=None) -> dict:
    doc = {"command": args.command, "input": {"F": args.F, "parsed": pretty(F)}}
    if G is not None:
        doc["input"]["G"] = args.G
        doc["input"]["G_parsed"] = pretty(G)
    if fac is not None:
        doc["content"] = {"ord": _q(fac.content.ord_x()), "lead": serialize(fac.content.lead()[1])}
        doc["factors"] = _factors_doc(fac, ctx)
        doc["charseq"] = [_charseq_doc(b) for b in fac.branches]
    if T is not None:
        doc["tree"] = _tree_doc(T)
    if report is not None:
        doc["H"] = {"degree": report.H.deg_y, "factors": [[b.n, m] for b, m in report.Hfac.factors]}
        doc["slices"] = _slices_doc(report)
        doc["verdicts"] = _verdicts_doc(report.verdicts)
    if extra:
        doc.update(extra)
    doc["tower"] = ctx.tower.describe()
    for lv, level in zip(doc["tower"], ctx.tower.levels):
        lv["text"] = _poly_text(ctx.tower.minpoly(level.index), "t")
    return doc


def _poly_text(p, var) -> str:
    parts = []
    for i in range(len(p) - 1, -1, -1):
        t = to_text(p[i])
        if t == "0":
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            parts.append(t)
        elif t in ("1", "-1"):
            parts.append(t[:-1] + mono)
        else:
            parts.append(f"({t})*{mono}" if " " in t else f"{t}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# text rendering


def _short(q) -> str:
    return q[:-2] if isinstance(q, str) and q.endswith("/1") else str(q)


def _text(doc: dict) -> str:
    lines = [f"input: {doc['input']['parsed']}"]
    for k, text in enumerate(doc.get("instances", [])):
        lines.append(f"#{k}: {text}")
    if "G" in doc["input"]:
        lines.append(f"G: {doc['input']['G_parsed']}")
    for lv in doc.get("tower", []):
        lines.append(f"t{lv['level']}: root of {lv['text']}")
    for i, f in enumerate(doc.get("factors", [])):
        mult = f" (multiplicity {f['multiplicity']})" if f["multiplicity"] > 1 else ""
        lines.append(f"factor f{i}: degree {f['degree']}{mult}, root y = {f['root']}")
    for i, cs in enumerate(doc.get("charseq", [])):
        lines.append(
            f"charseq f{i}: h={cs['h']} m={cs['m']} d={cs['d']} q={cs['q']} s={cs['s']} r={cs['r']} c={cs['c']}"
        )
    if "contacts" in doc:
        lines.append(f"contact set: {doc['contact_set']}")
        for c in doc["contacts"]:
            lines.append(f"f{c['i']} ~ f{c['j']}: noc {_short(c['noc'])}, contact {_short(c['contact'])}, "
                         f"int {_short(c['int'])}")
    if "tree" in doc:
        lines.append(f"levels: {doc['tree']['levels']}")
        for b in doc["tree"]["buds"]:
            lines.append(
                f"{b['id']}: level {b['level']} stem {b['stem']} D={b['D']} D*={b['Dstar']} "
                f"S={_short(b['S'])} D'={b['Dprime']} D''={b['Ddprime']} parent={b['parent']}"
            )
    for s in doc.get("slices", []):
        mark = "" if s["predicted"] else " (not predicted)"
        ints = ", ".join(f"int(f{x['stem']})={_short(x['int'])}" for x in s["intersections"])
        lines.append(f"slice {s['bud']}: deg Omega' = {s['degree']} (D' = {s['Dprime']}){mark} {ints}".rstrip())
    if "verdicts" in doc:
        vs = doc["verdicts"]
        fails = [v for v in vs if v["status"] == "fail"]
        lines.append(f"verdicts: {sum(v['status'] == 'pass' for v in vs)} pass, "
                     f"{len(fails)} fail, {sum(v['status'] == 'skip' for v in vs)} skipped")
        for v in fails:
            lines.append(f"  FAIL {v['name']} [{v['where']}] {v['detail']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def _cmd_factor(args, ctx):
    F = parse(args.F)
    return _doc(args, ctx, F, fac=ctx.factor(F))


def _cmd_charseq(args, ctx):
    return _cmd_factor(args, ctx)


def _cmd_contact(args, ctx):
    F = parse(args.F)
    fac = ctx.factor(F)
    bs = fac.branches
    pairs = []
    for i, a in enumerate(bs):
        for j, b in enumerate(bs):
            if i != j:
                pairs.append({"i": i, "j": j, "noc": _q(noc(a, b)), "contact": _q(contact(a, b)),
                              "int": _q(int_branches(a, b))})
    extra = {"contact_set": [frac_str(c) for c in sorted(contact_set(fac))], "contacts": pairs}
    return _doc(args, ctx, F, fac=fac, extra=extra)


def _cmd_tree(args, ctx):
    F = parse(args.F)
    fac = ctx.factor(F)
    return _doc(args, ctx, F, fac=fac, T=tree_of(fac))


def _cmd_dfactor(args, ctx):
    from .slices import derivative_factorization

    F = parse(args.F)
    R = derivative_factorization(F, ctx)
    return _doc(args, ctx, F, fac=R.Ffac, T=R.tree, report=R)


def _cmd_jfactor(args, ctx):
    from .slices import jacobian_factorization

    F, G = parse(args.F), parse(args.G)
    R = jacobian_factorization(F, G, args.mode, ctx)
    return _doc(args, ctx, F, G, fac=R.Ffac, T=R.tree, report=R)


def _cmd_verify(args, ctx):
    from .families import check_instance, sample_family

    rng = random.Random(args.seed)
    verdicts = []
    inputs = []
    for _ in range(args.count):
        F, meta = sample_family(args.family, rng, args.n)
        inputs.append(pretty(F))
        sub = Context(args.precision, args.max_precision_factor)
        for v in check_instance(F, ctx=sub):
            v.where = f"#{len(inputs) - 1} {v.where}"
            verdicts.append(v)
    return {
        "command": "verify",
        "input": {"family": args.family, "n": args.n, "seed": args.seed, "count": args.count,
                  "parsed": f"{args.count} instances of {args.family}"},
        "instances": inputs,
        "verdicts": _verdicts_doc(verdicts),
    }


_COMMANDS = {
    "factor": _cmd_factor,
    "charseq": _cmd_charseq,
    "contact": _cmd_contact,
    "tree": _cmd_tree,
    "dfactor": _cmd_dfactor,
    "jfactor": _cmd_jfactor,
    "verify": _cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=Fraction, default=None, help="initial x-budget of every branch")
    common.add_argument("--max-precision-factor", type=int, default=DEFAULT_CAP_FACTOR,
                        help="refinement cap as a multiple of the base budget")
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="merocurve", description="Branches, contact trees and slices of meromorphic curves.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("factor", "charseq", "contact", "tree", "dfactor"):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("F")
    j = sub.add_parser("jfactor", parents=[common])
    j.add_argument("F")
    j.add_argument("G")
    j.add_argument("--mode", choices=["jacobian", "product"], default="jacobian")
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("--family", choices=["tr3", "tr4", "tr5"], required=True)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--count", type=int, default=10)
    return p


def run(argv) -> tuple[int, str]:
    """Run a command line; returns (exit status, output text)."""
    args = build_parser().parse_args(argv)
    try:
        with Context(args.precision, args.max_precision_factor) as ctx:
            doc = _COMMANDS[args.command](args, ctx)
    except HypothesisNotMet as ex:
        return 2, f"hypothesis not met: {ex}"
    except (MeroError, ArithmeticError) as ex:
        return 1, f"error: {type(ex).__name__}: {ex}"
    text = json.dumps(doc, indent=2) if args.json else _text(doc)
    failed = any(v["status"] == "fail" for v in doc.get("verdicts", []))
    return (1 if failed else 0), text


def main(argv=None) -> int:
    status, text = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if status == 0 else sys.stderr
    print(text, file=stream if status != 0 and not text.startswith("{") else sys.stdout)
    return status


if __name__ == "__main__":
    sys.exit(main())
