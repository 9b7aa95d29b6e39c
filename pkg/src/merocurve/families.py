"""Parameter families of test curves and the per-instance property checks.

The three families are the standard shapes: Y^n + kX^e with gcd(n, e) = 1,
the two-pair quartic (Y^2 - X^(2a+1))^2 - X^(3a+b+2) Y, and the degree n+2
curve splitting into a degree n and a degree 2 factor.  Each generator may
add random terms of high enough X-order that the contact structure stays
put; the checks do not rely on that, they hold for any squarefree input.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .charseq import char_seq, deformation_values, lambda_data, verify_np7
from .coeff import is_zero, ptrim
from .contact_tree import (
    in_tau,
    int_branches,
    noc,
    tree_of,
    verify_gnp7,
    verify_itp,
)
from .meropoly import MeroPoly, int_mult
from .newton import Context
from .series import INF
from .slices import Verdict, derivative_factorization, verify_sp_lemmas

__all__ = ["tr3", "tr4", "tr5", "FAMILIES", "sample_family", "check_instance", "vanishes_mod_budget"]

X, Y = MeroPoly.X, MeroPoly.Y


def _rat(rng: random.Random) -> Fraction:
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    return Fraction(num, rng.choice([1, 1, 2, 3]))


def _mono(c, i, j) -> MeroPoly:
    return MeroPoly.const(c) * X(i) * Y() ** j


def tr3(n: int, e: int, kappa=1, extra=()) -> MeroPoly:
    """Y^n + kappa X^e plus optional terms (c, i, j) above the edge."""
    F = Y() ** n + _mono(kappa, e, 0)
    for c, i, j in extra:
        F = F + _mono(c, i, j)
    return F


def tr4(a: int, b: int, extra=()) -> MeroPoly:
    F = (Y() ** 2 - X(2 * a + 1)) ** 2 - X(3 * a + b + 2) * Y()
    for c, i, j in extra:
        F = F + _mono(c, i, j)
    return F


def tr5(n: int, a: int = -1, kappa1=1, kappa=1, hat=None, kappas=(), extra=()) -> MeroPoly:
    """Y^(n+2) + k'X^(2a+1)Y^n + sum u_i Y^(n+2-i) + k X^((n+2)(a+1)).

    ``hat`` adds the k^ X^((n+1)(a+1)) Y term of the pure meromorphic case.
    """
    F = Y() ** (n + 2) + _mono(kappa1, 2 * a + 1, n)
    if kappa:
        F = F + _mono(kappa, (n + 2) * (a + 1), 0)
    if hat:
        F = F + _mono(hat, (n + 1) * (a + 1), 1)
    for i, c in kappas:
        F = F + _mono(c, i * (a + 1), n + 2 - i)
    for c, i, j in extra:
        F = F + _mono(c, i, j)
    return F


def _tr3_sample(rng, n=None):
    n = n or rng.choice([2, 3, 4, 5])
    while True:
        e = rng.choice([k for k in range(-7, 12) if k])
        if math.gcd(n, abs(e)) == 1:
            break
    extra = []
    for _ in range(rng.randint(0, 2)):
        j = rng.randrange(0, n)
        # i*n + j*e > n*e keeps the term above the edge
        i = math.floor(Fraction(n * e - j * e, n)) + 1 + rng.randint(0, 2)
        extra.append((_rat(rng), i, j))
    return tr3(n, e, _rat(rng), extra), dict(family="tr3", n=n, e=e)


def _tr4_sample(rng, n=None):
    a = rng.randint(-2, 2)
    b = rng.randint(0, 2)
    lam2 = Fraction(4 * a + 2 * b + 3, 4)
    extra = []
    for _ in range(rng.randint(0, 2)):
        j = rng.randrange(0, 4)
        low = lam2 + Fraction((3 - j) * (2 * a + 1), 2)
        i = math.floor(low) + 1 + rng.randint(0, 2)
        extra.append((_rat(rng), i, j))
    return tr4(a, b, extra), dict(family="tr4", a=a, b=b)


def _tr5_sample(rng, n=None):
    n = n or rng.choice([2, 3, 4])
    a = rng.choice([-1, -1, 0, 1])
    kappas = [(i, _rat(rng)) for i in range(3, n + 2) if rng.random() < 0.5]
    hat = _rat(rng) if a == -1 and rng.random() < 0.5 else None
    kappa = _rat(rng) if hat is None or rng.random() < 0.7 else 0
    F = tr5(n, a, _rat(rng), kappa, hat, [(i, c) for i, c in kappas if not (hat and i == n + 1)])
    return F, dict(family="tr5", n=n, a=a)


FAMILIES = {"tr3": _tr3_sample, "tr4": _tr4_sample, "tr5": _tr5_sample}


def sample_family(name: str, rng: random.Random, n=None):
    return FAMILIES[name](rng, n)


# ---------------------------------------------------------------------------
# checks


def vanishes_mod_budget(G: MeroPoly) -> bool:
    return all(not c.coeffs for c in G.coeffs.values())


def _level_checks(b, out):
    cs = char_seq(b)
    lams = set(cs.c) | {c + Fraction(1, 2) for c in cs.c} | {Fraction(-1), Fraction(0)}
    for lam in sorted(lams):
        ld = lambda_data(b, lam)
        ok = (
            0 <= ld.p <= ld.pstar <= cs.h
            and b.n % ld.Dstar == 0
            and ld.Dstar % ld.D == 0
            and (ld.S * b.n * ld.V).denominator == 1
            and not is_zero(ld.A)
            and len(ld.E) - 1 == ld.Dstar // ld.D
        )
        out.append(Verdict("level-integrality", f"n={b.n} lam={lam}", ok))
        out.append(Verdict("edge-initial-form", f"n={b.n} lam={lam}", verify_np7(b, lam)))


def check_instance(F: MeroPoly, G: MeroPoly | None = None, ctx: Context | None = None) -> list:
    ctx = ctx or Context()
    out: list = []
    with ctx:
        Ff = ctx.factor(F)
        bs = Ff.branches
        # roots and reconstruction
        for b in bs:
            out.append(Verdict("root", f"n={b.n}", vanishes_mod_budget(MeroPoly({0: b.evaluate(F)}))))
        out.append(Verdict("roundtrip", "F", vanishes_mod_budget(Ff.monic_part() * MeroPoly({0: Ff.content}) - F)))
        for b in bs:
            _level_checks(b, out)
        for i, a in enumerate(bs):
            for c in bs[i + 1:]:
                out.append(Verdict("contact-intersection", "pair", verify_gnp7(a, c) and verify_gnp7(c, a)))
                for d in bs:
                    if d is not a and d is not c:
                        out.append(Verdict("isosceles", "triple", verify_itp(a, c, d)))
        # intersection multiplicities by both routes
        FY = F.partial_y()
        pieces = {}
        for b in bs:
            pieces.setdefault(id(b.piece), (b.piece, []))[1].append(b)
        for piece, members in pieces.values():
            for g in (FY, F + Y()):
                if g.is_zero():
                    continue
                r = int_mult(piece, g, "resultant")
                s = sum(int_mult(b, g, "substitution") for b in members)
                out.append(Verdict("int_mult", f"deg={piece.deg_y}", r == s, f"{r} vs {s}"))
        T = tree_of(Ff)
        FYf = ctx.factor(FY)
        # edge behaviour of every branch in play
        for B in T:
            if not B.proper:
                continue
            zd, V, W = B.sample()
            for b in bs + FYf.branches:
                o, inco = deformation_values(b, zd, V, W)
                if in_tau(b, B):
                    ok = o == B.S * b.n * V and len(ptrim(inco)) - 1 == b.n // B.D
                    out.append(Verdict("edge-in-flower", B.id, ok, f"ord={o}"))
                else:
                    inco = ptrim(inco)
                    out.append(Verdict("edge-off-flower", B.id, len(inco) == 1 and not is_zero(inco[0])))
        out.extend(verify_sp_lemmas(F, G, T if G is None else None))
        R = derivative_factorization(F)
        out.extend(R.verdicts)
        acc = MeroPoly({0: R.Hfac.content})
        for B in R.tree:
            if B is not R.tree.root:
                acc = acc * R.assignment.product(R.assignment.omega_prime[B.id])
        out.append(Verdict("slice-reconstruction", "T", vanishes_mod_budget(acc - FY)))
    return out
