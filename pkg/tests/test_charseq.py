import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from merocurve import Context, parse
from merocurve.charseq import char_seq, lambda_data, np7_values, strength_at, verify_np7
from merocurve.coeff import canon_key, is_zero, ptrim
from merocurve.contact_tree import noc
from merocurve.errors import NotOnEdge
from merocurve.families import sample_family

F = Fraction


def branch(ctx, text, n=None):
    fac = ctx.factor(parse(text))
    bs = fac.branches
    return bs[0] if n is None else next(b for b in bs if b.n == n)


def test_charseq_cusp(ctx):
    cs = char_seq(branch(ctx, "Y^4 + X^5"))
    assert cs.h == 1 and cs.m == (4, 5) and cs.d == (0, 4, 1)
    assert cs.q[1] == 5 and cs.s[1] == 20 and cs.r[1] == 5 and cs.c == (F(5, 4),)


@pytest.mark.parametrize("a,b", [(1, 0), (-1, 1), (0, 2), (2, 1)])
def test_charseq_quartic(ctx, a, b):
    cs = char_seq(branch(ctx, f"(Y^2 - X^({2 * a + 1}))^2 - X^({3 * a + b + 2})*Y"))
    assert cs.h == 2
    assert cs.m == (4, 4 * a + 2, 4 * a + 2 * b + 3)
    assert cs.d == (0, 4, 2, 1)
    assert cs.q[2] == 2 * b + 1
    assert cs.s[2] == 16 * a + 4 * b + 10 and cs.r[2] == 8 * a + 2 * b + 5
    assert cs.c == (F(2 * a + 1, 2), F(4 * a + 2 * b + 3, 4))


def test_linear_y(ctx):
    assert char_seq(branch(ctx, "Y")).h == 0


def test_lambda_cusp_at_c1(ctx):
    ld = lambda_data(branch(ctx, "Y^4 + X^5"), F(5, 4))
    assert (ld.p, ld.pstar, ld.D, ld.Dstar, ld.S) == (0, 1, 1, 4, F(5, 4))
    assert ld.E == [1, 0, 0, 0, 1] and ld.Ahat == 1


def test_lambda_cusp_below(ctx):
    b = branch(ctx, "Y^4 + X^5")
    ld = lambda_data(b, 1)
    assert (ld.p, ld.pstar, ld.D, ld.Dstar, ld.S) == (0, 0, 1, 1, 1)
    assert ld.E == [-b.root.coeff_at(4), 1] == [0, 1]


def test_lambda_quartic_at_c1(ctx):
    ld = lambda_data(branch(ctx, "(Y^2 - X^3)^2 - X^5*Y"), F(3, 2))
    assert (ld.p, ld.pstar, ld.D, ld.Dstar, ld.S) == (0, 1, 1, 2, F(3, 2))


def test_edge_form_cusp(ctx):
    b = branch(ctx, "Y^4 + X^5")
    z = b.root
    assert np7_values(b, (z, 4, 4, 5)) == (20, [1, 0, 0, 0, 1])
    assert verify_np7(b, F(5, 4), (z, 4, 4, 5))
    o, inco = np7_values(b, (z, 4, 4, 4))
    assert o == 16 and inco == [0, 0, 0, 0, 1]
    assert verify_np7(b, 1, (z, 4, 4, 4))


def test_edge_form_linear(ctx):
    b = branch(ctx, "Y")
    for lam in (F(-3, 2), F(0), F(7, 3)):
        assert verify_np7(b, lam)


def test_edge_form_wrong_edge(ctx):
    b = branch(ctx, "Y^4 + X^5")
    with pytest.raises(NotOnEdge):
        verify_np7(b, F(5, 4), (b.root, 4, 4, 4))


def test_edge_form_routes_agree(ctx):
    b = branch(ctx, "(Y^2 - X^3)^2 - X^5*Y")
    for lam in (F(1), F(3, 2), F(13, 8), F(7, 4), F(2)):
        s = lambda_data(b, lam).sample()
        assert np7_values(b, s, "exact") == np7_values(b, s)


def _sweep(cs):
    cs_c = list(cs.c)
    lams = set(cs_c) | {cs_c[0] - 1 if cs_c else F(-1), (cs_c[-1] + 1) if cs_c else F(1)}
    lams |= {(x + y) / 2 for x, y in zip(cs_c, cs_c[1:])}
    return sorted(lams)


@given(st.sampled_from(["tr3", "tr4", "tr5"]), st.integers(0, 10_000))
def test_level_invariants(fam, seed):
    F_, _ = sample_family(fam, random.Random(seed))
    with Context() as c:
        for b in c.factor(F_).branches:
            cs = char_seq(b)
            assert cs.d[1] == cs.m[0] == b.n and cs.d[-1] == 1
            assert all(x < y for x, y in zip(cs.m[1:], cs.m[2:]))
            assert all(c_.denominator != 1 for c_ in cs.c[1:])
            noninteger = cs.noninteger_c()
            for lam in _sweep(cs):
                ld = lambda_data(b, lam)
                # integrality of p, D, D*, S n V
                assert 0 <= ld.p <= ld.pstar <= cs.h
                assert b.n % ld.Dstar == 0 and ld.Dstar % ld.D == 0
                assert (ld.S * b.n * ld.V).denominator == 1
                assert not is_zero(ld.A)
                # D* > D exactly at the non-integer contact values
                roots_distinct = len(ptrim(ld.E)) - 1
                assert (ld.Dstar > ld.D) == (lam in noninteger)
                assert (roots_distinct > 1) == (ld.Dstar > ld.D)
                # the truncations carry the leading part of the sequence
                assert ld.t.n == ld.D and ld.tstar.n == ld.Dstar
                assert char_seq(ld.t).h == ld.p and char_seq(ld.tstar).h == ld.pstar
                assert char_seq(ld.t).c == cs.c[: ld.p]
                # truncations stay in contact at level lam
                assert noc(b, ld.t) >= lam and noc(b, ld.tstar) > lam
                # edge initial form, and strength consistency
                assert verify_np7(b, lam)
                assert strength_at(b, lam) == ld.S
