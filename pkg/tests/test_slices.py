import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from merocurve import Context, parse
from merocurve.coeff import ptrim
from merocurve.contact_tree import strict_friends, tree_of
from merocurve.errors import ConstantInput, MultipleFactors, ZeroArgument, ZeroG
from merocurve.families import sample_family
from merocurve.slices import (
    assign_slices,
    derivative_factorization,
    doubly_strict,
    friend_bud,
    jacobian_factorization,
    minco,
    pinco,
    sinco,
    split_inco,
    strength,
    verify_sp_lemmas,
)

F = Fraction
CUSP = "Y^4 + X^5"
QUARTIC = "(Y^2 - X^3)^2 - X^5*Y"


def entry(R, bud_id):
    return next(e for e in R.entries if e.bud.id == bud_id)


def test_minco_cusp(ctx):
    B1 = tree_of(parse(CUSP)).by_id("B1")
    zd, V, W = B1.sample()
    assert (V, W) == (4, 5)
    o, inco = minco(parse(CUSP), zd, V, W)
    assert o == 20 and inco == [1, 0, 0, 0, 1]
    assert sinco(parse(CUSP), B1) == [1, 0, 0, 0, 1]
    assert pinco(parse(CUSP), B1) == [1]
    FY = parse(CUSP).partial_y()
    assert sinco(FY, B1) == [1]
    assert pinco(FY, B1) == [0, 0, 0, 1]


def test_zero_h_split(ctx):
    B1 = tree_of(parse(CUSP)).by_id("B1")
    assert split_inco([], B1) == ([1], [1])
    assert sinco(parse("Y") - parse("Y"), B1) == [1]


def test_strength(ctx):
    T = tree_of(parse(CUSP))
    B1 = T.by_id("B1")
    assert strength(ctx.factor(parse(CUSP)), B1) == 5
    assert strength(parse(CUSP), B1) == 5
    assert strength(ctx.factor(parse("-X")), B1) == 1
    with pytest.raises(ZeroArgument):
        strength(parse("Y") - parse("Y"), B1)


def test_doubly_strict_cusp(ctx):
    B1 = tree_of(parse(CUSP)).by_id("B1")
    assert doubly_strict(ctx.factor(parse(CUSP)), B1) == (1, 1)
    assert doubly_strict(ctx.factor(parse("4*Y^3")), B1)[1] == 0


def test_doubly_strict_drop_quartic(ctx):
    G = parse(QUARTIC)
    T = tree_of(G)
    for bid, want in (("B1", 2), ("B2", 1)):
        B = T.by_id(bid)
        (fr,) = strict_friends(T, B)
        R = friend_bud(fr.stem, B.level)
        assert doubly_strict(ctx.factor(G), R)[1] == want
        assert doubly_strict(ctx.factor(G.partial_y()), R)[1] == want - 1


def test_assignment_quartic(ctx):
    Ff = ctx.factor(parse(QUARTIC))
    T = tree_of(Ff)
    A = assign_slices(ctx.factor(parse(QUARTIC).partial_y()), T)
    assert A.check()
    assert A.deg("omega_prime", "B1") == 1 and A.deg("omega_prime", "B2") == 2
    assert A.deg("omega_prime", "B0") == 0


def test_derivative_cusp(ctx):
    R = derivative_factorization(parse(CUSP))
    e = entry(R, "B1")
    assert (e.degree, e.Dprime, e.omega_degree, e.Ddprime) == (3, 3, 3, 3)
    assert [g for _, g, _ in e.intersections] == [15]
    assert R.ok


@pytest.mark.parametrize("a,b", [(1, 0), (-1, 1), (0, 2)])
def test_derivative_quartic(ctx, a, b):
    R = derivative_factorization(parse(f"(Y^2 - X^({2 * a + 1}))^2 - X^({3 * a + b + 2})*Y"))
    e1, e2 = entry(R, "B1"), entry(R, "B2")
    assert (e1.degree, e2.degree) == (1, 2)
    assert [g for _, g, _ in e1.intersections] == [4 * a + 2]
    assert [g for _, g, _ in e2.intersections] == [8 * a + 2 * b + 5]
    assert R.ok
    # F_Y = 4 f1 f2 with the content equal to 4
    assert R.Hfac.content.coeffs == {0: 4}


def test_derivative_quintic(ctx):
    R = derivative_factorization(parse("Y^5 + X^(-1)*Y^3 + Y + 1"))
    assert [e.bud.id for e in R.entries] == ["B0", "B1", "B2", "B2'"]
    assert [e.Dprime for e in R.entries] == [0, 2, 2, 0]
    assert [e.degree for e in R.entries] == [0, 2, 2, 0]
    assert R.ok


def test_derivative_quintic_pure(ctx):
    R = derivative_factorization(parse("Y^5 + X^(-1)*Y^3 + Y"))
    assert [e.Dprime for e in R.entries] == [0, 2, 2, 0]
    assert R.Ffac.chi == 3
    assert R.ok


def test_jacobian_quartic(ctx):
    R = jacobian_factorization(parse(QUARTIC), parse("Y"))
    pred = [e.bud.id for e in R.entries if e.predicted]
    assert pred == ["B2"]
    e = entry(R, "B2")
    assert e.degree == 2 and [g for _, g, _ in e.intersections] == [13]
    assert R.ok
    P = jacobian_factorization(parse(QUARTIC), parse("Y"), mode="product")
    assert [e.bud.id for e in P.entries if e.predicted] == ["B2"]
    assert P.ok


def test_lemmas_quartic_y(ctx):
    vs = verify_sp_lemmas(parse(QUARTIC), parse("Y"))
    assert not [v for v in vs if v.ok is False]
    transfers = [v for v in vs if v.name == "jacobian-transfer" and v.ok]
    assert [v.where for v in transfers] == ["B2"] and transfers[0].detail == "mu=-3/2"


def test_derivative_slice_cusp(ctx):
    vs = verify_sp_lemmas(parse(CUSP))
    assert [v.ok for v in vs if v.name == "derivative-slice"] == [True]
    assert len(pinco(parse(CUSP).partial_y(), tree_of(parse(CUSP)).by_id("B1"))) - 1 == 3


def test_errors(ctx):
    with pytest.raises(MultipleFactors):
        derivative_factorization(parse("(Y - X)^2"))
    with pytest.raises(ConstantInput):
        derivative_factorization(parse("X + 1"))
    with pytest.raises(ZeroG):
        jacobian_factorization(parse(CUSP), parse("Y") - parse("Y"))
    with pytest.raises(ValueError):
        jacobian_factorization(parse(CUSP), parse("Y"), mode="other")


@given(st.sampled_from(["tr3", "tr4", "tr5"]), st.integers(0, 10_000))
def test_slice_properties(fam, seed):
    Fp, _ = sample_family(fam, random.Random(seed))
    with Context():
        R = derivative_factorization(Fp)
        assert R.assignment.check()
        assert R.ok, [v.line() for v in R.verdicts if v.ok is False]
        vs = verify_sp_lemmas(Fp, None, R.tree)
        assert not [v.line() for v in vs if v.ok is False]
