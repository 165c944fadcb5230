from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cyclosums import DomainError, GaussianRational, RootOfUnity, bernoulli, even_zeta
from cyclosums.errors import InvalidOrderError
from cyclosums.exact import binom

from conftest import dist, mp_to_mpc

roots = st.builds(RootOfUnity, st.integers(-50, 50), st.integers(1, 12))


def test_root_parse_and_normalize():
    assert RootOfUnity.parse("2/4") == RootOfUnity(1, 2)
    assert RootOfUnity.parse("-1/3") == RootOfUnity(2, 3)
    assert RootOfUnity.parse("1").is_one and RootOfUnity.parse("0/1").is_one
    assert str(RootOfUnity(5, 4)) == "1/4"


@pytest.mark.parametrize("bad", ["x", "1/0", "1.5/2", ""])
def test_root_parse_rejects(bad):
    with pytest.raises(DomainError):
        RootOfUnity.parse(bad)


def test_zero_order():
    with pytest.raises(InvalidOrderError):
        RootOfUnity(1, 0)


@given(roots, roots)
def test_root_group_laws(a, b):
    assert a * b == b * a
    assert (a * a.inv()).is_one
    assert a ** a.N == RootOfUnity(0, 1)
    assert (a * b).inv() == a.inv() * b.inv()


@given(roots, st.integers(0, 1))
def test_sqrt_squares_back(a, branch):
    assert a.sqrt(branch) ** 2 == a
    assert a.sqrt(0) != a.sqrt(1)


def test_embed_matches_exp():
    import mpmath

    mpmath.mp.dps = 40
    z = RootOfUnity(2, 7).embed()
    assert dist(z, mp_to_mpc(mpmath.expjpi(mpmath.mpf(4) / 7))) < 1e-14


@pytest.mark.parametrize("text,re,im", [
    ("1/3+1/2i", Fraction(1, 3), Fraction(1, 2)),
    ("-2", Fraction(-2), Fraction(0)),
    ("-i", Fraction(0), Fraction(-1)),
    ("1/4-3i", Fraction(1, 4), Fraction(-3)),
    ("0.5", Fraction(1, 2), Fraction(0)),
])
def test_gaussian_parse(text, re, im):
    g = GaussianRational.parse(text)
    assert (g.re, g.im) == (re, im)
    assert GaussianRational.parse(str(g)) == g


@given(st.fractions(max_denominator=20), st.fractions(max_denominator=20),
       st.fractions(max_denominator=20), st.fractions(max_denominator=20))
def test_gaussian_field(a, b, c, d):
    x, y = GaussianRational(a, b), GaussianRational(c, d)
    assert (x + y) - y == x
    if y.abs2():
        assert (x / y) * y == x


def test_bernoulli_values():
    assert [bernoulli(n) for n in range(7)] == [1, Fraction(-1, 2), Fraction(1, 6), 0,
                                                Fraction(-1, 30), 0, Fraction(1, 42)]
    assert bernoulli(12) == Fraction(-691, 2730)


def test_even_zeta(ctx):
    import mpmath

    mpmath.mp.dps = 50
    for k in (1, 2, 5):
        assert dist(even_zeta(k, ctx), mp_to_mpc(mpmath.zeta(2 * k))) < 1e-38


def test_binom():
    assert binom(5, 2) == 10 and binom(3, 0) == 1 and binom(2, 3) == 0
