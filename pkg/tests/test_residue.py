from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, strategies as st

from cyclosums import (DomainError, FactoredRational, GaussianRational, IntegrandSpec, PrecisionCtx,
                       RootOfUnity, closure_total, extra_residue_sum, residue_at, rf_deriv, rf_eval,
                       rf_shifted_taylor, thm6_rhs)
from cyclosums.errors import PoleCollisionError
from cyclosums.residue import laurent_residue, numeric_residue

from conftest import dist

ctx30 = PrecisionCtx(digits=30, tol=1e-20)
gauss = st.builds(GaussianRational, st.fractions(-3, 3, max_denominator=4),
                  st.fractions(-2, 2, max_denominator=3))


def test_parse_forms():
    a = FactoredRational.parse("scale=2; zeros=[(i,1)]; poles=[(1/2,2),(-1/3+1/2i,1)]")
    assert a.scale == GaussianRational(2)
    assert a.pole_order("1/2") == 2 and a.pole_order("-1/3+1/2i") == 1
    assert a.excess == -2
    b = FactoredRational.parse('{"scale":"2","zeros":[{"point":"0+1i","mult":1}],'
                               '"poles":[{"point":"1/2","mult":2},{"point":"-1/3+1/2i","mult":1}]}')
    assert a == b
    assert FactoredRational.from_json(a.to_json()) == a


@pytest.mark.parametrize("text", ["poles=[(1/2,0)]", "poles=[(1/2,1),(1/2,2)]", "scale=0",
                                  "colour=[(1,1)]", '{"poles":[{"mult":1}]}'])
def test_parse_rejects(text):
    with pytest.raises(DomainError):
        FactoredRational.parse(text)


@given(st.lists(st.tuples(gauss, st.integers(1, 3)), min_size=1, max_size=3, unique_by=lambda t: t[0]),
       gauss)
def test_rf_deriv_finite_difference(poles, s0):
    r = FactoredRational(poles=tuple(poles))
    s = s0.to_mpc() + gmpy2.mpc("0.123+0.0457j")
    with ctx30.working():
        if min(float(abs(s - p.to_mpc())) for p, _ in poles) < 0.2:
            return
        h = gmpy2.mpfr("1e-8")
        fd = (rf_eval(r, s + h, ctx30).value - rf_eval(r, s - h, ctx30).value) / (2 * h)
        d1 = rf_deriv(r, 1, s, ctx30).value
        assert float(abs(fd - d1)) < 1e-9 * (1 + float(abs(d1)))
        fd2 = (rf_eval(r, s + h, ctx30).value - 2 * rf_eval(r, s, ctx30).value
               + rf_eval(r, s - h, ctx30).value) / h ** 2
        d2 = rf_deriv(r, 2, s, ctx30).value
        assert float(abs(fd2 - d2)) < 1e-5 * (1 + float(abs(d2)))


def test_shifted_taylor(ctx):
    r = FactoredRational(poles=(("1/4", 2), ("-2/3", 1)))
    c = rf_shifted_taylor(r, "1/4", 2, ctx)
    with ctx.working():
        a = gmpy2.mpfr(1) / 4 + gmpy2.mpfr(2) / 3
        assert float(abs(c[0].value - 1 / a)) < 1e-40
        assert float(abs(c[1].value + 1 / a ** 2)) < 1e-40
    with pytest.raises(DomainError):
        rf_shifted_taylor(r, "1/3", 2, ctx)


def test_integrand_validation():
    r2 = FactoredRational.parse("poles=[(1/4,2)]")
    with pytest.raises(DomainError):
        IntegrandSpec("H", (1,), ("1/2",), "1", FactoredRational.parse("poles=[(1/4,1)]"))
    IntegrandSpec("H", (1,), ("1/2",), "1", FactoredRational.parse("poles=[(1/4,1)]"), relaxed=True)
    with pytest.raises(PoleCollisionError):
        IntegrandSpec("H", (1,), ("1/2",), "1", FactoredRational.parse("poles=[(2,2)]"))
    with pytest.raises(PoleCollisionError):
        IntegrandSpec("G", (1,), ("1/2",), "1", FactoredRational.parse("poles=[(-3/2,2)]"))
    IntegrandSpec("G", (1,), ("1/2",), "1", FactoredRational.parse("poles=[(-1/2,2)]"))
    IntegrandSpec("H", (2,), ("1",), "1", FactoredRational.parse("poles=[(1/2,2)]"))
    with pytest.raises(DomainError):
        IntegrandSpec("K", (1,), ("1/2",), "1", r2)
    with pytest.raises(DomainError):
        IntegrandSpec("H", (1,), ("1",), "1", r2)


@pytest.mark.parametrize("kernel,center", [("H", -2), ("H", 0), ("H", 3), ("G", Fraction(-3, 2)),
                                           ("G", Fraction(-1, 2)), ("G", 1)])
def test_laurent_vs_cauchy(kernel, center, ctx):
    spec = IntegrandSpec(kernel, (1, 2), ("1/2", "1/3"), "1/4",
                         FactoredRational.parse("poles=[(1/4+1/3i,2)]"))
    a = laurent_residue(spec, GaussianRational(center), ctx)
    order = 3 if center <= 0 else 1
    b = numeric_residue(spec, GaussianRational(center), order, ctx)
    assert dist(a, b) < 1e-25


def test_rational_pole_residue(ctx):
    spec = IntegrandSpec("H", (1,), ("1/2",), "0/1", FactoredRational.parse("poles=[(1/4,2)]"))
    r = residue_at(spec, "1/4", ctx)
    assert not r.certified
    assert r.err < 1e-30


def test_closure_decreases():
    spec = IntegrandSpec("G", (2,), ("1/3",), "1/2", FactoredRational.parse("poles=[(1/3,2)]"))
    a = closure_total(spec, 50, ctx30)
    b = closure_total(spec, 100, ctx30)
    assert float(abs(b.total.value)) < float(abs(a.total.value)) < 1e-2


R_T6 = {"T61": "poles=[(0,2),(1/4,2)]", "T62": "poles=[(0,1),(1/4,2)]",
        "T63a": "poles=[(-1/2,1),(1/4,2)]", "T63b": "poles=[(0,2),(1/4,2)]"}
ARGS = {"T61": ((1,), ("1/2",)), "T62": ((1, 2), ("1/2", "1/3")),
        "T63a": ((1, 2), ("1/2", "1/3")), "T63b": ((2, 1), ("1/4", "1/2"))}


@pytest.mark.parametrize("which", list(R_T6))
def test_closed_form_matches_residues(which):
    ps, roots = ARGS[which]
    r = FactoredRational.parse(R_T6[which])
    x = RootOfUnity(1, 3)
    a = thm6_rhs(which, ps, roots, x, r, ctx30)
    b = extra_residue_sum(which, ps, roots, x, r, ctx30)
    assert dist(a, b) < 1e-18


@pytest.mark.parametrize("which", ["T63a", "T63b"])
def test_printed_variant_is_off(which):
    # the literal printed statements miss a factor x / use the wrong sign pattern
    ps, roots = ARGS[which]
    r = FactoredRational.parse(R_T6[which])
    x = RootOfUnity(1, 3)
    a = thm6_rhs(which, ps, roots, x, r, ctx30, printed=True)
    b = extra_residue_sum(which, ps, roots, x, r, ctx30)
    assert dist(a, b) > 1e-3


def test_pure_power_has_no_extra_poles():
    v = thm6_rhs("T61", (2,), ("1/2",), RootOfUnity(1, 4), FactoredRational.parse("poles=[(0,3)]"), ctx30)
    assert float(abs(v.value)) < 1e-18


def test_thm6_collision():
    with pytest.raises(PoleCollisionError):
        thm6_rhs("T63a", (1, 1), ("1/2", "1/2"), RootOfUnity(0, 1),
                 FactoredRational.parse("poles=[(0,2),(1/4,1)]"), ctx30)
    with pytest.raises(DomainError):
        thm6_rhs("T61", (1, 1), ("1/2", "1/2"), RootOfUnity(0, 1),
                 FactoredRational.parse("poles=[(0,2)]"), ctx30)
