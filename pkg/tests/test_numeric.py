from fractions import Fraction

import gmpy2
import pytest

from cyclosums import PrecisionCtx
from cyclosums.errors import DivergenceError
from cyclosums.numeric import (cauchy_coefficient, cauchy_taylor, digamma, fit_limit, hurwitz_zeta,
                               oscillatory_sum)
from cyclosums.exact import RootOfUnity

from conftest import dist, frozen

# mpmath.zeta(p, a) and mpmath.digamma at 50 digits
HURWITZ = {
    (2, Fraction(1, 3)): ("10.0955971254270940817920040998925163605189", "0"),
    (3, Fraction(5, 4)): ("0.663869968768460166668983589421994943644905", "0"),
    (5, Fraction(7, 2)): ("0.0028331666461138068073095040363719669711546", "0"),
}
DIGAMMA = {
    Fraction(1, 3): ("-3.13203378002080632299641907428726885415543", "0"),
    Fraction(5, 4): ("-0.227453533376265408089530146096683577367244", "0"),
    Fraction(2): ("0.422784335098467139393487909917597568957841", "0"),
}


def _q(f: Fraction):
    return gmpy2.mpq(f.numerator, f.denominator)


@pytest.mark.parametrize("key", list(HURWITZ))
def test_hurwitz_frozen(key, ctx):
    p, a = key
    v = hurwitz_zeta(p, _q(a), ctx)
    assert v.certified
    assert dist(v, frozen(HURWITZ[key])) < 1e-38


@pytest.mark.parametrize("a", list(DIGAMMA))
def test_digamma_frozen(a, ctx):
    assert dist(digamma(_q(a), ctx), frozen(DIGAMMA[a])) < 1e-38


def test_hurwitz_rejects_p1(ctx):
    with pytest.raises(DivergenceError):
        hurwitz_zeta(1, 1, ctx)


def test_hurwitz_complex_shift(ctx):
    # zeta(2, a) - zeta(2, a + 1) = a^-2
    with ctx.working():
        a = gmpy2.mpc("0.3+0.7j")
        d = hurwitz_zeta(2, a, ctx).value - hurwitz_zeta(2, a + 1, ctx).value
        assert float(abs(d - a ** -2)) < 1e-38


def test_cauchy_exp(ctx):
    with ctx.working():
        coeffs = cauchy_taylor(gmpy2.exp, 0, "0.5", 6, ctx)
        for k, c in enumerate(coeffs):
            assert float(abs(c.value - 1 / gmpy2.fac(k))) < 1e-30
        # residue of exp(s)/s^3 at 0 is 1/2
        r = cauchy_coefficient(lambda s: gmpy2.exp(s) / s ** 3, 0, "0.25", -1, ctx)
        assert float(abs(r.value - gmpy2.mpfr("0.5"))) < 1e-30


def test_oscillatory_sum_log2(ctx):
    # sum (-1)^n / n = -log 2
    v = oscillatory_sum(lambda n: gmpy2.mpfr(1) / n, RootOfUnity(1, 2), ctx)
    with ctx.working():
        assert float(abs(v.value + gmpy2.log(2))) < 1e-20
    assert not v.certified


def test_fit_limit_synthetic():
    ctx = PrecisionCtx(digits=30)
    with ctx.working():
        c0 = gmpy2.mpfr("1.25")
        partial = [gmpy2.mpc(c0 + gmpy2.mpfr(1) / n - gmpy2.log(n) / n ** 2 + gmpy2.mpfr(3) / n ** 3)
                   for n in range(1, 4001)]
        v, err = fit_limit(partial, 2, 1, ctx)
        assert float(abs(v - c0)) < 1e-15
        assert err < 1e-10
