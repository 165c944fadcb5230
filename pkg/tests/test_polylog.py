import gmpy2
import mpmath
import pytest
from hypothesis import given, strategies as st

from cyclosums import DivergenceError, DomainError, RootOfUnity, li, t_partial, ti, zeta_partial
from cyclosums.exact import root_embed

from conftest import dist, frozen

# mpmath.polylog(p, e^{2 pi i k/N}) at 50 digits
LI = {
    (2, 1, 3): ("-0.548311355616075478824138388882008396406317", "0.676627737606435750014135036183013523961126"),
    (3, 1, 4): ("-0.112692834671211964256225452641698436634217", "0.96894614625936938048363484584691860006954"),
    (1, 1, 2): ("-0.6931471805599453094172321214581765680755", "0"),
    (1, 2, 5): ("-0.642965390638326817399069290018731121448993", "0.314159265358979323846264338327950288419717"),
    (4, 0, 1): ("1.08232323371113819151600369654116790277475", "0"),
    (2, 3, 6): ("-0.822467033424113218236207583323012594609475", "0"),
}
# x * mpmath.lerchphi(x, p, 1/2)
TI = {
    (2, 1, 3): ("-2.10741701493771039501574527776733374175978", "3.11612403345710346793058532807614608371329"),
    (3, 1, 4): ("-0.27736852549505602331034886056271179354082", "7.94441216199981251972370408345533434413998"),
    (1, 1, 2): ("-1.57079632679489661923132169163975144209858", "0"),
    (2, 0, 1): ("4.93480220054467930941724549993807556765685", "0"),
    (3, 2, 5): ("-6.37233313511924937207383877204429300201792", "4.4691957926351323965400981303242031697326"),
}


@pytest.mark.parametrize("key", list(LI))
def test_li_frozen(key, ctx):
    p, k, N = key
    assert dist(li(p, RootOfUnity(k, N), ctx), frozen(LI[key])) < 1e-38


@pytest.mark.parametrize("key", list(TI))
def test_ti_frozen(key, ctx):
    p, k, N = key
    assert dist(ti(p, RootOfUnity(k, N), ctx), frozen(TI[key])) < 1e-38


def test_divergent_weight_one(ctx):
    with pytest.raises(DivergenceError):
        li(1, RootOfUnity(0, 1), ctx)
    with pytest.raises(DivergenceError):
        ti(1, RootOfUnity(0, 1), ctx)
    with pytest.raises(DomainError):
        li(0, RootOfUnity(1, 2), ctx)


@given(st.integers(0, 40), st.integers(1, 4), st.integers(0, 5), st.integers(1, 6))
def test_partial_sums_direct(n, p, k, N):
    from cyclosums import PrecisionCtx

    ctx = PrecisionCtx(digits=30)
    x = RootOfUnity(k, N)
    with ctx.working():
        z = sum((root_embed(x ** j) / gmpy2.mpfr(j) ** p for j in range(1, n + 1)), gmpy2.mpc(0))
        t = sum((root_embed(x ** j) / (gmpy2.mpfr(j) - gmpy2.mpfr("0.5")) ** p
                 for j in range(1, n + 1)), gmpy2.mpc(0))
        assert dist(zeta_partial(n, p, x, ctx), z) < 1e-30
        assert dist(t_partial(n, p, x, ctx), t) < 1e-30


@given(st.integers(2, 5), st.integers(0, 7), st.integers(1, 8))
def test_li_conjugate_symmetry(p, k, N):
    from cyclosums import PrecisionCtx

    ctx = PrecisionCtx(digits=30)
    x = RootOfUnity(k, N)
    a, b = li(p, x, ctx), li(p, x.inv(), ctx)
    with ctx.working():
        assert dist(a.value, b.value.conjugate()) < 1e-30


@given(st.integers(2, 5), st.integers(0, 5), st.integers(1, 6))
def test_li_distribution(p, k, N):
    # Li_p(x) + Li_p(-x) = 2^(1-p) Li_p(x^2)
    from cyclosums import PrecisionCtx

    ctx = PrecisionCtx(digits=30)
    x = RootOfUnity(k, N)
    lhs = li(p, x, ctx) + li(p, x * RootOfUnity(1, 2), ctx)
    rhs = li(p, x ** 2, ctx)
    with ctx.working():
        assert dist(lhs, rhs.value * gmpy2.mpfr(2) ** (1 - p)) < 1e-30


def test_ti_against_lerch(ctx):
    mpmath.mp.dps = 50
    x = RootOfUnity(3, 7)
    z = mpmath.expjpi(mpmath.mpf(6) / 7)
    ref = z * mpmath.lerchphi(z, 4, mpmath.mpf(1) / 2)
    v = ti(4, x, ctx).value
    assert abs(complex(v) - complex(ref)) < 1e-14
