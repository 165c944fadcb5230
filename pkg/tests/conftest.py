import gmpy2
import mpmath
import pytest
from hypothesis import settings

from cyclosums import PrecisionCtx, RootOfUnity

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture
def ctx():
    return PrecisionCtx(digits=40)


def frozen(pair) -> gmpy2.mpc:
    re, im = pair
    with gmpy2.context(gmpy2.get_context(), precision=200):
        return gmpy2.mpc(gmpy2.mpfr(re), gmpy2.mpfr(im))


def dist(a, b) -> float:
    va = getattr(a, "value", a)
    vb = getattr(b, "value", b)
    with gmpy2.context(gmpy2.get_context(), precision=256):
        return float(abs(gmpy2.mpc(va) - gmpy2.mpc(vb)))


def mp_to_mpc(z) -> gmpy2.mpc:
    z = mpmath.mpc(z)
    with gmpy2.context(gmpy2.get_context(), precision=256):
        return gmpy2.mpc(gmpy2.mpfr(mpmath.nstr(z.real, 60)), gmpy2.mpfr(mpmath.nstr(z.imag, 60)))


def root(text: str) -> RootOfUnity:
    return RootOfUnity.parse(text)
