"""Exact arithmetic: roots of unity, Gaussian rationals, Bernoulli numbers."""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, gcd

import gmpy2
from gmpy2 import mpc, mpfr

from .context import CVal, PrecisionCtx
from .errors import DomainError, InvalidOrderError


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """The point exp(2 pi i k / N), stored as the reduced fraction k/N."""

    k: int
    N: int

    def __post_init__(self) -> None:
        if self.N == 0:
            raise InvalidOrderError("root of unity with order N = 0")
        k, N = self.k, self.N
        if N < 0:
            k, N = -k, -N
        k %= N
        g = gcd(k, N)
        object.__setattr__(self, "k", k // g)
        object.__setattr__(self, "N", N // g)

    @classmethod
    def parse(cls, text: str | int) -> "RootOfUnity":
        """Read ``"k/N"``; ``"1"`` and ``"0/1"`` mean the root 1."""
        s = str(text).strip()
        if s in ("1", "0"):
            return cls(0, 1)
        m = re.fullmatch(r"([+-]?\d+)\s*/\s*(\d+)", s)
        if not m:
            raise DomainError(f"cannot parse root of unity {text!r}; expected k/N")
        return cls(int(m.group(1)), int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.k}/{self.N}"

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return root_mul(self, other)

    def inv(self) -> "RootOfUnity":
        return root_inv(self)

    def __pow__(self, e: int) -> "RootOfUnity":
        return RootOfUnity(self.k * e, self.N)

    @property
    def is_one(self) -> bool:
        return self.k == 0

    def sqrt(self, branch: int = 0) -> "RootOfUnity":
        """Square root: branch 0 is k/(2N), branch 1 is (k+N)/(2N)."""
        return RootOfUnity(self.k + (branch % 2) * self.N, 2 * self.N)

    def embed(self) -> mpc:
        return root_embed(self)


ONE = RootOfUnity(0, 1)
MINUS_ONE = RootOfUnity(1, 2)


def root_normalize(k: int, N: int) -> RootOfUnity:
    return RootOfUnity(k, N)


def root_mul(a: RootOfUnity, b: RootOfUnity) -> RootOfUnity:
    return RootOfUnity(a.k * b.N + b.k * a.N, a.N * b.N)


def root_inv(a: RootOfUnity) -> RootOfUnity:
    return RootOfUnity(-a.k, a.N)


_embed_cache: dict[tuple[int, int, int], mpc] = {}


def root_embed(a: RootOfUnity, ctx: PrecisionCtx | None = None) -> mpc:
    """exp(2 pi i k/N) at the current (or ``ctx``) precision."""
    if ctx is not None:
        with ctx.working():
            return root_embed(a)
    prec = gmpy2.get_context().precision
    key = (a.k, a.N, prec)
    z = _embed_cache.get(key)
    if z is None:
        # exact quarter turns keep x * x^-1 = 1 free of rounding
        quarter = {(0, 1): (1, 0), (1, 2): (-1, 0), (1, 4): (0, 1), (3, 4): (0, -1)}
        if (a.k, a.N) in quarter:
            z = mpc(*quarter[(a.k, a.N)])
        else:
            theta = 2 * gmpy2.const_pi() * a.k / a.N
            s, c = gmpy2.sin_cos(theta)
            z = mpc(c, s)
        _embed_cache[key] = z
    return z


def root_power_table(a: RootOfUnity) -> list[mpc]:
    """[a^0, a^1, ..., a^(N-1)] embedded at the current precision."""
    return [root_embed(RootOfUnity(a.k * j, a.N)) for j in range(a.N)]


def _frac(tok: str) -> Fraction:
    tok = tok.strip()
    if tok in ("", "+"):
        return Fraction(1)
    if tok == "-":
        return Fraction(-1)
    return Fraction(tok)


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number a + b i with rational a, b."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def parse(cls, text) -> "GaussianRational":
        """Accepts ``"a/b+c/di"``, ``"1/4"``, ``"-i"``, ``"2-3/5i"`` and numbers."""
        if isinstance(text, GaussianRational):
            return text
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text))
        s = str(text).replace(" ", "")
        if not s:
            raise DomainError("empty Gaussian rational")
        try:
            if not s.endswith("i"):
                return cls(Fraction(s))
            body = s[:-1]
            # split at the last sign that is not the leading one
            cut = max(body.rfind("+", 1), body.rfind("-", 1))
            if cut <= 0:
                return cls(Fraction(0), _frac(body))
            return cls(_frac(body[:cut]), _frac(body[cut:]))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse Gaussian rational {text!r}") from exc

    def __str__(self) -> str:
        im = self.im
        sign = "-" if im < 0 else "+"
        return f"{self.re}{sign}{abs(im)}i"

    def __add__(self, o) -> "GaussianRational":
        o = GaussianRational.parse(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o) -> "GaussianRational":
        return self + (-GaussianRational.parse(o))

    def __rsub__(self, o) -> "GaussianRational":
        return GaussianRational.parse(o) - self

    def __mul__(self, o) -> "GaussianRational":
        o = GaussianRational.parse(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o) -> "GaussianRational":
        o = GaussianRational.parse(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / d, -o.im / d)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def is_half_odd(self) -> bool:
        """True at the points n + 1/2."""
        return self.im == 0 and self.re.denominator == 2

    def to_mpc(self) -> mpc:
        return mpc(mpfr(gmpy2.mpq(self.re.numerator, self.re.denominator)),
                   mpfr(gmpy2.mpq(self.im.numerator, self.im.denominator)))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


_bern: list[Fraction] = [Fraction(1)]
_bern_lock = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """Exact B_n with B_1 = -1/2, from sum_{j<=m} C(m+1, j) B_j = 0."""
    if n < 0:
        raise DomainError("Bernoulli index must be non-negative")
    if n >= 3 and n % 2:
        return Fraction(0)
    if n < len(_bern):
        return _bern[n]
    with _bern_lock:
        while len(_bern) <= n:
            m = len(_bern)
            s = sum(comb(m + 1, j) * _bern[j] for j in range(m))
            _bern.append(-s / (m + 1))
    return _bern[n]


def even_zeta(k: int, ctx: PrecisionCtx) -> CVal:
    """zeta(2k) = (-1)^(k-1) B_2k (2 pi)^(2k) / (2 (2k)!)."""
    if k < 1:
        raise DomainError("even_zeta needs k >= 1")
    b = bernoulli(2 * k)
    with ctx.working():
        c = Fraction((-1) ** (k - 1)) * b / (2 * factorial(2 * k))
        v = mpfr(gmpy2.mpq(c.numerator, c.denominator)) * (2 * gmpy2.const_pi()) ** (2 * k)
        return CVal(mpc(v), float(abs(v)) * 10.0 ** (-ctx.work_digits + 2))


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)
