"""Kernel functions phi(s;x), Phi(s;x) and their local expansions.

``phi_deriv(p, s, x)`` is the normalized derivative
``(-1)^(p-1) phi^(p-1)(s;x) / (p-1)! = sum_{k>=0} x^k / (k+s)^p``.
``Phi(s;x) = phi(s;x) - phi(-s;1/x) - 1/s``; at x = 1 it is pi cot(pi s).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .context import CVal, PrecisionCtx, to_mpc
from .errors import DivergenceError, DomainError, PoleError
from .exact import GaussianRational, RootOfUnity, binom, root_embed
from .numeric import digamma_raw, hurwitz_raw
from .polylog import li, t_partial, ti, zeta_partial


def _as_point(s) -> mpc:
    if isinstance(s, str):
        return GaussianRational.parse(s).to_mpc()
    return to_mpc(s)


def _is_int(s: mpc) -> bool:
    return gmpy2.is_zero(s.imag) and gmpy2.is_integer(s.real)


def phi_raw(p: int, s: mpc, x: RootOfUnity) -> tuple[mpc, float]:
    """sum_{k>=0} x^k/(k+s)^p at the ambient precision, with an error bound."""
    if p < 1:
        raise DomainError("derivative order p must be >= 1")
    if _is_int(s) and s.real <= 0:
        raise PoleError(f"phi has a pole at s = {s.real}")
    N = x.N
    total = mpc(0)
    err = 0.0
    if p == 1:
        if x.is_one:
            raise DivergenceError("phi(s;1) diverges")
        # the divergent parts of the digamma terms cancel because sum_j x^j = 0
        for j in range(N):
            v, e = digamma_raw((s + j) / N)
            total += root_embed(RootOfUnity(x.k * j, N)) * v
            err += e
        return -total / N, err / N
    for j in range(N):
        v, e = hurwitz_raw(p, (s + j) / N)
        total += root_embed(RootOfUnity(x.k * j, N)) * v
        err += e
    scale = mpfr(N) ** (-p)
    return total * scale, err * float(scale)


def Phi_raw(s: mpc, x: RootOfUnity) -> tuple[mpc, float]:
    if _is_int(s):
        raise PoleError(f"Phi has a pole at the integer s = {s.real}")
    if x.is_one:
        pi = gmpy2.const_pi()
        v = pi * gmpy2.cos(pi * s) / gmpy2.sin(pi * s)
        return v, float(abs(v)) * 2.0 ** (-gmpy2.get_context().precision + 6)
    a, ea = phi_raw(1, s, x)
    b, eb = phi_raw(1, -s, x.inv())
    return a - b - 1 / s, ea + eb


def phi_deriv(p: int, s, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """sum_{k>=0} x^k / (k+s)^p, i.e. (-1)^(p-1) phi^(p-1)(s;x)/(p-1)!."""
    with ctx.working():
        v, e = phi_raw(p, _as_point(s), x)
        return CVal(v, e, True)


def Phi(s, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    with ctx.working():
        v, e = Phi_raw(_as_point(s), x)
        return CVal(v, e, True)


def phi_bracket(m: int, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """(-1)^m Li_{m+1}(x) - Li_{m+1}(1/x); at x = 1 the cot-expansion limit."""
    if m < 0:
        raise DomainError("bracket index must be >= 0")
    if x.is_one:
        if m % 2 == 0:
            return CVal(mpc(0), 0.0)
        return li(m + 1, x, ctx) * -2
    return li(m + 1, x, ctx) * (-1) ** m - li(m + 1, x.inv(), ctx)


def ti_bracket(m: int, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """(-1)^m ti_{m+1}(x) - x ti_{m+1}(1/x); at x = 1 the tan-expansion limit."""
    if m < 0:
        raise DomainError("bracket index must be >= 0")
    if x.is_one:
        if m % 2 == 0:
            return CVal(mpc(0), 0.0)
        return ti(m + 1, x, ctx) * -2
    with ctx.working():
        return ti(m + 1, x, ctx) * (-1) ** m - ti(m + 1, x.inv(), ctx) * root_embed(x)


_KINDS = ("neg_int", "pos_int", "int", "neg_half", "pos_half")


@dataclass(frozen=True)
class ExpansionPoint:
    """Centre of a local expansion: -n, n, n (any sign), -n-1/2 or 1/2."""

    kind: str
    n: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown expansion point kind {self.kind!r}")
        if self.kind in ("neg_int", "neg_half") and self.n < 0:
            raise DomainError(f"{self.kind} needs n >= 0")
        if self.kind == "pos_int" and self.n < 1:
            raise DomainError("pos_int needs n >= 1")

    @property
    def center(self) -> Fraction:
        if self.kind == "neg_int":
            return Fraction(-self.n)
        if self.kind in ("pos_int", "int"):
            return Fraction(self.n)
        if self.kind == "neg_half":
            return Fraction(-2 * self.n - 1, 2)
        return Fraction(1, 2)

    @classmethod
    def at(cls, c: Fraction) -> "ExpansionPoint":
        """The point for an integer or half-integer centre."""
        c = Fraction(c)
        if c.denominator == 1:
            return cls("neg_int", -int(c)) if c <= 0 else cls("pos_int", int(c))
        if c == Fraction(1, 2):
            return cls("pos_half")
        if c.denominator == 2 and c < 0:
            return cls("neg_half", int(-c - Fraction(1, 2)))
        raise DomainError(f"no expansion point at {c}")


@dataclass
class LaurentSeries:
    """sum_{k in principal} c_k (s-c)^k + sum_{k < trunc} taylor[k] (s-c)^k."""

    center: Fraction
    principal: dict = field(default_factory=dict)
    taylor: list = field(default_factory=list)

    @property
    def trunc_order(self) -> int:
        return len(self.taylor)

    @property
    def pole_order(self) -> int:
        return -min(self.principal, default=0)

    def coefficients(self) -> tuple[int, list[mpc]]:
        """(lowest order, coefficient list) with the principal part first."""
        lo = min(self.principal, default=0)
        out = [self.principal[k].value if k in self.principal else mpc(0) for k in range(lo, 0)]
        out += [c.value for c in self.taylor]
        return lo, out

    def evaluate(self, s, ctx: PrecisionCtx) -> CVal:
        with ctx.working():
            h = _as_point(s) - to_mpc(self.center)
            total = CVal(mpc(0), 0.0)
            for k, c in self.principal.items():
                total = total + c * h ** k
            hk = mpc(1)
            for c in self.taylor:
                total = total + c * hk
                hk *= h
            return total


def _phi_neg_int(n: int, p: int, x: RootOfUnity, trunc: int, ctx: PrecisionCtx, half: bool):
    with ctx.working():
        xn = root_embed(x ** n)
        xinv = x.inv()
        xi = root_embed(xinv)
        out = []
        for k in range(trunc):
            c = binom(k + p - 1, p - 1)
            if half:
                part = ti(k + p, x, ctx) * ((-1) ** k * xi) + t_partial(n, k + p, xinv, ctx) * (-1) ** p
            else:
                part = li(k + p, x, ctx) * (-1) ** k + zeta_partial(n, k + p, xinv, ctx) * (-1) ** p
            out.append(part * (c * xn))
        principal = {} if half else {-p: CVal(xn, 0.0)}
        return principal, out


def _phi_pos_int(n: int, p: int, x: RootOfUnity, trunc: int, ctx: PrecisionCtx, half: bool):
    with ctx.working():
        pref = root_embed(x ** (-n - 1)) if half else root_embed(x ** (-n))
        out = []
        for k in range(trunc):
            c = binom(k + p - 1, p - 1) * (-1) ** k
            if half:
                part = ti(k + p, x, ctx) - t_partial(n, k + p, x, ctx)
            else:
                part = li(k + p, x, ctx) - zeta_partial(n - 1, k + p, x, ctx)
            out.append(part * (c * pref))
        return {}, out


def laurent(point: ExpansionPoint, which: str, p: int, x: RootOfUnity, trunc: int,
            ctx: PrecisionCtx) -> LaurentSeries:
    """Local expansion of phi_p(s;x), phi_p(s+1/2;x) or Phi(s;x) about ``point``.

    ``which`` is ``"phi_p"``, ``"phi_half_p"`` or ``"Phi"``; ``p`` is ignored
    for ``Phi``.  ``trunc`` Taylor coefficients are returned.
    """
    if trunc < 1:
        raise DomainError("trunc must be >= 1")
    kind, n = point.kind, point.n
    if kind == "int" and which != "Phi":
        point = ExpansionPoint.at(Fraction(n))
        kind, n = point.kind, point.n
    if which in ("phi_p", "phi_half_p"):
        if p < 1:
            raise DomainError("p must be >= 1")
        if p == 1 and x.is_one:
            raise DivergenceError("phi(s;1) diverges")
    if which == "phi_p" and kind == "neg_int":
        pr, tay = _phi_neg_int(n, p, x, trunc, ctx, half=False)
    elif which == "phi_p" and kind == "pos_int":
        pr, tay = _phi_pos_int(n, p, x, trunc, ctx, half=False)
    elif which == "phi_p" and kind == "pos_half":
        # phi(s) about 1/2 is phi(u + 1/2) about u = 0
        pr, tay = _phi_neg_int(0, p, x, trunc, ctx, half=True)
    elif which == "phi_p" and kind == "neg_half":
        pr, tay = _phi_neg_int(n + 1, p, x, trunc, ctx, half=True)
    elif which == "phi_half_p" and kind == "neg_int":
        pr, tay = _phi_neg_int(n, p, x, trunc, ctx, half=True)
    elif which == "phi_half_p" and kind == "pos_int":
        pr, tay = _phi_pos_int(n, p, x, trunc, ctx, half=True)
    elif which == "phi_half_p" and kind == "neg_half":
        # phi(s + 1/2) about -n-1/2 is phi about -n
        pr, tay = _phi_neg_int(n, p, x, trunc, ctx, half=False)
    elif which == "phi_half_p" and kind == "pos_half":
        pr, tay = _phi_pos_int(1, p, x, trunc, ctx, half=False)
    elif which == "Phi" and kind in ("int", "neg_int", "pos_int"):
        m = int(point.center)
        with ctx.working():
            pref = root_embed(x ** (-m))
            pr = {-1: CVal(pref, 0.0)}
            tay = [phi_bracket(k, x, ctx) * pref for k in range(trunc)]
    elif which == "Phi" and kind == "neg_half":
        with ctx.working():
            pref = root_embed(x ** n)
            pr = {}
            tay = [ti_bracket(k, x, ctx) * pref for k in range(trunc)]
    elif which == "Phi" and kind == "pos_half":
        with ctx.working():
            pref = root_embed(x.inv())
            pr = {}
            tay = [ti_bracket(k, x, ctx) * pref for k in range(trunc)]
    else:
        raise DomainError(f"no expansion of {which} at {kind}")
    return LaurentSeries(point.center, pr, tay)
