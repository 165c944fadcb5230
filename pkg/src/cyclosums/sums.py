"""Cyclotomic Euler sums (S, T, R, S~) and multiple values (CMZV, CMtV, CMSV, CMTV, CMRV)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .asymptotic import Nest, Power, Term, sum_nest
from .context import CVal, PrecisionCtx
from .errors import DivergenceError, DomainError, UnsupportedDepthError
from .exact import ONE, RootOfUnity, root_embed
from .numeric import fit_limit
from .polylog import li, ti

EULER_KINDS = ("S", "T", "R", "Stilde")
MV_KINDS = ("CMZV", "CMtV", "CMSV", "CMTV", "CMRV")
HALF = Fraction(1, 2)


def _root(r) -> RootOfUnity:
    return r if isinstance(r, RootOfUnity) else RootOfUnity.parse(r)


@dataclass(frozen=True)
class SumSpec:
    """One sum instance.  ``q``/``x`` are used by the Euler kinds only."""

    kind: str
    exps: tuple = ()
    roots: tuple = ()
    q: int = 0
    x: RootOfUnity = ONE

    def __post_init__(self) -> None:
        kind = {"S~": "Stilde", "St": "Stilde"}.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "exps", tuple(int(e) for e in self.exps))
        object.__setattr__(self, "roots", tuple(_root(r) for r in self.roots))
        object.__setattr__(self, "x", _root(self.x))
        object.__setattr__(self, "q", int(self.q))
        self.validate()

    def validate(self) -> None:
        if self.kind not in EULER_KINDS + MV_KINDS:
            raise DomainError(f"unknown sum kind {self.kind!r}")
        if len(self.exps) != len(self.roots):
            raise DomainError("exps and roots must have equal length")
        if any(e < 1 for e in self.exps):
            raise DomainError("exponents must be positive integers")
        if self.kind in EULER_KINDS:
            if self.q < 1:
                raise DomainError("outer exponent q must be a positive integer")
            if self.q == 1 and self.x.is_one:
                raise DivergenceError("(q,x)=(1,1) diverges")
        else:
            if not self.exps:
                raise DomainError("multiple values need depth >= 1")
            if len(self.exps) > 3:
                raise UnsupportedDepthError("multiple values are evaluated up to depth 3")
            if self.exps[-1] == 1 and self.roots[-1].is_one:
                raise DivergenceError("(k_r,x_r)=(1,1) diverges")

    @property
    def is_euler(self) -> bool:
        return self.kind in EULER_KINDS

    @classmethod
    def from_json(cls, d: dict) -> "SumSpec":
        try:
            return cls(d["kind"], tuple(d.get("exps", ())), tuple(d.get("roots", ())),
                       int(d.get("q", 0)), d.get("x", "0/1"))
        except KeyError as exc:
            raise DomainError(f"sum spec is missing field {exc}") from exc

    def to_json(self) -> dict:
        out = {"kind": self.kind, "exps": list(self.exps), "roots": [str(r) for r in self.roots]}
        if self.is_euler:
            out["q"] = self.q
            out["x"] = str(self.x)
        return out

    def orders(self) -> list[int]:
        return [r.N for r in self.roots] + ([self.x.N] if self.is_euler else [])


# denominators (a n + b) of the inner partial sums and the outer term
_EULER_SHAPES = {
    "S": ((1, 0), (1, 0), 1),
    "T": ((1, -HALF), (1, -HALF), 1),
    "R": ((1, 0), (1, HALF), 0),
    "Stilde": ((1, -HALF), (1, 0), 1),
}


def euler_nest(spec: SumSpec) -> Nest:
    (ia, ib), (oa, ob), lower = _EULER_SHAPES[spec.kind]
    inner = tuple(
        (Nest((Term(1, (Power(r, ((ia, ib, p),)),)),), 1), 0)
        for p, r in zip(spec.exps, spec.roots)
    )
    return Nest((Term(1, (Power(spec.x, ((oa, ob, spec.q),)),), inner),), lower)


def _mv_linear(kind: str, j: int, r: int) -> tuple[int, Fraction]:
    """(a, b) of the level-j denominator (a n_j + b), levels counted from 1."""
    if kind == "CMZV":
        return 1, Fraction(0)
    if kind == "CMtV":
        return 1, -HALF
    if kind == "CMSV":
        return 2, Fraction(1 - j)
    if kind == "CMTV":
        return 2, Fraction(-j)
    return (2, Fraction(-1)) if j == r else (2, Fraction(0))


def mv_nest(spec: SumSpec) -> tuple[Nest, int]:
    """Nested description of a multiple value and its 2^r (or 1) normalization."""
    r = len(spec.exps)
    node = None
    for j in range(1, r + 1):
        a, b = _mv_linear(spec.kind, j, r)
        f = Power(spec.roots[j - 1], ((a, b, spec.exps[j - 1]),))
        inner = ((node, -1),) if node is not None else ()
        node = Nest((Term(1, (f,), inner),), j)
    norm = 2 ** r if spec.kind in ("CMSV", "CMTV", "CMRV") else 1
    return node, norm


def euler_sum(spec: SumSpec, ctx: PrecisionCtx) -> CVal:
    """Value of an S, T, R or S~ sum at roots of unity."""
    if not spec.is_euler:
        raise DomainError(f"{spec.kind} is not an Euler-sum kind")
    if not spec.exps:
        if spec.kind == "R":
            with ctx.working():
                return ti(spec.q, spec.x, ctx) * root_embed(spec.x.inv())
        if spec.kind == "T":
            return ti(spec.q, spec.x, ctx)
        return li(spec.q, spec.x, ctx)
    return sum_nest(euler_nest(spec), ctx)


def multiple_value(spec: SumSpec, ctx: PrecisionCtx) -> CVal:
    """Value of a depth 1-3 multiple zeta / t / S / T / R value."""
    if spec.is_euler:
        raise DomainError(f"{spec.kind} is not a multiple-value kind")
    if len(spec.exps) == 1:
        k, x = spec.exps[0], spec.roots[0]
        if spec.kind == "CMZV":
            return li(k, x, ctx)
        if spec.kind == "CMtV":
            return ti(k, x, ctx)
        if spec.kind == "CMSV":
            return li(k, x, ctx) * Fraction(2, 2 ** k)
        # 2 sum x^n / (2n-1)^k
        return ti(k, x, ctx) * Fraction(2, 2 ** k)
    node, norm = mv_nest(spec)
    return sum_nest(node, ctx) * norm


def evaluate(spec: SumSpec, ctx: PrecisionCtx) -> CVal:
    return euler_sum(spec, ctx) if spec.is_euler else multiple_value(spec, ctx)


def msv_from_R(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """Double S-value through the linear R-sum: y 2^(2-p-q) R_{p;q}(x;y)."""
    R = euler_sum(SumSpec("R", (p,), (x,), q, y), ctx)
    with ctx.working():
        return R * (root_embed(y) * mpfr(2) ** (2 - p - q))


def msv3_from_R(p: int, q: int, r: int, x: RootOfUnity, y: RootOfUnity, z: RootOfUnity,
                ctx: PrecisionCtx) -> CVal:
    """Triple S-value: yz 2^(3-p-q-r) (Li_r(z) R_{p;q}(x;y) - R_{p,r;q}(x,z;y))."""
    R1 = euler_sum(SumSpec("R", (p,), (x,), q, y), ctx)
    R2 = euler_sum(SumSpec("R", (p, r), (x, z), q, y), ctx)
    with ctx.working():
        return (li(r, z, ctx) * R1 - R2) * (root_embed(y * z) * mpfr(2) ** (3 - p - q - r))


def mtv_from_Stilde(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """Double T-value through the linear S~-sum: y 2^(2-p-q) S~_{p;q}(x;y)."""
    S = euler_sum(SumSpec("Stilde", (p,), (x,), q, y), ctx)
    with ctx.working():
        return S * (root_embed(y) * mpfr(2) ** (2 - p - q))


def mtv3_from_Stilde(p: int, q: int, r: int, x: RootOfUnity, y: RootOfUnity, z: RootOfUnity,
                     ctx: PrecisionCtx) -> CVal:
    """Triple T-value: yz 2^(3-p-q-r) (ti_r(z) S~_{p;q}(x;y) - S~_{p,r;q}(x,z;y))."""
    S1 = euler_sum(SumSpec("Stilde", (p,), (x,), q, y), ctx)
    S2 = euler_sum(SumSpec("Stilde", (p, r), (x, z), q, y), ctx)
    with ctx.working():
        return (ti(r, z, ctx) * S1 - S2) * (root_embed(y * z) * mpfr(2) ** (3 - p - q - r))


# ---------------------------------------------------------------------------
# brute-force reference


def _term_table(x: RootOfUnity) -> list[mpc]:
    return [root_embed(RootOfUnity(x.k * i, x.N)) for i in range(x.N)]


def _recip_pow(a: int, b: Fraction, e: int, n: int) -> mpfr:
    t = a * n + b
    return mpfr(gmpy2.mpq(t.numerator, t.denominator)) ** (-e)


def _oracle_partials(spec: SumSpec, terms: int) -> list[mpc]:
    """Outer partial sums S(1..terms) of the literal nested definition."""
    out = []
    if spec.is_euler:
        (ia, ib), (oa, ob), lower = _EULER_SHAPES[spec.kind]
        inner = [mpc(0)] * len(spec.exps)
        itabs = [_term_table(r) for r in spec.roots]
        otab = _term_table(spec.x)
        total = mpc(0)
        if lower == 0:
            # n = 0 contributes only when there are no inner sums
            if not spec.exps:
                total += otab[0] * _recip_pow(oa, ob, spec.q, 0)
        for n in range(1, terms + 1):
            for i, (p, tab) in enumerate(zip(spec.exps, itabs)):
                inner[i] += tab[n % len(tab)] * _recip_pow(ia, ib, p, n)
            prod = otab[n % len(otab)] * _recip_pow(oa, ob, spec.q, n)
            for v in inner:
                prod *= v
            total += prod
            out.append(total)
        return out
    r = len(spec.exps)
    tabs = [_term_table(x) for x in spec.roots]
    lin = [_mv_linear(spec.kind, j, r) for j in range(1, r + 1)]
    norm = 2 ** r if spec.kind in ("CMSV", "CMTV", "CMRV") else 1
    Z = [mpc(0)] * (r + 1)
    Z[0] = mpc(1)
    for n in range(1, terms + 1):
        # Z_j(n) = Z_j(n-1) + f_j(n) Z_{j-1}(n-1); update top-down to use old values
        for j in range(r, 0, -1):
            if n < j:
                continue
            a, b = lin[j - 1]
            f = tabs[j - 1][n % len(tabs[j - 1])] * _recip_pow(a, b, spec.exps[j - 1], n)
            Z[j] += f * Z[j - 1]
        out.append(Z[r] * norm)
    return out


def nested_oracle(spec: SumSpec, terms: int, ctx: PrecisionCtx) -> CVal:
    """Literal truncated nested summation with a fitted tail.

    The outer partial sums are sampled at multiples of the common period L of
    all roots, where every oscillating factor w^n equals one.  There the partial
    sums behave like c_0 + sum c_jk n^-j log(n)^k, and a least-squares fit of
    that form gives c_0.  The spread between two fit sizes is the error estimate.
    """
    if terms < 10:
        raise DomainError("nested_oracle needs terms >= 10")
    L = 1
    for N in spec.orders():
        L = L * N // math.gcd(L, N)
    with ctx.working():
        partial = _oracle_partials(spec, terms)
        # each inner partial sum can contribute one power of log n to the tail
        logs = len(spec.exps) if spec.is_euler else len(spec.exps) - 1
        value, err = fit_limit(partial, L, max(1, logs), ctx)
        return CVal(value, err, False, terms)
