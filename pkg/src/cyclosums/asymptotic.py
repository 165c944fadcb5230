"""Nested sums over roots of unity via partial sums plus an asymptotic tail.

A nested sum is described by :class:`Nest` nodes.  A node stands for the
partial-sum function ``Z(n) = sum_{m=lower}^{n} s(m)`` whose summand ``s`` is
a combination of explicit factors times inner nodes evaluated at ``m + shift``.

Every factor and every inner node also has an asymptotic expansion in

    sum_w w^n sum_k log(n)^k sum_j c[w][k][j] n^-j ,

so the summand's expansion can be summed in closed form (an antidifference
``G`` with ``G(n) - G(n-1) = s(n)``).  Summing the head exactly up to ``M``
fixes the constant: ``Z(n) = G(n) + (Z(M) - G(M))``.  The value of a
convergent outer sum is that constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .context import CVal, PrecisionCtx, to_mpc
from .errors import AccuracyError, DivergenceError, DomainError, PoleError
from .exact import ONE, RootOfUnity, bernoulli, root_embed

Comp = list  # list over log power k of coefficient lists over j


def _mp(q) -> mpc:
    return to_mpc(q)


def _comp_zero(J: int, K: int = 1) -> Comp:
    return [[mpc(0)] * J for _ in range(K)]


def _comp_add(a: Comp, b: Comp) -> Comp:
    K = max(len(a), len(b))
    J = len(a[0]) if a else len(b[0])
    out = _comp_zero(J, K)
    for src in (a, b):
        for k, row in enumerate(src):
            o = out[k]
            for j, c in enumerate(row):
                o[j] = o[j] + c
    return out


def _comp_scale(a: Comp, c) -> Comp:
    return [[c * v for v in row] for row in a]


def _comp_mul(a: Comp, b: Comp, J: int) -> Comp:
    out = _comp_zero(J, len(a) + len(b) - 1)
    for ka, ra in enumerate(a):
        for kb, rb in enumerate(b):
            o = out[ka + kb]
            nzb = [(j, v) for j, v in enumerate(rb) if v != 0]
            for ja, va in enumerate(ra):
                if va == 0:
                    continue
                for jb, vb in nzb:
                    j = ja + jb
                    if j >= J:
                        break
                    o[j] += va * vb
    return out


def _comp_D(a: Comp, J: int) -> Comp:
    """d/dn of sum L^k n^-j:  -j L^k n^(-j-1) + k L^(k-1) n^(-j-1)."""
    out = _comp_zero(J, len(a))
    for k, row in enumerate(a):
        for j in range(J - 1):
            c = row[j]
            if c == 0:
                continue
            if j:
                out[k][j + 1] -= j * c
            if k:
                out[k - 1][j + 1] += k * c
    return out


def _comp_int(a: Comp, J: int, noise: mpfr) -> Comp:
    """An antiderivative; raises when a term behaves like L^k n^0."""
    out = _comp_zero(J, len(a) + 1)
    for k, row in enumerate(a):
        if abs(row[0]) > noise:
            raise DivergenceError("summand does not decay; partial sums grow linearly")
        if J > 1 and row[1] != 0:
            out[k + 1][0] += row[1] / (k + 1)
        for j in range(2, J):
            c = row[j]
            if c == 0:
                continue
            # int L^k n^-j = -n^(1-j) sum_i k!/(k-i)! L^(k-i) / (j-1)^(i+1)
            ff = 1
            for i in range(k + 1):
                out[k - i][j - 1] -= c * ff / mpfr(j - 1) ** (i + 1)
                ff *= k - i
    return out


def _comp_trim(a: Comp) -> Comp:
    while len(a) > 1 and all(v == 0 for v in a[-1]):
        a = a[:-1]
    return a


class Expansion:
    """Asymptotic expansion in n^-j log(n)^k, one component per root of unity."""

    __slots__ = ("J", "comp")

    def __init__(self, J: int, comp: dict | None = None) -> None:
        self.J = J
        self.comp: dict[RootOfUnity, Comp] = comp if comp is not None else {}

    @classmethod
    def constant(cls, c, J: int) -> "Expansion":
        row = [mpc(0)] * J
        row[0] = _mp(c)
        return cls(J, {ONE: [row]})

    @classmethod
    def monomial(cls, root: RootOfUnity, coeffs: Sequence, J: int) -> "Expansion":
        row = [mpc(0)] * J
        for j, c in enumerate(coeffs[:J]):
            row[j] = _mp(c)
        return cls(J, {root: [row]})

    def copy(self) -> "Expansion":
        return Expansion(self.J, {w: [list(r) for r in c] for w, c in self.comp.items()})

    def __add__(self, other: "Expansion") -> "Expansion":
        out = dict(self.comp)
        for w, c in other.comp.items():
            out[w] = _comp_add(out[w], c) if w in out else c
        return Expansion(self.J, out)

    def scale(self, c) -> "Expansion":
        c = _mp(c)
        return Expansion(self.J, {w: _comp_scale(v, c) for w, v in self.comp.items()})

    def __mul__(self, other: "Expansion") -> "Expansion":
        out: dict[RootOfUnity, Comp] = {}
        for wa, ca in self.comp.items():
            for wb, cb in other.comp.items():
                w = wa * wb
                p = _comp_mul(ca, cb, self.J)
                out[w] = _comp_add(out[w], p) if w in out else p
        return Expansion(self.J, {w: _comp_trim(c) for w, c in out.items()})

    def add_constant(self, c) -> "Expansion":
        return self + Expansion.constant(c, self.J)

    def shift(self, h: int) -> "Expansion":
        """The expansion of f(n + h) for an integer h."""
        if h == 0:
            return self
        J = self.J
        K = max(len(c) for c in self.comp.values()) if self.comp else 1
        # log(n+h) = L + ell,  ell = sum_{i>=1} (-1)^(i+1) h^i / (i n^i)
        ell = [mpc(0)] * J
        for i in range(1, J):
            ell[i] = _mp(Fraction((-1) ** (i + 1) * h ** i, i))
        ell_pows = [[mpc(1)] + [mpc(0)] * (J - 1)]
        for _ in range(1, K):
            ell_pows.append(_comp_mul([ell_pows[-1]], [ell], J)[0])
        out: dict[RootOfUnity, Comp] = {}
        for w, comp in self.comp.items():
            wh = root_embed(w ** h)
            res = _comp_zero(J, len(comp))
            for k, row in enumerate(comp):
                for j, c in enumerate(row):
                    if c == 0:
                        continue
                    # n^-j (1 + h/n)^-j
                    bser = [mpc(0)] * J
                    coef = Fraction(1)
                    for i in range(J - j):
                        bser[j + i] = c * _mp(coef)
                        coef = coef * (-j - i) * h / (i + 1)
                    for m in range(k + 1):
                        term = _comp_mul([bser], [ell_pows[m]], J)[0]
                        bm = math.comb(k, m)
                        tgt = res[k - m]
                        for jj, v in enumerate(term):
                            if v != 0:
                                tgt[jj] += bm * v
            out[w] = _comp_scale(res, wh)
        return Expansion(J, out)

    def evaluate(self, n: int) -> mpc:
        L = gmpy2.log(mpfr(n))
        ninv = 1 / mpfr(n)
        total = mpc(0)
        for w, comp in self.comp.items():
            acc = mpc(0)
            Lk = mpfr(1)
            for row in comp:
                s = mpc(0)
                for c in reversed(row):
                    s = s * ninv + c
                acc += Lk * s
                Lk *= L
            total += root_embed(w ** n) * acc
        return total

    def last_term_size(self, n: int) -> float:
        """Size of the highest retained order at n: a truncation-error proxy."""
        # two orders, since parity can make every other coefficient vanish
        L = math.log(n)
        tot = 0.0
        for comp in self.comp.values():
            for k, row in enumerate(comp):
                tail = max(float(abs(row[-1])), float(abs(row[-2])) * n)
                tot += tail * L ** k
        return tot * float(n) ** -(self.J - 1)

    def leading_size(self) -> float:
        return max((float(abs(r[0])) for c in self.comp.values() for r in c), default=0.0)


_osc_cache: dict[tuple[int, int, int, int], list[mpc]] = {}


def _osc_table(w: RootOfUnity, count: int) -> list[mpc]:
    """Taylor coefficients a_i of 1 / (1 - w^-1 e^-u)."""
    prec = gmpy2.get_context().precision
    key = (w.k, w.N, count, prec)
    tab = _osc_cache.get(key)
    if tab is None:
        winv = root_embed(w.inv())
        B = [1 - winv]
        fact = mpfr(1)
        for m in range(1, count):
            fact *= m
            B.append(-winv * (-1) ** m / fact)
        a = [1 / B[0]]
        for i in range(1, count):
            s = mpc(0)
            for m in range(1, i + 1):
                s += B[m] * a[i - m]
            a.append(-s / B[0])
        tab = _osc_cache[key] = a
    return tab


def antidifference(e: Expansion, noise: mpfr) -> Expansion:
    """G with G(n) - G(n-1) = e(n), up to an additive constant."""
    J = e.J
    out: dict[RootOfUnity, Comp] = {}
    for w, comp in e.comp.items():
        if w.is_one:
            # (1 - e^-D) H = h  =>  H = int h + h/2 + sum B_2k/(2k)! D^(2k-1) h
            res = _comp_int(comp, J, noise)
            res = _comp_add(res, _comp_scale(comp, mpfr(1) / 2))
            cur = comp
            for i in range(1, J):
                cur = _comp_D(cur, J)
                if i % 2 == 1:
                    b = bernoulli(i + 1) / math.factorial(i + 1)
                    res = _comp_add(res, _comp_scale(cur, _mp(b)))
            out[w] = _comp_trim(res)
        else:
            a = _osc_table(w, J)
            res = _comp_scale(comp, a[0])
            cur = comp
            for i in range(1, J):
                cur = _comp_D(cur, J)
                res = _comp_add(res, _comp_scale(cur, a[i]))
            out[w] = _comp_trim(res)
    return Expansion(J, out)


class Factor(Protocol):
    """An explicit summand factor with exact values and an expansion at infinity."""

    def heads(self, lo: int, hi: int) -> list[mpc]: ...

    def expansion(self, J: int) -> Expansion: ...

    def roots(self) -> tuple[RootOfUnity, ...]: ...

    def radius(self) -> float: ...


@dataclass(frozen=True)
class Power:
    """w^n prod (a n + b)^-e over ``lin`` triples (a, b, e)."""

    root: RootOfUnity = ONE
    lin: tuple = ()

    def __post_init__(self) -> None:
        lin = tuple((Fraction(a), Fraction(b), int(e)) for a, b, e in self.lin)
        for a, _, _ in lin:
            if a == 0:
                raise DomainError("linear factor with zero slope")
        object.__setattr__(self, "lin", lin)

    def heads(self, lo: int, hi: int) -> list[mpc]:
        w = [root_embed(RootOfUnity(self.root.k * i, self.root.N)) for i in range(self.root.N)]
        out = []
        for n in range(lo, hi + 1):
            v = w[n % self.root.N]
            for a, b, e in self.lin:
                t = a * n + b
                if t == 0:
                    raise PoleError(f"summand factor vanishes at n = {n}")
                v = v * mpfr(gmpy2.mpq(t.numerator, t.denominator)) ** (-e)
            out.append(v)
        return out

    def expansion(self, J: int) -> Expansion:
        ser = [Fraction(0)] * J
        ser[0] = Fraction(1)
        for a, b, e in self.lin:
            # (a n + b)^-e = a^-e n^-e sum_i C(-e, i) (b/a)^i n^-i
            f = [Fraction(0)] * J
            coef = a ** (-e)
            r = b / a
            for i in range(J - e if e > 0 else J):
                if e + i >= 0 and e + i < J:
                    f[e + i] = coef
                coef = coef * (-e - i) * r / (i + 1)
            ser = [sum(ser[i] * f[j - i] for i in range(j + 1)) for j in range(J)]
        return Expansion.monomial(self.root, ser, J)

    def roots(self) -> tuple[RootOfUnity, ...]:
        return (self.root,)

    def radius(self) -> float:
        return max((abs(float(b / a)) for a, b, _ in self.lin), default=0.0)


@dataclass(frozen=True)
class Term:
    """coeff * prod(factors) * prod(inner node at m + shift)."""

    coeff: object = 1
    factors: tuple = ()
    inner: tuple = ()


@dataclass(frozen=True)
class Nest:
    """Partial-sum function Z(n) = sum_{m=lower}^{n} sum_terms Term(m)."""

    terms: tuple
    lower: int = 0

    def __post_init__(self) -> None:
        for t in self.terms:
            for _, h in t.inner:
                if h > 0:
                    raise DomainError("inner sums may only be shifted by h <= 0")

    def nodes(self) -> list["Nest"]:
        out: list[Nest] = []
        for t in self.terms:
            for node, _ in t.inner:
                for sub in node.nodes():
                    if sub not in out:
                        out.append(sub)
        out.append(self)
        return out

    def depth(self) -> int:
        return 1 + max((node.depth() for t in self.terms for node, _ in t.inner), default=0)


def _lcm_order(nest: Nest) -> tuple[int, float]:
    L, rad = 1, 0.0
    for node in nest.nodes():
        for t in node.terms:
            for f in t.factors:
                for w in f.roots():
                    L = L * w.N // math.gcd(L, w.N)
                rad = max(rad, f.radius())
    return L, rad


@dataclass
class _State:
    M: int
    J: int
    heads: dict = field(default_factory=dict)
    exps: dict = field(default_factory=dict)
    errs: dict = field(default_factory=dict)
    root_G: Expansion | None = None


def _run(root: Nest, M: int, J: int, noise: mpfr) -> _State:
    st = _State(M, J)
    for node in root.nodes():
        lo = node.lower
        s_heads = [mpc(0)] * (M + 1)
        s_exp = Expansion(J)
        err_in = 0.0
        for t in node.terms:
            c = _mp(t.coeff)
            vals = [c] * (M + 1 - lo) if lo <= M else []
            ex = Expansion.constant(c, J)
            for f in t.factors:
                hv = f.heads(lo, M)
                vals = [a * b for a, b in zip(vals, hv)]
                ex = ex * f.expansion(J)
            for inner, h in t.inner:
                zh = st.heads[inner]
                vals = [v * (zh[m + h] if m + h >= 0 else 0) for m, v in zip(range(lo, M + 1), vals)]
                ex = ex * st.exps[inner].shift(h)
                err_in += st.errs[inner]
            for m, v in zip(range(lo, M + 1), vals):
                s_heads[m] += v
            s_exp = s_exp + ex
        Z = [mpc(0)] * (M + 1)
        acc = mpc(0)
        for m in range(M + 1):
            acc += s_heads[m]
            Z[m] = acc
        G = antidifference(s_exp, noise)
        C = Z[M] - G.evaluate(M)
        st.heads[node] = Z
        st.exps[node] = G.add_constant(C)
        st.errs[node] = 10 * G.last_term_size(M) + err_in
        st.root_G = G
    return st


def sum_nest(root: Nest, ctx: PrecisionCtx, digits: int | None = None) -> CVal:
    """Value of the convergent nested sum ``lim Z(n)`` for the node ``root``."""
    D = digits if digits is not None else ctx.series_digits()
    J = int(math.ceil(0.6 * D)) + 4
    L, rad = _lcm_order(root)
    base = (L / (2 * math.pi)) * math.exp((math.lgamma(J + 1) + D * math.log(10)) / J)
    M = max(int(math.ceil(base)), int(20 * rad) + 10, 16)
    with ctx.working():
        eps = mpfr(2) ** (-ctx.bits)
        noise = mpfr(2) ** (-ctx.bits // 2)
        target = 10.0 ** (-D)
        while True:
            if M > ctx.max_terms:
                raise AccuracyError(f"nested sum needs more than max_terms={ctx.max_terms} terms")
            st = _run(root, M, J, noise)
            G = st.root_G
            for w, comp in G.comp.items():
                lead = max(float(abs(r[0])) for r in comp)
                if lead > float(noise) * max(1.0, G.leading_size()) and lead > target:
                    raise DivergenceError("nested sum does not converge")
            value = st.heads[root][M] - G.evaluate(M)
            scale = max(float(abs(value)), max(float(abs(z)) for z in st.heads[root]), 1e-300)
            err = st.errs[root] + scale * float(eps) * M
            if err <= target * max(1.0, float(abs(value))) or 2 * M > ctx.max_terms:
                return CVal(value, err, False, M)
            M *= 2
