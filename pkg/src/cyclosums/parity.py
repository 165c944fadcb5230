"""Explicit parity identities for linear and quadratic R / S~ sums, and their checker.

Every ``rhs_*`` function assembles the closed-form right-hand side from
``li``, ``ti``, the two kernel brackets and (for the quadratic theorems) linear
Euler sums.  The matching ``lhs_*`` functions evaluate the signed pair of sums
directly, so a check compares two independent computations.

Theorem ids:

* ``T31``: x^-1 y^-1 R_{p;q}(y; 1/(xy)) - (-1)^(p+q) R_{p;q}(1/y; xy)
* ``T32``: X^-1 R_{p1,p2;q}(x1,x2; 1/X) + (-1)^(p1+p2+q) R_{p1,p2;q}(1/x1,1/x2; X), X = x x1 x2
* ``T41``: y^-1 S~_{p;q}(y; 1/(xy)) - (-1)^(p+q) S~_{p;q}(1/y; xy)
* ``T42``: (x1 x2)^-1 S~_{p1,p2;q}(x1,x2; 1/X) + (-1)^(p1+p2+q) S~_{p1,p2;q}(1/x1,1/x2; X)
* ``SPLIT_S`` / ``SPLIT_R``: multiple S- and R-values against signed sums of
  multiple polylogarithms at square-root arguments.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .context import CVal, PrecisionCtx, to_mpc
from .errors import CycloError, DivergenceError, DomainError, UnsupportedDepthError
from .exact import RootOfUnity, binom, root_embed
from .kernels import phi_bracket, ti_bracket
from .polylog import li, ti
from .sums import SumSpec, euler_sum, msv_from_R, multiple_value

THEOREMS = ("T31", "T32", "T41", "T42", "SPLIT_S", "SPLIT_R")

_ZERO = CVal(to_mpc(0), 0.0)


def _e(x: RootOfUnity):
    return root_embed(x)


def _require(p: int, x: RootOfUnity, what: str) -> None:
    if p < 1:
        raise DomainError(f"{what}: exponent must be >= 1")
    if p == 1 and x.is_one:
        raise DivergenceError(f"{what}=(1,1) diverges")


def _R(p: int, q: int, a: RootOfUnity, b: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    return euler_sum(SumSpec("R", (p,), (a,), q, b), ctx)


def _St(p: int, q: int, a: RootOfUnity, b: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    return euler_sum(SumSpec("Stilde", (p,), (a,), q, b), ctx)


def _swaps(p1: int, p2: int, x1: RootOfUnity, x2: RootOfUnity):
    """(p_s1, p_s2, x_s1, x_s2) for both orderings of the pair."""
    return ((p1, p2, x1, x2), (p2, p1, x2, x1))


# ---------------------------------------------------------------------------
# linear R-sums


def rhs_T31(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    _require(p, y, "(p,y)")
    _require(q, x * y, "(q,xy)")
    xy = x * y
    sq = (-1) ** q
    with ctx.working():
        xyi = _e(xy.inv())
        yi = _e(y.inv())
        lp = li(p, y, ctx)
        out = lp * ti(q, xy.inv(), ctx)
        out = out + lp * ti(q, xy, ctx) * (sq * xyi)
        out = out + ti(p + q, xy, ctx) * (sq * binom(p + q - 1, p) * xyi)
        for m in range(p):
            c = sq * binom(p + q - m - 2, q - 1)
            out = out + phi_bracket(m, x, ctx) * ti(p + q - m - 1, xy, ctx) * (c * xyi)
        for m in range(q):
            c = sq * binom(p + q - m - 2, p - 1)
            out = out + ti(p + q - m - 1, y, ctx) * ti_bracket(m, x.inv(), ctx) * (c * yi)
        return out


def lhs_T31(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    _require(p, y, "(p,y)")
    _require(q, x * y, "(q,xy)")
    xy = x * y
    a = _R(p, q, y, xy.inv(), ctx)
    b = _R(p, q, y.inv(), xy, ctx)
    with ctx.working():
        return a * _e(xy.inv()) - b * (-1) ** (p + q)


# ---------------------------------------------------------------------------
# quadratic R-sums


def _check_quadratic(p1, p2, q, x, x1, x2) -> None:
    _require(p1, x1, "(p1,x1)")
    _require(p2, x2, "(p2,x2)")
    _require(q, x * x1 * x2, "(q,x x1 x2)")


def rhs_T32(p1: int, p2: int, q: int, x: RootOfUnity, x1: RootOfUnity, x2: RootOfUnity,
            ctx: PrecisionCtx) -> CVal:
    _check_quadratic(p1, p2, q, x, x1, x2)
    X = x * x1 * x2
    Xi = X.inv()
    sq = (-1) ** q
    with ctx.working():
        eXi = _e(Xi)
        out = -(li(p1, x1, ctx) * li(p2, x2, ctx) * ti(q, Xi, ctx))
        for a1, a2, y1, y2 in _swaps(p1, p2, x1, x2):
            out = out + li(a1, y1, ctx) * _R(a2, q, y2, Xi, ctx) * eXi
        out = out - ti(q + p1 + p2, X, ctx) * (sq * binom(q + p1 + p2 - 1, q - 1) * eXi)
        for a1, a2, y1, y2 in _swaps(p1, p2, x1, x2):
            for k in range(a1 + 1):
                c = sq * binom(k + a2 - 1, a2 - 1) * binom(q + a1 - k - 1, q - 1)
                brace = (li(k + a2, y2, ctx) * ti(q + a1 - k, X, ctx) * ((-1) ** k * eXi)
                         + _R(k + a2, a1 + q - k, y2.inv(), X, ctx) * (-1) ** a2)
                out = out - brace * c
        for k in range(p1 + p2):
            c = sq * binom(q + p1 + p2 - k - 2, q - 1)
            out = out - phi_bracket(k, x, ctx) * ti(q + p1 + p2 - k - 1, X, ctx) * (c * eXi)
        out = out - li(p1, x1, ctx) * li(p2, x2, ctx) * ti(q, X, ctx) * (sq * eXi)
        for a1, a2, y1, y2 in _swaps(p1, p2, x1, x2):
            out = out - li(a1, y1, ctx) * _R(a2, q, y2.inv(), X, ctx) * (sq * (-1) ** a2)
        for a1, a2, y1, y2 in _swaps(p1, p2, x1, x2):
            for k1 in range(a1):
                for k2 in range(a1 - k1):
                    c = sq * binom(k2 + a2 - 1, a2 - 1) * binom(q + a1 - k1 - k2 - 2, q - 1)
                    e = q + a1 - k1 - k2 - 1
                    brace = (li(k2 + a2, y2, ctx) * ti(e, X, ctx) * ((-1) ** k2 * eXi)
                             + _R(k2 + a2, e, y2.inv(), X, ctx) * (-1) ** a2)
                    out = out - phi_bracket(k1, x, ctx) * brace * c
        for k1, k2, k3 in _compositions3(q - 1):
            c = (-1) ** (k2 + k3) * binom(k2 + p1 - 1, p1 - 1) * binom(k3 + p2 - 1, p2 - 1)
            out = out - (ti_bracket(k1, x, ctx) * ti(k2 + p1, x1, ctx) * ti(k3 + p2, x2, ctx)
                         * (c * eXi))
        return out


def lhs_T32(p1: int, p2: int, q: int, x: RootOfUnity, x1: RootOfUnity, x2: RootOfUnity,
            ctx: PrecisionCtx) -> CVal:
    _check_quadratic(p1, p2, q, x, x1, x2)
    X = x * x1 * x2
    a = euler_sum(SumSpec("R", (p1, p2), (x1, x2), q, X.inv()), ctx)
    b = euler_sum(SumSpec("R", (p1, p2), (x1.inv(), x2.inv()), q, X), ctx)
    with ctx.working():
        return a * _e(X.inv()) + b * (-1) ** (p1 + p2 + q)


def _compositions3(n: int):
    for k1 in range(n + 1):
        for k2 in range(n - k1 + 1):
            yield k1, k2, n - k1 - k2


# ---------------------------------------------------------------------------
# linear S~-sums


def rhs_T41(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    _require(p, y, "(p,y)")
    _require(q, x * y, "(q,xy)")
    xy = x * y
    sq = (-1) ** q
    with ctx.working():
        xyi = _e(xy.inv())
        yi = _e(y.inv())
        tp = ti(p, y, ctx)
        out = li(q, xy.inv(), ctx) * tp * yi
        out = out + li(q, xy, ctx) * tp * (sq * yi)
        out = out + ti(p + q, y, ctx) * (sq * binom(p + q - 1, p - 1) * yi)
        for m in range(p):
            c = sq * binom(p + q - m - 2, q - 1)
            out = out + ti(p + q - m - 1, xy, ctx) * ti_bracket(m, x, ctx) * (c * xyi)
        for m in range(q):
            c = sq * binom(p + q - m - 2, p - 1)
            out = out + ti(p + q - m - 1, y, ctx) * phi_bracket(m, x.inv(), ctx) * (c * yi)
        return out


def lhs_T41(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    _require(p, y, "(p,y)")
    _require(q, x * y, "(q,xy)")
    xy = x * y
    a = _St(p, q, y, xy.inv(), ctx)
    b = _St(p, q, y.inv(), xy, ctx)
    with ctx.working():
        return a * _e(y.inv()) - b * (-1) ** (p + q)


# ---------------------------------------------------------------------------
# quadratic S~-sums


def rhs_T42(p1: int, p2: int, q: int, x: RootOfUnity, x1: RootOfUnity, x2: RootOfUnity,
            ctx: PrecisionCtx) -> CVal:
    _check_quadratic(p1, p2, q, x, x1, x2)
    X = x * x1 * x2
    Xi = X.inv()
    sq = (-1) ** q
    with ctx.working():
        eXi = _e(Xi)
        e12i = _e((x1 * x2).inv())
        tt = ti(p1, x1, ctx) * ti(p2, x2, ctx)
        out = -(tt * li(q, Xi, ctx) * e12i)
        out = out - tt * li(q, X, ctx) * (sq * e12i)
        for a1, a2, y1, y2 in _swaps(p1, p2, x1, x2):
            out = out + ti(a1, y1, ctx) * _St(a2, q, y2, Xi, ctx) * e12i
        for a1, a2, y1, y2 in _swaps(p1, p2, x1, x2):
            out = out - (ti(a1, y1, ctx) * _St(a2, q, y2.inv(), X, ctx)
                         * (sq * (-1) ** a2 * _e(y1.inv())))
        for k in range(p1 + p2):
            c = sq * binom(p1 + p2 + q - k - 2, q - 1)
            out = out - ti_bracket(k, x, ctx) * ti(p1 + p2 + q - k - 1, X, ctx) * (c * eXi)
        for a1, a2, y1, y2 in _swaps(p1, p2, x1, x2):
            for k1 in range(a1):
                for k2 in range(a1 - k1):
                    c = sq * binom(a1 + q - k1 - k2 - 2, q - 1) * binom(k2 + a2 - 1, a2 - 1)
                    e = q + a1 - k1 - k2 - 1
                    brace = (li(k2 + a2, y2, ctx) * ti(e, X, ctx) * ((-1) ** k2 * eXi)
                             + _R(k2 + a2, e, y2.inv(), X, ctx) * (-1) ** a2)
                    out = out - ti_bracket(k1, x, ctx) * brace * c
        for k1 in range(q + 1):
            k2 = q - k1
            c = sq * binom(p1 + k1 - 1, p1 - 1) * binom(p2 + k2 - 1, p2 - 1)
            out = out - ti(p1 + k1, x1, ctx) * ti(p2 + k2, x2, ctx) * (c * e12i)
        for k1, k2, k3 in _compositions3(q - 1):
            c = (-1) ** (k2 + k3) * binom(k2 + p1 - 1, p1 - 1) * binom(k3 + p2 - 1, p2 - 1)
            out = out - (phi_bracket(k1, x, ctx) * ti(k2 + p1, x1, ctx) * ti(k3 + p2, x2, ctx)
                         * (c * e12i))
        return out


def lhs_T42(p1: int, p2: int, q: int, x: RootOfUnity, x1: RootOfUnity, x2: RootOfUnity,
            ctx: PrecisionCtx) -> CVal:
    _check_quadratic(p1, p2, q, x, x1, x2)
    X = x * x1 * x2
    a = euler_sum(SumSpec("Stilde", (p1, p2), (x1, x2), q, X.inv()), ctx)
    b = euler_sum(SumSpec("Stilde", (p1, p2), (x1.inv(), x2.inv()), q, X), ctx)
    with ctx.working():
        return a * _e((x1 * x2).inv()) + b * (-1) ** (p1 + p2 + q)


# ---------------------------------------------------------------------------
# square-root splitting of multiple S- and R-values


def _check_split(ks, roots) -> None:
    if len(ks) != len(roots) or not ks:
        raise DomainError("k-vector and root-vector must be nonempty and of equal length")
    if len(ks) > 3:
        raise UnsupportedDepthError("splitting identities are evaluated up to depth 3")
    if any(k < 1 for k in ks):
        raise DomainError("exponents must be >= 1")
    if ks[-1] == 1 and roots[-1].is_one:
        raise DivergenceError("(k_r,x_r)=(1,1) diverges")


def split_terms(kind: str, ks, roots, ctx: PrecisionCtx, branch: int = 0) -> list[tuple[tuple, CVal]]:
    """Per-sign contributions ``(signs, weight * (Li_k(s sqrt x) - e Li_k(1/(s sqrt x))))``.

    ``kind`` is ``"S"`` (weights prod s_j^(j-1)) or ``"R"`` (weight s_r).  The
    common prefactor is not included.
    """
    r = len(ks)
    w = sum(ks)
    sign = (-1) ** (w + r)
    half = [x.sqrt(branch) for x in roots]
    out = []
    for sig in itertools.product((1, -1), repeat=r):
        zs = [h if s == 1 else h * RootOfUnity(1, 2) for h, s in zip(half, sig)]
        a = multiple_value(SumSpec("CMZV", ks, zs), ctx)
        b = multiple_value(SumSpec("CMZV", ks, [z.inv() for z in zs]), ctx)
        if kind == "S":
            weight = 1
            for j, s in enumerate(sig):
                weight *= s ** j
        else:
            weight = sig[-1]
        with ctx.working():
            out.append((sig, (a - b * sign) * weight))
    return out


def _split_rhs(kind: str, ks, roots, ctx: PrecisionCtx, branch: int) -> CVal:
    half = [x.sqrt(branch) for x in roots]
    with ctx.working():
        if kind == "S":
            pref = to_mpc(1)
            for j, h in enumerate(half):
                pref *= _e(h) ** j
        else:
            pref = _e(half[-1])
        total = _ZERO
        for _, v in split_terms(kind, ks, roots, ctx, branch):
            total = total + v
        return total * pref


def split_msv(ks, roots, ctx: PrecisionCtx, branch: int = 0) -> tuple[CVal, CVal]:
    """(S-value parity combination, signed square-root polylog sum)."""
    ks = tuple(int(k) for k in ks)
    roots = tuple(RootOfUnity.parse(r) if not isinstance(r, RootOfUnity) else r for r in roots)
    _check_split(ks, roots)
    r = len(ks)
    sign = (-1) ** (sum(ks) + r)
    a = multiple_value(SumSpec("CMSV", ks, roots), ctx)
    b = multiple_value(SumSpec("CMSV", ks, [x.inv() for x in roots]), ctx)
    twist = RootOfUnity(0, 1)
    for j, x in enumerate(roots):
        twist = twist * x ** j
    with ctx.working():
        lhs = a - b * (sign * _e(twist))
    return lhs, _split_rhs("S", ks, roots, ctx, branch)


def split_mrv(ks, roots, ctx: PrecisionCtx, branch: int = 0) -> tuple[CVal, CVal]:
    """(R-value parity combination, signed square-root polylog sum)."""
    ks = tuple(int(k) for k in ks)
    roots = tuple(RootOfUnity.parse(r) if not isinstance(r, RootOfUnity) else r for r in roots)
    _check_split(ks, roots)
    r = len(ks)
    sign = (-1) ** (sum(ks) + r)
    a = multiple_value(SumSpec("CMRV", ks, roots), ctx)
    b = multiple_value(SumSpec("CMRV", ks, [x.inv() for x in roots]), ctx)
    with ctx.working():
        lhs = a - b * (sign * _e(roots[-1]))
    return lhs, _split_rhs("R", ks, roots, ctx, branch)


# ---------------------------------------------------------------------------
# double S-values through the linear R identity


def msv_parity_direct(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """S_{p,q}(x,y) - (-1)^(p+q) y S_{p,q}(1/x,1/y) from two double S-values."""
    a = multiple_value(SumSpec("CMSV", (p, q), (x, y)), ctx)
    b = multiple_value(SumSpec("CMSV", (p, q), (x.inv(), y.inv())), ctx)
    with ctx.working():
        return a - b * ((-1) ** (p + q) * _e(y))


def msv_parity_via_R(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """The same combination through msv_from_R on both terms."""
    a = msv_from_R(p, q, x, y, ctx)
    b = msv_from_R(p, q, x.inv(), y.inv(), ctx)
    with ctx.working():
        return a - b * ((-1) ** (p + q) * _e(y))


def msv_parity_closed(p: int, q: int, x: RootOfUnity, y: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """The same combination as 2^(2-p-q) times the linear R parity right-hand side."""
    v = rhs_T31(p, q, (x * y).inv(), x, ctx)
    with ctx.working():
        return v * (to_mpc(2) ** (2 - p - q))


# ---------------------------------------------------------------------------
# checker


def _roots(rs) -> tuple[RootOfUnity, ...]:
    return tuple(r if isinstance(r, RootOfUnity) else RootOfUnity.parse(r) for r in rs)


@dataclass(frozen=True)
class ParityCase:
    """One identity instance.

    ``exps``/``roots``: T31, T41 take (p, q) and (x, y); T32, T42 take
    (p1, p2, q) and (x, x1, x2); the split identities take the k-vector and
    the root vector, with ``branch`` selecting the square root.
    """

    theorem: str
    exps: tuple
    roots: tuple
    ctx: PrecisionCtx = field(default_factory=PrecisionCtx)
    branch: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "exps", tuple(int(e) for e in self.exps))
        object.__setattr__(self, "roots", _roots(self.roots))
        self.validate()

    def validate(self) -> None:
        t = self.theorem
        if t not in THEOREMS:
            raise DomainError(f"unknown theorem {t!r}")
        if t in ("T31", "T41"):
            if len(self.exps) != 2 or len(self.roots) != 2:
                raise DomainError(f"{t} needs exps (p,q) and roots (x,y)")
            (p, q), (x, y) = self.exps, self.roots
            _require(q, x * y, "(q,xy)")
            _require(p, y, "(p,y)")
        elif t in ("T32", "T42"):
            if len(self.exps) != 3 or len(self.roots) != 3:
                raise DomainError(f"{t} needs exps (p1,p2,q) and roots (x,x1,x2)")
            (p1, p2, q), (x, x1, x2) = self.exps, self.roots
            _check_quadratic(p1, p2, q, x, x1, x2)
        else:
            _check_split(self.exps, self.roots)
            if self.branch not in (0, 1):
                raise DomainError("branch must be 0 or 1")

    def params(self) -> dict:
        names = {"T31": (("p", "q"), ("x", "y")), "T41": (("p", "q"), ("x", "y")),
                 "T32": (("p1", "p2", "q"), ("x", "x1", "x2")),
                 "T42": (("p1", "p2", "q"), ("x", "x1", "x2"))}
        if self.theorem in names:
            en, rn = names[self.theorem]
            out = {k: v for k, v in zip(en, self.exps)}
            out.update({k: str(v) for k, v in zip(rn, self.roots)})
            return out
        return {"k": list(self.exps), "roots": [str(r) for r in self.roots], "branch": self.branch}


@dataclass
class CheckReport:
    theorem: str
    params: dict
    lhs: CVal | None
    rhs: CVal | None
    residual: float
    passed: bool
    seconds: float = 0.0
    error: str | None = None
    digits: int = 40

    @property
    def terms_used(self) -> int:
        return max((v.terms_used for v in (self.lhs, self.rhs) if v is not None), default=0)

    def to_json(self) -> dict:
        out = {"theorem": self.theorem, "params": self.params}
        for name, v in (("lhs", self.lhs), ("rhs", self.rhs)):
            out[name] = None if v is None else dict(v.to_json(self.digits), err=v.err)
        out.update({"residual": self.residual, "pass": self.passed,
                    "terms_used": self.terms_used, "seconds": round(self.seconds, 3)})
        if self.error:
            out["error"] = self.error
        return out


_SIDES = {
    "T31": (lhs_T31, rhs_T31),
    "T32": (lhs_T32, rhs_T32),
    "T41": (lhs_T41, rhs_T41),
    "T42": (lhs_T42, rhs_T42),
}


class SideError(CycloError):
    """Evaluation failure on one side of an identity."""

    def __init__(self, side: str, exc: Exception) -> None:
        super().__init__(f"{side} evaluation failed: {exc}")
        self.side = side
        self.cause = exc


def _side(side: str, fn, *args):
    try:
        return fn(*args)
    except CycloError as exc:
        raise SideError(side, exc) from exc


def evaluate_sides(case: ParityCase) -> tuple[CVal, CVal]:
    ctx = case.ctx
    if case.theorem in _SIDES:
        lf, rf = _SIDES[case.theorem]
        lhs = _side("lhs", lf, *case.exps, *case.roots, ctx)
        rhs = _side("rhs", rf, *case.exps, *case.roots, ctx)
        return lhs, rhs
    fn = split_msv if case.theorem == "SPLIT_S" else split_mrv
    return _side("lhs/rhs", fn, case.exps, case.roots, ctx, case.branch)


def tolerance(lhs: CVal, rhs: CVal, tol: float) -> float:
    """Acceptance threshold: the larger of ``tol`` and ten times the combined error bounds."""
    return max(tol, 10.0 * (lhs.err + rhs.err))


def check_parity(case: ParityCase) -> CheckReport:
    t0 = time.perf_counter()
    lhs, rhs = evaluate_sides(case)
    with case.ctx.working():
        residual = float(abs(lhs.value - rhs.value))
    ok = residual <= tolerance(lhs, rhs, case.ctx.tol)
    return CheckReport(case.theorem, case.params(), lhs, rhs, residual, ok,
                       time.perf_counter() - t0, digits=case.ctx.work_digits)
