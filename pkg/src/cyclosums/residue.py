"""Residues of kernel x rational-function integrands.

A rational function is given in factored form with exact Gaussian-rational
zeros and poles.  Integrands are

* ``H``: Phi(s;x) prod_i phi_{p_i}(s; x_i) r(s)
* ``G``: Phi(s;x) prod_i phi_{p_i}(s + 1/2; x_i) r(s)

where ``phi_p(s;x) = sum_{k>=0} x^k/(k+s)^p`` is the normalized derivative
``(-1)^(p-1) phi^(p-1)(s;x)/(p-1)!``.  When r decays like s^-2 the residues
over all poles sum to zero; :func:`closure_check` measures the partial total
and :func:`thm6_rhs` assembles the closed-form sum over the kernel poles.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpc, mpfr

from .context import CVal, PrecisionCtx, to_mpc
from .errors import AccuracyError, DivergenceError, DomainError, PoleCollisionError, PoleError
from .exact import GaussianRational, RootOfUnity, binom, root_embed
from .kernels import ExpansionPoint, Phi_raw, laurent, phi_bracket, phi_raw, ti_bracket
from .numeric import cauchy_coefficient, fit_limit
from .polylog import li, t_partial, ti, zeta_partial

HALF = Fraction(1, 2)


def _gr(v) -> GaussianRational:
    return GaussianRational.parse(v)


@dataclass(frozen=True)
class FactoredRational:
    """scale * prod (s - z)^m over zeros / prod (s - a)^m over poles."""

    scale: GaussianRational = field(default_factory=lambda: GaussianRational(1))
    zeros: tuple = ()
    poles: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", _gr(self.scale))
        seen = set()
        for name in ("zeros", "poles"):
            items = []
            for pt, m in getattr(self, name):
                pt, m = _gr(pt), int(m)
                if m < 1:
                    raise DomainError(f"multiplicity must be >= 1, got {m}")
                if pt in seen:
                    raise DomainError(f"point {pt} listed twice among zeros and poles")
                seen.add(pt)
                items.append((pt, m))
            object.__setattr__(self, name, tuple(items))
        if self.scale.abs2() == 0:
            raise DomainError("scale must be nonzero")

    @classmethod
    def pole_power(cls, center, m: int) -> "FactoredRational":
        """1/(s - center)^m."""
        return cls(poles=((center, m),))

    @property
    def excess(self) -> int:
        """deg(numerator) - deg(denominator)."""
        return sum(m for _, m in self.zeros) - sum(m for _, m in self.poles)

    def pole_order(self, point) -> int:
        pt = _gr(point)
        return next((m for a, m in self.poles if a == pt), 0)

    @classmethod
    def from_json(cls, d: dict) -> "FactoredRational":
        try:
            zs = tuple((z["point"], z["mult"]) for z in d.get("zeros", ()))
            ps = tuple((p["point"], p["mult"]) for p in d.get("poles", ()))
            return cls(d.get("scale", "1"), zs, ps)
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed rational function: {exc}") from exc

    def to_json(self) -> dict:
        return {"scale": str(self.scale),
                "zeros": [{"point": str(p), "mult": m} for p, m in self.zeros],
                "poles": [{"point": str(p), "mult": m} for p, m in self.poles]}

    @classmethod
    def parse(cls, text: str) -> "FactoredRational":
        """Read ``"scale=2; zeros=[(i,1)]; poles=[(1/2,2),(-1/3+1/2i,1)]"`` or JSON."""
        text = text.strip()
        if text.startswith("{"):
            import json

            return cls.from_json(json.loads(text))
        parts = {"scale": "1", "zeros": "", "poles": ""}
        for chunk in re.split(r"[;\s]+(?=[a-z]+=)", text):
            if not chunk:
                continue
            key, _, val = chunk.partition("=")
            key = key.strip()
            if key not in parts:
                raise DomainError(f"unknown rational-function field {key!r}")
            parts[key] = val.strip()

        def pairs(val: str) -> tuple:
            val = val.strip()
            if not val:
                return ()
            if not (val.startswith("[") and val.endswith("]")):
                raise DomainError(f"expected [(point,mult),...], got {val!r}")
            out = re.findall(r"\(\s*([^,()]+?)\s*,\s*(\d+)\s*\)", val)
            if not out and val[1:-1].strip():
                raise DomainError(f"cannot read factor list {val!r}")
            return tuple((p, int(m)) for p, m in out)

        return cls(parts["scale"], pairs(parts["zeros"]), pairs(parts["poles"]))


def _point(s) -> mpc:
    if isinstance(s, (GaussianRational, str, Fraction, int)):
        return _gr(s).to_mpc()
    return to_mpc(s)


def _series_mul(a: list, b: list, count: int) -> list:
    out = [mpc(0)] * count
    for i, ai in enumerate(a[:count]):
        if ai == 0:
            continue
        for j in range(min(len(b), count - i)):
            out[i + j] += ai * b[j]
    return out


def _factor_series(a: mpc, m: int, count: int) -> list:
    """Taylor coefficients in h of (a + h)^m for integer m (a != 0 unless m > 0)."""
    if a == 0:
        out = [mpc(0)] * count
        if m < count:
            out[m] = mpc(1)
        return out
    ainv = 1 / a
    out = []
    c = a ** m
    for j in range(count):
        # generalized binomial C(m, j) a^(m-j)
        out.append(c)
        c = c * (m - j) / (j + 1) * ainv
    return out


def _taylor_raw(r: FactoredRational, s: mpc, count: int, skip=None) -> list:
    """Coefficients r^(j)(s)/j!, j < count, omitting the factor at ``skip``."""
    out = [_point(r.scale)] + [mpc(0)] * (count - 1)
    for pt, m in r.zeros:
        out = _series_mul(out, _factor_series(s - pt.to_mpc(), m, count), count)
    for pt, m in r.poles:
        if skip is not None and pt == skip:
            continue
        a = s - pt.to_mpc()
        if a == 0:
            raise PoleError(f"rational function has a pole at {pt}")
        out = _series_mul(out, _factor_series(a, -m, count), count)
    return out


def _err_of(vals, ctx: PrecisionCtx) -> float:
    return max((float(abs(v)) for v in vals), default=0.0) * 2.0 ** (-ctx.bits + 8)


def rf_taylor(r: FactoredRational, s, count: int, ctx: PrecisionCtx) -> list[CVal]:
    """[r(s), r'(s), r''(s)/2!, ...] up to ``count`` entries."""
    if count < 1:
        raise DomainError("count must be >= 1")
    with ctx.working():
        vals = _taylor_raw(r, _point(s), count)
        e = _err_of(vals, ctx)
        return [CVal(v, e) for v in vals]


def rf_eval(r: FactoredRational, s, ctx: PrecisionCtx) -> CVal:
    return rf_taylor(r, s, 1, ctx)[0]


def rf_deriv(r: FactoredRational, k: int, s, ctx: PrecisionCtx) -> CVal:
    """k-th derivative of r at s, from the product of binomial series of the factors."""
    if k < 0:
        raise DomainError("derivative order must be >= 0")
    c = rf_taylor(r, s, k + 1, ctx)[k]
    return c * math.factorial(k)


def rf_shifted_taylor(r: FactoredRational, center, count: int, ctx: PrecisionCtx) -> list[CVal]:
    """Taylor coefficients at ``center`` of (s - center)^m r(s), m the pole order there."""
    c = _gr(center)
    if r.pole_order(c) == 0:
        raise DomainError(f"{c} is not a pole of the rational function")
    with ctx.working():
        vals = _taylor_raw(r, c.to_mpc(), count, skip=c)
        e = _err_of(vals, ctx)
        return [CVal(v, e) for v in vals]


# ---------------------------------------------------------------------------
# integrands


def _is_kernel_pole(kernel: str, pt: GaussianRational) -> bool:
    if pt.is_integer():
        return True
    return kernel == "G" and pt.is_half_odd() and pt.re < 0


@dataclass(frozen=True)
class IntegrandSpec:
    """Kernel kind, phi exponents and roots, the Phi root ``x`` and the rational factor.

    ``relaxed`` accepts rational functions decaying only like 1/s.
    """

    kernel: str
    ps: tuple
    roots: tuple
    x: RootOfUnity
    rational: FactoredRational
    relaxed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "ps", tuple(int(p) for p in self.ps))
        object.__setattr__(self, "roots", tuple(
            r if isinstance(r, RootOfUnity) else RootOfUnity.parse(r) for r in self.roots))
        if not isinstance(self.x, RootOfUnity):
            object.__setattr__(self, "x", RootOfUnity.parse(self.x))
        self.validate()

    def validate(self) -> None:
        if self.kernel not in ("H", "G"):
            raise DomainError(f"kernel must be H or G, got {self.kernel!r}")
        if not self.ps:
            raise DomainError("p-vector must be nonempty")
        if len(self.ps) != len(self.roots):
            raise DomainError("p-vector and roots must have equal length")
        for p, r in zip(self.ps, self.roots):
            if p < 1:
                raise DomainError("exponents must be >= 1")
            if p == 1 and r.is_one:
                raise DivergenceError("phi(s;1) with p = 1 diverges")
        bound = -1 if self.relaxed else -2
        if self.rational.excess > bound:
            raise DomainError(
                f"rational factor must decay like s^{bound} (degree excess {self.rational.excess})")
        for pt, _ in self.rational.poles:
            if _is_kernel_pole(self.kernel, pt) and pt not in self.allowed_shared():
                raise PoleCollisionError(f"rational pole {pt} collides with a kernel pole")

    def allowed_shared(self) -> tuple:
        """Kernel poles where a rational pole may sit (0, and -1/2 for G)."""
        zero = GaussianRational(0)
        return (zero, GaussianRational(-HALF)) if self.kernel == "G" else (zero,)

    @property
    def shift(self) -> Fraction:
        return HALF if self.kernel == "G" else Fraction(0)

    def evaluate_raw(self, s: mpc) -> mpc:
        v = Phi_raw(s, self.x)[0]
        t = s + to_mpc(self.shift)
        for p, r in zip(self.ps, self.roots):
            v *= phi_raw(p, t, r)[0]
        return v * _taylor_raw(self.rational, s, 1)[0]

    def singularities_near(self, c: mpc) -> float:
        """Distance from ``c`` to the nearest other singularity."""
        best = math.inf
        re_c = float(c.real)
        for m in range(math.floor(re_c) - 1, math.ceil(re_c) + 2):
            cand = [mpc(m)]
            if self.kernel == "G" and m < 0:
                cand.append(mpc(m + 0.5))
            for z in cand:
                d = float(abs(z - c))
                if d > 1e-30:
                    best = min(best, d)
        for pt, _ in self.rational.poles:
            d = float(abs(pt.to_mpc() - c))
            if d > 1e-30:
                best = min(best, d)
        return best


def numeric_residue(ispec: IntegrandSpec, pole, order_hint: int, ctx: PrecisionCtx) -> CVal:
    """Residue at ``pole`` from the Cauchy integral on a circle of half the gap to other poles."""
    if order_hint < 1:
        raise DomainError("order_hint must be >= 1")
    with ctx.working():
        c = _point(pole)
        radius = ispec.singularities_near(c) / 2
        if not math.isfinite(radius) or radius <= 0:
            raise AccuracyError("no room for a contour around the pole")
        return cauchy_coefficient(ispec.evaluate_raw, c, radius, -1, ctx)


# closed-form local data ------------------------------------------------------


def _has_laurent(ispec: IntegrandSpec, c: GaussianRational) -> bool:
    if c.im != 0:
        return False
    return c.re.denominator == 1 or c.re == HALF or (c.re.denominator == 2 and c.re < 0)


def _local_factors(ispec: IntegrandSpec, c: Fraction, ctx: PrecisionCtx):
    """(lowest order, callable trunc -> coefficient list) for every factor at ``c``."""
    out = []
    integer = c.denominator == 1
    point = ExpansionPoint("int", int(c)) if integer else ExpansionPoint.at(c)
    out.append((-1 if integer else 0, lambda t: laurent(point, "Phi", 0, ispec.x, t, ctx)))
    which = "phi_half_p" if ispec.kernel == "G" else "phi_p"
    fpoint = ExpansionPoint.at(c)
    # phi(s) has poles at s = -n, phi(s + 1/2) at s = -n - 1/2
    pole_here = c + ispec.shift <= 0 and (c + ispec.shift).denominator == 1
    for p, r in zip(ispec.ps, ispec.roots):
        out.append((-p if pole_here else 0,
                    lambda t, p=p, r=r: laurent(fpoint, which, p, r, t, ctx)))
    return out


def _rational_local(r: FactoredRational, c: GaussianRational, trunc: int, ctx: PrecisionCtx):
    m = r.pole_order(c)
    if m:
        return -m, [v.value for v in rf_shifted_taylor(r, c, trunc, ctx)]
    return 0, [v.value for v in rf_taylor(r, c, trunc, ctx)]


def laurent_residue(ispec: IntegrandSpec, center, ctx: PrecisionCtx) -> CVal:
    """Residue at an integer or half-integer from the kernels' closed-form expansions."""
    c = _gr(center)
    if not _has_laurent(ispec, c):
        raise DomainError(f"no closed-form expansion at {c}")
    factors = _local_factors(ispec, c.re, ctx)
    lo_total = sum(lo for lo, _ in factors) - ispec.rational.pole_order(c)
    need = -1 - lo_total
    if need < 0:
        return CVal(mpc(0), 0.0)
    with ctx.working():
        series = []
        err = 0.0
        for lo, make in factors:
            ls = make(need + 1)
            lo2, coeffs = ls.coefficients()
            err += sum(v.err for v in ls.principal.values()) + sum(v.err for v in ls.taylor)
            series.append(coeffs[: need + 1])
        rlo, rco = _rational_local(ispec.rational, c, need + 1, ctx)
        series.append(rco)
        prod = [mpc(1)]
        for s in series:
            prod = _series_mul(prod, s, need + 1)
        val = prod[need]
        return CVal(val, err * (float(abs(val)) + 1) + _err_of([val], ctx), True)


def residue_at(ispec: IntegrandSpec, center, ctx: PrecisionCtx) -> CVal:
    c = _gr(center)
    if _has_laurent(ispec, c):
        return laurent_residue(ispec, c, ctx)
    return numeric_residue(ispec, c, max(1, ispec.rational.pole_order(c)), ctx)


@dataclass
class ClosureResult:
    n_max: int
    total: CVal
    count: int


def closure_check(ispec: IntegrandSpec, n_max: int, ctx: PrecisionCtx) -> CVal:
    """Sum of all residues at poles with |pole| <= n_max; it tends to 0 as n_max grows."""
    return closure_total(ispec, n_max, ctx).total


def closure_total(ispec: IntegrandSpec, n_max: int, ctx: PrecisionCtx) -> ClosureResult:
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    points: list[GaussianRational] = [GaussianRational(m) for m in range(-n_max, n_max + 1)]
    if ispec.kernel == "G":
        points += [GaussianRational(Fraction(-2 * n - 1, 2)) for n in range(n_max)]
    seen = set(points)
    for pt, _ in ispec.rational.poles:
        if pt not in seen and pt.abs2() <= n_max * n_max:
            points.append(pt)
            seen.add(pt)
    total = CVal(mpc(0), 0.0)
    with ctx.working():
        for pt in points:
            total = total + residue_at(ispec, pt, ctx)
    return ClosureResult(n_max, total, len(points))


# ---------------------------------------------------------------------------
# closed-form sums over the kernel poles

THM6 = ("T61", "T62", "T63a", "T63b")


def _thm6_spec(which, ps, roots, x, r) -> tuple[IntegrandSpec, GaussianRational]:
    if which not in THM6:
        raise DomainError(f"unknown theorem {which!r}")
    want = 1 if which == "T61" else 2
    if len(ps) != want:
        raise DomainError(f"{which} takes {want} exponent(s)")
    kernel = "H" if which in ("T61", "T62") else "G"
    spec = IntegrandSpec(kernel, tuple(ps), tuple(roots), x, r)
    dist = GaussianRational(-HALF) if which == "T63a" else GaussianRational(0)
    for pt, _ in r.poles:
        if _is_kernel_pole(kernel, pt) and pt != dist:
            raise PoleCollisionError(f"{which} allows a kernel-pole overlap only at {dist}")
    return spec, dist


def thm6_validate(which: str, ps, roots, x: RootOfUnity, r: FactoredRational) -> IntegrandSpec:
    """The integrand behind a closed-form sum; raises DomainError if inadmissible."""
    return _thm6_spec(which, ps, roots, x, r)[0]


def extra_poles(which: str, r: FactoredRational) -> list[tuple[GaussianRational, int]]:
    """Poles of r other than the distinguished one."""
    dist = GaussianRational(-HALF) if which == "T63a" else GaussianRational(0)
    return [(p, m) for p, m in r.poles if p != dist]


def thm6_rhs(which: str, ps, roots, x: RootOfUnity, r: FactoredRational, ctx: PrecisionCtx,
             printed: bool = False) -> CVal:
    """Closed-form value of minus the residues of the integrand at the extra poles of r.

    ``printed=True`` keeps two sign/factor slips of the printed statements
    (the ti bracket of the first quadratic-G sum lacks a factor x; the second
    uses (-1)^p2 for both orderings).  The default follows the residue
    expansions, which the numerical checks confirm.
    """
    spec, dist = _thm6_spec(which, ps, roots, x, r)
    q = r.pole_order(dist)
    with ctx.working():
        if which == "T61":
            term, boundary, L = _t61(spec, q, ctx)
        elif which == "T62":
            term, boundary, L = _t62(spec, q, ctx)
        else:
            term, boundary, L = _t63(spec, q, ctx, which == "T63a", printed)
        target = max(ctx.tol, 1e-22)
        terms = max(256, 48 * L)
        terms += (-terms) % L
        partial = []
        acc = term(0)
        n = 0
        while True:
            while n < terms:
                n += 1
                acc += term(n)
                partial.append(acc)
            value, err = fit_limit(partial, L, 1 if spec.relaxed else 0, ctx, sizes=(6, 9))
            if err <= target or 2 * terms > ctx.max_terms:
                break
            terms *= 2
        out = CVal(value, err, False, terms) + boundary
        return out


def _lcm(*orders: int) -> int:
    L = 1
    for N in orders:
        L = L * N // math.gcd(L, N)
    return L


class _Ctxv:
    """Cached constants for the closed forms, as plain mpc."""

    def __init__(self, ctx: PrecisionCtx) -> None:
        self.ctx = ctx
        self.err = 0.0

    def _take(self, v: CVal) -> mpc:
        self.err += v.err
        return v.value

    def L(self, p, z):
        return self._take(li(p, z, self.ctx))

    def T(self, p, z):
        return self._take(ti(p, z, self.ctx))

    def PB(self, k, z):
        return self._take(phi_bracket(k, z, self.ctx))

    def TB(self, k, z):
        return self._take(ti_bracket(k, z, self.ctx))

    def z(self, n, p, z):
        return zeta_partial(n, p, z, self.ctx).value

    def t(self, n, p, z):
        return t_partial(n, p, z, self.ctx).value


def _E(root: RootOfUnity) -> mpc:
    return root_embed(root)


def _swaps(ps, roots):
    (p1, p2), (x1, x2) = ps, roots
    return ((p1, p2, x1, x2), (p2, p1, x2, x1))


def _Rj(R: list, j: int) -> mpc:
    return R[j] if 0 <= j < len(R) else mpc(0)


def _R_local(r: FactoredRational, dist: GaussianRational, q: int, count: int, ctx) -> list:
    if q:
        return [v.value for v in rf_shifted_taylor(r, dist, count, ctx)]
    return [v.value for v in rf_taylor(r, dist, count, ctx)]


def _t61(spec: IntegrandSpec, q: int, ctx: PrecisionCtx):
    (p,), (y,), x, r = spec.ps, spec.roots, spec.x, spec.rational
    K = _Ctxv(ctx)
    X = x * y
    Lpy = K.L(p, y)
    PB = [K.PB(k, x) for k in range(p + q)]
    tabX = [_E(X ** j) for j in range(X.N)]
    tabXi = [_E(X.inv() ** j) for j in range(X.N)]
    yi = y.inv()
    sp = (-1) ** p

    def term(n: int) -> mpc:
        if n == 0:
            return mpc(0)
        rt = _taylor_raw(r, mpc(-n), p + 1)
        rn = _taylor_raw(r, mpc(n), 1)[0]
        Xn = tabX[n % X.N]
        v = tabXi[n % X.N] * (Lpy - K.z(n - 1, p, y)) * rn
        v += Xn * rt[p]
        for k in range(p):
            v += PB[k] * Xn * rt[p - k - 1]
        v += (Lpy + sp * K.z(n, p, yi)) * Xn * rt[0]
        return v

    R = _R_local(r, GaussianRational(0), q, p + q + 1, ctx)
    b = _Rj(R, p + q)
    for k in range(q + 1):
        b += binom(k + p - 1, p - 1) * (-1) ** k * K.L(k + p, y) * _Rj(R, q - k)
    for k in range(p + q):
        b += PB[k] * _Rj(R, p + q - k - 1)
    for k1 in range(q):
        for k2 in range(q - k1):
            b += (PB[k1] * binom(k2 + p - 1, p - 1) * (-1) ** k2 * K.L(k2 + p, y)
                  * _Rj(R, q - k1 - k2 - 1))
    return term, CVal(b, K.err * (float(abs(b)) + 1)), _lcm(X.N, y.N)


def _t62(spec: IntegrandSpec, q: int, ctx: PrecisionCtx):
    ps, roots, x, r = spec.ps, spec.roots, spec.x, spec.rational
    (p1, p2), (x1, x2) = ps, roots
    K = _Ctxv(ctx)
    X = x * x1 * x2
    P = p1 + p2
    PB = [K.PB(k, x) for k in range(P + q)]
    L1, L2 = K.L(p1, x1), K.L(p2, x2)
    tabX = [_E(X ** j) for j in range(X.N)]
    tabXi = [_E(X.inv() ** j) for j in range(X.N)]
    Lk = {(k, z): K.L(k, z) for a1, a2, _, z in _swaps(ps, roots) for k in range(a2, a1 + a2 + q + 1)}

    def term(n: int) -> mpc:
        if n == 0:
            return mpc(0)
        rt = _taylor_raw(r, mpc(-n), P + 1)
        rn = _taylor_raw(r, mpc(n), 1)[0]
        Xn = tabX[n % X.N]
        v = tabXi[n % X.N] * (L1 - K.z(n - 1, p1, x1)) * (L2 - K.z(n - 1, p2, x2)) * rn
        v += Xn * rt[P]
        for a1, a2, _, y2 in _swaps(ps, roots):
            y2i = y2.inv()
            for k in range(a1 + 1):
                inner = (-1) ** k * Lk[(k + a2, y2)] + (-1) ** a2 * K.z(n, k + a2, y2i)
                v += binom(k + a2 - 1, a2 - 1) * Xn * inner * rt[a1 - k]
        v += (Xn * (L1 + (-1) ** p1 * K.z(n, p1, x1.inv()))
              * (L2 + (-1) ** p2 * K.z(n, p2, x2.inv())) * rt[0])
        for a1, a2, _, y2 in _swaps(ps, roots):
            y2i = y2.inv()
            for k1 in range(a1):
                for k2 in range(a1 - k1):
                    inner = (-1) ** k2 * Lk[(k2 + a2, y2)] + (-1) ** a2 * K.z(n, k2 + a2, y2i)
                    v += (PB[k1] * binom(k2 + a2 - 1, a2 - 1) * inner * Xn
                          * rt[a1 - k1 - k2 - 1])
        for k in range(P):
            v += PB[k] * Xn * rt[P - k - 1]
        return v

    R = _R_local(r, GaussianRational(0), q, P + q + 1, ctx)
    b = _Rj(R, P + q)
    for a1, a2, _, y2 in _swaps(ps, roots):
        for k in range(a1 + q + 1):
            b += binom(k + a2 - 1, a2 - 1) * (-1) ** k * Lk[(k + a2, y2)] * _Rj(R, a1 + q - k)
    for k1 in range(q + 1):
        for k2 in range(q - k1 + 1):
            b += (binom(k1 + p1 - 1, p1 - 1) * binom(k2 + p2 - 1, p2 - 1) * (-1) ** (k1 + k2)
                  * K.L(k1 + p1, x1) * K.L(k2 + p2, x2) * _Rj(R, q - k1 - k2))
    for k in range(P + q):
        b += PB[k] * _Rj(R, P + q - k - 1)
    for a1, a2, _, y2 in _swaps(ps, roots):
        for k1 in range(a1 + q):
            for k2 in range(a1 + q - k1):
                b += (PB[k1] * binom(k2 + a2 - 1, a2 - 1) * (-1) ** k2 * Lk[(k2 + a2, y2)]
                      * _Rj(R, a1 + q - k1 - k2 - 1))
    for k1 in range(q):
        for k2 in range(q - k1):
            for k3 in range(q - k1 - k2):
                b += (PB[k1] * binom(k2 + p1 - 1, p1 - 1) * binom(k3 + p2 - 1, p2 - 1)
                      * (-1) ** (k2 + k3) * K.L(k2 + p1, x1) * K.L(k3 + p2, x2)
                      * _Rj(R, q - k1 - k2 - k3 - 1))
    return term, CVal(b, K.err * (float(abs(b)) + 1)), _lcm(X.N, x1.N, x2.N)


def _t63(spec: IntegrandSpec, q: int, ctx: PrecisionCtx, at_half: bool, printed: bool):
    ps, roots, x, r = spec.ps, spec.roots, spec.x, spec.rational
    (p1, p2), (x1, x2) = ps, roots
    K = _Ctxv(ctx)
    X = x * x1 * x2
    P = p1 + p2
    width = P + q + 1
    TB = [K.TB(k, x) for k in range(width)]
    if printed and at_half:
        # the bracket of the sigma line as printed: (-1)^k ti(x) - ti(1/x)
        TB4 = [K.T(k + 1, x) * (-1) ** k - K.T(k + 1, x.inv()) if not (x.is_one and k == 0)
               else TB[k] for k in range(width)]
    else:
        TB4 = TB
    PB = [K.PB(k, x) for k in range(width)]
    T1, T2 = K.T(p1, x1), K.T(p2, x2)
    e1i, e2i = _E(x1.inv()), _E(x2.inv())
    e12i = _E((x1 * x2).inv())
    tabX = [_E(X ** j) for j in range(X.N)]
    tabXi = [_E(X.inv() ** j) for j in range(X.N)]
    Lk = {(k, z): K.L(k, z) for a1, a2, _, z in _swaps(ps, roots) for k in range(a2, a1 + a2 + q + 1)}
    half = mpc(mpfr(1) / 2)

    def term(n: int) -> mpc:
        Xn = tabX[n % X.N]
        v = mpc(0)
        if n >= 1:
            rn = _taylor_raw(r, mpc(n), 1)[0]
            v += (tabXi[n % X.N] * e12i * (T1 - K.t(n, p1, x1)) * (T2 - K.t(n, p2, x2)) * rn)
        if n >= 1 or at_half:
            rm = _taylor_raw(r, mpc(-n), 1)[0]
            v += (Xn * (T1 * e1i + (-1) ** p1 * K.t(n, p1, x1.inv()))
                  * (T2 * e2i + (-1) ** p2 * K.t(n, p2, x2.inv())) * rm)
        if n >= 1 or not at_half:
            rt = _taylor_raw(r, -n - half, P)
            for k in range(P):
                v += TB[k] * Xn * rt[P - k - 1]
            for a1, a2, _, y2 in _swaps(ps, roots):
                y2i = y2.inv()
                sgn = (-1) ** (p2 if printed and not at_half else a2)
                for k1 in range(a1):
                    for k2 in range(a1 - k1):
                        inner = (-1) ** k2 * Lk[(k2 + a2, y2)] + sgn * K.z(n, k2 + a2, y2i)
                        v += (TB4[k1] * binom(k2 + a2 - 1, a2 - 1) * Xn * inner
                              * rt[a1 - k1 - k2 - 1])
        return v

    if at_half:
        R = _R_local(r, GaussianRational(-HALF), q, width, ctx)
        b = mpc(0)
        for k in range(P + q):
            b += TB[k] * _Rj(R, P + q - k - 1)
        for a1, a2, _, y2 in _swaps(ps, roots):
            for k1 in range(a1 + q):
                for k2 in range(a1 + q - k1):
                    b += (TB[k1] * binom(k2 + a2 - 1, a2 - 1) * (-1) ** k2 * Lk[(k2 + a2, y2)]
                          * _Rj(R, a1 + q - k1 - k2 - 1))
        for k1 in range(q):
            for k2 in range(q - k1):
                for k3 in range(q - k1 - k2):
                    b += (TB[k1] * binom(k2 + p1 - 1, p1 - 1) * binom(k3 + p2 - 1, p2 - 1)
                          * (-1) ** (k2 + k3) * K.L(k2 + p1, x1) * K.L(k3 + p2, x2)
                          * _Rj(R, q - k1 - k2 - k3 - 1))
    else:
        R = _R_local(r, GaussianRational(0), q, width, ctx)
        b = mpc(0)
        for k1 in range(q + 1):
            for k2 in range(q - k1 + 1):
                b += (e12i * binom(k1 + p1 - 1, p1 - 1) * binom(k2 + p2 - 1, p2 - 1)
                      * K.T(k1 + p1, x1) * K.T(k2 + p2, x2) * (-1) ** (k1 + k2)
                      * _Rj(R, q - k1 - k2))
        for k1 in range(q):
            for k2 in range(q - k1):
                for k3 in range(q - k1 - k2):
                    b += (PB[k1] * binom(k2 + p1 - 1, p1 - 1) * binom(k3 + p2 - 1, p2 - 1)
                          * (-1) ** (k2 + k3) * K.T(k2 + p1, x1) * K.T(k3 + p2, x2) * e12i
                          * _Rj(R, q - k1 - k2 - k3 - 1))
    return term, CVal(b, K.err * (float(abs(b)) + 1)), _lcm(X.N, x1.N, x2.N)


def extra_residue_sum(which: str, ps, roots, x: RootOfUnity, r: FactoredRational,
                      ctx: PrecisionCtx) -> CVal:
    """-(sum of Cauchy residues at the extra poles of r), the left side of the closed forms."""
    spec, _ = _thm6_spec(which, ps, roots, x, r)
    total = CVal(mpc(0), 0.0, False)
    with ctx.working():
        for pt, m in extra_poles(which, r):
            total = total - residue_at(spec, pt, ctx)
    return total
