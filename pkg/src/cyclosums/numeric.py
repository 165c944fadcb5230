"""Special-function backbone: Hurwitz zeta, digamma, oscillatory sums, Cauchy coefficients.

The ``*_raw`` functions work on ``mpc`` values at the ambient gmpy2
precision and return ``(value, error_bound)``.  The public functions take a
:class:`PrecisionCtx` and return :class:`CVal`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import gmpy2
import mpmath
from gmpy2 import mpc, mpfr

from .context import CVal, PrecisionCtx, to_mpc
from .errors import AccuracyError, DivergenceError, PoleError
from .exact import RootOfUnity, bernoulli, root_embed

_bern_mp: dict[tuple[int, int], mpfr] = {}


def _b2k_over_fact(k: int) -> mpfr:
    """B_2k / (2k)! at the current precision (memoized per precision)."""
    prec = gmpy2.get_context().precision
    key = (k, prec)
    v = _bern_mp.get(key)
    if v is None:
        b = bernoulli(2 * k) / math.factorial(2 * k)
        v = mpfr(gmpy2.mpq(b.numerator, b.denominator))
        _bern_mp[key] = v
    return v


def current_digits() -> float:
    return gmpy2.get_context().precision / 3.3219280948873626


def _check_pole(a: mpc) -> None:
    if gmpy2.is_zero(a.imag) and a.real <= 0 and gmpy2.is_integer(a.real):
        raise PoleError(f"pole at non-positive integer {a.real}")


def hurwitz_raw(p: int, a: mpc) -> tuple[mpc, float]:
    """zeta(p, a) by direct terms up to a shift M, then Euler-Maclaurin."""
    _check_pole(a)
    digits = current_digits()
    threshold = max(0.4 * p * digits, 12.0)
    M = max(0, int(math.ceil(threshold - float(a.real))))
    direct = mpc(0)
    for m in range(M):
        direct += (a + m) ** (-p)
    b = a + M
    binv = 1 / b
    binv2 = binv * binv
    bp = binv ** p
    tail = bp * b / (p - 1) + bp / 2
    eps = mpfr(2) ** (-gmpy2.get_context().precision)
    scale = abs(tail) + abs(direct)
    # term_k = B_2k/(2k)! * p(p+1)...(p+2k-2) * b^(-p-2k+1)
    rising = mpfr(p)
    pw = bp * binv
    k = 1
    bound = None
    while k < 400:
        term = _b2k_over_fact(k) * rising * pw
        if abs(term) <= eps * scale:
            bound = float(abs(term))
            break
        tail += term
        rising *= (p + 2 * k - 1) * (p + 2 * k)
        pw *= binv2
        k += 1
    if bound is None:
        raise AccuracyError("Euler-Maclaurin tail for Hurwitz zeta did not settle")
    # remainder is bounded by the first omitted term for real b; widen for complex b
    widen = float(abs(b) / b.real) ** (p + 2 * k) if b.real > 0 else 1e6
    return direct + tail, bound * widen + float(scale) * float(eps) * (M + k)


def digamma_raw(a: mpc) -> tuple[mpc, float]:
    """psi(a) by upward recurrence followed by the Bernoulli asymptotic series."""
    _check_pole(a)
    digits = current_digits()
    threshold = max(0.4 * digits, 12.0)
    M = max(0, int(math.ceil(threshold - float(a.real))))
    shift = mpc(0)
    for m in range(M):
        shift += 1 / (a + m)
    b = a + M
    binv2 = 1 / (b * b)
    val = gmpy2.log(b) - 1 / (2 * b)
    eps = mpfr(2) ** (-gmpy2.get_context().precision)
    pw = binv2
    bound = None
    for k in range(1, 400):
        # B_2k / (2k b^2k) = (B_2k/(2k)!) * (2k-1)! / b^2k
        term = _b2k_over_fact(k) * math.factorial(2 * k - 1) * pw
        if abs(term) <= eps * abs(val):
            bound = float(abs(term))
            break
        val -= term
        pw *= binv2
    if bound is None:
        raise AccuracyError("digamma asymptotic series did not settle")
    widen = float(abs(b) / b.real) ** (2 * k + 1) if b.real > 0 else 1e6
    return val - shift, bound * widen + float(abs(val)) * float(eps) * (M + k)


def hurwitz_zeta(p: int, a, ctx: PrecisionCtx) -> CVal:
    """zeta(p, a) = sum_{m>=0} (m + a)^(-p) for integer p >= 2."""
    if p < 2:
        raise DivergenceError("hurwitz_zeta needs p >= 2")
    with ctx.working():
        v, err = hurwitz_raw(p, to_mpc(a))
        return CVal(v, err, True)


def digamma(a, ctx: PrecisionCtx) -> CVal:
    with ctx.working():
        v, err = digamma_raw(to_mpc(a))
        return CVal(v, err, True)


def oscillatory_sum(coeff: Callable[[int], object], x: RootOfUnity, ctx: PrecisionCtx,
                    terms: int = 2000, passes: int = 20) -> CVal:
    """Sum a_n x^n (n >= 1) by repeated summation by parts.

    With c = x/(1-x) one pass rewrites sum a_n x^n = c a_1 - c sum (a_n - a_{n+1}) x^n.
    After P passes the remaining series is summed directly; the pass count with
    the smallest boundary term wins.  The bound is heuristic (10x the last
    correction), so the result is never certified.
    """
    if x.is_one:
        raise DivergenceError("oscillatory_sum needs x != 1")
    terms = min(terms, ctx.max_terms)
    # repeated differencing cancels about log10(T) digits per pass
    extra = int(passes * math.log10(terms)) + 10
    with gmpy2.context(gmpy2.get_context(), precision=ctx.bits + int(extra * 3.33)):
        xv = root_embed(x)
        c = xv / (1 - xv)
        d = [to_mpc(coeff(n)) for n in range(1, terms + 1)]
        xpow = [mpc(1)] * (terms + 1)
        for n in range(1, terms + 1):
            xpow[n] = xpow[n - 1] * xv
        head = mpc(0)
        cp = mpc(1)
        best = None
        for P in range(passes + 1):
            T = len(d)
            rest = mpc(0)
            for n in range(T):
                rest += d[n] * xpow[n + 1]
            est = head + (-1) ** P * cp * rest
            bnd = float(abs(cp * c * d[-1]))
            if best is None or bnd < best[1]:
                best = (est, bnd, P)
            if P == passes or T < 3:
                break
            head += (-1) ** P * cp * c * d[0]
            cp *= c
            d = [d[n] - d[n + 1] for n in range(T - 1)]
        est, bnd, _ = best
    with ctx.working():
        return CVal(mpc(est), 10 * bnd + 10.0 ** (-ctx.work_digits), False, terms)


def _trapezoid(f: Callable[[mpc], object], center: mpc, radius: mpfr, ks: Sequence[int],
               tol: float, max_nodes: int = 1 << 13) -> list[tuple[mpc, float]]:
    """Coefficients of (s - center)^k, k in ``ks``, from the circle trapezoid rule."""
    K = 16
    while K < 2 * (max(abs(k) for k in ks) + 1):
        K *= 2
    two_pi = 2 * gmpy2.const_pi()

    def node(t: int, K: int) -> mpc:
        return center + radius * mpc(gmpy2.cos(two_pi * t / K), gmpy2.sin(two_pi * t / K))

    def coeffs(K: int) -> list[mpc]:
        out = []
        for k in ks:
            acc = mpc(0)
            for t in range(K):
                w = mpc(gmpy2.cos(two_pi * t * k / K), -gmpy2.sin(two_pi * t * k / K))
                acc += vals[t] * w
            out.append(acc / K / radius ** k)
        return out

    vals = []
    for t in range(K):
        v = f(node(t, K))
        vals.append(v.value if isinstance(v, CVal) else to_mpc(v))
    prev = coeffs(K)
    while True:
        K2 = 2 * K
        if K2 > max_nodes:
            raise AccuracyError("Cauchy trapezoid rule did not converge")
        new_vals = []
        for t in range(K2):
            if t % 2 == 0:
                new_vals.append(vals[t // 2])
            else:
                v = f(node(t, K2))
                new_vals.append(v.value if isinstance(v, CVal) else to_mpc(v))
        vals = new_vals
        K = K2
        cur = coeffs(K)
        scale = max([float(abs(c) * radius ** k) for c, k in zip(cur, ks)] + [1e-300])
        diffs = [float(abs(a - b) * radius ** k) for a, b, k in zip(cur, prev, ks)]
        if max(diffs) <= tol * max(scale, 1.0):
            return [(c, float(abs(c - p)) + 1e-300) for c, p in zip(cur, prev)]
        prev = cur


def cauchy_taylor(f: Callable[[mpc], object], center, radius, count: int,
                  ctx: PrecisionCtx) -> list[CVal]:
    """Taylor coefficients c_0..c_{count-1} of f about ``center`` via the Cauchy integral."""
    with ctx.working():
        res = _trapezoid(f, to_mpc(center), mpfr(radius), list(range(count)), ctx.tol)
        return [CVal(c, e, False) for c, e in res]


def cauchy_coefficient(f: Callable[[mpc], object], center, radius, k: int,
                       ctx: PrecisionCtx) -> CVal:
    """Single Laurent coefficient (any integer k) of f on the circle |s - center| = radius."""
    with ctx.working():
        (c, e), = _trapezoid(f, to_mpc(center), mpfr(radius), [k], ctx.tol)
        return CVal(c, e, False)


def rational_to_mpfr(q: Fraction) -> mpfr:
    return mpfr(gmpy2.mpq(q.numerator, q.denominator))


def fit_limit(partial: Sequence, period: int, log_power: int, ctx: PrecisionCtx,
              sizes: tuple[int, int] = (4, 6), max_samples: int = 64) -> tuple[mpc, float]:
    """Limit of partial sums ``partial[n-1] = S_n`` by a least-squares tail fit.

    Samples are taken at multiples of ``period`` in the last three quarters of
    the range, where every oscillating factor w^n equals one.  There
    S_n ~ c_0 + sum c_jk n^-j log(n)^k (k <= log_power), and the fitted c_0 is
    the limit.  Ten times the spread between the two fit sizes is the error
    estimate.
    """
    terms = len(partial)
    samples = [n for n in range(period, terms + 1, period) if n >= terms // 4]
    stride = max(1, len(samples) // max_samples)
    samples = samples[::-1][::stride][::-1]
    fits = []
    mpmath.mp.prec = ctx.bits
    for J in sizes:
        basis = [(0, 0)] + [(j, k) for j in range(1, J + 1) for k in range(log_power + 1)]
        if len(samples) < len(basis) + 4:
            continue
        A = mpmath.matrix(len(samples), len(basis))
        bre = mpmath.matrix(len(samples), 1)
        bim = mpmath.matrix(len(samples), 1)
        n0 = samples[0]
        for i, n in enumerate(samples):
            # scaled variables keep the columns comparable in size
            t = mpmath.mpf(n0) / n
            ln = mpmath.log(mpmath.mpf(n) / n0)
            for c, (j, k) in enumerate(basis):
                A[i, c] = t ** j * ln ** k
            v = partial[n - 1]
            bre[i] = mpmath.mpf(str(v.real))
            bim[i] = mpmath.mpf(str(v.imag))
        try:
            cre, _ = mpmath.qr_solve(A, bre)
            cim, _ = mpmath.qr_solve(A, bim)
        except ValueError:
            # numerically singular basis at this size
            continue
        fits.append(mpc(mpfr(str(cre[0])), mpfr(str(cim[0]))))
    if len(fits) == 2:
        return fits[1], 10 * float(abs(fits[1] - fits[0])) + 1e-30
    last = partial[-1]
    return last, float(abs(last - partial[len(partial) // 2])) * 2 + 1e-30
