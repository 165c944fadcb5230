"""Li_p and ti_p at roots of unity, and their finite partial sums."""

from __future__ import annotations

import threading
import gmpy2
from gmpy2 import mpc, mpfr

from .context import CVal, PrecisionCtx
from .errors import DivergenceError, DomainError
from .exact import RootOfUnity, root_embed
from .numeric import hurwitz_raw

_cache: dict[tuple, CVal] = {}
_lock = threading.Lock()


def _check(p: int, x: RootOfUnity) -> None:
    if p < 1:
        raise DomainError(f"weight must be a positive integer, got {p}")
    if p == 1 and x.is_one:
        raise DivergenceError("Li_1(1) and ti_1(1) diverge")


def _li_raw(p: int, x: RootOfUnity) -> tuple[mpc, float]:
    if p == 1:
        v = -gmpy2.log(1 - root_embed(x))
        return v, float(abs(v)) * 2.0 ** (-gmpy2.get_context().precision + 4)
    N = x.N
    total = mpc(0)
    err = 0.0
    for j in range(1, N + 1):
        z, e = hurwitz_raw(p, mpc(mpfr(j) / N))
        total += root_embed(RootOfUnity(x.k * j, N)) * z
        err += e
    scale = mpfr(N) ** (-p)
    return total * scale, err * float(scale)


def li(p: int, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """Li_p(x) = sum_{n>=1} x^n / n^p, via Hurwitz zeta at j/N (p >= 2) or -log(1-x)."""
    _check(p, x)
    key = ("li", p, x, ctx.bits)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    with ctx.working():
        v, e = _li_raw(p, x)
        out = CVal(v, e, True)
    with _lock:
        _cache[key] = out
    return out


def ti(p: int, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """ti_p(x) = sum_{n>=1} x^n / (n - 1/2)^p = 2^p y Li_p(y) - y Li_p(x) with y^2 = x."""
    _check(p, x)
    key = ("ti", p, x, ctx.bits)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    y = x.sqrt()
    with ctx.working():
        yv = root_embed(y)
        out = li(p, y, ctx) * (yv * 2 ** p) - li(p, x, ctx) * yv
    with _lock:
        _cache[key] = out
    return out


_prefix: dict[tuple, list[mpc]] = {}


def _prefix_sum(kind: str, n: int, p: int, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """Cached running sums; ``kind`` "z" uses k^-p, "t" uses (k-1/2)^-p."""
    if n < 0:
        raise DomainError("partial-sum length must be non-negative")
    key = (kind, p, x, ctx.bits)
    with ctx.working():
        with _lock:
            acc = _prefix.setdefault(key, [mpc(0)])
            if len(acc) <= n:
                tab = [root_embed(RootOfUnity(x.k * j, x.N)) for j in range(x.N)]
                s = acc[-1]
                for k in range(len(acc), n + 1):
                    d = mpfr(k) if kind == "z" else mpfr(2 * k - 1) / 2
                    s = s + tab[k % x.N] / d ** p
                    acc.append(s)
            s = acc[n]
        return CVal(s, float(abs(s) + 1) * n * 2.0 ** (-ctx.bits + 4))


def zeta_partial(n: int, p: int, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """zeta_n(p; x) = sum_{k=1}^{n} x^k / k^p."""
    return _prefix_sum("z", n, p, x, ctx)


def t_partial(n: int, p: int, x: RootOfUnity, ctx: PrecisionCtx) -> CVal:
    """t_n(p; x) = sum_{k=1}^{n} x^k / (k - 1/2)^p."""
    return _prefix_sum("t", n, p, x, ctx)
