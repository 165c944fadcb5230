"""Working precision and error-carrying complex values.

All numerics run on gmpy2 ``mpfr``/``mpc`` numbers.  A :class:`PrecisionCtx`
fixes the target accuracy; ``with ctx.working():`` installs the matching
binary precision for the enclosed computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import DomainError

LOG2_10 = math.log2(10)


@dataclass(frozen=True)
class PrecisionCtx:
    """Target decimal digits, series-term cap, acceptance tolerance, guard digits."""

    digits: int = 40
    tol: float = 1e-25
    max_terms: int = 200000
    guard_digits: int | None = None

    def __post_init__(self) -> None:
        if self.digits < 10:
            raise DomainError(f"digits must be >= 10, got {self.digits}")
        if self.max_terms < 100:
            raise DomainError(f"max_terms must be >= 100, got {self.max_terms}")
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.guard_digits is None:
            object.__setattr__(self, "guard_digits", max(10, self.digits // 5))

    @property
    def work_digits(self) -> int:
        return self.digits + self.guard_digits

    @property
    def bits(self) -> int:
        return int(math.ceil(self.work_digits * LOG2_10)) + 8

    def working(self):
        """Context manager installing this precision for gmpy2 arithmetic."""
        return gmpy2.context(gmpy2.get_context(), precision=self.bits)

    def with_digits(self, digits: int) -> "PrecisionCtx":
        return replace(self, digits=digits, guard_digits=None)

    def series_digits(self) -> int:
        """Accuracy asked of infinite nested sums.

        The parity checks only need a few digits beyond ``tol``; summing to the
        full ``digits`` would cost several times more for no gain.
        """
        from_tol = int(math.ceil(-math.log10(self.tol))) + 6
        return max(12, min(self.digits, from_tol))


def to_mpc(z) -> mpc:
    """Coerce ints, Fractions, floats, complex, mpfr/mpc to an ``mpc``."""
    if isinstance(z, mpc):
        return z
    if isinstance(z, complex):
        return mpc(z)
    if hasattr(z, "to_mpc"):
        return z.to_mpc()
    if hasattr(z, "numerator") and hasattr(z, "denominator") and not isinstance(z, int):
        return mpc(gmpy2.mpq(z.numerator, z.denominator))
    return mpc(z)


def _fmt_real(x: mpfr, digits: int) -> str:
    if gmpy2.is_zero(x):
        return "0"
    mant, exp, _ = gmpy2.digits(x, 10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{sign}{body}e{exp - 1:+03d}"


def fmt_number(x, digits: int) -> str:
    """Decimal string with ``digits`` significant digits."""
    return _fmt_real(mpfr(x), digits)


def _at_prec_of(*vals):
    """Context at the widest precision among the operands (at least the ambient one)."""
    prec = gmpy2.get_context().precision
    for v in vals:
        if isinstance(v, mpc):
            prec = max(prec, *v.precision)
        elif isinstance(v, mpfr):
            prec = max(prec, v.precision)
    return gmpy2.context(gmpy2.get_context(), precision=prec)


@dataclass(frozen=True)
class CVal:
    """Complex value with an absolute error bound.

    ``certified`` means the bound is backed by a remainder estimate; heuristic
    bounds (extrapolations, asymptotic truncations) carry ``certified=False``.
    """

    value: mpc
    err: float = 0.0
    certified: bool = True
    terms_used: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.value, mpc):
            object.__setattr__(self, "value", to_mpc(self.value))
        if self.err < 0 or math.isnan(self.err):
            raise DomainError("error bound must be non-negative")

    @property
    def re(self) -> mpfr:
        return self.value.real

    @property
    def im(self) -> mpfr:
        return self.value.imag

    def __abs__(self) -> mpfr:
        return abs(self.value)

    def conj(self) -> "CVal":
        return CVal(self.value.conjugate(), self.err, self.certified, self.terms_used)

    def _merge(self, other: "CVal", value, err: float) -> "CVal":
        return CVal(value, err, self.certified and other.certified,
                    max(self.terms_used, other.terms_used))

    def __add__(self, other) -> "CVal":
        if isinstance(other, CVal):
            with _at_prec_of(self.value, other.value):
                return self._merge(other, self.value + other.value, self.err + other.err)
        with _at_prec_of(self.value):
            return CVal(self.value + to_mpc(other), self.err, self.certified, self.terms_used)

    __radd__ = __add__

    def __neg__(self) -> "CVal":
        return CVal(-self.value, self.err, self.certified, self.terms_used)

    def __sub__(self, other) -> "CVal":
        return self + (-other)

    def __rsub__(self, other) -> "CVal":
        return (-self) + other

    def __mul__(self, other) -> "CVal":
        if isinstance(other, CVal):
            err = (float(abs(self.value)) * other.err + float(abs(other.value)) * self.err
                   + self.err * other.err)
            with _at_prec_of(self.value, other.value):
                return self._merge(other, self.value * other.value, err)
        with _at_prec_of(self.value):
            c = to_mpc(other)
            return CVal(self.value * c, self.err * float(abs(c)), self.certified, self.terms_used)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CVal":
        if isinstance(other, CVal):
            with _at_prec_of(self.value, other.value):
                q = self.value / other.value
                den = float(abs(other.value))
                err = (self.err + float(abs(q)) * other.err) / max(den - other.err, den / 2)
                return self._merge(other, q, err)
        with _at_prec_of(self.value):
            c = to_mpc(other)
            return CVal(self.value / c, self.err / float(abs(c)), self.certified, self.terms_used)

    def __pow__(self, e: int) -> "CVal":
        with _at_prec_of(self.value):
            out = CVal(mpc(1))
        for _ in range(e):
            out = out * self
        return out

    def to_complex(self) -> complex:
        return complex(self.value)

    def to_json(self, digits: int) -> dict:
        return {"re": _fmt_real(self.re, digits), "im": _fmt_real(self.im, digits)}

    def __repr__(self) -> str:
        return f"CVal({complex(self.value)!r}, err={self.err:.2e}, certified={self.certified})"


def exact_cval(value) -> CVal:
    """Wrap a value known to working precision."""
    v = to_mpc(value)
    return CVal(v, float(abs(v)) * 2.0 ** (-gmpy2.get_context().precision + 4))


def total_err(*vals: CVal) -> float:
    return sum(v.err for v in vals)


