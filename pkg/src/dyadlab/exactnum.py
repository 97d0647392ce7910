"""Exact dyadic-rational scalars, intervals, interval unions, and piecewise-linear
functions.

Every scalar in this package is a dyadic rational m*2^e with arbitrary-precision
integer mantissa and exponent.  There is no floating point anywhere in the core
and no general rational type: division is only defined where the quotient is
again dyadic, and failure of that is a meaningful signal (a violated
integrality claim), not a rounding event.
"""

from __future__ import annotations

import re
import sys
from bisect import bisect_right
from typing import Iterable, Iterator, Sequence

# Mantissas and block counts legitimately reach hundreds of thousands of
# decimal digits; the interpreter's int<->str conversion cap (a guard against
# hostile input, default 4300 digits) would break their serialization.  Raise
# it far enough for anything under the span guard, but never lower it.
_STR_DIGITS = 400_000
if hasattr(sys, "get_int_max_str_digits") and sys.get_int_max_str_digits() < _STR_DIGITS:
    sys.set_int_max_str_digits(_STR_DIGITS)

__all__ = [
    "GuardExceeded",
    "NotExact",
    "Dyadic",
    "DyInterval",
    "IntervalUnion",
    "PiecewiseLinear",
    "set_span_guard",
    "span_guard",
    "ZERO",
    "ONE",
]


class GuardExceeded(ArithmeticError):
    """An operation would allocate a mantissa above the configured bit limit."""


class NotExact(ArithmeticError):
    """The result of an operation is not a dyadic rational."""


# Additions between scalars whose exponents differ by more than this many bits
# would silently allocate giant mantissas (e.g. adding a 2^-N smoothing slack
# with N in the millions to a unit-scale number).  Such additions raise
# GuardExceeded instead.
_DEFAULT_SPAN_GUARD = 1 << 20
_span_guard = _DEFAULT_SPAN_GUARD


def span_guard() -> int:
    return _span_guard


def set_span_guard(bits: int) -> int:
    """Set the mantissa bit budget; returns the previous value."""
    global _span_guard
    if bits < 64:
        raise ValueError("span guard below 64 bits is unusable")
    old = _span_guard
    _span_guard = bits
    return old


_DYADIC_RE = re.compile(r"^(-?\d+)(?:\*2\^(-?\d+))?$")
_DECIMAL_RE = re.compile(r"^(-?)(\d+)(?:\.(\d+))?$")


class Dyadic:
    """Immutable exact number m*2^e, kept canonical (m odd, or m = 0 and e = 0)."""

    __slots__ = ("m", "e")

    def __init__(self, mantissa: int, exponent: int = 0):
        if mantissa == 0:
            m, e = 0, 0
        else:
            shift = (mantissa & -mantissa).bit_length() - 1
            m, e = mantissa >> shift, exponent + shift
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "e", e)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def pow2(cls, exponent: int) -> "Dyadic":
        return cls(1, exponent)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse 'm*2^e', a plain integer, or an exact decimal like '0.75'."""
        s = text.strip()
        m = _DYADIC_RE.match(s)
        if m:
            return cls(int(m.group(1)), int(m.group(2) or 0))
        d = _DECIMAL_RE.match(s)
        if d:
            sign = -1 if d.group(1) else 1
            digits = d.group(2) + (d.group(3) or "")
            ndec = len(d.group(3) or "")
            num = sign * int(digits)
            # num / 10^ndec is dyadic iff 5^ndec divides num
            five = 5**ndec
            if num % five:
                raise NotExact(f"{text!r} is not a dyadic rational")
            return cls(num // five, -ndec)
        raise ValueError(f"cannot parse dyadic scalar from {text!r}")

    # -- rendering --------------------------------------------------------

    def __str__(self) -> str:
        return f"{self.m}*2^{self.e}"

    def __repr__(self) -> str:
        return f"Dyadic({self.m}, {self.e})"

    def to_decimal(self) -> str | None:
        """Exact decimal rendering, offered only when the exponent is >= -64."""
        if self.e < -64:
            return None
        if self.e >= 0:
            return str(self.m << self.e)
        n = -self.e
        scaled = abs(self.m) * 5**n  # |m|*2^e = scaled / 10^n
        digits = str(scaled).rjust(n + 1, "0")
        sign = "-" if self.m < 0 else ""
        return f"{sign}{digits[:-n]}.{digits[-n:]}"

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Dyadic | None":
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other)
        return None

    def _check_span(self, other: "Dyadic") -> None:
        if not self.m or not other.m:
            return
        emin = min(self.e, other.e)
        width = max(
            self.m.bit_length() + self.e - emin,
            other.m.bit_length() + other.e - emin,
        )
        if width > _span_guard:
            raise GuardExceeded(
                f"aligned mantissa would need {width} bits "
                f"(guard {_span_guard}): {self} + {other}"
            )

    def __add__(self, other) -> "Dyadic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.m:
            return o
        if not o.m:
            return self
        self._check_span(o)
        e = min(self.e, o.e)
        return Dyadic((self.m << (self.e - e)) + (o.m << (o.e - e)), e)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.m, self.e)

    def __sub__(self, other) -> "Dyadic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.__add__(-o)

    def __rsub__(self, other) -> "Dyadic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__add__(-self)

    def __mul__(self, other) -> "Dyadic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Dyadic(self.m * o.m, self.e + o.e)

    __rmul__ = __mul__

    def div_exact(self, other) -> "Dyadic":
        """Exact quotient; raises NotExact when self/other is not dyadic."""
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot divide Dyadic by {type(other).__name__}")
        if not o.m:
            raise ZeroDivisionError("division by zero")
        if not self.m:
            return ZERO
        q, r = divmod(self.m, o.m)
        if r:
            raise NotExact(f"{self} / {o} is not a dyadic rational")
        return Dyadic(q, self.e - o.e)

    def __divmod__(self, other) -> tuple[int, "Dyadic"]:
        """Floor ratio: (q, r) with self = q*other + r, 0 <= r < other; other > 0."""
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.m <= 0:
            raise ValueError("floor ratio requires a positive divisor")
        e = min(self.e, o.e)
        shift_a, shift_b = self.e - e, o.e - e
        if self.m and max(
            self.m.bit_length() + shift_a, o.m.bit_length() + shift_b
        ) > _span_guard:
            raise GuardExceeded(f"floor ratio span too wide: {self} vs {o}")
        q, r = divmod(self.m << shift_a, o.m << shift_b)
        return q, Dyadic(r, e)

    def __floordiv__(self, other) -> int:
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Dyadic":
        return divmod(self, other)[1]

    def is_integer(self) -> bool:
        return self.e >= 0

    def as_integer(self) -> int:
        """The exact integer value; NotExact when the exponent is negative."""
        if self.e < 0:
            raise NotExact(f"{self} is not an integer")
        return self.m << self.e

    def floor(self) -> int:
        if self.e >= 0:
            return self.m << self.e
        return self.m >> -self.e

    def ceil(self) -> int:
        return -(-self).floor()

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.m), self.e)

    def __bool__(self) -> bool:
        return self.m != 0

    # -- comparison ---------------------------------------------------------
    # Comparison never aligns mantissas across the full exponent span: the
    # magnitudes 2^(e + bitlen(m)) decide first, so comparing 2^-1000000 with 1
    # is cheap.

    def _cmp(self, other: "Dyadic") -> int:
        sa = (self.m > 0) - (self.m < 0)
        sb = (other.m > 0) - (other.m < 0)
        if sa != sb:
            return -1 if sa < sb else 1
        if sa == 0:
            return 0
        ta = self.e + self.m.bit_length() if sa > 0 else self.e + (-self.m).bit_length()
        tb = other.e + other.m.bit_length() if sb > 0 else other.e + (-other.m).bit_length()
        if ta != tb:
            return sa * (-1 if ta < tb else 1)
        # equal magnitude exponent: the alignment shift is bounded by mantissa widths
        e = min(self.e, other.e)
        a = self.m << (self.e - e)
        b = other.m << (other.e - e)
        return (a > b) - (a < b)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.m == o.m and self.e == o.e

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._cmp(o) < 0

    def __le__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._cmp(o) <= 0

    def __gt__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._cmp(o) > 0

    def __ge__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._cmp(o) >= 0

    def __hash__(self) -> int:
        return hash((self.m, self.e))


ZERO = Dyadic(0)
ONE = Dyadic(1)


def scaled_ints(values: Sequence[Dyadic]) -> tuple[list[int], int]:
    """Rescale dyadics to integers on a common power-of-two grid.

    Returns (ints, e) with values[i] = ints[i]*2^e; e is the minimum exponent
    among the nonzero inputs (0 if all are zero).
    """
    nonzero = [v.e for v in values if v.m]
    if not nonzero:
        return [0 for _ in values], 0
    e = min(nonzero)
    out = []
    for v in values:
        shift = v.e - e
        if v.m and v.m.bit_length() + shift > _span_guard:
            raise GuardExceeded(f"common grid would need {v.m.bit_length() + shift} bits")
        out.append(v.m << shift if v.m else 0)
    return out, e


class DyInterval:
    """Interval with dyadic endpoints and per-endpoint closedness flags."""

    __slots__ = ("lo", "hi", "closed_lo", "closed_hi")

    def __init__(self, lo: Dyadic, hi: Dyadic, closed_lo: bool = True, closed_hi: bool = True):
        if lo > hi:
            raise ValueError(f"interval endpoints out of order: {lo} > {hi}")
        if lo == hi and not (closed_lo and closed_hi):
            raise ValueError("degenerate interval must be closed on both ends")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "closed_lo", closed_lo)
        object.__setattr__(self, "closed_hi", closed_hi)

    def __setattr__(self, name, value):
        raise AttributeError("DyInterval is immutable")

    @classmethod
    def closed(cls, lo, hi) -> "DyInterval":
        return cls(_as_dyadic(lo), _as_dyadic(hi), True, True)

    @classmethod
    def open(cls, lo, hi) -> "DyInterval":
        return cls(_as_dyadic(lo), _as_dyadic(hi), False, False)

    @classmethod
    def parse(cls, text: str) -> "DyInterval":
        s = text.strip()
        if s[0] not in "[(" or s[-1] not in "])":
            raise ValueError(f"cannot parse interval from {text!r}")
        lo_s, hi_s = s[1:-1].split(",")
        return cls(
            Dyadic.parse(lo_s),
            Dyadic.parse(hi_s),
            closed_lo=s[0] == "[",
            closed_hi=s[-1] == "]",
        )

    def __str__(self) -> str:
        lb = "[" if self.closed_lo else "("
        rb = "]" if self.closed_hi else ")"
        return f"{lb}{self.lo},{self.hi}{rb}"

    __repr__ = __str__

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyInterval):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and self.closed_lo == other.closed_lo
            and self.closed_hi == other.closed_hi
        )

    def __hash__(self) -> int:
        return hash((self.lo, self.hi, self.closed_lo, self.closed_hi))

    def measure(self) -> Dyadic:
        return self.hi - self.lo

    def contains(self, x: Dyadic) -> bool:
        if self.closed_lo:
            if x < self.lo:
                return False
        elif x <= self.lo:
            return False
        if self.closed_hi:
            return x <= self.hi
        return x < self.hi

    def covers(self, other: "DyInterval") -> bool:
        """True when every point of `other` lies in self (closedness-aware)."""
        if other.lo < self.lo or (other.lo == self.lo and other.closed_lo and not self.closed_lo):
            return False
        if other.hi > self.hi or (other.hi == self.hi and other.closed_hi and not self.closed_hi):
            return False
        return True


def _as_dyadic(x) -> Dyadic:
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x)
    if isinstance(x, str):
        return Dyadic.parse(x)
    raise TypeError(f"expected Dyadic, int, or str, got {type(x).__name__}")


class IntervalUnion:
    """Ordered union of pairwise-disjoint, non-mergeable intervals.

    Two parts never touch: any overlap or flush adjacency (where the shared
    endpoint belongs to at least one side) is merged on insertion, so the
    representation is canonical and the total measure is a plain sum.
    """

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[DyInterval] = ()):
        merged: list[DyInterval] = []
        for iv in _sorted_intervals(list(parts)):
            if merged and _touches(merged[-1], iv):
                merged[-1] = _merge(merged[-1], iv)
            else:
                merged.append(iv)
        object.__setattr__(self, "parts", tuple(merged))

    def __setattr__(self, name, value):
        raise AttributeError("IntervalUnion is immutable")

    def insert(self, iv: DyInterval) -> "IntervalUnion":
        return IntervalUnion(list(self.parts) + [iv])

    def measure(self) -> Dyadic:
        total = ZERO
        for p in self.parts:
            total = total + p.measure()
        return total

    def contains(self, x: Dyadic) -> bool:
        return any(p.contains(x) for p in self.parts)

    def contains_interval(self, iv: DyInterval) -> bool:
        """True when some single part covers `iv` entirely."""
        return any(p.covers(iv) for p in self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[DyInterval]:
        return iter(self.parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.parts) + "}"

    __repr__ = __str__

    def to_json(self) -> list[str]:
        return [str(p) for p in self.parts]

    @classmethod
    def from_json(cls, items: Iterable[str]) -> "IntervalUnion":
        return cls(DyInterval.parse(s) for s in items)


def _sorted_intervals(items: list[DyInterval]) -> list[DyInterval]:
    import functools

    def cmp(a: DyInterval, b: DyInterval) -> int:
        c = a.lo._cmp(b.lo)
        if c:
            return c
        # open lo sorts after closed lo at the same point
        return (not a.closed_lo) - (not b.closed_lo)

    return sorted(items, key=functools.cmp_to_key(cmp))


def _touches(a: DyInterval, b: DyInterval) -> bool:
    # b.lo >= a.lo by sort order; they merge unless a strictly positive gap
    # remains, or they share only an endpoint excluded from both.
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return a.closed_hi or b.closed_lo
    return False


def _merge(a: DyInterval, b: DyInterval) -> DyInterval:
    if b.hi > a.hi:
        hi, closed_hi = b.hi, b.closed_hi
    elif b.hi == a.hi:
        hi, closed_hi = a.hi, a.closed_hi or b.closed_hi
    else:
        hi, closed_hi = a.hi, a.closed_hi
    closed_lo = a.closed_lo or (b.lo == a.lo and b.closed_lo)
    return DyInterval(a.lo, hi, closed_lo, closed_hi)


class PiecewiseLinear:
    """Compactly supported continuous function given by dyadic breakpoints.

    Linear between consecutive breakpoints, zero outside their span; the first
    and last values must be zero and all values nonnegative.
    """

    __slots__ = ("xs", "vs")

    def __init__(self, breakpoints: Iterable[tuple[Dyadic, Dyadic]]):
        pts = list(breakpoints)
        if len(pts) < 2:
            raise ValueError("need at least two breakpoints")
        xs = tuple(p[0] for p in pts)
        vs = tuple(p[1] for p in pts)
        for i in range(len(xs) - 1):
            if not xs[i] < xs[i + 1]:
                raise ValueError(f"breakpoints not strictly increasing at {xs[i]}")
        if vs[0] or vs[-1]:
            raise ValueError("support must be compact: first and last values must be 0")
        for v in vs:
            if v < ZERO:
                raise ValueError("values must be nonnegative")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "vs", vs)

    def __setattr__(self, name, value):
        raise AttributeError("PiecewiseLinear is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return self.xs == other.xs and self.vs == other.vs

    def __hash__(self) -> int:
        return hash((self.xs, self.vs))

    def breakpoints(self) -> list[tuple[Dyadic, Dyadic]]:
        return list(zip(self.xs, self.vs))

    def max_value(self) -> Dyadic:
        return max(self.vs)

    def eval(self, x: Dyadic) -> Dyadic:
        """Exact value at x; NotExact if the interpolant at x is not dyadic."""
        if x < self.xs[0] or x > self.xs[-1]:
            return ZERO
        i = bisect_right(self.xs, x) - 1
        if self.xs[i] == x:
            return self.vs[i]
        x0, v0 = self.xs[i], self.vs[i]
        x1, v1 = self.xs[i + 1], self.vs[i + 1]
        return v0 + ((v1 - v0) * (x - x0)).div_exact(x1 - x0)

    def __call__(self, x: Dyadic) -> Dyadic:
        return self.eval(x)

    def to_json(self) -> list[list[str]]:
        return [[str(x), str(v)] for x, v in zip(self.xs, self.vs)]

    @classmethod
    def from_json(cls, items: Iterable[Sequence[str]]) -> "PiecewiseLinear":
        return cls((Dyadic.parse(x), Dyadic.parse(v)) for x, v in items)
