"""Implicit gap-block sequences and exact lattice counting.

A sequence prefix with 10^hundreds of points is stored as an origin plus a
short list of (gap, count) blocks; every query below works on that closed form.
Counting points of an arithmetic progression inside a periodic family of
intervals runs in O(log) big-integer steps via a Euclidean floor-sum recursion,
never by iterating periods.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .exactnum import Dyadic, DyInterval, PiecewiseLinear, ZERO, scaled_ints
from .report import WitnessReport

__all__ = [
    "GapBlock",
    "GapBlockSeq",
    "PeriodicIntervalSet",
    "floor_sum",
    "count_ap_in_interval",
    "count_ap_in_periodic",
    "sum_pl_over_ap",
    "sum_pl_over_seq_range",
]


@dataclass(frozen=True)
class GapBlock:
    """`count` consecutive gaps of identical size `gap`."""

    gap: Dyadic
    count: int
    tag: str = ""

    def __post_init__(self):
        if not self.gap > ZERO:
            raise ValueError(f"gap must be positive, got {self.gap}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")


class GapBlockSeq:
    """Strictly increasing sequence origin, origin+g1, ... stored by gap blocks.

    Index 0 is the origin; block b contributes indices (N_{b-1}, N_b] where
    N_b is the cumulative gap count.
    """

    __slots__ = ("origin", "blocks", "_cum_counts", "_cum_values")

    def __init__(self, origin: Dyadic, blocks: Iterable[GapBlock]):
        blocks = tuple(blocks)
        cum_counts = []
        cum_values = []
        n, v = 0, origin
        for b in blocks:
            n += b.count
            v = v + b.gap * b.count
            cum_counts.append(n)
            cum_values.append(v)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_cum_counts", cum_counts)
        object.__setattr__(self, "_cum_values", cum_values)

    def __setattr__(self, name, value):
        raise AttributeError("GapBlockSeq is immutable")

    @property
    def total_count(self) -> int:
        """Number of points, origin included."""
        return (self._cum_counts[-1] if self.blocks else 0) + 1

    @property
    def last_value(self) -> Dyadic:
        return self._cum_values[-1] if self.blocks else self.origin

    def value_at(self, n: int) -> Dyadic:
        """Exact n-th point via block-wise closed form."""
        if n < 0 or n >= self.total_count:
            raise IndexError(f"index {n} outside [0, {self.total_count})")
        if n == 0:
            return self.origin
        lo, hi = 0, len(self.blocks) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self._cum_counts[mid] < n:
                lo = mid + 1
            else:
                hi = mid
        prev_n = self._cum_counts[lo - 1] if lo else 0
        prev_v = self._cum_values[lo - 1] if lo else self.origin
        return prev_v + self.blocks[lo].gap * (n - prev_n)

    def count_upto(self, x: Dyadic) -> int:
        """#{n : value_at(n) <= x}, exact, by inverting block prefix sums."""
        if x < self.origin:
            return 0
        total = 1
        prev_v = self.origin
        for b, v in zip(self.blocks, self._cum_values):
            if x >= v:
                total += b.count
                prev_v = v
                continue
            total += (x - prev_v) // b.gap
            break
        return total

    def index_of_step_boundary(self, block_index: int) -> int:
        """Absolute index of the last point of the given block."""
        if block_index < 0 or block_index >= len(self.blocks):
            raise IndexError(f"block {block_index} outside [0, {len(self.blocks)})")
        return self._cum_counts[block_index]

    def check_monotone_gaps(self) -> WitnessReport:
        """Gaps must be non-increasing across the whole sequence."""
        for i in range(len(self.blocks) - 1):
            a, b = self.blocks[i], self.blocks[i + 1]
            if a.gap < b.gap:
                return WitnessReport(
                    claim="gap-monotonicity",
                    params={
                        "block": i,
                        "tag": a.tag,
                        "next_tag": b.tag,
                        "first_violating_index": self._cum_counts[i] + 1,
                    },
                    lhs=str(a.gap),
                    rhs=str(b.gap),
                    passed=False,
                )
        last = str(self.blocks[-1].gap) if self.blocks else ""
        first = str(self.blocks[0].gap) if self.blocks else ""
        return WitnessReport(
            claim="gap-monotonicity",
            params={"blocks": len(self.blocks)},
            lhs=first,
            rhs=last,
            passed=True,
        )

    def segments_in_range(self, n_lo: int, n_hi: int) -> list[tuple[Dyadic, Dyadic, int]]:
        """Per-block slices covering indices [max(n_lo,1), n_hi] as
        (value of first index in slice, gap, number of indices).

        The origin (index 0) is never part of a block; callers handle it.
        """
        out = []
        prev_n, prev_v = 0, self.origin
        for b, cum_n, cum_v in zip(self.blocks, self._cum_counts, self._cum_values):
            lo = max(n_lo, prev_n + 1)
            hi = min(n_hi, cum_n)
            if lo <= hi:
                out.append((prev_v + b.gap * (lo - prev_n), b.gap, hi - lo + 1))
            prev_n, prev_v = cum_n, cum_v
            if prev_n >= n_hi:
                break
        return out

    def iter_points(self) -> Iterator[Dyadic]:
        """Explicit enumeration; only for small oracle-sized prefixes."""
        v = self.origin
        yield v
        for b in self.blocks:
            for _ in range(b.count):
                v = v + b.gap
                yield v

    def to_json_dict(self) -> dict:
        return {
            "origin": str(self.origin),
            "blocks": [
                {"gap": str(b.gap), "count": str(b.count), "tag": b.tag}
                for b in self.blocks
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GapBlockSeq":
        return cls(
            Dyadic.parse(data["origin"]),
            (
                GapBlock(Dyadic.parse(b["gap"]), int(b["count"]), b.get("tag", ""))
                for b in data["blocks"]
            ),
        )


@dataclass(frozen=True)
class PeriodicIntervalSet:
    """{[base + i*period, base + i*period + width] : 0 <= i < count}, closed."""

    base: Dyadic
    period: Dyadic
    width: Dyadic
    count: int

    def __post_init__(self):
        if not self.period > ZERO:
            raise ValueError("period must be positive")
        if self.width < ZERO or not self.width < self.period:
            raise ValueError("need 0 <= width < period")
        if self.count < 1:
            raise ValueError("count must be >= 1")

    def measure(self) -> Dyadic:
        return self.width * self.count

    def contains(self, x: Dyadic) -> bool:
        if x < self.base:
            return False
        i, r = divmod(x - self.base, self.period)
        return i < self.count and r <= self.width

    def component(self, i: int) -> DyInterval:
        lo = self.base + self.period * i
        return DyInterval.closed(lo, lo + self.width)

    def components(self) -> Iterator[DyInterval]:
        for i in range(self.count):
            yield self.component(i)

    def span(self) -> DyInterval:
        return DyInterval.closed(self.base, self.base + self.period * (self.count - 1) + self.width)


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """Sum of floor((a + b*i)/m) for i in [0, n); m > 0, a and b arbitrary.

    Euclidean descent on (m, b): with 0 <= a, b < m the sum counts lattice
    points (i, j), 1 <= j <= (a + b*i)/m, and flipping the count to the j-axis
    swaps the roles of m and b.  O(log) iterations of big-integer arithmetic.
    """
    if m <= 0:
        raise ValueError("modulus must be positive")
    ans = 0
    sign = 1
    while True:
        if n <= 0:
            return ans
        if a < 0 or a >= m:
            q = a // m
            ans += sign * n * q
            a -= q * m
        if b < 0 or b >= m:
            q = b // m
            ans += sign * q * (n * (n - 1) // 2)
            b -= q * m
        if b == 0:
            return ans
        t = (a + b * (n - 1)) // m
        if t == 0:
            return ans
        ans += sign * n * t
        # subtract the ceiling sum over the j-axis
        n, a, b, m = t, b - 1 + m - a, m, b
        sign = -sign


def _ap_index_range(
    start: Dyadic,
    step: Dyadic,
    count: int,
    iv: DyInterval,
) -> tuple[int, int]:
    """Indices k in [0, count) with start + k*step in iv, as [k_lo, k_hi]."""
    if count <= 0:
        return 0, -1
    q, r = divmod(iv.lo - start, step)
    if r:
        k_lo = q + 1
    else:
        k_lo = q if iv.closed_lo else q + 1
    q, r = divmod(iv.hi - start, step)
    if r:
        k_hi = q
    else:
        k_hi = q if iv.closed_hi else q - 1
    return max(0, k_lo), min(count - 1, k_hi)


def count_ap_in_interval(start: Dyadic, step: Dyadic, count: int, iv: DyInterval) -> int:
    """#{k in [0, count) : start + k*step in iv}, in O(1) big-integer steps."""
    if not step > ZERO:
        raise ValueError("step must be positive")
    k_lo, k_hi = _ap_index_range(start, step, count, iv)
    return max(0, k_hi - k_lo + 1)


def count_ap_in_periodic(
    start: Dyadic,
    step: Dyadic,
    count: int,
    ps: PeriodicIntervalSet,
    closed_left: bool = True,
    closed_right: bool = True,
) -> int:
    """#{k in [0, count) : start + k*step in ps}, via the floor-sum recursion.

    The residue window defaults to the closed [0, width] matching the closed
    components; the flags narrow it to half-open variants where a construction
    uses them.
    """
    if not step > ZERO:
        raise ValueError("step must be positive")
    if count <= 0:
        return 0
    # clip to the span covered by full periods: points at or beyond
    # base + count*period can alias into the residue window without any
    # component existing there
    clip = DyInterval(ps.base, ps.base + ps.period * ps.count, True, False)
    k_lo, k_hi = _ap_index_range(start, step, count, clip)
    if k_hi < k_lo:
        return 0
    n = k_hi - k_lo + 1
    (a0, s, p, w), _ = _scaled4(start + step * k_lo - ps.base, step, ps.period, ps.width)
    hi = w if closed_right else w - 1
    lo = 0 if closed_left else 1
    if hi < lo:
        return 0
    # residue in [lo, hi]  <=>  floor((a - lo)/p) - floor((a - hi - 1)/p) == 1
    total = floor_sum(n, p, a0 - lo, s) - floor_sum(n, p, a0 - hi - 1, s)
    return total


def _scaled4(*vals: Dyadic) -> tuple[tuple[int, ...], int]:
    ints, e = scaled_ints(vals)
    return tuple(ints), e


def sum_pl_over_ap(f: PiecewiseLinear, start: Dyadic, step: Dyadic, count: int) -> Dyadic:
    """Exact sum of f(start + k*step) over k in [0, count).

    Splits the index range at f's breakpoints and sums each linear piece as an
    arithmetic series; the value at the final breakpoint is zero by the compact
    support invariant, so half-open segment windows lose nothing.
    """
    if not step > ZERO:
        raise ValueError("step must be positive")
    total = ZERO
    if count <= 0:
        return total
    for i in range(len(f.xs) - 1):
        x0, v0 = f.xs[i], f.vs[i]
        x1, v1 = f.xs[i + 1], f.vs[i + 1]
        if not v0 and not v1:
            continue
        seg = DyInterval(x0, x1, True, False)
        k_lo, k_hi = _ap_index_range(start, step, count, seg)
        if k_hi < k_lo:
            continue
        n = k_hi - k_lo + 1
        # sum of v0 + (v1-v0)*(start + k*step - x0)/(x1-x0) over k in [k_lo, k_hi];
        # dividing last keeps sums exact even when the bare slope is not dyadic
        ksum = (k_lo + k_hi) * n // 2
        rise = (v1 - v0) * ((start - x0) * n + step * ksum)
        total = total + v0 * n + rise.div_exact(x1 - x0)
    return total


def sum_pl_over_seq_range(
    f: PiecewiseLinear, seq: GapBlockSeq, n_lo: int, n_hi: int, shift: Dyadic = ZERO
) -> Dyadic:
    """Exact sum of f(shift + value_at(n)) over indices n in [n_lo, n_hi]."""
    if n_lo < 0 or n_hi >= seq.total_count:
        raise IndexError(f"range [{n_lo}, {n_hi}] outside [0, {seq.total_count})")
    total = ZERO
    if n_hi < n_lo:
        return total
    if n_lo == 0:
        total = total + f.eval(shift + seq.origin)
    for first, gap, count in seq.segments_in_range(n_lo, n_hi):
        total = total + sum_pl_over_ap(f, shift + first, gap, count)
    return total
