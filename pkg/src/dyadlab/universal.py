"""The universal decreasing-gap sequence and its target-set machinery.

For each index (j, k) the construction places a comb of tiny closed intervals
far out on the line and extends the sequence with two gap blocks sized so that
every point of the window [j-(k+1)2^-j, j-k2^-j] is carried into the comb by
some translate.  Everything here is exact: block counts come out of divisions
that must be integers, and any remainder is a construction bug, not noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .exactnum import (
    Dyadic,
    DyInterval,
    GuardExceeded,
    IntervalUnion,
    PiecewiseLinear,
    ZERO,
    ONE,
    scaled_ints,
)
from .lattice import GapBlock, GapBlockSeq, PeriodicIntervalSet, count_ap_in_periodic
from .report import WitnessReport

__all__ = [
    "NoPredecessor",
    "OutOfInterval",
    "Violation",
    "BudgetExceeded",
    "IndexJK",
    "StepConstants",
    "CoverWitness",
    "indices_through",
    "step_constants",
    "u_set",
    "build_universal",
    "check_lemma_useful",
    "check_integrality",
    "covering_witness",
    "build_uG",
    "fG_partial_sum",
    "escape_bound",
    "escape_measure_bruteforce",
    "borel_cantelli_partial",
    "smooth_indicator",
]


class NoPredecessor(ValueError):
    pass


class OutOfInterval(ValueError):
    pass


class Violation(AssertionError):
    """An exact inequality the construction guarantees failed to hold."""


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class IndexJK:
    """Lexicographic index (j, k) with j >= 1 and 0 <= k < 2j*2^j."""

    j: int
    k: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError(f"j must be >= 1, got {self.j}")
        if not 0 <= self.k < row_width(self.j):
            raise ValueError(f"k={self.k} outside [0, {row_width(self.j)}) for j={self.j}")

    def successor(self) -> "IndexJK":
        if self.k < row_width(self.j) - 1:
            return IndexJK(self.j, self.k + 1)
        return IndexJK(self.j + 1, 0)

    def predecessor(self) -> "IndexJK":
        if self == IndexJK(1, 0):
            raise NoPredecessor("(1,0) has no predecessor")
        if self.k > 0:
            return IndexJK(self.j, self.k - 1)
        return IndexJK(self.j - 1, row_width(self.j - 1) - 1)

    def position(self) -> int:
        """Number of indices strictly before this one in the enumeration."""
        return sum(row_width(jj) for jj in range(1, self.j)) + self.k

    def scale_exp(self) -> int:
        """The exponent s with a = 2^s and E = 2^-s at this index."""
        return 2 * self.j * 2**self.j + self.k

    def __str__(self) -> str:
        return f"({self.j},{self.k})"


def row_width(j: int) -> int:
    return 2 * j * 2**j


def indices_through(limit: IndexJK) -> Iterator[IndexJK]:
    """All indices from (1,0) through `limit`, inclusive."""
    i = IndexJK(1, 0)
    while True:
        yield i
        if i == limit:
            return
        i = i.successor()


@dataclass(frozen=True)
class StepConstants:
    index: IndexJK
    aI: Dyadic
    bI: Dyadic
    a: Dyadic
    b: Dyadic
    E: Dyadic
    n0: int | None = None
    n1: int | None = None


def step_constants(i: IndexJK, seq: GapBlockSeq | None = None) -> StepConstants:
    """Window endpoints and scale constants; absolute indices when `seq` is given."""
    s = i.scale_exp()
    a = Dyadic(1, s)
    E = Dyadic(1, -s)
    aI = Dyadic(i.j) - Dyadic(i.k + 1, -i.j)
    bI = Dyadic(i.j) - Dyadic(i.k, -i.j)
    n0 = n1 = None
    if seq is not None:
        n0, n1 = _step_indices(seq, i)
    return StepConstants(index=i, aI=aI, bI=bI, a=a, b=a + E, E=E, n0=n0, n1=n1)


def _step_indices(seq: GapBlockSeq, i: IndexJK) -> tuple[int, int]:
    t = i.position()
    if 2 * t >= len(seq.blocks):
        raise IndexError(f"sequence prefix has no step {i}: {len(seq.blocks)} blocks")
    tag = seq.blocks[2 * t].tag
    if tag and not tag.startswith(f"{i.j},{i.k}:"):
        raise ValueError(f"block {2 * t} tagged {tag!r}, expected step {i}")
    n0 = seq.index_of_step_boundary(2 * t - 1) if t else 0
    n1 = seq.index_of_step_boundary(2 * t)
    return n0, n1


def u_set(i: IndexJK) -> PeriodicIntervalSet:
    """The comb of 2^s closed intervals of width E^3 spaced E^2 from a."""
    sc = step_constants(i)
    return PeriodicIntervalSet(
        base=sc.a,
        period=sc.E * sc.E,
        width=sc.E * sc.E * sc.E,
        count=1 << i.scale_exp(),
    )


def build_universal(limit: IndexJK) -> GapBlockSeq:
    """Gap blocks of all steps below `limit`; the last point is a - bI at `limit`.

    Each step (j,k) appends a wide block (gap E^2 - E^3) long enough to sweep
    its window across the comb, then a half-period block (gap E^2/2) that lands
    exactly on the next step's starting value.  Both counts must come out as
    positive integers; NotExact propagates otherwise.
    """
    sc0 = step_constants(IndexJK(1, 0))
    origin = sc0.a - sc0.bI
    blocks: list[GapBlock] = []
    lam = origin
    for i in indices_through(limit):
        if i == limit:
            break
        sc = step_constants(i)
        E2 = sc.E * sc.E
        wide_count = (1 << (i.scale_exp() * 2 - i.j)) + (1 << (i.scale_exp() + 1))
        wide_gap = E2 - E2 * sc.E
        blocks.append(GapBlock(wide_gap, wide_count, f"{i.j},{i.k}:wide"))
        lam = lam + wide_gap * wide_count
        nxt = step_constants(i.successor())
        target = nxt.a - nxt.bI
        half_gap = Dyadic(E2.m, E2.e - 1)
        half_count_d = (target - lam).div_exact(half_gap)
        if not half_count_d.is_integer() or half_count_d.m <= 0:
            raise Violation(f"half-block count at step {i} is not a positive integer")
        blocks.append(GapBlock(half_gap, half_count_d.as_integer(), f"{i.j},{i.k}:half"))
        lam = target
    return GapBlockSeq(origin, blocks)


def check_lemma_useful(i: IndexJK) -> WitnessReport:
    """Scale constants halve (at least) from one index to the next, and half
    the old fine scale is an exact integer multiple of the new one."""
    sc = step_constants(i)
    nxt = step_constants(i.successor())
    ok_a = sc.a <= Dyadic(nxt.a.m, nxt.a.e - 1)
    ok_e = sc.E >= nxt.E * 2
    half_e = Dyadic(sc.E.m, sc.E.e - 1)
    mult = half_e.div_exact(nxt.E)
    ok_m = mult.is_integer() and mult.m >= 1
    return WitnessReport(
        claim=f"lemma-useful/{i.j},{i.k}",
        params={"index": str(i), "successor": str(nxt.index), "multiplier": str(mult.as_integer() if ok_m else mult)},
        lhs=f"a={sc.a} E={sc.E}",
        rhs=f"a'={nxt.a} E'={nxt.E}",
        passed=ok_a and ok_e and ok_m,
    )


def check_integrality(seq: GapBlockSeq, limit: IndexJK) -> WitnessReport:
    """Every step's end value divides by E^2, and the landing value by E'^2."""
    checked = 0
    for i in indices_through(limit):
        if i == limit:
            break
        sc = step_constants(i, seq)
        nxt = step_constants(i.successor())
        try:
            q1 = seq.value_at(sc.n1).div_exact(sc.E * sc.E)
            n0_next = seq.index_of_step_boundary(2 * i.position() + 1)
            q2 = seq.value_at(n0_next).div_exact(nxt.E * nxt.E)
        except ArithmeticError as exc:
            return WitnessReport(
                claim="integrality",
                params={"failed_step": str(i), "error": str(exc)},
                passed=False,
            )
        if not (q1.is_integer() and q2.is_integer()):
            return WitnessReport(
                claim="integrality",
                params={"failed_step": str(i)},
                lhs=str(q1),
                rhs=str(q2),
                passed=False,
            )
        checked += 1
    return WitnessReport(
        claim="integrality",
        params={"steps": checked, "limit": str(limit)},
        passed=True,
    )


@dataclass(frozen=True)
class CoverWitness:
    x: Dyadic
    index: IndexJK
    nx: int
    nxp: int
    landing: Dyadic
    component: int


def covering_witness(x: Dyadic, i: IndexJK, seq: GapBlockSeq) -> CoverWitness:
    """The explicit translate index carrying x into the comb at index i.

    nx is found analytically by inverting the block prefix sums (indices reach
    10^hundreds, scanning is not an option), then advanced by the floor of the
    overshoot measured in comb widths.
    """
    sc = step_constants(i, seq)
    window = DyInterval.closed(sc.aI, sc.bI)
    if not window.contains(x):
        raise OutOfInterval(f"{x} outside {window} at {i}")
    if x + seq.value_at(sc.n0) > sc.a:
        raise Violation(f"start value already past the comb base at {i}, x={x}")
    nx = seq.count_upto(sc.a - x)
    if nx >= seq.total_count:
        raise IndexError(f"prefix too short: no translate beyond comb base for x={x} at {i}")
    E2 = sc.E * sc.E
    E3 = E2 * sc.E
    overshoot = x + seq.value_at(nx) - sc.a
    if not overshoot > ZERO:
        raise Violation(f"minimality broken: overshoot {overshoot} not positive")
    if overshoot > E2 - E3:
        raise Violation(f"overshoot {overshoot} exceeds one wide gap at {i}")
    comp, _ = divmod(overshoot, E3)
    nxp = nx + comp
    landing = x + seq.value_at(nxp)
    ps = u_set(i)
    if not (0 <= comp < ps.count and ps.contains(landing)):
        raise Violation(f"landing {landing} missed component {comp} at {i}")
    if not (nx <= sc.n1 and nxp <= sc.n1):
        raise Violation(f"witness indices {nx},{nxp} exceed step end {sc.n1} at {i}")
    return CoverWitness(x=x, index=i, nx=nx, nxp=nxp, landing=landing, component=comp)


def build_uG(G: IntervalUnion, limit: IndexJK) -> list[tuple[IndexJK, PeriodicIntervalSet]]:
    """Comb sets for exactly the indices up to `limit` whose window sits in G.

    The window is closed and G is an open union, so both endpoints must be
    interior to a single part of G.
    """
    out = []
    for i in indices_through(limit):
        sc = step_constants(i)
        if G.contains_interval(DyInterval.closed(sc.aI, sc.bI)):
            out.append((i, u_set(i)))
    return out


def fG_partial_sum(
    x: Dyadic, uG: Sequence[tuple[IndexJK, PeriodicIntervalSet]], seq: GapBlockSeq
) -> int:
    """#{n in prefix : x + value_at(n) lands in some comb of uG}, exactly.

    Combs of distinct indices live in disjoint ranges [a, b], so the per-comb
    counts add without double counting.
    """
    total = 0
    segments = seq.segments_in_range(1, seq.total_count - 1)
    for _, ps in uG:
        if ps.contains(x + seq.origin):
            total += 1
        for first, gap, count in segments:
            total += count_ap_in_periodic(x + first, gap, count, ps)
    return total


def escape_bound(i: IndexJK) -> Dyadic:
    """The per-index bound (4j+3)*E on the escape measure."""
    return Dyadic(4 * i.j + 3) * step_constants(i).E


def escape_measure_bruteforce(
    i: IndexJK, seq: GapBlockSeq, budget: int = 6_000_000
) -> tuple[Dyadic, WitnessReport]:
    """Exact measure of [-j,j] ∩ (comb - prefix) minus the step's own window.

    Materializes every translated comb component meeting [-j,j] on a common
    power-of-two grid and sweeps; feasible at j=1, astronomically large later,
    hence the budget guard.
    """
    sc = step_constants(i)
    ps = u_set(i)
    j = Dyadic(i.j)
    span = ps.period * (ps.count - 1) + ps.width
    lam_lo = sc.a - j - ps.width
    lam_hi = sc.a + span + j
    n_start = seq.count_upto(lam_lo)
    if n_start > 0 and seq.value_at(n_start - 1) == lam_lo:
        n_start -= 1
    n_end = min(seq.count_upto(lam_hi), seq.total_count) - 1
    translates = max(0, n_end - n_start + 1)
    if translates * ps.count > budget:
        raise BudgetExceeded(
            f"{translates} translates x {ps.count} components exceeds budget {budget}"
        )

    # contributing block segments as (first value, gap, count)
    segments = seq.segments_in_range(max(1, n_start), n_end)
    if n_start == 0 and n_end >= 0:
        segments.append((seq.origin, ONE, 1))

    scale_inputs = [sc.a, ps.period, ps.width, Dyadic(-i.j), Dyadic(i.j), sc.aI, sc.bI]
    for first, gap, _ in segments:
        scale_inputs.extend((first, gap))
    ints, e = scaled_ints(scale_inputs)
    a_s, per_s, w_s, jneg_s, jpos_s, aI_s, bI_s = ints[:7]

    los: list[int] = []
    for seg_idx, (_, _, m_count) in enumerate(segments):
        base0 = ints[7 + 2 * seg_idx]
        gi = ints[8 + 2 * seg_idx]
        if m_count == 1:
            gi = 0
        for t in range(m_count):
            left = a_s - (base0 + gi * t)
            for c in range(ps.count):
                los.append(left + per_s * c)

    los.sort()
    measure_s = 0
    for idx, lo in enumerate(los):
        hi = lo + w_s
        if idx + 1 < len(los) and los[idx + 1] < hi:
            hi = los[idx + 1]
        # clip to [-j, aI] u [bI, j]
        measure_s += max(0, min(hi, aI_s) - max(lo, jneg_s))
        measure_s += max(0, min(hi, jpos_s) - max(lo, bI_s))
    measure = Dyadic(measure_s, e)

    bound = escape_bound(i)
    report = WitnessReport(
        claim=f"escape-measure/{i.j},{i.k}",
        params={
            "index": str(i),
            "translates": translates,
            "components": ps.count,
            # a prefix ending inside the translate range still yields a valid
            # lower bound for the measure, but flag the truncation
            "prefix_covers_range": bool(seq.last_value >= lam_hi),
            "lattice_term": str(Dyadic(4 * i.j) * sc.E),
            "left_strip": str(Dyadic(2) * sc.E),
            "right_strip": str(sc.E),
        },
        lhs=str(measure),
        rhs=str(bound),
        passed=measure <= bound,
    )
    return measure, report


def borel_cantelli_partial(jmax: int) -> tuple[Dyadic, Dyadic]:
    """Partial sum of the per-row escape budgets (8j^2+6j)*2^(-2j*2^j+j) and a
    geometric tail majorant equal to twice the first omitted term.

    The majorant is valid because consecutive terms shrink by more than half:
    the polynomial factor grows by at most 4x while the power drops by at
    least 2^-11; both facts are checked exactly here.
    """
    if jmax < 1:
        raise ValueError("jmax must be >= 1")

    def term(j: int) -> Dyadic:
        return Dyadic(8 * j * j + 6 * j, -2 * j * 2**j + j)

    partial = ZERO
    for j in range(1, jmax + 1):
        partial = partial + term(j)
    for j in range(1, jmax + 2):
        if not term(j + 1) * 2 <= term(j):
            raise Violation(f"tail ratio bound fails at {j}")
    tail = term(jmax + 1) * 2
    return partial, tail


def smooth_indicator(
    uG: Sequence[tuple[IndexJK, PeriodicIntervalSet]],
    seq: GapBlockSeq,
    max_components: int = 1 << 12,
) -> tuple[PiecewiseLinear, WitnessReport]:
    """Continuous envelope: 1 on every comb component, 0 outside symmetric
    ramps of half-width delta per component edge.

    Per unit window [M-1, M] the added support measure must stay strictly
    below 2^-M / L_M with L_M the number of points up to 10M; L_M is replaced
    by its power-of-two upper bound so the comparison stays dyadic (strictly
    stronger than the original requirement).  delta starts at a closed-form
    guess and halves until every window bound holds.
    """
    breakpoints: list[tuple[Dyadic, Dyadic]] = []
    window_added: dict[int, Dyadic] = {}
    window_bound: dict[int, Dyadic] = {}
    rows = []
    for i, ps in uG:
        if ps.count > max_components:
            raise GuardExceeded(
                f"{ps.count} components at {i} exceed the smoothing limit {max_components}"
            )
        a_int = ps.base.floor()
        if Dyadic(a_int) != ps.base:
            raise Violation(f"comb base {ps.base} is not an integer")
        n_win = a_int + 1
        for m in (n_win - 1, n_win):
            if m not in window_bound:
                window_bound[m] = _window_bound(seq, m)
        cl = max(0, (ps.count - 1).bit_length())
        ln = seq.count_upto(Dyadic(10 * n_win))
        c = max(0, (ln - 1).bit_length())
        delta = Dyadic(1, -(n_win + c + cl + 2))
        gap = ps.period - ps.width
        while True:
            added_left = delta
            added_main = delta * (2 * ps.count - 1)
            if (
                delta + delta < gap
                and added_left < window_bound[n_win - 1]
                and added_main < window_bound[n_win]
            ):
                break
            delta = Dyadic(1, delta.e - 1)
        window_added[n_win - 1] = window_added.get(n_win - 1, ZERO) + delta
        window_added[n_win] = window_added.get(n_win, ZERO) + delta * (2 * ps.count - 1)
        rows.append({"index": str(i), "delta": str(delta), "points_upto_10N": str(ln)})
        for comp in range(ps.count):
            lo = ps.base + ps.period * comp
            hi = lo + ps.width
            breakpoints.append((lo - delta, ZERO))
            breakpoints.append((lo, ONE))
            breakpoints.append((hi, ONE))
            breakpoints.append((hi + delta, ZERO))

    ok = all(window_added[m] < window_bound[m] for m in window_added)
    report = WitnessReport(
        claim="smoothing-measure",
        params={
            "sets": rows,
            "windows": {
                str(m): {"added": str(window_added[m]), "bound": str(window_bound[m])}
                for m in sorted(window_added)
            },
        },
        lhs="; ".join(str(window_added[m]) for m in sorted(window_added)),
        rhs="; ".join(str(window_bound[m]) for m in sorted(window_added)),
        passed=ok,
    )
    if not breakpoints:
        return PiecewiseLinear([(ZERO, ZERO), (ONE, ZERO)]), report
    return PiecewiseLinear(breakpoints), report


def _window_bound(seq: GapBlockSeq, m: int) -> Dyadic:
    lm = seq.count_upto(Dyadic(10 * m))
    if seq.last_value < Dyadic(10 * m):
        raise IndexError(f"prefix too short to count points up to {10 * m}")
    c = max(0, (lm - 1).bit_length())
    return Dyadic(1, -(m + c))
