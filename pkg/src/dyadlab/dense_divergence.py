"""Asymptotically dense union-of-lattices construction with tent functions.

Enumerates all dyadic intervals so that the r-th one is large relative to 1/r
and sits inside [-r, r], pairs each with a tent of height 2^-j far out on the
line, and places two lattice families: a fine one sweeping each tent across
its interval (forcing divergence on the interval) and a coarse dense one whose
contribution stays summable everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from .exactnum import Dyadic, DyInterval, IntervalUnion, PiecewiseLinear, ZERO, ONE
from .lattice import count_ap_in_interval, sum_pl_over_ap
from .report import WitnessReport
from .universal import OutOfInterval

__all__ = [
    "APWindow",
    "Thm31Item",
    "Thm31Construction",
    "enum_intervals",
    "tent",
    "build_thm31",
    "lower_bound_check",
    "outside_zero_check",
    "cross_term_zero_check",
    "fG_sum_partial_31",
    "lambda2_hit_count",
    "lambda2_total_check",
    "density_window_check",
    "find_gap_increase",
]

LAMBDA2_MIN_J = 10


@dataclass(frozen=True)
class APWindow:
    """A lattice clipped to a window, stored as start + k*step, 0 <= k < count."""

    start: Dyadic
    step: Dyadic
    count: int

    def last(self) -> Dyadic:
        return self.start + self.step * (self.count - 1)

    def to_json_dict(self) -> dict:
        return {"start": str(self.start), "step": str(self.step), "count": str(self.count)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "APWindow":
        return cls(Dyadic.parse(d["start"]), Dyadic.parse(d["step"]), int(d["count"]))


def enum_intervals(count: int) -> list[tuple[int, DyInterval]]:
    """Deterministic enumeration of dyadic intervals [(k-1)2^-l, k*2^-l].

    Stage t considers all candidates of level l <= t inside [-t, t] in
    (level, left endpoint) order and emits each one the first time both
    emission constraints hold at its would-be 1-based index r:
    containment in [-r, r] and measure 2^-l >= 1/r.  Both constraints relax
    as the index grows, so every dyadic interval is eventually emitted.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    emitted: list[tuple[int, DyInterval]] = []
    seen: set[tuple[int, int]] = set()
    stage = 0
    while len(emitted) < count:
        stage += 1
        for level in range(stage + 1):
            scale = 1 << level
            for k in range(-stage * scale + 1, stage * scale + 1):
                if (level, k) in seen:
                    continue
                r = len(emitted) + 1
                if r < scale:
                    continue
                lo, hi = Dyadic(k - 1, -level), Dyadic(k, -level)
                if lo < Dyadic(-r) or hi > Dyadic(r):
                    continue
                seen.add((level, k))
                emitted.append((r, DyInterval.closed(lo, hi)))
                if len(emitted) == count:
                    return emitted
    return emitted


def tent(j: int) -> PiecewiseLinear:
    """Height 2^-j plateau on [2^j, 2^j + 2^-2^j], ramps of width 2^(-2^j-j-1)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    a = Dyadic(1, j)
    b = a + Dyadic(1, -(2**j))
    pad = Dyadic(1, -(2**j) - j - 1)
    h = Dyadic(1, -j)
    return PiecewiseLinear([(a - pad, ZERO), (a, h), (b, h), (b + pad, ZERO)])


def tripled(iv: DyInterval) -> DyInterval:
    """Concentric closed interval of three times the length."""
    w = iv.hi - iv.lo
    return DyInterval.closed(iv.lo - w, iv.hi + w)


@dataclass(frozen=True)
class Thm31Item:
    j: int
    interval: DyInterval
    tripled: DyInterval
    tent: PiecewiseLinear
    lam1: APWindow
    lam2: APWindow | None


@dataclass(frozen=True)
class Thm31Construction:
    jmax: int
    items: tuple[Thm31Item, ...]

    def item(self, j: int) -> Thm31Item:
        return self.items[j - 1]

    def lambda_windows(self) -> list[tuple[str, int, APWindow]]:
        """All lattice windows as (family, j, window), fine and coarse."""
        out = []
        for it in self.items:
            out.append(("lambda1", it.j, it.lam1))
            if it.lam2 is not None:
                out.append(("lambda2", it.j, it.lam2))
        return out

    def to_json_dict(self) -> dict:
        return {
            "jmax": self.jmax,
            "items": [
                {
                    "j": it.j,
                    "interval": str(it.interval),
                    "tripled": str(it.tripled),
                    "tent": it.tent.to_json(),
                    "lambda1": it.lam1.to_json_dict(),
                    "lambda2": it.lam2.to_json_dict() if it.lam2 else None,
                }
                for it in self.items
            ],
        }


def _lattice_window(lo: Dyadic, hi: Dyadic, step: Dyadic, closed_lo: bool, closed_hi: bool) -> APWindow:
    q, r = divmod(lo, step)
    if r:
        first = step * (q + 1)
    else:
        first = step * q if closed_lo else step * (q + 1)
    q, r = divmod(hi, step)
    if r:
        last = step * q
    else:
        last = step * q if closed_hi else step * (q - 1)
    if last < first:
        raise ValueError(f"empty lattice window [{lo}, {hi}] step {step}")
    count = (last - first).div_exact(step).as_integer() + 1
    return APWindow(first, step, count)


def build_thm31(jmax: int) -> Thm31Construction:
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    items = []
    for j, iv in enum_intervals(jmax):
        a = Dyadic(1, j)
        b = a + Dyadic(1, -(2**j))
        step1 = Dyadic(1, -(2**j) - j)
        lam1 = _lattice_window(a - iv.hi, b - iv.lo, step1, True, True)
        lam2 = None
        if j >= LAMBDA2_MIN_J:
            lo2 = Dyadic(1, j - 1) + Dyadic(2 * (j - 1))
            hi2 = Dyadic(1, j) + Dyadic(2 * j)
            lam2 = _lattice_window(lo2, hi2, Dyadic(1, -j), False, True)
        items.append(
            Thm31Item(
                j=j,
                interval=iv,
                tripled=tripled(iv),
                tent=tent(j),
                lam1=lam1,
                lam2=lam2,
            )
        )
    return Thm31Construction(jmax=jmax, items=tuple(items))


def lower_bound_check(cons: Thm31Construction, j: int, x: Dyadic) -> WitnessReport:
    """The fine lattice carries x across the whole plateau: sum >= 1 exactly."""
    it = cons.item(j)
    if not it.interval.contains(x):
        raise OutOfInterval(f"{x} outside {it.interval} at j={j}")
    s = sum_pl_over_ap(it.tent, x + it.lam1.start, it.lam1.step, it.lam1.count)
    return WitnessReport(
        claim=f"thm31-lower/{j}",
        params={"j": j, "x": str(x)},
        lhs=str(s),
        rhs=str(ONE),
        passed=s >= ONE,
    )


def outside_zero_check(cons: Thm31Construction, j: int, x: Dyadic) -> WitnessReport:
    """Outside the tripled interval (but within [-j, j]) the fine lattice
    misses the tent entirely."""
    it = cons.item(j)
    jj = Dyadic(j)
    if x < -jj or x > jj or it.tripled.contains(x):
        raise OutOfInterval(f"{x} not in [-{j}, {j}] minus the tripled interval")
    s = sum_pl_over_ap(it.tent, x + it.lam1.start, it.lam1.step, it.lam1.count)
    return WitnessReport(
        claim=f"thm31-outside/{j}",
        params={"j": j, "x": str(x)},
        lhs=str(s),
        rhs="0*2^0",
        passed=s == ZERO,
    )


def cross_term_zero_check(cons: Thm31Construction, j0: int, j: int, x: Dyadic) -> WitnessReport:
    """Tent j0 never meets translates from the fine lattice of a different j.

    Guaranteed for j0 >= 10 and |x| <= j0; for smaller j0 the exact value is
    reported without asserting (the separation argument needs room).
    """
    if j == j0:
        raise ValueError("cross term needs j != j0")
    it0 = cons.item(j0)
    itj = cons.item(j)
    s = sum_pl_over_ap(it0.tent, x + itj.lam1.start, itj.lam1.step, itj.lam1.count)
    asserted = j0 >= LAMBDA2_MIN_J and abs(x) <= Dyadic(j0)
    params = {"j0": j0, "j": j, "x": str(x)}
    if not asserted:
        params["informational"] = True
    return WitnessReport(
        claim=f"thm31-cross/{j0}/{j}",
        params=params,
        lhs=str(s),
        rhs="0*2^0",
        passed=(s == ZERO) if asserted else True,
    )


def selected_js(cons: Thm31Construction, G: IntervalUnion) -> list[int]:
    """Indices whose tripled interval sits inside the open union G."""
    return [it.j for it in cons.items if G.contains_interval(it.tripled)]


def fG_sum_partial_31(
    cons: Thm31Construction,
    x: Dyadic,
    G: IntervalUnion,
    include_lambda1: bool = True,
    include_lambda2: bool = False,
) -> Dyadic:
    """Exact sum of the G-selected tents over the chosen lattice families."""
    js = selected_js(cons, G)
    total = ZERO
    for family, _, win in cons.lambda_windows():
        if family == "lambda1" and not include_lambda1:
            continue
        if family == "lambda2" and not include_lambda2:
            continue
        for j in js:
            f = cons.item(j).tent
            total = total + sum_pl_over_ap(f, x + win.start, win.step, win.count)
    return total


def lambda2_hit_count(cons: Thm31Construction, j: int, x: Dyadic) -> WitnessReport:
    """At most one coarse-lattice translate can meet tent j (support is
    narrower than the coarse step); exact count reported."""
    it = cons.item(j)
    if it.lam2 is None:
        return WitnessReport(
            claim=f"thm31-lam2hits/{j}",
            params={"j": j, "x": str(x), "informational": True, "note": "no coarse lattice at this j"},
            lhs="0",
            rhs="1",
            passed=True,
        )
    support = DyInterval.open(it.tent.xs[0] - x, it.tent.xs[-1] - x)
    hits = count_ap_in_interval(it.lam2.start, it.lam2.step, it.lam2.count, support)
    asserted = j >= LAMBDA2_MIN_J and abs(x) <= Dyadic(j)
    params = {"j": j, "x": str(x)}
    if not asserted:
        params["informational"] = True
    return WitnessReport(
        claim=f"thm31-lam2hits/{j}",
        params=params,
        lhs=str(hits),
        rhs="1",
        passed=(hits <= 1) if asserted else True,
    )


def lambda2_total_check(cons: Thm31Construction, x: Dyadic, jmax: int | None = None) -> WitnessReport:
    """Summability skeleton for the coarse family: the per-tent contributions
    beyond max(10, ceil|x|) stay under the geometric bound, term by term."""
    if jmax is None:
        jmax = cons.jmax
    mx = max(LAMBDA2_MIN_J, abs(x).ceil())
    lam2_windows = [w for fam, _, w in cons.lambda_windows() if fam == "lambda2"]

    def tent_total(j: int) -> Dyadic:
        f = cons.item(j).tent
        s = ZERO
        for win in lam2_windows:
            s = s + sum_pl_over_ap(f, x + win.start, win.step, win.count)
        return s

    head = ZERO
    for j in range(1, min(mx, jmax) + 1):
        head = head + tent_total(j)
    tail_actual = ZERO
    tail_bound = ZERO
    ok = True
    for j in range(mx + 1, jmax + 1):
        cj = tent_total(j)
        tail_actual = tail_actual + cj
        tail_bound = tail_bound + Dyadic(1, -j)
        if cj > Dyadic(1, -j):
            ok = False
    return WitnessReport(
        claim="thm31-lam2-tail",
        params={
            "x": str(x),
            "head_cutoff": mx,
            "jmax": jmax,
            "head": str(head),
            "total": str(head + tail_actual),
            "unbuilt_tail_majorant": str(Dyadic(1, -jmax)),
        },
        lhs=str(tail_actual),
        rhs=str(tail_bound),
        passed=ok,
    )


def density_window_check(cons: Thm31Construction, j: int) -> WitnessReport:
    """Max gap of the merged set restricted to the coarse window is <= 2^-j.

    The merged set contains the full coarse lattice there, whose own gaps are
    exactly 2^-j and whose first/last points land within one step of the
    window ends; extra fine-lattice points only shrink gaps.
    """
    it = cons.item(j)
    if it.lam2 is None:
        raise ValueError(f"no coarse lattice at j={j}")
    win = it.lam2
    lo2 = Dyadic(1, j - 1) + Dyadic(2 * (j - 1))
    hi2 = Dyadic(1, j) + Dyadic(2 * j)
    cover_left = win.start - lo2
    cover_right = hi2 - win.last()
    step = win.step
    ok = cover_left <= step and cover_right == ZERO and step == Dyadic(1, -j)
    return WitnessReport(
        claim=f"thm31-density/{j}",
        params={
            "j": j,
            "window": str(DyInterval(lo2, hi2, False, True)),
            "points": str(win.count),
            "left_offset": str(cover_left),
        },
        lhs=str(step),
        rhs=str(Dyadic(1, -j)),
        passed=ok,
    )


def _point_after(cons: Thm31Construction, t: Dyadic) -> Dyadic | None:
    best = None
    for _, _, win in cons.lambda_windows():
        if t < win.start:
            cand = win.start
        else:
            k = (t - win.start) // win.step + 1
            if k >= win.count:
                continue
            cand = win.start + win.step * k
        if best is None or cand < best:
            best = cand
    return best


def _point_before(cons: Thm31Construction, t: Dyadic) -> Dyadic | None:
    best = None
    for _, _, win in cons.lambda_windows():
        if t <= win.start:
            continue
        q, r = divmod(t - win.start, win.step)
        k = q - 1 if not r else q
        k = min(k, win.count - 1)
        if k < 0:
            continue
        cand = win.start + win.step * k
        if best is None or cand > best:
            best = cand
    return best


def find_gap_increase(cons: Thm31Construction) -> WitnessReport:
    """Exhibit one place where consecutive merged gaps grow, separating this
    construction from any decreasing-gap sequence."""
    for it in cons.items:
        t = it.lam1.last()
        nxt = _point_after(cons, t)
        prv = _point_before(cons, t)
        if nxt is None or prv is None:
            continue
        gap_before = t - prv
        gap_after = nxt - t
        if gap_after > gap_before:
            return WitnessReport(
                claim="thm31-gap-increase",
                params={
                    "at": str(t),
                    "previous_point": str(prv),
                    "next_point": str(nxt),
                },
                lhs=str(gap_before),
                rhs=str(gap_after),
                passed=True,
            )
    return WitnessReport(
        claim="thm31-gap-increase",
        params={"jmax": cons.jmax},
        lhs="",
        rhs="",
        passed=False,
    )
