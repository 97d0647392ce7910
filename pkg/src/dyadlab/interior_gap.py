"""Decreasing-gap dense construction with divergence on [0,1], convergence on [4,5].

Each decade [10j-10, 10j) carries two lattices: a coarse one of step 2^-2^j on
[10j-10, 10j-2) and a fine one of step 2^-2^(j+1) on [10j-2, 10j).  The bump
over [10j, 10j+1] has height 2^-2^(j+1), matched to the fine step, so shifts
from [0,1] collect a full unit of mass per decade while shifts from [4,5] see
only the coarse lattice crossing each bump.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactnum import Dyadic, DyInterval, PiecewiseLinear, ZERO
from .lattice import GapBlock, GapBlockSeq, sum_pl_over_seq_range
from .report import WitnessReport
from .universal import OutOfInterval

__all__ = [
    "Thm33Construction",
    "build_thm33",
    "divergence_partial",
    "convergence_tail_check",
    "thm34_probe",
]


@dataclass(frozen=True)
class Thm33Construction:
    jmax: int
    seq: GapBlockSeq
    f: PiecewiseLinear

    def decade_start_index(self, j: int) -> int:
        """Absolute index of the point 10(j-1), the first point of decade j."""
        if not 1 <= j <= self.jmax + 1:
            raise IndexError(f"decade {j} outside [1, {self.jmax + 1}]")
        n = 0
        for jj in range(1, j):
            n += 8 * 2 ** (2**jj) + 2 * 2 ** (2 ** (jj + 1))
        return n

    def decade_index_range(self, j: int) -> tuple[int, int]:
        """Index range [lo, hi] of the decade-j points, [10j-10, 10j)."""
        lo = self.decade_start_index(j)
        hi = min(self.decade_start_index(j + 1) - 1, self.seq.total_count - 1)
        return lo, hi

    def plateau_height(self, j: int) -> Dyadic:
        return Dyadic(1, -(2 ** (j + 1)))


def build_thm33(jmax: int) -> Thm33Construction:
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    blocks = []
    for j in range(1, jmax + 1):
        coarse = Dyadic(1, -(2**j))
        fine = Dyadic(1, -(2 ** (j + 1)))
        fine_count = 2 * 2 ** (2 ** (j + 1))
        if j == jmax:
            fine_count -= 1  # stop one step short of 10*jmax, the next decade's point
        blocks.append(GapBlock(coarse, 8 * 2 ** (2**j), f"decade-{j}:coarse"))
        blocks.append(GapBlock(fine, fine_count, f"decade-{j}:fine"))
    seq = GapBlockSeq(ZERO, blocks)

    breakpoints = []
    for j in range(1, jmax + 1):
        h = Dyadic(1, -(2 ** (j + 1)))
        base = Dyadic(10 * j)
        breakpoints.append((base - Dyadic(1, -2), ZERO))
        breakpoints.append((base, h))
        breakpoints.append((base + 1, h))
        breakpoints.append((base + Dyadic(5, -2), ZERO))
    return Thm33Construction(jmax=jmax, seq=seq, f=PiecewiseLinear(breakpoints))


def divergence_partial(cons: Thm33Construction, x: Dyadic, upto_decade: int | None = None) -> Dyadic:
    """Exact sum of f(x + point) over all points below 10*upto_decade."""
    if not DyInterval.closed(0, 1).contains(x):
        raise OutOfInterval(f"{x} outside [0, 1]")
    m = cons.jmax if upto_decade is None else upto_decade
    if not 1 <= m <= cons.jmax:
        raise IndexError(f"decade limit {m} outside [1, {cons.jmax}]")
    _, hi = cons.decade_index_range(m)
    return sum_pl_over_seq_range(cons.f, cons.seq, 0, hi, shift=x)


def convergence_tail_check(cons: Thm33Construction, x: Dyadic) -> WitnessReport:
    """Per-decade sums at a shift in [4,5] stay under 2*2^(2^j)*2^(-2^(j+1)).

    Only the coarse lattice of decade j can reach the decade-j bump from
    [4,5], giving at most about 1.5*2^(2^j) hits of height 2^-2^(j+1); the
    factor-2 bound absorbs the ramps.  The unbuilt decades contribute at most
    twice the first omitted bound (terms at least halve).
    """
    if not DyInterval.closed(4, 5).contains(x):
        raise OutOfInterval(f"{x} outside [4, 5]")
    per_decade = []
    total = ZERO
    ok = True
    for j in range(1, cons.jmax + 1):
        lo, hi = cons.decade_index_range(j)
        s = sum_pl_over_seq_range(cons.f, cons.seq, lo, hi, shift=x)
        bound = Dyadic(1, 1 - 2**j)
        per_decade.append({"j": j, "sum": str(s), "bound": str(bound)})
        total = total + s
        if s > bound:
            ok = False
    tail = Dyadic(1, 2 - 2 ** (cons.jmax + 1))
    return WitnessReport(
        claim="thm33-converge",
        params={"x": str(x), "per_decade": per_decade, "total": str(total), "tail_majorant": str(tail)},
        lhs=str(total),
        rhs=str(sum((Dyadic(1, 1 - 2**j) for j in range(1, cons.jmax + 1)), ZERO) + tail),
        passed=ok,
    )


def thm34_probe(cons: Thm33Construction, xc: Dyadic, samples: int, seed: int = 0) -> WitnessReport:
    """Sample shifts to the right of an interior convergence point and verify
    each decade's contribution stays under its summable majorant.

    For any shift right of 13/4 the fine lattice of a decade cannot reach its
    own bump, so decade j contributes at most 2^(1-2^j) through its coarse
    lattice plus 2^(1-2^(j+1)) through its fine lattice hitting later bumps.
    The probe asserts only these upper bounds; divergence can never be
    concluded from a finite prefix, so failures are reported, not asserted.
    """
    import random as _random

    if not (Dyadic(4) < xc < Dyadic(5)):
        raise OutOfInterval(f"{xc} not interior to [4, 5]")
    rng = _random.Random(seed)
    top = Dyadic(10 * cons.jmax)
    failures = []
    checked = []
    for s in range(samples):
        y = xc + (top - xc) * Dyadic(rng.getrandbits(40), -40)
        for j in range(1, cons.jmax + 1):
            lo, hi = cons.decade_index_range(j)
            t = sum_pl_over_seq_range(cons.f, cons.seq, lo, hi, shift=y)
            mu = Dyadic(1, 1 - 2**j) + Dyadic(1, 1 - 2 ** (j + 1))
            if t > mu:
                failures.append({"sample": s, "y": str(y), "j": j, "sum": str(t), "majorant": str(mu)})
        checked.append(str(y))
    return WitnessReport(
        claim="thm34-probe",
        params={
            "xc": str(xc),
            "samples": samples,
            "seed": seed,
            "failures": failures,
            "sampled": checked[:10],
        },
        lhs=str(len(failures)),
        rhs="0",
        passed=not failures,
    )
