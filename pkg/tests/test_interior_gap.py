"""Checks for the decreasing-gap divergence/convergence construction."""

import random

import pytest

from dyadlab.exactnum import Dyadic, ZERO
from dyadlab.interior_gap import (
    build_thm33,
    convergence_tail_check,
    divergence_partial,
    thm34_probe,
)
from dyadlab.universal import OutOfInterval


def dy(s: str) -> Dyadic:
    return Dyadic.parse(s)


@pytest.fixture(scope="module")
def cons6():
    return build_thm33(6)


class TestBuild:
    def test_blocks_jmax2(self):
        cons = build_thm33(2)
        gaps = [(str(b.gap), b.count, b.tag) for b in cons.seq.blocks]
        assert gaps == [
            ("1*2^-2", 32, "decade-1:coarse"),
            ("1*2^-4", 32, "decade-1:fine"),
            ("1*2^-4", 128, "decade-2:coarse"),
            ("1*2^-8", 511, "decade-2:fine"),
        ]
        assert cons.seq.last_value == Dyadic(20) - Dyadic(1, -8)

    def test_blocks_jmax1(self):
        cons = build_thm33(1)
        assert len(cons.seq.blocks) == 2
        assert cons.seq.total_count == 64
        assert cons.seq.last_value == Dyadic(10) - Dyadic(1, -4)

    def test_monotone_gaps_up_to_6(self):
        for jmax in range(1, 7):
            assert build_thm33(jmax).seq.check_monotone_gaps().passed

    def test_perturbed_control_fails(self, cons6):
        from dyadlab.lattice import GapBlock, GapBlockSeq

        blocks = list(cons6.seq.blocks)
        blocks[2] = GapBlock(blocks[2].gap * 4, blocks[2].count, blocks[2].tag)
        assert not GapBlockSeq(ZERO, blocks).check_monotone_gaps().passed

    def test_function_values(self, cons6):
        f = cons6.f
        assert f.eval(Dyadic(10) + Dyadic(1, -1)) == Dyadic(1, -4)
        for j in range(1, 7):
            assert f.eval(Dyadic(10 * j) - Dyadic(1, -2)) == ZERO
            assert f.eval(Dyadic(10 * j)) == cons6.plateau_height(j)
        # identically zero between decades
        assert f.eval(Dyadic(15)) == ZERO
        assert f.eval(Dyadic(10) + Dyadic(5, -2) + Dyadic(1, -10)) == ZERO

    def test_heights_strictly_decreasing_to_zero(self, cons6):
        hs = [cons6.plateau_height(j) for j in range(1, 7)]
        for a, b in zip(hs, hs[1:]):
            assert a > b
        assert hs[-1] == Dyadic(1, -(2**7))

    def test_decade_index_ranges(self, cons6):
        lo, hi = cons6.decade_index_range(1)
        assert (lo, hi) == (0, 63)
        assert cons6.seq.value_at(64) == Dyadic(10)
        lo2, hi2 = cons6.decade_index_range(2)
        assert lo2 == 64
        assert cons6.seq.value_at(hi2) == Dyadic(20) - Dyadic(1, -8)


class TestDivergence:
    def test_anchor_x0(self, cons6):
        assert divergence_partial(cons6, ZERO, 1) == Dyadic(3, -5)  # 3/32

    def test_anchor_x1(self, cons6):
        assert divergence_partial(cons6, Dyadic(1), 1) == Dyadic(35, -5)

    def test_anchor_x1_jmax2_gains_a_unit(self, cons6):
        s1 = divergence_partial(cons6, Dyadic(1), 1)
        s2 = divergence_partial(cons6, Dyadic(1), 2)
        assert s2 >= s1 + 1

    def test_enumeration_oracle_jmax1(self, cons6):
        rng = random.Random(606)
        small = build_thm33(1)
        pts = list(small.seq.iter_points())
        assert len(pts) == 64
        for _ in range(20):
            x = Dyadic(rng.getrandbits(20), -20)
            brute = ZERO
            for v in pts:
                brute = brute + small.f.eval(x + v)
            assert divergence_partial(small, x, 1) == brute
            assert divergence_partial(cons6, x, 1) == brute

    def test_strictly_increasing_in_decades(self, cons6):
        for xs in ("0", "0.5", "1"):
            x = dy(xs)
            prev = None
            for m in range(1, 7):
                s = divergence_partial(cons6, x, m)
                if prev is not None:
                    assert s > prev
                prev = s

    def test_increment_floors_positive(self, cons6):
        rng = random.Random(777)
        floors = {m: None for m in range(1, 6)}
        for _ in range(100):
            x = Dyadic(rng.getrandbits(30), -30)
            vals = [divergence_partial(cons6, x, m) for m in range(1, 7)]
            for m in range(1, 6):
                inc = vals[m] - vals[m - 1]
                assert inc > ZERO
                if floors[m] is None or inc < floors[m]:
                    floors[m] = inc
        for m, fl in floors.items():
            assert fl > ZERO

    def test_domain_guard(self, cons6):
        with pytest.raises(OutOfInterval):
            divergence_partial(cons6, Dyadic(2), 1)


class TestConvergence:
    def test_anchor_x4_decade1(self, cons6):
        rep = convergence_tail_check(cons6, Dyadic(4))
        assert rep.passed
        assert rep.params["per_decade"][0]["sum"] == str(Dyadic(5, -4))
        assert rep.params["per_decade"][0]["bound"] == str(Dyadic(1, -1))

    def test_anchor_x5(self, cons6):
        rep = convergence_tail_check(cons6, Dyadic(5))
        assert rep.passed
        s1 = Dyadic.parse(rep.params["per_decade"][0]["sum"])
        assert s1 <= Dyadic(1, -1)

    def test_anchor_x4_eighth_decade2(self, cons6):
        rep = convergence_tail_check(cons6, Dyadic(4) + Dyadic(1, -3))
        assert rep.passed
        s2 = Dyadic.parse(rep.params["per_decade"][1]["sum"])
        assert s2 <= Dyadic(1, -3)  # 2*2^4*2^-8

    def test_enumeration_oracle_decade1(self, cons6):
        rng = random.Random(321)
        small = build_thm33(1)
        pts = list(small.seq.iter_points())
        for _ in range(15):
            x = Dyadic(4) + Dyadic(rng.getrandbits(20), -20)
            rep = convergence_tail_check(small, x)
            brute = ZERO
            for v in pts:
                brute = brute + small.f.eval(x + v)
            assert Dyadic.parse(rep.params["per_decade"][0]["sum"]) == brute

    def test_hundred_seeded_points(self, cons6):
        rng = random.Random(20260810)
        for _ in range(100):
            x = Dyadic(4) + Dyadic(rng.getrandbits(40), -40)
            assert convergence_tail_check(cons6, x).passed

    def test_domain_guard(self, cons6):
        with pytest.raises(OutOfInterval):
            convergence_tail_check(cons6, Dyadic(3))


class TestProbe:
    def test_vacuous(self, cons6):
        rep = thm34_probe(cons6, dy("4.5"), 0)
        assert rep.passed

    def test_hundred_samples(self):
        cons = build_thm33(3)
        rep = thm34_probe(cons, dy("4.5"), 100, seed=9)
        assert rep.passed
        assert rep.params["failures"] == []

    def test_control_group_divergence_side(self, cons6):
        # shifts in [0,1] grow without the probe's majorant applying
        s_small = divergence_partial(cons6, dy("0.25"), 2)
        s_big = divergence_partial(cons6, dy("0.25"), 6)
        assert s_big > s_small

    def test_domain_guard(self, cons6):
        with pytest.raises(OutOfInterval):
            thm34_probe(cons6, Dyadic(4), 1)
