"""Dyadic scalar, interval, union, and piecewise-linear arithmetic checks.

The independent oracle throughout is fractions.Fraction; the core never uses
it, so agreement here is a genuine cross-check.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dyadlab.exactnum import (
    Dyadic,
    DyInterval,
    GuardExceeded,
    IntervalUnion,
    NotExact,
    PiecewiseLinear,
    ZERO,
    ONE,
)


def frac(d: Dyadic) -> Fraction:
    return Fraction(d.m) * Fraction(2) ** d.e


def dy(s: str) -> Dyadic:
    return Dyadic.parse(s)


dyadics = st.builds(
    Dyadic,
    st.integers(min_value=-(2**40), max_value=2**40),
    st.integers(min_value=-64, max_value=64),
)


class TestDyadicBasics:
    def test_canonical_form(self):
        d = Dyadic(12, 3)  # 12*2^3 = 3*2^5
        assert (d.m, d.e) == (3, 5)
        assert (Dyadic(0, 17).m, Dyadic(0, 17).e) == (0, 0)

    def test_add_examples(self):
        assert Dyadic(3, -3) + Dyadic(1, -3) == Dyadic(1, -1)
        x = Dyadic(123, -7)
        assert x + ZERO == x
        # 15 + 160*(2^-8 - 2^-12): repeated-addition oracle over 160 terms
        acc = Dyadic(15)
        term = Dyadic(1, -8) - Dyadic(1, -12)
        for _ in range(160):
            acc = acc + term
        assert acc == Dyadic(1995, -7)
        assert acc == Dyadic(15) + term * 160

    def test_mul_examples(self):
        assert Dyadic(1, -4) * Dyadic(1, -4) == Dyadic(1, -8)
        a = Dyadic(77, -13)
        assert a * ONE == a
        assert Dyadic(4 * 1 + 3) * Dyadic(1, -4) == Dyadic(7, -4)

    def test_div_exact_examples(self):
        # steps of 2^-9 from 15+75/128 up to 31.5
        lhs = dy("63*2^-1") - Dyadic(1995, -7)
        assert lhs.div_exact(Dyadic(1, -9)) == Dyadic(8148)
        assert ZERO.div_exact(Dyadic(5, -3)) == ZERO
        with pytest.raises(NotExact):
            ONE.div_exact(Dyadic(3))
        with pytest.raises(ZeroDivisionError):
            ONE.div_exact(ZERO)

    def test_floor_ratio_examples(self):
        assert divmod(Dyadic(11, -12), Dyadic(1, -12)) == (11, ZERO)
        a, b = Dyadic(3, -5), Dyadic(1, -2)
        assert divmod(a, b) == (0, a)
        assert divmod(Dyadic(7, -3), Dyadic(1, -2)) == (3, Dyadic(1, -3))

    def test_floor_ceil(self):
        assert Dyadic(7, -3).floor() == 0
        assert Dyadic(7, -3).ceil() == 1
        assert Dyadic(-7, -3).floor() == -1
        assert Dyadic(-7, -3).ceil() == 0
        assert Dyadic(5, 1).floor() == 10

    def test_parse_print_roundtrip_identity(self):
        rng = random.Random(20260810)
        for _ in range(500):
            d = Dyadic(rng.randint(-(2**80), 2**80), rng.randint(-200, 200))
            assert Dyadic.parse(str(d)) == d

    def test_parse_decimal(self):
        assert dy("0.75") == Dyadic(3, -2)
        assert dy("-2.5") == Dyadic(-5, -1)
        assert dy("16") == Dyadic(1, 4)
        with pytest.raises(NotExact):
            dy("0.1")

    def test_decimal_rendering(self):
        assert Dyadic(1995, -7).to_decimal() == "15.5859375"
        assert Dyadic(-3, -2).to_decimal() == "-0.75"
        assert Dyadic(5, 2).to_decimal() == "20"
        assert Dyadic(1, -65).to_decimal() is None

    def test_span_guard(self):
        with pytest.raises(GuardExceeded):
            ONE + Dyadic(1, -(1 << 21))
        # representable on its own, and multiplication is span-free
        tiny = Dyadic(1, -(1 << 21))
        assert tiny * tiny == Dyadic(1, -(1 << 22))

    def test_comparison_across_huge_spans(self):
        assert Dyadic(1, -(1 << 30)) < ONE
        assert Dyadic(-1, 1 << 30) < Dyadic(-1, 5)
        assert Dyadic(1, 1 << 30) > ONE

    def test_huge_mantissa_serialization(self):
        # ~20k decimal digits, beyond the interpreter's default str cap
        m = (1 << 65536) + 1
        d = Dyadic(m, -3)
        assert Dyadic.parse(str(d)) == d
        assert len(str(d)) > 19000


class TestDyadicOracle:
    def test_add_mul_agree_with_fraction_oracle(self):
        rng = random.Random(1_000_003)
        for _ in range(10_000):
            a = Dyadic(rng.randint(-(2**64), 2**64), rng.randint(-64, 64))
            b = Dyadic(rng.randint(-(2**64), 2**64), rng.randint(-64, 64))
            assert frac(a + b) == frac(a) + frac(b)
            assert frac(a * b) == frac(a) * frac(b)

    def test_floor_ratio_reconstruction(self):
        rng = random.Random(77)
        for _ in range(2_000):
            a = Dyadic(rng.randint(-(2**48), 2**48), rng.randint(-32, 32))
            b = Dyadic(rng.randint(1, 2**48), rng.randint(-32, 32))
            q, r = divmod(a, b)
            assert a == b * q + r
            assert ZERO <= r < b
            assert q == (frac(a) / frac(b)).__floor__()

    @given(dyadics, dyadics)
    def test_add_commutes(self, a, b):
        assert a + b == b + a

    @given(dyadics, dyadics, dyadics)
    def test_mul_distributes(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(dyadics, dyadics)
    def test_ordering_matches_oracle(self, a, b):
        assert (a < b) == (frac(a) < frac(b))
        assert (a == b) == (frac(a) == frac(b))


class TestDyInterval:
    def test_contains_respects_closedness(self):
        iv = DyInterval(Dyadic(0), Dyadic(1), closed_lo=True, closed_hi=False)
        assert iv.contains(ZERO)
        assert not iv.contains(ONE)
        assert iv.contains(Dyadic(1, -1))

    def test_degenerate_must_be_closed(self):
        DyInterval.closed(1, 1)
        with pytest.raises(ValueError):
            DyInterval(ONE, ONE, True, False)

    def test_parse_roundtrip(self):
        for s in ["[1*2^-1,1*2^0]", "[0*2^0,1*2^0)", "(3*2^-2,7*2^-1]", "(0*2^0,1*2^5)"]:
            assert str(DyInterval.parse(s)) == s

    def test_covers(self):
        g = DyInterval.open(0, 2)
        assert g.covers(DyInterval.closed(dy("0.5"), 1))
        assert not g.covers(DyInterval.closed(0, dy("0.5")))
        assert g.covers(DyInterval(ZERO, ONE, False, True))


class TestIntervalUnion:
    def test_insert_examples(self):
        u = IntervalUnion()
        u1 = u.insert(DyInterval.closed(0, 1))
        assert len(u1) == 1
        u2 = u1.insert(DyInterval.closed(1, 2))
        assert len(u2) == 1 and str(u2.parts[0]) == "[0*2^0,1*2^1]"
        piece = DyInterval.closed(Dyadic(16) + Dyadic(11, -8), Dyadic(16) + Dyadic(11, -8) + Dyadic(1, -12))
        v = u.insert(piece).insert(piece)
        assert len(v) == 1
        assert v.measure() == Dyadic(1, -12)

    def test_open_sets_do_not_merge_at_excluded_point(self):
        u = IntervalUnion([DyInterval(ZERO, ONE, True, False), DyInterval(ONE, Dyadic(2), False, True)])
        assert len(u) == 2
        assert u.measure() == Dyadic(2)

    def test_measure_invariant_under_insertion_order(self):
        rng = random.Random(424242)
        for _ in range(200):
            ivs = []
            for _ in range(rng.randint(1, 12)):
                lo = Dyadic(rng.randint(-64, 64), rng.randint(-4, 2))
                width = Dyadic(rng.randint(0, 32), rng.randint(-4, 1))
                closed = rng.random() < 0.5 or not width
                ivs.append(
                    DyInterval(lo, lo + width, True, True)
                    if closed
                    else DyInterval(lo, lo + width, rng.random() < 0.5, False)
                    if width
                    else DyInterval(lo, lo, True, True)
                )
            base = IntervalUnion(ivs)
            for _ in range(3):
                rng.shuffle(ivs)
                u = IntervalUnion()
                for iv in ivs:
                    u = u.insert(iv)
                assert u.measure() == base.measure()
                assert u == base

    def test_measure_against_fraction_sweep_oracle(self):
        rng = random.Random(99)
        for _ in range(300):
            ivs = []
            for _ in range(rng.randint(1, 10)):
                lo = Dyadic(rng.randint(-32, 32), rng.randint(-3, 1))
                width = Dyadic(rng.randint(1, 16), rng.randint(-3, 0))
                ivs.append(DyInterval.closed(lo, lo + width))
            u = IntervalUnion(ivs)
            # oracle: merge closed intervals as fractions
            spans = sorted((frac(i.lo), frac(i.hi)) for i in ivs)
            total = Fraction(0)
            cur_lo, cur_hi = spans[0]
            for lo, hi in spans[1:]:
                if lo <= cur_hi:
                    cur_hi = max(cur_hi, hi)
                else:
                    total += cur_hi - cur_lo
                    cur_lo, cur_hi = lo, hi
            total += cur_hi - cur_lo
            assert frac(u.measure()) == total

    def test_contains_interval(self):
        g = IntervalUnion([DyInterval.open(0, 2), DyInterval.open(5, 9)])
        assert g.contains_interval(DyInterval.closed(dy("0.5"), 1))
        assert not g.contains_interval(DyInterval.closed(0, dy("0.5")))
        assert not g.contains_interval(DyInterval.closed(1, 6))
        assert g.contains_interval(DyInterval.closed(6, 7))

    def test_json_roundtrip(self):
        g = IntervalUnion([DyInterval.open(0, 2), DyInterval.closed(5, 9)])
        assert IntervalUnion.from_json(g.to_json()) == g


class TestPiecewiseLinear:
    def tent(self):
        # plateau 2^-1 on [2, 2+2^-2], ramps of width 2^-4
        h = Dyadic(1, -1)
        return PiecewiseLinear(
            [
                (Dyadic(2) - Dyadic(1, -4), ZERO),
                (Dyadic(2), h),
                (Dyadic(2) + Dyadic(1, -2), h),
                (Dyadic(2) + Dyadic(1, -2) + Dyadic(1, -4), ZERO),
            ]
        )

    def test_plateau_value(self):
        f = self.tent()
        assert f.eval(Dyadic(2) + Dyadic(1, -5)) == Dyadic(1, -1)

    def test_zero_outside_support(self):
        f = self.tent()
        assert f.eval(ZERO) == ZERO
        assert f.eval(Dyadic(3)) == ZERO
        assert f.eval(Dyadic(2) - Dyadic(1, -4)) == ZERO

    def test_ramp_interpolation(self):
        # ramp from 0 at 9.75 to 2^-4 at 10; slope 2^-2; value at 9.8125 is 2^-6
        f = PiecewiseLinear(
            [
                (dy("9.75"), ZERO),
                (Dyadic(10), Dyadic(1, -4)),
                (Dyadic(11), Dyadic(1, -4)),
                (dy("11.25"), ZERO),
            ]
        )
        assert f.eval(dy("9.8125")) == Dyadic(1, -6)

    def test_eval_matches_fraction_oracle(self):
        f = self.tent()
        rng = random.Random(5)
        xs = [frac(x) for x in f.xs]
        vs = [frac(v) for v in f.vs]
        for _ in range(500):
            x = Dyadic(rng.randint(31000, 37000), -14)
            fx = frac(x)
            expect = Fraction(0)
            for i in range(len(xs) - 1):
                if xs[i] <= fx <= xs[i + 1]:
                    expect = vs[i] + (vs[i + 1] - vs[i]) * (fx - xs[i]) / (xs[i + 1] - xs[i])
                    break
            assert frac(f.eval(x)) == expect

    def test_non_dyadic_interpolant_guard(self):
        # slope 1/3: values at non-breakpoint dyadic x are not dyadic
        f = PiecewiseLinear([(ZERO, ZERO), (Dyadic(3), ONE), (Dyadic(6), ZERO)])
        assert f.eval(Dyadic(3)) == ONE
        with pytest.raises(NotExact):
            f.eval(ONE)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            PiecewiseLinear([(ZERO, ONE), (ONE, ZERO)])  # nonzero first value
        with pytest.raises(ValueError):
            PiecewiseLinear([(ONE, ZERO), (ONE, ZERO)])  # not strictly increasing
        with pytest.raises(ValueError):
            PiecewiseLinear([(ZERO, ZERO), (ONE, Dyadic(-1)), (Dyadic(2), ZERO)])

    def test_json_roundtrip(self):
        f = self.tent()
        assert PiecewiseLinear.from_json(f.to_json()) == f
