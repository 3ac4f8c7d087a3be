from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singlering.errors import ValidationError
from singlering.weingarten import (
    STANDARD_BATTERY,
    cycle_type,
    mc_moment,
    mixed_moment_exact,
    mobius,
    wg_asymptotic_check,
    wg_exact,
)


def test_cycle_type():
    assert cycle_type((0, 1, 2)) == (1, 1, 1)
    assert cycle_type((1, 2, 0, 4, 3)) == (3, 2)
    assert cycle_type(()) == ()


@pytest.mark.parametrize("part, value", [((1,), 1), ((2,), -1), ((3,), 2), ((4,), -5), ((2, 2), 1), ((3, 2), -2)])
def test_mobius(part, value):
    assert mobius(part) == value


class TestTables:
    @given(st.integers(1, 200))
    def test_order_one(self, n):
        t = wg_exact(1, n)
        assert t.values == {(1,): pytest.approx(1 / n)}
        assert t.exact[(1,)] == Fraction(1, n)

    @given(st.integers(2, 300))
    def test_order_two(self, n):
        t = wg_exact(2, n)
        assert t.exact == {(2,): Fraction(-1, n * (n * n - 1)), (1, 1): Fraction(1, n * n - 1)}

    def test_order_two_at_five(self):
        t = wg_exact(2, 5)
        assert t[(1, 1)] == pytest.approx(1 / 24, abs=1e-15)
        assert t[(2,)] == pytest.approx(-1 / 120, abs=1e-15)

    def test_order_three_closed_form(self):
        n = 7
        t = wg_exact(3, n)
        d = n * (n * n - 1) * (n * n - 4)
        assert t.exact[(1, 1, 1)] == Fraction(n * n - 2, d)
        assert t.exact[(2, 1)] == Fraction(-1, (n * n - 1) * (n * n - 4))
        assert t.exact[(3,)] == Fraction(2, d)

    @pytest.mark.parametrize("p", range(1, 7))
    def test_partition_count_and_residual(self, p):
        t = wg_exact(p, p + 3)
        assert len(t.values) == [1, 2, 3, 5, 7, 11][p - 1]
        assert t.residual < 1e-10 and t.class_spread < 1e-12

    def test_column_sum(self):
        # sum over S_p of Wg(sigma) is 1 / (n (n+1) ... (n+p-1))
        from math import factorial, prod

        from singlering.weingarten import _symmetric_group

        for p in (2, 3, 4):
            n = 9
            t = wg_exact(p, n)
            total = sum(t.values[ct] for ct in _symmetric_group(p)[3])
            assert total == pytest.approx(1 / prod(n + k for k in range(p)), rel=1e-12)
            assert factorial(p) == len(_symmetric_group(p)[0])

    def test_guards(self):
        with pytest.raises(ValidationError):
            wg_exact(3, 2)
        with pytest.raises(ValidationError):
            wg_exact(7, 10)


class TestAsymptotics:
    def test_transposition(self):
        vals = wg_asymptotic_check(2, [2], [10, 20, 40])
        for n, v in zip([10, 20, 40], vals):
            assert v == pytest.approx(-(n**3) / (n * (n * n - 1)), rel=1e-12)
            assert abs(v + 1) <= 2 / n**2

    def test_identity(self):
        vals = wg_asymptotic_check(2, [1, 1], [10, 100, 1000])
        assert vals[-1] == pytest.approx(1, abs=1e-5)
        assert np.all(np.diff(np.abs(np.array(vals) - 1)) < 0)

    def test_order_one_exact(self):
        assert wg_asymptotic_check(1, [1], [3, 17, 400]) == pytest.approx([1, 1, 1], abs=1e-14)

    @pytest.mark.parametrize("part", [(3,), (2, 1), (4,), (2, 2), (3, 1), (5,), (3, 3)])
    def test_leading_order_is_mobius(self, part):
        p = sum(part)
        vals = wg_asymptotic_check(p, part, [200, 400])
        errs = [abs(v - mobius(part)) for v in vals]
        assert errs[0] < 0.01 * abs(mobius(part))
        # doubling n divides an O(n^-2) error by about 4
        assert errs[1] / errs[0] == pytest.approx(0.25, abs=0.02)

    def test_not_a_partition(self):
        with pytest.raises(ValidationError):
            wg_asymptotic_check(3, [2], [10])


class TestMixedMoments:
    @given(st.integers(3, 50))
    def test_examples(self, n):
        assert mixed_moment_exact((0, 1), (0, 1), (0, 1), (0, 1), n) == pytest.approx(1 / (n * n - 1))
        assert mixed_moment_exact((0, 0), (0, 0), (0, 0), (0, 0), n) == pytest.approx(2 / (n * (n + 1)))
        assert mixed_moment_exact((0,), (0,), (0,), (0,), n) == pytest.approx(1 / n)

    def test_unbalanced_is_zero(self):
        assert mixed_moment_exact((0,), (), (0,), (), 5) == 0.0
        assert mixed_moment_exact((0, 1), (0,), (0, 1), (0,), 5) == 0.0

    def test_row_sum_unitarity(self):
        # sum_j E|U_0j|^2 |U_1k|^2 over j equals E|U_1k|^2 = 1/n
        n = 6
        total = sum(mixed_moment_exact((0, 1), (0, 1), (j, 2), (j, 2), n) for j in range(n))
        assert total == pytest.approx(1 / n, rel=1e-12)

    def test_bad_shapes(self):
        with pytest.raises(ValidationError):
            mixed_moment_exact((0, 1), (0, 1), (0,), (0, 1), 4)
        with pytest.raises(ValidationError):
            mixed_moment_exact((0,), (0,), (4,), (4,), 4)


class TestMonteCarlo:
    def test_entry_moment(self):
        mean, se = mc_moment((0,), (0,), (0,), (0,), 10, 100_000, 0)
        assert abs(mean - 0.1) <= 3 * se

    def test_four_entry_moment(self):
        mean, se = mc_moment((0, 1), (0, 1), (0, 1), (0, 1), 10, 100_000, 1)
        assert abs(mean - 1 / 99) <= 3 * se

    def test_first_moment_vanishes(self):
        mean, se = mc_moment((0,), (), (0,), (), 7, 100_000, 2)
        assert abs(mean) <= 3 * se

    def test_deterministic(self):
        assert mc_moment((0,), (0,), (0,), (0,), 5, 1000, 4) == mc_moment((0,), (0,), (0,), (0,), 5, 1000, 4)

    def test_minimum_trials(self):
        with pytest.raises(ValidationError):
            mc_moment((0,), (0,), (0,), (0,), 5, 99, 0)

    def test_battery_shape(self):
        assert len(STANDARD_BATTERY) == 10
        assert max(len(pat[0]) for pat in STANDARD_BATTERY) == 3
