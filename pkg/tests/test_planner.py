import math

import pytest

from dipelab.errors import ArgumentError
from dipelab.planner import BoundKind, PlanRequest, Regime, scaling_table, shadow_copies, sufficient_copies


def plan(n, regime=Regime.CLIFFORD, eps=0.1, delta=0.1, **kwargs):
    return sufficient_copies(PlanRequest(n=n, epsilon=eps, delta=delta, regime=regime, **kwargs))


class TestWorstCaseBudgets:
    def test_clifford_shot_count(self):
        result = plan(8)
        assert result.continuous_N_M == pytest.approx(16)
        assert result.N_M_star == 16
        assert result.N_star == result.N_M_star * result.N_U_star

    @pytest.mark.parametrize("n", [2, 5, 10])
    def test_conjectured_shot_count(self, n):
        assert plan(n, Regime.CONJECTURED).continuous_N_M == pytest.approx(2.5 ** (n / 2))

    @pytest.mark.parametrize("n", range(2, 41))
    def test_integer_budget_tracks_the_continuous_optimum(self, n):
        result = plan(n)
        ratio = result.N_star / result.continuous_bound
        assert 1 - 1e-12 <= ratio <= 1.01

    def test_single_qubit_rounding_overhead(self):
        result = plan(1)
        assert result.N_star / result.continuous_bound < 1.05

    def test_budget_is_sufficient(self):
        result = plan(6)
        assert result.N_U_star * result.N_M_star >= result.bound

    def test_breakdown_terms(self):
        result = plan(4)
        assert set(result.breakdown) == {"second", "third", "fourth"}
        assert result.bound == pytest.approx(sum(result.breakdown.values()))


class TestStateBudgets:
    def test_state_needs_coefficients(self):
        with pytest.raises(ValueError):
            PlanRequest(n=2, epsilon=0.1, delta=0.1, regime=Regime.STATE)

    def test_exact_needs_state_regime(self):
        with pytest.raises(ValueError):
            PlanRequest(n=2, epsilon=0.1, delta=0.1, bound=BoundKind.EXACT)

    def test_exact_needs_overlap(self):
        with pytest.raises(ValueError):
            PlanRequest(n=2, epsilon=0.1, delta=0.1, regime=Regime.STATE, A=9, B=2.25, C=9, bound=BoundKind.EXACT)

    @pytest.mark.parametrize(
        "A, B, C, f",
        [(9.0, 2.25, 9.0, 1.0), (7.0, 2.125, 5.5, 1.0), (3.0, 0.25, 1.0, 0.5), (27.0, 3.375, 20.0, 1.0)],
    )
    def test_exact_never_exceeds_simple(self, A, B, C, f):
        common = dict(regime=Regime.STATE, A=A, B=B, C=C)
        simple = plan(2, **common)
        exact = plan(2, overlap=f, bound=BoundKind.EXACT, **common)
        assert exact.N_star <= simple.N_star
        assert exact.bound_kind == "exact"
        assert "first" in exact.breakdown

    def test_default_third_moment(self):
        result = plan(3, Regime.STATE, A=27.0, B=3.375)
        assert result.breakdown["third"] == pytest.approx(2 * 1.75**3 / 0.001)


class TestMonotonicity:
    REGIMES = [Regime.CLIFFORD, Regime.HAAR, Regime.CONJECTURED, Regime.SHADOW]
    GRID = [0.05, 0.1, 0.2, 0.4]

    @pytest.mark.parametrize("regime", REGIMES)
    def test_budget_grows_with_n(self, regime):
        budgets = [plan(n, regime).N_star for n in range(1, 13)]
        assert budgets == sorted(budgets)

    @pytest.mark.parametrize("regime", REGIMES)
    def test_budget_shrinks_with_epsilon(self, regime):
        budgets = [plan(4, regime, eps=eps).N_star for eps in self.GRID]
        assert budgets == sorted(budgets, reverse=True)

    @pytest.mark.parametrize("regime", REGIMES)
    def test_budget_shrinks_with_delta(self, regime):
        budgets = [plan(4, regime, delta=delta).N_star for delta in self.GRID]
        assert budgets == sorted(budgets, reverse=True)

    def test_shadow_regime_routes_to_shadow_copies(self):
        assert plan(3, Regime.SHADOW, eps=0.2, delta=0.3).N_star == shadow_copies(3, 0.2, 0.3).N_star


class TestShadowBudgets:
    def test_single_qubit(self):
        result = shadow_copies(1, 0.1, 0.1)
        assert result.N_star == 4002
        assert result.N_M_star == 1
        assert result.binding == "cross"

    def test_through_plan_request(self):
        assert plan(1, Regime.SHADOW).N_star == 4002

    def test_smallest_sufficient_budget(self):
        result = shadow_copies(5, 0.2, 0.05)
        a, b, c = 7.5**5, 2.0**6, 0.05 * 0.2**2
        k = result.N_star
        assert a / k**2 + b / k <= c
        assert a / (k - 1) ** 2 + b / (k - 1) > c

    def test_growth_rate(self):
        budgets = {n: shadow_copies(n, 0.1, 0.1).N_star for n in range(20, 32)}
        for n in range(20, 31):
            assert budgets[n + 1] / budgets[n] == pytest.approx(math.sqrt(7.5), rel=0.02)

    def test_errors(self):
        with pytest.raises(ArgumentError):
            shadow_copies(0, 0.1, 0.1)
        with pytest.raises(ArgumentError):
            shadow_copies(2, 1.5, 0.1)
        with pytest.raises(ArgumentError):
            PlanRequest(n=2, epsilon=0.1, delta=0.1, regime=Regime.SHADOW).coefficients()


class TestScalingTable:
    def test_rows(self):
        rows = scaling_table(0.1, 0.1, range(1, 4))
        assert len(rows) == 5
        prior = rows[0]
        assert not prior.numeric and all(v is None for v in prior.N_star.values())
        shadow = [r for r in rows if r.regime == Regime.SHADOW][0]
        assert shadow.N_star[1] == 4002
        conjectured = [r for r in rows if r.regime == Regime.CONJECTURED][0]
        clifford = [r for r in rows if r.regime == Regime.CLIFFORD][0]
        assert conjectured.N_star[3] <= clifford.N_star[3]
