import pytest

from dipelab.bench import BenchRow, Sweep, chain_rigidity, expand_families, parse_grid, parse_n_range, run_bench
from dipelab.errors import ArgumentError
from dipelab.moments import Ensemble, Method


class TestParsing:
    def test_n_range(self):
        assert parse_n_range("2:4") == [2, 3, 4]
        assert parse_n_range("3") == [3]

    @pytest.mark.parametrize("text", ["4:2", "0:3", "a:b", ""])
    def test_bad_n_range(self, text):
        with pytest.raises(ArgumentError):
            parse_n_range(text)

    def test_grid(self):
        assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
        with pytest.raises(ArgumentError):
            parse_grid("0:1")

    def test_expand_families(self):
        labels = [f.label for f in expand_families(["ghz", "schmidt:0.25"], [2, 3])]
        assert labels == ["ghz:2", "ghz:3", "schmidt:0.25"]


class TestFamilySweep:
    def test_rows_are_sorted_and_complete(self):
        result = run_bench(families=["ghz", "plusprod"], n_values=[1, 2])
        assert len(result.rows) == 8
        assert result.rows == sorted(result.rows, key=BenchRow.sort_key)
        assert all(row.status == "ok" for row in result.rows)

    def test_workers_do_not_change_output(self):
        serial = run_bench(n_values=[1, 2], workers=1)
        pooled = run_bench(n_values=[1, 2], workers=3)
        assert serial.model_dump() == pooled.model_dump()

    def test_methods(self):
        rows = {(r.family, r.ensemble): r for r in run_bench(families=["ghz", "w"], n_values=[3]).rows}
        assert rows["ghz:3", Ensemble.HAAR].method == Method.CLOSED_FORM
        assert rows["ghz:3", Ensemble.CLIFFORD].method == Method.STABILIZER
        assert rows["w:3", Ensemble.CLIFFORD].method == Method.GENERIC
        assert rows["ghz:3", Ensemble.HAAR].B == pytest.approx(1.338)

    def test_capped_rows_are_skipped(self):
        rows = run_bench(families=["haar"], n_values=[4]).rows
        haar = [r for r in rows if r.ensemble == Ensemble.HAAR][0]
        assert haar.status == "skipped" and haar.B is None
        assert "capped" in haar.reason
        clifford = [r for r in rows if r.ensemble == Ensemble.CLIFFORD][0]
        assert clifford.status == "ok"

    def test_monte_carlo_fallback(self):
        rows = run_bench(families=["haar"], n_values=[4], ensembles=[Ensemble.HAAR], mc_samples=50, seed=3).rows
        assert rows[0].method == Method.MC
        assert rows[0].seed == 3 and rows[0].samples == 50
        assert rows[0].B > 0

    def test_bad_family_is_an_error(self):
        with pytest.raises(ArgumentError):
            run_bench(families=["nope"], n_values=[2])


class TestPuritySweep:
    def test_endpoints(self):
        rows = run_bench(sweep=Sweep.PURITY, n_values=[2], p_grid=[0.0, 1.0]).rows
        values = {(r.family, r.ensemble): r.B for r in rows}
        assert values["depol:plusprod:2:0", Ensemble.CLIFFORD] == pytest.approx(2.25)
        assert values["depol:plusprod:2:0", Ensemble.HAAR] == pytest.approx(1.44)
        assert values["depol:plusprod:2:1", Ensemble.CLIFFORD] == pytest.approx(0.0625)
        assert values["depol:plusprod:2:1", Ensemble.HAAR] == pytest.approx(0.0625)


class TestChainSweep:
    def test_clifford_moment_depends_on_edges(self):
        with pytest.warns(RuntimeWarning):
            result = run_bench(sweep=Sweep.CHAIN, n_values=[2, 3])
        assert result.rigid == {2: False, 3: False}
        values = {r.family: r.B for r in result.rows if r.ensemble == Ensemble.CLIFFORD}
        assert values["chain:2:0"] == pytest.approx(2.25)
        assert values["chain:2:1"] == pytest.approx(2.125)
        assert all(v <= 1.5**3 + 1e-12 for k, v in values.items() if k.startswith("chain:3"))

    def test_rigidity_of_constant_rows(self):
        rows = [BenchRow(family=f"chain:2:{m}", n=2, ensemble=Ensemble.CLIFFORD, B=2.0) for m in range(2)]
        assert chain_rigidity(rows) == {2: True}
