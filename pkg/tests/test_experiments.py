import math

import pytest

from logdiff.config import ExperimentConfig
from logdiff.experiments import (
    matched_truncation_gauge,
    run_boundary_layer_experiment,
    run_exact_solution_suite,
    run_q_sweep,
    run_uniqueness_experiment,
)
from logdiff.snapshots import read_rows_csv


@pytest.fixture(scope="module")
def exact_suite():
    return run_exact_solution_suite()


@pytest.fixture(scope="module")
def q_small():
    return run_q_sweep(r0_values=(0.6, 0.75), gamma_values=(0.15, 0.35), n_R=5)


@pytest.fixture(scope="module")
def uniq_result():
    return run_uniqueness_experiment(small_uniqueness_config(), gauge=False)


@pytest.fixture(scope="module")
def layer():
    return run_boundary_layer_experiment()


class TestExactSuite:
    def test_passes(self, exact_suite):
        assert exact_suite.passed

    def test_all_four_orders_fitted(self, exact_suite):
        assert set(exact_suite.orders) == {
            ("bigbang", "spatial"), ("cusp", "spatial"),
            ("bigbang", "temporal"), ("cusp", "temporal"),
        }
        for (_, kind), slope in exact_suite.orders.items():
            lo, hi = (1.7, 2.3) if kind == "spatial" else (0.8, 1.2)
            assert lo <= slope <= hi

    def test_flatdisc_static_tight(self, exact_suite):
        assert exact_suite.flat_max_error <= 1e-10

    def test_row_count_and_statuses(self, exact_suite):
        # 3 static + (3 levels + fit) x2 spatial + (4 levels + fit) x2 temporal
        assert len(exact_suite.rows) == 21
        assert all(r["status"] == "ok" for r in exact_suite.rows)

    def test_runtime_budget(self, exact_suite):
        assert exact_suite.elapsed < 120.0

    def test_csv_written_and_deterministic(self, tmp_path):
        run_exact_solution_suite(out_dir=tmp_path / "a")
        run_exact_solution_suite(out_dir=tmp_path / "b")
        a = (tmp_path / "a" / "exact_suite.csv").read_text()
        b = (tmp_path / "b" / "exact_suite.csv").read_text()
        assert a == b
        assert a.startswith("# config-hash=")
        rows = read_rows_csv(tmp_path / "a" / "exact_suite.csv")
        assert rows[0]["kind"] == "static"

    def test_jobs_parallel_same_rows(self, exact_suite):
        par = run_exact_solution_suite(jobs=2)
        assert par.orders == exact_suite.orders


class TestQSweep:
    def test_small_sweep_passes(self, q_small):
        assert len(q_small.rows) == 20
        assert q_small.passed

    def test_ratios_bounded(self, q_small):
        assert all(r["ratio"] <= 1.0 for r in q_small.rows)

    def test_split_rows_have_dual_route_check(self, q_small):
        splits = [r for r in q_small.rows if r["split"] == 1]
        assert splits, "deep rows should hit the e^2 a < 1 regime"
        for r in splits:
            assert r["split_gap"] <= r["split_budget"]
            assert r["Q1"] > 0.0 and r["Q2"] > 0.0

    def test_q_decreases_toward_boundary(self, q_small):
        for r0 in (0.6, 0.75):
            for gamma in (0.15, 0.35):
                qs = [r["Q"] for r in q_small.rows
                      if r["r0"] == r0 and r["gamma"] == gamma]
                assert len(qs) == 5
                assert all(b < a for a, b in zip(qs, qs[1:]))

    def test_default_mesh_is_at_least_200_rows(self):
        # count only: the full sweep runs in the acceptance suite
        from logdiff.experiments import _Q_GAMMAS, _Q_R0S
        assert len(_Q_R0S) * len(_Q_GAMMAS) * 6 >= 200

    def test_csv_deterministic(self, tmp_path):
        run_q_sweep(out_dir=tmp_path / "a", r0_values=(0.7,), gamma_values=(0.25,), n_R=4)
        run_q_sweep(out_dir=tmp_path / "b", r0_values=(0.7,), gamma_values=(0.25,), n_R=4)
        assert (tmp_path / "a" / "q_sweep.csv").read_text() == \
               (tmp_path / "b" / "q_sweep.csv").read_text()

    def test_config_driven(self, tmp_path):
        cfg = ExperimentConfig(r0=0.55, R_list=(0.9, 0.95, 0.99), gamma_list=(0.25,))
        res = run_q_sweep(config=cfg, out_dir=tmp_path)
        assert len(res.rows) == 3
        assert res.passed


def small_uniqueness_config():
    return ExperimentConfig(
        experiment="uniqueness", r0=0.75,
        R_list=(math.exp(-0.09), math.exp(-0.06), math.exp(-0.03)),
        gamma_list=(0.25,), ramps=(1e2, 1e3, 1e4), T=0.1, dt=1e-3,
        n=161, ratio=1.04, sample_times=(0.05, 0.1),
    )


class TestUniqueness:
    def test_certified_everywhere(self, uniq_result):
        assert uniq_result.all_certified
        assert all(r["cert_pass"] == 1 for r in uniq_result.rows)

    def test_diffs_decay_as_R_increases(self, uniq_result):
        assert uniq_result.area_monotone_in_R
        assert uniq_result.sup_monotone_in_R

    def test_area_below_envelope(self, uniq_result):
        for r in uniq_result.rows:
            assert r["area_diff"] <= r["envelope"]

    def test_row_count(self, uniq_result):
        # 3 R x 2 pairs x 1 gamma x 2 sample times
        assert len(uniq_result.rows) == 12
        assert not uniq_result.failures

    def test_passed_without_gauge(self, uniq_result):
        assert uniq_result.passed

    def test_identical_ramps_give_zero_diffs(self):
        cfg = ExperimentConfig(
            experiment="uniqueness", r0=0.75,
            R_list=(math.exp(-0.09), math.exp(-0.06), math.exp(-0.03)),
            gamma_list=(0.25,), ramps=(1e3, 1e3), T=0.05, dt=1e-3,
            n=101, ratio=1.05, sample_times=(0.05,),
        )
        res = run_uniqueness_experiment(cfg, gauge=False)
        assert all(r["sup_diff"] == 0.0 for r in res.rows)
        assert all(r["area_diff"] == 0.0 for r in res.rows)

    def test_needs_two_ramps(self):
        cfg = ExperimentConfig(ramps=(1e3,), R_list=(0.92, 0.94, 0.96), r0=0.75)
        with pytest.raises(ValueError, match="2 ramps"):
            run_uniqueness_experiment(cfg)

    def test_needs_three_R(self):
        cfg = ExperimentConfig(ramps=(1e2, 1e3), R_list=(0.92, 0.95), r0=0.75)
        with pytest.raises(ValueError, match="3 R values"):
            run_uniqueness_experiment(cfg)

    def test_csv_outputs(self, tmp_path):
        cfg = small_uniqueness_config()
        run_uniqueness_experiment(cfg, out_dir=tmp_path, gauge=False)
        rows = read_rows_csv(tmp_path / "uniqueness.csv")
        assert len(rows) == 12
        assert {"R", "sup_diff", "area_diff", "envelope", "cert_pass"} <= set(rows[0])


class TestGauge:
    def test_matched_depths_make_ramps_indistinguishable(self):
        g = matched_truncation_gauge(n=201, ratio=1.03)
        assert g["passed"]
        assert 0.0 < g["pair_diff"] <= g["threshold"]
        # depths follow k = 2A H(depth)
        assert g["depth_lo"] == pytest.approx(math.asinh(math.sqrt(2e-3)))
        assert g["depth_hi"] == pytest.approx(math.asinh(math.sqrt(2e-4)))

    def test_shared_window_would_fail_by_far(self):
        # on one shared window the two ramps converge to different truncated
        # flows; the matched-depth gap must sit far below that plateau
        g = matched_truncation_gauge(n=201, ratio=1.03)
        assert g["pair_diff"] < 0.1


class TestBoundaryLayer:
    def test_exponent_near_square_root(self, layer):
        assert 0.35 <= layer.exponent <= 0.65

    def test_width_monotone(self, layer):
        assert layer.width_monotone

    def test_rows_cover_window(self, layer):
        assert len(layer.rows) == 9
        assert layer.rows[0]["t"] == pytest.approx(1e-3)
        assert layer.rows[-1]["t"] == pytest.approx(1e-1)
        assert layer.rows[0]["width"] >= layer.grid_floor

    def test_csv(self, tmp_path):
        run_boundary_layer_experiment(out_dir=tmp_path)
        rows = read_rows_csv(tmp_path / "boundary_layer.csv")
        assert len(rows) == 9
