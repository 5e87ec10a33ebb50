import math

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from spinsense import sweep
from spinsense.errors import InsufficientDataError, ValidationError
from spinsense.fitting import fit_power_law, forced_slope_prefactor


def cat_spec(**overrides):
    base = dict(
        state={"kind": "cat", "z": [1.0, 0.0]},
        noise={"kind": "gaussian_nonmarkovian", "gamma": 1.0},
        n_grid=[100, 300, 1000, 3000, 10000],
        schedule={"s1": 0.5, "alpha": 0.1},
        T=1000.0,
    )
    base.update(overrides)
    return sweep.SweepSpec(**base)


class TestSweepSpec:
    def test_valid_config(self):
        spec = cat_spec()
        assert spec.state.kind == "cat"

    def test_unknown_key_rejected(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(bogus=1)

    def test_nested_unknown_key_rejected(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(state={"kind": "cat", "z": [1, 0], "mystery": 2})

    def test_grid_must_increase(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(n_grid=[100, 100, 1000, 10000])

    def test_grid_needs_three_points(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(n_grid=[100, 10000])

    def test_grid_needs_two_decades(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(n_grid=[100, 200, 400])

    def test_schedule_exclusive(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(schedule={"s1": 0.5, "alpha": 0.1, "optimize_t": True})

    def test_optimize_t_needs_gamma(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(
                schedule={"optimize_t": True},
                noise={"kind": "gaussian_nonmarkovian", "gamma": 0.0},
            )

    def test_chi_required_for_twisting(self):
        with pytest.raises(PydanticValidationError):
            cat_spec(state={"kind": "oat", "z": [1.0, 0.0]})

    def test_log_grid_helper(self):
        grid = sweep.log_grid(100, 10000)
        assert grid[0] == 100 and grid[-1] == 10000
        assert all(b > a for a, b in zip(grid, grid[1:]))
        assert len(grid) >= 20  # ten points per decade over two decades


class TestRunSweep:
    def test_rows_sorted_and_ok(self):
        rows = sweep.run_sweep(cat_spec(), jobs=2)
        assert [row.n_qubits for row in rows] == sorted(row.n_qubits for row in rows)
        assert all(row.status == "ok" for row in rows)
        assert all(np.isfinite(row.delta_omega) for row in rows)

    def test_deterministic_across_jobs(self):
        rows1 = sweep.run_sweep(cat_spec(), jobs=1)
        rows4 = sweep.run_sweep(cat_spec(), jobs=4)
        assert sweep.rows_to_csv(rows1) == sweep.rows_to_csv(rows4)

    def test_failure_isolation_ghz(self):
        spec = cat_spec(state={"kind": "ghz"})
        rows = sweep.run_sweep(spec, jobs=2)
        assert len(rows) == 5
        assert all("NoMeanSpinError" in row.status for row in rows)

    def test_oat_with_fixed_chi(self):
        spec = cat_spec(
            state={"kind": "oat", "z": [1.0, 0.0], "chi": 0.05},
            n_grid=[10, 30, 100, 300, 1000],
            schedule={"s1": 1 / 3, "alpha": 1.0},
            T=100.0,
        )
        rows = sweep.run_sweep(spec, jobs=2)
        assert all(row.status == "ok" for row in rows)
        assert all(row.chi == 0.05 for row in rows)
        assert all(np.isfinite(row.xi2) for row in rows)

    def test_cat_fit_slope(self):
        rows = sweep.run_sweep(cat_spec(), jobs=2)
        fit = sweep.fit_exponent(rows, "N", "delta_omega")
        assert abs(fit.slope + 0.75) <= 0.03


class TestFitExponent:
    def test_exact_power_law(self):
        x = np.geomspace(1, 1e4, 9)
        fit = fit_power_law(x, 3.7 * x**-0.75)
        assert abs(fit.slope + 0.75) <= 1e-12
        assert fit.max_abs_residual <= 1e-12

    def test_half_power(self):
        x = np.geomspace(10, 1e5, 7)
        fit = fit_power_law(x, 0.2 * x**-0.5)
        assert abs(fit.slope + 0.5) <= 1e-12

    def test_insufficient_points(self):
        with pytest.raises(InsufficientDataError):
            fit_power_law([1, 10], [1, 0.1])

    def test_nonpositive_rejected(self):
        with pytest.raises(ValidationError):
            fit_power_law([1, 10, 100], [1.0, -0.1, 0.01])

    def test_forced_slope_prefactor(self):
        x = np.geomspace(1, 1e4, 9)
        assert np.isclose(forced_slope_prefactor(x, 3.7 * x**-0.75, -0.75), 3.7)

    def test_cat_band_slopes(self):
        # shrinking |z| ~ N^k degrades the cat exponent from -3/4 toward the
        # SQL: delta ~ ((1+|z|^2)/|z|^2) N^(-3/4) gives slope -3/4 - 2k
        from spinsense.dephasing import DephasingModel
        from spinsense.metrology import cat_exposure_time, cat_uncertainty

        gamma, s, total = 1.0, 0.1, 1000.0
        grid = np.unique(np.geomspace(1e3, 1e6, 13).astype(int))
        model = DephasingModel.gaussian(gamma)
        for k in (0.0, -1 / 16, -1 / 8):
            deltas = [
                cat_uncertainty(
                    float(n) ** k, n, cat_exposure_time(n, gamma, s), total, model
                ).delta_omega
                for n in grid
            ]
            fit = fit_power_law(grid, deltas)
            expected = -0.75 - 2 * k
            # finite-N transient of the (1+|z|^2)/|z|^2 prefactor allowed
            assert abs(fit.slope - expected) <= 0.05
            assert -0.7501 <= fit.slope <= -0.4999


class TestCsvEmission:
    def test_header_exact(self, tmp_path):
        rows = sweep.run_sweep(cat_spec(), jobs=1)
        path = tmp_path / "out.csv"
        sweep.emit_csv(rows, str(path))
        first = path.read_text().splitlines()[0]
        assert first == "state,noise,N,t,gamma,omega,chi,z_re,z_im,delta_omega,xi2,var_r,mean_m,status"

    def test_empty_rows_rejected_no_file(self, tmp_path):
        path = tmp_path / "nope.csv"
        with pytest.raises(ValidationError):
            sweep.emit_csv([], str(path))
        assert not path.exists()

    def test_roundtrip_bit_exact(self, tmp_path):
        rows = sweep.run_sweep(cat_spec(), jobs=1)
        path = tmp_path / "out.csv"
        sweep.emit_csv(rows, str(path))
        back = sweep.parse_csv(str(path))
        for a, b in zip(rows, back):
            assert a.n_qubits == b.n_qubits
            assert a.delta_omega == b.delta_omega  # 17 significant digits round-trip
            assert a.t == b.t and a.xi2 == b.xi2
        path2 = tmp_path / "again.csv"
        sweep.emit_csv(back, str(path2))
        assert path.read_bytes() == path2.read_bytes()

    def test_fit_pipeline_closed(self, tmp_path):
        rows = sweep.run_sweep(cat_spec(), jobs=1)
        in_memory = sweep.fit_exponent(rows, "N", "delta_omega")
        path = tmp_path / "out.csv"
        sweep.emit_csv(rows, str(path))
        from_disk = sweep.fit_exponent(sweep.parse_csv(str(path)), "N", "delta_omega")
        assert in_memory == from_disk

    def test_nan_fields_roundtrip(self, tmp_path):
        rows = sweep.run_sweep(cat_spec(state={"kind": "ghz"}), jobs=1)
        path = tmp_path / "ghz.csv"
        sweep.emit_csv(rows, str(path))
        back = sweep.parse_csv(str(path))
        assert all(math.isnan(row.delta_omega) for row in back)


class TestPlot:
    def test_svg_written(self, tmp_path):
        rows = sweep.run_sweep(cat_spec(), jobs=1)
        path = tmp_path / "plot.svg"
        sweep.emit_plot(rows, str(path))
        text = path.read_text()
        assert "<svg" in text and "</svg>" in text

    def test_empty_rows_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            sweep.emit_plot([], str(tmp_path / "x.svg"))
