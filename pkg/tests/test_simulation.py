"""Tests for the simulation driver, its configuration file and the report writers."""
import io
import json
import sys
from pathlib import Path

import pandas as pd
import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from src import config
from src.core.bootstrap import CIMethod, Statistic
from src.core.errors import DataFileError, ParameterError
from src.core.model_gen import OracleMethod
from src.sim.report import render_simulation, simulation_frame, simulation_table
from src.sim.simulation import SimulationConfig, load_config_file, run_simulation


def _small_config(**overrides):
    settings = dict(rho_grid=[0.0, 0.5], n_grid=[10], replications=2, bootstrap_size=2,
                    alphas=[0.05], master_seed=7, workers=1)
    settings.update(overrides)
    return SimulationConfig(**settings)


def test_smoke_run():
    result = run_simulation(_small_config())
    assert len(result.cells) == 2
    cell = result.cell(0.5, 10)
    assert cell.true_xi == pytest.approx(result.oracle[0.5])
    assert cell.target == config.VARIANCE_TARGETS[0.5]
    for (method, alpha), estimate in cell.coverage.items():
        assert method in (CIMethod.HB1, CIMethod.HB2, CIMethod.ORACLE_VAR)
        assert alpha == 0.05
        assert estimate.value in (0.0, 0.5, 1.0)
    assert cell.rmse_b1.value >= 0 and cell.rmse_b2.value >= 0
    print(f"✓ Smoke run finished with {len(result.cells)} cells")


def test_results_do_not_depend_on_workers():
    serial = run_simulation(_small_config(replications=4, bootstrap_size=5))
    parallel = run_simulation(_small_config(replications=4, bootstrap_size=5, workers=2))
    assert serial.cells == parallel.cells
    assert render_simulation(serial, "csv") == render_simulation(parallel, "csv")


def test_seed_changes_results():
    first = run_simulation(_small_config(rho_grid=[0.0], bootstrap_size=5))
    second = run_simulation(_small_config(rho_grid=[0.0], bootstrap_size=5, master_seed=8))
    assert first.cells[0].mean_xi != second.cells[0].mean_xi


def test_invalid_configs_name_the_field():
    bad = [
        (dict(rho_grid=[1.0]), "rho"),
        (dict(n_grid=[1]), "n_grid"),
        (dict(replications=1), "replications"),
        (dict(bootstrap_size=1), "bootstrap_size"),
        (dict(alphas=[0.0]), "alphas"),
        (dict(workers=0), "workers"),
        (dict(rho_grid=[0.2]), "variance_targets"),
    ]
    for overrides, field_name in bad:
        with pytest.raises(ParameterError) as excinfo:
            _small_config(**overrides).validate()
        assert excinfo.value.field == field_name


def test_full_scale_defaults():
    cfg = SimulationConfig.full_scale(workers=3)
    assert cfg.n_grid == config.FULL_SCALE_N_GRID
    assert cfg.replications == config.FULL_SCALE_REPLICATIONS
    assert cfg.workers == 3
    cfg.validate()


def test_config_file(tmp_path):
    path = tmp_path / "study.conf"
    path.write_text(
        "# desk run\n"
        "rho_grid = 0.0, 0.5\n"
        "n_grid = 200\n"
        "replications = 20  # R\n"
        "variance_targets = 0.0:0.4, 0.5:0.51\n"
        "statistic = hat\n"
        "oracle_method = monte_carlo\n",
        encoding="utf-8",
    )
    cfg = load_config_file(path, _small_config())
    assert cfg.rho_grid == [0.0, 0.5]
    assert cfg.n_grid == [200]
    assert cfg.replications == 20
    assert cfg.bootstrap_size == 2, "keys absent from the file keep the base value"
    assert cfg.variance_targets == {0.0: 0.4, 0.5: 0.51}
    assert cfg.statistic is Statistic.HAT
    assert cfg.oracle_method is OracleMethod.MONTE_CARLO


def test_config_file_errors(tmp_path):
    path = tmp_path / "bad.conf"
    for text in ("colour = blue\n", "replications = many\n", "just words\n"):
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ParameterError):
            load_config_file(path)
    with pytest.raises(DataFileError):
        load_config_file(tmp_path / "missing.conf")


def test_report_formats():
    result = run_simulation(_small_config(rho_grid=[0.0]))
    frame = simulation_frame(result)
    assert list(frame.columns) == config.CSV_COLUMNS
    assert set(frame["method"]) >= {"oracle", "xi_n", "V-B1", "V-B2", "HB1", "HB2", "OracleVar"}

    table = simulation_table(result)
    assert "V-B2 rmse" in table.columns
    assert "HB2 coverage 0.05" in table.columns

    payload = json.loads(render_simulation(result, "json"))
    assert payload["schema_version"] == config.SCHEMA_VERSION
    assert payload["cells"][0]["rho"] == 0.0

    text = render_simulation(result, "text")
    assert config.INCONSISTENCY_WARNING in text

    csv_text = render_simulation(result, "csv")
    parsed = pd.read_csv(io.StringIO(csv_text))
    assert len(parsed) == len(frame)
