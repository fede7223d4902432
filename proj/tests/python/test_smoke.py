"""Smoke tests for the python bindings: core operations round-trip through
numpy, the closed forms stay consistent, and emitted records validate
against the shipped schema."""

import json
import math
import pathlib

import jsonschema
import numpy as np
import pytest

import limelens

REPO_ROOT = pathlib.Path(__file__).resolve().parents[2]


def fig5_setup(seed=46, samples=2000):
    a = np.zeros(10)
    a[0] = 10.0
    a[1] = -10.0
    model = limelens.LinearModel(a, 0.0)
    rng = np.random.default_rng(seed)
    config = limelens.SamplingConfig(
        xi=rng.normal(size=10),
        mu=np.zeros(10),
        sigma=1.0,
        nu=1.0,
        bins=4,
        samples=samples,
        seed=seed,
    )
    grid = limelens.theoretical_grid(np.zeros(10), 1.0, 4)
    return model, config, grid


def test_linear_model_eval():
    model = limelens.LinearModel(np.array([10.0, -10.0]), 0.0)
    assert model(np.array([1.0, 1.0])) == 0.0
    assert model(np.array([1.0, 0.0])) == 10.0
    with pytest.raises(limelens.UsageError):
        model(np.array([1.0, 0.0, 0.0]))


def test_explain_matches_theory_roughly():
    model, config, grid = fig5_setup(samples=20000)
    explanation = limelens.explain(model, config, grid)
    beta = limelens.beta_closed_form(model, config, grid)
    assert explanation.beta_hat.shape == (11,)
    assert np.max(np.abs(explanation.beta_hat - beta)) < 1.5
    assert explanation.prediction_at_xi == pytest.approx(np.sum(explanation.beta_hat))


def test_theory_consistency_triangle():
    model, config, grid = fig5_setup()
    report = limelens.theory_report(model, config, grid)
    recomposed = report.sigma_inverse @ report.gamma
    assert np.max(np.abs(report.beta - recomposed)) <= 1e-10
    assert report.beta.sum() == pytest.approx(report.local_error_center, abs=1e-10)
    identity = report.sigma_matrix @ report.sigma_inverse
    assert np.max(np.abs(identity - np.eye(11))) <= 1e-10


def test_perturb_arrays_and_determinism():
    _, config, grid = fig5_setup(samples=500)
    first = limelens.perturb(config, grid)
    second = limelens.perturb(config, grid)
    assert first.samples.shape == (500, 10)
    assert np.array_equal(first.samples, second.samples)
    assert np.array_equal(first.bins, second.bins)
    assert first.weights.min() > 0.0
    assert first.weights.max() <= 1.0
    assert set(np.unique(first.features)) <= {0, 1}


def test_gauss_closed_against_quadrature():
    value = limelens.gauss_closed(xi=0.3, mu=-0.1, nu=1.2, sigma=0.9, lo=-0.5, hi=1.5)
    oracle = limelens.gauss_quadrature(
        xi=0.3, mu=-0.1, nu=1.2, sigma=0.9, lo=-0.5, hi=1.5, tol=1e-11
    )
    assert value == pytest.approx(oracle, abs=1e-8)
    full = limelens.gauss_closed(xi=0.0, mu=0.0, nu=1.0, sigma=1.0)
    assert full == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)


def test_v_crit_and_switch_off_bandwidth():
    _, config, grid = fig5_setup()
    for j in range(10):
        crit = limelens.v_crit(j, config, grid)
        assert crit is None or crit > 0.0


def test_record_json_validates_against_schema(tmp_path):
    record = limelens.run_fig5(46)
    doc = json.loads(record.to_json())
    schema = json.loads((REPO_ROOT / "schemas" / "record.schema.json").read_text())
    jsonschema.validate(doc, schema)
    assert doc["experiment_id"] == "fig5"
    assert "wall_time" not in json.dumps(doc)

    limelens.write_record_files(record, tmp_path, True)
    on_disk = json.loads((tmp_path / "fig5" / "record.json").read_text())
    jsonschema.validate(on_disk, schema)
    assert on_disk == doc
    assert (tmp_path / "fig5" / "record.csv").exists()
    assert (tmp_path / "fig5" / "plot.svg").read_text().startswith("<svg")


def test_dataset_roundtrip(tmp_path):
    rows = np.arange(12.0).reshape(4, 3)
    targets = np.array([1.0, 2.0, 3.0, 4.0])
    data = limelens.Dataset(rows, targets)
    path = tmp_path / "table.csv"
    limelens.save_dataset(data, path)
    back = limelens.load_dataset(path, True, "target")
    assert np.array_equal(back.rows, rows)
    assert np.array_equal(back.targets, targets)


def test_cli_entry_point(capfd):
    code = limelens.cli_main(
        ["theory", "--xi", "0.3,0.5", "--mu", "0,0", "--sigma", "1", "--nu", "1", "--bins", "4"]
    )
    assert code == 0
    out, _ = capfd.readouterr()
    doc = json.loads(out)
    assert "alpha" in doc
    assert limelens.cli_main(["not-a-command"]) == 1
