import csv
import json
from pathlib import Path

import pytest

from gblab import __version__
from gblab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from gblab.config import ConfigError, RunConfig, load_config, parse_complex

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(argv, tmp_path):
    out = tmp_path / "report.json"
    code = main([*argv, "--out", str(out), "--quiet"])
    return code, json.loads(out.read_text()) if out.exists() else None


def test_verify_algebra_default(tmp_path):
    code, report = run(["verify-algebra", "--config", str(CONFIGS / "default.json")], tmp_path)
    assert code == EXIT_OK
    assert report["pass"] and report["version"] == __version__
    names = [c["name"] for c in report["checks"]]
    assert len(names) == len(set(names))
    assert "[K+,K-]=-2K3@k0" in names and "scalar photon norm=-1" in names
    assert report["info"]["casimir_factor"] == pytest.approx(2.0)
    assert sum(c["wall_time"] for c in report["checks"]) < 5
    for key in ("name", "value", "tolerance", "comparison", "pass", "wall_time"):
        assert key in report["checks"][0]
    assert report["tolerances"]["exact"] == 1e-12


def test_vacuum_only_safe_subspace_warns(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 2, "margin": 2})
    code, report = run(["verify-algebra", "--config", cfg], tmp_path)
    assert code == EXIT_OK
    assert any("vacuum only" in w for w in report["warnings"])


def test_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"momenta": [[0,0,1]],\n "n_max": 4,}')
    assert main(["verify-algebra", "--config", str(path)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "line 2" in err and "malformed JSON" in err


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"momenta": [[0, 0, 1]], "alpha": [0.1, 0.2]}, "alpha: length"),
        ({"momenta": [[0, 0, 0]]}, "zero momentum"),
        ({"momenta": [[0, 0, 1]], "colour": 1}, "unknown keys"),
        ({"momenta": [[0, 0, 1]], "polarizations": [1, 2]}, "scalar (0) and longitudinal (3)"),
        ({"momenta": [[0, 0, 1]], "alpha": ["x"]}, "complex"),
        ({"n_max": 3}, "momenta"),
    ],
)
def test_config_validation(tmp_path, capsys, data, fragment):
    assert main(["gb-check", "--config", write(tmp_path, data)]) == EXIT_USAGE
    assert fragment in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["gb-check", "--config", str(tmp_path / "nope.json")]) == EXIT_USAGE


def test_parse_complex_forms():
    assert parse_complex(0.5, "a") == 0.5
    assert parse_complex([0.1, 0.2], "a") == 0.1 + 0.2j
    assert parse_complex({"im": 0.3}, "a") == 0.3j
    assert parse_complex("0.1+0.2i", "a") == 0.1 + 0.2j
    with pytest.raises(ConfigError):
        parse_complex(True, "a")


def test_config_round_trip():
    cfg = load_config(CONFIGS / "two_momenta.json")
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_json())))
    assert again.to_json() == cfg.to_json()
    assert cfg.weights == [1.0, 0.5]
    assert cfg.alpha == [0.3, 0.5j]


def test_gb_check_small(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 16, "alpha": [0.5], "transverse": [[1, 2]]})
    code, report = run(["gb-check", "--config", cfg, "--tolerance", "translation.L@k0=1e-4",
                        "--tolerance", "translation.Ldag@k0=1e-4", "--tolerance", "shift=1e-4"], tmp_path)
    names = {c["name"]: c for c in report["checks"]}
    assert names["series.gb_residual"]["value"] < 1e-10
    assert names["physical.H-transverse"]["value"] < 1e-8
    assert names["translation.L@k0"]["tolerance"] == 1e-4
    assert names["translation.L@k0"]["tolerance_key"] == "translation.L@k0"
    assert any("'shift'" in w for w in report["warnings"])
    # n_max = 16 leaves shift identities above 1e-8, so the report fails honestly
    assert code == EXIT_FAIL
    failed = {c["name"] for c in report["checks"] if not c["pass"]}
    assert failed and all(n.startswith("shift.") for n in failed)


def test_guard_violation_is_a_failure(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 8, "alpha": [2.0]})
    code, report = run(["gb-check", "--config", cfg], tmp_path)
    assert code == EXIT_FAIL
    assert report["checks"][0]["name"] == "truncation_guard"
    assert "exceeds" in report["checks"][0]["message"]


def test_alpha_zero_degenerate_pass(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 8})
    code, report = run(["gb-check", "--config", cfg], tmp_path)
    assert code == EXIT_OK


def test_pair_only_basis_skips_physical_checks(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 24, "alpha": [0.3], "polarizations": [0, 3]})
    code, report = run(["gb-check", "--config", cfg], tmp_path)
    assert code == EXIT_OK
    assert any("skipped" in w for w in report["warnings"])


def test_expectation_writes_csv(tmp_path):
    csv_path = tmp_path / "rows.csv"
    code = main(["expectation", "--config", str(CONFIGS / "expectation.json"), "--csv", str(csv_path), "--quiet"])
    assert code == EXIT_OK
    with csv_path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["t", "x", "y", "z", "mu", "A", "A_T", "dLambda", "deviation"]
    assert len(rows) == 625 * 4
    assert max(float(r["deviation"]) for r in rows) < 1e-8


def test_expectation_alpha_zero(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 4, "grid": {"points": 3}})
    csv_path = tmp_path / "rows.csv"
    assert main(["expectation", "--config", cfg, "--csv", str(csv_path), "--quiet"]) == EXIT_OK
    with csv_path.open() as fh:
        assert all(float(r["deviation"]) == 0.0 for r in csv.DictReader(fh))


def test_flip_signature_fails(tmp_path):
    code, report = run(["expectation", "--config", str(CONFIGS / "expectation.json"), "--flip-signature"], tmp_path)
    assert code == EXIT_FAIL
    split = next(c for c in report["checks"] if c["name"] == "gauge_split.max_deviation")
    assert split["value"] > 1e-3 and not split["pass"]
    assert report["info"]["metric"] == "flipped"


def test_sweep_alpha(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 16, "alpha": [0.5], "polarizations": [0, 3]})
    csv_path = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", cfg, "--param", "alpha", "--values", "0", "0.1",
                 "--csv", str(csv_path), "--quiet"])
    assert code == EXIT_OK
    with csv_path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["alpha"]) for r in rows] == [0.0, 0.1]
    assert "series.gb_residual" in rows[0]


def test_sweep_n_max_warns_only_on_increase(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "alpha": [0.5], "polarizations": [0, 3],
                           "sweep": {"parameter": "n_max", "values": [8, 12]}})
    code, report = run(["sweep", "--config", cfg, "--jobs", "2"], tmp_path)
    # both cutoffs are too small for 1e-8: failures, but residuals decrease
    assert code == EXIT_FAIL
    assert not any("does not decrease" in w for w in report["warnings"])
    assert report["info"]["values"] == [8, 12]


def test_sweep_errors(tmp_path, capsys):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 8})
    assert main(["sweep", "--config", cfg, "--param", "n_max", "--values"]) == EXIT_USAGE
    assert "empty value list" in capsys.readouterr().err
    assert main(["sweep", "--config", cfg]) == EXIT_USAGE
    assert "unknown parameter" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["sweep", "--config", cfg, "--param", "omega", "--values", "1"])


def test_eval_commutator_summary(tmp_path, capsys):
    code, report = run(["eval", "--config", str(CONFIGS / "default.json"), "[a[0,0], a[0,0]^dag]"], tmp_path)
    assert code == EXIT_OK
    assert report["info"]["summary"] == "-I on safe subspace"


def test_eval_physical_expectation(tmp_path):
    cfg = write(tmp_path, {"momenta": [[0, 0, 1]], "n_max": 6, "alpha": [0.5], "transverse": [[2, 0]]})
    code, report = run(["eval", "--config", cfg, "a[0,1]^dag*a[0,1]", "--state", "physical"], tmp_path)
    assert code == EXIT_OK
    assert report["info"]["expectation"]["re"] == pytest.approx(2.0)


def test_eval_errors(tmp_path, capsys):
    cfg = str(CONFIGS / "default.json")
    assert main(["eval", "--config", cfg, "a[0,5]"]) == EXIT_USAGE
    assert "polarization 5" in capsys.readouterr().err
    assert main(["eval", "--config", cfg, "a[0,1] + * a[0,2]"]) == EXIT_USAGE
    assert "position 9" in capsys.readouterr().err


def test_bad_tolerance_flag(tmp_path):
    with pytest.raises(SystemExit):
        main(["gb-check", "--config", str(CONFIGS / "default.json"), "--tolerance", "exact"])
    with pytest.raises(SystemExit):
        main(["gb-check", "--config", str(CONFIGS / "default.json"), "--tolerance", "exact=-1"])


def test_reports_are_deterministic(tmp_path):
    argv = ["verify-algebra", "--config", str(CONFIGS / "default.json")]
    _, a = run(argv, tmp_path)
    _, b = run(argv, tmp_path)
    strip = lambda r: [{k: v for k, v in c.items() if k != "wall_time"} for c in r["checks"]]
    assert strip(a) == strip(b)
