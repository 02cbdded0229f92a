"""
Test the command-line front end
"""
import json
import os

import pytest

import cli
from config import DATA_DIR
from services.errors import EngineError

EKMAN = os.path.join(DATA_DIR, "ekman.dist")


@pytest.fixture
def small_file(tmp_path):
    path = tmp_path / "small.dist"
    path.write_text("1\n3 1\n2 3 1\n")
    return str(path)


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def test_fit_writes_result(tmp_path, small_file):
    out = tmp_path / "fit.json"
    assert cli.main(["fit", "--delta", small_file, "--out", str(out)]) == cli.EXIT_OK

    result = read_json(out)
    for field in ("delta", "dhat", "confdist", "conf", "weightmat", "stress", "ndim",
                  "init", "niter", "nobj", "iind", "jind", "weighted", "ordinal"):
        assert field in result
    assert result["nobj"] == 4


def test_fit_to_stdout(capsys, small_file):
    assert cli.main(["fit", "--delta", small_file, "--ordinal", "--ties", "2"]) == cli.EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["ordinal"] and result["ties"] == 2


def test_fit_verbose(capsys, small_file, tmp_path):
    cli.main(["fit", "--delta", small_file, "--verbose", "--itmax", "2", "--out", str(tmp_path / "r.json")])
    assert capsys.readouterr().out.startswith("itel    1 stress ")


def test_bad_flags(small_file):
    """Flag errors exit with 2"""
    assert cli.main(["fit", "--delta", small_file, "--ties", "2"]) == cli.EXIT_BAD_FLAGS
    assert cli.main(["fit", "--delta", small_file, "--ties", "4", "--ordinal"]) == cli.EXIT_BAD_FLAGS
    assert cli.main(["fit", "--delta", small_file, "--itmax", "0"]) == cli.EXIT_BAD_FLAGS
    assert cli.main(["fit", "--delta", small_file, "--init-method", "random", "--init-file", "x.json"]) == cli.EXIT_BAD_FLAGS
    assert cli.main(["fit", "--delta", small_file, "--weights", small_file, "--weight-power", "2"]) == cli.EXIT_BAD_FLAGS
    assert cli.main(["--log-level", "chatty", "fit", "--delta", small_file]) == cli.EXIT_BAD_FLAGS
    assert cli.main(["frobnicate"]) == cli.EXIT_BAD_FLAGS


def test_missing_file_is_data_error(tmp_path):
    out = tmp_path / "never.json"
    assert cli.main(["fit", "--delta", str(tmp_path / "nope.dist"), "--out", str(out)]) == cli.EXIT_DATA_ERROR
    assert not out.exists()


def test_undecodable_file_is_data_error(tmp_path, small_file):
    """Bytes that are not UTF-8 are a data error for fit and validate"""
    binary = tmp_path / "binary.dist"
    binary.write_bytes(b"1\n3 \xff\n")
    assert cli.main(["fit", "--delta", str(binary)]) == cli.EXIT_DATA_ERROR
    assert cli.main(["validate", "--delta", str(binary)]) == cli.EXIT_DATA_ERROR
    assert cli.main(["fit", "--delta", small_file, "--weights", str(binary)]) == cli.EXIT_DATA_ERROR


def test_bad_init_file_is_data_error(tmp_path, small_file):
    no_conf = tmp_path / "no_conf.json"
    no_conf.write_text('{"stress": 1}')
    assert cli.main(["fit", "--delta", small_file, "--init-file", str(no_conf)]) == cli.EXIT_DATA_ERROR

    not_json = tmp_path / "not_json.json"
    not_json.write_text("conf = [[0, 1]]")
    assert cli.main(["fit", "--delta", small_file, "--init-file", str(not_json)]) == cli.EXIT_DATA_ERROR

    a_list = tmp_path / "list.json"
    a_list.write_text("[1, 2]")
    assert cli.main(["plot", "--result", str(a_list), "--plots", str(tmp_path / "p")]) == cli.EXIT_DATA_ERROR


def test_engine_error_exit_code(mocker, small_file):
    mocker.patch("cli.SmacofEngine.run", side_effect=EngineError("stress became non-finite"))
    assert cli.main(["fit", "--delta", small_file]) == cli.EXIT_ENGINE_ERROR


def test_ndim_too_large_is_data_error(small_file):
    assert cli.main(["fit", "--delta", small_file, "--ndim", "4"]) == cli.EXIT_DATA_ERROR


def test_init_then_fit_matches_default(tmp_path):
    """A stored Torgerson start reproduces the default trajectory"""
    start = tmp_path / "start.json"
    assert cli.main(["init", "--delta", EKMAN, "--method", "torgerson", "--out", str(start)]) == cli.EXIT_OK
    assert read_json(start)["method"] == "torgerson"

    default, stored = tmp_path / "default.json", tmp_path / "stored.json"
    assert cli.main(["fit", "--delta", EKMAN, "--out", str(default)]) == cli.EXIT_OK
    assert cli.main(["fit", "--delta", EKMAN, "--init-file", str(start), "--out", str(stored)]) == cli.EXIT_OK
    a, b = read_json(default), read_json(stored)
    assert a["niter"] == b["niter"]
    assert a["stress"] == pytest.approx(b["stress"], abs=1e-12)


def test_init_methods(tmp_path, small_file):
    for method in ("torgerson", "guttman", "fulldim", "random"):
        out = tmp_path / f"{method}.json"
        assert cli.main(["init", "--delta", small_file, "--method", method, "--out", str(out)]) == cli.EXIT_OK
        assert read_json(out)["method"] == method


def test_fit_with_other_starts(tmp_path, small_file):
    for method in ("guttman", "fulldim", "random"):
        out = tmp_path / f"fit-{method}.json"
        assert cli.main(["fit", "--delta", small_file, "--init-method", method, "--out", str(out)]) == cli.EXIT_OK


def test_weighted_fit_with_power_weights(tmp_path):
    out = tmp_path / "weighted.json"
    code = cli.main(["fit", "--delta", EKMAN, "--weight-power", "2", "--weighted", "--ordinal", "--out", str(out)])
    assert code == cli.EXIT_OK
    result = read_json(out)
    assert result["weighted"]
    assert max(result["weightmat"]) <= 1.0


def test_fit_and_plot(tmp_path):
    stem = tmp_path / "ekman"
    out = tmp_path / "ekman.json"
    assert cli.main(["fit", "--delta", EKMAN, "--out", str(out), "--plots", str(stem)]) == cli.EXIT_OK
    for suffix in ("shepard", "conf", "distdhat"):
        assert (tmp_path / f"ekman-{suffix}.svg").exists()

    labels = tmp_path / "labels.txt"
    labels.write_text("\n".join(f"c{k}" for k in range(14)) + "\n")
    replot = tmp_path / "replot"
    args = ["plot", "--result", str(out), "--plots", str(replot), "--labels", str(labels), "--no-fitlines"]
    assert cli.main(args) == cli.EXIT_OK
    assert "c13" in (tmp_path / "replot-conf.svg").read_text()


def test_plot_errors(tmp_path):
    out = tmp_path / "ekman.json"
    cli.main(["fit", "--delta", EKMAN, "--out", str(out)])
    assert cli.main(["plot", "--result", str(out), "--plots", str(tmp_path / "p"), "--colline", "mauve"]) == cli.EXIT_ENGINE_ERROR

    bogus = tmp_path / "bogus.json"
    bogus.write_text('{"stress": 1}')
    assert cli.main(["plot", "--result", str(bogus), "--plots", str(tmp_path / "q")]) == cli.EXIT_DATA_ERROR


def test_determinism(tmp_path):
    """Two identical runs give byte-identical JSON and SVG files"""
    for name in ("a", "b"):
        args = ["fit", "--delta", EKMAN, "--ordinal", "--out", str(tmp_path / f"{name}.json"), "--plots", str(tmp_path / name)]
        assert cli.main(args) == cli.EXIT_OK
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    for suffix in ("shepard", "conf", "distdhat"):
        assert (tmp_path / f"a-{suffix}.svg").read_bytes() == (tmp_path / f"b-{suffix}.svg").read_bytes()


def test_bench(tmp_path, small_file):
    out = tmp_path / "bench.json"
    assert cli.main(["bench", "--delta", small_file, "--repetitions", "3", "--ordinal", "--out", str(out)]) == cli.EXIT_OK
    report = read_json(out)
    assert report["repetitions"] == 3
    assert set(report["phases"]) == {"setup", "xphase", "dphase"}
    assert report["min_seconds"] <= report["median_seconds"] <= report["max_seconds"]

    assert cli.main(["bench", "--delta", small_file, "--repetitions", "0"]) == cli.EXIT_BAD_FLAGS


def test_validate(tmp_path, small_file, capsys):
    assert cli.main(["validate", "--delta", small_file]) == cli.EXIT_OK

    assert cli.main(["validate", "--delta", small_file, "--print"]) == cli.EXIT_OK
    assert "$blocks" in capsys.readouterr().out

    ragged = tmp_path / "ragged.dist"
    ragged.write_text("1\n3\n")
    assert cli.main(["validate", "--delta", str(ragged)]) == cli.EXIT_DATA_ERROR

    empty = tmp_path / "empty.dist"
    empty.write_text("NA\nNA NA\n")
    assert cli.main(["validate", "--delta", str(empty)]) == cli.EXIT_VIOLATIONS
    assert "no observations" in capsys.readouterr().out


def test_validate_structure(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"iind": [2, 3], "jind": [1, 1], "delta": [1.0, 2.0], "blocks": [1, 1],
                                "weights": [1.0, 1.0], "nobj": 3, "ndat": 2}))
    assert cli.main(["validate", "--mds-data", str(good)]) == cli.EXIT_OK

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"iind": [2, 3], "jind": [1, 1], "delta": [2.0, 1.0], "blocks": [1, 1],
                               "weights": [1.0, 1.0], "nobj": 3, "ndat": 2}))
    assert cli.main(["validate", "--mds-data", str(bad)]) == cli.EXIT_VIOLATIONS
    assert "violation: delta not sorted" in capsys.readouterr().out


def test_json_log_file(tmp_path):
    log_dir = tmp_path / "logs"
    cli.setup_logging("WARNING", str(log_dir))
    cli.logger.info("hello from the test")
    (log_file,) = list(log_dir.iterdir())
    line = log_file.read_text().strip().splitlines()[-1]
    assert json.loads(line)["message"] == "hello from the test"


if __name__ == "__main__":
    print("Testing CLI...")
    print("Run with: python -m pytest tests/test_cli.py")
