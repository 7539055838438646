import json
import subprocess
import sys

import pytest

from popre.cli import main

COMMANDS = ["channel", "sample", "estimate", "recover", "eta", "verify", "sweep"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eta_noiseless(capsys):
    code, out, _ = run(capsys, "eta", "--model", "bitflip", "--nu", "1.0", "--n", "4", "--eps", "0.1")
    assert code == 0
    assert json.loads(out)["eta"] == pytest.approx(0.4)


def test_channel_csv(capsys):
    code, out, _ = run(capsys, "channel", "--model", "erasure", "--nu", "0.5", "--n", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,model,nu"
    assert lines[2:] == ["1,0", "0.5,0.5"]


def test_missing_eps_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "estimate", "--samples", str(tmp_path / "s.txt"), "--target", "01")
    assert code == 1
    assert "--eps" in err and "usage" in err


@pytest.mark.parametrize("command", COMMANDS)
def test_help_exits_zero(capsys, command):
    code, out, _ = run(capsys, command, "--help")
    assert code == 0 and "--seed" in out


def test_unknown_command_and_bad_choice(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "eta", "--model", "gauss", "--nu", "0.5", "--n", "2", "--eps", "0.1")[0] == 1
    assert run(capsys, "eta", "--model", "bitflip", "--nu", "1.5", "--n", "2", "--eps", "0.1")[0] == 1
    assert run(capsys, "eta", "--model", "bitflip", "--nu", "0.5", "--n", "0", "--eps", "0.1")[0] == 1


def write_dist(tmp_path, entries, n):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps({"n": n, "entries": [{"x": x, "p": p} for x, p in entries]}))
    return str(path)


def test_sample_estimate_pipeline(capsys, tmp_path):
    dist = write_dist(tmp_path, [("0000", 0.7), ("1111", 0.3)], 4)
    samples = str(tmp_path / "s.txt")
    args = ["sample", "--model", "bitflip", "--nu", "0.8", "--dist", dist, "--count", "60000",
            "--seed", "4", "--out", samples]
    assert run(capsys, *args)[0] == 0
    first = open(samples).read()
    assert first.splitlines()[0] == "# model=bitflip nu=0.8 n=4"
    assert run(capsys, *args)[0] == 0
    assert open(samples).read() == first  # deterministic given --seed
    code, out, _ = run(capsys, "estimate", "--samples", samples, "--target", "0000", "--eps", "0.1")
    assert code == 0
    rep = json.loads(out)
    assert abs(rep["estimate"] - 0.7) <= 0.2 and rep["target"] == "0000"


def test_malformed_sample_file(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# model=erasure nu=0.5 n=3\n01?\n0x1\n")
    code, _, err = run(capsys, "estimate", "--samples", str(path), "--target", "000", "--eps", "0.1")
    assert code == 1 and "line 3" in err
    path.write_text("# model=bitflip nu=0.5 n=3\n01?\n")
    code, _, err = run(capsys, "estimate", "--samples", str(path), "--target", "000", "--eps", "0.1")
    assert code == 1 and "line 2" in err


def test_recover_from_dist_and_round_trip(capsys, tmp_path):
    dist = write_dist(tmp_path, [("000", 0.5), ("111", 0.5)], 3)
    code, out, _ = run(capsys, "recover", "--model", "bitflip", "--nu", "1.0", "--dist", dist,
                       "--eps", "0.1", "--seed", "2")
    assert code == 0
    res = json.loads(out)
    assert {e["x"] for e in res["entries"]} == {"000", "111"}
    # a recovered result is itself a valid distribution file
    again = tmp_path / "again.json"
    again.write_text(json.dumps({"n": 3, "entries": res["entries"]}))
    assert run(capsys, "sample", "--model", "bitflip", "--nu", "0.9", "--dist", str(again),
               "--count", "5")[0] == 0


def test_recover_short_sample_file_is_computation_failure(capsys, tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("# model=bitflip nu=0.9 n=3\n" + "000\n" * 50)
    code, _, err = run(capsys, "recover", "--samples", str(path), "--eps", "0.2")
    assert code == 2 and "exhausted" in err


def test_recover_needs_one_source(capsys):
    assert run(capsys, "recover", "--eps", "0.2")[0] == 1


def test_verify_records(capsys):
    code, out, _ = run(capsys, "verify", "--model", "erasure", "--nu", "0.3", "--n", "8",
                       "--eps", "0.1", "--M", "25")
    assert code == 0
    records = json.loads(out)
    names = {r["name"] for r in records}
    assert {"sandwich_lower", "three_lines_lower_bound", "three_circle", "erdelyi_ratio"} <= names
    assert not any(r["violated"] for r in records)


def test_verify_violation_exit_code(capsys, monkeypatch):
    from popre import cli
    from popre.extremal import VerificationRecord

    monkeypatch.setattr(cli, "certificate_records", lambda *a, **k: [
        VerificationRecord.build("fake", 2.0, 2.0, 1.0, direction="le")])
    code, _, err = run(capsys, "verify", "--model", "bitflip", "--nu", "0.5", "--n", "4",
                       "--eps", "0.1")
    assert code == 3 and "fake" in err


def test_sweep_with_fit(capsys, tmp_path):
    fit_path = tmp_path / "fit.json"
    code, out, _ = run(capsys, "sweep", "--model", "bitflip", "--nu", "0.5", "--n", "16", "8", "12",
                       "--eps", "0.05", "--fit-out", str(fit_path), "--fit-response",
                       "loglog_inv_eta")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 4 and lines[1].split(",")[3] == "8"
    fit = json.loads(fit_path.read_text())
    assert 0.0 <= fit["r_squared"] <= 1.0


def test_sweep_fit_failure_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "sweep", "--model", "bitflip", "--nu", "0.5", "--n", "16",
                       "--eps", "0.05", "--fit-out", str(tmp_path / "f.json"))
    assert code == 2 and "fit failed" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "bitflip", "nu": 1.0, "n": [4], "eps": [0.1]}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == 0 and out.splitlines()[1].startswith("bitflip,1,0.10000000000000001,4,0.4")
    # the command line overrides config values
    cfg.write_text(json.dumps({"model": "bitflip", "nu": 0.5, "n": 4, "eps": 0.1}))
    code, out, _ = run(capsys, "eta", "--config", str(cfg), "--nu", "1.0")
    assert code == 0 and json.loads(out)["eta"] == pytest.approx(0.4)
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "eta", "--config", str(cfg))[0] == 1
    cfg.write_text("{not json")
    assert run(capsys, "eta", "--config", str(cfg))[0] == 1


def test_out_file(capsys, tmp_path):
    out = tmp_path / "a.csv"
    assert run(capsys, "channel", "--model", "bitflip", "--nu", "0.5", "--n", "2",
               "--out", str(out))[0] == 0
    assert out.read_text().startswith("n,model,nu\n2,bitflip,0.5\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "popre.cli", "eta", "--model", "erasure",
                           "--nu", "1.0", "--n", "3", "--eps", "0.05"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["eta"] == pytest.approx(0.2)
