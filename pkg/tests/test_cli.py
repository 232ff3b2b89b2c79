import csv
import dataclasses

import pytest

from ecrelay.cli import csv_header, main, parse_snr
from ecrelay.sim import SweepRow


def read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_header_lists_sweep_fields():
    names = [f.name for f in dataclasses.fields(SweepRow) if f.name != "case_pct"]
    h = csv_header()
    assert h[:len(names)] == names
    assert h[len(names):] == ["pct_A1", "pct_A2", "pct_A3", "pct_B1", "pct_B2", "pct_B3",
                              "pct_B4", "pct_DEG"]


def test_parse_snr():
    assert parse_snr("0:30:5") == (0, 5, 10, 15, 20, 25, 30)
    assert parse_snr("1,2.5") == (1, 2.5)


def test_capacity_csv(tmp_path):
    out = tmp_path / "capacity.csv"
    rc = main(["--mode", "capacity", "--snr", "0:30:5", "--trials", "20", "--cycles", "3",
               "--seed", "7", "--out", str(out)])
    assert rc == 0
    rows = read(out)
    assert rows[0] == csv_header()
    assert len(rows) == 8
    assert float(rows[1][0]) == 0.0 and float(rows[-1][0]) == 30.0


def test_outage_csv_has_outage_columns(tmp_path):
    out = tmp_path / "outage.csv"
    assert main(["--mode", "outage", "--r1", "1.5", "--r2", "1.5", "--snr", "0,10",
                 "--trials", "20", "--cycles", "3", "--out", str(out)]) == 0
    rows = read(out)
    cols = [c for c in rows[0] if c.startswith("outage_")]
    assert len(cols) == 8
    for r in rows[1:]:
        rec = dict(zip(rows[0], r))
        assert all(0 <= float(rec[c]) <= 1 for c in cols)


def test_verify_passes(capsys):
    assert main(["--mode", "verify", "--instances", "60", "--grid", "1024", "--seed", "1"]) == 0
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["--mode", "nope"],
    ["--trials", "x"],
    ["--gamma12", "0"],
    ["--snr", "0:10:0"],
    ["--no-such-flag"],
    ["--config", "/nonexistent/file.cfg"],
])
def test_bad_arguments_exit_2(argv):
    assert main(argv) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nmode = capacity\nsnr = 0:20:10\ntrials = 10\ncycles = 2\n"
                   "mu_S = 300  # richer source\n")
    out = tmp_path / "a.csv"
    assert main(["--config", str(cfg), "--snr", "5", "--out", str(out)]) == 0
    rows = read(out)
    assert len(rows) == 2 and float(rows[1][0]) == 5.0


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["--config", str(cfg)]) == 2


def test_csv_is_deterministic(tmp_path):
    argv = ["--snr", "0,12", "--trials", "30", "--cycles", "3", "--seed", "5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
