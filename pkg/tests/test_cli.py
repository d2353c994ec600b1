import json
import math
import subprocess
import sys

import pytest

from siegellab import cli
from siegellab.character import build_character_table
from siegellab.partition import PartitionParams, t_sums
from siegellab.progressions import ProgressionQuery, main_term_deviation
from siegellab.sieve import build_fun_tables

pytestmark = pytest.mark.filterwarnings("ignore:alpha exceeds epsilon")


def test_parse_valid_psi():
    cfg = cli.parse_and_validate(
        ["psi", "--x", "100000", "--q", "101", "--a", "5", "--disc", "-4"]
    )
    assert cfg.subcommand == "psi"
    assert (cfg.x, cfg.q, cfg.a, cfg.disc) == (100_000, 101, 5, -4)
    assert cfg.beta == 0.5


def test_parse_rejects_non_unit_residue(capsys):
    rc = cli.main(["psi", "--x", "100000", "--q", "101", "--a", "101", "--disc", "-4"])
    assert rc == 2
    assert "gcd" in capsys.readouterr().err


def test_parse_valid_tsum():
    cfg = cli.parse_and_validate(
        ["tsum", "--x", "100000", "--q", "97", "--a", "5", "--disc", "-3",
         "--theta", "0.5", "--alpha", "0.01"]
    )
    assert cfg.theta == 0.5 and cfg.alpha == 0.01


def test_bad_disc_exits_2(capsys):
    rc = cli.main(["character", "--disc", "9"])
    assert rc == 2
    assert "fundamental" in capsys.readouterr().err


def test_unknown_flag_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.parse_and_validate(["psi", "--nope", "3"])
    assert exc.value.code == 2


def test_character_json(capsys):
    rc = cli.main(["character", "--disc", "-4", "--tail-cutoff", "100000"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["delta"] == -4 and data["D"] == 4
    assert abs(data["l_one"] - math.pi / 4) < data["l_one_error"]


def test_hunt_json(capsys):
    rc = cli.main(["hunt", "--max-abs-delta", "5", "--top-k", "2"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert [d["delta"] for d in data] == [5, -3]


def test_psi_json_roundtrip(capsys):
    rc = cli.main(["psi", "--x", "2000", "--q", "4", "--a", "3", "--disc", "-4"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    chi = build_character_table(-4, 100_000)
    tables = build_fun_tables(2000, chi)
    rep = main_term_deviation(ProgressionQuery(2000, 4, 3), tables, chi, 0.5)
    assert data == rep.to_dict()


def test_psi_table_csv(capsys):
    rc = cli.main(["psi", "--x", "500", "--disc", "5", "--table", "--q-max", "5"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x,q,a,psi_prog,psi_all,phi_q,chi_term,main_term,normalized_error,comparator,beta"
    # q = 3 (2 units), q = 4 (2), q = 5 (4)
    assert len(lines) == 1 + 2 + 2 + 4


def test_sieve_csv_stable(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert cli.main(["sieve", "--limit", "200", "--disc", "-3", "--out", str(out1)]) == 0
    assert cli.main(["sieve", "--limit", "200", "--disc", "-3", "--out", str(out2)]) == 0
    b1 = out1.read_bytes()
    assert b1 == out2.read_bytes()
    lines = b1.decode().splitlines()
    assert lines[0] == "n,mu,tau,tau3,lambda,nu,biglambda,lambda_prime"
    assert len(lines) == 201
    row12 = lines[12].split(",")
    assert row12[0] == "12" and row12[2] == "6"  # tau(12)


def test_tsum_json(capsys):
    rc = cli.main(["tsum", "--x", "4000", "--q", "97", "--a", "5", "--disc", "-3",
                   "--theta", "0.5", "--alpha", "0.01"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    chi = build_character_table(-3, 100_000)
    tables = build_fun_tables(4000, chi)
    rep = t_sums(4000, 97, 5, chi, PartitionParams(theta=0.5, alpha=0.01), tables)
    assert data == rep.to_dict()
    assert data["inequality_holds"] is True


def test_tsum_je_json(capsys):
    rc = cli.main(["tsum", "--x", "4000", "--q", "97", "--a", "5", "--disc", "-3",
                   "--theta", "0.5", "--alpha", "0.01", "--je"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    total = data["edge_small_d"] + data["edge_small_m"] + data["middle_total"]
    assert abs(total - data["window_total"]) < 1e-6


def test_kloosterman_json_and_csv(capsys, tmp_path):
    rc = cli.main(["kloosterman", "--x", "2000", "--q", "101", "--a", "7"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["abs_s"] <= data["trivial_bound"]
    assert len(data["s_value"]) == 2

    out = tmp_path / "k.csv"
    rc = cli.main(["kloosterman", "--x", "2000", "--Q", "10", "--avg", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "q,a_max,abs_s,fs_ratio"
    assert len(lines) == 1 + len(range(10, 21))


def test_kloosterman_missing_args(capsys):
    assert cli.main(["kloosterman", "--x", "2000"]) == 2
    assert cli.main(["kloosterman", "--x", "2000", "--avg"]) == 2


def test_verify_identities_exit_zero(capsys):
    rc = cli.main(["verify", "--suite", "identities", "--limit", "2000", "--disc", "-4"])
    out = capsys.readouterr().out
    assert rc == 0
    reports = [json.loads(line) for line in out.strip().splitlines()]
    assert len(reports) == 9
    assert all(r["violations"] == 0 for r in reports)
    names = {r["name"].split("[")[0] for r in reports}
    assert "lambda_prime_eq" in names and "ternary_divisor" in names


def test_verify_exit_one_on_violations(capsys, monkeypatch):
    from siegellab.convolution import IdentityReport

    def fake_verify(name, limit, chi, tables=None):
        return IdentityReport(name, limit, 1.0, 2, violations=1)

    monkeypatch.setattr(cli, "verify_identity", fake_verify)
    rc = cli.main(["verify", "--suite", "identities", "--limit", "100", "--disc", "-4"])
    capsys.readouterr()
    assert rc == 1


def test_verify_bad_output_path(capsys):
    rc = cli.main(["sieve", "--limit", "100", "--disc", "-3",
                   "--out", "/nonexistent-dir/x.csv"])
    assert rc == 2
    assert "/nonexistent-dir/x.csv" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "siegellab", "character", "--disc", "5",
         "--tail-cutoff", "10000"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["delta"] == 5
