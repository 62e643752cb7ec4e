from __future__ import annotations

import json
import math

import pytest

from kdivlab import acceptance
from kdivlab.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


class TestY:
    def test_json_envelope(self, capsys):
        code, out, _ = run(capsys, "y", "--grid", "64")
        doc = json.loads(out)
        assert code == EXIT_OK
        assert set(doc) == {"command", "params", "results", "checks", "version"}
        assert doc["results"]["gamma"] == pytest.approx(2 / math.sqrt(3), abs=1e-9)

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "y", "--grid", "8", "--format", "csv")
        lines = out.splitlines()
        assert code == EXIT_OK
        assert lines[0] == "a,C_a"
        assert len(lines) == 9

    def test_common_flags_before_subcommand(self, capsys):
        code, out, _ = run(capsys, "--format", "csv", "y", "--grid", "8")
        assert code == EXIT_OK and out.startswith("a,C_a")

    def test_deterministic(self, capsys):
        a = run(capsys, "y", "--grid", "32")[1]
        b = run(capsys, "y", "--grid", "32")[1]
        assert a == b

    def test_out_file(self, capsys, tmp_path):
        p = tmp_path / "y.json"
        code, out, _ = run(capsys, "y", "--grid", "16", "--out", str(p))
        assert code == EXIT_OK and out == ""
        assert json.loads(p.read_text())["command"] == "y"


class TestX:
    def test_printed_kernel_fails_second_moment(self, capsys):
        code, out, _ = run(capsys, "x", "--a", "1.25")
        doc = json.loads(out)
        assert code == EXIT_FAIL
        assert doc["results"]["c_a"] == pytest.approx(1.0304, abs=1e-3)
        failed = [c["name"] for c in doc["checks"] if not c["pass"]]
        assert failed == ["kernel.int g1 = 1"]

    def test_corrected_variant_passes(self, capsys):
        code, out, _ = run(capsys, "x", "--a", "1.25", "--variant", "corrected")
        assert code == EXIT_OK
        assert json.loads(out)["results"]["c_a"] == pytest.approx(1.0126365, abs=1e-6)

    def test_tol_flag_relaxes(self, capsys):
        assert run(capsys, "x", "--a", "1.25", "--tol", "0.1")[0] == EXIT_OK

    def test_tol_env_var(self, capsys, monkeypatch):
        monkeypatch.setenv("KDIVLAB_TOL", "0.1")
        assert run(capsys, "x", "--a", "1.25")[0] == EXIT_OK

    def test_flag_overrides_env(self, capsys, monkeypatch):
        monkeypatch.setenv("KDIVLAB_TOL", "0.1")
        assert run(capsys, "x", "--a", "1.25", "--tol", "1e-9")[0] == EXIT_FAIL

    def test_trivial_a(self, capsys):
        code, out, _ = run(capsys, "x", "--a", "1")
        assert code == EXIT_OK
        assert json.loads(out)["results"]["c_a"] == 1.0

    def test_missing_mode_is_usage_error(self, capsys):
        assert run(capsys, "x")[0] == EXIT_ERROR

    def test_bad_a_is_usage_error(self, capsys):
        code, _, err = run(capsys, "x", "--a", "0.5")
        assert code == EXIT_ERROR
        assert "error" in err


class TestCalderon:
    def test_bound(self, capsys):
        code, out, _ = run(capsys, "calderon", "bound", "--n", "3", "--q", "9")
        assert code == EXIT_OK
        assert json.loads(out)["results"]["bound"] == pytest.approx(1.5)

    def test_jinxx(self, capsys):
        code, out, _ = run(capsys, "calderon", "jinxx", "--n", "2", "--q", "4")
        assert code == EXIT_OK
        res = json.loads(out)["results"]
        assert res["powers_of_q"]["orientation_B_holds"]
        assert not res["powers_of_q"]["orientation_A_holds"]

    def test_appendix_reports_e_dominance_failure(self, capsys):
        code, out, _ = run(capsys, "calderon", "appendix")
        assert code == EXIT_FAIL
        failed = [c["name"] for c in json.loads(out)["checks"] if not c["pass"]]
        assert failed == ["dim8.E dominance on grid"]

    def test_bad_q(self, capsys):
        assert run(capsys, "calderon", "bound", "--n", "3", "--q", "0.5")[0] == EXIT_ERROR


class TestOracleAndG:
    def test_oracle_y(self, capsys):
        code, out, _ = run(capsys, "oracle", "--couple", "Y", "--a", str(math.pi / 6),
                           "--reference", str(2 / math.sqrt(3)))
        assert code == EXIT_OK
        assert json.loads(out)["results"]["c_a"] == pytest.approx(2 / math.sqrt(3), abs=1e-7)

    def test_g_without_oracle(self, capsys):
        code, out, _ = run(capsys, "g", "--r", "4", "--no-oracle")
        assert code == EXIT_OK
        assert out.startswith("{")

    def test_g_r_one_is_trivial(self, capsys):
        code, out, _ = run(capsys, "g", "--r", "1")
        assert code == EXIT_OK
        assert json.loads(out)["results"]["gamma"] == 1.0

    def test_g_swaps_small_r(self, capsys):
        code, out, _ = run(capsys, "g", "--r", "0.25", "--no-oracle")
        assert code == EXIT_OK
        assert "swapped to r=4" in out


class TestUsage:
    def test_unknown_command(self, capsys):
        assert run(capsys, "nope")[0] == EXIT_ERROR

    def test_no_command(self, capsys):
        assert run(capsys)[0] == EXIT_ERROR

    def test_bad_tol(self, capsys):
        assert run(capsys, "y", "--tol", "-1")[0] == EXIT_ERROR


class TestCheckAllGolden:
    def test_unreadable_golden(self, capsys, tmp_path):
        p = tmp_path / "g.json"
        p.write_text("{not json")
        code, out, _ = run(capsys, "check-all", "--golden", str(p))
        assert code == EXIT_FAIL
        assert json.loads(out)["checks"][0]["name"] == "golden file readable"

    def test_corrupted_entry_names_the_check(self, capsys, tmp_path, monkeypatch):
        # keep the run cheap: only the first criterion, with a wrong golden value
        monkeypatch.setattr(acceptance, "CRITERIA", acceptance.CRITERIA[:1])
        golden = acceptance.load_golden()
        golden["gamma_y"]["value"] = 1.2
        p = tmp_path / "g.json"
        p.write_text(json.dumps(golden))
        code, out, err = run(capsys, "check-all", "--golden", str(p))
        assert code == EXIT_FAIL
        assert "[FAIL] criterion 1" in err
        failed = [c["name"] for c in json.loads(out)["checks"] if not c["pass"]]
        assert failed and all(n.startswith("criterion 1.") for n in failed)

    def test_missing_key_is_reported(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setattr(acceptance, "CRITERIA", acceptance.CRITERIA[:1])
        golden = acceptance.load_golden()
        del golden["gamma_y"]
        p = tmp_path / "g.json"
        p.write_text(json.dumps(golden))
        code, out, _ = run(capsys, "check-all", "--golden", str(p))
        assert code == EXIT_FAIL
        assert any("golden file entry" in c["name"] for c in json.loads(out)["checks"])
