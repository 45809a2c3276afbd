"""End-to-end checks of the command-line front end: artifact schemas,
exit codes, manifest replay, and byte-level determinism."""

import json
import math
import os

import pytest

import helmholtz_lab.cli as cli
from helmholtz_lab import __version__
from helmholtz_lab.bessel import first_zero
from helmholtz_lab.cli import _float_list, _int_list, main
from helmholtz_lab.errors import DataError


def read(path):
    with open(path) as fh:
        return fh.read()


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


class TestRangeParsers:
    def test_float_colon_range(self):
        assert _float_list("20:200:20") == [20.0 + 20.0 * i for i in range(10)]

    def test_float_inclusive_endpoint(self):
        assert _float_list("0.5:2.5:0.5") == pytest.approx(
            [0.5, 1.0, 1.5, 2.0, 2.5])

    def test_float_comma_and_scalar(self):
        assert _float_list("1,2.5,4") == [1.0, 2.5, 4.0]
        assert _float_list("7") == [7.0]

    def test_float_idempotent_on_lists(self):
        assert _float_list([1, 2]) == [1.0, 2.0]
        assert _float_list((3.5,)) == [3.5]

    @pytest.mark.parametrize("bad", ["1:2", "5:1:1", "1:9:0", "1:9:-1"])
    def test_float_bad_ranges(self, bad):
        with pytest.raises(DataError):
            _float_list(bad)

    def test_int_dotdot_range(self):
        assert _int_list("2..5") == [2, 3, 4, 5]
        assert _int_list("4..4") == [4]

    def test_int_comma_and_scalar(self):
        assert _int_list("3,9") == [3, 9]
        assert _int_list("11") == [11]

    def test_int_idempotent_on_lists(self):
        assert _int_list([2, 3]) == [2, 3]

    def test_int_bad_range(self):
        with pytest.raises(DataError):
            _int_list("9..2")


class TestRadial:
    def test_artifacts(self, tmp_path, capsys):
        out = str(tmp_path)
        assert main(["radial", "--kappa", "0", "--m", "3",
                     "--rho-max", "10", "--out", out]) == 0
        captured = capsys.readouterr()
        assert "radial:" in captured.out

        csv = read(os.path.join(out, "radial.csv"))
        assert csv.splitlines()[0] == "rho,sign,log_abs_L,log_abs_dL"
        assert len(csv.splitlines()) > 10

        svg = read(os.path.join(out, "radial.svg"))
        assert svg.lstrip().startswith("<?xml")

        manifest = read_json(os.path.join(out, "manifest.json"))
        assert manifest["version"] == __version__
        assert manifest["subcommand"] == "radial"
        assert manifest["config"] == {"kappa": 0.0, "m": 3.0,
                                      "rho_max": 10.0, "rtol": 1e-10}

    def test_byte_identical_reruns(self, tmp_path):
        outs = [str(tmp_path / "a"), str(tmp_path / "b")]
        for out in outs:
            assert main(["radial", "--kappa", "-0.5", "--m", "2",
                         "--rho-max", "8", "--out", out]) == 0
        for name in ("radial.csv", "radial.svg", "manifest.json"):
            a = read(os.path.join(outs[0], name))
            b = read(os.path.join(outs[1], name))
            assert a == b, name


class TestBesselZero:
    def test_table(self, tmp_path):
        out = str(tmp_path)
        assert main(["bessel-zero", "--l", "1..10", "--out", out]) == 0
        lines = read(os.path.join(out, "bessel_zero.csv")).splitlines()
        assert lines[0] == "l,bracket_lo,bracket_hi,first_zero,inside"
        assert len(lines) == 11
        assert all(row.rsplit(",", 1)[1] == "1" for row in lines[1:])
        # 17-digit output round-trips to the exact binary value
        fields = lines[1].split(",")
        assert fields[0] == "1"
        assert float(fields[3]) == first_zero(1)
        assert float(fields[3]) == pytest.approx(3.8317059702075123, rel=1e-12)

    def test_comma_form(self, tmp_path):
        out = str(tmp_path)
        assert main(["bessel-zero", "--l", "3,7", "--out", out]) == 0
        lines = read(os.path.join(out, "bessel_zero.csv")).splitlines()
        assert [row.split(",")[0] for row in lines[1:]] == ["3", "7"]

    def test_failed_verdict_exit_code(self, tmp_path, monkeypatch, capsys):
        # force a zero outside its bracket to exercise the failure path
        monkeypatch.setattr(cli, "first_zero", lambda l: 1.0e9)
        assert main(["bessel-zero", "--l", "2", "--out", str(tmp_path)]) == 1
        assert "1 outside bracket" in capsys.readouterr().out


class TestThreeBall:
    def test_small_sweep(self, tmp_path, capsys):
        out = str(tmp_path)
        code = main(["three-ball", "--kappa", "0", "--kr", "8:40:4",
                     "--r", "1", "--alpha", "1", "--out", out])
        assert code == 0
        assert "PASS" in capsys.readouterr().out
        lines = read(os.path.join(out, "three_ball.csv")).splitlines()
        assert lines[0] == "kr,m_selected,log_bound,policy,kappa,alpha"
        assert len(lines) == 10
        first = lines[1].split(",")
        assert float(first[0]) == 8.0
        assert first[3] == "paper_rule"
        assert os.path.exists(os.path.join(out, "three_ball.svg"))


class TestReverse:
    def test_small_sweep(self, tmp_path):
        out = str(tmp_path)
        assert main(["reverse", "--kappa", "0", "--r", "1", "--R1", "2",
                     "--k", "1:3:1", "--out", out]) == 0
        payload = read_json(os.path.join(out, "reverse.json"))
        assert payload["k_values"] == [1.0, 2.0, 3.0]
        assert payload["C_hat"][0] == pytest.approx(1.036433, rel=1e-5)
        assert payload["C_hat"][2] == pytest.approx(1.14286827, rel=1e-6)
        assert payload["certificate"]["conclusive"] is True
        assert payload["certificate"]["window"] == 5
        assert len(payload["certificate"]["m_max"]) == 3
        assert os.path.exists(os.path.join(out, "reverse.svg"))

    def test_worker_count_does_not_change_output(self, tmp_path, monkeypatch):
        outs = [str(tmp_path / "serial"), str(tmp_path / "pooled")]
        monkeypatch.setenv("HELMHOLTZ_LAB_THREADS", "1")
        assert main(["reverse", "--k", "1:3:1", "--out", outs[0]]) == 0
        monkeypatch.setenv("HELMHOLTZ_LAB_THREADS", "2")
        assert main(["reverse", "--k", "1:3:1", "--out", outs[1]]) == 0
        assert (read(os.path.join(outs[0], "reverse.json"))
                == read(os.path.join(outs[1], "reverse.json")))


class TestCaccioppoli:
    def test_report(self, tmp_path, capsys):
        out = str(tmp_path)
        code = main(["caccioppoli", "--kappa", "0", "--m", "0", "--k", "0.5",
                     "--r", "1", "--R", "3", "--eps", "0.25", "--out", out])
        assert code == 0
        assert "PASS" in capsys.readouterr().out
        payload = read_json(os.path.join(out, "caccioppoli.json"))
        assert payload["kind"] == "caccioppoli"
        assert payload["verdict"] is True
        assert payload["params"]["c_lower"] == pytest.approx(
            0.005964331640095433, rel=1e-9)

    def test_collar_precondition(self, tmp_path, capsys):
        code = main(["caccioppoli", "--m", "3", "--k", "2", "--r", "0.1",
                     "--R", "2.5", "--eps", "0.2", "--out", str(tmp_path)])
        assert code == 2
        err = capsys.readouterr().err
        assert err.startswith("precondition violated: interval")
        # the manifest is written before the handler rejects
        assert os.path.exists(os.path.join(str(tmp_path), "manifest.json"))


class TestEquator:
    def test_small_family(self, tmp_path, capsys):
        out = str(tmp_path)
        assert main(["equator", "--n", "2..8", "--out", out]) == 0
        assert "PASS" in capsys.readouterr().out
        lines = read(os.path.join(out, "equator.csv")).splitlines()
        assert lines[0] == "n,k,log_ratio"
        assert len(lines) == 8
        n2 = lines[1].split(",")
        assert n2[0] == "2"
        assert float(n2[1]) == pytest.approx(math.sqrt(6.0), rel=1e-12)
        assert os.path.exists(os.path.join(out, "equator.svg"))

    def test_annulus_precondition(self, tmp_path, capsys):
        code = main(["equator", "--n", "2..4", "--a", "1.5",
                     "--out", str(tmp_path)])
        assert code == 2
        assert capsys.readouterr().err.startswith(
            "precondition violated: annulus_avoids_equator")


class TestOracle:
    def test_canonical_plus_randomized(self, tmp_path, capsys):
        out = str(tmp_path)
        assert main(["oracle", "--seed", "0", "--count", "1",
                     "--out", out]) == 0
        stdout = capsys.readouterr().out
        assert "oracle[sturm]: PASS" in stdout
        assert "oracle[picone]: PASS" in stdout
        assert "oracle[sonin]: PASS" in stdout
        payload = read_json(os.path.join(out, "oracle.json"))
        assert len(payload) == 6
        for entry in payload:
            assert entry["verdict"] is True
            assert set(entry) == {"kind", "params", "lhs_log", "rhs_log",
                                  "margin", "verdict"}


class TestReplay:
    def test_round_trip(self, tmp_path):
        first = str(tmp_path / "first")
        second = str(tmp_path / "second")
        assert main(["caccioppoli", "--m", "3", "--k", "2", "--r", "0.8",
                     "--R", "2.5", "--eps", "0.1", "--out", first]) == 0
        assert main(["replay",
                     "--manifest", os.path.join(first, "manifest.json"),
                     "--out", second]) == 0
        for name in ("caccioppoli.json", "manifest.json"):
            assert (read(os.path.join(first, name))
                    == read(os.path.join(second, name))), name

    def test_rejects_nested_replay(self, tmp_path, capsys):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps(
            {"version": __version__, "subcommand": "replay", "config": {}}))
        code = main(["replay", "--manifest", str(manifest),
                     "--out", str(tmp_path / "out")])
        assert code == 2
        assert "invalid parameters:" in capsys.readouterr().err

    def test_rejects_unknown_subcommand(self, tmp_path, capsys):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps(
            {"version": __version__, "subcommand": "nope", "config": {}}))
        assert main(["replay", "--manifest", str(manifest),
                     "--out", str(tmp_path / "out")]) == 2


class TestUsageErrors:
    def test_unknown_subcommand_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["radial", "--m", "3"])
        assert exc.value.code == 2

    def test_bad_range_reports_invalid_parameters(self, tmp_path, capsys):
        assert main(["reverse", "--k", "5:1:1", "--out", str(tmp_path)]) == 2
        assert capsys.readouterr().err.startswith("invalid parameters:")

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.strip() == __version__
