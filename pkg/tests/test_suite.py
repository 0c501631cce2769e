import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from totpos.cli import main
from totpos.errors import ConfigError
from totpos.kernels import Power, gaussian, heaviside, jks
from totpos.suite import (
    CONFIRMED,
    ERROR,
    PROBES,
    VIOLATION,
    ProbeConfig,
    ProbeReport,
    ReportDocument,
    emit_matrix,
    run_suite,
    worker_count,
)

QUICK = {
    "trichotomy": {"pairs": 1, "orders": (2, 3)},
    "signature": {"instances": 5},
    "fekete": {"matrices": 10},
    "hankel": {"matrices": 10},
    "descartes": {"instances": 10},
}


class TestConfig:
    def test_defaults_select_every_probe(self):
        assert ProbeConfig().probes == tuple(PROBES)

    def test_parse(self):
        cfg = ProbeConfig.from_text(
            "[harness]\nmode = exact\nseed = 7\nprobes = jks_det, fekete\n"
            "[numerics]\nzero_band = 1e-8\n[tptest]\nfekete.matrices = 3\n"
        )
        assert cfg.mode == "exact" and cfg.seed == 7
        assert cfg.probes == ("jks_det", "fekete")
        assert cfg.profile.zero_band == 1e-8
        assert cfg.params["fekete"] == {"matrices": 3, "max_order": 6}

    @pytest.mark.parametrize("text", [
        "[bogus]\nx = 1\n",
        "[harness]\ncolour = red\n",
        "[harness]\nmode = fuzzy\n",
        "[harness]\nprobes = nothing\n",
        "[tptest]\nfekete.size = 3\n",
        "[laplace]\nfekete.matrices = 3\n",
        "[tptest]\nfekete.matrices = many\n",
        "[numerics]\nslack = 1\n",
        "not an ini file",
    ])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            ProbeConfig.from_text(text)

    def test_overrides_win(self):
        cfg = ProbeConfig.from_text("[harness]\nseed = 1\n", seed=9)
        assert cfg.seed == 9

    def test_thread_variable(self, monkeypatch):
        monkeypatch.setenv("TOTPOS_THREADS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("TOTPOS_THREADS", "lots")
        with pytest.raises(ConfigError):
            worker_count()


class TestRunSuite:
    def test_jks_det_report(self):
        doc = run_suite(ProbeConfig(probes=("jks_det",)))
        d = doc.to_dict()
        assert d["schema_version"] == 1
        assert d["summary"] == {"confirmed": 1, "violations": 0, "errors": 0}
        details = d["probes"][0]["details"]
        assert details["jks_4x4"]["determinant"] == "-2"
        assert details["jks_alpha0_3x3"]["determinant"] == "-1"
        assert doc.exit_code == 0

    def test_deterministic_across_threads(self):
        cfg = ProbeConfig(probes=tuple(QUICK), params=QUICK, seed=123)
        a = run_suite(cfg, threads=1).to_json(with_timestamp=False)
        b = run_suite(cfg, threads=4).to_json(with_timestamp=False)
        assert a == b

    def test_seed_changes_instances(self):
        a = run_suite(ProbeConfig(probes=("signature",), params=QUICK, seed=1)).to_json(with_timestamp=False)
        b = run_suite(ProbeConfig(probes=("signature",), params=QUICK, seed=2)).to_json(with_timestamp=False)
        assert a != b

    def test_probe_errors_are_collected(self, monkeypatch):
        def broken(params, ctx):
            raise RuntimeError("boom")
        original = PROBES["tn3"]
        monkeypatch.setitem(PROBES, "tn3", type(original)(original.name, original.section, broken, original.params))
        doc = run_suite(ProbeConfig(probes=("jks_det", "tn3")))
        assert [p.status for p in doc.probes] == [CONFIRMED, ERROR]
        assert "boom" in doc.probes[1].error
        assert doc.exit_code == 1

    def test_default_configuration_confirms(self):
        doc = run_suite(ProbeConfig())
        assert doc.summary == {"confirmed": len(PROBES), "violations": 0, "errors": 0}

    def test_csv_report(self):
        doc = run_suite(ProbeConfig(probes=("jks_det", "tn3"), format="csv"))
        lines = doc.render().splitlines()
        assert lines[0] == "name,module,status,checked,violations,error"
        assert lines[1].startswith("jks_det,kernels,confirmed,2,0")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from([CONFIRMED, VIOLATION, ERROR]), min_size=1, max_size=8))
def test_exit_code_contract(statuses):
    reports = tuple(ProbeReport(f"p{i}", "m", s, 1, (), {}) for i, s in enumerate(statuses))
    doc = ReportDocument(ProbeConfig(probes=("jks_det",)), reports, "t")
    s = doc.summary
    assert s["confirmed"] + s["violations"] + s["errors"] == len(statuses)
    assert (doc.exit_code == 0) == (s["violations"] == 0 and s["errors"] == 0)
    assert json.loads(doc.to_json())["summary"] == s


class TestEmit:
    def test_jks_csv(self):
        a = (-2, -1, 1, 2)
        text = emit_matrix(jks(), [], a, [Fraction(v, 2) for v in a], "csv")
        assert text.splitlines() == ["3,2,0,0", "2,1.5,0.5,0", "0,0.5,1.5,2", "0,0,2,3"]

    def test_heaviside_json(self):
        d = json.loads(emit_matrix(heaviside(Fraction(1, 2)), [], (0, 1), (0, 1), "json"))
        assert d["entries"] == [["1/2", "0"], ["1", "1/2"]]

    def test_gaussian_csv_round_trips(self, tmp_path):
        out = tmp_path / "g.csv"
        emit_matrix(gaussian(), [], (0, 1, 2), (0, 1, 2), "csv", str(out))
        back = np.loadtxt(out, delimiter=",")
        np.testing.assert_array_equal(back[0], [1, np.exp(-1), np.exp(-4)])

    def test_power_transform(self):
        text = emit_matrix(jks(), [Power(2)], (0, 1), (0, 1), "csv")
        assert text.splitlines() == ["1,1", "1,4"]


class TestCLI:
    def test_probe_jks_det(self, tmp_path, capsys):
        cfg = tmp_path / "q.ini"
        cfg.write_text("[harness]\nprobes = jks_det\n")
        out = tmp_path / "r.json"
        assert main(["probe", "--config", str(cfg), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["summary"]["violations"] == 0

    def test_malformed_config_exits_nonzero(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[harness]\nbogus = 1\n")
        assert main(["probe", "--config", str(cfg)]) == 2
        assert "configuration error" in capsys.readouterr().err

    def test_bad_flag(self):
        with pytest.raises(SystemExit) as exc:
            main(["probe", "--mode", "fuzzy"])
        assert exc.value.code == 2

    def test_emit(self, capsys):
        assert main(["emit", "JKS", "--x=-2,-1,1,2", "--y=-1,-1/2,1/2,1"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "3,2,0,0"

    def test_emit_json_with_params(self, capsys):
        assert main(["emit", "Heaviside", "--param", "d=1/2", "--x", "0,1", "--y", "0,1", "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["entries"][0][0] == "1/2"

    def test_signature_instance(self, capsys):
        assert main(["signature", "--x=0.1,0.2,0.3", "--y=0.1,0.2,0.3", "--alpha", "0.5"]) == 0
        assert json.loads(capsys.readouterr().out)["observed"] == [1, 1, -1]

    def test_homotopy_instance(self, capsys):
        assert main(["homotopy", "--x=-8.5,0.1", "--y", "1,2", "--epsilon", "1"]) == 1
        assert main(["homotopy", "--x=-199,0", "--y", "1,2"]) == 0

    def test_laplace_value(self, capsys):
        assert main(["laplace", "--kernel", "Omega", "--s", "1"]) == 0
        assert json.loads(capsys.readouterr().out)["value"][0] == pytest.approx(0.25)

    def test_fekete_compare_suite(self, tmp_path):
        cfg = tmp_path / "f.ini"
        cfg.write_text("[tptest]\nfekete.matrices = 5\nhankel.matrices = 5\n")
        assert main(["fekete-compare", "--config", str(cfg), "--format", "csv",
                     "--out", str(tmp_path / "r.csv")]) == 0
        assert (tmp_path / "r.csv").read_text().count("confirmed") == 2
