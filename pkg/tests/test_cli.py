import json

import pytest

from nullgauge import catalog, expr as ex
from nullgauge.cli import main
from nullgauge.parse import parse

from helpers import expr_environment


def _read(path):
    return path.read_bytes()


class TestVerify:
    def test_default_run_writes_reports_and_summary(self, tmp_path, capsys):
        code = main(["verify", "--out", str(tmp_path / "out"), "--seed", "42"])
        assert code == 0
        out = tmp_path / "out"
        for form_id in catalog.PRINTED_FORM_IDS:
            payload = json.loads((out / f"check_{form_id}.json").read_text())
            assert payload["id"] == form_id
            assert payload["verdict"] in ("match", "mismatch")
        summary = json.loads((out / "verify_summary.json").read_text())
        assert summary["all_invariants_passed"] is True
        assert len(summary["printed_forms"]) == 8
        printed = capsys.readouterr().out
        assert "invariant null-lift-closure: pass" in printed

    def test_byte_identical_across_runs(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert main(["verify", "--out", str(out1), "--seed", "7"]) == 0
        assert main(["verify", "--out", str(out2), "--seed", "7"]) == 0
        for name in sorted(p.name for p in out1.iterdir()):
            assert _read(out1 / name) == _read(out2 / name), name

    def test_strict_mode_fails_on_mismatches(self, tmp_path):
        code = main(["verify", "--out", str(tmp_path), "--strict"])
        assert code == 1

    def test_bad_scenario_path_is_config_error(self, tmp_path, capsys):
        code = main(
            ["verify", "--scenario", str(tmp_path / "none.json"),
             "--out", str(tmp_path)]
        )
        assert code == 2
        assert "configuration error" in capsys.readouterr().err

    def test_invalid_scenario_field(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"no_such_field": 1}')
        assert main(["verify", "--scenario", str(bad), "--out", str(tmp_path)]) == 2


class TestDerive:
    def test_default_output_reparses(self, tmp_path, capsys):
        code = main(["derive", "--out", str(tmp_path)])
        assert code == 0
        for line in capsys.readouterr().out.strip().split("\n"):
            label, _, text = line.partition(" = ")
            if text.startswith("(") and "degenerate" in text:
                continue
            if label == "F_flags":
                continue
            e = parse(
                text,
                {
                    fn.name: fn
                    for fn in (
                        catalog.CHECK_H1,
                        catalog.CHECK_H2,
                        catalog.CHECK_H4,
                    )
                }
                | expr_environment(catalog.nsl_inertia_first().body),
            )
            assert ex.to_string(e) == text

    def test_null_lagrangian_scenario_prints_zero_residual(self, tmp_path, capsys):
        scenario = tmp_path / "null.json"
        scenario.write_text(
            json.dumps(
                {
                    "lagrangian": {"form": "custom", "body": "xdot/x"},
                    "gauge": {"h1": "1", "h2": "1", "h4": "0"},
                }
            )
        )
        code = main(["derive", "--scenario", str(scenario), "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "EL = 0" in out
        assert "degenerate" in out

    def test_route_flag_switches_force(self, tmp_path, capsys):
        code = main(["derive", "--out", str(tmp_path), "--route", "A"])
        assert code == 0
        assert "F[route-A]" in capsys.readouterr().out


class TestSimulate:
    def test_inertia_scenario(self, tmp_path, capsys):
        scenario = tmp_path / "inertia.json"
        scenario.write_text(
            json.dumps(
                {
                    "accel": "0",
                    "ics": [1.0, 2.0],
                    "integrator": {"step": 0.001, "t_span": [0.0, 10.0]},
                }
            )
        )
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", str(scenario), "--out", str(out)])
        assert code == 0
        lines = (out / "trajectory.csv").read_text().strip().split("\n")
        assert lines[0] == "t,x,xdot"
        t, x, _ = (float(v) for v in lines[-1].split(","))
        assert x == pytest.approx(1.0 + 2.0 * t, abs=1e-8)

    def test_driven_scenario_writes_diagnostics(self, tmp_path):
        scenario = tmp_path / "driven.json"
        scenario.write_text(
            json.dumps(
                {
                    "lagrangian": {"form": "nsl-set1"},
                    "gauge": {"h1": "2 + t/2", "h2": "3 + t^2/4", "h4": "2 + t/3"},
                    "ics": [1.0, 1.0],
                    "integrator": {"step": 0.001, "t_span": [0.0, 0.3]},
                }
            )
        )
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", str(scenario), "--out", str(out)])
        assert code == 0
        lines = (out / "diagnostics.csv").read_text().strip().split("\n")
        assert lines[0] == "t,energy,dL_dt,el_residual"
        residuals = [abs(float(line.split(",")[3])) for line in lines[1:]]
        assert max(residuals) < 1e-6

    def test_zero_velocity_under_second_set_is_singular(self, tmp_path, capsys):
        scenario = tmp_path / "sing.json"
        scenario.write_text(
            json.dumps(
                {
                    "lagrangian": {"form": "nsl-set2"},
                    "gauge": {"h1": "2 + t/2", "h2": "3 + t^2/4", "h4": "2 + t/3"},
                    "ics": [1.0, 0.0],
                    "integrator": {"step": 0.001, "t_span": [0.0, 1.0]},
                }
            )
        )
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", str(scenario), "--out", str(out)])
        assert code == 3
        text = (out / "trajectory.csv").read_text()
        assert "#event,singularity," in text

    def test_effective_dynamics_mode(self, tmp_path):
        scenario = tmp_path / "eff.json"
        scenario.write_text(
            json.dumps(
                {
                    "lagrangian": {"form": "nsl-set1"},
                    "gauge": {"h1": "2 + t/2", "h2": "3 + t^2/4", "h4": "2 + t/3"},
                    "dynamics": "effective",
                    "route": "eq9",
                    "set": 1,
                    "ics": [1.0, 1.0],
                    "integrator": {"step": 0.001, "t_span": [0.0, 0.2]},
                }
            )
        )
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", str(scenario), "--out", str(out)])
        assert code == 0
        assert (out / "trajectory.csv").exists()


class TestBoost:
    def test_default_run(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["boost", "--out", str(out)])
        assert code == 0
        forms = sorted(out.glob("boost_form_*.json"))
        eoms = sorted(out.glob("boost_eom_*.json"))
        assert len(forms) == 5 and len(eoms) == 5
        payload = json.loads(forms[0].read_text())
        assert set(payload) == {"conditions", "verdict", "parameter_map", "V0"}
        assert payload["verdict"] == "holds"
        eom = json.loads(eoms[0].read_text())
        assert eom["invariant"] is False
        printed = capsys.readouterr().out
        assert "form holds" in printed

    def test_custom_v0_list(self, tmp_path):
        scenario = tmp_path / "b.json"
        scenario.write_text(json.dumps({"boost": {"v0": [1.0]}}))
        out = tmp_path / "out"
        code = main(["boost", "--scenario", str(scenario), "--out", str(out)])
        assert code == 0
        payload = json.loads((out / "boost_form_000.json").read_text())
        expected = catalog.DEFAULT_CONSTANTS["C2"] - catalog.DEFAULT_CONSTANTS["v_o"]
        assert payload["parameter_map"]["C2"] == pytest.approx(expected)
