import json

import numpy as np
import pytest
import yaml

from potentops.scenarios import (
    COLUMNS,
    KINDS,
    TOLERANCES,
    ConfigError,
    emit_results,
    format_rows,
    parse_config,
    parse_config_mapping,
    parse_sweep_document,
    run_scenario,
    run_sweep,
    scenario_template,
    verification_suite,
)

MINIMAL_WEAK_VALUE = """
scenario: weak-value
observable: sigma_z
psi: [0.8660254037844386, 0.5]
phi: amplification_phi
g: [0.1]
"""


class TestParseConfig:
    def test_minimal_weak_value(self):
        cfg = parse_config(MINIMAL_WEAK_VALUE)
        assert cfg.kind == "weak-value"
        assert cfg.seed == 0
        assert cfg.params["g"] == [0.1]
        np.testing.assert_allclose(cfg.params["psi"], [np.sqrt(3) / 2, 0.5], atol=1e-12)

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            parse_config("scenario: heat-death")

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="observble"):
            parse_config("scenario: weak-value\nobservble: sigma_z")

    def test_dimension_mismatch_names_both_keys(self):
        text = "scenario: weak-value\npsi: [1, 0, 0]\nobservable: sigma_z"
        with pytest.raises(ConfigError, match="'psi'.*'observable'"):
            parse_config(text)

    def test_sweep_list_makes_three_row_plan(self):
        cfg = parse_config("scenario: weak-value\ng: [0.2, 0.1, 0.05]")
        rows = run_scenario(cfg)
        assert [row["g"] for row in rows] == [0.2, 0.1, 0.05]

    def test_linspace_range(self):
        cfg = parse_config("scenario: weak-value\ng: {start: 0.1, stop: 0.3, num: 3}")
        assert cfg.params["g"] == pytest.approx([0.1, 0.2, 0.3])

    def test_amplitudes_normalized_with_warning(self):
        with pytest.warns(UserWarning, match="normalized"):
            cfg = parse_config("scenario: weak-value\npsi: [3, 4]")
        assert np.linalg.norm(cfg.params["psi"]) == pytest.approx(1.0)

    def test_yaml_syntax_error_carries_line(self):
        with pytest.raises(ConfigError, match="line"):
            parse_config("scenario: weak-value\n  bad indent: [")

    def test_complex_entries_as_pairs(self):
        cfg = parse_config("scenario: weak-value\nphi: [[0.70710678118654746, 0], "
                           "[0, 0.70710678118654746]]")
        np.testing.assert_allclose(cfg.params["phi"], [1 / np.sqrt(2), 1j / np.sqrt(2)],
                                   atol=1e-12)

    def test_matrix_literal_must_be_hermitian(self):
        with pytest.raises(ConfigError, match="Hermitian"):
            parse_config("scenario: weak-value\nobservable: [[0, 1], [0, 0]]")

    def test_modular_needs_nonzero_beta(self):
        with pytest.raises(ConfigError, match="beta"):
            parse_config("scenario: modular-value\nmeter: {kind: qubit, alpha: 1, beta: 0}")

    def test_bad_seed(self):
        with pytest.raises(ConfigError, match="seed"):
            parse_config("scenario: weak-value\nseed: soon")
        with pytest.raises(ConfigError, match="seed"):
            parse_config("scenario: weak-value\nseed: true")

    def test_output_block(self):
        cfg = parse_config("scenario: weak-value\noutput: {format: json, path: out.json}")
        assert cfg.output_format == "json"
        assert cfg.output_path == "out.json"

    def test_completeness_dims_validation(self):
        with pytest.raises(ConfigError, match="dims"):
            parse_config("scenario: completeness\ndims: [[2, 1]]")

    def test_time_machine_coefficient_sum(self):
        with pytest.raises(ConfigError, match="coefficients"):
            parse_config("scenario: time-machine\ncoefficients: [2, -0.5]\ndurations: [1, 2]")

    @pytest.mark.parametrize("kind", KINDS)
    def test_template_round_trip(self, kind):
        template = scenario_template(kind)
        reparsed = parse_config(yaml.safe_dump(template))
        direct = parse_config_mapping(template)
        assert reparsed.kind == direct.kind == kind
        rows_a = run_scenario(reparsed) if kind != "pointer-shift" else None
        rows_b = run_scenario(direct) if kind != "pointer-shift" else None
        if rows_a is not None:
            assert rows_a == rows_b


class TestRunScenario:
    def test_weak_value_amplification_row(self):
        rows = run_scenario(parse_config_mapping(scenario_template("weak-value")))
        assert all(row["value_re"] == pytest.approx(2.0, abs=1e-12) for row in rows)
        assert all(row["value_im"] == pytest.approx(0.0, abs=1e-12) for row in rows)
        assert all(row["residual"] <= TOLERANCES["weak-value"] for row in rows)
        assert all(row["oracle_ok"] for row in rows)

    def test_modular_value_quarter_turn_row(self):
        rows = run_scenario(parse_config_mapping(scenario_template("modular-value")))
        quarter = [row for row in rows if row["g"] == pytest.approx(np.pi / 2)]
        assert quarter and quarter[0]["value_im"] == pytest.approx(-2.0, abs=1e-12)

    def test_potent_values_rows_are_meter_weighted(self):
        cfg = parse_config_mapping(scenario_template("potent-values"))
        rows = run_scenario(cfg)
        assert [row["k"] for row in rows] == [0, 1]
        assert rows[0]["value_re"] == pytest.approx(0.6, abs=1e-12)
        from potentops import PrePostSelection, modular_value
        from potentops.pauli import AMPLIFICATION_PHI, AMPLIFICATION_PSI, SIGMA_Z

        m = modular_value(SIGMA_Z, 1.0,
                          PrePostSelection(AMPLIFICATION_PSI, AMPLIFICATION_PHI))
        assert rows[1]["value_re"] + 1j * rows[1]["value_im"] == pytest.approx(0.8 * m,
                                                                               abs=1e-12)

    def test_time_machine_preset_row(self):
        rows = run_scenario(parse_config_mapping(scenario_template("time-machine")))
        (row,) = rows
        assert row["t_prime"] == pytest.approx(0.0, abs=1e-15)
        assert row["fidelity"] == pytest.approx(1.0, abs=1e-12)
        assert row["residual"] <= TOLERANCES["time-machine"]

    def test_completeness_small_grid(self):
        cfg = parse_config("scenario: completeness\ndims: [[2, 3]]\ncount: 5\nseed: 9")
        rows = run_scenario(cfg)
        assert len(rows) == 5
        assert all(row["residual"] <= 1e-10 for row in rows)

    def test_conditional_rows(self):
        cfg = parse_config("scenario: conditional\ncount: 5\nseed: 3")
        rows = run_scenario(cfg)
        assert len(rows) == 10
        assert {row["variant"] for row in rows} == {"system", "apparatus"}
        assert all(row["residual"] <= TOLERANCES["conditional"] for row in rows)

    def test_determinism_same_seed(self):
        cfg = parse_config("scenario: conditional\ncount: 4\nseed: 11")
        assert run_scenario(cfg) == run_scenario(cfg)

    def test_different_seed_changes_rows(self):
        a = run_scenario(parse_config("scenario: completeness\ndims: [[2, 2]]\ncount: 3\nseed: 1"))
        b = run_scenario(parse_config("scenario: completeness\ndims: [[2, 2]]\ncount: 3\nseed: 2"))
        assert a != b


class TestEmission:
    def test_documented_weak_value_header(self):
        rows = run_scenario(parse_config("scenario: weak-value\ng: [0.1]"))
        text = format_rows(rows, "csv", COLUMNS["weak-value"])
        assert text.splitlines()[0] == "scenario,g,value_re,value_im,prob_exact,residual"
        assert text.endswith("\n") and "\r" not in text

    def test_json_matches_csv_values(self):
        rows = run_scenario(parse_config("scenario: weak-value\ng: [0.1]"))
        payload = json.loads(format_rows(rows, "json", COLUMNS["weak-value"]))
        assert payload[0]["value_re"] == rows[0]["value_re"]
        assert list(payload[0]) == list(COLUMNS["weak-value"])

    def test_empty_rows_error_and_no_file(self, tmp_path):
        target = tmp_path / "never.csv"
        with pytest.raises(ValueError, match="no rows"):
            emit_results([], "csv", str(target), COLUMNS["weak-value"])
        assert not target.exists()

    def test_byte_identical_files(self, tmp_path):
        cfg = parse_config("scenario: conditional\ncount: 3\nseed: 5")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_results(run_scenario(cfg), "csv", str(a), COLUMNS["conditional"])
        emit_results(run_scenario(cfg), "csv", str(b), COLUMNS["conditional"])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_format(self):
        rows = run_scenario(parse_config("scenario: weak-value\ng: [0.1]"))
        with pytest.raises(ValueError, match="format"):
            format_rows(rows, "xml", COLUMNS["weak-value"])


class TestSweep:
    def test_cartesian_grid(self):
        text = """
base:
  scenario: modular-value
  g: [0.3]
sweep:
  g: [0.1, 0.2]
  seed: [0, 1]
"""
        base, sweep = parse_sweep_document(text)
        rows, kind = run_sweep(base, sweep)
        assert kind == "modular-value"
        assert [(row["point"], row["g"]) for row in rows] == [
            (0, 0.1), (1, 0.1), (2, 0.2), (3, 0.2)]

    def test_dotted_override(self):
        text = """
base:
  scenario: potent-values
  g: [0.5]
sweep:
  meter.alpha: [0.6]
  meter.beta: [0.8]
"""
        base, sweep = parse_sweep_document(text)
        rows, _ = run_sweep(base, sweep)
        assert rows[0]["value_re"] == pytest.approx(0.6, abs=1e-12)

    def test_rejects_bad_shape(self):
        with pytest.raises(ConfigError, match="sweep"):
            parse_sweep_document("base: {scenario: weak-value}\nsweep: {}")


class TestVerificationSuite:
    def test_all_checks_pass(self):
        rows = verification_suite(seed=0)
        assert len(rows) >= 15
        for row in rows:
            assert row["residual"] <= row["tolerance"], row["check"]

    def test_deterministic(self):
        assert verification_suite(seed=7) == verification_suite(seed=7)
