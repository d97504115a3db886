import json

import numpy as np
import pytest
import yaml

from dcelab.cli import main
from dcelab.config import ConfigError, load_config
from dcelab.output import read_table, write_table


def write_cfg(tmp_path, doc, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


def run(tmp_path, subcommand, doc, *extra):
    cfg = write_cfg(tmp_path, doc)
    out = tmp_path / "out"
    return main([subcommand, "--config", str(cfg), "--out", str(out), *extra]), out


SPECTRUM_DOC = {"squid": {"chi0": 0.0, "b0L": 1.0e6, "b0R": 1.0e6, "n_max": 4}}

STATIC_DOC = {
    "cavity": {"length": 3.141592653589793, "n_modes": 5},
    "trajectory": {"type": "static", "t_end": 4.0},
    "bogoliubov": {"n_times": 9},
}

OTTO_DOC = {
    "otto": {"length": 3.141592653589793, "epsilon": 0.01, "beta_A": 6.0,
             "beta_C": 2.0, "n_modes": 12,
             "tau_min": 5.0, "tau_max": 300.0, "n_tau": 4},
}


class TestConfigValidation:
    def test_unknown_block_rejected(self, tmp_path):
        path = write_cfg(tmp_path, {"cavities": {"length": 1.0}})
        with pytest.raises(ConfigError, match="cavities"):
            load_config(path)

    def test_unknown_key_names_the_path(self, tmp_path):
        path = write_cfg(tmp_path, {"cavity": {"length": 1.0, "n_modes": 4,
                                               "typo_key": 1}})
        with pytest.raises(ConfigError, match=r"\$\.cavity.*typo_key"):
            load_config(path)

    def test_syntax_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("cavity:\n  length: [1.0\n")
        with pytest.raises(ConfigError, match="line"):
            load_config(path)

    def test_wrong_type_names_the_field(self, tmp_path):
        path = write_cfg(tmp_path, {"squid": {"chi0": 0.0, "b0L": "big",
                                              "b0R": 1.0, "n_max": 2}})
        with pytest.raises(ConfigError, match=r"\$\.squid\.b0L"):
            load_config(path)

    def test_unsigned_exponent_floats_parse(self, tmp_path):
        # YAML 1.1 would read 1.0e6 as a string; the loader must not
        path = tmp_path / "exp.yaml"
        path.write_text("squid: {chi0: 0.0, b0L: 1.0e6, b0R: 1e6, n_max: 2}\n")
        cfg = load_config(path)
        assert cfg["squid"]["b0L"] == 1.0e6
        assert cfg["squid"]["b0R"] == 1.0e6

    def test_top_level_must_be_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_config(path)

    def test_empty_file_is_empty_config(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_config(path) == {}


class TestExitCodes:
    def test_unknown_key_exits_2(self, tmp_path):
        doc = {"squid": {"chi0": 0.0, "b0L": 1.0, "b0R": 1.0, "n_max": 2,
                         "oops": 3}}
        code, _ = run(tmp_path, "spectrum", doc)
        assert code == 2

    def test_missing_block_exits_2(self, tmp_path):
        code, _ = run(tmp_path, "spectrum", {"cavity": {"length": 1.0,
                                                        "n_modes": 2}})
        assert code == 2

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["spectrum", "--config", str(tmp_path / "nope.yaml")]) == 2

    def test_superluminal_wall_exits_3(self, tmp_path, capsys):
        doc = {"cavity": {"length": 3.141592653589793, "n_modes": 4},
               "trajectory": {"type": "harmonic", "epsilon": 0.3,
                              "omega": 2.0, "t_end": 5.0}}
        code, _ = run(tmp_path, "bogoliubov", doc)
        assert code == 3
        assert "superluminal" in capsys.readouterr().err

    def test_truncation_leak_exits_3(self, tmp_path, capsys):
        doc = {"gate": {"r": 2.5, "p_z": [0.0], "n_max": 40}}
        code, _ = run(tmp_path, "gate", doc)
        assert code == 3
        assert "enlarge n_max" in capsys.readouterr().err

    def test_success_exits_0(self, tmp_path):
        code, out = run(tmp_path, "spectrum", SPECTRUM_DOC)
        assert code == 0
        assert (out / "spectrum.csv").exists()
        assert (out / "spectrum_manifest.json").exists()


class TestTableFormats:
    def test_csv_round_trip_is_bitwise(self, tmp_path):
        rows = [[0.1, 1.0 / 3.0, -0.0], [1e-300, 2.0**-52, 12345.678901234567],
                [np.pi, -np.e, 6.02214076e23]]
        first = write_table(tmp_path / "a", ["x", "y", "z"], rows, "csv")
        header, parsed = read_table(first)
        second = write_table(tmp_path / "b", header, parsed, "csv")
        assert first.read_bytes() == second.read_bytes()

    def test_empty_sweep_gives_header_only(self, tmp_path):
        path = write_table(tmp_path / "empty", ["a", "b"], [], "csv")
        assert path.read_text() == "a,b\n"
        header, rows = read_table(path)
        assert header == ["a", "b"] and rows == []

    def test_json_mirrors_csv_values(self, tmp_path):
        rows = [[1.0 / 3.0, 2.0], [np.pi, -1e-17]]
        c = write_table(tmp_path / "t", ["u", "v"], rows, "json")
        payload = json.loads(c.read_text())
        assert payload["columns"] == ["u", "v"]
        assert payload["rows"] == rows

    def test_row_length_mismatch_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="row length"):
            write_table(tmp_path / "bad", ["a"], [[1.0, 2.0]], "csv")

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            write_table(tmp_path / "bad", ["a"], [], "xml")


class TestSpectrumRun:
    def test_roots_near_dirichlet_ladder(self, tmp_path):
        code, out = run(tmp_path, "spectrum", SPECTRUM_DOC)
        assert code == 0
        header, rows = read_table(out / "spectrum.csv")
        assert header == ["n", "kd", "phi"]
        for n, kd, _ in rows:
            assert abs(kd - n * np.pi) < 1e-4

    def test_manifest_records_provenance(self, tmp_path):
        _, out = run(tmp_path, "spectrum", SPECTRUM_DOC, "--seed", "7")
        manifest = json.loads((out / "spectrum_manifest.json").read_text())
        assert manifest["seed"] == 7
        assert manifest["outputs"] == ["spectrum.csv"]
        assert len(manifest["config_sha256"]) == 64
        assert manifest["tolerances"]["max_sine_residual"] < 1e-10
        assert set(manifest["versions"]) == {"dcelab", "numpy", "scipy", "python"}


class TestBogoliubovRun:
    def test_static_wall_beta_column_stays_numerical_zero(self, tmp_path):
        code, out = run(tmp_path, "bogoliubov", STATIC_DOC)
        assert code == 0
        header, rows = read_table(out / "occupations.csv")
        assert header[:2] == ["t", "beta_max"]
        assert header[2:] == [f"N_{k}" for k in range(1, 6)]
        assert len(rows) == 9
        for row in rows:
            assert row[1] < 1e-10
            assert max(row[2:]) < 1e-10

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_cfg(tmp_path, STATIC_DOC)
        outs = []
        for name in ("o1", "o2"):
            assert main(["bogoliubov", "--config", str(cfg),
                         "--out", str(tmp_path / name)]) == 0
            outs.append((tmp_path / name / "occupations.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_resonant_drive_populates_the_fundamental(self, tmp_path):
        doc = {"cavity": {"length": 3.141592653589793, "n_modes": 6},
               "trajectory": {"type": "harmonic", "epsilon": 0.02,
                              "omega": 2.0, "t_end": 20.0},
               "bogoliubov": {"n_times": 5}}
        code, out = run(tmp_path, "bogoliubov", doc)
        assert code == 0
        _, rows = read_table(out / "occupations.csv")
        n1 = [r[2] for r in rows]
        assert n1[0] < 1e-12 and n1[-1] > 0.01
        assert all(a <= b + 1e-12 for a, b in zip(n1, n1[1:]))


class TestMsaRun:
    def test_amplitude_columns_track_requested_pairs(self, tmp_path):
        doc = {"cavity": {"length": 3.141592653589793, "n_modes": 8},
               "msa": {"omega": 2.0, "tau_max": 0.5, "n_samples": 6,
                       "pairs": [[1, 1], [1, 3]]}}
        code, out = run(tmp_path, "msa", doc)
        assert code == 0
        header, rows = read_table(out / "slow_amplitudes.csv")
        assert header == ["tau", "abs_alpha_1_1", "abs_beta_1_1",
                          "abs_alpha_1_3", "abs_beta_1_3"]
        assert rows[0][1:] == [1.0, 0.0, 0.0, 0.0]
        # degenerate resonance: |beta_11| grows monotonically from zero
        b11 = [r[2] for r in rows]
        assert all(a < b for a, b in zip(b11, b11[1:]))
        assert rows[-1][0] == 0.5

    def test_pair_beyond_truncation_exits_2(self, tmp_path):
        doc = {"cavity": {"length": 3.141592653589793, "n_modes": 4},
               "msa": {"omega": 2.0, "pairs": [[1, 9]]}}
        code, _ = run(tmp_path, "msa", doc)
        assert code == 2


class TestMooreRun:
    def test_tables_cover_the_requested_grids(self, tmp_path):
        doc = {"cavity": {"length": 3.141592653589793, "n_modes": 4},
               "trajectory": {"type": "harmonic", "epsilon": 0.05,
                              "omega": 2.0, "t_end": 6.0},
               "moore": {"t_max": 8.0, "n_z": 7, "n_x": 5, "n_t": 3}}
        code, out = run(tmp_path, "moore", doc)
        assert code == 0
        fh, f_rows = read_table(out / "moore_function.csv")
        assert fh == ["z", "F"]
        assert len(f_rows) == 7
        # left edge of the window: F(z) = z / R0 before the wall moves
        assert abs(f_rows[0][1] - f_rows[0][0] / np.pi) < 1e-12
        eh, e_rows = read_table(out / "energy_density.csv")
        assert eh == ["x", "t", "T_tt"]
        assert len(e_rows) == 5 * 3
        # before the drive starts the density is the static Casimir value
        static = -np.pi / 24.0 / np.pi**2
        for x, t, u in e_rows[:5]:
            assert t == 0.0
            assert abs(u - static) < 1e-10


class TestOttoRun:
    def test_efficiency_approaches_compression_ratio(self, tmp_path):
        code, out = run(tmp_path, "otto", OTTO_DOC)
        assert code == 0
        header, rows = read_table(out / "otto_cycle.csv")
        assert header == ["tau_omega1", "eta", "W", "Q", "P"]
        assert abs(rows[-1][1] - 0.01) < 1e-6
        assert rows[-1][0] == 300.0

    def test_empty_sweep_gives_header_only_csv(self, tmp_path):
        doc = {"otto": {"length": 3.141592653589793, "epsilon": 0.01,
                        "beta_A": 6.0, "beta_C": 2.0, "tau_values": []}}
        code, out = run(tmp_path, "otto", doc)
        assert code == 0
        assert (out / "otto_cycle.csv").read_text() == "tau_omega1,eta,W,Q,P\n"

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        cfg = write_cfg(tmp_path, OTTO_DOC)
        blobs = []
        for name, threads in (("s", "1"), ("p", "4")):
            assert main(["otto", "--config", str(cfg), "--out",
                         str(tmp_path / name), "--threads", threads]) == 0
            blobs.append((tmp_path / name / "otto_cycle.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_tau_values_and_range_are_exclusive(self, tmp_path):
        doc = {"otto": {"length": 1.0, "epsilon": 0.01, "beta_A": 6.0,
                        "beta_C": 2.0, "tau_values": [1.0],
                        "tau_min": 1.0, "tau_max": 2.0, "n_tau": 2}}
        code, _ = run(tmp_path, "otto", doc)
        assert code == 2


class TestGateRun:
    def test_closed_form_matches_protocol_columns(self, tmp_path):
        doc = {"gate": {"r": 0.5, "p_z": [-1.0, 0.0, 0.5, 1.0], "n_max": 60}}
        code, out = run(tmp_path, "gate", doc)
        assert code == 0
        header, rows = read_table(out / "gate_fidelity.csv")
        assert header == ["p_z", "fbar_closed", "fbar_simulated",
                          "fbar_open", "purity"]
        for pz, fc, fs, fo, pur in rows:
            assert abs(fc - fs) < 1e-6
            # without a rates block the lossless limit is reported
            assert fo == fs and pur == 1.0
        assert rows[0][1] == 1.0 and rows[-1][1] == 1.0

    def test_rows_sorted_by_polarization(self, tmp_path):
        doc = {"gate": {"r": 0.4, "p_z": [0.5, -0.5, 0.0], "n_max": 40}}
        code, out = run(tmp_path, "gate", doc)
        assert code == 0
        _, rows = read_table(out / "gate_fidelity.csv")
        assert [r[0] for r in rows] == [-0.5, 0.0, 0.5]

    def test_rates_block_switches_on_the_lindblad_column(self, tmp_path):
        doc = {"gate": {"r": 0.3, "p_z": [0.5], "n_max": 24,
                        "rates": {"tau_q": 2.0e5, "tau_r": 2.0e5,
                                  "tau_phi": 1.0e4, "temperature_mK": 60.0}}}
        code, out = run(tmp_path, "gate", doc)
        assert code == 0
        _, rows = read_table(out / "gate_fidelity.csv")
        pz, fc, fs, fo, pur = rows[0]
        assert fo < fs
        assert 0.97 < pur < 1.0


class TestCrosscheckRun:
    DOC = {"cavity": {"length": 3.141592653589793, "n_modes": 16},
           "trajectory": {"type": "harmonic", "epsilon": 0.01,
                          "omega": 2.0, "t_end": 10.0}}

    def test_resonant_drive_passes_default_bounds(self, tmp_path, capsys):
        code, out = run(tmp_path, "crosscheck", self.DOC)
        assert code == 0
        stdout = capsys.readouterr().out
        assert "ode vs moore" in stdout and "ode vs msa" in stdout
        _, rows = read_table(out / "crosscheck.csv")
        assert len(rows) == 2
        for name, value, bound in rows:
            assert value <= bound

    def test_deviation_bound_is_epsilon_squared_scaled(self, tmp_path):
        _, out = run(tmp_path, "crosscheck", self.DOC)
        _, rows = read_table(out / "crosscheck.csv")
        moore_row = [r for r in rows if r[0] == "ode_vs_moore_max_dbeta"][0]
        assert moore_row[2] == 5.0 * 0.01**2

    def test_unreachable_bounds_exit_3(self, tmp_path, capsys):
        doc = dict(self.DOC)
        doc["crosscheck"] = {"beta_factor": 1e-6}
        code, _ = run(tmp_path, "crosscheck", doc)
        assert code == 3
        assert "FAIL" in capsys.readouterr().out

    def test_nonresonant_drive_is_a_physics_error(self, tmp_path, capsys):
        doc = {"cavity": self.DOC["cavity"],
               "trajectory": {"type": "harmonic", "epsilon": 0.01,
                              "omega": 2.5, "t_end": 10.0}}
        code, _ = run(tmp_path, "crosscheck", doc)
        assert code == 3
        assert "resonant" in capsys.readouterr().err


class TestOutputBlockDefaults:
    def test_config_output_block_sets_directory_and_format(self, tmp_path):
        doc = dict(SPECTRUM_DOC)
        doc["output"] = {"path": str(tmp_path / "from_cfg"), "format": "json"}
        cfg = write_cfg(tmp_path, doc)
        assert main(["spectrum", "--config", str(cfg)]) == 0
        header, rows = read_table(tmp_path / "from_cfg" / "spectrum.json")
        assert header == ["n", "kd", "phi"]
        assert len(rows) == 4

    def test_cli_flags_override_the_block(self, tmp_path):
        doc = dict(SPECTRUM_DOC)
        doc["output"] = {"path": str(tmp_path / "ignored"), "format": "json"}
        cfg = write_cfg(tmp_path, doc)
        assert main(["spectrum", "--config", str(cfg), "--out",
                     str(tmp_path / "flag"), "--format", "csv"]) == 0
        assert (tmp_path / "flag" / "spectrum.csv").exists()
        assert not (tmp_path / "ignored").exists()
