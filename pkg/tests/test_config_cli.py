import json
import math

import numpy as np
import pytest

from ifsproj import ConfigError, RunConfig
from ifsproj.cli import main
from ifsproj.config import config_from_json_dict, load_config, override

# --- config ---


def test_defaults_resolve():
    cfg = RunConfig()
    assert cfg.rho == 4.0**-4
    assert cfg.n_theta == math.ceil(4 * math.pi / cfg.rho)
    assert cfg.geometry().pitch == pytest.approx(math.pi / cfg.n_theta)
    assert cfg.delta_value() == pytest.approx(math.sqrt(cfg.rho) / 8)
    res = cfg.resolve()
    assert res.c9 == pytest.approx(math.sqrt(2.0))
    assert res.n_required >= 1
    assert res.c7 > 0 and res.c10 > 0


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(rho=1.5), "rho"),
        (dict(rho=-0.1), "rho"),
        (dict(epsilon=2.0), "epsilon"),
        (dict(n_phi=10), "n_phi"),
        (dict(seed=-1), "seed"),
        (dict(search_mode="annealing"), "search_mode"),
        (dict(theta_pitch=0.01, t_pitch=0.02), "t_pitch"),
        (dict(grid_size=0), "grid_size"),
        (dict(word_budget=0), "word_budget"),
    ],
)
def test_validation_names_offending_field(kwargs, field):
    with pytest.raises(ConfigError, match=f"^{field}"):
        RunConfig(**kwargs)


def test_nested_blocks():
    cfg = config_from_json_dict(
        {
            "ifs": "four_corner",
            "constants": {"rho": 0.05, "c1": 2.0},
            "grid": {"grid_size": 8, "n_phi": 9},
            "seed": 7,
        }
    )
    assert cfg.ifs == "four_corner" and cfg.rho == 0.05
    assert cfg.c1 == 2.0 and cfg.grid_size == 8 and cfg.n_phi == 9 and cfg.seed == 7


def test_unknown_and_duplicate_keys():
    with pytest.raises(ConfigError, match="bogus: unknown key"):
        config_from_json_dict({"bogus": 1})
    with pytest.raises(ConfigError, match="constants.q: unknown key"):
        config_from_json_dict({"constants": {"q": 1}})
    with pytest.raises(ConfigError, match="given twice"):
        config_from_json_dict({"rho": 0.1, "constants": {"rho": 0.1}})


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="no such file"):
        load_config(str(tmp_path / "absent.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(str(bad))


def test_override_drops_none():
    cfg = RunConfig()
    assert override(cfg, seed=None, rho=None) is cfg
    assert override(cfg, seed=5).seed == 5


def test_load_ifs_spec_sources(tmp_path):
    assert RunConfig(ifs="sierpinski").load_ifs_spec().alphabet == ("a", "b", "c")
    inline = RunConfig(
        ifs={
            "alphabet": ["a", "b"],
            "maps": {
                "a": {"r": 0.5, "tx": 0.0, "ty": 0.0},
                "b": {"r": 0.5, "tx": 0.5, "ty": 0.5},
            },
        }
    )
    assert inline.load_ifs_spec().part_one == ("a",)
    with pytest.raises(ConfigError, match="neither a builtin .* nor a readable file"):
        RunConfig(ifs=str(tmp_path / "absent.json")).load_ifs_spec()


def test_shipped_configs_parse():
    for name in ("sierpinski", "four_corner", "cantor_dust"):
        cfg = load_config(f"configs/{name}.json")
        cfg.load_ifs_spec()


# --- cli ---


def coarse_config(tmp_path, **extra):
    data = {
        "ifs": "four_corner",
        "constants": {"rho": 0.05},
        "grid": {"cert_resolution": 0.05, "n_theta_sample": 2, "search_budget": 3},
        "seed": 3,
        "out": str(tmp_path / "out"),
    }
    data.update(extra)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_dimension_output(capsys):
    assert main(["dimension", "--ifs", "sierpinski"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "d = 1.584962500721"
    assert out[1].startswith("OSC: satisfied")
    assert main(["dimension", "--ifs", "four_corner"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "d = 2.000000000000"


def test_dimension_reports_osc_failure(tmp_path, capsys):
    overlapping = {
        "alphabet": ["a", "b"],
        "maps": {
            "a": {"r": 0.9, "tx": 0.0, "ty": 0.0},
            "b": {"r": 0.9, "tx": 0.1, "ty": 0.1},
        },
    }
    p = tmp_path / "fat.json"
    p.write_text(json.dumps(overlapping))
    assert main(["dimension", "--ifs", str(p)]) == 0
    out = capsys.readouterr().out
    assert "OSC: not verified" in out and "a/b" in out


def test_malformed_ifs_is_config_error(tmp_path, capsys):
    spec = {
        "alphabet": ["a", "b", "c"],
        "maps": {
            "a": {"r": 0.5, "tx": 0.0, "ty": 0.0},
            "b": {"r": 0.5, "tx": 0.5, "ty": 0.0},
        },
    }
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(spec))
    assert main(["dimension", "--ifs", str(p)]) == 2
    assert "maps: missing symbol 'c'" in capsys.readouterr().err


def test_thin_system_guard(tmp_path, capsys):
    assert main(["build-l", "--ifs", "cantor_dust", "--out", str(tmp_path)]) == 2
    assert "d ≤ 1, theorem hypotheses unmet" in capsys.readouterr().err


def test_budget_exit_code(tmp_path, capsys):
    assert main(["render", "--ifs", "sierpinski", "--budget", "1", "--out", str(tmp_path)]) == 3
    assert capsys.readouterr().err != ""


def test_render_pgm(tmp_path):
    rc = main(
        ["render", "--ifs", "sierpinski", "--rho", "0.2", "--out", str(tmp_path), "--size", "32"]
    )
    assert rc == 0
    raw = (tmp_path / "attractor.pgm").read_bytes()
    header = b"P5 32 32 255\n"
    assert raw.startswith(header)
    body = np.frombuffer(raw[len(header):], dtype=np.uint8)
    assert body.size == 32 * 32
    assert set(np.unique(body)) <= {0, 255} and (body == 255).any()


def test_scan_csv_format_and_determinism(tmp_path, capsys):
    cfg = coarse_config(tmp_path, grid={"grid_size": 16})
    assert main(["scan", "--config", cfg]) == 0
    csv = tmp_path / "out" / "scan.csv"
    lines = csv.read_text().splitlines()
    assert lines[0] == "theta,l2_estimate,in_E"
    assert len(lines) == 18  # header + 16 rows + footer
    for row in lines[1:-1]:
        theta, l2, member = row.split(",")
        float(theta), float(l2)
        assert member in ("true", "false")
    assert lines[-1].startswith("# excluded_fraction,")
    first = csv.read_bytes()
    assert main(["scan", "--config", cfg]) == 0
    assert csv.read_bytes() == first
    capsys.readouterr()


def test_scan_render_flag(tmp_path, capsys):
    cfg = coarse_config(tmp_path, grid={"grid_size": 8, "raster_size": 16})
    assert main(["scan", "--config", cfg, "--render"]) == 0
    assert (tmp_path / "out" / "attractor.pgm").read_bytes().startswith(b"P5 16 16 255\n")
    capsys.readouterr()


def test_build_l_outputs(tmp_path, capsys):
    cfg = coarse_config(tmp_path)
    assert main(["build-l", "--config", cfg]) == 0
    summary = json.loads((tmp_path / "out" / "candidate.json").read_text())
    assert summary["counts"]["L0"] <= summary["counts"]["L"] <= summary["counts"]["L1"]
    assert summary["e_rows"] > 0 and summary["min_slice_measure"] > 0
    assert (tmp_path / "out" / "candidate.npz").exists()
    capsys.readouterr()


def test_search_reports_and_is_deterministic(tmp_path, capsys):
    cfg = coarse_config(tmp_path)
    assert main(["search", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "seed = 3" in out
    report_path = tmp_path / "out" / "search_report.json"
    report = json.loads(report_path.read_text())
    assert report["seed"] == 3 and report["mode"] == "iid"
    assert report["status"] in ("omega0 found", "no omega0 found")
    assert report["attempts"] <= 3
    first = report_path.read_bytes()
    assert main(["search", "--config", cfg, "--out", str(tmp_path / "out2")]) == 0
    assert (tmp_path / "out2" / "search_report.json").read_bytes() == first
    capsys.readouterr()


def test_verify_identity_assignment(tmp_path, capsys):
    cfg = coarse_config(tmp_path)
    omega = tmp_path / "omega.json"
    omega.write_text(
        json.dumps(
            {
                "a": {"phi": 0.0, "gamma": [0.0, 0.0]},
                "b": {"phi": 0.0, "gamma": [0.0, 0.0]},
            }
        )
    )
    assert main(["verify", "--config", cfg, "--omega", str(omega)]) == 0
    out = capsys.readouterr().out
    assert "recurrence:" in out
    report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
    assert report["closeness"]["epsilon_distance"] == 0.0
    assert 0.0 < report["check"]["fraction"] <= 1.0
    assert len(report["certified_intervals"]) == 2


def test_verify_rejects_bad_omega(tmp_path, capsys):
    cfg = coarse_config(tmp_path)
    assert main(["verify", "--config", cfg, "--omega", str(tmp_path / "absent.json")]) == 2
    assert "omega: no such file" in capsys.readouterr().err
    bad = tmp_path / "bad_omega.json"
    bad.write_text('{"a": {"phi": "x"}}')
    assert main(["verify", "--config", cfg, "--omega", str(bad)]) == 2
    assert "omega: malformed" in capsys.readouterr().err
    wrong = tmp_path / "wrong_domain.json"
    wrong.write_text('{"a": {"phi": 0.0, "gamma": [0.0, 0.0]}}')
    assert main(["verify", "--config", cfg, "--omega", str(wrong)]) == 2
    assert "part_one" in capsys.readouterr().err


def test_certify_full_projection(tmp_path, capsys):
    cfg = coarse_config(tmp_path)
    assert main(["certify", "--config", cfg, "--theta", "0.0"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("interval [")
    report = json.loads((tmp_path / "out" / "certify_report.json").read_text())
    assert report["certified"] and report["length"] >= 0.5
    gaps = (tmp_path / "out" / "certify_gaps.csv").read_text().splitlines()
    assert gaps[0] == "left,right,gap"
    assert gaps[-1].startswith("# interval,")
