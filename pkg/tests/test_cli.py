"""Config parsing, report emission, determinism, and the command line surface."""

import json
import math

import pytest

import pinchlab as pl
from pinchlab.cli import main, summary_text

CSV_HEADER = "t,r,area,H,grad_w,F,G,dF_fd,dF_cf,dG_fd,dG_cf,cap,cap_ratio_to_exp_t,gb,willmore,holder_gap"

MINIMAL = '{"model": {"kind": "flat"}, "scenario": "solve"}'


def _cfg(**overrides):
    raw = {"model": {"kind": "flat"}, "scenario": "solve"}
    raw.update(overrides)
    return pl.parse_config(json.dumps(raw))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def test_parse_minimal_defaults():
    config = pl.parse_config(MINIMAL)
    assert config.model == {"kind": "flat"}
    assert config.scenario == "solve"
    assert config.p == "auto"
    assert config.r0 == 1.0 and config.r_max is None
    assert config.n_grid == 4096 and config.n_levels == 64
    assert config.format == "csv" and config.out is None
    assert config.seed == 0 and config.margin == 0.5 and config.eps is None
    assert config.tolerance("capacity") == 1e-6
    assert config.tolerance("identity") == 1e-10


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("not json", "malformed JSON"),
        ("[1, 2]", "top-level"),
        ('{"scenario": "solve"}', "model"),
        ('{"model": {"kind": "flat"}}', "scenario"),
        ('{"model": {"kind": "flat"}, "scenario": "solve", "zzz": 1}', "unknown keys"),
        ('{"model": {"kind": "torus"}, "scenario": "solve"}', "unknown model kind"),
        ('{"model": {"kind": "flat", "a": 1}, "scenario": "solve"}', "unknown parameters"),
        ('{"model": {"kind": "flat"}, "scenario": "dance"}', "unknown scenario"),
        ('{"model": {"kind": "flat"}, "scenario": "solve", "p": 2.0}', r"\(1, 2\)"),
        ('{"model": {"kind": "flat"}, "scenario": "solve", "r0": -1}', "r0"),
        ('{"model": {"kind": "flat"}, "scenario": "solve", "n_grid": 4096.5}', "integer"),
        ('{"model": {"kind": "flat"}, "scenario": "solve", "n_grid": 8}', "at least 16"),
        ('{"model": {"kind": "flat"}, "scenario": "solve", "eps": 0.5}', "eps"),
        (
            '{"model": {"kind": "flat"}, "scenario": "solve", "tolerances": {"bogus": 1e-3}}',
            "unknown tolerance",
        ),
        (
            '{"model": {"kind": "flat"}, "scenario": "solve", "tolerances": {"capacity": -1}}',
            "positive",
        ),
        ('{"model": {"kind": "flat"}, "scenario": "solve", "format": "xml"}', "format"),
    ],
)
def test_parse_rejections(text, fragment):
    with pytest.raises(pl.ConfigError, match=fragment):
        pl.parse_config(text)


def test_parser_accepts_wide_cone():
    # a = 1.2 is a perfectly valid *parse*; its geometry is flagged later by
    # the pinching analysis, not by the config layer.
    config = _cfg(model={"kind": "cone", "a": 1.2})
    model = pl.build_model(config.model)
    assert not pl.pinching_margin(model).nonneg_ricci


def test_build_model_maps_geometry_errors_to_config_errors():
    with pytest.raises(pl.ConfigError, match="model"):
        pl.build_model({"kind": "cone", "a": -1.0})


def test_serialize_round_trip():
    config = _cfg(
        p=1.5,
        n_grid=512,
        tolerances={"capacity": 1e-5},
        model={"kind": "power_warp", "alpha": 1.5},
        seed=7,
    )
    assert pl.parse_config(pl.serialize(config)) == config


# ---------------------------------------------------------------------------
# running scenarios through the front door
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def solve_report():
    return pl.run(pl.parse_config(json.dumps({
        "model": {"kind": "flat"},
        "scenario": "solve",
        "p": 1.5,
        "n_grid": 1024,
        "n_levels": 8,
    })))


def test_run_solve_flat(solve_report):
    report = solve_report
    assert report.columns == pl.ROW_COLUMNS
    assert len(report.rows) == 8
    assert all(v.status == "pass" for v in report.verdicts)
    assert report.failed_hypothesis is None
    assert report.config["p_resolved"] == 1.5
    first = report.rows[0]
    assert abs(first["F"] - 4.0 * math.pi) < 1e-8
    assert abs(first["cap_ratio_to_exp_t"] - 1.0) < 1e-9


def test_run_monotone_has_derivative_audit():
    report = pl.run(pl.parse_config(json.dumps({
        "model": {"kind": "power_warp", "alpha": 1.5},
        "scenario": "monotone",
        "p": 1.5,
        "n_grid": 1024,
        "n_levels": 8,
    })))
    names = [v.name for v in report.verdicts]
    assert "monotone-F" in names and "monotone-G" in names
    assert "derivative-match" in names
    assert report.verdict("monotone-F").status == "pass"
    assert abs(report.constants["c_F"] - 1.0) < 1e-6


def test_run_check_identities():
    report = pl.run(pl.parse_config(json.dumps({
        "model": {"kind": "spline_cap", "k": 0.5},
        "scenario": "check-identities",
        "n_grid": 256,
    })))
    assert report.rows == []
    for name in ("gauss-identity", "gauss-bonnet", "umbilicity", "pinching-survey"):
        assert report.verdict(name).status == "pass", name


def test_run_willmore_expansion():
    report = pl.run(pl.parse_config(json.dumps({
        "model": {"kind": "positive_cap", "k": 1.0},
        "scenario": "willmore-expansion",
    })))
    assert report.verdict("willmore-expansion").status == "pass"
    assert report.constants["willmore_deviation"] < 0.02


def test_run_contradict_echoes_stage_options():
    report = pl.run(pl.parse_config(json.dumps({
        "model": {"kind": "cone", "a": 0.8},
        "scenario": "contradict",
        "p": 1.5,
        "n_grid": 1024,
        "n_levels": 16,
    })))
    assert report.failed_hypothesis == "pinching"
    assert report.config["stage_options"]["n_grid"] == 1024


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def test_emit_csv_layout(solve_report, tmp_path):
    out = tmp_path / "run.csv"
    written = pl.emit(solve_report, "csv", str(out))
    assert written == [str(out), str(tmp_path / "run.verdicts.json")]
    data = out.read_bytes()
    assert b"\r" not in data
    lines = data.decode("utf-8").splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 8
    # 17 significant digits survive a float round-trip exactly
    cell = lines[1].split(",")[5]
    assert float(cell) == solve_report.rows[0]["F"]
    verdicts = json.loads((tmp_path / "run.verdicts.json").read_text())
    assert {v["name"] for v in verdicts["verdicts"]} >= {"solve", "capacity-law"}
    assert all(v["reason"] for v in verdicts["verdicts"])


def test_emit_is_deterministic(tmp_path):
    cfg = json.dumps({
        "model": {"kind": "power_warp", "alpha": 1.5},
        "scenario": "solve",
        "p": 1.5,
        "n_grid": 512,
        "n_levels": 6,
    })
    blobs = []
    for tag in ("a", "b"):
        report = pl.run(pl.parse_config(cfg))
        out = tmp_path / f"{tag}.csv"
        pl.emit(report, "csv", str(out))
        blobs.append(out.read_bytes() + (tmp_path / f"{tag}.verdicts.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_emit_json_is_clean(solve_report, tmp_path):
    out = tmp_path / "run.json"
    assert pl.emit(solve_report, "json", str(out)) == [str(out)]
    text = out.read_text()
    assert "NaN" not in text and "Infinity" not in text
    doc = json.loads(text)
    assert list(doc) == sorted(doc)
    assert doc["failed_hypothesis"] is None
    assert len(doc["rows"]) == 8


def test_emit_summary(solve_report):
    text = pl.emit(solve_report, "csv", None)
    assert text == summary_text(solve_report)
    assert "[PASS] solve:" in text
    assert "scenario: solve" in text


def test_emit_format_guard(solve_report):
    with pytest.raises(pl.ConfigError):
        pl.emit(solve_report, "xml", None)


# ---------------------------------------------------------------------------
# command line entry point
# ---------------------------------------------------------------------------


def test_main_with_library_model(capsys):
    assert main(["check", "--model", "spline_cap_0.5", "--grid-n", "256"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] gauss-identity" in out


def test_main_with_config_and_flags(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "model": {"kind": "flat"},
        "scenario": "solve",
        "p": 1.5,
        "n_levels": 4,
    }))
    out_path = tmp_path / "flat.csv"
    code = main([
        "solve", "--config", str(cfg_path), "--grid-n", "512",
        "--tol", "capacity=1e-5", "--out", str(out_path),
    ])
    assert code == 0
    assert out_path.exists()
    assert f"wrote {out_path}" in capsys.readouterr().out


def test_main_report_subcommand_keeps_config_scenario(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "model": {"kind": "flat"},
        "scenario": "check-identities",
        "n_grid": 256,
    }))
    assert main(["report", "--config", str(cfg_path)]) == 0
    assert "scenario: check-identities" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["solve", "--model", "nope"], "unknown library model"),
        (["solve", "--model", "flat", "--p", "2.0"], "--p"),
        (["solve", "--model", "flat", "--tol", "capacity"], "NAME=VALUE"),
        (["solve", "--model", "flat", "--tol", "bogus=1"], "unknown tolerance"),
        (["report", "--model", "flat"], "needs --config"),
        (["solve"], "either --config or --model"),
    ],
)
def test_main_error_paths(argv, fragment, capsys):
    assert main(argv) == 2
    assert fragment in capsys.readouterr().err


def test_main_rejects_unreadable_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["solve", "--config", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
