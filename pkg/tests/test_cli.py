"""End-to-end command line checks, run in process through ``main(argv)``."""

import json
import os

import numpy as np
import pytest

from plcc.cli import main
from plcc.errors import EstimationFailed
from plcc.fileio import sha256_file

GEN_CFG = """
length = 1024
seed = 4040
spec.d1 = 0.3
spec.d3 = 0.3
sigma.13 = 0.5
"""


@pytest.fixture(autouse=True)
def _no_ambient_seed(monkeypatch):
    monkeypatch.delenv("PLCC_SEED", raising=False)


def _write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture()
def pair_csv(tmp_path):
    cfg = _write(tmp_path / "gen.cfg", GEN_CFG)
    out = str(tmp_path / "pair.csv")
    assert main(["generate", cfg, "--out", out]) == 0
    return out


# =========================================================================
# generate
# =========================================================================


def test_generate_writes_csv_and_sidecar(tmp_path, capsys):
    cfg = _write(tmp_path / "g.cfg", GEN_CFG)
    out = str(tmp_path / "p.csv")
    assert main(["generate", cfg, "--out", out]) == 0
    assert "wrote" in capsys.readouterr().out
    lines = open(out).read().splitlines()
    assert lines[0] == "t,x,y"
    assert len(lines) == 1025
    assert lines[1].startswith("0,")
    sidecar = json.load(open(out + ".manifest.json"))
    assert sidecar["subcommand"] == "generate"
    assert sidecar["seeds"] == 4040
    assert sidecar["outputs"] == {out: sha256_file(out)}
    assert sidecar["parameters"]["spec"]["d1"] == 0.3


def test_generate_deterministic(tmp_path):
    cfg = _write(tmp_path / "g.cfg", GEN_CFG)
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["generate", cfg, "--out", a]) == 0
    assert main(["generate", cfg, "--out", b]) == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_generate_single_series_output(tmp_path):
    cfg = _write(tmp_path / "g.cfg", "length = 512\nseed = 1\noutput = x\n")
    out = str(tmp_path / "x.csv")
    assert main(["generate", cfg, "--out", out]) == 0
    assert open(out).readline().strip() == "t,x"


def test_seed_precedence(tmp_path, monkeypatch):
    cfg_noseed = _write(tmp_path / "g.cfg", "length = 512\nspec.d1 = 0.2\n")
    out_env = str(tmp_path / "env.csv")
    out_flag = str(tmp_path / "flag.csv")
    out_ref = str(tmp_path / "ref.csv")

    monkeypatch.setenv("PLCC_SEED", "321")
    assert main(["generate", cfg_noseed, "--out", out_env]) == 0
    # the flag beats the environment
    assert main(["generate", cfg_noseed, "--out", out_flag, "--seed", "99"]) == 0
    monkeypatch.delenv("PLCC_SEED")
    assert main(["generate", cfg_noseed, "--out", out_ref, "--seed", "321"]) == 0

    assert open(out_env, "rb").read() == open(out_ref, "rb").read()
    assert open(out_flag, "rb").read() != open(out_ref, "rb").read()


def test_generate_usage_errors(tmp_path, capsys, monkeypatch):
    missing_seed = _write(tmp_path / "a.cfg", "length = 512\n")
    assert main(["generate", missing_seed, "--out", str(tmp_path / "o.csv")]) == 2
    assert "seed is required" in capsys.readouterr().err

    unknown = _write(tmp_path / "b.cfg", "length = 512\nseed = 1\nspam = 2\n")
    assert main(["generate", unknown, "--out", str(tmp_path / "o.csv")]) == 2
    assert "unknown keys: spam" in capsys.readouterr().err

    bad_d = _write(tmp_path / "c.cfg", "length = 512\nseed = 1\nspec.d1 = 0.7\n")
    assert main(["generate", bad_d, "--out", str(tmp_path / "o.csv")]) == 2
    err = capsys.readouterr().err
    assert "d1 = 0.7" in err and "(-0.5, 0.5)" in err

    monkeypatch.setenv("PLCC_SEED", "not-a-number")
    assert main(["generate", missing_seed, "--out", str(tmp_path / "o.csv")]) == 2
    assert "PLCC_SEED" in capsys.readouterr().err


def test_missing_files_exit_3(tmp_path, capsys):
    assert main(["generate", str(tmp_path / "nope.cfg"), "--out", "o.csv"]) == 3
    assert main(["dfa", str(tmp_path / "nope.csv")]) == 3
    assert main(["replay", str(tmp_path / "nope.manifest.json")]) == 3
    assert "error" in capsys.readouterr().err


# =========================================================================
# analyses
# =========================================================================


def test_dfa_result_document(tmp_path, capsys):
    cfg = _write(tmp_path / "g.cfg", "length = 2048\nseed = 11\noutput = x\nspec.d1 = 0.3\n")
    series = str(tmp_path / "x.csv")
    assert main(["generate", cfg, "--out", series]) == 0
    out = str(tmp_path / "fit.json")
    assert main(["dfa", series, "--out", out]) == 0
    assert f"dfa: wrote {out}" in capsys.readouterr().out
    doc = json.load(open(out))
    assert doc["subcommand"] == "dfa"
    assert 0.5 < doc["estimate"] < 1.1
    assert doc["stderr"] >= 0.0
    assert 0.0 <= doc["r2"] <= 1.0
    assert doc["scales"] == sorted(doc["scales"])
    assert len(doc["values"]) == len(doc["scales"])
    assert doc["plot"]["abscissa"] == [float(s) for s in doc["scales"]]
    assert len(doc["plot"]["fit"]) == len(doc["scales"])
    man = doc["manifest"]
    assert man["subcommand"] == "dfa"
    assert man["parameters"]["scale_grid"] == doc["scales"]
    assert man["inputs"] == {series: sha256_file(series)}


def test_default_output_name(tmp_path, pair_csv):
    assert main(["dcca", pair_csv]) == 0
    stem = os.path.splitext(pair_csv)[0]
    assert os.path.exists(f"{stem}.dcca.json")


def test_wrong_arity_inputs(tmp_path, pair_csv, capsys):
    assert main(["dfa", pair_csv]) == 2
    assert "single-series" in capsys.readouterr().err
    cfg = _write(tmp_path / "g.cfg", "length = 512\nseed = 1\noutput = x\n")
    single = str(tmp_path / "single.csv")
    assert main(["generate", cfg, "--out", single]) == 0
    assert main(["dcca", single]) == 2
    assert "pair file" in capsys.readouterr().err


def test_min_rows_gate(tmp_path, capsys):
    cfg = _write(tmp_path / "g.cfg", "length = 192\nseed = 1\noutput = x\n")
    short = str(tmp_path / "short.csv")
    assert main(["generate", cfg, "--out", short]) == 0
    assert main(["dfa", short]) == 2
    assert "below the minimum 256" in capsys.readouterr().err
    assert main(["dfa", short, "--min-rows", "128", "--out", str(tmp_path / "f.json")]) == 0


def test_scales_flag(tmp_path, pair_csv, capsys):
    out = str(tmp_path / "r.json")
    assert main(["rho", pair_csv, "--scales", "16:128:8", "--out", out]) == 0
    doc = json.load(open(out))
    assert doc["scales"][0] >= 16 and doc["scales"][-1] <= 128
    assert doc["estimate"] == pytest.approx(np.median(doc["values"]))

    assert main(["rho", pair_csv, "--scales", "128:16:8"]) == 2
    assert main(["rho", pair_csv, "--scales", "16:128:3"]) == 2
    assert main(["rho", pair_csv, "--scales", "16:128"]) == 2
    assert main(["rho", pair_csv, "--scales", "a:b:c"]) == 2
    assert "scales" in capsys.readouterr().err


def test_beta_midrange_estimate(tmp_path, pair_csv):
    out = str(tmp_path / "b.json")
    assert main(["beta", pair_csv, "--out", out]) == 0
    doc = json.load(open(out))
    k = len(doc["values"])
    mid = doc["values"][k // 4 : k - k // 4]
    assert doc["estimate"] == pytest.approx(np.median(mid))
    assert doc["diagnostics"]["mid_scales"][0] >= doc["scales"][0]


def test_coherency_document(tmp_path, pair_csv):
    out = str(tmp_path / "c.json")
    assert main(["coherency", pair_csv, "--bandwidth", "21", "--out", out]) == 0
    doc = json.load(open(out))
    assert doc["diagnostics"]["bandwidth"] == 21
    assert all(0.0 <= v <= 1.0 for v in doc["values"])
    assert main(["coherency", pair_csv, "--bandwidth", "8"]) == 2


def test_report_document(tmp_path, pair_csv):
    out = str(tmp_path / "rep.json")
    code = main(["report", pair_csv, "--out", out])
    doc = json.load(open(out))
    assert set(doc["channels"]) == {"h_x", "h_y", "h_xy", "h_rho_freq", "h_rho_time"}
    assert doc["channels"]["h_x"]["estimate"] > 0.5
    if code == 0:
        assert doc["regime"] in ("standard", "anti-cointegration", "infeasible-flag")
    else:
        assert code == 4 and "error" in doc
    assert doc["manifest"]["parameters"]["tolerance"] == 0.05


def test_estimation_failure_writes_partial_document(tmp_path, pair_csv, capsys, monkeypatch):
    import plcc.cli as climod

    def boom(*a, **k):
        raise EstimationFailed("no usable scaling range")

    monkeypatch.setattr(climod, "_fit_scaling", boom)
    out = str(tmp_path / "partial.json")
    assert main(["dcca", pair_csv, "--out", out]) == 4
    assert "partial result written" in capsys.readouterr().err
    doc = json.load(open(out))
    assert doc["error"] == "no usable scaling range"
    assert doc["estimate"] is None
    assert doc["values"]  # the curve itself was still recorded
    # the sidecar still captures the partial output's digest
    sidecar = json.load(open(out + ".manifest.json"))
    assert sidecar["outputs"] == {out: sha256_file(out)}


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("plcc ")


# =========================================================================
# replay
# =========================================================================


def test_replay_generate_and_analysis(tmp_path, capsys):
    cfg = _write(tmp_path / "g.cfg", GEN_CFG)
    series = str(tmp_path / "pair.csv")
    assert main(["generate", cfg, "--out", series]) == 0
    fit = str(tmp_path / "fit.json")
    assert main(["dcca", series, "--out", fit]) == 0
    capsys.readouterr()

    for target in (series, fit):
        before = open(target, "rb").read()
        assert main(["replay", f"{target}.manifest.json"]) == 0
        assert open(target, "rb").read() == before
        assert "replay ok: 1 recorded output(s) byte-identical" in capsys.readouterr().out


def test_replay_detects_changed_input(tmp_path, capsys):
    cfg = _write(tmp_path / "g.cfg", GEN_CFG)
    series = str(tmp_path / "pair.csv")
    assert main(["generate", cfg, "--out", series]) == 0
    fit = str(tmp_path / "fit.json")
    assert main(["dcca", series, "--out", fit]) == 0
    # corrupt the input series after the run
    with open(series, "a") as fh:
        fh.write("1024,0.0,0.0\n")
    assert main(["replay", f"{fit}.manifest.json"]) == 2
    assert "content changed since the manifest was written" in capsys.readouterr().err


def test_replay_detects_tampered_record(tmp_path, capsys):
    cfg = _write(tmp_path / "g.cfg", GEN_CFG)
    series = str(tmp_path / "pair.csv")
    assert main(["generate", cfg, "--out", series]) == 0
    sidecar_path = f"{series}.manifest.json"
    doc = json.load(open(sidecar_path))
    doc["outputs"][series] = "0" * 64
    with open(sidecar_path, "w") as fh:
        json.dump(doc, fh)
    assert main(["replay", sidecar_path]) == 1
    assert "replay outputs differ" in capsys.readouterr().err


# =========================================================================
# mc
# =========================================================================

MC_SINGLE_CFG = """
mc.lengths = 512
mc.replications = 3
mc.estimators = dfa, dcca
mc.master_seed = 71
mc.label = smoke
spec.d1 = 0.2
spec.d3 = 0.2
sigma.13 = 0.5
"""


def test_mc_single_experiment(tmp_path, capsys):
    cfg = _write(tmp_path / "mc.cfg", MC_SINGLE_CFG)
    out_dir = str(tmp_path / "runs")
    assert main(["mc", cfg, "--out-dir", out_dir]) == 0
    assert "max gap" in capsys.readouterr().out
    res = json.load(open(os.path.join(out_dir, "smoke.json")))
    assert res["label"] == "smoke"
    assert res["replications"] == 3
    assert {c["measurement"] for c in res["cells"]} == {"dfa_hx", "dfa_hy", "dcca_hxy"}
    summary = json.load(open(os.path.join(out_dir, "summary.json")))
    assert summary["tolerance"] == 0.05
    assert [r["label"] for r in summary["rows"]] == ["smoke"]
    # each output carries the same sidecar listing every output digest
    side = json.load(open(os.path.join(out_dir, "smoke.json.manifest.json")))
    assert set(side["outputs"]) == {
        os.path.join(out_dir, "smoke.json"),
        os.path.join(out_dir, "summary.json"),
    }
    for path, digest in side["outputs"].items():
        assert sha256_file(path) == digest


def test_mc_config_errors(tmp_path, capsys):
    missing = _write(tmp_path / "m1.cfg", "mc.lengths = 512\nmc.replications = 3\n")
    assert main(["mc", missing, "--out-dir", str(tmp_path / "o")]) == 2
    assert "mc.estimators" in capsys.readouterr().err

    stray = _write(tmp_path / "m2.cfg", "mc.suite = standard-regimes\nspec.d1 = 0.3\n")
    assert main(["mc", stray, "--out-dir", str(tmp_path / "o")]) == 2
    assert "suite mode ignores spec keys" in capsys.readouterr().err

    unknown = _write(tmp_path / "m3.cfg", MC_SINGLE_CFG + "mc.bogus = 1\n")
    assert main(["mc", unknown, "--out-dir", str(tmp_path / "o")]) == 2
    assert "unknown keys: mc.bogus" in capsys.readouterr().err

    bad_est = _write(
        tmp_path / "m4.cfg",
        "mc.lengths = 512\nmc.replications = 3\nmc.estimators = dfa, mystery\nmc.master_seed = 1\n",
    )
    assert main(["mc", bad_est, "--out-dir", str(tmp_path / "o")]) == 2
    assert "mystery" in capsys.readouterr().err


def test_mc_suite_replay_identical_across_jobs(tmp_path):
    cfg = _write(
        tmp_path / "suite.cfg",
        "mc.suite = standard-regimes\nmc.length = 1024\nmc.replications = 2\nmc.master_seed = 909\n",
    )
    out_dir = str(tmp_path / "suite")
    assert main(["mc", cfg, "--out-dir", out_dir, "--jobs", "1"]) == 0
    names = sorted(os.listdir(out_dir))
    assert "summary.json" in names
    assert "independent.json" in names
    summary = json.load(open(os.path.join(out_dir, "summary.json")))
    assert ["independent", 1024] in summary["unmeasured"]

    before = {n: open(os.path.join(out_dir, n), "rb").read() for n in names}
    # replay with a different worker count must reproduce every byte
    assert main(["replay", os.path.join(out_dir, "summary.json.manifest.json"), "--jobs", "4"]) == 0
    after = {n: open(os.path.join(out_dir, n), "rb").read() for n in names}
    assert after == before
