"""Command line front end: CSV ingestion, analysis subcommands, Monte Carlo.

Exit codes are a stable contract: 0 success, 2 usage/config/validation
problems, 3 I/O failures, 4 estimation failures (a partial result document
is still written). Every invocation that writes a file also writes a
manifest sidecar ``<output>.manifest.json`` holding the fully resolved
parameters; the ``replay`` subcommand re-executes a manifest and verifies
that the regenerated outputs are byte-identical.

Seed resolution for ``generate`` and ``mc``: the ``--seed`` flag wins over
the ``PLCC_SEED`` environment variable, which wins over the config file.
``replay`` uses the seed recorded in the manifest and ignores all three.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .arfima import McArfimaSpec, generate_mc_arfima
from .detrended import (
    DetrendConfig,
    _fit_scaling,
    beta_dcca,
    dcca_fluctuation,
    default_scale_grid,
    dfa_fluctuation,
    rho_dcca,
)
from .errors import (
    EstimationFailed,
    InvalidInput,
    InvalidParameter,
    PlccError,
)
from .fileio import (
    build_manifest,
    config_float,
    config_int,
    config_str,
    fit_to_dict,
    parse_config,
    read_manifest,
    read_series_csv,
    sha256_file,
    spec_config_keys,
    spec_from_config,
    write_json,
    write_series_csv,
)
from .montecarlo import (
    ESTIMATORS,
    ExperimentConfig,
    feasibility_sweep,
    run_experiment,
    standard_regimes,
)
from .powerlaw import (
    CoherencySettings,
    _rho_decay_fit,
    coherency_report,
    h_rho_frequency,
)
from .spectral import coherency, default_n_freqs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_ESTIMATION = 4

_ANALYSES_UNIVARIATE = ("dfa",)
_ANALYSES_PAIR = ("dcca", "rho", "beta", "coherency", "hrho", "report")


def _fail(message: str) -> None:
    print(f"plcc: error: {message}", file=sys.stderr)


def _manifest_path(out_path: str) -> str:
    return f"{out_path}.manifest.json"


def _write_sidecar(manifest: dict, output_paths: list[str]) -> None:
    """One sidecar per output, each listing the digests of all outputs."""
    outputs = {p: sha256_file(p) for p in output_paths}
    doc = dict(manifest)
    doc["outputs"] = outputs
    for p in output_paths:
        write_json(_manifest_path(p), doc)


# =========================================================================
# Seed and flag resolution
# =========================================================================


def _env_seed() -> int | None:
    raw = os.environ.get("PLCC_SEED")
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise InvalidInput(f"PLCC_SEED={raw!r} is not an integer") from None


def _resolve_seed(flag_seed, config_seed) -> int | None:
    if flag_seed is not None:
        return int(flag_seed)
    env = _env_seed()
    if env is not None:
        return env
    return config_seed


def _parse_scales_flag(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInput(f"--scales expects min:max:count, got {text!r}")
    try:
        lo, hi, count = (int(p) for p in parts)
    except ValueError:
        raise InvalidInput(f"--scales expects three integers, got {text!r}") from None
    if lo < 1 or hi <= lo:
        raise InvalidInput(f"--scales needs 1 <= min < max, got {text!r}")
    if count < 5:
        raise InvalidInput("--scales needs a count of at least 5")
    return lo, hi, count


def _resolve_grid(params: dict, length: int) -> DetrendConfig:
    """Build the detrending config, materializing the grid into the params."""
    order = params["order"]
    if params.get("scale_grid"):
        grid = np.asarray(params["scale_grid"], dtype=int)
    elif params.get("scales"):
        lo, hi, count = _parse_scales_flag(params["scales"])
        grid = np.unique(np.round(np.geomspace(lo, hi, count)).astype(int))
    else:
        grid = default_scale_grid(length, order)
    cfg = DetrendConfig(grid, order)
    params["scale_grid"] = [int(s) for s in cfg.scale_grid]
    return cfg


def _resolve_n_freqs_param(params: dict, length: int) -> int:
    if params.get("n_freqs") is None:
        params["n_freqs"] = default_n_freqs(length)
    return int(params["n_freqs"])


# =========================================================================
# generate
# =========================================================================

_GENERATE_KEYS = {"length", "seed", "output"}


def _exec_generate(params: dict) -> tuple[int, dict]:
    spec = McArfimaSpec(
        alpha=params["spec"]["alpha"],
        beta=params["spec"]["beta"],
        gamma=params["spec"]["gamma"],
        delta=params["spec"]["delta"],
        d1=params["spec"]["d1"],
        d2=params["spec"]["d2"],
        d3=params["spec"]["d3"],
        d4=params["spec"]["d4"],
        sigma=np.asarray(params["spec"]["sigma"], dtype=float),
        innovation_dist=params["spec"]["innovation_dist"],
        dof=params["spec"]["dof"],
        truncation=params["spec"]["truncation"],
        burn_in=params["spec"]["burn_in"],
    )
    pair = generate_mc_arfima(spec, params["length"], params["seed"])
    params["spec"] = pair.spec_echo.to_dict()
    out = params["out"]
    if params["output"] == "x":
        write_series_csv(out, pair.x.values)
    else:
        write_series_csv(out, pair.x.values, pair.y.values)
    manifest = build_manifest(
        "generate",
        {k: v for k, v in params.items() if not k.startswith("_")},
        params.pop("_inputs", {}),
        params["seed"],
    )
    _write_sidecar(manifest, [out])
    return EXIT_OK, manifest


def _cmd_generate(args) -> int:
    with open(args.config) as fh:
        cfg = parse_config(fh.read(), source=args.config)
    allowed = _GENERATE_KEYS | spec_config_keys(cfg)
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise InvalidInput(f"{args.config}: unknown keys: {', '.join(unknown)}")
    length = config_int(cfg, "length")
    if length is None:
        raise InvalidInput(f"{args.config}: config key 'length' is required")
    seed = _resolve_seed(args.seed, config_int(cfg, "seed"))
    if seed is None:
        raise InvalidInput(
            "a seed is required: pass --seed, set PLCC_SEED, or add 'seed' to the config"
        )
    params = {
        "config": args.config,
        "out": args.out,
        "length": length,
        "seed": seed,
        "output": config_str(cfg, "output", "pair", choices={"pair", "x"}),
        "spec": spec_from_config(cfg).to_dict(),
        "_inputs": {args.config: sha256_file(args.config)},
    }
    code, _ = _exec_generate(params)
    print(f"wrote {args.out}: {length} rows, seed {seed}")
    return code


# =========================================================================
# analyze subcommands
# =========================================================================


def _plot_block(abscissa, ordinate, intercept: float | None, slope: float | None) -> dict:
    """Data-only plot payload: the points and, when a fit exists, the line."""
    block = {
        "abscissa": [float(a) for a in abscissa],
        "ordinate": [float(v) for v in ordinate],
        "fit": None,
    }
    if intercept is not None and slope is not None:
        a = np.asarray(abscissa, dtype=float)
        block["fit"] = [float(v) for v in np.exp(intercept + slope * np.log(a))]
    return block


def _empty_doc(sub: str) -> dict:
    return {
        "subcommand": sub,
        "estimate": None,
        "stderr": None,
        "r2": None,
        "scales": None,
        "values": None,
        "diagnostics": {},
        "plot": None,
    }


def _analyze_dfa(x, y, params, doc) -> str | None:
    cfg = _resolve_grid(params, x.size)
    curve = dfa_fluctuation(x, cfg)
    doc["scales"] = [int(s) for s in curve.scales]
    doc["values"] = [float(v) for v in curve.values]
    try:
        fit = _fit_scaling(curve.scales, curve.values, divisor=2.0)
    except EstimationFailed as exc:
        return str(exc)
    doc.update(estimate=fit.exponent, stderr=fit.stderr, r2=fit.r_squared)
    doc["diagnostics"] = dict(fit.diagnostics)
    doc["plot"] = _plot_block(curve.scales, curve.values, fit.intercept, 2.0 * fit.exponent)
    return None


def _analyze_dcca(x, y, params, doc) -> str | None:
    cfg = _resolve_grid(params, x.size)
    curve = dcca_fluctuation(x, y, cfg)
    doc["scales"] = [int(s) for s in curve.scales]
    doc["values"] = [float(v) for v in curve.values]
    try:
        fit = _fit_scaling(curve.scales, curve.values, divisor=2.0)
    except EstimationFailed as exc:
        return str(exc)
    doc.update(estimate=fit.exponent, stderr=fit.stderr, r2=fit.r_squared)
    doc["diagnostics"] = dict(fit.diagnostics)
    doc["plot"] = _plot_block(curve.scales, np.abs(curve.values), fit.intercept, 2.0 * fit.exponent)
    return None


def _analyze_rho(x, y, params, doc) -> str | None:
    cfg = _resolve_grid(params, x.size)
    pairs = rho_dcca(x, y, cfg)
    values = [v for _, v in pairs]
    doc["scales"] = [s for s, _ in pairs]
    doc["values"] = values
    doc["estimate"] = float(np.median(values))
    doc["diagnostics"] = {"statistic": "median correlation across scales"}
    doc["plot"] = _plot_block(doc["scales"], values, None, None)
    return None


def _analyze_beta(x, y, params, doc) -> str | None:
    cfg = _resolve_grid(params, x.size)
    pairs = beta_dcca(x, y, cfg)
    values = [v for _, v in pairs]
    scales = [s for s, _ in pairs]
    k = len(values)
    mid = slice(k // 4, k - k // 4)
    doc["scales"] = scales
    doc["values"] = values
    doc["estimate"] = float(np.median(values[mid]))
    doc["diagnostics"] = {
        "statistic": "median regression coefficient over the middle half of scales",
        "mid_scales": [scales[mid][0], scales[mid][-1]],
    }
    doc["plot"] = _plot_block(scales, values, None, None)
    return None


def _analyze_coherency(x, y, params, doc) -> str | None:
    est = coherency(x, y, params["bandwidth"])
    freqs = est.frequencies
    values = est.values
    if params.get("n_freqs") is not None:
        n = int(params["n_freqs"])
        freqs, values = freqs[:n], values[:n]
    doc["scales"] = [float(f) for f in freqs]
    doc["values"] = [float(v) for v in values]
    doc["diagnostics"] = {
        "bandwidth": est.smoothing_bandwidth,
        "abscissa": "fourier frequency",
    }
    doc["plot"] = _plot_block(freqs, values, None, None)
    return None


def _analyze_hrho(x, y, params, doc) -> str | None:
    cfg = _resolve_grid(params, x.size)
    n = _resolve_n_freqs_param(params, x.size)
    failures: dict = {}
    pairs = rho_dcca(x, y, cfg)
    doc["scales"] = [s for s, _ in pairs]
    doc["values"] = [v for _, v in pairs]
    time_fit = freq_fit = None
    try:
        time_fit = _rho_decay_fit(pairs)
    except EstimationFailed as exc:
        failures["time"] = str(exc)
    try:
        freq_fit = h_rho_frequency(x, y, n, params["bandwidth"])
    except EstimationFailed as exc:
        failures["freq"] = str(exc)
    doc["channels"] = {"time": fit_to_dict(time_fit), "freq": fit_to_dict(freq_fit)}
    if time_fit is not None:
        doc.update(estimate=time_fit.exponent, stderr=time_fit.stderr, r2=time_fit.r_squared)
        doc["diagnostics"] = dict(time_fit.diagnostics)
        doc["plot"] = _plot_block(
            doc["scales"],
            [v * v for v in doc["values"]],
            time_fit.intercept,
            4.0 * time_fit.exponent,
        )
    if failures:
        doc["diagnostics"] = {**doc["diagnostics"], "failures": failures}
        return "; ".join(f"{k}: {v}" for k, v in failures.items())
    return None


def _analyze_report(x, y, params, doc) -> str | None:
    cfg = _resolve_grid(params, x.size)
    n = _resolve_n_freqs_param(params, x.size)
    settings = CoherencySettings(
        detrend=cfg,
        n_freqs=n,
        bandwidth=params["bandwidth"],
        tolerance=params["tolerance"],
    )
    rep = coherency_report(x, y, settings)
    if "h_rho_time" not in rep.failures:
        pairs = rho_dcca(x, y, cfg)
        doc["scales"] = [s for s, _ in pairs]
        doc["values"] = [v for _, v in pairs]
    doc["estimate"] = rep.h_rho_diff
    doc["channels"] = {
        "h_x": fit_to_dict(rep.h_x),
        "h_y": fit_to_dict(rep.h_y),
        "h_xy": fit_to_dict(rep.h_xy),
        "h_rho_freq": fit_to_dict(rep.h_rho_freq),
        "h_rho_time": fit_to_dict(rep.h_rho_time),
    }
    doc["regime"] = rep.regime
    doc["rho_at_max_scale"] = rep.rho_at_max_scale
    doc["diagnostics"] = {"tolerance": params["tolerance"]}
    if rep.failures:
        doc["diagnostics"]["failures"] = dict(rep.failures)
        return "; ".join(f"{k}: {v}" for k, v in rep.failures.items())
    return None


_ANALYZE_FN = {
    "dfa": _analyze_dfa,
    "dcca": _analyze_dcca,
    "rho": _analyze_rho,
    "beta": _analyze_beta,
    "coherency": _analyze_coherency,
    "hrho": _analyze_hrho,
    "report": _analyze_report,
}


def _exec_analyze(params: dict) -> tuple[int, dict]:
    sub = params["analysis"]
    in_path = params["input"]
    digest = sha256_file(in_path)
    recorded = params.get("_input_digest")
    if recorded is not None and recorded != digest:
        raise InvalidInput(
            f"{in_path}: content changed since the manifest was written "
            f"(digest {digest[:12]}… != {recorded[:12]}…)"
        )
    params["_input_digest"] = digest
    x, y = read_series_csv(in_path)
    if sub in _ANALYSES_UNIVARIATE and y is not None:
        raise InvalidInput(f"{in_path}: {sub} expects a single-series file (t,x)")
    if sub in _ANALYSES_PAIR and y is None:
        raise InvalidInput(f"{in_path}: {sub} expects a pair file (t,x,y)")
    if x.size < params["min_rows"]:
        raise InvalidInput(
            f"{in_path}: {x.size} rows is below the minimum {params['min_rows']} "
            "(lower it with --min-rows if intended)"
        )
    doc = _empty_doc(sub)
    error = _ANALYZE_FN[sub](x, y, params, doc)
    if error is not None:
        doc["error"] = error
    public = {k: v for k, v in params.items() if not k.startswith("_")}
    manifest = build_manifest(sub, public, {in_path: digest}, None)
    doc["manifest"] = manifest
    write_json(params["out"], doc)
    _write_sidecar(manifest, [params["out"]])
    return (EXIT_OK if error is None else EXIT_ESTIMATION), manifest


def _cmd_analyze(args) -> int:
    sub = args.analysis
    out = args.out
    if out is None:
        stem = os.path.splitext(args.input)[0]
        out = f"{stem}.{sub}.json"
    params = {
        "analysis": sub,
        "input": args.input,
        "out": out,
        "min_rows": args.min_rows,
    }
    if sub in ("dfa", "dcca", "rho", "beta", "hrho", "report"):
        params["order"] = args.order
        params["scales"] = args.scales
    if sub in ("coherency", "hrho", "report"):
        params["n_freqs"] = args.nfreqs
        params["bandwidth"] = args.bandwidth
    if sub == "report":
        params["tolerance"] = args.tol
    code, _ = _exec_analyze(params)
    if code == EXIT_OK:
        print(f"{sub}: wrote {out}")
    else:
        _fail(f"estimation failed; partial result written to {out}")
    return code


# =========================================================================
# mc
# =========================================================================

_MC_KEYS = {
    "mc.suite", "mc.length", "mc.lengths", "mc.replications", "mc.estimators",
    "mc.master_seed", "mc.label", "mc.n_scales", "mc.poly_order", "mc.n_freqs",
    "mc.bandwidth", "mc.scale_min", "mc.scale_max", "mc.tolerance",
}


def _config_from_echo(echo: dict) -> ExperimentConfig:
    spec = echo["spec"]
    return ExperimentConfig(
        spec=McArfimaSpec(
            alpha=spec["alpha"], beta=spec["beta"], gamma=spec["gamma"],
            delta=spec["delta"], d1=spec["d1"], d2=spec["d2"], d3=spec["d3"],
            d4=spec["d4"], sigma=np.asarray(spec["sigma"], dtype=float),
            innovation_dist=spec["innovation_dist"], dof=spec["dof"],
            truncation=spec["truncation"], burn_in=spec["burn_in"],
        ),
        lengths=tuple(echo["lengths"]),
        replications=echo["replications"],
        estimators=tuple(echo["estimators"]),
        master_seed=echo["master_seed"],
        label=echo["label"],
        poly_order=echo["poly_order"],
        n_scales=echo["n_scales"],
        n_freqs=echo["n_freqs"],
        bandwidth=echo["bandwidth"],
        scale_min=echo["scale_min"],
        scale_max=echo["scale_max"],
    )


def _sweep_summary_doc(sweep: dict) -> dict:
    return {
        "subcommand": "mc",
        "tolerance": sweep["tolerance"],
        "rows": sweep["rows"],
        "max_gap": sweep["max_gap"],
        "all_within_bound": sweep["all_within_bound"],
        "unmeasured": [list(pair) for pair in sweep["unmeasured"]],
    }


def _exec_mc(params: dict, jobs: int) -> tuple[int, dict]:
    out_dir = params["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    if params["mode"] == "suite":
        configs = standard_regimes(
            length=params["length"],
            replications=params["replications"],
            master_seed=params["master_seed"],
        )
        params["configs"] = [c.echo() for c in configs]
    else:
        configs = [_config_from_echo(params["config_echo"])]
    tolerance = params["tolerance"]
    seeds = sorted({c.master_seed for c in configs})

    if all({"dfa", "dcca"} <= set(c.estimators) for c in configs):
        sweep = feasibility_sweep(configs, tolerance=tolerance, jobs=jobs)
        results = sweep["results"]
        summary = _sweep_summary_doc(sweep)
    else:
        results = [run_experiment(c, jobs=jobs) for c in configs]
        summary = {
            "subcommand": "mc",
            "tolerance": tolerance,
            "configs": [
                {"label": r.label, "degraded": r.degraded} for r in results
            ],
        }
    manifest = build_manifest(
        "mc",
        {k: v for k, v in params.items() if not k.startswith("_")},
        params.pop("_inputs", {}),
        seeds if len(seeds) > 1 else seeds[0],
    )
    outputs = []
    for res in results:
        doc = res.to_dict()
        doc["manifest"] = manifest
        path = os.path.join(out_dir, f"{res.label}.json")
        write_json(path, doc)
        outputs.append(path)
    summary["manifest"] = manifest
    summary_path = os.path.join(out_dir, "summary.json")
    write_json(summary_path, summary)
    outputs.append(summary_path)
    _write_sidecar(manifest, outputs)
    params["_summary"] = summary
    return EXIT_OK, manifest


def _cmd_mc(args) -> int:
    with open(args.config) as fh:
        cfg = parse_config(fh.read(), source=args.config)
    allowed = _MC_KEYS | spec_config_keys(cfg)
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise InvalidInput(f"{args.config}: unknown keys: {', '.join(unknown)}")
    tolerance = args.tol if args.tol is not None else config_float(cfg, "mc.tolerance", 0.05)
    master = _resolve_seed(args.seed, config_int(cfg, "mc.master_seed"))
    params: dict = {
        "out_dir": args.out_dir,
        "tolerance": tolerance,
        "_inputs": {args.config: sha256_file(args.config)},
    }
    if "mc.suite" in cfg:
        config_str(cfg, "mc.suite", choices={"standard-regimes"})
        stray = sorted(spec_config_keys(cfg))
        if stray:
            raise InvalidInput(
                f"{args.config}: suite mode ignores spec keys; remove {', '.join(stray)}"
            )
        params.update(
            mode="suite",
            suite="standard-regimes",
            length=config_int(cfg, "mc.length", 8192),
            replications=config_int(cfg, "mc.replications", 100),
            master_seed=master if master is not None else 1202,
        )
    else:
        for key in ("mc.lengths", "mc.replications", "mc.estimators"):
            if key not in cfg:
                raise InvalidInput(f"{args.config}: config key '{key}' is required")
        if master is None:
            raise InvalidInput(
                f"{args.config}: a master seed is required: pass --seed, set "
                "PLCC_SEED, or add 'mc.master_seed' to the config"
            )
        try:
            lengths = tuple(int(v) for v in cfg["mc.lengths"].split(","))
        except ValueError:
            raise InvalidInput(
                f"{args.config}: mc.lengths must be comma-separated integers"
            ) from None
        estimators = tuple(tok.strip() for tok in cfg["mc.estimators"].split(","))
        experiment = ExperimentConfig(
            spec=spec_from_config(cfg),
            lengths=lengths,
            replications=config_int(cfg, "mc.replications"),
            estimators=estimators,
            master_seed=master,
            label=config_str(cfg, "mc.label", "experiment"),
            poly_order=config_int(cfg, "mc.poly_order", 1),
            n_scales=config_int(cfg, "mc.n_scales", 20),
            n_freqs=config_int(cfg, "mc.n_freqs"),
            bandwidth=config_int(cfg, "mc.bandwidth", 11),
            scale_min=config_int(cfg, "mc.scale_min"),
            scale_max=config_int(cfg, "mc.scale_max"),
        )
        params.update(mode="single", config_echo=experiment.echo())
    code, _ = _exec_mc(params, args.jobs)
    summary = params["_summary"]
    if "max_gap" in summary:
        print(
            f"mc: wrote {args.out_dir}; max gap "
            f"{summary['max_gap'] if summary['max_gap'] is not None else 'n/a'} "
            f"(tolerance {tolerance}), all within bound: {summary['all_within_bound']}"
        )
    else:
        print(f"mc: wrote {args.out_dir}")
    return code


# =========================================================================
# replay
# =========================================================================


def _cmd_replay(args) -> int:
    man = read_manifest(args.manifest)
    sub = man["subcommand"]
    params = dict(man["parameters"])
    # The recorded input digests ride along so the rewritten sidecars match
    # the original ones byte for byte; for analyses the digest additionally
    # guards against replaying over a changed input file.
    params["_inputs"] = man.get("inputs", {})
    if sub == "generate":
        code, _ = _exec_generate(params)
    elif sub in _ANALYZE_FN:
        params["_input_digest"] = params.pop("_inputs").get(params["input"])
        code, _ = _exec_analyze(params)
    elif sub == "mc":
        code, _ = _exec_mc(params, args.jobs)
    else:
        raise InvalidParameter(f"manifest subcommand {sub!r} is not replayable")
    recorded = man.get("outputs", {})
    mismatched = []
    for path, digest in sorted(recorded.items()):
        if sha256_file(path) != digest:
            mismatched.append(path)
    if mismatched:
        _fail(
            "replay outputs differ from the manifest record: "
            + ", ".join(mismatched)
        )
        return 1
    if code == EXIT_OK:
        print(f"replay ok: {len(recorded)} recorded output(s) byte-identical")
    return code


# =========================================================================
# Parser and entry point
# =========================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plcc",
        description=(
            "Long-memory pair generation, detrended and spectral exponent "
            "estimation, power-law coherency and Monte Carlo experiments "
            "over CSV time series."
        ),
    )
    parser.add_argument("--version", action="version", version=f"plcc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    gen = sub.add_parser("generate", help="synthesize a series pair from a config file")
    gen.add_argument("config", help="flat key=value config file")
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--seed", type=int, help="overrides PLCC_SEED and the config seed")
    gen.set_defaults(handler=_cmd_generate)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="CSV file with header t,x[,y]")
    common.add_argument("--out", help="result JSON path (default: <input>.<subcommand>.json)")
    common.add_argument(
        "--min-rows", type=int, default=256,
        help="minimum accepted row count (default 256)",
    )
    scales = argparse.ArgumentParser(add_help=False)
    scales.add_argument(
        "--scales", metavar="MIN:MAX:COUNT",
        help="log-spaced scale grid (default: order minimum up to T/5, 20 scales)",
    )
    scales.add_argument(
        "--order", type=int, default=1,
        help="box detrending polynomial order (default 1)",
    )
    freqs = argparse.ArgumentParser(add_help=False)
    freqs.add_argument(
        "--nfreqs", type=int,
        help="number of lowest Fourier frequencies (default: floor(sqrt(T)))",
    )
    freqs.add_argument(
        "--bandwidth", type=int, default=11,
        help="odd Daniell smoothing bandwidth (default 11)",
    )

    analyze_specs = [
        ("dfa", "memory exponent from detrended variance scaling", [common, scales]),
        ("dcca", "cross-memory exponent from detrended covariance scaling", [common, scales]),
        ("rho", "scale-specific correlation coefficients", [common, scales]),
        ("beta", "scale-specific regression coefficients", [common, scales]),
        ("coherency", "smoothed squared spectral coherency", [common, freqs]),
        ("hrho", "coherency-decay exponent, time and frequency channels", [common, scales, freqs]),
        ("report", "all exponents plus regime classification", [common, scales, freqs]),
    ]
    for name, help_text, parents in analyze_specs:
        p = sub.add_parser(name, help=help_text, parents=parents)
        if name == "report":
            p.add_argument(
                "--tol", type=float, default=0.05,
                help="regime classification tolerance (default 0.05)",
            )
        p.set_defaults(handler=_cmd_analyze, analysis=name)

    mc = sub.add_parser("mc", help="seeded Monte Carlo experiments from a config file")
    mc.add_argument("config", help="flat key=value config file")
    mc.add_argument("--out-dir", required=True, help="directory for result documents")
    mc.add_argument("--jobs", type=int, default=1, help="worker threads (results are identical for any value)")
    mc.add_argument("--seed", type=int, help="overrides PLCC_SEED and the config master seed")
    mc.add_argument("--tol", type=float, help="feasibility gap tolerance (default 0.05)")
    mc.set_defaults(handler=_cmd_mc)

    rep = sub.add_parser("replay", help="re-run a manifest and verify byte-identical outputs")
    rep.add_argument("manifest", help="a <output>.manifest.json file")
    rep.add_argument("--jobs", type=int, default=1, help="worker threads for mc replays")
    rep.set_defaults(handler=_cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except EstimationFailed as exc:
        _fail(f"estimation failed: {exc}")
        return EXIT_ESTIMATION
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    except PlccError as exc:
        _fail(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
