"""Command-line entry point: ``academic-pipeline {ingest,simulate,sensitivity,sweep}``."""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .data import (
    CONSISTENCY_NOTE,
    load_degree_csv,
    sample_bytes,
    parse_degree_csv,
    consistency_report,
    reconstruct_stocks,
    with_estimated_composition,
)
from .errors import PipelineError
from .reporting import (
    CONSISTENCY_COLUMNS,
    HEATMAP_COLUMNS,
    METRICS_COLUMNS,
    OAT_COLUMNS,
    PRCC_COLUMNS,
    RECONSTRUCTION_COLUMNS,
    TRAJECTORY_COLUMNS,
    OutputWriter,
    metrics_rows,
    oat_rows,
    prcc_rows,
    sha256,
    trajectory_rows,
)
from .scenarios import compute_metrics, require_feasible, run_many
from .sensitivity import default_ranges, heatmap_sweep, oat_sweep, oat_values, prcc_analysis


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.data:
        cfg.data_path = Path(args.data)
    if args.out:
        cfg.output_dir = Path(args.out)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.override_feasibility:
        cfg.override_feasibility = True
    if args.threads is not None:
        cfg.threads = args.threads
    return cfg


def _load_data(cfg: RunConfig):
    if cfg.data_path is None:
        raw, label = sample_bytes(), "<bundled sample_degrees.csv>"
    else:
        path = Path(cfg.data_path)
        if not path.is_file():
            raise PipelineError(f"data file not found: {path}")
        raw, label = path.read_bytes(), str(path)
    return parse_degree_csv(raw), {"path": label, "sha256": sha256(raw)}


def _resolved_params(cfg, series):
    return with_estimated_composition(cfg.params, series) if cfg.composition == "estimate" else cfg.params


def _manifest(command, cfg, params, data_info, **extra):
    doc = {
        "command": command,
        "version": __version__,
        "seed": cfg.seed,
        "override_feasibility": cfg.override_feasibility,
        "params": params.as_dict(),
        "composition": cfg.composition,
        "data": data_info,
        "config": None if cfg.source is None else {"path": str(cfg.source),
                                                   "sha256": sha256(Path(cfg.source).read_bytes())},
    }
    doc.update(extra)
    return doc


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label)


def cmd_ingest(cfg: RunConfig) -> int:
    series, data_info = _load_data(cfg)
    params = _resolved_params(cfg, series)
    out = OutputWriter(cfg.output_dir)
    stocks = reconstruct_stocks(series, params)
    out.write_csv("reconstruction.csv", RECONSTRUCTION_COLUMNS,
                  zip(stocks.years.tolist(), stocks.U.tolist(), stocks.G.tolist()))
    report = consistency_report(series, params)
    out.write_csv("consistency.csv", CONSISTENCY_COLUMNS, report.rows())
    summary = {ch: report.max_error(ch) for ch in ("bachelors", "masters", "doctorates")}
    out.write_json("consistency_summary.json", {"max_rel_error": summary, "r_M": params.r_M,
                                                "r_D": params.r_D, "note": CONSISTENCY_NOTE})
    out.write_manifest("manifest_ingest.json", _manifest("ingest", cfg, params, data_info))
    print(f"r_M = {params.r_M:.4f}, r_D = {params.r_D:.4f}")
    for ch, err in summary.items():
        print(f"max relative error [{ch}]: {err:.6g}")
    print(CONSISTENCY_NOTE)
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    series, data_info = _load_data(cfg)
    params = _resolved_params(cfg, series)
    for spec in cfg.scenarios:
        require_feasible(spec.params, cfg.override_feasibility)
    trajs = run_many(cfg.scenarios, series, cfg.override_feasibility, cfg.threads)
    out = OutputWriter(cfg.output_dir)
    combined = []
    for traj in trajs:
        metrics = compute_metrics(traj)
        out.write_csv(f"scenario_{_safe_name(traj.label)}.csv", TRAJECTORY_COLUMNS, trajectory_rows(traj, metrics))
        combined.extend(metrics_rows(traj.label, metrics))
        print(f"{traj.label} [{traj.regime}]: final P = {traj.P[-1]:.1f}, final F = {traj.F[-1]:.1f}")
    out.write_csv("metrics.csv", METRICS_COLUMNS, combined)
    scenarios = [{"label": s.label, "regime": s.regime, "inflow_scale": s.inflow_scale,
                  "projection": s.projection, "horizon": s.horizon, "initial_P": s.initial_P,
                  "initial_F": s.initial_F, "params": s.params.as_dict()} for s in cfg.scenarios]
    out.write_manifest("manifest_simulate.json", _manifest("simulate", cfg, params, data_info, scenarios=scenarios))
    return 0


def _base_spec(cfg, params):
    return cfg.scenarios[0].replace(params=params, inflow_scale=1.0, initial_P=None, initial_F=None)


def _write_heatmap(out, cfg, series, params):
    s = cfg.sensitivity
    hm = heatmap_sweep(s.heatmap_a_F, s.heatmap_K_F, _base_spec(cfg, params), series, s.threshold, cfg.threads)
    out.write_csv("heatmap.csv", HEATMAP_COLUMNS, hm.rows())
    return hm


def _sens_settings(cfg):
    s = cfg.sensitivity
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(s).items()}


def cmd_sensitivity(cfg: RunConfig) -> int:
    series, data_info = _load_data(cfg)
    params = _resolved_params(cfg, series)
    require_feasible(params, cfg.override_feasibility)
    s = cfg.sensitivity
    base = _base_spec(cfg, params)
    out = OutputWriter(cfg.output_dir)
    for name in s.oat_params:
        values = oat_values(params, name, s.oat_points, s.oat_span)
        results = oat_sweep(base, name, values, series, s.threshold, s.skip_infeasible, cfg.threads)
        out.write_csv(f"oat_{name}.csv", OAT_COLUMNS, oat_rows(results))
    ranges = default_ranges(params, s.prcc_params, s.prcc_span)
    result, _, _ = prcc_analysis(base, series, ranges, s.prcc_samples, cfg.seed, s.prcc_outcome,
                                 s.threshold, cfg.threads)
    out.write_csv("prcc.csv", PRCC_COLUMNS, prcc_rows(result))
    for name, coef in result.as_dict().items():
        print(f"PRCC[{s.prcc_outcome}] {name}: {coef:+.4f}")
    _write_heatmap(out, cfg, series, params)
    out.write_manifest("manifest_sensitivity.json",
                       _manifest("sensitivity", cfg, params, data_info, sensitivity=_sens_settings(cfg)))
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    series, data_info = _load_data(cfg)
    params = _resolved_params(cfg, series)
    require_feasible(params, cfg.override_feasibility)
    out = OutputWriter(cfg.output_dir)
    hm = _write_heatmap(out, cfg, series, params)
    print(f"heatmap: {hm.terminal_ratio.size} cells, {int(hm.feasible.sum())} feasible")
    out.write_manifest("manifest_sweep.json",
                       _manifest("sweep", cfg, params, data_info, sensitivity=_sens_settings(cfg)))
    return 0


COMMANDS = {"ingest": cmd_ingest, "simulate": cmd_simulate, "sensitivity": cmd_sensitivity, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="academic-pipeline", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ingest": "reconstruct stocks from a degree CSV and write the consistency report",
        "simulate": "run every configured scenario and write trajectory/metric CSVs",
        "sensitivity": "OAT sweeps, LHS/PRCC and the (a_F, K_F) heatmap",
        "sweep": "only the (a_F, K_F) heatmap",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", metavar="PATH", help="TOML run configuration")
        p.add_argument("--data", metavar="PATH", help="degree CSV (default: bundled synthetic sample)")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--override-feasibility", action="store_true",
                       help="run even if parameters fail the positivity/boundedness conditions")
        p.add_argument("--threads", type=int, metavar="N", help="worker threads for independent runs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        return COMMANDS[args.command](cfg)
    except (PipelineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
