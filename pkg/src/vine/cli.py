"""Command-line entry point: analyze, eval, hstat, synth, serve.

Exit codes: 0 ok, 2 bad input, 3 oracle/model-process failure, 4 internal
error. Every command takes --seed and is reproducible from its flags plus the
input CSV; `--config file.json` supplies defaults that explicit flags
override.
"""

from __future__ import annotations

import csv as csv_module
import errno
import functools
import http.server
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import click

from . import evaluation, plots
from .dataset import (
    DEFAULT_GRID_SIZE,
    Dataset,
    load_csv,
    synth_interaction,
)
from .errors import PortInUse, VineError
from .export import export_document, write_json
from .interaction import DEFAULT_H_SAMPLE, h_matrix
from .model import (
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_DEPTH,
    DEFAULT_MIN_LEAF,
    DEFAULT_N_TREES,
    ExternalOracle,
    ModelOracle,
    train_gbm,
)
from .pipeline import FilterParams, analyze
from .clustering import (
    DEFAULT_MERGE_THRESHOLD,
    DEFAULT_MIN_DTW_RATIO,
    DEFAULT_MIN_F1,
    DEFAULT_N_CLUSTERS,
)


@dataclass
class RunConfig:
    """Serializable record of one run; a run is reproducible from this plus
    the input CSV."""

    csv: str
    target: str
    categorical: list[str]
    grid_size: int = DEFAULT_GRID_SIZE
    clusters: int = DEFAULT_N_CLUSTERS
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD
    min_f1: float = DEFAULT_MIN_F1
    min_dtw_ratio: float = DEFAULT_MIN_DTW_RATIO
    min_cluster_size: float | None = None
    n_trees: int = DEFAULT_N_TREES
    min_leaf: int = DEFAULT_MIN_LEAF
    learning_rate: float = DEFAULT_LEARNING_RATE
    max_depth: int = DEFAULT_MAX_DEPTH
    oracle_cmd: str | None = None
    sample: int = DEFAULT_H_SAMPLE
    seed: int = 0
    jobs: int | None = None

    def to_json_dict(self) -> dict:
        return asdict(self)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except VineError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)
        except click.ClickException:
            raise
        except Exception as exc:  # pragma: no cover - defensive
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _dataset_options(fn):
    fn = click.option("--target", required=True, help="Name of the target column.")(fn)
    fn = click.option(
        "--categorical",
        default="",
        help="Comma-separated columns to force one-hot encode.",
    )(fn)
    fn = click.option(
        "--grid-size", type=int, default=DEFAULT_GRID_SIZE, show_default=True,
        help="Number of quantiles per feature grid.",
    )(fn)
    return fn


def _model_options(fn):
    fn = click.option("--oracle-cmd", default=None,
                      help="External oracle command (line protocol over stdin/stdout); "
                           "when absent an internal boosted-tree model is trained.")(fn)
    fn = click.option("--n-trees", type=int, default=DEFAULT_N_TREES, show_default=True)(fn)
    fn = click.option("--min-leaf", type=int, default=DEFAULT_MIN_LEAF, show_default=True)(fn)
    fn = click.option("--learning-rate", type=float, default=DEFAULT_LEARNING_RATE, show_default=True)(fn)
    fn = click.option("--max-depth", type=int, default=DEFAULT_MAX_DEPTH, show_default=True)(fn)
    return fn


def _cluster_options(fn):
    fn = click.option("--clusters", type=int, default=DEFAULT_N_CLUSTERS, show_default=True,
                      help="Clusters per feature before merging.")(fn)
    fn = click.option("--merge-threshold", type=float, default=DEFAULT_MERGE_THRESHOLD,
                      show_default=True, help="Max normalized threshold gap for merging.")(fn)
    fn = click.option("--min-f1", type=float, default=DEFAULT_MIN_F1, show_default=True)(fn)
    fn = click.option("--min-dtw-ratio", type=float, default=DEFAULT_MIN_DTW_RATIO, show_default=True)(fn)
    fn = click.option("--min-cluster-size", type=float, default=None,
                      help="Smallest surviving cluster [default: max(20, 2% of N)].")(fn)
    return fn


def _load_config(ctx: click.Context, param, value):
    if not value:
        return value
    try:
        cfg = json.loads(Path(value).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read config file: {exc}")
    if not isinstance(cfg, dict):
        raise click.BadParameter("config file must hold a JSON object")
    ctx.default_map = {cmd: cfg for cmd in ("analyze", "eval", "hstat", "synth", "serve")}
    return value


@click.group()
@click.option("--config", callback=_load_config, expose_value=False, is_eager=True,
              help="JSON file of default option values (flags win).")
def main():
    """Regional model explanations from clustered ICE curves."""


def _split_csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _build_oracle(ds: Dataset, cfg: RunConfig) -> ModelOracle:
    if cfg.oracle_cmd:
        return ExternalOracle(cfg.oracle_cmd, ds.k)
    return train_gbm(
        ds,
        n_trees=cfg.n_trees,
        min_leaf=cfg.min_leaf,
        learning_rate=cfg.learning_rate,
        max_depth=cfg.max_depth,
        seed=cfg.seed,
    )


def _close_oracle(oracle) -> None:
    close = getattr(oracle, "close", None)
    if close is not None:
        close()


def _run_pipeline(cfg: RunConfig):
    ds = load_csv(cfg.csv, cfg.target, categorical=cfg.categorical)
    oracle = _build_oracle(ds, cfg)
    try:
        result = analyze(
            ds,
            oracle,
            grid_size=cfg.grid_size,
            n_clusters=cfg.clusters,
            merge_threshold=cfg.merge_threshold,
            filter_params=FilterParams(cfg.min_f1, cfg.min_dtw_ratio, cfg.min_cluster_size),
            jobs=cfg.jobs,
        )
    except BaseException:
        _close_oracle(oracle)
        raise
    return ds, oracle, result


def _summary_table(result) -> str:
    ds = result.dataset
    lines = [f"{'feature':<24}{'kind':<10}{'curves':>7}{'importance':>13}{'interaction':>13}"]
    for f in sorted(result.features):
        fa = result.features[f]
        col = ds.schema[f]
        lines.append(
            f"{col.name:<24}{col.kind.value:<10}{fa.surviving.k:>7}"
            f"{fa.scores.importance:>13.4g}{fa.scores.interaction_strength:>13.4g}"
        )
    return "\n".join(lines)


@main.command("analyze")
@click.argument("csv", type=click.Path(exists=True, dir_okay=False))
@_dataset_options
@_model_options
@_cluster_options
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=None,
              help="Feature-level parallelism [default: available cores; "
                   "the VINE_JOBS env var overrides this flag].")
@click.option("--out", type=click.Path(dir_okay=False), default="vine.json", show_default=True)
@click.option("--with-eval", is_flag=True, help="Embed evaluation reports in the document.")
@click.option("--sample", type=int, default=DEFAULT_H_SAMPLE, show_default=True,
              help="Row subsample for H-statistics (used with --with-eval).")
@click.option("--figures", type=click.Path(file_okay=False), default=None,
              help="Directory for rendered report figures.")
@handle_errors
def analyze_cmd(csv, target, categorical, grid_size, oracle_cmd, n_trees, min_leaf,
                learning_rate, max_depth, clusters, merge_threshold, min_f1,
                min_dtw_ratio, min_cluster_size, seed, jobs, out, with_eval,
                sample, figures):
    """Run the full pipeline on a CSV and write the analysis document."""
    cfg = RunConfig(
        csv=csv, target=target, categorical=_split_csv_list(categorical),
        grid_size=grid_size, clusters=clusters, merge_threshold=merge_threshold,
        min_f1=min_f1, min_dtw_ratio=min_dtw_ratio, min_cluster_size=min_cluster_size,
        n_trees=n_trees, min_leaf=min_leaf, learning_rate=learning_rate,
        max_depth=max_depth, oracle_cmd=oracle_cmd, sample=sample, seed=seed, jobs=jobs,
    )
    ds, oracle, result = _run_pipeline(cfg)
    try:
        reports = None
        if with_eval:
            hmat = h_matrix(ds, oracle, sample_size=min(cfg.sample, ds.n), seed=seed)
            reports = {
                "ceiling": evaluation.information_ceiling(ds, oracle, result).to_json_dict(),
                "baseline": evaluation.random_cluster_baseline(ds, result, seed=seed).to_json_dict(),
                "hstat_correspondence": evaluation.hstat_correspondence(result, hmat).to_json_dict(),
            }
    finally:
        _close_oracle(oracle)
    doc = export_document(result, seed=seed, reports=reports, run_config=cfg.to_json_dict())
    write_json(doc, out)
    click.echo(_summary_table(result))
    click.echo(f"wrote {out}")
    if figures:
        written = plots.save_analysis_figures(doc, figures)
        click.echo(f"wrote {len(written)} figures to {figures}")


def _report_csv_rows(which: str, report) -> list[list[str]]:
    if which == "ceiling":
        doc = report.to_json_dict()
        return [["method", "r2"]] + [[m, f"{doc['r2'][m]:.6g}"] for m in ("pdp", "vine", "ice")]
    if which == "baseline":
        return [
            ["side", "mean_accuracy"],
            ["real", f"{report.mean_real_accuracy:.6g}"],
            ["random", f"{report.mean_random_accuracy:.6g}"],
        ]
    return [
        ["dataset", "pct_top3", "baseline"],
        [report.dataset, evaluation.percent(report.pct_top3), evaluation.percent(report.baseline)],
    ]


@main.command("eval")
@click.argument("which", type=click.Choice(["ceiling", "baseline", "hstat-corr"]))
@click.argument("csv", type=click.Path(exists=True, dir_okay=False))
@_dataset_options
@_model_options
@_cluster_options
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=None)
@click.option("--sample", type=int, default=DEFAULT_H_SAMPLE, show_default=True,
              help="Row subsample for H-statistics (hstat-corr).")
@click.option("--out", type=click.Path(dir_okay=False), default="report.json", show_default=True)
@click.option("--figures", type=click.Path(file_okay=False), default=None)
@handle_errors
def eval_cmd(which, csv, target, categorical, grid_size, oracle_cmd, n_trees, min_leaf,
             learning_rate, max_depth, clusters, merge_threshold, min_f1, min_dtw_ratio,
             min_cluster_size, seed, jobs, sample, out, figures):
    """Run one benchmark and write its report (JSON plus a CSV table)."""
    cfg = RunConfig(
        csv=csv, target=target, categorical=_split_csv_list(categorical),
        grid_size=grid_size, clusters=clusters, merge_threshold=merge_threshold,
        min_f1=min_f1, min_dtw_ratio=min_dtw_ratio, min_cluster_size=min_cluster_size,
        n_trees=n_trees, min_leaf=min_leaf, learning_rate=learning_rate,
        max_depth=max_depth, oracle_cmd=oracle_cmd, sample=sample, seed=seed, jobs=jobs,
    )
    ds, oracle, result = _run_pipeline(cfg)

    hmat = None
    try:
        if which == "ceiling":
            report = evaluation.information_ceiling(ds, oracle, result)
        elif which == "baseline":
            report = evaluation.random_cluster_baseline(ds, result, seed=seed)
        else:
            hmat = h_matrix(ds, oracle, sample_size=min(sample, ds.n), seed=seed)
            report = evaluation.hstat_correspondence(result, hmat)
    finally:
        _close_oracle(oracle)

    if which == "ceiling":
        doc = report.to_json_dict()
        click.echo(f"{'method':<10}{'r2':>8}")
        for method in ("pdp", "vine", "ice"):
            click.echo(f"{method:<10}{doc['r2'][method]:>8.3f}")
    elif which == "baseline":
        click.echo(f"{'side':<10}{'mean accuracy':>14}")
        click.echo(f"{'real':<10}{report.mean_real_accuracy:>14.3f}")
        click.echo(f"{'random':<10}{report.mean_random_accuracy:>14.3f}")
    else:
        click.echo(f"{'dataset':<24}{'% in top 3':>12}{'baseline %':>12}")
        click.echo(
            f"{report.dataset:<24}{evaluation.percent(report.pct_top3):>12}"
            f"{evaluation.percent(report.baseline):>12}"
        )

    write_json(report.to_json_dict(), out)
    table_path = Path(out).with_suffix(".csv")
    with open(table_path, "w", newline="", encoding="utf-8") as fh:
        csv_module.writer(fh).writerows(_report_csv_rows(which, report))
    click.echo(f"wrote {out} and {table_path}")

    if figures:
        outdir = Path(figures)
        outdir.mkdir(parents=True, exist_ok=True)
        if which == "ceiling":
            plots.save_ceiling_figure(report.to_json_dict(), outdir / "ceiling.png")
        elif which == "baseline":
            plots.save_baseline_figure(report.to_json_dict(), outdir / "baseline.png")
        else:
            names = [c.name for c in ds.schema]
            plots.save_hstat_figure(hmat.values, names, outdir / "hstat.png")
        click.echo(f"wrote figures to {figures}")


@main.command("hstat")
@click.argument("csv", type=click.Path(exists=True, dir_okay=False))
@_dataset_options
@_model_options
@click.option("--sample", type=int, default=DEFAULT_H_SAMPLE, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV output path [default: stdout].")
@click.option("--figures", type=click.Path(file_okay=False), default=None)
@handle_errors
def hstat_cmd(csv, target, categorical, grid_size, oracle_cmd, n_trees, min_leaf,
              learning_rate, max_depth, sample, seed, out, figures):
    """Compute the pairwise H-statistic matrix and emit it as CSV."""
    cfg = RunConfig(
        csv=csv, target=target, categorical=_split_csv_list(categorical),
        grid_size=grid_size, n_trees=n_trees, min_leaf=min_leaf,
        learning_rate=learning_rate, max_depth=max_depth, oracle_cmd=oracle_cmd,
        sample=sample, seed=seed,
    )
    ds = load_csv(cfg.csv, cfg.target, categorical=cfg.categorical)
    oracle = _build_oracle(ds, cfg)
    try:
        hmat = h_matrix(ds, oracle, sample_size=min(sample, ds.n), seed=seed)
    finally:
        _close_oracle(oracle)
    text = hmat.to_csv([c.name for c in ds.schema])
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)
    if figures:
        outdir = Path(figures)
        outdir.mkdir(parents=True, exist_ok=True)
        plots.save_hstat_figure(hmat.values, [c.name for c in ds.schema], outdir / "hstat.png")
        click.echo(f"wrote figures to {figures}")


@main.command("synth")
@click.option("--n", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="synth.csv", show_default=True)
@handle_errors
def synth_cmd(n, seed, out):
    """Write the synthetic planted-interaction dataset as a CSV."""
    ds = synth_interaction(n, seed)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv_module.writer(fh)
        writer.writerow([c.name for c in ds.schema] + ["y"])
        for i in range(ds.n):
            writer.writerow([repr(float(v)) for v in ds.X[i]] + [repr(float(ds.y[i]))])
    click.echo(f"wrote {out} ({ds.n} rows)")


_FALLBACK_INDEX = """<!doctype html>
<html><head><meta charset="utf-8"><title>vine</title></head>
<body><h1>vine document server</h1>
<p>No UI bundle was found. The analysis document is at <a href="/data.json">/data.json</a>.</p>
</body></html>
"""


@main.command("serve")
@click.argument("doc", type=click.Path(dir_okay=False))
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--ui", type=click.Path(file_okay=False), default=None,
              help="Directory with the built UI bundle (index.html, assets).")
@handle_errors
def serve_cmd(doc, port, ui):
    """Serve the UI bundle and the analysis document over local HTTP."""
    doc_path = Path(doc)
    if not doc_path.is_file():
        click.echo(f"error: document {doc} not found", err=True)
        sys.exit(2)
    ui_dir = Path(ui) if ui else None

    class Handler(http.server.SimpleHTTPRequestHandler):
        def __init__(self, *args, **kwargs):
            super().__init__(*args, directory=str(ui_dir) if ui_dir else None, **kwargs)

        def do_GET(self):
            if self.path in ("/data.json", "/data"):
                body = doc_path.read_bytes()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            if ui_dir is None or not (ui_dir / "index.html").exists():
                if self.path in ("/", "/index.html"):
                    body = _FALLBACK_INDEX.encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "text/html; charset=utf-8")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
            super().do_GET()

        def log_message(self, fmt, *args):
            pass

    try:
        server = http.server.ThreadingHTTPServer(("127.0.0.1", port), Handler)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise PortInUse(f"port {port} is already in use") from exc
        raise
    click.echo(f"serving {doc} on http://127.0.0.1:{port}/ (ctrl-c to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


if __name__ == "__main__":
    main()
