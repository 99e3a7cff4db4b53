import numpy as np

from vine.dataset import synth_interaction
from vine.evaluation import information_ceiling, random_cluster_baseline
from vine.export import export_document
from vine.interaction import h_matrix
from vine.model import FunctionOracle
from vine.pipeline import analyze
from vine.plots import (
    save_analysis_figures,
    save_baseline_figure,
    save_ceiling_figure,
    save_hstat_figure,
    stroke_width,
)


def pipeline_fixture():
    oracle = FunctionOracle(lambda M: M[:, 0] + 2 * M[:, 1] + 5 * M[:, 2] * M[:, 3], 4)
    ds = synth_interaction(250, 6)
    return ds, oracle, analyze(ds, oracle, jobs=1)


def test_stroke_width_constants_and_clamp():
    assert stroke_width(1) == 1.5
    assert stroke_width(10) == 3.0
    assert stroke_width(10**9) == 8.0


def test_analysis_figures_render(tmp_path):
    ds, oracle, result = pipeline_fixture()
    doc = export_document(result, seed=0)
    written = save_analysis_figures(doc, tmp_path / "figs")
    assert (tmp_path / "figs" / "overview.png").exists()
    assert len(written) == 1 + len(doc["features"])
    for path in written:
        assert path.stat().st_size > 0


def test_report_figures_render(tmp_path):
    ds, oracle, result = pipeline_fixture()
    ceiling = information_ceiling(ds, oracle, result)
    baseline = random_cluster_baseline(ds, result, seed=0)
    hmat = h_matrix(ds, oracle, sample_size=40, seed=0)
    p1 = save_ceiling_figure(ceiling.to_json_dict(), tmp_path / "c.png")
    p2 = save_baseline_figure(baseline.to_json_dict(), tmp_path / "b.png")
    p3 = save_hstat_figure(hmat.values, [c.name for c in ds.schema], tmp_path / "h.png")
    for path in (p1, p2, p3):
        assert path.stat().st_size > 0
