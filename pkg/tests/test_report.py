import re
import xml.etree.ElementTree as ET

import pytest

from fbai.harness import AggregateRow, ExperimentSpec, SchemaError, run_experiment, write_aggregate
from fbai.report import line_plot_svg, relative_table, report

ALGOS = ["ours", "f-first", "p-first", "tf-lucb-c", "naive"]


def fake_rows(instances, algos=ALGOS, deltas=(0.1,)):
    rows = []
    for inst in instances:
        for d in deltas:
            for j, a in enumerate(algos):
                m = 100.0 * (j + 1)
                rows.append(AggregateRow(inst, a, d, 10, m, 5.0 * (j + 1), m / 2, 1.0, 10, 0, float(j + 1)))
    return rows


def test_relative_table_shape():
    text = relative_table(fake_rows(["exp1a", "exp1b", "exp1c"]))
    lines = text.splitlines()
    assert len(lines) == 2 + 3
    assert lines[0] == "| Instance | Ours | F-first | P-first | TF-LUCB-C | Naive |"
    assert lines[2].startswith("| exp1a | 1.00 | 2.00 |")
    assert all(line.count("|") == 7 for line in lines)


def _parse(svg):
    return ET.fromstring(svg)


def test_single_series_error_bars():
    pts = [(2.0, 10.0, 1.5), (4.0, 20.0, 3.0), (8.0, 25.0, 0.0)]
    root = _parse(line_plot_svg({"Ours": pts}, xlabel="N"))
    ns = "{http://www.w3.org/2000/svg}"
    groups = root.findall(f"{ns}g")
    assert len(groups) == 1
    bars = [e for e in groups[0] if e.get("class") == "errorbar"]
    assert len(bars) == 3
    for bar, (_, m, s) in zip(bars, pts):
        assert float(bar.get("data-std")) == s
        # the rendered bar spans mean - std .. mean + std
        y1, y2 = float(bar.get("y1")), float(bar.get("y2"))
        assert y1 >= y2
    # equal pixel scale, so half-heights are proportional to std
    h = [float(b.get("y1")) - float(b.get("y2")) for b in bars]
    assert h[1] == pytest.approx(2 * h[0], abs=0.2) and h[2] == 0.0


def test_delta_ticks():
    deltas = [10.0 ** -e for e in range(1, 10)]
    svg = line_plot_svg({"Ours": [(d, 100.0 + i, 1.0) for i, d in enumerate(deltas)]}, xlabel="delta", log_x=True)
    labels = re.findall(r'class="xtick-label"[^>]*>([^<]+)<', svg)
    assert sorted(labels) == sorted(f"1e-{e}" for e in range(1, 10))
    xs = [float(x) for x in re.findall(r'class="xtick" x1="([\d.]+)"', svg)]
    gaps = [b - a for a, b in zip(sorted(xs), sorted(xs)[1:])]
    # decades are evenly spaced on a log axis, up to 0.1px rounding
    assert max(gaps) - min(gaps) <= 0.2


def test_svg_self_contained():
    svg = line_plot_svg({"a": [(1.0, 1.0, 0.1)], "b": [(1.0, 2.0, 0.2)]}, xlabel="x")
    _parse(svg)
    assert "href" not in svg and "<image" not in svg and "<script" not in svg
    assert svg.count("http://") == 1  # the namespace declaration only


def test_report_missing_or_partial_csv(tmp_path):
    with pytest.raises(SchemaError):
        report(tmp_path)
    (tmp_path / "aggregate.csv").write_text("instance,algo\nx,ours\n")
    with pytest.raises(SchemaError):
        report(tmp_path)
    write_aggregate(tmp_path / "aggregate.csv", [])
    with pytest.raises(SchemaError):
        report(tmp_path)


def test_report_on_sweep(tmp_path):
    spec = ExperimentSpec(["exp2_delta"], algos=["ours"], deltas=[0.1, 0.01, 0.001], reps=2, out_dir=str(tmp_path))
    run_experiment(spec, workers=1)
    files = report(tmp_path)
    assert files["plot"].name == "plot_delta.svg"
    root = _parse(files["plot"].read_text())
    assert len(root.findall("{http://www.w3.org/2000/svg}g")) == 1
    md = files["markdown"].read_text()
    assert "plot_delta.svg" in md and "| exp2_delta |" in md


def test_report_without_sweep_has_no_plot(tmp_path):
    write_aggregate(tmp_path / "aggregate.csv", fake_rows(["exp1a"]))
    files = report(tmp_path)
    assert set(files) == {"markdown"}
