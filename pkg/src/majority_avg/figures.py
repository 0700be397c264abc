"""SVG line charts of observed means against predicted curves."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import ExperimentReport, ReportRow  # noqa: E402

FIGURE_KINDS = ("per_algorithm", "cross_algorithm", "cross_colour")
SIDECAR_COLUMNS = ("panel", "series", "x", "algorithm", "m", "n", "observed_mean", "expected")

LABELS = {"mjrty": "MJRTY", "fischer_salzberg": "Fischer-Salzberg", "tournament": "Tournament"}


def _panels(report: ExperimentReport, kind: str, length: int | None):
    """Group rows into (panel title, series label, x attribute, rows)."""
    rows = sorted(report.rows, key=lambda r: r.key)
    panels: dict[str, dict[str, list[ReportRow]]] = {}
    if kind == "per_algorithm":
        for r in rows:
            panels.setdefault(LABELS.get(r.algorithm, r.algorithm), {}).setdefault(f"m={r.m}", []).append(r)
        return panels, "n"
    if kind == "cross_algorithm":
        for r in rows:
            panels.setdefault(f"m={r.m}", {}).setdefault(LABELS.get(r.algorithm, r.algorithm), []).append(r)
        return panels, "n"
    if kind == "cross_colour":
        target = length if length is not None else max(r.n for r in rows)
        for r in rows:
            if r.n == target:
                panels.setdefault(f"n={target}", {}).setdefault(LABELS.get(r.algorithm, r.algorithm), []).append(r)
        if not panels:
            raise ValueError(f"report has no rows with n={target}")
        return panels, "m"
    raise ValueError(f"unknown figure kind {kind!r}; expected one of {FIGURE_KINDS}")


def emit_figure(
    report: ExperimentReport,
    kind: str,
    output: str | Path,
    length: int | None = None,
) -> tuple[Path, Path]:
    """Write ``output`` (SVG) and ``output`` with a ``.csv`` suffix holding the plotted series.

    ``per_algorithm``: one panel per algorithm, one series per colour count.
    ``cross_algorithm``: one panel per colour count, algorithms overlaid.
    ``cross_colour``: algorithms against m at a fixed length (default: largest n).
    Observed means are drawn as points, predictions as lines.
    """
    if not report.rows:
        raise ValueError("cannot draw a figure from an empty report")
    panels, xattr = _panels(report, kind, length)
    output = Path(output)
    sidecar = output.with_suffix(".csv")

    fig, axes = plt.subplots(1, len(panels), figsize=(5.5 * len(panels), 4.2), squeeze=False)
    records = []
    for ax, (title, series) in zip(axes[0], panels.items()):
        for label, rows in series.items():
            xs = [getattr(r, xattr) for r in rows]
            observed = [r.stats.mean for r in rows]
            (points,) = ax.plot(xs, observed, "o", markersize=3, label=f"{label} observed")
            pairs = [(x, r.stats.expected) for x, r in zip(xs, rows) if r.stats.expected is not None]
            if pairs:
                ax.plot(*zip(*pairs), "-", linewidth=1, color=points.get_color(), label=f"{label} expected")
            for x, r in zip(xs, rows):
                records.append((title, label, x, r.algorithm, r.m, r.n, r.stats.mean, r.stats.expected))
        ax.set_title(title)
        ax.set_xlabel("stream length n" if xattr == "n" else "colours m")
        ax.set_ylabel("comparisons")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(output, format="svg")
    plt.close(fig)

    with open(sidecar, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SIDECAR_COLUMNS)
        for rec in records:
            writer.writerow(["" if v is None else (f"{v:.6g}" if isinstance(v, float) else v) for v in rec])
    return output, sidecar
