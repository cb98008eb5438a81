"""Render sweep CSVs into comparison and Pareto charts.

Input files are the harness CSVs: a `#`-prefixed metadata comment, an exact
header row, then data rows. Column mismatches abort with a diff of missing
and unexpected names; an empty table aborts before any file is written.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIG2_COLUMNS = ["K", "L", "method", "mean_ec", "stderr_ec", "n_trials"]
FIG3_COLUMNS = ["mu", "L", "mean_ec", "stderr_ec", "rmse_deg", "n_trials"]
KINDS = ("fig2", "fig3")


class SchemaError(ValueError):
    """CSV columns do not match the expected sweep schema."""


class EmptyDataError(ValueError):
    """CSV parsed cleanly but contains no data rows."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str  # "fig2" | "fig3"
    output_path: str
    log_ec: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")

    @property
    def columns(self) -> list:
        return FIG2_COLUMNS if self.kind == "fig2" else FIG3_COLUMNS


def load_table(spec: PlotSpec) -> list:
    """Parse and validate the CSV; returns a list of per-row dicts."""
    with open(spec.input_csv, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise SchemaError(f"{spec.input_csv}: no header row found")
    header, data = rows[0], rows[1:]
    if header != spec.columns:
        missing = [c for c in spec.columns if c not in header]
        unexpected = [c for c in header if c not in spec.columns]
        raise SchemaError(
            f"{spec.input_csv}: column mismatch for {spec.kind}: "
            f"missing {missing}, unexpected {unexpected}")
    if not data:
        raise EmptyDataError(f"{spec.input_csv}: no data rows")
    out = []
    for raw in data:
        if len(raw) != len(header):
            raise SchemaError(f"{spec.input_csv}: row width {len(raw)} != "
                              f"{len(header)}: {raw}")
        row = dict(zip(header, raw))
        for key in ("mean_ec", "stderr_ec", "rmse_deg", "mu"):
            if key in row:
                row[key] = float(row[key])
        for key in ("K", "L", "n_trials"):
            if key in row:
                row[key] = int(row[key])
        out.append(row)
    return out


def group_series(spec: PlotSpec, table: list) -> dict:
    """Pure grouping of rows into labelled (x, y) series.

    fig2: one error-vs-length curve per (K, method); fig3: one Pareto curve
    per trade-off weight, traced over the feedback length.
    """
    series = {}
    if spec.kind == "fig2":
        keys = sorted({(r["K"], r["method"]) for r in table},
                      key=lambda t: (t[0], t[1]))
        for k, method in keys:
            rows = sorted((r for r in table
                           if r["K"] == k and r["method"] == method),
                          key=lambda r: r["L"])
            series[f"K={k}, {method}"] = (
                [r["L"] for r in rows], [r["mean_ec"] for r in rows])
    else:
        for mu in sorted({r["mu"] for r in table}):
            rows = sorted((r for r in table if r["mu"] == mu),
                          key=lambda r: r["L"])
            series[f"mu={mu:g}"] = (
                [r["mean_ec"] for r in rows], [r["rmse_deg"] for r in rows])
    return series


def render(spec: PlotSpec) -> str:
    """Draw the chart and write it to spec.output_path."""
    table = load_table(spec)
    series = group_series(spec, table)

    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=150)
    markers = "osd^vP*X"
    for i, (label, (x, y)) in enumerate(series.items()):
        ax.plot(x, y, marker=markers[i % len(markers)], label=label)

    if spec.kind == "fig2":
        ax.set_xlabel("feedback length L")
        ax.set_ylabel("mean detection error")
        if spec.log_ec and all(y > 0 for _, ys in series.values() for y in ys):
            ax.set_yscale("log")
    else:
        ax.set_xlabel("mean detection error")
        ax.set_ylabel("angle RMSE (deg)")
        if spec.log_ec and all(x > 0 for xs, _ in series.values() for x in xs):
            ax.set_xscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output_path)
    plt.close(fig)
    return spec.output_path
