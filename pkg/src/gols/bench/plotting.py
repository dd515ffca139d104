"""Plot-data emission and figure rendering for aggregated sweep results."""

from __future__ import annotations

import csv
import os

from .. import __version__


class ParseError(ValueError):
    """Aggregate CSV is malformed or empty."""


# plot-file tag -> aggregate CSV column
METRIC_COLUMNS = {"err": "err", "mse": "mse", "time": "time_mean"}


def series_tag(algorithm: str, L) -> str:
    """Column label of one curve: the algorithm, with the width L for GOLS."""
    return f"gols-L{L}" if algorithm == "gols" else algorithm


def read_aggregate(path):
    """Read an aggregate CSV, keeping every value as its original string.

    Returns (comment lines, rows) where each row is a column->string dict.
    Raises ParseError when the required columns or data rows are missing.
    """
    if not os.path.exists(path):
        raise ParseError(f"aggregate CSV not found: {path}")
    comments = []
    with open(path, "r", newline="", encoding="ascii") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                lines.append(line)
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        raise ParseError(f"{path} has no header row")
    required = {"algorithm", "k", "L"} | set(METRIC_COLUMNS.values())
    missing = required - set(reader.fieldnames)
    if missing:
        raise ParseError(f"{path} lacks columns {sorted(missing)}")
    rows = list(reader)
    if not rows:
        raise ParseError(f"{path} has no data rows")
    return comments, rows


def _grid(rows):
    """Arrange rows into (k strings ascending, series tags, tag -> k -> row)."""
    by_series: dict[str, dict[str, dict]] = {}
    k_seen: dict[str, int] = {}
    for row in rows:
        tag = series_tag(row["algorithm"], row["L"])
        k_str = row["k"]
        k_seen[k_str] = int(k_str)
        cell = by_series.setdefault(tag, {})
        if k_str in cell:
            raise ParseError(f"duplicate aggregate row for series {tag}, k={k_str}")
        cell[k_str] = row
    k_order = sorted(k_seen, key=k_seen.get)
    tags = sorted(by_series)
    for tag in tags:
        missing = [k for k in k_order if k not in by_series[tag]]
        if missing:
            raise ParseError(f"series {tag} has no rows for k in {missing}")
    return k_order, tags, by_series


def emit_plot_data(aggregate_csv, output_dir: str | None = None) -> dict[str, str]:
    """Write one whitespace-delimited plot-data file per metric.

    Each file holds the k grid in the first column and one series column
    per (algorithm, L) curve; values are copied verbatim from the CSV so
    the round trip is exact at the string level.  Returns metric -> path.
    """
    comments, rows = read_aggregate(aggregate_csv)
    k_order, tags, by_series = _grid(rows)
    if output_dir is None:
        output_dir = os.path.dirname(os.path.abspath(aggregate_csv))
    os.makedirs(output_dir, exist_ok=True)

    source = comments[0] if comments else f"gols-bench {__version__}"
    paths = {}
    for metric, column in METRIC_COLUMNS.items():
        path = os.path.join(output_dir, f"plot_{metric}.dat")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# {source}\n")
            fh.write(f"# metric={metric} column={column}\n")
            fh.write("# k " + " ".join(tags) + "\n")
            for k_str in k_order:
                values = [by_series[tag][k_str][column] for tag in tags]
                fh.write(k_str + " " + " ".join(values) + "\n")
        paths[metric] = path
    return paths


def render_figures(aggregate_csv, output_dir: str | None = None) -> dict[str, str]:
    """Render one PNG per metric (curves vs k) next to the plot-data files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    _, rows = read_aggregate(aggregate_csv)
    k_order, tags, by_series = _grid(rows)
    if output_dir is None:
        output_dir = os.path.dirname(os.path.abspath(aggregate_csv))
    os.makedirs(output_dir, exist_ok=True)

    k_vals = [int(k) for k in k_order]
    labels = {"err": "recovered support fraction",
              "mse": "mean-square error",
              "time": "solver time [s]"}
    paths = {}
    for metric, column in METRIC_COLUMNS.items():
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        for tag in tags:
            values = [float(by_series[tag][k][column]) for k in k_order]
            ax.plot(k_vals, values, marker="o", markersize=3.5, label=tag)
        ax.set_xlabel("sparsity level k")
        ax.set_ylabel(labels[metric])
        if metric in ("mse", "time"):
            ax.set_yscale("log")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(output_dir, f"{metric}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths[metric] = path
    return paths


_SCRIPT = '''#!/usr/bin/env python3
"""Re-render the benchmark figures from the plot_*.dat files in this directory."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
LABELS = {"err": "recovered support fraction",
          "mse": "mean-square error",
          "time": "solver time [s]"}

for metric, ylabel in LABELS.items():
    path = os.path.join(HERE, f"plot_{metric}.dat")
    if not os.path.exists(path):
        continue
    tags, rows = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# k "):
                tags = line.split()[2:]
            elif line and not line.startswith("#"):
                rows.append([float(v) for v in line.split()])
    k_vals = [row[0] for row in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for col, tag in enumerate(tags, start=1):
        ax.plot(k_vals, [row[col] for row in rows], marker="o", markersize=3.5, label=tag)
    ax.set_xlabel("sparsity level k")
    ax.set_ylabel(ylabel)
    if metric in ("mse", "time"):
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, f"{metric}.png"), dpi=150)
    plt.close(fig)
    print(f"wrote {metric}.png")
'''


def write_plot_script(output_dir) -> str:
    """Drop a standalone script that regenerates the PNGs from the .dat files."""
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, "render_figures.py")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_SCRIPT)
    return path
