"""FigureSpec and the render dispatcher.

Each figure kind accepts the documented result-CSV headers and nothing
else; a mismatch raises :class:`SchemaError` naming the missing columns.
Rendering is deterministic: fixed figure geometry, fixed dpi, and no
embedded timestamps, so rerunning a script reproduces the image bytes.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figscripts"  # deterministic element ids
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

KINDS = ("bars", "hist", "scatter", "line")

# accepted column sets per kind: (schema name, required columns)
SCHEMAS = {
    "bars": (
        ("option_fractions", ("option", "fraction")),
    ),
    "hist": (
        ("binned_counts", ("bin_left", "bin_right", "count")),
        ("retention_buckets", ("bucket_low", "bucket_high", "fraction_of_users")),
    ),
    "scatter": (
        ("class_mean_pairs", ("mean_random", "mean_personalized")),
        ("frac_vs_mean", ("frac_personalized", "mean_rating")),
    ),
    "line": (
        ("utility_series", ("iteration", "mean_utility")),
        ("month_correlations", ("month_a", "month_b", "correlation")),
    ),
}


class SchemaError(ValueError):
    """An input CSV does not carry the columns its figure kind requires."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input tables, figure kind, labels, output path."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    title: str = ""
    xlabel: str | None = None
    ylabel: str | None = None
    log_y: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"expected one of {', '.join(KINDS)}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")


def _read_table(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, no CSV header")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return reader.fieldnames, rows


def _match_schema(kind, fieldnames, path):
    """Pick the first accepted column set fully present in the header."""
    best_name, best_missing = None, None
    for name, required in SCHEMAS[kind]:
        missing = [c for c in required if c not in fieldnames]
        if not missing:
            return name
        if best_missing is None or len(missing) < len(best_missing):
            best_name, best_missing = name, missing
    raise SchemaError(f"{path}: not a {kind} table; {best_name} needs "
                      f"missing column(s) {', '.join(best_missing)}")


def _num(row, col, path):
    try:
        return float(row[col])
    except (TypeError, ValueError) as err:
        raise SchemaError(f"{path}: column {col!r} holds non-numeric "
                          f"value {row[col]!r}") from err


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def _series(spec):
    """(label, fieldnames, rows) per drawable series, across all inputs.

    A ``group`` column splits a file into one series per group value; with
    several input files the file stem prefixes (or becomes) the label.
    """
    out = []
    for path in spec.inputs:
        fieldnames, rows = _read_table(path)
        _match_schema(spec.kind, fieldnames, path)
        if "group" in fieldnames:
            seen = []
            for row in rows:
                if row["group"] not in seen:
                    seen.append(row["group"])
            for label in seen:
                subset = [r for r in rows if r["group"] == label]
                name = label if len(spec.inputs) == 1 else f"{_stem(path)}:{label}"
                out.append((name, fieldnames, subset))
        else:
            out.append((_stem(path), fieldnames, rows))
    return out


# ---------------------------------------------------------------- renderers

def _render_bars(spec, ax):
    series = _series(spec)
    categories = []
    for _, _, rows in series:
        for row in rows:
            if row["option"] not in categories:
                categories.append(row["option"])
    width = 0.8 / len(series)
    for s, (label, _, rows) in enumerate(series):
        values = {row["option"]: _num(row, "fraction", spec.inputs[0]) for row in rows}
        xs = [k + s * width for k in range(len(categories))]
        ax.bar(xs, [values.get(c, 0.0) for c in categories], width=width,
               label=label, edgecolor="black", linewidth=0.4)
    ax.set_xticks([k + 0.4 - width / 2 for k in range(len(categories))])
    ax.set_xticklabels(categories)
    ax.set_xlabel(spec.xlabel or "option")
    ax.set_ylabel(spec.ylabel or "fraction of ratings")
    if len(series) > 1:
        ax.legend(frameon=False)


def _render_hist(spec, ax):
    series = _series(spec)
    retention = "bucket_low" in series[0][1]
    lo_col, hi_col = ("bucket_low", "bucket_high") if retention \
        else ("bin_left", "bin_right")
    y_col = "fraction_of_users" if retention else "count"
    many = len(series) > 1
    for label, _, rows in series:
        lefts = [_num(r, lo_col, spec.inputs[0]) for r in rows]
        widths = [_num(r, hi_col, spec.inputs[0]) - left
                  for r, left in zip(rows, lefts)]
        heights = [_num(r, y_col, spec.inputs[0]) for r in rows]
        ax.bar(lefts, heights, width=widths, align="edge", label=label,
               alpha=0.65 if many else 1.0, edgecolor="black", linewidth=0.4)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.xlabel or ("ratings per user" if retention else "mean score"))
    ax.set_ylabel(spec.ylabel or ("fraction of users" if retention else "users"))
    if many:
        ax.legend(frameon=False)


def _render_scatter(spec, ax):
    series = _series(spec)
    diagonal = "mean_random" in series[0][1]
    x_col, y_col = ("mean_random", "mean_personalized") if diagonal \
        else ("frac_personalized", "mean_rating")
    many = len(series) > 1
    lo, hi = None, None
    for label, _, rows in series:
        xs = [_num(r, x_col, spec.inputs[0]) for r in rows]
        ys = [_num(r, y_col, spec.inputs[0]) for r in rows]
        ax.scatter(xs, ys, s=14, alpha=0.8, label=label)
        lo = min(xs + ys) if lo is None else min([lo] + xs + ys)
        hi = max(xs + ys) if hi is None else max([hi] + xs + ys)
    if diagonal:
        ax.plot([lo, hi], [lo, hi], ls="--", lw=0.8, color="gray", zorder=0)
    ax.set_xlabel(spec.xlabel or x_col)
    ax.set_ylabel(spec.ylabel or y_col)
    if many:
        ax.legend(frameon=False)


def _render_line(spec, ax):
    series = _series(spec)
    monthly = "month_a" in series[0][1]
    many = len(series) > 1
    for label, fieldnames, rows in series:
        if monthly:
            xs = list(range(len(rows)))
            ys = [_num(r, "correlation", spec.inputs[0]) for r in rows]
            ax.plot(xs, ys, marker="o", label=label)
            ax.set_xticks(xs)
            ax.set_xticklabels([f"{r['month_a']}→{r['month_b']}" for r in rows],
                               rotation=45, ha="right")
        else:
            xs = [_num(r, "iteration", spec.inputs[0]) for r in rows]
            ax.plot(xs, [_num(r, "mean_utility", spec.inputs[0]) for r in rows],
                    lw=0.8, alpha=0.6 if "mean_utility_smoothed" in fieldnames else 1.0,
                    label=label)
            if "mean_utility_smoothed" in fieldnames:
                ax.plot(xs, [_num(r, "mean_utility_smoothed", spec.inputs[0])
                             for r in rows],
                        lw=1.8, label=f"{label} (smoothed)" if many else "smoothed")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.xlabel or ("months" if monthly else "iteration"))
    ax.set_ylabel(spec.ylabel or ("correlation" if monthly else "mean utility"))
    handles, _ = ax.get_legend_handles_labels()
    if len(handles) > 1:
        ax.legend(frameon=False)


_RENDERERS = {"bars": _render_bars, "hist": _render_hist,
              "scatter": _render_scatter, "line": _render_line}


def render(spec: FigureSpec) -> str:
    """Draw the figure and write it to ``spec.out``; returns the path."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        _RENDERERS[spec.kind](spec, ax)
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, lw=0.3, alpha=0.5)
        fig.tight_layout()
        if spec.out.endswith(".svg"):
            fig.savefig(spec.out, metadata={"Date": None})
        else:
            fig.savefig(spec.out, dpi=150, metadata={"Software": "figscripts"})
    finally:
        plt.close(fig)
    return spec.out
