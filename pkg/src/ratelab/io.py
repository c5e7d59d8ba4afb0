"""CSV ingestion and emission: rating files, traces, metrics, manifests.

All floats are written with ``repr`` (shortest round-trip form), so a rerun
with the same seed produces byte-identical files and every value survives a
parse back to the exact same double.
"""
from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .config import config_hash
from .errors import ConfigError, DataError
from .rating_analytics import Dataset, RatingRecord
from .sim_loop import ratings_distribution, utility_over_time

MANDATORY_FIELDS = ("user_id", "item_id", "rating", "timestamp")
OPTIONAL_FIELDS = ("treatment", "period", "recommender_class")
OPTION_NAMES = ("dislike", "like", "superlike")

RECORD_HEADER = list(MANDATORY_FIELDS) + list(OPTIONAL_FIELDS)
TRACE_HEADER = ["iteration", "user_id", "item_id", "true_pref", "rating", "phase"]
UTILITY_HEADER = ["iteration", "mean_utility", "mean_utility_smoothed"]
FRACTIONS_HEADER = ["option", "fraction"]
CUTOFFS_HEADER = ["treatment", "c1", "c2"]


def fnum(x) -> str:
    """Canonical text form of a float: shortest string that parses back equal."""
    return repr(float(x))


# ---------------------------------------------------------------- ingestion

@dataclass(frozen=True)
class ColumnMapping:
    """How to read a ratings CSV: source columns, rating recodes, time format.

    ``columns`` maps each RatingRecord field to the source column carrying
    it; the four mandatory fields must all be mapped.  ``rating_values``
    recodes raw rating strings onto the ordinal options {0, 1, 2}.
    ``timestamp_format`` is "epoch" for integer seconds, else a strptime
    pattern interpreted as UTC.
    """

    columns: dict = field(default_factory=dict)
    rating_values: dict = field(default_factory=dict)
    timestamp_format: str = "epoch"

    def __post_init__(self):
        missing = [f for f in MANDATORY_FIELDS if not self.columns.get(f)]
        if missing:
            raise ConfigError(f"column mapping must cover mandatory fields: "
                              f"missing {missing}")
        if not self.rating_values:
            raise ConfigError("rating_values recoding table must be non-empty")
        bad = {k: v for k, v in self.rating_values.items() if v not in (0, 1, 2)}
        if bad:
            raise ConfigError(f"rating_values must map onto {{0, 1, 2}}; got {bad}")


def default_mapping() -> ColumnMapping:
    return ColumnMapping(
        columns={f: f for f in MANDATORY_FIELDS + OPTIONAL_FIELDS},
        rating_values={"0": 0, "1": 1, "2": 2},
        timestamp_format="epoch",
    )


def mapping_from_config(cfg: dict) -> ColumnMapping:
    ing = cfg["ingest"]
    columns = {f: src for f, src in ing["columns"].items() if src}
    rating_values = {str(k): int(v) for k, v in ing["rating_values"].items()}
    return ColumnMapping(columns=columns, rating_values=rating_values,
                         timestamp_format=ing["timestamp_format"])


def _parse_timestamp(raw: str, fmt: str) -> int:
    if fmt == "epoch":
        return int(raw)
    parsed = datetime.strptime(raw, fmt)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return int(parsed.timestamp())


def ingest_csv(path, mapping: ColumnMapping | None = None, rejects_path=None):
    """Stream a ratings CSV into a Dataset, diverting malformed rows.

    Returns (dataset, report).  Rows that cannot be turned into a valid
    RatingRecord are collected -- with their original cells plus a
    ``reject_reason`` column -- into ``rejects_path`` when given, and
    counted per reason in the report either way.
    """
    mapping = mapping or default_mapping()
    try:
        fh = open(path, newline="")
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from err
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path} has no header row")
        missing = [mapping.columns[f] for f in MANDATORY_FIELDS
                   if mapping.columns[f] not in reader.fieldnames]
        if missing:
            raise ConfigError(f"{path} lacks mapped mandatory columns: {missing}")
        present_optional = {f: mapping.columns.get(f) for f in OPTIONAL_FIELDS
                            if mapping.columns.get(f) in reader.fieldnames}

        records: list = []
        rejects: list = []
        reasons: dict = {}

        def reject(row, reason):
            rejects.append({**row, "reject_reason": reason})
            reasons[reason] = reasons.get(reason, 0) + 1

        rows_read = 0
        for row in reader:
            rows_read += 1
            user = (row.get(mapping.columns["user_id"]) or "").strip()
            item = (row.get(mapping.columns["item_id"]) or "").strip()
            if not user:
                reject(row, "missing user_id")
                continue
            if not item:
                reject(row, "missing item_id")
                continue
            raw_rating = (row.get(mapping.columns["rating"]) or "").strip()
            if raw_rating not in mapping.rating_values:
                reject(row, f"unmapped rating value {raw_rating!r}")
                continue
            raw_ts = (row.get(mapping.columns["timestamp"]) or "").strip()
            try:
                ts = _parse_timestamp(raw_ts, mapping.timestamp_format)
            except ValueError:
                reject(row, f"unparseable timestamp {raw_ts!r}")
                continue
            extras = {}
            for f, src in present_optional.items():
                value = (row.get(src) or "").strip()
                extras[f] = value or None
            records.append(RatingRecord(
                user_id=user, item_id=item,
                rating=mapping.rating_values[raw_rating], timestamp=ts,
                **extras))

    if rejects_path is not None and rejects:
        with open(rejects_path, "w", newline="") as out:
            writer = csv.DictWriter(out, fieldnames=list(reader.fieldnames)
                                    + ["reject_reason"])
            writer.writeheader()
            writer.writerows(rejects)

    report = {
        "rows_read": rows_read,
        "rows_ingested": len(records),
        "rows_rejected": len(rejects),
        "reject_reasons": dict(sorted(reasons.items())),
    }
    return Dataset(records, warn_empty=False), report


def export_records_csv(path, ds: Dataset) -> None:
    """Write a Dataset back out in the default ingestible schema."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_HEADER)
        for r in ds.records:
            writer.writerow([r.user_id, r.item_id, r.rating, r.timestamp,
                             r.treatment or "", r.period or "",
                             r.recommender_class or ""])


# ---------------------------------------------------------------- simulation output

def write_trace_csv(path, result) -> None:
    """One row per rating: iteration,user_id,item_id,true_pref,rating,phase."""
    trace = result.trace
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for t, u, i, p, r, ph in zip(trace.iterations, trace.users, trace.items,
                                     trace.true_prefs, trace.ratings, trace.phases):
            writer.writerow([int(t), f"u{u:05d}", f"i{i:06d}", fnum(p), int(r), ph])


def write_utility_csv(path, trace, window: int = 20) -> None:
    """Per-iteration mean true preference, raw and trailing-window smoothed."""
    raw = utility_over_time(trace, window=1)
    smoothed = utility_over_time(trace, window=window)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(UTILITY_HEADER)
        for t, (a, b) in enumerate(zip(raw, smoothed)):
            writer.writerow([t, fnum(a), fnum(b)])


def write_fractions_csv(path, trace, phase: str | None = "loop") -> None:
    fractions = ratings_distribution(trace, phase=phase)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FRACTIONS_HEADER)
        for name, value in zip(OPTION_NAMES, fractions):
            writer.writerow([name, fnum(value)])


def write_cutoffs_csv(path, rows) -> None:
    """Rows of (treatment, Cutoffs) -> treatment,c1,c2."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CUTOFFS_HEADER)
        for treatment, cut in rows:
            writer.writerow([treatment, fnum(cut.c1), fnum(cut.c2)])


# ---------------------------------------------------------------- generic tables

def write_table_csv(path, rows, columns=None) -> None:
    """List-of-dict rows -> CSV; column order from the first row by default."""
    if not rows:
        raise DataError("refusing to write an empty table; no columns to name")
    columns = list(columns) if columns is not None else list(rows[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            out = []
            for c in columns:
                v = row.get(c, "")
                if isinstance(v, float) or isinstance(v, np.floating):
                    out.append(fnum(v))
                else:
                    out.append(v)
            writer.writerow(out)


def manifest_payload(command: str, seed: int, cfg: dict, **extra) -> dict:
    """Common manifest fields: what ran, with which seed and config."""
    return {
        "command": command,
        "seed": seed,
        "config_hash": config_hash(cfg),
        "versions": {
            "ratelab": __version__,
            "numpy": np.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
        **extra,
    }


def write_manifest(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
