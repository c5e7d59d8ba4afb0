"""Rating-record analytics: filtering, regression designs, splits, descriptives.

One flat record per rating keeps simulated traces and ingested real data in
the same shape.  The regression builders assemble DesignMatrix objects whose
mean/count covariates are standardized on the final analysis sample (i.e.
after any filtering or capping the caller applied).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from ._rng import substream
from .errors import ConfigError, DataError, DegenerateColumnError, InsufficientDataError
from .stats import DesignMatrix, standardize

PERSONALIZED = "personalized"


@dataclass(frozen=True)
class RatingRecord:
    """One rating event.  Optional fields may be None when a source lacks them."""

    user_id: str
    item_id: str
    rating: int              # ordinal option: 0 dislike, 1 like, 2 superlike
    timestamp: int           # epoch seconds, UTC
    treatment: str | None = None          # experiment arm label
    period: str | None = None             # e.g. natural-experiment era label
    recommender_class: str | None = None  # "personalized", "random", ...


def _codes(values):
    labels = sorted({v for v in values if v is not None})
    index = {v: k for k, v in enumerate(labels)}
    codes = np.array([index.get(v, -1) for v in values], dtype=np.int64)
    return labels, codes


class Dataset:
    """Immutable collection of RatingRecords with columnar views and indices."""

    def __init__(self, records, warn_empty: bool = True):
        self.records = tuple(records)
        if not self.records and warn_empty:
            warnings.warn("constructing an empty Dataset", stacklevel=2)
        for r in self.records:
            if r.rating not in (0, 1, 2):
                raise DataError(f"rating must be 0, 1 or 2; got {r.rating!r} "
                                f"(user {r.user_id}, item {r.item_id})")
        self.user_labels, self.user_codes = _codes([r.user_id for r in self.records])
        self.item_labels, self.item_codes = _codes([r.item_id for r in self.records])
        self.treatment_labels, self.treatment_codes = _codes([r.treatment for r in self.records])
        self.period_labels, self.period_codes = _codes([r.period for r in self.records])
        self.class_labels, self.class_codes = _codes([r.recommender_class for r in self.records])
        self.ratings = np.array([r.rating for r in self.records], dtype=np.int64)
        self.timestamps = np.array([r.timestamp for r in self.records], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n_users(self) -> int:
        return len(self.user_labels)

    @property
    def n_items(self) -> int:
        return len(self.item_labels)

    def user_counts(self) -> np.ndarray:
        return np.bincount(self.user_codes, minlength=self.n_users)

    def item_counts(self) -> np.ndarray:
        return np.bincount(self.item_codes, minlength=self.n_items)

    def subset(self, keep) -> "Dataset":
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = np.flatnonzero(keep)
        # empty subsets are an expected outcome of filtering, not a mistake
        return Dataset([self.records[int(i)] for i in keep], warn_empty=False)

    def group_field(self) -> str | None:
        """Which grouping column the dataset supports: period beats treatment.

        A field counts as present only when every record carries it.
        """
        if len(self) and np.all(self.period_codes >= 0):
            return "period"
        if len(self) and np.all(self.treatment_codes >= 0):
            return "treatment"
        return None

    def _group_info(self):
        field = self.group_field()
        if field == "period":
            return field, self.period_labels, self.period_codes
        if field == "treatment":
            return field, self.treatment_labels, self.treatment_codes
        return None, ["all"], np.zeros(len(self), dtype=np.int64)

    def has_classes(self) -> bool:
        return len(self) > 0 and bool(np.all(self.class_codes >= 0))


def trace_to_records(trace, treatment: str | None = None,
                     recommender_class: str | None = None) -> list:
    """Bridge a simulation trace into RatingRecords.

    Timestamps are the iteration numbers (init phase becomes -1); item and
    user indices become zero-padded string ids.
    """
    return [
        RatingRecord(user_id=f"u{u:05d}", item_id=f"i{i:06d}", rating=int(r),
                     timestamp=int(t), treatment=treatment,
                     recommender_class=recommender_class)
        for u, i, r, t in zip(trace.users, trace.items, trace.ratings, trace.iterations)
    ]


# ---------------------------------------------------------------- filtering

def filter_min_ratings(ds: Dataset, min_count: int = 10) -> Dataset:
    """Largest subset where every user and every item has >= min_count ratings.

    Removing a thin user can push an item below the bar and vice versa, so
    the filter iterates to a fixed point.  The feasible subsets are closed
    under union, which makes the fixed point the unique maximal one.
    """
    if min_count < 1:
        raise ConfigError("min_count must be >= 1")
    uc, ic = ds.user_codes, ds.item_codes
    keep_mask = np.ones(len(ds), dtype=bool)
    while True:
        user_counts = np.bincount(uc[keep_mask], minlength=ds.n_users)
        item_counts = np.bincount(ic[keep_mask], minlength=ds.n_items)
        new_mask = keep_mask & (user_counts[uc] >= min_count) & (item_counts[ic] >= min_count)
        if np.array_equal(new_mask, keep_mask):
            break
        keep_mask = new_mask
    return ds.subset(keep_mask)


def cap_ratings(ds: Dataset, cap: int = 100, seed: int = 0) -> Dataset:
    """Cap per-user and per-item rating counts by seeded random subsampling.

    Greedy alternating passes: first every over-cap user keeps a uniform
    sample of `cap` of their rows, then every over-cap item does the same;
    repeat until both sides are stable.  Deterministic for a given seed.
    """
    if cap < 1:
        raise ConfigError("cap must be >= 1")
    rng = substream(seed, "cap-ratings")
    keep_mask = np.ones(len(ds), dtype=bool)
    uc, ic = ds.user_codes, ds.item_codes
    while True:
        changed = False
        for codes, n_groups in ((uc, ds.n_users), (ic, ds.n_items)):
            counts = np.bincount(codes[keep_mask], minlength=n_groups)
            for g in np.flatnonzero(counts > cap):   # flatnonzero is sorted: deterministic order
                rows = np.flatnonzero(keep_mask & (codes == g))
                drop = rng.choice(rows, size=rows.size - cap, replace=False)
                keep_mask[drop] = False
                changed = True
        if not changed:
            return ds.subset(keep_mask)


# ---------------------------------------------------------------- leave-one-out

def leave_one_out_means(ds: Dataset):
    """Per-record means of the user's and the item's *other* ratings.

    Returns (user_loo, item_loo, defined) where defined marks rows whose
    user and item both have at least 2 ratings.
    """
    if len(ds) == 0:
        raise InsufficientDataError("empty dataset")
    r = ds.ratings.astype(float)
    user_sum = np.bincount(ds.user_codes, weights=r, minlength=ds.n_users)
    user_cnt = ds.user_counts().astype(float)
    item_sum = np.bincount(ds.item_codes, weights=r, minlength=ds.n_items)
    item_cnt = ds.item_counts().astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        user_loo = (user_sum[ds.user_codes] - r) / (user_cnt[ds.user_codes] - 1.0)
        item_loo = (item_sum[ds.item_codes] - r) / (item_cnt[ds.item_codes] - 1.0)
    defined = (user_cnt[ds.user_codes] >= 2) & (item_cnt[ds.item_codes] >= 2)
    return user_loo, item_loo, defined


def _standardize_named(values, name: str) -> np.ndarray:
    try:
        return standardize(values)
    except DegenerateColumnError as err:
        raise DegenerateColumnError(f"column {name!r}: {err}") from err


# ---------------------------------------------------------------- designs

def build_single_rating_design(ds: Dataset):
    """One design row per rating, as in the per-rating regression tables.

    Columns: group dummies (period if present, else treatment, else a plain
    intercept; no global intercept next to dummies), a personalized flag when
    recommender classes are known, standardized leave-one-out means of the
    user's and item's other ratings, standardized user/item rating counts,
    interactions of each mean with the non-reference group dummies, and
    interactions of each mean with its count.  Response: the raw rating.

    Rows whose user or item has fewer than 2 ratings are excluded (their
    leave-one-out mean is undefined); exclusion counts land in the report.
    Leave-one-out means and counts are computed on the dataset as given.
    """
    if len(ds) == 0:
        raise InsufficientDataError("empty dataset")
    user_loo, item_loo, defined = leave_one_out_means(ds)
    report = {
        "rows_in": len(ds),
        "rows_used": int(defined.sum()),
        "rows_excluded_undefined_loo": int((~defined).sum()),
    }
    if defined.sum() < 3:
        raise InsufficientDataError("fewer than 3 rows with defined leave-one-out means")

    keep = np.flatnonzero(defined)
    field, group_labels, group_codes = ds._group_info()
    g = group_codes[keep]
    # only the group levels that survive the exclusions get a dummy column
    levels = [k for k in range(len(group_labels)) if np.any(g == k)]
    user_cnt = ds.user_counts().astype(float)[ds.user_codes[keep]]
    item_cnt = ds.item_counts().astype(float)[ds.item_codes[keep]]
    mu = _standardize_named(user_loo[keep], "mean_user_rating_others")
    mi = _standardize_named(item_loo[keep], "mean_item_rating_others")
    cu = _standardize_named(user_cnt, "user_ratings_count")
    ci = _standardize_named(item_cnt, "item_ratings_count")

    names: list = []
    cols: list = []
    if field is None or len(levels) < 2:
        names.append("const")
        cols.append(np.ones(keep.size))
        field = None
    else:
        for k in levels:
            names.append(f"{field}[{group_labels[k]}]")
            cols.append((g == k).astype(float))
    if ds.has_classes() and PERSONALIZED in ds.class_labels:
        flag = (ds.class_codes[keep] == ds.class_labels.index(PERSONALIZED)).astype(float)
        if 0.0 < flag.mean() < 1.0:    # a constant flag would be collinear
            names.append("personalized")
            cols.append(flag)
        else:
            report["personalized_flag_constant"] = True

    names.append("mean_user_rating_others")
    cols.append(mu)
    if field is not None:
        for k in levels[1:]:   # first surviving level is the reference
            names.append(f"mean_user_rating_others:{field}[T.{group_labels[k]}]")
            cols.append(mu * (g == k))
    names.append("mean_item_rating_others")
    cols.append(mi)
    if field is not None:
        for k in levels[1:]:
            names.append(f"mean_item_rating_others:{field}[T.{group_labels[k]}]")
            cols.append(mi * (g == k))
    names.append("user_ratings_count")
    cols.append(cu)
    names.append("mean_user_rating_others:user_ratings_count")
    cols.append(mu * cu)
    names.append("item_ratings_count")
    cols.append(ci)
    names.append("mean_item_rating_others:item_ratings_count")
    cols.append(mi * ci)

    design = DesignMatrix(names=names, X=np.column_stack(cols),
                          y=ds.ratings[keep].astype(float))
    return design, report


@dataclass
class SplitPair:
    train: Dataset
    test: Dataset


def stratified_split(ds: Dataset, seed: int = 0) -> SplitPair:
    """Split records into two halves, stratified by item x group.

    Within each stratum the records are shuffled and assigned alternately,
    so the two halves differ by at most one record per stratum.  The group
    is the period when present, else the treatment, else nothing.
    """
    if len(ds) == 0:
        raise InsufficientDataError("cannot split an empty dataset")
    _, _, group_codes = ds._group_info()
    strata = ds.item_codes.astype(np.int64) * (int(group_codes.max()) + 1) + group_codes
    rng = substream(seed, "stratified-split")
    train_mask = np.zeros(len(ds), dtype=bool)
    for s in np.unique(strata):
        rows = np.flatnonzero(strata == s)
        perm = rows[rng.permutation(rows.size)]
        start = int(rng.integers(0, 2))
        train_mask[perm[start::2]] = True
    return SplitPair(train=ds.subset(train_mask), test=ds.subset(~train_mask))


def build_mean_consistency_design(split: SplitPair, with_frac_personalized: bool = False):
    """One row per item x group cell: does the test half agree with train means?

    The response is the cell's mean test rating (standardized).  Covariates,
    all computed within the cell's group and standardized across rows:
    the two-stage user covariate (mean over the cell's test raters of each
    rater's train-half mean), the item's train-half mean, the item's train
    rating count, the mean train rating count of those test raters, the two
    mean x count interactions, and group dummies (no global intercept).
    With `with_frac_personalized`, adds the fraction of the cell's test
    ratings that came from the personalized recommender class.

    Cells are dropped (and reported) when the item has no train ratings in
    the group or none of its test raters do.
    """
    tr, te = split.train, split.test
    if len(tr) == 0 or len(te) == 0:
        raise InsufficientDataError("both split halves must be non-empty")
    if with_frac_personalized and not te.has_classes():
        raise ConfigError("with_frac_personalized needs recommender_class on all test records")

    field_tr = tr.group_field()
    field_te = te.group_field()
    if field_tr != field_te:
        raise DataError("train and test halves disagree on the grouping field")
    field = field_te
    _, group_labels_te, gcodes_te = te._group_info()
    _, group_labels_tr, gcodes_tr = tr._group_info()

    # train-side lookup tables keyed by (user label, group label) / (item label, group label)
    tr_r = tr.ratings.astype(float)
    user_train_sum: dict = {}
    user_train_cnt: dict = {}
    for row in range(len(tr)):
        key = (tr.user_labels[tr.user_codes[row]], group_labels_tr[gcodes_tr[row]])
        user_train_sum[key] = user_train_sum.get(key, 0.0) + tr_r[row]
        user_train_cnt[key] = user_train_cnt.get(key, 0) + 1
    item_train_sum: dict = {}
    item_train_cnt: dict = {}
    for row in range(len(tr)):
        key = (tr.item_labels[tr.item_codes[row]], group_labels_tr[gcodes_tr[row]])
        item_train_sum[key] = item_train_sum.get(key, 0.0) + tr_r[row]
        item_train_cnt[key] = item_train_cnt.get(key, 0) + 1

    report = {"cells_total": 0, "cells_used": 0,
              "excluded_item_missing_from_train": 0,
              "excluded_no_train_raters": 0}
    rows_y: list = []
    rows_user_mean: list = []
    rows_item_mean: list = []
    rows_item_cnt: list = []
    rows_user_cnt: list = []
    rows_frac_pers: list = []
    rows_group: list = []
    row_labels: list = []

    te_r = te.ratings.astype(float)
    cell_key = te.item_codes.astype(np.int64) * len(group_labels_te) + gcodes_te
    for cell in np.unique(cell_key):
        rows = np.flatnonzero(cell_key == cell)
        item_label = te.item_labels[te.item_codes[rows[0]]]
        group_label = group_labels_te[gcodes_te[rows[0]]]
        report["cells_total"] += 1
        ikey = (item_label, group_label)
        if ikey not in item_train_cnt:
            report["excluded_item_missing_from_train"] += 1
            continue
        rater_means: list = []
        rater_counts: list = []
        for u in sorted({te.user_labels[te.user_codes[j]] for j in rows}):
            ukey = (u, group_label)
            if ukey in user_train_cnt:
                rater_means.append(user_train_sum[ukey] / user_train_cnt[ukey])
                rater_counts.append(user_train_cnt[ukey])
        if not rater_means:
            report["excluded_no_train_raters"] += 1
            continue
        report["cells_used"] += 1
        rows_y.append(te_r[rows].mean())
        rows_user_mean.append(float(np.mean(rater_means)))
        rows_item_mean.append(item_train_sum[ikey] / item_train_cnt[ikey])
        rows_item_cnt.append(float(item_train_cnt[ikey]))
        rows_user_cnt.append(float(np.mean(rater_counts)))
        rows_group.append(group_label)
        row_labels.append(f"{item_label}|{group_label}")
        if with_frac_personalized:
            pers = sum(1 for j in rows
                       if te.class_labels[te.class_codes[j]] == PERSONALIZED)
            rows_frac_pers.append(pers / rows.size)

    if report["cells_used"] < 3:
        raise InsufficientDataError("fewer than 3 usable item x group cells")

    y = _standardize_named(np.asarray(rows_y), "mean_item_rating_test")
    mu = _standardize_named(np.asarray(rows_user_mean), "mean_user_rating_train")
    mi = _standardize_named(np.asarray(rows_item_mean), "mean_item_rating_train")
    ci = _standardize_named(np.asarray(rows_item_cnt), "item_ratings_count_train")
    cu = _standardize_named(np.asarray(rows_user_cnt), "user_ratings_count_train")

    names: list = []
    cols: list = []
    used_levels = sorted(set(rows_group))
    if field is None or len(used_levels) < 2:
        names.append("const")
        cols.append(np.ones(len(rows_y)))
    else:
        for label in used_levels:
            names.append(f"{field}[{label}]")
            cols.append(np.asarray([1.0 if gl == label else 0.0 for gl in rows_group]))
    if with_frac_personalized:
        names.append("frac_personalized_test")
        cols.append(_standardize_named(np.asarray(rows_frac_pers), "frac_personalized_test"))
    names.extend(["mean_user_rating_train", "mean_item_rating_train",
                  "item_ratings_count_train", "mean_item_rating_train:item_ratings_count_train",
                  "user_ratings_count_train", "mean_user_rating_train:user_ratings_count_train"])
    cols.extend([mu, mi, ci, mi * ci, cu, mu * cu])
    design = DesignMatrix(names=names, X=np.column_stack(cols), y=y, row_labels=row_labels)
    return design, report


# ---------------------------------------------------------------- descriptives

def _user_mean_table(ds: Dataset):
    r = ds.ratings.astype(float)
    sums = np.bincount(ds.user_codes, weights=r, minlength=ds.n_users)
    cnts = ds.user_counts().astype(float)
    return sums / cnts, cnts


def user_mean_scores(ds: Dataset) -> np.ndarray:
    """Mean rating per user, aligned with ``ds.user_labels``."""
    if len(ds) == 0:
        raise InsufficientDataError("empty dataset")
    return _user_mean_table(ds)[0]


def group_partition(ds: Dataset):
    """(field, [(label, subset), ...]) for the dataset's grouping column.

    The field is "period" when every record has one, else "treatment" when
    every record has one, else None with the whole dataset under "all".
    """
    field, labels, codes = ds._group_info()
    if field is None:
        return None, [("all", ds)]
    return field, [(label, ds.subset(codes == k)) for k, label in enumerate(labels)]


def _months(ds: Dataset) -> np.ndarray:
    out = np.empty(len(ds), dtype=np.int64)
    for j, ts in enumerate(ds.timestamps):
        d = datetime.fromtimestamp(int(ts), tz=timezone.utc)
        out[j] = d.year * 12 + (d.month - 1)
    return out


def _month_label(code: int) -> str:
    return f"{code // 12:04d}-{code % 12 + 1:02d}"


def default_retention_buckets(max_count: int):
    """Doubling bucket edges 1, 2, 4, ... covering max_count."""
    edges = [1]
    while edges[-1] <= max_count:
        edges.append(edges[-1] * 2)
    return edges


def descriptive_suite(ds: Dataset, histogram_bins: int = 20,
                      min_class_ratings: int = 10, retention_buckets=None) -> dict:
    """Bundle of descriptive tables; analyses missing their fields are skipped.

    Returns {"tables": {name: list-of-dict rows}, "skipped": {name: reason}}.
    """
    if len(ds) == 0:
        raise InsufficientDataError("empty dataset")
    if histogram_bins < 1:
        raise ConfigError("histogram_bins must be >= 1")
    tables: dict = {}
    skipped: dict = {}
    field, group_labels, group_codes = ds._group_info()

    def groups():
        for k, label in enumerate(group_labels):
            yield label, ds.subset(group_codes == k) if field is not None else ds

    # 1. rating fractions per group (per-user first, then across users)
    rows = []
    for label, sub in groups():
        for option in (0, 1, 2):
            per_user = np.bincount(sub.user_codes,
                                   weights=(sub.ratings == option).astype(float),
                                   minlength=sub.n_users) / sub.user_counts()
            rows.append({"group": label, "option": ("dislike", "like", "superlike")[option],
                         "fraction": float(np.mean(per_user))})
    tables["rating_fractions"] = rows

    # 2. histogram of per-user mean scores on [0, 2]
    rows = []
    edges = np.linspace(0.0, 2.0, histogram_bins + 1)
    for label, sub in groups():
        means, _ = _user_mean_table(sub)
        counts, _ = np.histogram(means, bins=edges)
        for b in range(histogram_bins):
            rows.append({"group": label, "bin_left": float(edges[b]),
                         "bin_right": float(edges[b + 1]), "count": int(counts[b])})
    tables["user_mean_histogram"] = rows

    # 3 & 4 need recommender classes
    if ds.has_classes():
        pers_mask = np.array([ds.class_labels[c] == PERSONALIZED for c in ds.class_codes])
        r = ds.ratings.astype(float)
        rows3, rows4 = [], []
        for k, item in enumerate(ds.item_labels):
            mine = ds.item_codes == k
            n_pers = int(np.sum(mine & pers_mask))
            n_rand = int(np.sum(mine & ~pers_mask))
            if n_pers > min_class_ratings and n_rand > min_class_ratings:
                rows3.append({
                    "item_id": item,
                    "mean_personalized": float(r[mine & pers_mask].mean()),
                    "mean_random": float(r[mine & ~pers_mask].mean()),
                    "n_personalized": n_pers, "n_random": n_rand,
                })
            n_all = int(mine.sum())
            rows4.append({"item_id": item,
                          "frac_personalized": n_pers / n_all,
                          "mean_rating": float(r[mine].mean()),
                          "n_ratings": n_all})
        tables["personalized_vs_random_item_means"] = rows3
        tables["frac_personalized_vs_mean"] = rows4
    else:
        reason = "requires recommender_class on every record"
        skipped["personalized_vs_random_item_means"] = reason
        skipped["frac_personalized_vs_mean"] = reason

    # 5. user retention: share of users per rating-count bucket
    rows = []
    for label, sub in groups():
        counts = sub.user_counts()
        edges_r = retention_buckets if retention_buckets is not None \
            else default_retention_buckets(int(counts.max()))
        for b in range(len(edges_r) - 1):
            lo, hi = edges_r[b], edges_r[b + 1]
            share = float(np.mean((counts >= lo) & (counts < hi)))
            rows.append({"group": label, "bucket_low": int(lo), "bucket_high": int(hi),
                         "fraction_of_users": share})
    tables["user_retention"] = rows

    # 6. correlation of user means across consecutive calendar months
    months = _months(ds)
    rows = []
    observed = np.unique(months)
    for m in observed:
        if m + 1 not in observed:
            continue
        a = ds.subset(months == m)
        b = ds.subset(months == m + 1)
        means_a, _ = _user_mean_table(a)
        means_b, _ = _user_mean_table(b)
        shared = sorted(set(a.user_labels) & set(b.user_labels))
        if len(shared) < 2:
            continue
        va = np.array([means_a[a.user_labels.index(u)] for u in shared])
        vb = np.array([means_b[b.user_labels.index(u)] for u in shared])
        if va.std() == 0 or vb.std() == 0:
            continue
        da, db = va - va.mean(), vb - vb.mean()
        corr = float(np.sum(da * db) / np.sqrt(np.sum(da * da) * np.sum(db * db)))
        rows.append({"month_a": _month_label(int(m)), "month_b": _month_label(int(m + 1)),
                     "n_users": len(shared), "correlation": corr})
    tables["month_pair_correlations"] = rows

    # 7. per-treatment before/after correlation, split by recommender class
    if (ds.has_classes() and len(ds.treatment_labels) > 0
            and np.all(ds.treatment_codes >= 0) and len(ds.period_labels) == 2
            and bool(np.all(ds.period_codes >= 0))):
        rows = []
        for t_idx, t_label in enumerate(ds.treatment_labels):
            for c_idx, c_label in enumerate(ds.class_labels):
                sub = ds.subset((ds.treatment_codes == t_idx) & (ds.class_codes == c_idx))
                if len(sub) == 0:
                    continue
                p0 = sub.subset(sub.period_codes == 0)
                p1 = sub.subset(sub.period_codes == 1)
                if len(p0) == 0 or len(p1) == 0:
                    continue
                m0, _ = _user_mean_table(p0)
                m1, _ = _user_mean_table(p1)
                shared = sorted(set(p0.user_labels) & set(p1.user_labels))
                if len(shared) < 2:
                    continue
                v0 = np.array([m0[p0.user_labels.index(u)] for u in shared])
                v1 = np.array([m1[p1.user_labels.index(u)] for u in shared])
                if v0.std() == 0 or v1.std() == 0:
                    continue
                d0, d1 = v0 - v0.mean(), v1 - v1.mean()
                corr = float(np.sum(d0 * d1) / np.sqrt(np.sum(d0 * d0) * np.sum(d1 * d1)))
                rows.append({"treatment": t_label, "recommender_class": c_label,
                             "n_users": len(shared), "correlation": corr})
        tables["treatment_before_after_correlations"] = rows
    else:
        skipped["treatment_before_after_correlations"] = \
            "requires treatment, two periods, and recommender_class on every record"

    return {"tables": tables, "skipped": skipped}
