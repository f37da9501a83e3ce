"""Six filter scorers, per-method score normalization, mean aggregation, and
threshold selection.

Contingency-table scorers (information gain, gain ratio, symmetric
uncertainty, chi-squared) work on binned feature values versus the class; the
F-ratio works on the raw continuous values grouped by class; the relief
weights work on the normalized continuous values with a Manhattan
nearest-neighbor search. Entropies are in bits.
"""

import csv
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .discretize import BinEdges, apply_bins, equal_width_bins
from .tabular import ConstantColumnError, Table

METHODS = ("ig", "gain_ratio", "relief", "su", "chi2", "anova_f")

SCORES_CSV_HEADER = ("feature_index", "feature_name", "ig", "gain_ratio",
                     "relief", "su", "chi2", "anova_f", "mean_score")


class ScoringError(ValueError):
    pass


class ContingencyTable:
    """Joint counts of feature bins (rows) against classes (columns)."""

    def __init__(self, counts):
        counts = np.asarray(counts, dtype=np.int64)
        if counts.ndim != 2:
            raise ScoringError("contingency counts must be a 2-D matrix")
        if (counts < 0).any():
            raise ScoringError("contingency counts must be non-negative")
        self.counts = counts
        self.row_totals = counts.sum(axis=1)
        self.col_totals = counts.sum(axis=0)
        self.total = int(counts.sum())

    @classmethod
    def from_vectors(cls, bins, labels) -> "ContingencyTable":
        bins = np.asarray(bins, dtype=np.int64)
        labels = np.asarray(labels)
        if bins.shape != labels.shape:
            raise ScoringError("bin and label vectors differ in length")
        classes, class_idx = np.unique(labels, return_inverse=True)
        n_bins = int(bins.max()) + 1 if bins.size else 0
        counts = np.zeros((n_bins, len(classes)), dtype=np.int64)
        np.add.at(counts, (bins, class_idx), 1)
        return cls(counts)

    def transposed(self) -> "ContingencyTable":
        return ContingencyTable(self.counts.T)


def entropy(counts) -> float:
    """Shannon entropy in bits of a count vector; 0*log(0) contributes 0."""
    c = np.asarray(counts, dtype=np.float64).ravel()
    if (c < 0).any():
        raise ScoringError("counts must be non-negative")
    total = c.sum()
    if total <= 0:
        raise ScoringError("entropy of an all-zero count vector is undefined")
    p = c[c > 0] / total
    return float(-(p * np.log2(p)).sum())


def conditional_entropy(ct: ContingencyTable) -> float:
    """Class entropy remaining after observing the bin: sum_i (R_i/N) * H(row i)."""
    if ct.total == 0:
        raise ScoringError("empty contingency table")
    out = 0.0
    for row, r_total in zip(ct.counts, ct.row_totals):
        if r_total > 0:
            out += (r_total / ct.total) * entropy(row)
    return out


def information_gain(ct: ContingencyTable) -> float:
    """H(class) - H(class | bin); symmetric in the two variables."""
    return entropy(ct.col_totals) - conditional_entropy(ct)


def split_info(ct: ContingencyTable) -> float:
    """Entropy of the bin-occupancy distribution."""
    return entropy(ct.row_totals)


def gain_ratio(ct: ContingencyTable) -> float:
    """Information gain divided by split info; defined as 0 for a single-valued feature."""
    si = split_info(ct)
    if si == 0.0:
        warnings.warn("gain ratio of a single-valued feature defined as 0", stacklevel=2)
        return 0.0
    return information_gain(ct) / si


def symmetric_uncertainty(ct: ContingencyTable) -> float:
    """2*IG / (H(bin) + H(class)), in [0, 1]; 0 when both entropies vanish."""
    hx = entropy(ct.row_totals)
    hy = entropy(ct.col_totals)
    if hx + hy == 0.0:
        return 0.0
    return 2.0 * information_gain(ct) / (hx + hy)


def chi_squared(ct: ContingencyTable) -> float:
    """Divergence of observed counts from the independence expectation.

    Empty rows and columns are pruned before the sum, so every expected
    count is positive.
    """
    keep_rows = ct.row_totals > 0
    keep_cols = ct.col_totals > 0
    counts = ct.counts[np.ix_(keep_rows, keep_cols)]
    if counts.size == 0:
        raise ScoringError("contingency table is empty after pruning zero marginals")
    r = counts.sum(axis=1, dtype=np.float64)
    b = counts.sum(axis=0, dtype=np.float64)
    n = counts.sum(dtype=np.float64)
    expected = np.outer(r, b) / n
    return float(((counts - expected) ** 2 / expected).sum())


@dataclass(frozen=True)
class GroupStats:
    """Per-class summary of one feature: sizes, means, sample variances."""

    sizes: tuple[int, ...]
    means: tuple[float, ...]
    variances: tuple[float, ...]
    grand_mean: float

    @property
    def group_count(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @classmethod
    def from_groups(cls, groups) -> "GroupStats":
        sizes, means, variances, total_sum = [], [], [], 0.0
        for g in groups:
            g = np.asarray(g, dtype=np.float64)
            if g.size == 0:
                raise ScoringError("empty group")
            sizes.append(int(g.size))
            means.append(float(g.mean()))
            variances.append(float(g.var(ddof=1)) if g.size > 1 else 0.0)
            total_sum += float(g.sum())
        grand = total_sum / sum(sizes)
        return cls(tuple(sizes), tuple(means), tuple(variances), grand)

    @classmethod
    def from_labeled(cls, values, labels) -> "GroupStats":
        values = np.asarray(values, dtype=np.float64)
        labels = np.asarray(labels)
        classes = np.unique(labels)
        return cls.from_groups([values[labels == c] for c in classes])


def anova_f(gs: GroupStats) -> float:
    """One-way F ratio: (SSB/(K-1)) / (SSW/(N-K)).

    SSW = sum (n_i - 1) * var_i, SSB = sum n_i * (mean_i - grand_mean)^2.
    Returns 0 when the group means coincide, +inf when within-group
    variation vanishes while between-group variation does not.
    """
    k = gs.group_count
    n = gs.total
    if k < 2:
        raise ScoringError(f"need at least 2 groups, got {k}")
    if n <= k:
        raise ScoringError(f"need more observations ({n}) than groups ({k})")
    ssw = sum((ni - 1) * vi for ni, vi in zip(gs.sizes, gs.variances))
    ssb = sum(ni * (mi - gs.grand_mean) ** 2 for ni, mi in zip(gs.sizes, gs.means))
    if ssb == 0.0:
        return 0.0
    if ssw == 0.0:
        return float("inf")
    return (ssb / (k - 1)) / (ssw / (n - k))


def _bin_matrix(t: Table, bins: dict[str, BinEdges]) -> np.ndarray:
    """Per-feature bin indices; features without edges (constant) map to bin 0."""
    li = t.label_index
    cols = []
    for i, name in enumerate(t.column_names):
        if i == li:
            continue
        edges = bins.get(name)
        if edges is None:
            cols.append(np.zeros(t.row_count, dtype=np.int64))
        else:
            cols.append(apply_bins(t.columns[i], edges))
    if not cols:
        return np.empty((t.row_count, 0), dtype=np.int64)
    return np.column_stack(cols)


def relief_weights(t: Table, m: int, seed: int,
                   bins: dict[str, BinEdges] | None = None,
                   bin_count: int = 10) -> np.ndarray:
    """Relief feature weights from m seeded samples drawn without replacement.

    For each sampled row the nearest same-class hit and nearest other-class
    miss are found by Manhattan distance over all (normalized) features, ties
    resolved to the lowest row index, the row itself excluded. The 0/1
    difference indicator for the weight update compares binned feature values,
    since exact equality of raw continuous values is vacuous. Weights stay in
    [-1, 1] because each of the m updates moves a weight by at most 1/m.
    """
    X = t.feature_matrix()
    y = t.labels()
    n, d = X.shape
    classes = np.unique(y)
    if len(classes) != 2:
        raise ScoringError(f"relief needs binary labels, found {len(classes)} classes")
    for c in classes:
        if (y == c).sum() < 2:
            raise ScoringError(f"class {c:g} has fewer than 2 rows; no hit exists")
    if not 1 <= m <= n:
        raise ScoringError(f"sample size m={m} must lie in [1, {n}]")

    if bins is None:
        bins = {}
        for name in t.feature_names:
            try:
                bins[name] = equal_width_bins(t.column(name), bin_count, feature=name)
            except ConstantColumnError:
                pass
    binned = _bin_matrix(t, bins)

    rng = np.random.default_rng(seed)
    sample = rng.choice(n, size=m, replace=False)
    # integer tallies, one division at the end: exact 1.0 / 0.0 in the
    # label-identical and constant-feature cases
    delta = np.zeros(d, dtype=np.int64)
    block = max(1, int(2e7) // max(d, 1))  # bound the temporary |X - X[r]| matrix
    dist = np.empty(n)
    for r in sample:
        for start in range(0, n, block):
            stop = min(start + block, n)
            dist[start:stop] = np.abs(X[start:stop] - X[r]).sum(axis=1)
        dist[r] = np.inf
        same = y == y[r]
        same[r] = False
        hit = int(np.argmin(np.where(same, dist, np.inf)))
        miss = int(np.argmin(np.where(~same, dist, np.inf)))
        delta -= binned[r] != binned[hit]
        delta += binned[r] != binned[miss]
    return delta / m


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-feature scores for the six methods, raw and (later) normalized."""

    feature_names: tuple[str, ...]
    raw: np.ndarray
    normalized: np.ndarray | None = None
    mean_score: np.ndarray | None = None

    def __post_init__(self):
        if self.raw.shape != (len(self.feature_names), len(METHODS)):
            raise ScoringError(f"raw score matrix must be (n_features, {len(METHODS)})")


def score_all(t: Table, bins: dict[str, BinEdges], relief_m: int | None = None,
              seed: int = 0) -> ScoreMatrix:
    """Raw scores for every non-label feature of a cleaned, normalized,
    binarized table."""
    names = t.feature_names
    if not names:
        raise ScoringError("table has no feature columns")
    y = t.labels()
    if len(np.unique(y)) < 2:
        raise ScoringError("labels are single-valued; nothing to score against")
    n = t.row_count
    m = min(n, 5000) if relief_m is None else relief_m

    raw = np.zeros((len(names), len(METHODS)))
    relief = relief_weights(t, m, seed, bins=bins)
    for j, name in enumerate(names):
        col = t.column(name)
        edges = bins.get(name)
        binned = apply_bins(col, edges) if edges is not None else np.zeros(n, dtype=np.int64)
        ct = ContingencyTable.from_vectors(binned, y)
        raw[j, METHODS.index("ig")] = information_gain(ct)
        raw[j, METHODS.index("gain_ratio")] = gain_ratio(ct)
        raw[j, METHODS.index("su")] = symmetric_uncertainty(ct)
        raw[j, METHODS.index("chi2")] = chi_squared(ct)
        raw[j, METHODS.index("anova_f")] = anova_f(GroupStats.from_labeled(col, y))
    raw[:, METHODS.index("relief")] = relief
    return ScoreMatrix(names, raw)


def normalize_scores(sm: ScoreMatrix) -> ScoreMatrix:
    """Min-max rescale each method column to [0, 1] across features.

    +inf sentinels count as the column maximum; a constant column maps to
    all zeros (the method expresses no preference).
    """
    norm = np.empty_like(sm.raw)
    for k, method in enumerate(METHODS):
        col = sm.raw[:, k].copy()
        infinite = np.isinf(col)
        if infinite.any():
            finite = col[~infinite]
            col[infinite] = finite.max() if finite.size else 0.0
        lo = col.min()
        hi = col.max()
        if hi == lo:
            warnings.warn(f"method {method!r} scored all features equally; "
                          "normalized column set to 0", stacklevel=2)
            norm[:, k] = 0.0
        else:
            norm[:, k] = (col - lo) / (hi - lo)
    return replace(sm, normalized=norm, mean_score=None)


def aggregate_mean(sm: ScoreMatrix) -> ScoreMatrix:
    """Arithmetic mean of the six normalized method scores per feature."""
    if sm.normalized is None:
        raise ScoringError("normalize_scores must run before aggregation")
    return replace(sm, mean_score=sm.normalized.mean(axis=1))


@dataclass(frozen=True)
class ThresholdSelection:
    """Features whose mean score reaches the threshold, best first."""

    threshold: float
    features: tuple[tuple[int, str, float], ...]

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _, _ in self.features)

    def names(self) -> tuple[str, ...]:
        return tuple(n for _, n, _ in self.features)

    def to_json(self) -> dict:
        return {"threshold": self.threshold,
                "features": [{"index": i, "name": n, "mean_score": s}
                             for i, n, s in self.features]}


def select_by_threshold(sm: ScoreMatrix, threshold: float) -> ThresholdSelection:
    """Features with mean_score >= threshold, sorted by score descending,
    ties by ascending feature index."""
    if sm.mean_score is None:
        raise ScoringError("aggregate_mean must run before selection")
    picked = [(i, sm.feature_names[i], float(sm.mean_score[i]))
              for i in range(len(sm.feature_names)) if sm.mean_score[i] >= threshold]
    picked.sort(key=lambda item: (-item[2], item[0]))
    if not picked:
        warnings.warn(f"no feature reaches threshold {threshold:g}", stacklevel=2)
    return ThresholdSelection(threshold, tuple(picked))


def write_scores_csv(sm: ScoreMatrix, path) -> None:
    """Normalized scores plus the mean, 6 decimal places, feature-index order."""
    if sm.normalized is None or sm.mean_score is None:
        raise ScoringError("scores must be normalized and aggregated before writing")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCORES_CSV_HEADER)
        for i, name in enumerate(sm.feature_names):
            row = [str(i), name]
            row += [f"{sm.normalized[i, k]:.6f}" for k in range(len(METHODS))]
            row.append(f"{sm.mean_score[i]:.6f}")
            writer.writerow(row)
