"""Acceptance suite: one test per criterion, one PASS line printed per test.

Run with `pytest tests/test_acceptance.py -v -s`. Criterion 12 needs the real
CSE-CIC-IDS2018 CSV files and is skipped unless FLOWSIEVE_IDS2018_DIR points
at a directory containing them.
"""

import os
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

import reference as ref
from flowsieve.classify import (ForestParams, LogisticParams, NaiveBayesParams,
                                SvmParams, TreeParams, predict_arrays,
                                train_forest, train_logistic,
                                train_naive_bayes, train_svm, train_tree)
from flowsieve.config import parse_config
from flowsieve.discretize import apply_bins, equal_width_bins, table_bin_edges
from flowsieve.evaluation import ConfusionMatrix, evaluate, metrics
from flowsieve.feature_selection import (ContingencyTable, GroupStats,
                                         aggregate_mean, anova_f, chi_squared,
                                         gain_ratio, information_gain,
                                         normalize_scores, relief_weights,
                                         score_all, select_by_threshold,
                                         symmetric_uncertainty)
from flowsieve.pipeline import cmd_run
from flowsieve.sampling import SplitSpec, split_table
from flowsieve.tabular import (drop_invalid_rows, drop_single_valued_columns,
                               load_csv, minmax_normalize, split_by_attack)

from helpers import blobs_2d, make_table, random_table


def _report(n: int, text: str) -> None:
    print(f"\nPASS criterion {n:02d}: {text}")


def test_criterion_01_scorer_oracle_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1001)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(200):
            table = ref.random_contingency(rng, max_rows=5, max_cols=4, max_total=200)
            ct = ContingencyTable(table)
            assert abs(information_gain(ct) - ref.joint_mutual_information(table)) < 1e-9
            assert abs(gain_ratio(ct) - ref.gain_ratio_ref(table)) < 1e-9
            assert abs(symmetric_uncertainty(ct)
                       - ref.symmetric_uncertainty_ref(table)) < 1e-9
            assert abs(chi_squared(ct) - ref.chi_squared_ref(table)) < 1e-9
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _report(1, f"IG/GR/SU/Chi2 match brute force on 200 random tables "
               f"within 1e-9 ({elapsed:.2f}s)")


def test_criterion_02_ig_symmetry_and_su_range():
    rng = np.random.default_rng(1001)  # the same 200 tables
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(200):
            table = ref.random_contingency(rng, max_rows=5, max_cols=4, max_total=200)
            ct = ContingencyTable(table)
            assert abs(information_gain(ct) - information_gain(ct.transposed())) < 1e-12
            assert 0.0 <= symmetric_uncertainty(ct) <= 1.0
    _report(2, "|IG - IG^T| < 1e-12 and SU in [0,1] on the same 200 tables")


def test_criterion_03_anova_identity_and_equal_means():
    rng = np.random.default_rng(33)
    for _ in range(100):
        n1 = int(rng.integers(2, 250))
        n2 = int(rng.integers(2, min(250, 500 - n1)))
        g1 = rng.normal(rng.uniform(-3, 3), rng.uniform(0.2, 4), n1)
        g2 = rng.normal(rng.uniform(-3, 3), rng.uniform(0.2, 4), n2)
        ssw, ssb, sst, _ = ref.anova_ref([g1.tolist(), g2.tolist()])
        assert ssw + ssb == pytest.approx(sst, rel=1e-9)
        gs = GroupStats.from_groups([g1, g2])
        assert (gs.group_count - 1) >= 1  # sanity: F is well-defined
        anova_f(gs)
    for _ in range(20):
        g1 = rng.integers(0, 20, size=int(rng.integers(2, 30))).astype(float)
        g2 = g1[::-1].copy()  # same multiset: means exactly equal
        f = anova_f(GroupStats.from_groups([g1, g2]))
        assert f == 0.0
    _report(3, "SST = SSW + SSB within 1e-9 relative on 100 samples; "
               "equal means give F = 0 exactly")


def test_criterion_04_chi2_hand_values():
    assert chi_squared(ContingencyTable([[10, 0], [0, 10]])) == 20.0
    rng = np.random.default_rng(44)
    for _ in range(25):
        r = rng.integers(1, 9, size=int(rng.integers(1, 5)))
        c = rng.integers(1, 9, size=int(rng.integers(2, 5)))
        outer = np.outer(r, c)
        assert abs(chi_squared(ContingencyTable(outer))) < 1e-10
    _report(4, "chi2([[10,0],[0,10]]) = 20 exactly; outer products score 0 within 1e-10")


def test_criterion_05_relief_oracle():
    rng = np.random.default_rng(55)
    y = (rng.random(200) < 0.5).astype(float)
    X = rng.random((200, 3))
    t = make_table({"ident": y.copy(), "const": np.full(200, 0.25),
                    "r0": X[:, 0], "r1": X[:, 1], "r2": X[:, 2]}, y)
    bins = {}
    for name in t.feature_names:
        if name != "const":
            bins[name] = equal_width_bins(t.column(name), 10, feature=name)
    got = relief_weights(t, m=200, seed=5, bins=bins)
    binned = np.column_stack(
        [apply_bins(t.column(n), bins[n]) if n in bins else np.zeros(200, dtype=int)
         for n in t.feature_names])
    want = ref.relief_ref(t.feature_matrix().tolist(), y.tolist(),
                          binned.tolist(), range(200), 200)
    assert np.allclose(got, want, atol=1e-12)
    assert got[0] == 1.0   # feature identical to the label
    assert got[1] == 0.0   # constant feature
    _report(5, "relief weights match the exhaustive reference within 1e-12 "
               "(m = N = 200); label-clone weight 1.0, constant weight 0.0")


def test_criterion_06_minmax_normalization():
    rng = np.random.default_rng(66)
    for _ in range(20):
        n = int(rng.integers(3, 300))
        t = make_table({"a": rng.normal(size=n) * rng.uniform(0.1, 100),
                        "b": rng.random(n) + 5}, (rng.random(n) < 0.5).astype(float))
        once = minmax_normalize(t)
        for name in ("a", "b"):
            col = once.column(name)
            assert col.min() == 0.0 and col.max() == 1.0
        twice = minmax_normalize(once)
        for name in ("a", "b"):
            assert np.array_equal(once.column(name), twice.column(name))
    _report(6, "normalized columns attain exactly 0 and 1; second application "
               "is the identity")


def test_criterion_07_classifier_sanity():
    t0 = time.perf_counter()
    t = blobs_2d(100, seed=77)  # 200 rows
    def acc(model):
        labels, _ = predict_arrays(model, t)
        return (labels == t.labels()).mean()
    assert acc(train_logistic(t, LogisticParams(learning_rate=1.0, epochs=400))) >= 0.99
    assert acc(train_svm(t, SvmParams(c=10.0, epochs=20, seed=0))) >= 0.99
    assert acc(train_tree(t, TreeParams())) >= 0.99
    assert acc(train_forest(t, ForestParams(tree_count=15, seed=1))) >= 0.99
    assert acc(train_naive_bayes(t, NaiveBayesParams())) >= 0.95
    xor = make_table({"x": [0.0, 0.0, 1.0, 1.0], "y": [0.0, 1.0, 0.0, 1.0]},
                     [0.0, 1.0, 1.0, 0.0])
    xl, _ = predict_arrays(train_tree(xor, TreeParams()), xor)
    assert xl.tolist() == [0, 1, 1, 0]
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report(7, f"LR/SVM/Tree/Forest >= 0.99, NB >= 0.95 on separable blobs; "
               f"tree solves XOR exactly ({elapsed:.2f}s)")


def test_criterion_08_forest_degeneracy():
    rng = np.random.default_rng(88)
    for i in range(50):
        t = random_table(np.random.default_rng(int(rng.integers(1 << 30))),
                         int(rng.integers(10, 60)), int(rng.integers(2, 5)))
        tree = train_tree(t, TreeParams())
        forest = train_forest(t, ForestParams(
            tree_count=1, bootstrap=False,
            features_per_split=len(t.feature_names), seed=i))
        tl, _ = predict_arrays(tree, t)
        fl, _ = predict_arrays(forest, t)
        assert np.array_equal(tl, fl)
    _report(8, "single-tree/no-bootstrap/all-features forest equals the plain "
               "tree on 50 random tables")


def test_criterion_09_metric_formatting():
    mv = metrics(ConfusionMatrix(tp=8, fp=2, fn=1, tn=89))
    formatted = tuple(f"{v:.5f}" for v in (mv.precision, mv.recall, mv.f1, mv.accuracy))
    assert formatted == ("0.80000", "0.88889", "0.84211", "0.97000")
    perfect = metrics(ConfusionMatrix(tp=40, fp=0, fn=0, tn=60))
    assert tuple(f"{v:.5f}" for v in (perfect.accuracy, perfect.precision,
                                      perfect.recall, perfect.f1)) == ("1.00000",) * 4
    _report(9, "tp8/fp2/fn1/tn89 formats to 0.80000/0.88889/0.84211/0.97000; "
               "perfect matrix formats to 1.00000")


def _synthetic_config(tmp_path, seed=0):
    rng = np.random.default_rng(1010)
    n = 1000
    y = np.array([0.0] * 500 + [1.0] * 500)
    rng.shuffle(y)
    cols = {}
    cols["planted_a"] = 0.75 * y + 0.05 + 0.15 * rng.random(n)
    cols["planted_b"] = 0.75 * (1 - y) + 0.05 + 0.15 * rng.random(n)
    for j in range(8):
        cols[f"noise{j}"] = rng.random(n)
    header = ",".join(cols) + ",Label"
    lines = [header]
    for i in range(n):
        label = "Planted" if y[i] else "Benign"
        lines.append(",".join(f"{cols[c][i]:.6f}" for c in cols) + f",{label}")
    data_dir = tmp_path / "data"
    data_dir.mkdir(exist_ok=True)
    csv_path = data_dir / "synthetic.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    return parse_config({
        "inputs": [str(csv_path)],
        "label_column": "Label",
        "benign_label": "Benign",
        "attacks": ["Planted"],
        "excluded_columns": [],
        "output_dir": str(tmp_path / "out"),
        "seed": seed,
        "relief_m": 300,
        "sampling": {"schemes": {"Planted": "fraction_stratified"},
                     "train_fraction": 0.4, "test_fraction": 0.3},
        "classifiers": {"logistic": {"epochs": 80}, "svm": {"epochs": 5},
                        "tree": {"max_depth": 8},
                        "forest": {"tree_count": 7, "max_depth": 8}},
    })


def test_criterion_10_end_to_end_synthetic(tmp_path):
    t0 = time.perf_counter()
    cfg = _synthetic_config(tmp_path)
    ctx = cmd_run(cfg)
    scores = (ctx.run_dir / "planted" / "feature_scores.csv").read_text().splitlines()
    by_name = {r.split(",")[1]: float(r.split(",")[-1]) for r in scores[1:]}
    ranked = sorted(by_name, key=by_name.get, reverse=True)
    assert set(ranked[:2]) == {"planted_a", "planted_b"}
    rows = (ctx.run_dir / "metrics.csv").read_text().splitlines()[1:]
    top_tau = max(float(r.split(",")[1]) for r in rows)
    forest_test = [r for r in rows
                   if r.split(",")[1] == f"{top_tau:g}"
                   and r.split(",")[3] == "random_forest" and r.split(",")[4] == "test"]
    assert len(forest_test) == 1
    assert float(forest_test[0].split(",")[5]) >= 0.95
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _report(10, f"planted features rank top-2 by mean score and the forest "
                f"reaches test accuracy >= 0.95 at tau={top_tau:g} ({elapsed:.2f}s)")


def test_criterion_11_run_determinism(tmp_path):
    cfg = _synthetic_config(tmp_path)
    ctx1 = cmd_run(cfg)
    ctx2 = cmd_run(cfg)
    s1 = (ctx1.run_dir / "planted" / "feature_scores.csv").read_bytes()
    s2 = (ctx2.run_dir / "planted" / "feature_scores.csv").read_bytes()
    m1 = (ctx1.run_dir / "metrics.csv").read_bytes()
    m2 = (ctx2.run_dir / "metrics.csv").read_bytes()
    assert s1 == s2 and m1 == m2
    _report(11, "two identical-config runs produce byte-identical "
                "feature_scores.csv and metrics.csv")


# ------------------------------------------------------------------ real data

IDS2018_ENV = "FLOWSIEVE_IDS2018_DIR"
WEDNESDAY = "Wednesday-14-02-2018_TrafficForML_CICFlowMeter.csv"

REFERENCE_DATASET_ROWS = {"FTP-BruteForce": 857_162, "SSH-Bruteforce": 851_397}
REFERENCE_TRAIN_ROWS = {"FTP-BruteForce": 171_433, "SSH-Bruteforce": 170_280}
REFERENCE_TEST_ROWS = {"FTP-BruteForce": 85_716, "SSH-Bruteforce": 85_140}

# the web-attack files carry four extra identifier columns in their headers
WEB_FILES = ("Thursday-22-02-2018", "Friday-23-02-2018")
WEB_EXTRA_COLUMNS = ["Flow ID", "Src IP", "Src Port", "Dst IP"]
WEB_REFERENCE_ROWS = {"Brute Force -Web": 2_085_515, "Brute Force -XSS": 2_085_134,
                      "SQL Injection": 2_084_991}
WEB_REFERENCE_TRAIN = {"Brute Force -Web": 417_332, "Brute Force -XSS": 417_218,
                       "SQL Injection": 417_042}
WEB_REFERENCE_TEST = {"Brute Force -Web": 208_636, "Brute Force -XSS": 208_598,
                      "SQL Injection": 208_517}


def _find_real_file(data_dir: Path, stem: str = "Wednesday-14-02-2018") -> Path | None:
    hits = sorted(data_dir.glob(f"{stem}*.csv"))
    return hits[0] if hits else None


def _clean_real(table):
    from flowsieve.tabular import drop_columns_by_name
    table, _ = drop_columns_by_name(table, ["Timestamp"])
    table, _ = drop_single_valued_columns(table)
    assert table.column_count == 69
    table, _ = drop_invalid_rows(table)
    return minmax_normalize(table)


@pytest.mark.skipif(IDS2018_ENV not in os.environ,
                    reason="full-scale check needs user-supplied CSE-CIC-IDS2018 "
                           f"files; set {IDS2018_ENV}")
def test_criterion_12_full_scale_reproduction():
    data_dir = Path(os.environ[IDS2018_ENV])
    path = _find_real_file(data_dir)
    if path is None:
        pytest.skip(f"no Wednesday-14-02-2018 CSV under {data_dir}")
    table, mapping, _ = load_csv(path, "Label")
    assert table.column_count == 80
    table = _clean_real(table)
    per_attack = split_by_attack(table, mapping,
                                 ["FTP-BruteForce", "SSH-Bruteforce"], "Benign")
    for attack, want in REFERENCE_DATASET_ROWS.items():
        assert abs(per_attack[attack].row_count - want) <= 2, attack

    ftp = per_attack["FTP-BruteForce"]
    spec = SplitSpec(scheme="fraction_stratified", train_fraction=0.2,
                     test_fraction=0.1, seed=0)
    for attack, t in per_attack.items():
        r = split_table(t, spec)
        assert abs(r.train.row_count - REFERENCE_TRAIN_ROWS[attack]) <= 2, attack
        assert abs(r.test.row_count - REFERENCE_TEST_ROWS[attack]) <= 2, attack

    bins = table_bin_edges(ftp, 10)
    sm = aggregate_mean(normalize_scores(score_all(ftp, bins, relief_m=5000, seed=0)))
    sel = select_by_threshold(sm, 0.35)
    assert sel.features, "tau=0.35 selected nothing on FTP"
    names = tuple(n for _, n, _ in sorted(sel.features, key=lambda f: f[0]))
    r = split_table(ftp, spec)
    train_t = r.train.select_features(names)
    test_t = r.test.select_features(names)
    forest = train_forest(train_t, ForestParams(tree_count=10, seed=0))
    _, test_report = evaluate(forest, train_t, test_t, attack="FTP",
                              classifier="random_forest", threshold=0.35)
    assert test_report.accuracy >= 0.999
    _report(12, f"real-data cleaning gives 69 columns, split sizes match the "
                f"reference counts within rounding, forest test accuracy "
                f"{test_report.accuracy:.5f} >= 0.999")


@pytest.mark.skipif(IDS2018_ENV not in os.environ,
                    reason="full-scale check needs user-supplied CSE-CIC-IDS2018 "
                           f"files; set {IDS2018_ENV}")
def test_criterion_12_full_scale_web_attacks():
    """Companion check for the web-attack files (whose headers carry four
    extra identifier columns); skipped when those files are absent."""
    data_dir = Path(os.environ[IDS2018_ENV])
    paths = [_find_real_file(data_dir, stem) for stem in WEB_FILES]
    if any(p is None for p in paths):
        pytest.skip(f"need both {WEB_FILES[0]}* and {WEB_FILES[1]}* under {data_dir}")
    from flowsieve.tabular import drop_columns_by_name, load_csv_merged
    table, mapping, _ = load_csv_merged(paths, "Label")
    table, _ = drop_columns_by_name(table, WEB_EXTRA_COLUMNS)
    assert table.column_count == 80
    table = _clean_real(table)
    per_attack = split_by_attack(table, mapping, list(WEB_REFERENCE_ROWS), "Benign")
    spec = SplitSpec(scheme="minority_protect", train_fraction=0.2,
                     test_fraction=0.1, attack_train_fraction=0.7, seed=0)
    for attack, want in WEB_REFERENCE_ROWS.items():
        assert abs(per_attack[attack].row_count - want) <= 2, attack
        r = split_table(per_attack[attack], spec)
        assert abs(r.train.row_count - WEB_REFERENCE_TRAIN[attack]) <= 2, attack
        assert abs(r.test.row_count - WEB_REFERENCE_TEST[attack]) <= 2, attack
    _report(12, "web-attack datasets and their splits match the reference "
                "counts within rounding")
