"""Smoke tests for the xferrank extension module.

Run from the repository root (ctest sets PYTHONPATH to the built module).
"""
import math
import os
import tempfile

import pytest

import xferrank as xr

REPO = os.getcwd()


def repo_path(rel):
    return os.path.join(REPO, rel)


def test_version():
    assert xr.__version__


def test_tokenize_smallest_stream():
    d = xr.load_langdef(repo_path("data/langdefs/c.json"))
    toks = xr.tokenize("x=1", d)
    assert toks == [("name", "x"), ("operator", "="), ("literal-number", "1")]
    assert xr.tokenize("", d) == []


def test_histogram_and_overlap():
    c = xr.load_langdef(repo_path("data/langdefs/c.json"))
    cpp = xr.load_langdef(repo_path("data/langdefs/cpp.json"))
    hc = xr.build_histogram(repo_path("fixtures/mini/c"), c)
    hcpp = xr.build_histogram(repo_path("fixtures/mini/cpp"), cpp)
    assert hc.language == "c"
    assert hc.total > 0
    assert hc.count("keyword", "return") == 2
    # frozen hand-enumerated jaccard from fixtures/ccpp.overlap
    assert xr.token_overlap(hc, hcpp, "keyword") == pytest.approx(1.0 / 3.0)
    assert xr.token_overlap(hc, hc, "tokens") == 1.0


def test_set_overlap_and_grading():
    assert xr.set_overlap({"a", "b", "c"}, {"b", "c", "d"}) == 0.5
    assert xr.set_overlap(set(), set()) == 1.0
    assert xr.grade_scores([0.9, 0.8, 0.7, 0.6, 0.5], 5) == [4, 3, 2, 1, 0]


def test_ndcg_hand_value():
    value, degenerate = xr.ndcg_at_k([2, 1, 0], [2, 1, 0], 3)
    assert not degenerate
    assert value == pytest.approx(0.586882, abs=1e-6)
    ideal, _ = xr.ndcg_at_k([0, 1, 2], [2, 1, 0], 3)
    assert ideal == 1.0


def test_train_predict_save_roundtrip():
    rows = [[i / 10.0, (10 - i) / 10.0] for i in range(10)]
    y = [3.0 * r[0] - 2.0 * r[1] for r in rows]
    model = xr.train_regression(rows, y, feature_names=["a", "b"], trees=30)
    assert model.objective == "regression"
    assert model.num_trees == 30
    pred = model.predict(rows[3])
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.json")
        model.save(path)
        back = xr.load_model(path)
        assert back.predict(rows[3]) == pred


def test_lambdarank_and_shap_local_accuracy():
    groups = []
    for g in range(8):
        rows = [[(i + 0.5) / 6.0 + 0.001 * g, 0.3] for i in range(6)]
        grades = list(range(6))
        groups.append((rows, grades))
    model = xr.train_lambdarank(groups, feature_names=["signal", "noise"],
                                trees=40, min_samples=2, l2=0.5)
    scores = [model.predict(r) for r in groups[0][0]]
    assert scores == sorted(scores), "higher signal should score higher"

    base, contribs, pred = xr.tree_shap(model, [0.9, 0.3])
    assert base + sum(contribs) == pytest.approx(pred, abs=1e-9)
    bbase, bcontribs, _ = xr.brute_force_shap(model, [0.9, 0.3])
    assert contribs == pytest.approx(bcontribs, abs=1e-9)
    assert base == pytest.approx(bbase, abs=1e-9)


def test_history_rank_chain():
    entries = xr.history_rank(repo_path("fixtures/chain.plhist"), "kotlin",
                              ["java", "cpp", "c"], 2)
    assert entries == [("java", 1), ("cpp", 2)]


def test_stats_and_cluster(tmp_path):
    scores = tmp_path / "scores.csv"
    lines = ["task,source,target,score"]
    cells = {
        ("a", "a"): 1.0, ("b", "b"): 1.0, ("a", "b"): 0.5, ("b", "a"): 0.5,
        ("__zero_shot__", "a"): 0.2, ("__zero_shot__", "b"): 0.4,
    }
    for (s, t), v in cells.items():
        lines.append(f"demo,{s},{t},{v}")
    scores.write_text("\n".join(lines) + "\n")

    summary = xr.summary_scores(str(scores), "demo")
    assert summary["mono"] == pytest.approx(1.0)
    assert summary["cross"] == pytest.approx(0.5)
    assert summary["overall"] == pytest.approx(0.75)
    assert summary["zero_shot"] == pytest.approx(0.3)

    assert xr.mean_rank([3, 3, 1, 1]) == 2.0

    order, tree = xr.cluster_leaf_order(str(scores), "demo", "rows")
    assert sorted(order) == ["a", "b"]
    assert ":" in tree


def test_data_error_maps_to_python_exception():
    with pytest.raises(xr.DataError):
        xr.load_model("/nonexistent/model.json")
