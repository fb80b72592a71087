import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biaslens import metrics as M
from biaslens.errors import InputError, UndefinedMetricError

FIXTURE_GOLDS = [0, 0, 0, 1, 1, 1]
FIXTURE_PREDS = [0, 0, 1, 0, 1, 1]


# --- literal-definition oracles -------------------------------------------------

def oracle_prf(golds, preds, k, averaging):
    per = []
    supports = []
    for c in range(k):
        tp = sum(1 for g, p in zip(golds, preds) if g == c and p == c)
        fp = sum(1 for g, p in zip(golds, preds) if g != c and p == c)
        fn = sum(1 for g, p in zip(golds, preds) if g == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per.append((precision, recall, f1))
        supports.append(sum(1 for g in golds if g == c))
    if averaging == "macro":
        return tuple(np.mean([p[i] for p in per]) for i in range(3))
    total = sum(supports)
    return tuple(sum(p[i] * s for p, s in zip(per, supports)) / total for i in range(3))


def oracle_kappa(golds, preds, k):
    n = len(golds)
    p_o = sum(1 for g, p in zip(golds, preds) if g == p) / n
    p_e = sum(
        (sum(1 for g in golds if g == c) / n) * (sum(1 for p in preds if p == c) / n)
        for c in range(k)
    )
    if p_e >= 1.0:
        return 0.0
    return (p_o - p_e) / (1 - p_e)


def oracle_auc(scores, golds):
    out = []
    for c in sorted(set(golds)):
        pos = [s[c] for s, g in zip(scores, golds) if g == c]
        neg = [s[c] for s, g in zip(scores, golds) if g != c]
        concordant = 0.0
        for a in pos:
            for b in neg:
                concordant += 1.0 if a > b else (0.5 if a == b else 0.0)
        out.append(concordant / (len(pos) * len(neg)))
    return float(np.mean(out))


class TestConfusion:
    def test_fixture_counts(self):
        cm = M.confusion(FIXTURE_GOLDS, FIXTURE_PREDS)
        assert cm.counts.tolist() == [[2, 1], [1, 2]]

    def test_diagonal_when_equal(self):
        cm = M.confusion([1, 2, 2], [1, 2, 2])
        assert np.trace(cm.counts) == 3

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            M.confusion([], [])

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            M.confusion([1], [1, 2])


class TestFixtures:
    def test_accuracy_and_macro_f1(self):
        cm = M.confusion(FIXTURE_GOLDS, FIXTURE_PREDS)
        assert M.accuracy(cm) == pytest.approx(2 / 3, abs=1e-12)
        assert M.prf(cm, "macro")[2] == pytest.approx(2 / 3, abs=1e-12)

    def test_kappa_one_third(self):
        cm = M.confusion(FIXTURE_GOLDS, FIXTURE_PREDS)
        assert M.cohen_kappa(cm) == pytest.approx(1 / 3, abs=1e-12)

    def test_perfect_diagonal(self):
        cm = M.confusion([0, 1, 2], [0, 1, 2])
        assert M.accuracy(cm) == 1.0
        assert M.prf(cm, "macro") == (1.0, 1.0, 1.0)
        assert M.cohen_kappa(cm) == 1.0

    def test_constant_predictions_give_zero_kappa(self):
        cm = M.confusion([0, 0, 1, 1], [0, 0, 0, 0])
        assert M.cohen_kappa(cm) == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_kappa_flag(self):
        cm = M.confusion([0, 0], [0, 0])
        assert M.cohen_kappa(cm) == 0.0
        assert M.kappa_is_degenerate(cm)

    def test_zero_support_class_contributes_zero(self):
        cm = M.confusion([0, 0, 1], [0, 0, 1], classes=[0, 1, 2])
        macro_p, _, _ = M.prf(cm, "macro")
        assert macro_p == pytest.approx(2 / 3, abs=1e-12)  # class 2 contributes 0
        weighted = M.prf(cm, "weighted")
        assert weighted[0] == pytest.approx(1.0, abs=1e-12)  # zero weight for class 2

    def test_auc_pair_count_fixture(self):
        scores = np.array([[0.1, 0.9], [0.2, 0.8], [0.6, 0.4], [0.8, 0.2]])
        assert M.auc_ovr(scores, [1, 0, 1, 0]) == pytest.approx(0.75, abs=1e-12)

    def test_auc_perfect_separation(self):
        scores = np.array([[0.9, 0.1], [0.8, 0.2], [0.1, 0.9], [0.2, 0.8]])
        assert M.auc_ovr(scores, [0, 0, 1, 1]) == 1.0

    def test_auc_all_ties(self):
        scores = np.full((6, 2), 0.5)
        assert M.auc_ovr(scores, [0, 1, 0, 1, 0, 1]) == 0.5

    def test_auc_single_class_undefined(self):
        with pytest.raises(UndefinedMetricError):
            M.auc_ovr(np.ones((3, 2)), [1, 1, 1])


class TestOracles:
    def test_thousand_random_cases(self):
        rng = np.random.default_rng(0)
        checked = 0
        while checked < 1000:
            k = int(rng.integers(2, 6))
            n = int(rng.integers(2, 51))
            golds = rng.integers(0, k, n)
            if np.unique(golds).size < 2:
                continue
            preds = rng.integers(0, k, n)
            scores = rng.random((n, k))
            cm = M.confusion(golds.tolist(), preds.tolist(), classes=list(range(k)))
            for averaging in ("macro", "weighted"):
                got = M.prf(cm, averaging)
                want = oracle_prf(golds.tolist(), preds.tolist(), k, averaging)
                assert np.allclose(got, want, atol=1e-9)
            assert M.cohen_kappa(cm) == pytest.approx(
                oracle_kappa(golds.tolist(), preds.tolist(), k), abs=1e-9)
            assert M.auc_ovr(scores, golds) == pytest.approx(
                oracle_auc(scores.tolist(), golds.tolist()), abs=1e-9)
            checked += 1

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        n, k = 30, 4
        golds = rng.integers(0, k, n)
        if np.unique(golds).size < 2:
            return
        preds = rng.integers(0, k, n)
        scores = rng.random((n, k))
        perm = rng.permutation(n)
        report_a = M.full_report(golds.tolist(), preds.tolist(), scores, classes=list(range(k)))
        report_b = M.full_report(golds[perm].tolist(), preds[perm].tolist(), scores[perm],
                                 classes=list(range(k)))
        assert report_a.to_dict() == report_b.to_dict()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000))
    def test_auc_invariant_under_monotone_transform(self, seed):
        rng = np.random.default_rng(seed)
        n, k = 25, 3
        golds = rng.integers(0, k, n)
        if np.unique(golds).size < 2:
            return
        scores = rng.random((n, k))
        transformed = np.exp(3.0 * scores) + 7.0
        assert M.auc_ovr(scores, golds) == pytest.approx(
            M.auc_ovr(transformed, golds), abs=1e-12)


class TestFullReport:
    def test_weighted_recall_equals_accuracy(self):
        rng = np.random.default_rng(1)
        golds = rng.integers(0, 5, 200).tolist()
        preds = rng.integers(0, 5, 200).tolist()
        report = M.full_report(golds, preds)
        assert report.weighted[1] == pytest.approx(report.accuracy, abs=1e-12)

    def test_perfect_predictions(self):
        golds = [0, 1, 2, 0, 1]
        scores = np.eye(3)[golds] * 0.9 + 0.05
        report = M.full_report(golds, golds, scores=scores)
        assert report.accuracy == 1.0
        assert report.auc == 1.0
        assert report.cks == 1.0
        assert report.macro == (1.0, 1.0, 1.0)

    def test_render_layout(self):
        report = M.full_report(FIXTURE_GOLDS, FIXTURE_PREDS)
        text = M.render_report(report, title="fixture")
        assert "Sample Average" in text
        assert "Weighted Average" in text
        assert "Macro Average" in text
        assert "Support" in text
        assert "0.6667" in text and "0.3333" in text

    def test_support_column(self):
        report = M.full_report(FIXTURE_GOLDS, FIXTURE_PREDS)
        assert report.support == 6
        assert [c.support for c in report.per_class] == [3, 3]
