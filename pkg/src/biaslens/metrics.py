"""The six evaluation measures with sample / weighted / macro averaging:
accuracy, one-vs-rest AUC, Cohen kappa, precision, recall and F1, assembled
into the standard report layout (sample-average block, weighted block, macro
block, per-class rows, support)."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, UndefinedMetricError


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # (K, K) ints, rows = gold, cols = predicted
    classes: tuple

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def supports(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def confusion(golds, preds, classes=None) -> ConfusionMatrix:
    golds, preds = list(golds), list(preds)
    if len(golds) != len(preds):
        raise InputError(f"golds ({len(golds)}) and preds ({len(preds)}) differ in length")
    if not golds:
        raise InputError("cannot build a confusion matrix from no instances")
    if classes is None:
        classes = sorted(set(golds) | set(preds))
    index = {c: i for i, c in enumerate(classes)}
    for value in golds + preds:
        if value not in index:
            raise InputError(f"label {value!r} not in class set {tuple(classes)}")
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(golds, preds):
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(counts=counts, classes=tuple(classes))


def accuracy(cm: ConfusionMatrix) -> float:
    return float(np.trace(cm.counts) / cm.total)


def _per_class_prf(cm: ConfusionMatrix):
    diag = np.diag(cm.counts).astype(float)
    col = cm.counts.sum(axis=0).astype(float)
    row = cm.counts.sum(axis=1).astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(col > 0, diag / col, 0.0)  # 0/0 defined as 0
        recall = np.where(row > 0, diag / row, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)
    return precision, recall, f1


def prf(cm: ConfusionMatrix, averaging: str):
    """(precision, recall, f1) under macro or support-weighted averaging."""
    precision, recall, f1 = _per_class_prf(cm)
    if averaging == "macro":
        return float(precision.mean()), float(recall.mean()), float(f1.mean())
    if averaging == "weighted":
        w = cm.supports / cm.total
        return float(precision @ w), float(recall @ w), float(f1 @ w)
    raise InputError(f"averaging must be 'macro' or 'weighted', got {averaging!r}")


def cohen_kappa(cm: ConfusionMatrix) -> float:
    """Agreement corrected for chance; 0 (degenerate) when chance agreement is 1."""
    total = cm.total
    p_observed = np.trace(cm.counts) / total
    p_expected = float(cm.counts.sum(axis=1) @ cm.counts.sum(axis=0)) / (total * total)
    if p_expected >= 1.0:
        return 0.0
    return float((p_observed - p_expected) / (1.0 - p_expected))


def kappa_is_degenerate(cm: ConfusionMatrix) -> bool:
    total = cm.total
    p_expected = float(cm.counts.sum(axis=1) @ cm.counts.sum(axis=0)) / (total * total)
    return p_expected >= 1.0


def auc_ovr(scores, golds) -> float:
    """Macro one-vs-rest AUC via the rank statistic, ties counted half.

    scores is (n, K) with one column of class scores per class index in golds.
    """
    scores = np.asarray(scores, dtype=float)
    golds = np.asarray(golds)
    if scores.ndim != 2 or scores.shape[0] != golds.shape[0]:
        raise InputError(f"scores {scores.shape} do not match {golds.shape[0]} golds")
    if not np.isfinite(scores).all():
        raise InputError("scores must be finite")
    present = np.unique(golds)
    if present.size < 2:
        raise UndefinedMetricError("AUC needs at least two classes present in golds")
    aucs = []
    n = golds.shape[0]
    for k in present:
        s = scores[:, int(k)]
        pos = golds == k
        n_pos = int(pos.sum())
        n_neg = n - n_pos
        # average ranks handle ties: U = rank-sum of positives minus its minimum
        order = np.argsort(s, kind="mergesort")
        ranks = np.empty(n, dtype=float)
        ranks[order] = np.arange(1, n + 1)
        sorted_scores = s[order]
        lo = 0
        while lo < n:
            hi = lo
            while hi + 1 < n and sorted_scores[hi + 1] == sorted_scores[lo]:
                hi += 1
            if hi > lo:
                ranks[order[lo : hi + 1]] = (lo + 1 + hi + 1) / 2.0
            lo = hi + 1
        u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
        aucs.append(u / (n_pos * n_neg))
    return float(np.mean(aucs))


@dataclass
class ClassReport:
    name: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    accuracy: float
    auc: float | None
    cks: float
    weighted: tuple  # (precision, recall, f1)
    macro: tuple
    per_class: list = field(default_factory=list)
    support: int = 0
    cks_degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "sample_average": {"accuracy": self.accuracy, "auc": self.auc, "cks": self.cks},
            "weighted_average": dict(zip(("precision", "recall", "f1"), self.weighted)),
            "macro_average": dict(zip(("precision", "recall", "f1"), self.macro)),
            "per_class": [
                {"class": c.name, "precision": c.precision, "recall": c.recall,
                 "f1": c.f1, "support": c.support}
                for c in self.per_class
            ],
            "support": self.support,
            "cks_degenerate": self.cks_degenerate,
        }


def full_report(golds, preds, scores=None, classes=None) -> EvalReport:
    cm = confusion(golds, preds, classes=classes)
    index = {c: i for i, c in enumerate(cm.classes)}
    auc = None
    if scores is not None:
        auc = auc_ovr(scores, np.asarray([index[g] for g in golds]))
    precision, recall, f1 = _per_class_prf(cm)
    per_class = [
        ClassReport(str(c), float(precision[i]), float(recall[i]), float(f1[i]),
                    int(cm.supports[i]))
        for i, c in enumerate(cm.classes)
    ]
    return EvalReport(
        accuracy=accuracy(cm),
        auc=auc,
        cks=cohen_kappa(cm),
        weighted=prf(cm, "weighted"),
        macro=prf(cm, "macro"),
        per_class=per_class,
        support=cm.total,
        cks_degenerate=kappa_is_degenerate(cm),
    )


def render_report(report: EvalReport, title: str = "") -> str:
    """Aligned text table: sample-average block, weighted block, macro block, support."""
    fmt = lambda x: "  n/a" if x is None else f"{x:0.4f}"
    lines = []
    if title:
        lines.append(title)
    lines.append(
        "          | Sample Average           | Weighted Average         "
        "| Macro Average            |"
    )
    lines.append(
        "          | Accuracy   AUC      CKS  | Precision Recall  F1     "
        "| Precision Recall  F1     | Support"
    )
    w = report.weighted
    m = report.macro
    lines.append(
        f"{'overall':<10}| {fmt(report.accuracy):>8} {fmt(report.auc):>8} {fmt(report.cks):>6} "
        f"| {fmt(w[0]):>9} {fmt(w[1]):>6} {fmt(w[2]):>6} "
        f"| {fmt(m[0]):>9} {fmt(m[1]):>6} {fmt(m[2]):>6} | {report.support}"
    )
    lines.append("")
    lines.append(f"{'class':<12}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}")
    for c in report.per_class:
        lines.append(
            f"{c.name:<12}{c.precision:>10.4f}{c.recall:>10.4f}{c.f1:>10.4f}{c.support:>10d}"
        )
    return "\n".join(lines)
