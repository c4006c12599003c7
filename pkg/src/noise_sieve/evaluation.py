"""Confusion-matrix metrics, k-fold cross-validation, and the method comparison.

The comparison trains a decision tree per fold under three noise-handling
arms (no filter, all-misclassified baseline, dynamic threshold) on one shared
fold plan, evaluates each on its untouched test fold, and averages per-fold
aggregate metrics. Noise filtering only ever sees training rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .bayes import DEFAULT_POLICY, SmoothingPolicy
from .data import DataError, Dataset
from .filtering import ScoreKind, detect_noise, detect_noise_baseline
from .tree import TreeConfig, build_tree, predict_tree

log = logging.getLogger(__name__)

Averaging = Literal["weighted", "macro", "micro"]
FilterMode = Literal["none", "baseline", "dynamic"]
NoiseScope = Literal["per-fold", "global"]

FILTER_MODES = ("none", "baseline", "dynamic")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Integer counts indexed [actual][predicted] over a fixed label order."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.counts) != n or any(len(r) != n for r in self.counts):
            raise DataError("confusion matrix must be square over its labels")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DataError(f"unknown label {label!r}") from None

    @property
    def total(self) -> int:
        return sum(sum(r) for r in self.counts)

    def support(self, label: str) -> int:
        return sum(self.counts[self.index(label)])

    def tp_fp_fn(self, label: str) -> tuple[int, int, int]:
        i = self.index(label)
        tp = self.counts[i][i]
        fp = sum(self.counts[j][i] for j in range(len(self.labels))) - tp
        fn = sum(self.counts[i]) - tp
        return tp, fp, fn


def confusion(
    predicted: list[str], actual: list[str], labels: tuple[str, ...] | None = None
) -> ConfusionMatrix:
    """Count (actual, predicted) pairs; labels default to first appearance."""
    if len(predicted) != len(actual):
        raise DataError(
            f"length mismatch: {len(predicted)} predictions, {len(actual)} actuals"
        )
    if not actual:
        raise DataError("cannot build a confusion matrix from empty inputs")
    if labels is None:
        labels = tuple(dict.fromkeys(list(actual) + list(predicted)))
    index = {label: i for i, label in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for p, a in zip(predicted, actual):
        counts[index[a]][index[p]] += 1
    return ConfusionMatrix(labels, tuple(tuple(r) for r in counts))


def precision_recall_f(matrix: ConfusionMatrix, label: str) -> tuple[float, float, float]:
    """Per-class precision, recall and F measure; 0/0 is defined as 0."""
    tp, fp, fn = matrix.tp_fp_fn(label)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f


def aggregate(
    matrix: ConfusionMatrix, averaging: Averaging = "weighted"
) -> tuple[float, float, float]:
    """Single (precision, recall, F) for a whole matrix.

    weighted: support-weighted mean of per-class values. macro: unweighted
    mean over all labels. micro: pooled counts, which for single-label
    classification equals overall accuracy in all three components.
    """
    if matrix.total == 0:
        raise DataError("cannot aggregate an empty confusion matrix")
    per_class = [precision_recall_f(matrix, label) for label in matrix.labels]
    if averaging == "macro":
        n = len(matrix.labels)
        return tuple(sum(v[i] for v in per_class) / n for i in range(3))  # type: ignore[return-value]
    if averaging == "weighted":
        total = matrix.total
        weights = [matrix.support(label) / total for label in matrix.labels]
        return tuple(
            sum(w * v[i] for w, v in zip(weights, per_class)) for i in range(3)
        )  # type: ignore[return-value]
    if averaging == "micro":
        tp = sum(matrix.counts[i][i] for i in range(len(matrix.labels)))
        p = tp / matrix.total
        f = p  # harmonic mean of two equal values
        return p, p, f
    raise DataError(f"unknown averaging scheme {averaging!r}")


@dataclass(frozen=True)
class FoldPlan:
    """Seeded assignment of every row id to one fold."""

    k: int
    seed: int
    stratified: bool
    assignments: dict[int, int]

    def fold_ids(self, fold: int) -> tuple[int, ...]:
        return tuple(i for i, f in self.assignments.items() if f == fold)


def kfold_plan(dataset: Dataset, k: int, seed: int, stratified: bool = True) -> FoldPlan:
    """Assign rows to k folds with sizes differing by at most one.

    Stratified assignment deals each class's shuffled rows round-robin with a
    counter that carries across classes, so per-class and overall fold sizes
    both stay within one of each other.
    """
    n = len(dataset.rows)
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    if k > n:
        raise DataError(f"k={k} exceeds the dataset size {n}")
    rng = np.random.default_rng(seed)
    assignments: dict[int, int] = {}
    if stratified:
        counter = 0
        for label in dataset.schema.class_labels:
            ids = [row.id for row in dataset.rows if row.label == label]
            for j in rng.permutation(len(ids)):
                assignments[ids[j]] = counter % k  # type: ignore[index]
                counter += 1
    else:
        ids = [row.id for row in dataset.rows]
        for pos, j in enumerate(rng.permutation(n)):
            assignments[ids[j]] = pos % k  # type: ignore[index]
    return FoldPlan(k=k, seed=seed, stratified=stratified, assignments=assignments)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f_measure: float


@dataclass(frozen=True)
class FoldOutcome:
    fold: int
    test_ids: tuple[int, ...]
    noise_removed: int
    skipped: bool
    confusion: ConfusionMatrix | None
    metrics: Metrics | None


@dataclass(frozen=True)
class MethodResult:
    """One comparison arm: per-fold outcomes plus their mean."""

    method: str
    per_fold: tuple[FoldOutcome, ...]
    averaged: Metrics

    @property
    def noise_removed_counts(self) -> tuple[int, ...]:
        return tuple(f.noise_removed for f in self.per_fold)

    @property
    def skipped_folds(self) -> tuple[int, ...]:
        return tuple(f.fold for f in self.per_fold if f.skipped)


def run_pipeline(
    dataset: Dataset,
    filter_mode: FilterMode,
    fold_plan: FoldPlan,
    policy: SmoothingPolicy = DEFAULT_POLICY,
    tree_config: TreeConfig = TreeConfig(),
    averaging: Averaging = "weighted",
    noise_scope: NoiseScope = "per-fold",
    score: ScoreKind = "likelihood",
) -> MethodResult:
    """Cross-validate one noise-handling arm over a shared fold plan.

    Per fold: the training set is every other fold, noise filtering (if any)
    is applied to training rows only, a tree is trained on what survives and
    evaluated on the untouched test fold. With ``noise_scope="global"`` the
    detector runs once on the full dataset and its verdicts are applied to
    each fold's training rows. A fold whose training set is emptied by
    filtering is recorded as skipped.
    """
    if filter_mode not in FILTER_MODES:
        raise DataError(f"unknown filter mode {filter_mode!r}")
    ids = set(dataset.ids())
    if set(fold_plan.assignments) != ids:
        raise DataError("fold plan does not cover exactly this dataset's ids")
    if any(not 0 <= f < fold_plan.k for f in fold_plan.assignments.values()):
        raise DataError("fold plan contains an out-of-range fold index")

    detector = detect_noise if filter_mode == "dynamic" else detect_noise_baseline
    global_noise: set[int] = set()
    if filter_mode != "none" and noise_scope == "global":
        global_noise = set(detector(dataset, policy, score).noise_ids)

    outcomes: list[FoldOutcome] = []
    labels = dataset.schema.class_labels
    for fold in range(fold_plan.k):
        test_rows = [r for r in dataset.rows if fold_plan.assignments[r.id] == fold]
        train_rows = [r for r in dataset.rows if fold_plan.assignments[r.id] != fold]
        train = Dataset(dataset.schema, tuple(train_rows))
        if filter_mode == "none":
            removed: set[int] = set()
        elif noise_scope == "global":
            removed = global_noise & {r.id for r in train_rows}
        else:
            removed = set(detector(train, policy, score).noise_ids)
        kept = train.without_ids(removed) if removed else train
        test_ids = tuple(r.id for r in test_rows)  # type: ignore[misc]
        if not kept.rows:
            log.warning("fold %d: filtering emptied the training set; fold skipped", fold)
            outcomes.append(FoldOutcome(fold, test_ids, len(removed), True, None, None))
            continue
        tree = build_tree(kept, tree_config)
        predicted = [predict_tree(tree, r.instance) for r in test_rows]
        actual = [r.label for r in test_rows]
        matrix = confusion(predicted, actual, labels)
        p, r, f = aggregate(matrix, averaging)
        outcomes.append(
            FoldOutcome(fold, test_ids, len(removed), False, matrix, Metrics(p, r, f))
        )

    done = [o.metrics for o in outcomes if o.metrics is not None]
    if done:
        averaged = Metrics(
            sum(m.precision for m in done) / len(done),
            sum(m.recall for m in done) / len(done),
            sum(m.f_measure for m in done) / len(done),
        )
    else:
        log.warning("every fold was skipped; averaged metrics reported as zero")
        averaged = Metrics(0.0, 0.0, 0.0)
    return MethodResult(filter_mode, tuple(outcomes), averaged)


@dataclass(frozen=True)
class CompareConfig:
    folds: int = 10
    seed: int = 0
    stratified: bool = True
    policy: SmoothingPolicy = DEFAULT_POLICY
    tree: TreeConfig = TreeConfig()
    averaging: Averaging = "weighted"
    noise_scope: NoiseScope = "per-fold"
    score: ScoreKind = "likelihood"


@dataclass(frozen=True)
class ComparisonReport:
    """All three arms evaluated on one shared fold plan."""

    k: int
    seed: int
    stratified: bool
    averaging: str
    noise_scope: str
    score: str
    smoothing_mode: str
    smoothing_k: float
    min_split: int
    split_criterion: str
    per_method: dict[str, MethodResult]


def compare(dataset: Dataset, config: CompareConfig = CompareConfig()) -> ComparisonReport:
    """Run the none / baseline / dynamic arms on one seeded fold plan."""
    plan = kfold_plan(dataset, config.folds, config.seed, config.stratified)
    per_method = {
        mode: run_pipeline(
            dataset,
            mode,
            plan,
            policy=config.policy,
            tree_config=config.tree,
            averaging=config.averaging,
            noise_scope=config.noise_scope,
            score=config.score,
        )
        for mode in FILTER_MODES
    }
    return ComparisonReport(
        k=config.folds,
        seed=config.seed,
        stratified=config.stratified,
        averaging=config.averaging,
        noise_scope=config.noise_scope,
        score=config.score,
        smoothing_mode=config.policy.mode,
        smoothing_k=config.policy.k,
        min_split=config.tree.min_split,
        split_criterion=config.tree.split_criterion,
        per_method=per_method,
    )


def _confusion_to_dict(matrix: ConfusionMatrix | None) -> dict | None:
    if matrix is None:
        return None
    return {"labels": list(matrix.labels), "counts": [list(r) for r in matrix.counts]}


def _metrics_to_dict(metrics: Metrics | None) -> dict | None:
    if metrics is None:
        return None
    return {
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f_measure": metrics.f_measure,
    }


def report_to_dict(report: ComparisonReport) -> dict:
    """JSON-ready document; field layout mirrors the report dataclasses."""
    return {
        "k": report.k,
        "seed": report.seed,
        "stratified": report.stratified,
        "averaging": report.averaging,
        "noise_scope": report.noise_scope,
        "score": report.score,
        "smoothing": {"mode": report.smoothing_mode, "k": report.smoothing_k},
        "tree": {"min_split": report.min_split, "split_criterion": report.split_criterion},
        "methods": {
            method: {
                "per_fold": [
                    {
                        "fold": o.fold,
                        "test_ids": list(o.test_ids),
                        "noise_removed": o.noise_removed,
                        "skipped": o.skipped,
                        "confusion": _confusion_to_dict(o.confusion),
                        "metrics": _metrics_to_dict(o.metrics),
                    }
                    for o in result.per_fold
                ],
                "averaged": _metrics_to_dict(result.averaged),
                "noise_removed_counts": list(result.noise_removed_counts),
                "skipped_folds": list(result.skipped_folds),
            }
            for method, result in report.per_method.items()
        },
    }


def report_from_dict(data: dict) -> ComparisonReport:
    """Inverse of :func:`report_to_dict` (lossless round-trip)."""

    def metrics(d: dict | None) -> Metrics | None:
        if d is None:
            return None
        return Metrics(d["precision"], d["recall"], d["f_measure"])

    def matrix(d: dict | None) -> ConfusionMatrix | None:
        if d is None:
            return None
        return ConfusionMatrix(
            tuple(d["labels"]), tuple(tuple(r) for r in d["counts"])
        )

    per_method = {
        method: MethodResult(
            method=method,
            per_fold=tuple(
                FoldOutcome(
                    fold=o["fold"],
                    test_ids=tuple(o["test_ids"]),
                    noise_removed=o["noise_removed"],
                    skipped=o["skipped"],
                    confusion=matrix(o["confusion"]),
                    metrics=metrics(o["metrics"]),
                )
                for o in entry["per_fold"]
            ),
            averaged=metrics(entry["averaged"]),  # type: ignore[arg-type]
        )
        for method, entry in data["methods"].items()
    }
    return ComparisonReport(
        k=data["k"],
        seed=data["seed"],
        stratified=data["stratified"],
        averaging=data["averaging"],
        noise_scope=data["noise_scope"],
        score=data["score"],
        smoothing_mode=data["smoothing"]["mode"],
        smoothing_k=data["smoothing"]["k"],
        min_split=data["tree"]["min_split"],
        split_criterion=data["tree"]["split_criterion"],
        per_method=per_method,
    )


def report_to_markdown(report: ComparisonReport) -> str:
    """Comparison table: one row per method, averaged metrics."""
    lines = [
        "| Dataset/Method | Precision | Recall | F-measure |",
        "| --- | --- | --- | --- |",
    ]
    for method, result in report.per_method.items():
        m = result.averaged
        lines.append(
            f"| {method} | {m.precision:.4f} | {m.recall:.4f} | {m.f_measure:.4f} |"
        )
    return "\n".join(lines) + "\n"
