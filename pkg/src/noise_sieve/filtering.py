"""Dynamic-threshold label-noise detection over a naive-Bayes self-scan.

A model fitted on the dataset re-scores every row. Rows whose predicted and
recorded labels agree are "pure"; the rest are misclassification candidates.
The minimum stored score among pure rows becomes the noise threshold, and
candidates strictly below it are flagged as noise. The baseline detector
flags every misclassified row instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

from .bayes import DEFAULT_POLICY, NaiveBayesModel, SmoothingPolicy, fit
from .data import DataError, Dataset

log = logging.getLogger(__name__)

ScoreKind = Literal["likelihood", "posterior"]

DYNAMIC_THRESHOLD = "dynamic-threshold"
ALL_MISCLASSIFIED = "all-misclassified"


@dataclass(frozen=True)
class PureInstance:
    id: int
    likelihood: float


@dataclass(frozen=True)
class MisclassifiedInstance:
    id: int
    likelihood: float
    predicted: str
    actual: str


@dataclass(frozen=True)
class ClassificationPartition:
    """Every dataset row, split by predicted-equals-recorded label.

    Stored likelihoods are the score of each row under its RECORDED label,
    so pure and misclassified rows are measured on the same footing.
    """

    pure: tuple[PureInstance, ...]
    mis: tuple[MisclassifiedInstance, ...]

    def ids(self) -> set[int]:
        return {p.id for p in self.pure} | {m.id for m in self.mis}


@dataclass(frozen=True)
class LikelihoodGroup:
    """Pure rows sharing one bit-identical stored likelihood (diagnostic)."""

    probability: float
    member_ids: tuple[int, ...]


@dataclass(frozen=True)
class NoiseReport:
    """Outcome of one noise-detection run.

    ``threshold`` is None for the all-misclassified method and for the
    degenerate no-pure-rows case (then ``warning`` explains why nothing was
    flagged).
    """

    method: str
    threshold: float | None
    noise_ids: tuple[int, ...]
    partition: ClassificationPartition
    pure_groups: tuple[LikelihoodGroup, ...]
    warning: str | None = None


def partition_by_classification(
    model: NaiveBayesModel,
    dataset: Dataset,
    policy: SmoothingPolicy = DEFAULT_POLICY,
    score: ScoreKind = "likelihood",
) -> ClassificationPartition:
    """Predict every row with the model and split pure from misclassified.

    The model must have been fitted on this dataset's schema. ``score``
    selects what gets stored: the plain likelihood of the recorded label
    (default) or the prior-weighted posterior score.
    """
    if model.schema != dataset.schema:
        raise DataError("model schema does not match dataset schema")
    pure: list[PureInstance] = []
    mis: list[MisclassifiedInstance] = []
    labels = dataset.schema.class_labels
    for row in dataset.rows:
        likelihoods = model.class_likelihoods(row.instance, policy)
        scores = {c: likelihoods[c] * model.class_count[c] / model.total for c in labels}
        predicted = labels[0]
        for c in labels[1:]:
            if scores[c] > scores[predicted]:
                predicted = c
        stored = likelihoods[row.label] if score == "likelihood" else scores[row.label]
        assert row.id is not None
        if predicted == row.label:
            pure.append(PureInstance(row.id, stored))
        else:
            mis.append(MisclassifiedInstance(row.id, stored, predicted, row.label))
    return ClassificationPartition(tuple(pure), tuple(mis))


def compute_threshold(partition: ClassificationPartition) -> float:
    """Minimum stored likelihood among purely classified rows."""
    if not partition.pure:
        raise DataError("no purely classified instances; threshold is undefined")
    return min(p.likelihood for p in partition.pure)


def group_pure_likelihoods(
    partition: ClassificationPartition,
) -> tuple[LikelihoodGroup, ...]:
    """One group per distinct stored likelihood, sorted descending.

    Exact float equality is intentional: identical attribute vectors produce
    bit-identical products, and the threshold only needs the minimum.
    """
    members: dict[float, list[int]] = {}
    for p in partition.pure:
        members.setdefault(p.likelihood, []).append(p.id)
    return tuple(
        LikelihoodGroup(prob, tuple(ids))
        for prob, ids in sorted(members.items(), key=lambda kv: -kv[0])
    )


def detect_noise(
    dataset: Dataset,
    policy: SmoothingPolicy = DEFAULT_POLICY,
    score: ScoreKind = "likelihood",
) -> NoiseReport:
    """Flag misclassified rows scoring strictly below the dynamic threshold.

    Fits a model on the dataset itself, partitions, takes the minimum pure
    score as the threshold, and flags candidates below it. Candidates exactly
    at the threshold survive. With no pure rows the threshold is undefined
    and nothing is flagged (a warning is recorded instead of deleting
    everything).
    """
    model = fit(dataset)
    partition = partition_by_classification(model, dataset, policy, score)
    groups = group_pure_likelihoods(partition)
    if not partition.pure:
        warning = "no purely classified instances; threshold undefined, nothing flagged"
        log.warning(warning)
        return NoiseReport(DYNAMIC_THRESHOLD, None, (), partition, groups, warning)
    threshold = compute_threshold(partition)
    noise = tuple(m.id for m in partition.mis if m.likelihood < threshold)
    log.debug(
        "dynamic threshold %.6g over %d pure rows; %d of %d candidates flagged",
        threshold, len(partition.pure), len(noise), len(partition.mis),
    )
    return NoiseReport(DYNAMIC_THRESHOLD, threshold, noise, partition, groups)


def detect_noise_baseline(
    dataset: Dataset,
    policy: SmoothingPolicy = DEFAULT_POLICY,
    score: ScoreKind = "likelihood",
) -> NoiseReport:
    """Flag every misclassified row as noise (no threshold)."""
    model = fit(dataset)
    partition = partition_by_classification(model, dataset, policy, score)
    groups = group_pure_likelihoods(partition)
    noise = tuple(m.id for m in partition.mis)
    return NoiseReport(ALL_MISCLASSIFIED, None, noise, partition, groups)


def filter_dataset(dataset: Dataset, report: NoiseReport) -> Dataset:
    """Dataset minus the flagged rows; order and ids preserved."""
    return dataset.without_ids(report.noise_ids)


def report_to_dict(report: NoiseReport) -> dict:
    """JSON-ready document: {method, threshold, noise_ids, pure_groups, mis}."""
    return {
        "method": report.method,
        "threshold": report.threshold,
        "noise_ids": list(report.noise_ids),
        "pure_groups": [
            {"probability": g.probability, "ids": list(g.member_ids)}
            for g in report.pure_groups
        ],
        "mis": [
            {
                "id": m.id,
                "likelihood": m.likelihood,
                "predicted": m.predicted,
                "actual": m.actual,
            }
            for m in report.partition.mis
        ],
    }
