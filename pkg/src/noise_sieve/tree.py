"""C4.5-style decision tree over categorical attributes.

Multiway splits (one child per observed value), gain ratio by default, no
pruning; ``min_split`` is the only regularizer. An attribute is consumed
once it is split on, so trees are finite even when every remaining split is
uninformative. Unseen values at prediction time fall back to the node's
majority label.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Literal, NamedTuple, Union

from .data import DataError, Dataset, Instance, LabeledInstance, AttributeSchema

SplitCriterion = Literal["gain-ratio", "info-gain"]


@dataclass(frozen=True)
class TreeConfig:
    min_split: int = 2
    split_criterion: SplitCriterion = "gain-ratio"

    def __post_init__(self) -> None:
        if self.min_split < 1:
            raise DataError(f"min_split must be >= 1, got {self.min_split}")
        if self.split_criterion not in ("gain-ratio", "info-gain"):
            raise DataError(f"unknown split criterion {self.split_criterion!r}")


@dataclass(frozen=True)
class Leaf:
    label: str
    support: int


@dataclass(frozen=True)
class Internal:
    attribute: str
    attribute_index: int
    children: Mapping[str, "TreeNode"]
    majority_label: str


TreeNode = Union[Leaf, Internal]


class SplitScores(NamedTuple):
    info_gain: float
    split_info: float
    gain_ratio: float


def entropy(class_counts: Mapping[str, int]) -> float:
    """Shannon entropy in bits of a count distribution."""
    if any(c < 0 for c in class_counts.values()):
        raise DataError("class counts must be non-negative")
    total = sum(class_counts.values())
    if total == 0:
        raise DataError("entropy of all-zero counts is undefined")
    h = 0.0
    for c in class_counts.values():
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def _label_counts(rows: Sequence[LabeledInstance], labels: Sequence[str]) -> dict[str, int]:
    counts = {label: 0 for label in labels}
    for row in rows:
        counts[row.label] += 1
    return counts


def _majority(counts: Mapping[str, int], labels: Sequence[str]) -> str:
    best = labels[0]
    for label in labels[1:]:
        if counts[label] > counts[best]:
            best = label
    return best


def _split_scores_rows(
    rows: Sequence[LabeledInstance], attr_index: int, labels: Sequence[str]
) -> SplitScores:
    base = entropy(_label_counts(rows, labels))
    by_value: dict[str, list[LabeledInstance]] = {}
    for row in rows:
        by_value.setdefault(row.instance[attr_index], []).append(row)
    n = len(rows)
    remainder = sum(
        len(subset) / n * entropy(_label_counts(subset, labels))
        for subset in by_value.values()
    )
    info_gain = base - remainder
    split_info = entropy({v: len(subset) for v, subset in by_value.items()})
    gain_ratio = info_gain / split_info if split_info > 0 else 0.0
    return SplitScores(info_gain, split_info, gain_ratio)


def split_scores(dataset: Dataset, attribute: str) -> SplitScores:
    """Information gain, split information and gain ratio for one attribute."""
    if not dataset.rows:
        raise DataError("cannot score a split on an empty dataset")
    idx = dataset.schema.attribute_index(attribute)
    return _split_scores_rows(dataset.rows, idx, dataset.schema.class_labels)


def build_tree(dataset: Dataset, config: TreeConfig = TreeConfig()) -> TreeNode:
    """Grow a tree recursively until nodes are pure, small, or out of attributes.

    Splits maximize the configured criterion; score ties go to the lowest
    attribute index, class ties to the earliest schema label. Construction is
    deterministic: same dataset and config, same tree.
    """
    if not dataset.rows:
        raise DataError("cannot build a tree on an empty dataset")
    schema = dataset.schema
    labels = schema.class_labels
    criterion = 2 if config.split_criterion == "gain-ratio" else 0

    def grow(rows: Sequence[LabeledInstance], available: tuple[int, ...]) -> TreeNode:
        counts = _label_counts(rows, labels)
        majority = _majority(counts, labels)
        nonzero = sum(1 for c in counts.values() if c > 0)
        if nonzero == 1 or not available or len(rows) < config.min_split:
            return Leaf(majority, len(rows))
        best = available[0]
        best_score = _split_scores_rows(rows, best, labels)[criterion]
        for idx in available[1:]:
            score = _split_scores_rows(rows, idx, labels)[criterion]
            if score > best_score:
                best, best_score = idx, score
        remaining = tuple(i for i in available if i != best)
        by_value: dict[str, list[LabeledInstance]] = {}
        for row in rows:
            by_value.setdefault(row.instance[best], []).append(row)
        children = {v: grow(subset, remaining) for v, subset in by_value.items()}
        return Internal(schema.attributes[best].name, best, children, majority)

    return grow(dataset.rows, tuple(range(len(schema.attributes))))


def predict_tree(tree: TreeNode, instance: Instance) -> str:
    """Walk edges by attribute value; unseen values stop at the majority."""
    node = tree
    while isinstance(node, Internal):
        child = node.children.get(instance[node.attribute_index])
        if child is None:
            return node.majority_label
        node = child
    return node.label


def training_accuracy(tree: TreeNode, dataset: Dataset) -> float:
    correct = sum(1 for row in dataset.rows if predict_tree(tree, row.instance) == row.label)
    return correct / len(dataset.rows)


def tree_to_dict(tree: TreeNode) -> dict:
    """JSON-ready form: {attribute, majority, children} or {label, support}."""
    if isinstance(tree, Leaf):
        return {"label": tree.label, "support": tree.support}
    return {
        "attribute": tree.attribute,
        "majority": tree.majority_label,
        "children": {v: tree_to_dict(c) for v, c in tree.children.items()},
    }


def tree_from_dict(data: Mapping, schema: AttributeSchema) -> TreeNode:
    """Rebuild a tree from its JSON form, resolving attribute indexes."""
    if "label" in data:
        return Leaf(data["label"], int(data["support"]))
    name = data["attribute"]
    return Internal(
        attribute=name,
        attribute_index=schema.attribute_index(name),
        children={v: tree_from_dict(c, schema) for v, c in data["children"].items()},
        majority_label=data["majority"],
    )
