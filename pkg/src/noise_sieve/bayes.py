"""Count-based categorical naive Bayes with an add-k smoothing fallback.

The model stores exact integer counts from a single pass over the training
data; probabilities are derived on demand in double precision. Smoothing
follows an on-zero policy by default: an instance is scored with raw count
ratios unless the raw product is zero for any class, in which case every
factor of every class is recomputed with the add-k estimate so that scores
stay comparable across classes.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal

from .data import DataError, Dataset, Instance, AttributeSchema, distinct_values

SmoothingMode = Literal["none", "laplace-on-zero", "laplace-always"]

_MODES = ("none", "laplace-on-zero", "laplace-always")


@dataclass(frozen=True)
class SmoothingPolicy:
    """How zero-count factors are handled when scoring an instance."""

    mode: SmoothingMode = "laplace-on-zero"
    k: float = 1.0

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise DataError(f"unknown smoothing mode {self.mode!r}; expected one of {_MODES}")
        if not self.k > 0:
            raise DataError(f"smoothing k must be positive, got {self.k}")


DEFAULT_POLICY = SmoothingPolicy()
NO_SMOOTHING = SmoothingPolicy(mode="none")


def laplace(count: int, group_total: int, cardinality: int, k: float = 1.0) -> float:
    """Add-k estimate (count + k) / (group_total + cardinality * k).

    Always strictly positive; converges to count/group_total as k -> 0.
    """
    if cardinality < 1:
        raise DataError(f"cardinality must be >= 1, got {cardinality}")
    if not k > 0:
        raise DataError(f"k must be positive, got {k}")
    if count < 0 or group_total < 0 or count > group_total:
        raise DataError(f"need 0 <= count <= group_total, got {count}/{group_total}")
    return (count + k) / (group_total + cardinality * k)


@dataclass(frozen=True)
class NaiveBayesModel:
    """Per-class and per-(attribute, value, class) counts from one data scan.

    ``cond_count`` is keyed by (attribute name, value, label) and stores only
    nonzero counts; absent keys mean a count of zero. ``value_cardinality``
    is the distinct-value count per attribute (observed union declared) and
    supplies the smoothing denominator.
    """

    schema: AttributeSchema
    class_count: Mapping[str, int]
    total: int
    cond_count: Mapping[tuple[str, str, str], int]
    value_cardinality: Mapping[str, int]

    def prior(self, label: str) -> float:
        """Class frequency in the training data."""
        self._check_label(label)
        return self.class_count[label] / self.total

    def count(self, attribute: str, value: str, label: str) -> int:
        """Raw co-occurrence count; 0 for values unseen with this class."""
        self._check_attribute(attribute)
        self._check_label(label)
        return self.cond_count.get((attribute, value, label), 0)

    def conditional(
        self,
        attribute: str,
        value: str,
        label: str,
        policy: SmoothingPolicy = NO_SMOOTHING,
    ) -> float:
        """One P(value | label) factor for a single attribute.

        Modes "none" and "laplace-on-zero" return the raw count ratio here
        (the on-zero fallback is an instance-level decision, see
        :meth:`class_likelihoods`); "laplace-always" returns the add-k
        estimate. Unseen values are a count of zero, not an error.
        """
        c = self.count(attribute, value, label)
        if policy.mode == "laplace-always":
            return laplace(c, self.class_count[label], self.value_cardinality[attribute], policy.k)
        group = self.class_count[label]
        return c / group if group else 0.0

    def class_likelihoods(
        self, instance: Instance, policy: SmoothingPolicy = DEFAULT_POLICY
    ) -> dict[str, float]:
        """P(instance | label) for every class label under one smoothing decision.

        With "laplace-on-zero", raw products are used unless some class has a
        zero-count factor (exact integer test), in which case the products of
        ALL classes are recomputed from smoothed factors.
        """
        self._check_instance(instance)
        names = self.schema.attribute_names
        smooth = policy.mode == "laplace-always"
        if policy.mode == "laplace-on-zero":
            smooth = any(
                self.cond_count.get((attr, value, label), 0) == 0
                for label in self.schema.class_labels
                for attr, value in zip(names, instance)
            )
        out: dict[str, float] = {}
        for label in self.schema.class_labels:
            group = self.class_count[label]
            product = 1.0
            for attr, value in zip(names, instance):
                c = self.cond_count.get((attr, value, label), 0)
                if smooth:
                    product *= laplace(c, group, self.value_cardinality[attr], policy.k)
                else:
                    product *= c / group if group else 0.0
            out[label] = product
        return out

    def likelihood(
        self, instance: Instance, label: str, policy: SmoothingPolicy = DEFAULT_POLICY
    ) -> float:
        """Product of per-attribute conditionals for one class."""
        self._check_label(label)
        return self.class_likelihoods(instance, policy)[label]

    def posterior_score(
        self, instance: Instance, label: str, policy: SmoothingPolicy = DEFAULT_POLICY
    ) -> float:
        """likelihood * prior; unnormalized, sufficient for the argmax."""
        self._check_label(label)
        return self.class_likelihoods(instance, policy)[label] * self.prior(label)

    def predict(
        self, instance: Instance, policy: SmoothingPolicy = DEFAULT_POLICY
    ) -> tuple[str, dict[str, float]]:
        """Label with the maximum posterior score, plus all scores.

        Ties break to the earliest label in schema order.
        """
        likelihoods = self.class_likelihoods(instance, policy)
        scores = {
            label: likelihoods[label] * self.class_count[label] / self.total
            for label in self.schema.class_labels
        }
        best = self.schema.class_labels[0]
        for label in self.schema.class_labels[1:]:
            if scores[label] > scores[best]:
                best = label
        return best, scores

    def _check_label(self, label: str) -> None:
        if label not in self.class_count:
            raise DataError(f"unknown class label {label!r}")

    def _check_attribute(self, attribute: str) -> None:
        if attribute not in self.value_cardinality:
            raise DataError(f"unknown attribute {attribute!r}")

    def _check_instance(self, instance: Instance) -> None:
        if len(instance) != len(self.schema.attributes):
            raise DataError(
                f"instance has {len(instance)} values, schema has "
                f"{len(self.schema.attributes)} attributes"
            )


def fit(dataset: Dataset) -> NaiveBayesModel:
    """Count classes and (attribute, value, class) pairs in one pass."""
    if not dataset.rows:
        raise DataError("cannot fit a model on an empty dataset")
    schema = dataset.schema
    class_count = {label: 0 for label in schema.class_labels}
    cond: Counter[tuple[str, str, str]] = Counter()
    names = schema.attribute_names
    for row in dataset.rows:
        class_count[row.label] += 1
        for attr, value in zip(names, row.instance):
            cond[(attr, value, row.label)] += 1
    cardinality = {attr: len(distinct_values(dataset, attr)) for attr in names}
    return NaiveBayesModel(
        schema=schema,
        class_count=class_count,
        total=len(dataset.rows),
        cond_count=dict(cond),
        value_cardinality=cardinality,
    )
