"""Schema-validated categorical datasets.

Every value is an opaque text token; numeric or temporal columns must be
discretized before they get here (see :mod:`noise_sieve.ingest`). All types
are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass


class DataError(ValueError):
    """A user-facing input problem: bad schema, malformed row, unknown name."""


class SchemaError(DataError):
    """A schema or a row fails validation against its schema."""


Instance = tuple[str, ...]
"""One attribute value per schema attribute, in schema order."""


@dataclass(frozen=True)
class Attribute:
    """A categorical attribute, optionally with a declared value vocabulary.

    Declared values widen the distinct-value set used for smoothing
    denominators; they do not restrict what a dataset may contain.
    """

    name: str
    declared_values: frozenset[str] | None = None


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered feature attributes plus the class attribute and its labels.

    The label order is fixed and used for deterministic tie-breaking
    everywhere a tie between classes can occur.
    """

    attributes: tuple[Attribute, ...]
    class_attribute: str
    class_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        if any(not n for n in names):
            raise SchemaError("attribute names must be non-empty")
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute names: {names}")
        if not self.class_attribute:
            raise SchemaError("class attribute name must be non-empty")
        if self.class_attribute in names:
            raise SchemaError(
                f"class attribute {self.class_attribute!r} is also a feature attribute"
            )
        if not self.class_labels:
            raise SchemaError("class_labels must be non-empty")
        if len(set(self.class_labels)) != len(self.class_labels):
            raise SchemaError(f"duplicate class labels: {self.class_labels}")

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def attribute_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise DataError(f"unknown attribute {name!r}")


def schema(
    attribute_names: Sequence[str],
    class_attribute: str,
    class_labels: Sequence[str],
) -> AttributeSchema:
    """Build a schema from bare attribute names (no declared vocabularies)."""
    return AttributeSchema(
        attributes=tuple(Attribute(n) for n in attribute_names),
        class_attribute=class_attribute,
        class_labels=tuple(class_labels),
    )


@dataclass(frozen=True)
class LabeledInstance:
    """A feature vector with its class label and a stable row id.

    ``id`` may be ``None`` on input to :func:`validate_dataset`, which then
    assigns dense ids; rows inside a :class:`Dataset` always carry one.
    """

    id: int | None
    instance: Instance
    label: str


@dataclass(frozen=True)
class Dataset:
    """An ordered, schema-valid collection of labeled instances.

    Duplicate instances are permitted. A Dataset may be empty (e.g. after
    filtering away every row); training operations reject empty input.
    """

    schema: AttributeSchema
    rows: tuple[LabeledInstance, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def ids(self) -> tuple[int, ...]:
        return tuple(row.id for row in self.rows)  # type: ignore[misc]

    def column(self, attribute: str) -> tuple[str, ...]:
        i = self.schema.attribute_index(attribute)
        return tuple(row.instance[i] for row in self.rows)

    def label_counts(self) -> dict[str, int]:
        counts = {label: 0 for label in self.schema.class_labels}
        for row in self.rows:
            counts[row.label] += 1
        return counts

    def without_ids(self, ids: Iterable[int]) -> "Dataset":
        """Rows minus the given ids, order and ids preserved."""
        drop = set(ids)
        unknown = drop - set(self.ids())
        if unknown:
            raise DataError(f"unknown row ids: {sorted(unknown)}")
        return Dataset(self.schema, tuple(r for r in self.rows if r.id not in drop))

    def restrict_to_ids(self, ids: Iterable[int]) -> "Dataset":
        """Rows whose id is in ``ids``, dataset order preserved."""
        keep = set(ids)
        unknown = keep - set(self.ids())
        if unknown:
            raise DataError(f"unknown row ids: {sorted(unknown)}")
        return Dataset(self.schema, tuple(r for r in self.rows if r.id in keep))


def validate_dataset(
    schema: AttributeSchema, rows: Sequence[LabeledInstance]
) -> Dataset:
    """Validate rows against the schema and assemble a Dataset.

    Ids are kept when every row carries one (they must then be unique and
    non-negative); if any row lacks an id, all ids are reassigned 0..N-1 in
    input order. Raises :class:`SchemaError` naming the first offending row.
    """
    if not rows:
        raise SchemaError("dataset must contain at least one row")
    n_attrs = len(schema.attributes)
    labels = set(schema.class_labels)
    for i, row in enumerate(rows):
        if len(row.instance) != n_attrs:
            raise SchemaError(
                f"row {i}: expected {n_attrs} attribute values, got {len(row.instance)}"
            )
        for attr, value in zip(schema.attributes, row.instance):
            if value == "":
                raise SchemaError(f"row {i}: empty value for attribute {attr.name!r}")
        if row.label not in labels:
            raise SchemaError(
                f"row {i}: label {row.label!r} not in class labels {schema.class_labels}"
            )
    if all(row.id is not None for row in rows):
        seen: set[int] = set()
        for i, row in enumerate(rows):
            assert row.id is not None
            if row.id < 0:
                raise SchemaError(f"row {i}: negative id {row.id}")
            if row.id in seen:
                raise SchemaError(f"row {i}: duplicate id {row.id}")
            seen.add(row.id)
        final = tuple(rows)
    else:
        final = tuple(
            LabeledInstance(i, row.instance, row.label) for i, row in enumerate(rows)
        )
    return Dataset(schema, final)


def distinct_values(dataset: Dataset, attribute: str) -> set[str]:
    """Values observed for an attribute, union its declared vocabulary."""
    i = dataset.schema.attribute_index(attribute)
    values = {row.instance[i] for row in dataset.rows}
    declared = dataset.schema.attributes[i].declared_values
    if declared:
        values |= declared
    return values
