"""Structural classification of ontology concepts.

Concepts are graded by how much structure they actually carry: a bare set of
things, a class held together by one common property, a kind with several,
or a natural kind whose members are additionally bound by laws. Laws here
are restrictions and disjointness assertions. Properties split into
intrinsic ones (carried by a single thing, datatype-valued) and mutual ones
(shared between things, object-valued).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .ontology import DATATYPE, DISJOINT, Ontology, OntologyIndex


class Category(IntEnum):
    THING_SET = 0
    CLASS = 1
    KIND = 2
    NATURAL_KIND = 3


CATEGORY_LABELS = {
    Category.THING_SET: "thingSet",
    Category.CLASS: "bwwClass",
    Category.KIND: "kind",
    Category.NATURAL_KIND: "naturalKind",
}

INTRINSIC = "intrinsic"
MUTUAL = "mutual"


@dataclass(frozen=True)
class ConceptClassification:
    name: str
    category: str
    property_count: int
    law_count: int


@dataclass(frozen=True)
class PropertyClassification:
    name: str
    category: str


@dataclass(frozen=True)
class BwwReport:
    concepts: tuple[ConceptClassification, ...]
    properties: tuple[PropertyClassification, ...]
    notes: tuple[str, ...]

    def concept(self, name: str) -> ConceptClassification:
        for c in self.concepts:
            if c.name == name:
                return c
        raise KeyError(name)

    def category_of(self, name: str) -> str:
        return self.concept(name).category


def classify_property(category: str) -> str:
    return INTRINSIC if category == DATATYPE else MUTUAL


def _categorize(property_count: int, law_count: int) -> Category:
    if property_count == 0:
        return Category.THING_SET
    if property_count == 1:
        return Category.CLASS
    if law_count == 0:
        return Category.KIND
    return Category.NATURAL_KIND


def classify(ont: Ontology, index: OntologyIndex | None = None) -> BwwReport:
    """Grade every class and property. Deterministic: entries come out
    sorted by name."""
    if index is None:
        index = OntologyIndex(ont)

    disjoint_mentions: dict[str, int] = {}
    for ax in ont.axioms:
        if ax.kind == DISJOINT and ax.target.op == "named":
            for side in {ax.subject, ax.target.name}:
                disjoint_mentions[side] = disjoint_mentions.get(side, 0) + 1

    # Per-class feature sets, unioned over the superclass closure. This is
    # the counting core of effective_properties/effective_restrictions
    # without materializing the origin-tagged entry lists, which matters on
    # deep hierarchies.
    domain_names: dict[str, set[str]] = {}
    restriction_names: dict[str, set[str]] = {}
    restriction_count: dict[str, int] = {}
    for cls in ont.classes:
        domain_names[cls.name] = {p.name
                                  for p in index.domain_of.get(cls.name, [])}
        direct = index.direct_restrictions(cls.name)
        restriction_count[cls.name] = len(direct)
        restriction_names[cls.name] = {r.on_property for r in direct
                                       if r.on_property in index.properties}

    concepts = []
    notes = []
    for cls in sorted(ont.classes, key=lambda c: c.name):
        names = set(domain_names[cls.name]) | restriction_names[cls.name]
        law_count = (restriction_count[cls.name]
                     + disjoint_mentions.get(cls.name, 0))
        for sup in index.ancestors(cls.name):
            names |= domain_names[sup]
            names |= restriction_names[sup]
            law_count += restriction_count[sup]
        property_count = len(names)
        category = _categorize(property_count, law_count)
        concepts.append(ConceptClassification(
            cls.name, CATEGORY_LABELS[category], property_count, law_count))
        if property_count == 1 and law_count > 0:
            notes.append(
                f"{cls.name}: laws present but only one common property; "
                "graded as a class, not a natural kind")

    properties = tuple(
        PropertyClassification(p.name, classify_property(p.category))
        for p in sorted(ont.properties, key=lambda p: p.name))

    return BwwReport(tuple(concepts), properties, tuple(notes))
