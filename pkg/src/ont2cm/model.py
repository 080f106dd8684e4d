"""Conceptual data model: entity types with attributes, relationships,
generalizations, semantic constraint groups and instances.

Ids are stable strings ("et:Protein", "rel:binds:Protein:DNA",
"con:disjoint:DNA:RNA") so models can be compared and emitted byte for
byte. check_model is the structural gatekeeper: a model coming out of the
transformation must always pass it.
"""

from __future__ import annotations

from dataclasses import dataclass

ASSOCIATION = "association"
AGGREGATION = "aggregation"
COMPOSITION = "composition"

AND_GROUP = "andGroup"
OR_GROUP = "orGroup"
DISJOINT_GROUP = "disjoint"


@dataclass(frozen=True)
class Multiplicity:
    lower: int
    upper: int | None = None  # None means unbounded
    unsatisfiable: bool = False


MANY = Multiplicity(0, None)
EXACTLY_ONE = Multiplicity(1, 1)


@dataclass(frozen=True)
class Attribute:
    name: str
    datatype: str
    multiplicity: Multiplicity
    origin_property: str


@dataclass(frozen=True)
class EntityType:
    id: str
    name: str
    origin_class: str
    bww: str
    definition_kind: str
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class Relationship:
    id: str
    name: str
    source_id: str
    target_id: str
    source_mult: Multiplicity
    target_mult: Multiplicity
    exclusive: bool = False
    kind: str = ASSOCIATION
    whole: str | None = None     # entity id owning the part, when aggregated
    group_id: str | None = None  # and/or constraint this edge belongs to


@dataclass(frozen=True)
class Generalization:
    sub_id: str
    super_id: str


@dataclass(frozen=True)
class SemanticConstraint:
    id: str
    kind: str
    member_ids: tuple[str, ...]


@dataclass(frozen=True)
class Instance:
    name: str
    type_ids: tuple[str, ...]


@dataclass(frozen=True)
class ConceptualModel:
    name: str
    entity_types: tuple[EntityType, ...] = ()
    relationships: tuple[Relationship, ...] = ()
    generalizations: tuple[Generalization, ...] = ()
    constraints: tuple[SemanticConstraint, ...] = ()
    instances: tuple[Instance, ...] = ()

    def entity(self, entity_id: str) -> EntityType:
        for et in self.entity_types:
            if et.id == entity_id:
                return et
        raise KeyError(entity_id)

    def entity_by_name(self, name: str) -> EntityType:
        for et in self.entity_types:
            if et.name == name:
                return et
        raise KeyError(name)


@dataclass(frozen=True)
class ModelDefect:
    kind: str
    subject: str
    message: str


def entity_id(name: str) -> str:
    return f"et:{name}"


def relationship_id(name: str, source: str, target: str) -> str:
    return f"rel:{name}:{source}:{target}"


def _check_multiplicity(m: Multiplicity, subject: str, defects: list[ModelDefect]) -> None:
    if m.lower < 0:
        defects.append(ModelDefect("badMultiplicity", subject,
                                   f"{subject}: lower bound {m.lower} is negative"))
    if m.upper is not None and m.upper < m.lower and not m.unsatisfiable:
        defects.append(ModelDefect(
            "badMultiplicity", subject,
            f"{subject}: upper bound {m.upper} below lower {m.lower} "
            "without an unsatisfiable marker"))


def check_model(model: ConceptualModel) -> list[ModelDefect]:
    """Structural well-formedness: unique ids, resolvable references, sane
    multiplicities, acyclic generalization, constraint groups of at least
    two homogeneous members."""
    defects: list[ModelDefect] = []
    entity_ids = [et.id for et in model.entity_types]
    entity_id_set = set(entity_ids)
    rel_ids = [r.id for r in model.relationships]
    rel_id_set = set(rel_ids)
    constraint_ids = [c.id for c in model.constraints]

    def check_unique(ids, what):
        seen, dup = set(), set()
        for i in ids:
            if i in seen and i not in dup:
                defects.append(ModelDefect("duplicateId", i, f"{what} id {i!r} repeats"))
                dup.add(i)
            seen.add(i)

    check_unique(entity_ids, "entity type")
    check_unique(rel_ids, "relationship")
    check_unique(constraint_ids, "constraint")

    seen_names: set[str] = set()
    for et in model.entity_types:
        if et.name in seen_names:
            defects.append(ModelDefect("duplicateName", et.name,
                                       f"entity name {et.name!r} repeats"))
        seen_names.add(et.name)
        attr_names: set[str] = set()
        for attr in et.attributes:
            if attr.name in attr_names:
                defects.append(ModelDefect(
                    "duplicateAttribute", f"{et.name}.{attr.name}",
                    f"attribute {attr.name!r} repeats on {et.name}"))
            attr_names.add(attr.name)
            _check_multiplicity(attr.multiplicity, f"{et.name}.{attr.name}", defects)

    constraint_by_id = {c.id: c for c in model.constraints}
    for rel in model.relationships:
        for end in (rel.source_id, rel.target_id):
            if end not in entity_id_set:
                defects.append(ModelDefect("danglingReference", rel.id,
                                           f"{rel.id} endpoint {end!r} is unknown"))
        _check_multiplicity(rel.source_mult, f"{rel.id} source", defects)
        _check_multiplicity(rel.target_mult, f"{rel.id} target", defects)
        if rel.kind in (AGGREGATION, COMPOSITION):
            if rel.whole not in (rel.source_id, rel.target_id):
                defects.append(ModelDefect(
                    "badWhole", rel.id,
                    f"{rel.id} is a {rel.kind} but its whole {rel.whole!r} "
                    "is not an endpoint"))
        elif rel.whole is not None:
            defects.append(ModelDefect("badWhole", rel.id,
                                       f"association {rel.id} must not name a whole"))
        if rel.group_id is not None and rel.group_id not in constraint_by_id:
            defects.append(ModelDefect("danglingReference", rel.id,
                                       f"{rel.id} names unknown group {rel.group_id!r}"))

    gen_edges: dict[str, list[str]] = {}
    seen_gens: set[tuple[str, str]] = set()
    for gen in model.generalizations:
        pair = (gen.sub_id, gen.super_id)
        if pair in seen_gens:
            defects.append(ModelDefect("duplicateId", f"{gen.sub_id}->{gen.super_id}",
                                       "generalization repeats"))
        seen_gens.add(pair)
        for end in pair:
            if end not in entity_id_set:
                defects.append(ModelDefect(
                    "danglingReference", f"{gen.sub_id}->{gen.super_id}",
                    f"generalization endpoint {end!r} is unknown"))
        if gen.sub_id == gen.super_id:
            defects.append(ModelDefect("generalizationCycle", gen.sub_id,
                                       f"{gen.sub_id} generalizes itself"))
        gen_edges.setdefault(gen.sub_id, []).append(gen.super_id)

    # cycle sweep over the generalization graph
    state: dict[str, int] = {}  # 1 in progress, 2 done

    def visit(node: str, trail: list[str]) -> None:
        state[node] = 1
        trail.append(node)
        for nxt in gen_edges.get(node, []):
            if state.get(nxt) == 1:
                cycle = trail[trail.index(nxt):] + [nxt]
                defects.append(ModelDefect(
                    "generalizationCycle", nxt,
                    "generalization cycle: " + " -> ".join(cycle)))
            elif state.get(nxt) is None:
                visit(nxt, trail)
        trail.pop()
        state[node] = 2

    for node in sorted(gen_edges):
        if state.get(node) is None:
            visit(node, [])

    for con in model.constraints:
        if len(con.member_ids) < 2:
            defects.append(ModelDefect("badConstraint", con.id,
                                       f"{con.id} needs at least 2 members"))
        if con.kind == DISJOINT_GROUP:
            pool, what = entity_id_set, "entity"
        elif con.kind in (AND_GROUP, OR_GROUP):
            # groups are homogeneous: all relationships or all entity types
            pool = rel_id_set if all(m in rel_id_set for m in con.member_ids) \
                else entity_id_set
            what = "member"
        else:
            defects.append(ModelDefect("badConstraint", con.id,
                                       f"{con.id} has unknown kind {con.kind!r}"))
            continue
        for m in con.member_ids:
            if m not in pool:
                defects.append(ModelDefect(
                    "danglingReference", con.id,
                    f"{con.id} references unknown {what} {m!r}"))

    seen_instances: set[str] = set()
    for inst in model.instances:
        if inst.name in seen_instances:
            defects.append(ModelDefect("duplicateName", inst.name,
                                       f"instance {inst.name!r} repeats"))
        seen_instances.add(inst.name)
        for t in inst.type_ids:
            if t not in entity_id_set:
                defects.append(ModelDefect("danglingReference", inst.name,
                                           f"instance {inst.name} has unknown type {t!r}"))

    return defects


def canonical_order(model: ConceptualModel) -> ConceptualModel:
    """Sort every collection into its canonical order. Idempotent; two
    models with the same content compare equal after ordering."""
    entity_types = tuple(sorted(
        (EntityType(et.id, et.name, et.origin_class, et.bww, et.definition_kind,
                    tuple(sorted(et.attributes, key=lambda a: a.name)))
         for et in model.entity_types),
        key=lambda et: et.name))
    relationships = tuple(sorted(
        model.relationships,
        key=lambda r: (r.name, r.source_id, r.target_id)))
    generalizations = tuple(sorted(
        model.generalizations, key=lambda g: (g.sub_id, g.super_id)))
    constraints = tuple(sorted(
        model.constraints, key=lambda c: (c.kind, c.member_ids, c.id)))
    instances = tuple(sorted(model.instances, key=lambda i: i.name))
    return ConceptualModel(model.name, entity_types, relationships,
                           generalizations, constraints, instances)
