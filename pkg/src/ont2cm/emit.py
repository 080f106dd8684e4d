"""Serializers for models, gradings and review reports.

All output is deterministic: no timestamps, no environment-dependent
content, collections in canonical order. Emitting the same model twice
gives byte-identical text.
"""

from __future__ import annotations

import json

from .bww import BwwReport
from .model import (
    AGGREGATION,
    AND_GROUP,
    COMPOSITION,
    DISJOINT_GROUP,
    Attribute,
    ConceptualModel,
    EntityType,
    Generalization,
    Instance,
    Multiplicity,
    Relationship,
    SemanticConstraint,
)
from .transform import FLAG_KINDS, ValidationReport


# --------------------------------------------------------------------------
# model JSON


def _mult_to_json(m: Multiplicity) -> dict:
    out = {"lower": m.lower, "upper": "*" if m.upper is None else m.upper}
    if m.unsatisfiable:
        out["unsatisfiable"] = True
    return out


def _mult_from_json(data: dict) -> Multiplicity:
    upper = data["upper"]
    return Multiplicity(data["lower"], None if upper == "*" else upper,
                        unsatisfiable=data.get("unsatisfiable", False))


def emit_model_json(model: ConceptualModel) -> str:
    doc = {
        "name": model.name,
        "entityTypes": [
            {
                "id": et.id,
                "name": et.name,
                "originClass": et.origin_class,
                "bww": et.bww,
                "definitionKind": et.definition_kind,
                "attributes": [
                    {
                        "name": a.name,
                        "datatype": a.datatype,
                        "multiplicity": _mult_to_json(a.multiplicity),
                        "originProperty": a.origin_property,
                    }
                    for a in et.attributes
                ],
            }
            for et in model.entity_types
        ],
        "relationships": [
            {
                "id": r.id,
                "name": r.name,
                "sourceId": r.source_id,
                "targetId": r.target_id,
                "sourceMult": _mult_to_json(r.source_mult),
                "targetMult": _mult_to_json(r.target_mult),
                "exclusive": r.exclusive,
                "kind": r.kind,
                "whole": r.whole,
                "groupId": r.group_id,
            }
            for r in model.relationships
        ],
        "generalizations": [
            {"subId": g.sub_id, "superId": g.super_id}
            for g in model.generalizations
        ],
        "constraints": [
            {"id": c.id, "kind": c.kind, "memberIds": list(c.member_ids)}
            for c in model.constraints
        ],
        "instances": [
            {"name": i.name, "typeIds": list(i.type_ids)}
            for i in model.instances
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_model_json(text: str) -> ConceptualModel:
    doc = json.loads(text)
    entity_types = tuple(
        EntityType(
            et["id"], et["name"], et["originClass"], et["bww"],
            et["definitionKind"],
            tuple(Attribute(a["name"], a["datatype"],
                            _mult_from_json(a["multiplicity"]),
                            a["originProperty"])
                  for a in et["attributes"]))
        for et in doc["entityTypes"])
    relationships = tuple(
        Relationship(r["id"], r["name"], r["sourceId"], r["targetId"],
                     _mult_from_json(r["sourceMult"]),
                     _mult_from_json(r["targetMult"]),
                     exclusive=r["exclusive"], kind=r["kind"],
                     whole=r["whole"], group_id=r["groupId"])
        for r in doc["relationships"])
    generalizations = tuple(
        Generalization(g["subId"], g["superId"]) for g in doc["generalizations"])
    constraints = tuple(
        SemanticConstraint(c["id"], c["kind"], tuple(c["memberIds"]))
        for c in doc["constraints"])
    instances = tuple(
        Instance(i["name"], tuple(i["typeIds"])) for i in doc["instances"])
    return ConceptualModel(doc["name"], entity_types, relationships,
                           generalizations, constraints, instances)


# --------------------------------------------------------------------------
# diagram text


def _mult_label(m: Multiplicity) -> str:
    upper = "*" if m.upper is None else str(m.upper)
    label = f"{m.lower}..{upper}"
    return label + "!" if m.unsatisfiable else label


def _member_label(model: ConceptualModel, member_id: str) -> str:
    for r in model.relationships:
        if r.id == member_id:
            source = model.entity(r.source_id).name
            target = model.entity(r.target_id).name
            return f"{r.name}({source}, {target})"
    for et in model.entity_types:
        if et.id == member_id:
            return et.name
    return member_id


_CONSTRAINT_LABELS = {AND_GROUP: "and", DISJOINT_GROUP: "disjoint"}


def _constraint_text(model: ConceptualModel, con: SemanticConstraint) -> str:
    label = _CONSTRAINT_LABELS.get(con.kind, "or")
    members = ", ".join(_member_label(model, m) for m in con.member_ids)
    return f"{{{label}}}: {members}"


def emit_plantuml(model: ConceptualModel) -> str:
    lines = ["@startuml", f"title {model.name}"]
    for et in model.entity_types:
        head = f"class {et.name} <<{et.bww}>>"
        if et.attributes:
            lines.append(head + " {")
            for a in et.attributes:
                lines.append(f"  {a.name} : {a.datatype} "
                             f"[{_mult_label(a.multiplicity)}]")
            lines.append("}")
        else:
            lines.append(head)
    for g in model.generalizations:
        lines.append(f"{model.entity(g.super_id).name} <|-- "
                     f"{model.entity(g.sub_id).name}")
    for r in model.relationships:
        source = model.entity(r.source_id).name
        target = model.entity(r.target_id).name
        label = r.name + (" {exclusive}" if r.exclusive else "")
        if r.kind in (AGGREGATION, COMPOSITION):
            connector = "*--" if r.kind == COMPOSITION else "o--"
            whole = model.entity(r.whole).name
            part = target if r.whole == r.source_id else source
            lines.append(f"{whole} {connector} {part} : {label}")
        else:
            lines.append(f'{source} "{_mult_label(r.source_mult)}" --> '
                         f'"{_mult_label(r.target_mult)}" {target} : {label}')
    for n, con in enumerate(model.constraints, start=1):
        lines.append(f'note "{_constraint_text(model, con)}" as N{n}')
    lines.append("@enduml")
    return "\n".join(lines) + "\n"


def emit_dot(model: ConceptualModel) -> str:
    lines = ["digraph model {", "  rankdir=BT;", "  node [shape=box];"]
    for et in model.entity_types:
        label_parts = [f"{et.name} <<{et.bww}>>"]
        for a in et.attributes:
            label_parts.append(f"{a.name} : {a.datatype} "
                               f"[{_mult_label(a.multiplicity)}]")
        label = "\\n".join(label_parts)
        lines.append(f'  "{et.name}" [label="{label}"];')
    for g in model.generalizations:
        lines.append(f'  "{model.entity(g.sub_id).name}" -> '
                     f'"{model.entity(g.super_id).name}" [arrowhead=onormal];')
    for r in model.relationships:
        source = model.entity(r.source_id).name
        target = model.entity(r.target_id).name
        label = (f"{r.name} ({_mult_label(r.source_mult)}, "
                 f"{_mult_label(r.target_mult)})")
        if r.exclusive:
            label += " {exclusive}"
        if r.kind in (AGGREGATION, COMPOSITION):
            whole = model.entity(r.whole).name
            part = target if r.whole == r.source_id else source
            tail = "diamond" if r.kind == COMPOSITION else "odiamond"
            lines.append(f'  "{whole}" -> "{part}" [label="{label}", '
                         f'dir=both, arrowtail={tail}, arrowhead=none];')
        else:
            lines.append(f'  "{source}" -> "{target}" [label="{label}", '
                         "arrowhead=vee];")
    for con in model.constraints:
        lines.append(f'  "{con.id}" [shape=note, '
                     f'label="{_constraint_text(model, con)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# review report


_SECTIONS = {
    "droppedProperty": (
        "Dropped properties",
        "A property could not be anchored as an attribute or a relationship.",
        "Declare a domain and a range, or restrict the property on a class."),
    "unmappedConstruct": (
        "Unmapped constructs",
        "A source construct has no counterpart in the model.",
        "Model the information another way, or confirm it can be left out."),
    "exclusiveRelation": (
        "Exclusive relationships",
        "A universal restriction admits only the listed target.",
        "Confirm the exclusive marker on the relationship."),
    "compositionCandidate": (
        "Composition candidates",
        "Whole-part naming with a part nothing else relates to.",
        "Confirm the part cannot outlive the whole."),
    "aggregationCandidate": (
        "Aggregation candidates",
        "Whole-part naming, but the part joins other relationships.",
        "Confirm shared ownership is intended."),
    "unsatisfiableMultiplicity": (
        "Unsatisfiable multiplicities",
        "Merged cardinality bounds exclude every possible count.",
        "Relax one of the conflicting restrictions."),
    "equivalenceCollapsed": (
        "Collapsed equivalences",
        "A subclass cycle made several classes mutually equivalent.",
        "Confirm the surviving name is the right one."),
    "multiDomainProperty": (
        "Multi-domain properties",
        "One property is declared on several domains, so it maps several times.",
        "Check that the copies should stay in sync."),
    "nameCollision": (
        "Name collisions",
        "Two model elements wanted the same name; one was renamed.",
        "Rename at the source to keep names stable."),
    "zeroPropertyEntity": (
        "Entities without properties",
        "No property reaches this entity.",
        "Confirm the entity earns its place in the model."),
}


def emit_report(model: ConceptualModel, report: ValidationReport) -> str:
    lines = ["# Specialist validation report", "",
             f"Model: {model.name}",
             f"{len(report.items)} flag(s), {len(report.notes)} note(s)."]
    if not report.items and not report.notes:
        lines.append("")
        lines.append("Nothing flagged.")
        return "\n".join(lines) + "\n"
    for kind in FLAG_KINDS:
        items = sorted(report.by_kind(kind), key=lambda i: (i.subject, i.detail))
        if not items:
            continue
        title, origin, action = _SECTIONS[kind]
        lines.extend(["", f"## {title}", "", origin,
                      f"Suggested action: {action}", ""])
        for item in items:
            lines.append(f"- `{item.subject}`: {item.detail}")
    if report.notes:
        lines.extend(["", "## Notes", ""])
        for note in report.notes:
            lines.append(f"- {note}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# concept grading JSON


def emit_bww_json(report: BwwReport) -> str:
    doc = {
        "concepts": {
            c.name: {
                "category": c.category,
                "propertyCount": c.property_count,
                "lawCount": c.law_count,
            }
            for c in report.concepts
        },
        "properties": {
            p.name: {"category": p.category} for p in report.properties
        },
        "notes": list(report.notes),
    }
    return json.dumps(doc, indent=2) + "\n"
