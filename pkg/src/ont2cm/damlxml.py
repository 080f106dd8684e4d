"""Importer for DAML-style RDF/XML ontology documents.

The importer is total over well-formed XML: every element is either
translated into the in-memory ontology or recorded as skipped with its
location, so the two tallies always add up to the document's element count.
Whatever the source forgets to declare is declared automatically with a
note, keeping the imported ontology free of dangling references.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .ontology import (
    DATATYPE,
    DATATYPES,
    DEFINED,
    DISJOINT,
    OBJECT,
    PRIMITIVE,
    SAME_CLASS,
    SUBCLASS,
    Axiom,
    ClassDefinition,
    ClassExpression,
    Individual,
    Ontology,
    PropertyDefinition,
    Restriction,
    named,
    restriction_expr,
)

_DAML = "http://www.daml.org/2001/03/daml+oil#"
_RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
_RDFS = "http://www.w3.org/2000/01/rdf-schema#"
_XSD = "http://www.w3.org/2001/XMLSchema#"
_PREFIXES = {_DAML: "daml", _RDF: "rdf", _RDFS: "rdfs", _XSD: "xsd"}

_RDF_ABOUT = f"{{{_RDF}}}about"
_RDF_ID = f"{{{_RDF}}}ID"
_RDF_RESOURCE = f"{{{_RDF}}}resource"

_CARDINALITY_TAGS = {"cardinality": "exactly", "minCardinality": "min",
                     "maxCardinality": "max", "cardinalityQ": "exactly",
                     "minCardinalityQ": "min", "maxCardinalityQ": "max"}


class DamlImportError(ValueError):
    pass


class _Unmappable(Exception):
    """Raised while parsing a class expression that has no counterpart;
    the surrounding element gets skipped instead of aborting the import."""


@dataclass(frozen=True)
class SkippedEntry:
    name: str
    count: int
    first_location: str


@dataclass(frozen=True)
class ImportReport:
    ontology: Ontology
    translated: tuple[tuple[str, int], ...]
    skipped: tuple[SkippedEntry, ...]
    notes: tuple[str, ...]

    def translated_total(self) -> int:
        return sum(count for _, count in self.translated)

    def skipped_total(self) -> int:
        return sum(entry.count for entry in self.skipped)


def _split(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        uri, _, local = tag[1:].partition("}")
        return uri, local
    return "", tag


def _prefixed(tag: str) -> str:
    uri, local = _split(tag)
    prefix = _PREFIXES.get(uri)
    return f"{prefix}:{local}" if prefix else local


def _child_paths(el, path: str):
    counts: dict[str, int] = {}
    for child in el:
        if not isinstance(child.tag, str):
            continue
        tag = _prefixed(child.tag)
        counts[tag] = counts.get(tag, 0) + 1
        yield child, f"{path}/{tag}[{counts[tag]}]"


def _local_name(uri: str) -> str:
    if "#" in uri:
        uri = uri.rsplit("#", 1)[1]
    elif "/" in uri:
        uri = uri.rstrip("/").rsplit("/", 1)[1]
    return uri


class _Importer:
    def __init__(self):
        self.ontology_name: str | None = None
        self.class_order: list[str] = []
        self.definitions: dict[str, ClassExpression | None] = {}
        self.prop_order: list[str] = []
        self.props: dict[str, dict] = {}
        self.axioms: list[Axiom] = []
        self.ind_order: list[str] = []
        self.ind_types: dict[str, list[ClassExpression]] = {}
        self.translated: dict[str, int] = {}
        self.skipped: dict[str, list] = {}
        self.notes: list[str] = []
        self._renames: set[str] = set()

    # ---- bookkeeping

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    def tally(self, el, path: str) -> None:
        name = _prefixed(el.tag)
        self.translated[name] = self.translated.get(name, 0) + 1

    def skip_tree(self, el, path: str) -> None:
        name = _prefixed(el.tag)
        entry = self.skipped.setdefault(name, [0, path])
        entry[0] += 1
        for child, cpath in _child_paths(el, path):
            self.skip_tree(child, cpath)

    def skip_children(self, el, path: str) -> None:
        for child, cpath in _child_paths(el, path):
            self.skip_tree(child, cpath)

    def _apply_journal(self, journal) -> None:
        for op, payload, path in journal:
            if op == "t":
                self.translated[payload] = self.translated.get(payload, 0) + 1
            elif op == "s":
                self.skip_tree(payload, path)
            else:
                self.note(payload)

    # ---- naming

    def sanitize(self, raw: str) -> str:
        name = re.sub(r"[^A-Za-z0-9_-]", "_", raw)
        if not name or not re.match(r"[A-Za-z_]", name[0]):
            name = "_" + name
        if name != raw and raw not in self._renames:
            self._renames.add(raw)
            self.note(f"name {raw!r} adjusted to {name!r}")
        return name

    def name_of(self, el) -> str | None:
        raw = el.attrib.get(_RDF_ABOUT) or el.attrib.get(_RDF_ID)
        if raw is None:
            return None
        local = _local_name(raw)
        if not local:
            return None
        return self.sanitize(local)

    def ref(self, uri: str) -> str:
        return self.sanitize(_local_name(uri))

    # ---- declarations

    def declare_class(self, name: str) -> None:
        if name not in self.definitions:
            self.class_order.append(name)
            self.definitions[name] = None

    def declare_property(self, name: str, category: str) -> dict:
        if name not in self.props:
            self.prop_order.append(name)
            self.props[name] = {"category": category, "domains": [], "range": None}
        elif self.props[name]["category"] != category:
            self.note(f"property {name} declared with conflicting categories; "
                      f"keeping {self.props[name]['category']}")
        return self.props[name]

    # ---- class expressions (journal-buffered so failures roll back)

    def _expr(self, el, path: str, journal) -> ClassExpression:
        uri, local = _split(el.tag)
        tag = _prefixed(el.tag)
        if (uri, local) in ((_DAML, "Class"), (_RDFS, "Class")):
            name = self.name_of(el)
            journal.append(("t", tag, path))
            if name is not None:
                for child, cpath in _child_paths(el, path):
                    journal.append(("s", child, cpath))
                return named(name)
            expr = None
            for child, cpath in _child_paths(el, path):
                curi, clocal = _split(child.tag)
                if expr is None and curi == _DAML and clocal in (
                        "intersectionOf", "unionOf", "complementOf"):
                    expr = self._expr(child, cpath, journal)
                else:
                    raise _Unmappable(
                        f"class expression content {_prefixed(child.tag)}")
            if expr is None:
                raise _Unmappable("anonymous class without an expression")
            return expr
        if uri == _DAML and local in ("intersectionOf", "unionOf"):
            journal.append(("t", tag, path))
            members = []
            for child, cpath in _child_paths(el, path):
                members.append(self._expr(child, cpath, journal))
            if not members:
                raise DamlImportError(f"{tag} at {path} has no members")
            if len(members) == 1:
                journal.append(("n", f"single-member {tag} at {path} unwrapped",
                                path))
                return members[0]
            op = "and" if local == "intersectionOf" else "or"
            return ClassExpression(op, members=tuple(members))
        if uri == _DAML and local == "complementOf":
            journal.append(("t", tag, path))
            resource = el.attrib.get(_RDF_RESOURCE)
            if resource is not None:
                for child, cpath in _child_paths(el, path):
                    journal.append(("s", child, cpath))
                return ClassExpression("not", members=(named(self.ref(resource)),))
            members = [self._expr(child, cpath, journal)
                       for child, cpath in _child_paths(el, path)]
            if len(members) != 1:
                raise DamlImportError(
                    f"complementOf at {path} needs exactly one member")
            return ClassExpression("not", members=(members[0],))
        if (uri, local) == (_DAML, "Restriction"):
            return self._restriction(el, path, journal)
        raise _Unmappable(f"class expression {tag}")

    def _restriction(self, el, path: str, journal) -> ClassExpression:
        on_property: str | None = None
        parts: list[Restriction] = []
        pending: list[tuple] = []

        for key, flavor in _CARDINALITY_TAGS.items():
            attr = el.attrib.get(f"{{{_DAML}}}{key}")
            if attr is not None:
                pending.append(("count", flavor, attr, path))

        for child, cpath in _child_paths(el, path):
            curi, clocal = _split(child.tag)
            if (curi, clocal) == (_DAML, "onProperty"):
                resource = child.attrib.get(_RDF_RESOURCE)
                if resource is None:
                    raise DamlImportError(
                        f"onProperty at {cpath} lacks rdf:resource")
                on_property = self.ref(resource)
                journal.append(("t", _prefixed(child.tag), cpath))
                for g, gpath in _child_paths(child, cpath):
                    journal.append(("s", g, gpath))
            elif curi == _DAML and clocal in ("hasClass", "toClass"):
                journal.append(("t", _prefixed(child.tag), cpath))
                flavor = "some" if clocal == "hasClass" else "only"
                resource = child.attrib.get(_RDF_RESOURCE)
                if resource is not None:
                    for g, gpath in _child_paths(child, cpath):
                        journal.append(("s", g, gpath))
                    pending.append(("class", flavor, named(self.ref(resource)),
                                    cpath))
                    continue
                targets = [self._expr(g, gpath, journal)
                           for g, gpath in _child_paths(child, cpath)]
                if len(targets) != 1:
                    raise DamlImportError(
                        f"{clocal} at {cpath} needs exactly one target")
                pending.append(("class", flavor, targets[0], cpath))
            elif curi == _DAML and clocal in _CARDINALITY_TAGS:
                journal.append(("t", _prefixed(child.tag), cpath))
                for g, gpath in _child_paths(child, cpath):
                    journal.append(("s", g, gpath))
                pending.append(("count", _CARDINALITY_TAGS[clocal],
                                (child.text or "").strip(), cpath))
            elif (curi, clocal) == (_DAML, "hasValue"):
                raise _Unmappable("hasValue restriction")
            else:
                journal.append(("s", child, cpath))

        if on_property is None:
            raise DamlImportError(f"Restriction at {path} lacks onProperty")
        journal.append(("t", _prefixed(el.tag), path))

        for kind, flavor, value, vpath in pending:
            if kind == "class":
                parts.append(Restriction(on_property, flavor, target=value))
            else:
                try:
                    count = int(value)
                except (TypeError, ValueError):
                    raise DamlImportError(
                        f"cardinality at {vpath} is not an integer: {value!r}")
                parts.append(Restriction(on_property, flavor, count=count))
        if not parts:
            raise DamlImportError(f"Restriction at {path} has no constraint")
        if len(parts) == 1:
            return restriction_expr(parts[0])
        return ClassExpression("and",
                               members=tuple(restriction_expr(p) for p in parts))

    def parse_expr_entry(self, el, path: str, where: str) -> ClassExpression | None:
        journal: list[tuple] = []
        try:
            expr = self._expr(el, path, journal)
        except _Unmappable as reason:
            self.skip_tree(el, path)
            self.note(f"{where}: {reason} skipped")
            return None
        self._apply_journal(journal)
        return expr

    # ---- top-level elements

    def class_element(self, el, path: str, name: str) -> None:
        self.tally(el, path)
        self.declare_class(name)
        for child, cpath in _child_paths(el, path):
            curi, clocal = _split(child.tag)
            if (curi, clocal) == (_RDFS, "subClassOf"):
                self._axiom_child(SUBCLASS, name, child, cpath)
            elif curi == _DAML and clocal in ("sameClassAs", "equivalentTo"):
                self._equivalence_child(name, child, cpath)
            elif (curi, clocal) == (_DAML, "disjointWith"):
                resource = child.attrib.get(_RDF_RESOURCE)
                if resource is None:
                    self.skip_tree(child, cpath)
                    self.note(f"class {name}: non-named disjointWith skipped")
                else:
                    self.tally(child, cpath)
                    self.skip_children(child, cpath)
                    self.axioms.append(
                        Axiom(DISJOINT, name, named(self.ref(resource))))
            elif curi == _DAML and clocal in ("intersectionOf", "unionOf",
                                              "complementOf"):
                expr = self.parse_expr_entry(child, cpath, f"class {name}")
                if expr is not None:
                    self._attach_definition(name, expr)
            elif curi == _RDFS and clocal in ("label", "comment") \
                    or curi == _DAML and clocal == "versionInfo":
                self.skip_tree(child, cpath)
            else:
                self.skip_tree(child, cpath)

    def _attach_definition(self, name: str, expr: ClassExpression) -> None:
        if self.definitions[name] is None:
            self.definitions[name] = expr
        else:
            self.note(f"class {name}: extra definition kept as an "
                      "equivalence axiom")
            self.axioms.append(Axiom(SAME_CLASS, name, expr))

    def _axiom_child(self, kind: str, subject: str, child, cpath: str) -> None:
        resource = child.attrib.get(_RDF_RESOURCE)
        self.tally(child, cpath)
        if resource is not None:
            self.skip_children(child, cpath)
            self.axioms.append(Axiom(kind, subject, named(self.ref(resource))))
            return
        found = False
        for g, gpath in _child_paths(child, cpath):
            expr = self.parse_expr_entry(g, gpath, f"class {subject}")
            if expr is not None:
                self.axioms.append(Axiom(kind, subject, expr))
                found = True
        if not found:
            self.note(f"class {subject}: {_prefixed(child.tag)} carried no "
                      "usable class expression")

    def _equivalence_child(self, name: str, child, cpath: str) -> None:
        resource = child.attrib.get(_RDF_RESOURCE)
        self.tally(child, cpath)
        if resource is not None:
            self.skip_children(child, cpath)
            self.axioms.append(Axiom(SAME_CLASS, name, named(self.ref(resource))))
            return
        for g, gpath in _child_paths(child, cpath):
            expr = self.parse_expr_entry(g, gpath, f"class {name}")
            if expr is not None:
                self._attach_definition(name, expr)

    def property_element(self, el, path: str, category: str) -> None:
        name = self.name_of(el)
        if name is None:
            self.skip_tree(el, path)
            self.note("anonymous property element skipped")
            return
        self.tally(el, path)
        record = self.declare_property(name, category)
        for child, cpath in _child_paths(el, path):
            curi, clocal = _split(child.tag)
            resource = child.attrib.get(_RDF_RESOURCE)
            if (curi, clocal) == (_RDFS, "domain") and resource is not None:
                self.tally(child, cpath)
                self.skip_children(child, cpath)
                domain = self.ref(resource)
                if domain not in record["domains"]:
                    record["domains"].append(domain)
            elif (curi, clocal) == (_RDFS, "range") and resource is not None:
                self._range_child(name, record, child, cpath, resource)
            else:
                self.skip_tree(child, cpath)

    def _range_child(self, name: str, record: dict, child, cpath: str,
                     resource: str) -> None:
        uri_is_xsd = resource.startswith(_XSD)
        if record["category"] == OBJECT:
            if uri_is_xsd:
                self.skip_tree(child, cpath)
                self.note(f"object property {name}: datatype range "
                          f"{_local_name(resource)} dropped")
                return
            self.tally(child, cpath)
            self.skip_children(child, cpath)
            if record["range"] is None:
                record["range"] = self.ref(resource)
            else:
                self.note(f"property {name}: extra range ignored")
        else:
            self.tally(child, cpath)
            self.skip_children(child, cpath)
            local = _local_name(resource)
            if local in DATATYPES:
                mapped = local
            else:
                mapped = "string"
                self.note(f"datatype {local} on property {name} mapped to string")
            if record["range"] is None:
                record["range"] = mapped
            else:
                self.note(f"property {name}: extra range ignored")

    def individual_element(self, el, path: str, type_name: str | None) -> None:
        name = self.name_of(el)
        if name is None:
            self.skip_tree(el, path)
            self.note("individual without a name skipped")
            return
        self.tally(el, path)
        if name not in self.ind_types:
            self.ind_order.append(name)
            self.ind_types[name] = []
        types = self.ind_types[name]
        if type_name is not None and named(type_name) not in types:
            types.append(named(type_name))
        for child, cpath in _child_paths(el, path):
            curi, clocal = _split(child.tag)
            resource = child.attrib.get(_RDF_RESOURCE)
            if (curi, clocal) == (_RDF, "type") and resource is not None:
                self.tally(child, cpath)
                self.skip_children(child, cpath)
                ref = named(self.ref(resource))
                if ref not in types:
                    types.append(ref)
            else:
                self.skip_tree(child, cpath)

    def top_level(self, el, path: str) -> None:
        uri, local = _split(el.tag)
        if (uri, local) == (_DAML, "Ontology"):
            self.tally(el, path)
            name = self.name_of(el)
            if name is not None and self.ontology_name is None:
                self.ontology_name = name
            for child, cpath in _child_paths(el, path):
                self.skip_tree(child, cpath)
        elif (uri, local) in ((_DAML, "Class"), (_RDFS, "Class")):
            name = self.name_of(el)
            if name is None:
                self.skip_tree(el, path)
                self.note("anonymous top-level class skipped")
            else:
                self.class_element(el, path, name)
        elif (uri, local) == (_DAML, "Restriction"):
            self.skip_tree(el, path)
            self.note("top-level anonymous Restriction skipped")
        elif (uri, local) == (_DAML, "ObjectProperty"):
            self.property_element(el, path, OBJECT)
        elif (uri, local) == (_DAML, "DatatypeProperty"):
            self.property_element(el, path, DATATYPE)
        elif (uri, local) in ((_DAML, "Property"), (_RDF, "Property")):
            name = self.name_of(el)
            if name is not None:
                self.note(f"untyped property {name} treated as an object property")
            self.property_element(el, path, OBJECT)
        elif uri == _DAML and local in ("TransitiveProperty", "UniqueProperty",
                                        "UnambiguousProperty"):
            self.skip_tree(el, path)
        elif (uri, local) == (_RDF, "Description"):
            if any(_split(c.tag) == (_RDF, "type") and _RDF_RESOURCE in c.attrib
                   for c in el):
                self.individual_element(el, path, None)
            else:
                self.skip_tree(el, path)
                self.note("rdf:Description without a type skipped")
        elif uri not in (_DAML, _RDF, _RDFS, _XSD) and (
                _RDF_ABOUT in el.attrib or _RDF_ID in el.attrib):
            self.individual_element(el, path, self.sanitize(local))
        else:
            self.skip_tree(el, path)

    # ---- assembly

    def _walk_expr_names(self, expr: ClassExpression, classes: list[str],
                         properties: list[str]) -> None:
        if expr.op == "named":
            if expr.name not in classes:
                classes.append(expr.name)
        for m in expr.members:
            self._walk_expr_names(m, classes, properties)
        if expr.restriction is not None:
            if expr.restriction.on_property not in properties:
                properties.append(expr.restriction.on_property)
            if expr.restriction.target is not None:
                self._walk_expr_names(expr.restriction.target, classes, properties)

    def finish(self, source_name: str | None) -> ImportReport:
        ref_classes: list[str] = []
        ref_properties: list[str] = []
        for expr in self.definitions.values():
            if expr is not None:
                self._walk_expr_names(expr, ref_classes, ref_properties)
        for ax in self.axioms:
            if ax.subject not in ref_classes:
                ref_classes.append(ax.subject)
            self._walk_expr_names(ax.target, ref_classes, ref_properties)
        for record in self.props.values():
            for d in record["domains"]:
                if d not in ref_classes:
                    ref_classes.append(d)
            if record["category"] == OBJECT and record["range"] is not None:
                if record["range"] not in ref_classes:
                    ref_classes.append(record["range"])
        for types in self.ind_types.values():
            for t in types:
                self._walk_expr_names(t, ref_classes, ref_properties)

        for name in ref_classes:
            if name not in self.definitions:
                self.declare_class(name)
                self.note(f"class {name} referenced but never declared; "
                          "declared automatically")
        for name in ref_properties:
            if name not in self.props:
                self.declare_property(name, OBJECT)
                self.note(f"property {name} referenced in a restriction but "
                          "never declared; assumed to be an object property")

        classes = tuple(
            ClassDefinition(name,
                            kind=DEFINED if self.definitions[name] is not None
                            else PRIMITIVE,
                            definition=self.definitions[name])
            for name in self.class_order)
        properties = tuple(
            PropertyDefinition(name, self.props[name]["category"],
                               domains=tuple(self.props[name]["domains"]),
                               range=self.props[name]["range"])
            for name in self.prop_order)
        individuals = tuple(
            Individual(name, types=tuple(self.ind_types[name]))
            for name in self.ind_order)

        ontology = Ontology(self.ontology_name or source_name or "imported",
                            classes=classes, properties=properties,
                            axioms=tuple(self.axioms), individuals=individuals)
        translated = tuple(sorted(self.translated.items()))
        skipped = tuple(SkippedEntry(name, count, first)
                        for name, (count, first) in sorted(self.skipped.items()))
        return ImportReport(ontology, translated, skipped, tuple(self.notes))


def import_daml(text: str, source_name: str | None = None) -> ImportReport:
    """Translate an RDF/XML document. Raises DamlImportError on malformed
    XML or structurally broken constructs; everything merely unsupported is
    skipped and reported instead."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise DamlImportError(f"malformed XML: {exc}") from exc
    if _split(root.tag) != (_RDF, "RDF"):
        raise DamlImportError("root element must be rdf:RDF")
    importer = _Importer()
    for child, path in _child_paths(root, "rdf:RDF"):
        importer.top_level(child, path)
    return importer.finish(source_name)
