"""In-memory ontology model: classes, properties, restrictions, axioms, individuals.

Everything here is assertion-only. Subsumption and equivalence are taken as
written in the source document; no description-logic inference is performed.
All values are frozen dataclasses, so they are safe to share across threads
and usable as dict keys.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

# Datatype names accepted for datatype-property ranges.
DATATYPES = ("string", "integer", "decimal", "boolean", "date")

# Class definition kinds.
PRIMITIVE = "primitive"
DEFINED = "defined"

# Property categories.
OBJECT = "object"
DATATYPE = "datatype"

# Restriction flavors. "some" is the existential (hasClass-style) constraint,
# "only" the universal (toClass-style) one.
SOME = "some"
ONLY = "only"
EXACTLY = "exactly"
MIN = "min"
MAX = "max"
CLASS_FLAVORS = (SOME, ONLY)
CARDINALITY_FLAVORS = (EXACTLY, MIN, MAX)

# Axiom kinds.
SUBCLASS = "subclass"
SAME_CLASS = "same-class"
DISJOINT = "disjoint"

# Origin tags for effective_properties / effective_restrictions.
DIRECT_DOMAIN = "direct-domain"
INHERITED_DOMAIN = "inherited-domain"
DIRECT_RESTRICTION = "direct-restriction"
INHERITED_RESTRICTION = "inherited-restriction"
_ORIGIN_RANK = {
    DIRECT_DOMAIN: 0,
    INHERITED_DOMAIN: 1,
    DIRECT_RESTRICTION: 2,
    INHERITED_RESTRICTION: 3,
}


class UnknownClassError(ValueError):
    """Raised when an operation is asked about an undeclared class."""


@dataclass(frozen=True)
class Restriction:
    """A property constraint: some/only carry a target expression, the
    cardinality flavors carry a non-negative count."""

    on_property: str
    flavor: str
    target: "ClassExpression | None" = None
    count: int | None = None


@dataclass(frozen=True)
class ClassExpression:
    """Recursive class term.

    op is one of "named", "and", "or", "not", "restriction". Named terms use
    `name`, boolean terms use `members` (>= 2 for and/or, exactly 1 for not)
    and restriction terms wrap a Restriction.
    """

    op: str
    name: str | None = None
    members: tuple["ClassExpression", ...] = ()
    restriction: Restriction | None = None


def named(name: str) -> ClassExpression:
    return ClassExpression("named", name=name)


def intersection_of(*members: ClassExpression) -> ClassExpression:
    return ClassExpression("and", members=tuple(members))


def union_of(*members: ClassExpression) -> ClassExpression:
    return ClassExpression("or", members=tuple(members))


def complement_of(member: ClassExpression) -> ClassExpression:
    return ClassExpression("not", members=(member,))


def restriction_expr(r: Restriction) -> ClassExpression:
    return ClassExpression("restriction", restriction=r)


@dataclass(frozen=True)
class ClassDefinition:
    name: str
    kind: str = PRIMITIVE
    definition: ClassExpression | None = None
    local_restrictions: tuple[Restriction, ...] = ()


@dataclass(frozen=True)
class PropertyDefinition:
    name: str
    category: str
    domains: tuple[str, ...] = ()
    range: str | None = None


@dataclass(frozen=True)
class Axiom:
    """subclass/same-class pair a subject class with a target expression;
    disjoint requires the target to be a named expression."""

    kind: str
    subject: str
    target: ClassExpression


@dataclass(frozen=True)
class Individual:
    name: str
    types: tuple[ClassExpression, ...] = ()


@dataclass(frozen=True)
class Ontology:
    name: str
    classes: tuple[ClassDefinition, ...] = ()
    properties: tuple[PropertyDefinition, ...] = ()
    axioms: tuple[Axiom, ...] = ()
    individuals: tuple[Individual, ...] = ()


@dataclass(frozen=True)
class OntologyDefect:
    kind: str
    subject: str
    message: str


# --------------------------------------------------------------------------
# expression utilities


def expr_key(expr: ClassExpression) -> tuple:
    """Structural sort key; total order over expressions."""
    if expr.op == "named":
        return ("named", expr.name)
    if expr.op == "restriction":
        return ("restriction", restriction_key(expr.restriction))
    return (expr.op, tuple(expr_key(m) for m in expr.members))


def restriction_key(r: Restriction) -> tuple:
    target = expr_key(r.target) if r.target is not None else ()
    count = r.count if r.count is not None else -1
    return (r.on_property, r.flavor, target, count)


def rename_expression(expr: ClassExpression, mapping: dict[str, str]) -> ClassExpression:
    if expr.op == "named":
        new = mapping.get(expr.name, expr.name)
        return expr if new == expr.name else named(new)
    if expr.op == "restriction":
        renamed = rename_restriction(expr.restriction, mapping)
        return expr if renamed is expr.restriction else restriction_expr(renamed)
    members = tuple(rename_expression(m, mapping) for m in expr.members)
    if members == expr.members:
        return expr
    return ClassExpression(expr.op, members=members)


def rename_restriction(r: Restriction, mapping: dict[str, str]) -> Restriction:
    if r.target is None:
        return r
    target = rename_expression(r.target, mapping)
    return r if target is r.target else replace(r, target=target)


def named_conjuncts(expr: ClassExpression) -> list[str]:
    """Named classes at the top level of an expression, flattening nested
    intersections. For a bare named term this is the name itself."""
    if expr.op == "named":
        return [expr.name]
    if expr.op == "and":
        out: list[str] = []
        for m in expr.members:
            out.extend(named_conjuncts(m))
        return out
    return []


def conjunct_restrictions(expr: ClassExpression) -> list[Restriction]:
    """Restrictions at the top level of an expression (again flattening
    nested intersections)."""
    if expr.op == "restriction":
        return [expr.restriction]
    if expr.op == "and":
        out: list[Restriction] = []
        for m in expr.members:
            out.extend(conjunct_restrictions(m))
        return out
    return []


def walk_expressions(ont: Ontology):
    """Yield (site, expression) pairs for every expression in the ontology.

    The site is a human-readable anchor ("class Enzyme definition",
    "restriction Protein.binds", ...) used by diagnostics.
    """
    for cls in ont.classes:
        if cls.definition is not None:
            yield f"class {cls.name} definition", cls.definition
        for r in cls.local_restrictions:
            if r.target is not None:
                yield f"restriction {cls.name}.{r.on_property}", r.target
    for ax in ont.axioms:
        yield f"axiom {ax.kind} {ax.subject}", ax.target
    for ind in ont.individuals:
        for expr in ind.types:
            yield f"individual {ind.name}", expr


def _subexpressions(expr: ClassExpression):
    yield expr
    for m in expr.members:
        yield from _subexpressions(m)
    if expr.restriction is not None and expr.restriction.target is not None:
        yield from _subexpressions(expr.restriction.target)


def iter_subexpressions(ont: Ontology):
    """Yield (site, sub-expression) for every node of every expression tree."""
    for site, expr in walk_expressions(ont):
        for sub in _subexpressions(expr):
            yield site, sub


# --------------------------------------------------------------------------
# validation


def validate_ontology(ont: Ontology) -> list[OntologyDefect]:
    """Collect every dangling reference, duplicate name and malformed
    expression. An empty result means the ontology is well-formed. Pure:
    the input is never mutated."""
    defects: list[OntologyDefect] = []
    class_names = {c.name for c in ont.classes}
    property_names = {p.name for p in ont.properties}
    properties = {p.name: p for p in ont.properties}

    def check_expr(expr: ClassExpression, where: str) -> None:
        if expr.op == "named":
            if expr.name not in class_names:
                defects.append(OntologyDefect(
                    "danglingClass", expr.name,
                    f"{where} references undeclared class {expr.name!r}"))
        elif expr.op in ("and", "or"):
            if len(expr.members) < 2:
                defects.append(OntologyDefect(
                    "malformedExpression", where,
                    f"{expr.op}-expression needs at least 2 members"))
            for m in expr.members:
                check_expr(m, where)
        elif expr.op == "not":
            if len(expr.members) != 1:
                defects.append(OntologyDefect(
                    "malformedExpression", where,
                    "complement needs exactly 1 member"))
            for m in expr.members:
                check_expr(m, where)
        elif expr.op == "restriction":
            if expr.restriction is None:
                defects.append(OntologyDefect(
                    "malformedExpression", where,
                    "restriction expression without a restriction"))
            else:
                check_restriction(expr.restriction, where)
        else:
            defects.append(OntologyDefect(
                "malformedExpression", where, f"unknown operator {expr.op!r}"))

    def check_restriction(r: Restriction, where: str) -> None:
        if r.on_property not in property_names:
            defects.append(OntologyDefect(
                "danglingProperty", r.on_property,
                f"{where} restricts undeclared property {r.on_property!r}"))
        if r.flavor in CLASS_FLAVORS:
            if r.target is None:
                defects.append(OntologyDefect(
                    "malformedExpression", where,
                    f"{r.flavor}-restriction needs a target expression"))
            else:
                check_expr(r.target, where)
        elif r.flavor in CARDINALITY_FLAVORS:
            if r.count is None or r.count < 0:
                defects.append(OntologyDefect(
                    "badCardinality", where,
                    f"{r.flavor}-restriction needs a count >= 0"))
        else:
            defects.append(OntologyDefect(
                "malformedExpression", where,
                f"unknown restriction flavor {r.flavor!r}"))

    def check_duplicates(names, what) -> None:
        seen: set[str] = set()
        reported: set[str] = set()
        for name in names:
            if name in seen and name not in reported:
                defects.append(OntologyDefect(
                    "duplicateName", name, f"{what} {name!r} declared more than once"))
                reported.add(name)
            seen.add(name)

    check_duplicates([c.name for c in ont.classes], "class")
    check_duplicates([p.name for p in ont.properties], "property")
    check_duplicates([i.name for i in ont.individuals], "individual")

    for cls in ont.classes:
        where = f"class {cls.name}"
        if cls.kind == DEFINED and cls.definition is None:
            defects.append(OntologyDefect(
                "missingDefinition", cls.name, f"defined {where} has no definition"))
        if cls.kind == PRIMITIVE and cls.definition is not None:
            defects.append(OntologyDefect(
                "unexpectedDefinition", cls.name, f"primitive {where} carries a definition"))
        if cls.definition is not None:
            check_expr(cls.definition, f"{where} definition")
        for r in cls.local_restrictions:
            check_restriction(r, f"restriction on {where}")

    for prop in ont.properties:
        where = f"property {prop.name}"
        for d in prop.domains:
            if d not in class_names:
                defects.append(OntologyDefect(
                    "danglingClass", d, f"{where} has undeclared domain class {d!r}"))
        if prop.range is not None:
            if prop.category == OBJECT and prop.range not in class_names:
                defects.append(OntologyDefect(
                    "danglingClass", prop.range,
                    f"{where} has undeclared range class {prop.range!r}"))
            if prop.category == DATATYPE and prop.range not in DATATYPES:
                defects.append(OntologyDefect(
                    "badDatatype", prop.range,
                    f"{where} has unsupported datatype {prop.range!r}"))

    for ax in ont.axioms:
        where = f"axiom {ax.kind} {ax.subject}"
        if ax.subject not in class_names:
            defects.append(OntologyDefect(
                "danglingClass", ax.subject, f"{where} has undeclared subject"))
        if ax.kind == DISJOINT and ax.target.op != "named":
            defects.append(OntologyDefect(
                "malformedExpression", where, "disjoint target must be a named class"))
        check_expr(ax.target, where)

    for ind in ont.individuals:
        where = f"individual {ind.name}"
        if not ind.types:
            defects.append(OntologyDefect(
                "missingType", ind.name, f"{where} has no type expression"))
        for t in ind.types:
            check_expr(t, where)

    return defects


# --------------------------------------------------------------------------
# normalization and equivalence collapse


def hoist_axiom_restrictions(ont: Ontology) -> Ontology:
    """Move subclass axioms whose target is a bare restriction into the
    subject class's local restrictions. DAML-style documents commonly encode
    local constraints this way; attaching them keeps constraint handling in
    one place."""
    moved: dict[str, list[Restriction]] = {}
    kept: list[Axiom] = []
    for ax in ont.axioms:
        if ax.kind == SUBCLASS and ax.target.op == "restriction":
            moved.setdefault(ax.subject, []).append(ax.target.restriction)
        else:
            kept.append(ax)
    if not moved:
        return ont
    classes = tuple(
        replace(c, local_restrictions=c.local_restrictions + tuple(moved.get(c.name, ())))
        for c in ont.classes)
    return replace(ont, classes=classes, axioms=tuple(kept))


def _subclass_edges(ont: Ontology) -> dict[str, list[str]]:
    """Directed edges sub -> super from subclass axioms with named targets."""
    edges: dict[str, list[str]] = {c.name: [] for c in ont.classes}
    for ax in ont.axioms:
        if ax.kind == SUBCLASS and ax.target.op == "named":
            if ax.subject in edges and ax.target.name in edges:
                edges[ax.subject].append(ax.target.name)
    return edges


def _strongly_connected(edges: dict[str, list[str]]) -> list[list[str]]:
    """Iterative Tarjan; returns components in a deterministic order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in edges:
        if root in index:
            continue
        work = [(root, iter(edges[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter
                    counter += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(edges[succ])))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                components.append(sorted(comp))
    return components


def collapse_equivalences(ont: Ontology) -> tuple[Ontology, dict[str, str]]:
    """Collapse subclass cycles over named classes into a single
    representative per cycle (the lexicographically least name).

    Returns the rewritten ontology and an alias map {alias: representative}.
    same-class axioms with named targets are deliberately preserved; they
    feed the generalization mapping, not the collapse. When there is nothing
    to collapse the input is returned unchanged with an empty map.
    """
    components = _strongly_connected(_subclass_edges(ont))
    mapping: dict[str, str] = {}
    for comp in components:
        if len(comp) < 2:
            continue
        rep = comp[0]
        for alias in comp[1:]:
            mapping[alias] = rep
    if not mapping:
        return ont, {}

    class_by_name = {c.name: c for c in ont.classes}
    classes: list[ClassDefinition] = []
    extra_axioms: list[Axiom] = []
    for cls in ont.classes:
        if cls.name in mapping:
            continue
        restrictions = [rename_restriction(r, mapping) for r in cls.local_restrictions]
        # Fold aliased classes' restrictions and definitions into the
        # representative so nothing asserted is lost.
        aliases = sorted(a for a, rep in mapping.items() if rep == cls.name)
        for alias in aliases:
            aliased = class_by_name[alias]
            for r in aliased.local_restrictions:
                renamed = rename_restriction(r, mapping)
                if renamed not in restrictions:
                    restrictions.append(renamed)
            if aliased.definition is not None:
                target = rename_expression(aliased.definition, mapping)
                if not (target.op == "named" and target.name == cls.name):
                    extra_axioms.append(Axiom(SAME_CLASS, cls.name, target))
        definition = (rename_expression(cls.definition, mapping)
                      if cls.definition is not None else None)
        classes.append(replace(cls, definition=definition,
                               local_restrictions=tuple(restrictions)))

    axioms: list[Axiom] = []
    for ax in list(ont.axioms) + extra_axioms:
        subject = mapping.get(ax.subject, ax.subject)
        target = rename_expression(ax.target, mapping)
        if target.op == "named" and target.name == subject:
            continue  # cycle edges vanish into the representative
        renamed = Axiom(ax.kind, subject, target)
        if renamed not in axioms:
            axioms.append(renamed)

    properties = []
    for p in ont.properties:
        domains: list[str] = []
        for d in p.domains:
            d = mapping.get(d, d)
            if d not in domains:
                domains.append(d)
        rng = p.range
        if p.category == OBJECT and rng is not None:
            rng = mapping.get(rng, rng)
        properties.append(replace(p, domains=tuple(domains), range=rng))

    individuals = tuple(
        replace(i, types=tuple(rename_expression(t, mapping) for t in i.types))
        for i in ont.individuals)

    collapsed = replace(ont, classes=tuple(classes), properties=tuple(properties),
                        axioms=tuple(axioms), individuals=individuals)
    return collapsed, mapping


# --------------------------------------------------------------------------
# inherited-feature resolution


class OntologyIndex:
    """Precomputed lookup tables over a validated ontology.

    The superclass graph used for inheritance matches the edges the
    transformation turns into generalizations: subclass axioms, same-class
    axioms, defined-class conjuncts, and union-definition membership.
    """

    def __init__(self, ont: Ontology):
        self.ontology = ont
        self.classes = {c.name: c for c in ont.classes}
        self.properties = {p.name: p for p in ont.properties}
        self.domain_of: dict[str, list[PropertyDefinition]] = {c.name: [] for c in ont.classes}
        for p in ont.properties:
            for d in p.domains:
                if d in self.domain_of:
                    self.domain_of[d].append(p)
        self._direct_restrictions: dict[str, list[Restriction]] = {}
        self._super_edges: dict[str, list[str]] = {c.name: [] for c in ont.classes}
        self._ancestors: dict[str, tuple[str, ...]] = {}
        self._build_edges()

    def _add_edge(self, sub: str, sup: str) -> None:
        if sub in self._super_edges and sup in self.classes and sup != sub:
            if sup not in self._super_edges[sub]:
                self._super_edges[sub].append(sup)

    def _build_edges(self) -> None:
        for cls in self.ontology.classes:
            if cls.definition is None:
                continue
            for sup in named_conjuncts(cls.definition):
                self._add_edge(cls.name, sup)
            if cls.definition.op == "or":
                for m in cls.definition.members:
                    if m.op == "named":
                        self._add_edge(m.name, cls.name)
        for ax in self.ontology.axioms:
            if ax.kind in (SUBCLASS, SAME_CLASS):
                for sup in named_conjuncts(ax.target):
                    self._add_edge(ax.subject, sup)

    def super_edges(self, cls: str) -> list[str]:
        return self._super_edges.get(cls, [])

    def ancestors(self, cls: str) -> tuple[str, ...]:
        """Transitive superclasses in deterministic (BFS) order, excluding
        the class itself. Cycle-safe."""
        cached = self._ancestors.get(cls)
        if cached is not None:
            return cached
        seen: list[str] = []
        queue = list(self._super_edges.get(cls, []))
        visited = {cls}
        while queue:
            nxt = queue.pop(0)
            if nxt in visited:
                continue
            visited.add(nxt)
            seen.append(nxt)
            queue.extend(self._super_edges.get(nxt, []))
        result = tuple(seen)
        self._ancestors[cls] = result
        return result

    def direct_restrictions(self, cls: str) -> list[Restriction]:
        """Restrictions asserted on the class itself: local ones, plus
        restriction conjuncts of its subclass/same-class axiom targets and of
        its definition."""
        cached = self._direct_restrictions.get(cls)
        if cached is not None:
            return cached
        definition = self.classes[cls]
        out = list(definition.local_restrictions)
        if definition.definition is not None:
            out.extend(conjunct_restrictions(definition.definition))
        for ax in self.ontology.axioms:
            if ax.subject == cls and ax.kind in (SUBCLASS, SAME_CLASS):
                out.extend(conjunct_restrictions(ax.target))
        self._direct_restrictions[cls] = out
        return out

    def effective_properties(self, cls: str) -> list[tuple[PropertyDefinition, str]]:
        if cls not in self.classes:
            raise UnknownClassError(cls)
        entries: list[tuple[PropertyDefinition, str]] = []
        seen: set[tuple[str, str]] = set()

        def add(prop: PropertyDefinition, origin: str) -> None:
            key = (prop.name, origin)
            if key not in seen:
                seen.add(key)
                entries.append((prop, origin))

        for p in self.domain_of.get(cls, []):
            add(p, DIRECT_DOMAIN)
        for r in self.direct_restrictions(cls):
            p = self.properties.get(r.on_property)
            if p is not None:
                add(p, DIRECT_RESTRICTION)
        for sup in self.ancestors(cls):
            for p in self.domain_of.get(sup, []):
                add(p, INHERITED_DOMAIN)
            for r in self.direct_restrictions(sup):
                p = self.properties.get(r.on_property)
                if p is not None:
                    add(p, INHERITED_RESTRICTION)
        entries.sort(key=lambda e: (e[0].name, _ORIGIN_RANK[e[1]]))
        return entries

    def effective_restrictions(self, cls: str) -> list[tuple[Restriction, str]]:
        if cls not in self.classes:
            raise UnknownClassError(cls)
        entries: list[tuple[Restriction, str]] = []
        for r in self.direct_restrictions(cls):
            entries.append((r, DIRECT_RESTRICTION))
        for sup in self.ancestors(cls):
            for r in self.direct_restrictions(sup):
                entries.append((r, INHERITED_RESTRICTION))
        entries.sort(key=lambda e: (e[0].on_property, _ORIGIN_RANK[e[1]]))
        return entries


def effective_properties(ont: Ontology, cls: str) -> list[tuple[PropertyDefinition, str]]:
    """Every property applying to `cls` directly or through a superclass,
    tagged with its origin; ordered by (property name, origin rank)."""
    return OntologyIndex(ont).effective_properties(cls)


def effective_restrictions(ont: Ontology, cls: str) -> list[tuple[Restriction, str]]:
    """Every restriction constraining `cls`, with direct entries ahead of
    inherited ones so callers can prefer local constraints."""
    return OntologyIndex(ont).effective_restrictions(cls)


# --------------------------------------------------------------------------
# canonical form (for order-insensitive comparison)


def canonicalize(ont: Ontology) -> Ontology:
    """Sort every statement-level collection. Two ontologies that differ only
    in statement order canonicalize to equal values."""
    classes = tuple(sorted(
        (replace(c, local_restrictions=tuple(sorted(c.local_restrictions,
                                                    key=restriction_key)))
         for c in ont.classes),
        key=lambda c: c.name))
    properties = tuple(sorted(ont.properties, key=lambda p: p.name))
    axioms = tuple(sorted(ont.axioms, key=lambda a: (a.kind, a.subject, expr_key(a.target))))
    individuals = tuple(sorted(ont.individuals, key=lambda i: i.name))
    return replace(ont, classes=classes, properties=properties,
                   axioms=axioms, individuals=individuals)
