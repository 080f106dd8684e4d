"""Core ontology model: validation, normalization, equivalence collapse and
inherited-feature resolution."""

import pytest
from hypothesis import given, settings

from ont2cm.ontology import (
    DEFINED,
    DIRECT_DOMAIN,
    DIRECT_RESTRICTION,
    INHERITED_DOMAIN,
    INHERITED_RESTRICTION,
    SUBCLASS,
    SAME_CLASS,
    DISJOINT,
    Axiom,
    ClassDefinition,
    Individual,
    Ontology,
    OntologyIndex,
    PropertyDefinition,
    Restriction,
    UnknownClassError,
    canonicalize,
    collapse_equivalences,
    effective_properties,
    effective_restrictions,
    hoist_axiom_restrictions,
    intersection_of,
    named,
    restriction_expr,
    union_of,
    validate_ontology,
)
from strategies import ontologies, subclass_graphs


def ont(classes=(), properties=(), axioms=(), individuals=(), name="t"):
    return Ontology(name, classes=tuple(classes), properties=tuple(properties),
                    axioms=tuple(axioms), individuals=tuple(individuals))


# --------------------------------------------------------------------------
# validation


class TestValidate:
    def test_clean_ontology_has_no_defects(self):
        o = ont(
            classes=[ClassDefinition("Protein"), ClassDefinition("DNA")],
            properties=[PropertyDefinition("binds", "object",
                                           domains=("Protein",), range="DNA")],
            axioms=[Axiom(SUBCLASS, "Protein", named("DNA"))],
            individuals=[Individual("p53", types=(named("Protein"),))],
        )
        assert validate_ontology(o) == []

    @pytest.mark.parametrize("broken,kind,subject", [
        (ont(axioms=[Axiom(SUBCLASS, "A", named("B"))],
             classes=[ClassDefinition("A")]), "danglingClass", "B"),
        (ont(classes=[ClassDefinition("A"),
                      ClassDefinition("A")]), "duplicateName", "A"),
        (ont(classes=[ClassDefinition("A", local_restrictions=(
            Restriction("p", "min", count=1),))]), "danglingProperty", "p"),
        (ont(classes=[ClassDefinition("A", kind=DEFINED)]),
         "missingDefinition", "A"),
        (ont(classes=[ClassDefinition("A", definition=named("A"))]),
         "unexpectedDefinition", "A"),
        (ont(classes=[ClassDefinition("A")],
             properties=[PropertyDefinition("p", "datatype",
                                            domains=("A",), range="float")]),
         "badDatatype", "float"),
        (ont(classes=[ClassDefinition("A")],
             properties=[PropertyDefinition("p", "object",
                                            domains=("A",), range="B")]),
         "danglingClass", "B"),
        (ont(classes=[ClassDefinition("A")],
             properties=[PropertyDefinition("p", "object")],
             axioms=[Axiom(SUBCLASS, "A", restriction_expr(
                 Restriction("p", "min", count=-1)))]), "badCardinality",
         "axiom subclass A"),
        (ont(individuals=[Individual("x")]), "missingType", "x"),
    ])
    def test_single_defect_detected(self, broken, kind, subject):
        defects = validate_ontology(broken)
        assert [(d.kind, d.subject) for d in defects] == [(kind, subject)]

    def test_disjoint_target_must_be_named(self):
        o = ont(classes=[ClassDefinition("A"), ClassDefinition("B")],
                axioms=[Axiom(DISJOINT, "A", union_of(named("A"), named("B")))])
        kinds = {d.kind for d in validate_ontology(o)}
        assert kinds == {"malformedExpression"}

    def test_validation_is_deterministic(self):
        o = ont(classes=[ClassDefinition("A", kind=DEFINED),
                         ClassDefinition("A", kind=DEFINED)])
        assert validate_ontology(o) == validate_ontology(o)

    @settings(max_examples=100, deadline=None)
    @given(ontologies())
    def test_generated_ontologies_validate_clean(self, o):
        assert validate_ontology(o) == []


# --------------------------------------------------------------------------
# normalization


class TestHoist:
    def test_restriction_axiom_moves_onto_class(self):
        r = Restriction("p", "some", target=named("B"))
        o = ont(classes=[ClassDefinition("A"), ClassDefinition("B")],
                properties=[PropertyDefinition("p", "object")],
                axioms=[Axiom(SUBCLASS, "A", restriction_expr(r)),
                        Axiom(SUBCLASS, "A", named("B"))])
        hoisted = hoist_axiom_restrictions(o)
        (a, b) = hoisted.classes
        assert a.local_restrictions == (r,)
        assert b.local_restrictions == ()
        assert hoisted.axioms == (Axiom(SUBCLASS, "A", named("B")),)

    def test_no_restriction_axioms_returns_input(self):
        o = ont(classes=[ClassDefinition("A")])
        assert hoist_axiom_restrictions(o) is o

    @settings(max_examples=100, deadline=None)
    @given(ontologies())
    def test_idempotent_and_validity_preserving(self, o):
        once = hoist_axiom_restrictions(o)
        assert hoist_axiom_restrictions(once) == once
        assert validate_ontology(once) == []


# --------------------------------------------------------------------------
# equivalence collapse, checked against a brute-force reachability oracle


def subclass_edge_map(o):
    edges = {c.name: set() for c in o.classes}
    for ax in o.axioms:
        if ax.kind == SUBCLASS and ax.target.op == "named":
            if ax.subject in edges and ax.target.name in edges:
                edges[ax.subject].add(ax.target.name)
    return edges


def reachable_from(edges, start):
    seen = set()
    stack = list(edges.get(start, ()))
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(edges.get(node, ()))
    return seen


def oracle_alias_map(o):
    """Mutual-reachability equivalence classes; alias -> least member."""
    edges = subclass_edge_map(o)
    reach = {name: reachable_from(edges, name) for name in edges}
    mapping = {}
    for a in edges:
        group = {a} | {b for b in edges
                       if b != a and b in reach[a] and a in reach[b]}
        rep = min(group)
        if a != rep:
            mapping[a] = rep
    return mapping


def all_names_in_use(o):
    names = set()
    for c in o.classes:
        names.add(c.name)
    for p in o.properties:
        names.update(p.domains)
        if p.category == "object" and p.range is not None:
            names.add(p.range)
    for ax in o.axioms:
        names.add(ax.subject)

    def visit(expr):
        if expr.op == "named":
            names.add(expr.name)
        for m in expr.members:
            visit(m)
        if expr.restriction is not None and expr.restriction.target is not None:
            visit(expr.restriction.target)

    for c in o.classes:
        if c.definition is not None:
            visit(c.definition)
        for r in c.local_restrictions:
            if r.target is not None:
                visit(r.target)
    for ax in o.axioms:
        visit(ax.target)
    for i in o.individuals:
        for t in i.types:
            visit(t)
    return names


class TestCollapse:
    def test_two_cycle_collapses_to_least_name(self):
        o = ont(classes=[ClassDefinition("B"), ClassDefinition("A")],
                axioms=[Axiom(SUBCLASS, "A", named("B")),
                        Axiom(SUBCLASS, "B", named("A"))])
        collapsed, mapping = collapse_equivalences(o)
        assert mapping == {"B": "A"}
        assert [c.name for c in collapsed.classes] == ["A"]
        assert collapsed.axioms == ()

    def test_alias_features_fold_into_representative(self):
        r = Restriction("p", "min", count=1)
        o = ont(classes=[ClassDefinition("A"),
                         ClassDefinition("B", local_restrictions=(r,))],
                properties=[PropertyDefinition("p", "object", domains=("B",),
                                               range="B")],
                axioms=[Axiom(SUBCLASS, "A", named("B")),
                        Axiom(SUBCLASS, "B", named("A"))],
                individuals=[Individual("x", types=(named("B"),))])
        collapsed, mapping = collapse_equivalences(o)
        assert mapping == {"B": "A"}
        assert collapsed.classes[0].local_restrictions == (r,)
        assert collapsed.properties[0].domains == ("A",)
        assert collapsed.properties[0].range == "A"
        assert collapsed.individuals[0].types == (named("A"),)

    def test_acyclic_input_untouched(self):
        o = ont(classes=[ClassDefinition("A"), ClassDefinition("B")],
                axioms=[Axiom(SUBCLASS, "A", named("B"))])
        collapsed, mapping = collapse_equivalences(o)
        assert collapsed is o
        assert mapping == {}

    def test_same_class_axioms_do_not_collapse(self):
        o = ont(classes=[ClassDefinition("A"), ClassDefinition("B")],
                axioms=[Axiom(SAME_CLASS, "A", named("B")),
                        Axiom(SAME_CLASS, "B", named("A"))])
        collapsed, mapping = collapse_equivalences(o)
        assert mapping == {}
        assert len(collapsed.classes) == 2

    @settings(max_examples=200, deadline=None)
    @given(subclass_graphs())
    def test_alias_map_matches_reachability_oracle(self, o):
        _, mapping = collapse_equivalences(o)
        assert mapping == oracle_alias_map(o)

    @settings(max_examples=200, deadline=None)
    @given(subclass_graphs())
    def test_collapsed_graph_is_acyclic_and_idempotent(self, o):
        collapsed, _ = collapse_equivalences(o)
        assert oracle_alias_map(collapsed) == {}
        again, extra = collapse_equivalences(collapsed)
        assert again == collapsed
        assert extra == {}

    @settings(max_examples=100, deadline=None)
    @given(ontologies())
    def test_no_alias_survives_and_validity_preserved(self, o):
        collapsed, mapping = collapse_equivalences(o)
        assert not (set(mapping) & all_names_in_use(collapsed))
        assert validate_ontology(collapsed) == []


# --------------------------------------------------------------------------
# inherited-feature resolution


def chain_fixture():
    """Macromolecule <- Protein <- Enzyme with one property and one
    restriction per level."""
    return ont(
        classes=[
            ClassDefinition("Macromolecule", local_restrictions=(
                Restriction("mass", "exactly", count=1),)),
            ClassDefinition("Protein"),
            ClassDefinition("Enzyme", local_restrictions=(
                Restriction("catalyses", "some", target=named("Reaction")),)),
            ClassDefinition("Reaction"),
        ],
        properties=[
            PropertyDefinition("mass", "datatype", domains=("Macromolecule",),
                               range="decimal"),
            PropertyDefinition("accession", "datatype", domains=("Protein",),
                               range="string"),
            PropertyDefinition("catalyses", "object", domains=("Enzyme",),
                               range="Reaction"),
        ],
        axioms=[Axiom(SUBCLASS, "Protein", named("Macromolecule")),
                Axiom(SUBCLASS, "Enzyme", named("Protein"))],
    )


class TestEffectiveFeatures:
    def test_direct_and_inherited_properties(self):
        entries = effective_properties(chain_fixture(), "Enzyme")
        assert [(p.name, origin) for p, origin in entries] == [
            ("accession", INHERITED_DOMAIN),
            ("catalyses", DIRECT_DOMAIN),
            ("catalyses", DIRECT_RESTRICTION),
            ("mass", INHERITED_DOMAIN),
            ("mass", INHERITED_RESTRICTION),
        ]

    def test_root_sees_only_direct(self):
        entries = effective_properties(chain_fixture(), "Macromolecule")
        assert [(p.name, origin) for p, origin in entries] == [
            ("mass", DIRECT_DOMAIN),
            ("mass", DIRECT_RESTRICTION),
        ]

    def test_effective_restrictions_order(self):
        entries = effective_restrictions(chain_fixture(), "Enzyme")
        assert [(r.on_property, origin) for r, origin in entries] == [
            ("catalyses", DIRECT_RESTRICTION),
            ("mass", INHERITED_RESTRICTION),
        ]

    def test_unknown_class_raises(self):
        with pytest.raises(UnknownClassError):
            effective_properties(chain_fixture(), "Nothing")
        with pytest.raises(UnknownClassError):
            effective_restrictions(chain_fixture(), "Nothing")

    def test_defined_class_conjuncts_count_as_superclasses(self):
        o = ont(
            classes=[ClassDefinition("Protein"),
                     ClassDefinition("Enzyme", kind=DEFINED,
                                     definition=intersection_of(
                                         named("Protein"),
                                         restriction_expr(Restriction(
                                             "catalyses", "some",
                                             target=named("Protein")))))],
            properties=[PropertyDefinition("accession", "datatype",
                                           domains=("Protein",), range="string"),
                        PropertyDefinition("catalyses", "object",
                                           range="Protein")],
        )
        entries = effective_properties(o, "Enzyme")
        assert [(p.name, origin) for p, origin in entries] == [
            ("accession", INHERITED_DOMAIN),
            ("catalyses", DIRECT_RESTRICTION),
        ]

    def test_union_definition_inherits_to_members(self):
        o = ont(
            classes=[ClassDefinition("DNA"), ClassDefinition("RNA"),
                     ClassDefinition("NucleicAcid", kind=DEFINED,
                                     definition=union_of(named("DNA"),
                                                         named("RNA")))],
            properties=[PropertyDefinition("sequence", "datatype",
                                           domains=("NucleicAcid",),
                                           range="string")],
        )
        entries = effective_properties(o, "DNA")
        assert [(p.name, origin) for p, origin in entries] == [
            ("sequence", INHERITED_DOMAIN),
        ]

    def test_cyclic_graph_terminates(self):
        o = ont(classes=[ClassDefinition("A"), ClassDefinition("B")],
                axioms=[Axiom(SUBCLASS, "A", named("B")),
                        Axiom(SUBCLASS, "B", named("A"))])
        index = OntologyIndex(o)
        assert index.ancestors("A") == ("B",)
        assert index.ancestors("B") == ("A",)

    @settings(max_examples=100, deadline=None)
    @given(ontologies())
    def test_matches_one_shot_helpers(self, o):
        index = OntologyIndex(o)
        for c in o.classes:
            assert index.effective_properties(c.name) == effective_properties(o, c.name)
            assert index.effective_restrictions(c.name) == effective_restrictions(o, c.name)

    @settings(max_examples=100, deadline=None)
    @given(ontologies())
    def test_direct_domains_always_present(self, o):
        index = OntologyIndex(o)
        for p in o.properties:
            for d in p.domains:
                assert (p, DIRECT_DOMAIN) in index.effective_properties(d)


# --------------------------------------------------------------------------
# canonical form


class TestCanonicalize:
    @settings(max_examples=100, deadline=None)
    @given(ontologies())
    def test_idempotent(self, o):
        once = canonicalize(o)
        assert canonicalize(once) == once

    @settings(max_examples=100, deadline=None)
    @given(ontologies())
    def test_reversal_insensitive(self, o):
        reversed_o = Ontology(o.name, classes=o.classes[::-1],
                              properties=o.properties[::-1],
                              axioms=o.axioms[::-1],
                              individuals=o.individuals[::-1])
        assert canonicalize(reversed_o) == canonicalize(o)
