"""Line-oriented ontology text format.

One statement per line; `#` starts a comment; blank lines are ignored.
Forward references are allowed, so statements may arrive in any order.

    ontology NAME
    class NAME
    defined-class NAME = EXPR
    objprop NAME [domain NAME {, NAME}] [range NAME]
    dataprop NAME [domain NAME {, NAME}] [range NAME]
    subclass NAME EXPR
    same-class NAME EXPR
    disjoint NAME NAME
    restriction CLASS PROPERTY (some EXPR | only EXPR | min INT | max INT | exactly INT)
    individual NAME type EXPR {, EXPR}

    EXPR = NAME | and(EXPR, EXPR, ...) | or(EXPR, EXPR, ...) | not(EXPR)
         | restriction(PROPERTY, some|only, EXPR)
         | restriction(PROPERTY, min|max|exactly, INT)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .ontology import (
    CARDINALITY_FLAVORS,
    CLASS_FLAVORS,
    DATATYPE,
    DEFINED,
    OBJECT,
    SUBCLASS,
    SAME_CLASS,
    DISJOINT,
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

_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*|\d+|[(),=]|\S")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")
_INT_RE = re.compile(r"\d+\Z")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class _Token:
    text: str
    line: int
    column: int


_EOL = "end of line"


class _Cursor:
    """Token stream for a single statement line."""

    def __init__(self, line_no: int, text: str):
        self.line = line_no
        self.tokens = [_Token(m.group(), line_no, m.start() + 1)
                       for m in _TOKEN_RE.finditer(text)]
        self.pos = 0
        self.width = len(text)

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(self.line, self.width + 1,
                             f"expected {expected}, got {_EOL}")
        self.pos += 1
        return tok

    def name(self, what: str = "a name") -> str:
        tok = self.next(what)
        if not _NAME_RE.match(tok.text):
            raise ParseError(tok.line, tok.column,
                             f"expected {what}, got {tok.text!r}")
        return tok.text

    def integer(self) -> int:
        tok = self.next("an integer")
        if not _INT_RE.match(tok.text):
            raise ParseError(tok.line, tok.column,
                             f"expected an integer, got {tok.text!r}")
        return int(tok.text)

    def literal(self, text: str) -> None:
        tok = self.next(repr(text))
        if tok.text != text:
            raise ParseError(tok.line, tok.column,
                             f"expected {text!r}, got {tok.text!r}")

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def done(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise ParseError(tok.line, tok.column,
                             f"unexpected {tok.text!r} after statement")


def _parse_expr(cur: _Cursor) -> ClassExpression:
    tok = cur.next("a class expression")
    if not _NAME_RE.match(tok.text):
        raise ParseError(tok.line, tok.column,
                         f"expected a class expression, got {tok.text!r}")
    head = tok.text
    if head in ("and", "or") and cur.at("("):
        cur.literal("(")
        members = [_parse_expr(cur)]
        while cur.at(","):
            cur.literal(",")
            members.append(_parse_expr(cur))
        cur.literal(")")
        if len(members) < 2:
            raise ParseError(tok.line, tok.column,
                             f"{head}() needs at least 2 members")
        return ClassExpression(head, members=tuple(members))
    if head == "not" and cur.at("("):
        cur.literal("(")
        member = _parse_expr(cur)
        cur.literal(")")
        return ClassExpression("not", members=(member,))
    if head == "restriction" and cur.at("("):
        cur.literal("(")
        prop = cur.name("a property name")
        cur.literal(",")
        flavor_tok = cur.next("a restriction flavor")
        flavor = flavor_tok.text
        cur.literal(",")
        if flavor in CLASS_FLAVORS:
            r = Restriction(prop, flavor, target=_parse_expr(cur))
        elif flavor in CARDINALITY_FLAVORS:
            r = Restriction(prop, flavor, count=cur.integer())
        else:
            raise ParseError(flavor_tok.line, flavor_tok.column,
                             f"unknown restriction flavor {flavor!r}")
        cur.literal(")")
        return restriction_expr(r)
    return named(head)


def _parse_property(cur: _Cursor, category: str) -> PropertyDefinition:
    name = cur.name("a property name")
    domains: list[str] = []
    rng: str | None = None
    if cur.at("domain"):
        cur.literal("domain")
        domains.append(cur.name("a domain class"))
        while cur.at(","):
            cur.literal(",")
            domains.append(cur.name("a domain class"))
    if cur.at("range"):
        cur.literal("range")
        rng = cur.name("a range name")
    cur.done()
    return PropertyDefinition(name, category, domains=tuple(domains), range=rng)


def parse(text: str) -> Ontology:
    """Parse a document into an Ontology. Raises ParseError with the line
    and column of the first offending token. No validation beyond syntax:
    dangling references survive parsing and are reported by
    validate_ontology."""
    ontology_name: str | None = None
    classes: list[ClassDefinition] = []
    class_index: dict[str, int] = {}
    pending_restrictions: dict[str, list[Restriction]] = {}
    properties: list[PropertyDefinition] = []
    axioms: list[Axiom] = []
    individuals: list[Individual] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        cur = _Cursor(line_no, line)
        keyword_tok = cur.next("a statement keyword")
        keyword = keyword_tok.text
        if ontology_name is None and keyword != "ontology":
            raise ParseError(keyword_tok.line, keyword_tok.column,
                             "missing ontology header before first statement")

        if keyword == "ontology":
            if ontology_name is not None:
                raise ParseError(keyword_tok.line, keyword_tok.column,
                                 "duplicate ontology header")
            ontology_name = cur.name("an ontology name")
            cur.done()
        elif keyword == "class":
            name = cur.name("a class name")
            cur.done()
            class_index[name] = len(classes)
            classes.append(ClassDefinition(name))
        elif keyword == "defined-class":
            name = cur.name("a class name")
            cur.literal("=")
            expr = _parse_expr(cur)
            cur.done()
            class_index[name] = len(classes)
            classes.append(ClassDefinition(name, kind=DEFINED, definition=expr))
        elif keyword == "objprop":
            properties.append(_parse_property(cur, OBJECT))
        elif keyword == "dataprop":
            properties.append(_parse_property(cur, DATATYPE))
        elif keyword in (SUBCLASS, SAME_CLASS):
            subject = cur.name("a class name")
            expr = _parse_expr(cur)
            cur.done()
            axioms.append(Axiom(keyword, subject, expr))
        elif keyword == DISJOINT:
            first = cur.name("a class name")
            second = cur.name("a class name")
            cur.done()
            axioms.append(Axiom(DISJOINT, first, named(second)))
        elif keyword == "restriction":
            cls = cur.name("a class name")
            prop = cur.name("a property name")
            flavor_tok = cur.next("a restriction flavor")
            flavor = flavor_tok.text
            if flavor in CLASS_FLAVORS:
                r = Restriction(prop, flavor, target=_parse_expr(cur))
            elif flavor in CARDINALITY_FLAVORS:
                r = Restriction(prop, flavor, count=cur.integer())
            else:
                raise ParseError(flavor_tok.line, flavor_tok.column,
                                 f"unknown restriction flavor {flavor!r}")
            cur.done()
            pending_restrictions.setdefault(cls, []).append(r)
        elif keyword == "individual":
            name = cur.name("an individual name")
            cur.literal("type")
            types = [_parse_expr(cur)]
            while cur.at(","):
                cur.literal(",")
                types.append(_parse_expr(cur))
            cur.done()
            individuals.append(Individual(name, types=tuple(types)))
        else:
            raise ParseError(keyword_tok.line, keyword_tok.column,
                             f"unknown statement keyword {keyword!r}")

    if ontology_name is None:
        raise ParseError(1, 1, "missing ontology header")

    for cls_name, restrictions in pending_restrictions.items():
        idx = class_index.get(cls_name)
        if idx is None:
            # restriction on an undeclared class: keep it as an axiom so the
            # dangling reference is still visible to validation
            for r in restrictions:
                axioms.append(Axiom(SUBCLASS, cls_name, restriction_expr(r)))
        else:
            cls = classes[idx]
            classes[idx] = replace(
                cls, local_restrictions=cls.local_restrictions + tuple(restrictions))

    return Ontology(ontology_name, classes=tuple(classes),
                    properties=tuple(properties), axioms=tuple(axioms),
                    individuals=tuple(individuals))


# --------------------------------------------------------------------------
# serialization


def format_expr(expr: ClassExpression) -> str:
    if expr.op == "named":
        return expr.name
    if expr.op in ("and", "or"):
        inner = ", ".join(format_expr(m) for m in expr.members)
        return f"{expr.op}({inner})"
    if expr.op == "not":
        return f"not({format_expr(expr.members[0])})"
    r = expr.restriction
    if r.flavor in CLASS_FLAVORS:
        return f"restriction({r.on_property}, {r.flavor}, {format_expr(r.target)})"
    return f"restriction({r.on_property}, {r.flavor}, {r.count})"


def _format_restriction_stmt(cls: str, r: Restriction) -> str:
    if r.flavor in CLASS_FLAVORS:
        return f"restriction {cls} {r.on_property} {r.flavor} {format_expr(r.target)}"
    return f"restriction {cls} {r.on_property} {r.flavor} {r.count}"


def serialize(ont: Ontology) -> str:
    """Render an ontology back to text. Statement order follows the stored
    order, so parse(serialize(o)) == o for any well-formed ontology."""
    lines = [f"ontology {ont.name}"]
    for cls in ont.classes:
        if cls.kind == DEFINED and cls.definition is not None:
            lines.append(f"defined-class {cls.name} = {format_expr(cls.definition)}")
        else:
            lines.append(f"class {cls.name}")
        for r in cls.local_restrictions:
            lines.append(_format_restriction_stmt(cls.name, r))
    for prop in ont.properties:
        keyword = "objprop" if prop.category == OBJECT else "dataprop"
        parts = [keyword, prop.name]
        if prop.domains:
            parts.append("domain " + ", ".join(prop.domains))
        if prop.range is not None:
            parts.append(f"range {prop.range}")
        lines.append(" ".join(parts))
    for ax in ont.axioms:
        if ax.kind == DISJOINT:
            lines.append(f"disjoint {ax.subject} {ax.target.name}")
        else:
            lines.append(f"{ax.kind} {ax.subject} {format_expr(ax.target)}")
    for ind in ont.individuals:
        types = ", ".join(format_expr(t) for t in ind.types)
        lines.append(f"individual {ind.name} type {types}")
    return "\n".join(lines) + "\n"
