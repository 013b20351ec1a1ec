"""Weighted digraphs, their morphisms, joins, and text/JSON formats.

A weighted digraph is a finite loop-free directed graph together with a
nonzero weight on every vertex.  Vertices are opaque string ids; weights
are exact rationals that must have denominator 1 when computing over the
integers.  All objects here are immutable after construction and safe to
share; validation is pure and returns a list of violations rather than
raising, so callers can report every problem at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonDisjointVertexSets, ParseError, ValidationError
from .rings import Ring, format_scalar, parse_scalar


@dataclass(frozen=True)
class Violation:
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.message} ({self.subject})"


@dataclass(frozen=True)
class WeightedDigraph:
    """The pair (G, w): declared vertex order, directed edges, vertex weights."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    weights: dict[str, Fraction] = field(compare=False)

    def __init__(self, vertices, edges, weights):
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "edges", frozenset((str(u), str(v)) for u, v in edges))
        object.__setattr__(
            self, "weights", {str(k): Fraction(v) for k, v in dict(weights).items()}
        )

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edges == other.edges
            and self.weights == other.weights
        )

    @property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    def weight(self, v: str) -> Fraction:
        return self.weights[v]

    def successors(self, v: str) -> list[str]:
        return sorted(dst for src, dst in self.edges if src == v)

    def is_subgraph_of(self, other: "WeightedDigraph") -> bool:
        return self.vertex_set <= other.vertex_set and self.edges <= other.edges

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": sorted([u, v] for u, v in self.edges),
            "weights": {v: format_scalar(self.weights[v]) for v in self.vertices},
        }

    def to_text(self) -> str:
        lines = [f"v {v} {format_scalar(self.weights[v])}" for v in self.vertices]
        lines.extend(f"e {u} {v}" for u, v in sorted(self.edges))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DigraphMorphism:
    """A vertex map that sends every edge to an edge or collapses it,
    and preserves weights."""

    source: WeightedDigraph
    target: WeightedDigraph
    vertex_map: dict[str, str] = field(compare=False)

    def __init__(self, source, target, vertex_map):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "vertex_map", dict(vertex_map))

    def __eq__(self, other):
        if not isinstance(other, DigraphMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
        )

    def __call__(self, v: str) -> str:
        return self.vertex_map[v]

    def compose(self, then: "DigraphMorphism") -> "DigraphMorphism":
        """The composite (then . self): first apply self, then ``then``."""
        if self.target is not then.source and self.target != then.source:
            raise ValueError("morphisms are not composable")
        return DigraphMorphism(
            self.source, then.target, {v: then.vertex_map[w] for v, w in self.vertex_map.items()}
        )

    @classmethod
    def identity(cls, g: WeightedDigraph) -> "DigraphMorphism":
        return cls(g, g, {v: v for v in g.vertices})

    @classmethod
    def inclusion(cls, small: WeightedDigraph, big: WeightedDigraph) -> "DigraphMorphism":
        return cls(small, big, {v: v for v in small.vertices})

    def to_json(self) -> dict:
        return {"map": {v: self.vertex_map[v] for v in self.source.vertices}}


def validate_digraph(g: WeightedDigraph, ring: Ring) -> list[Violation]:
    """All invariant violations of (G, w) under the given ring; empty means ok."""
    out = []
    seen = set()
    for v in g.vertices:
        if not v or any(ch.isspace() for ch in v):
            out.append(Violation(repr(v), "vertex id must be nonempty without whitespace"))
        if v in seen:
            out.append(Violation(v, "duplicate vertex id"))
        seen.add(v)
    declared = set(g.vertices)
    for v in g.vertices:
        w = g.weights.get(v)
        if w is None:
            out.append(Violation(v, "missing weight"))
        elif w == 0:
            out.append(Violation(v, f"zero weight at {v}"))
        elif ring is Ring.INTEGERS and w.denominator != 1:
            out.append(Violation(v, f"weight {format_scalar(w)} is not an integer"))
    for extra in sorted(set(g.weights) - declared):
        out.append(Violation(extra, "weight for undeclared vertex"))
    for u, v in sorted(g.edges):
        if u == v:
            out.append(Violation(f"({u},{v})", f"loop at {u}"))
        if u not in declared:
            out.append(Violation(f"({u},{v})", f"edge source {u} is not a declared vertex"))
        if v not in declared:
            out.append(Violation(f"({u},{v})", f"edge target {v} is not a declared vertex"))
    return out


def require_valid(g: WeightedDigraph, ring: Ring) -> None:
    violations = validate_digraph(g, ring)
    if violations:
        raise ValidationError(violations)


def validate_morphism(f: DigraphMorphism) -> list[Violation]:
    """Violations of the morphism conditions; assumes both digraphs are valid."""
    out = []
    src, tgt = f.source, f.target
    tgt_vertices = tgt.vertex_set
    for v in src.vertices:
        image = f.vertex_map.get(v)
        if image is None:
            out.append(Violation(v, "vertex has no image"))
        elif image not in tgt_vertices:
            out.append(Violation(v, f"image {image} is not a target vertex"))
    for extra in sorted(set(f.vertex_map) - src.vertex_set):
        out.append(Violation(extra, "map defined on undeclared vertex"))
    for v in src.vertices:
        image = f.vertex_map.get(v)
        if image is None or image not in tgt_vertices:
            continue
        if src.weights[v] != tgt.weights[image]:
            out.append(Violation(v, f"weight mismatch at {v}"))
    for u, v in sorted(src.edges):
        fu, fv = f.vertex_map.get(u), f.vertex_map.get(v)
        if fu is None or fv is None:
            continue
        if fu != fv and (fu, fv) not in tgt.edges:
            out.append(Violation(f"({u},{v})", f"edge maps to non-edge ({fu},{fv})"))
    return out


def join(g: WeightedDigraph, h: WeightedDigraph) -> WeightedDigraph:
    """The join: both digraphs side by side plus every edge from g into h.

    Vertex id sets must be disjoint; weights are inherited piecewise.
    """
    collisions = g.vertex_set & h.vertex_set
    if collisions:
        raise NonDisjointVertexSets(collisions)
    vertices = g.vertices + h.vertices
    edges = set(g.edges) | set(h.edges)
    edges.update((u, v) for u in g.vertices for v in h.vertices)
    weights = dict(g.weights)
    weights.update(h.weights)
    return WeightedDigraph(vertices, edges, weights)


def relabel(g: WeightedDigraph, prefix: str) -> WeightedDigraph:
    """Prefix every vertex id; the result is isomorphic to the input."""
    if not prefix:
        raise ValueError("prefix must be nonempty")
    ren = {v: prefix + v for v in g.vertices}
    return WeightedDigraph(
        [ren[v] for v in g.vertices],
        {(ren[u], ren[v]) for u, v in g.edges},
        {ren[v]: w for v, w in g.weights.items()},
    )


# ---------------------------------------------------------------------------
# text formats
#
# Digraph files (.wdg): one record per line, '#' starts a comment.
#   v <id> <weight>      weight is <int> or <int>/<posint>
#   e <src> <dst>        endpoints must already be declared
# Morphism files (.wmap): one line per source vertex.
#   m <source-id> <target-id>


def _records(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line_no, line.split()


def parse_digraph(text: str) -> WeightedDigraph:
    vertices: list[str] = []
    weights: dict[str, Fraction] = {}
    edges: set[tuple[str, str]] = set()
    for line_no, parts in _records(text):
        kind = parts[0]
        if kind == "v":
            if len(parts) != 3:
                raise ParseError(line_no, f"expected 'v <id> <weight>', got {' '.join(parts)!r}")
            _, vid, wtok = parts
            if vid in weights:
                raise ParseError(line_no, f"duplicate vertex {vid}")
            try:
                weights[vid] = parse_scalar(wtok)
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from None
            vertices.append(vid)
        elif kind == "e":
            if len(parts) != 3:
                raise ParseError(line_no, f"expected 'e <src> <dst>', got {' '.join(parts)!r}")
            _, u, v = parts
            for end in (u, v):
                if end not in weights:
                    raise ParseError(line_no, f"edge endpoint {end} not declared yet")
            edges.add((u, v))
        else:
            raise ParseError(line_no, f"unknown record type {kind!r}")
    return WeightedDigraph(vertices, edges, weights)


def parse_morphism(text: str, source: WeightedDigraph, target: WeightedDigraph) -> DigraphMorphism:
    vmap: dict[str, str] = {}
    for line_no, parts in _records(text):
        if parts[0] != "m" or len(parts) != 3:
            raise ParseError(line_no, f"expected 'm <source-id> <target-id>', got {' '.join(parts)!r}")
        _, s, t = parts
        if s in vmap:
            raise ParseError(line_no, f"duplicate map entry for {s}")
        vmap[s] = t
    missing = [v for v in source.vertices if v not in vmap]
    if missing:
        raise ParseError(0, "unmapped source vertices: " + ", ".join(missing))
    return DigraphMorphism(source, target, vmap)
