"""Paths on digraphs, chains, weighted boundaries, and the two canonical
sub-chain-complexes of the allowed chains.

An elementary p-path is an ordered tuple of p+1 vertex ids; the empty
tuple is the distinguished path of degree -1.  Only regular paths (no
two consecutive vertices equal) are ever materialized: the boundary
formula is applied in the regular-path basis, silently discarding
non-regular faces.  A path is allowed when every consecutive pair is a
directed edge.

Two submodules of the allowed p-chains matter:

* ``omega_basis`` spans the boundary-invariant allowed chains, the
  largest sub-chain-complex sitting inside the allowed chains (the
  kernel of the non-allowed block of the boundary matrix);
* ``gamma_basis`` spans the allowed chains plus boundaries of allowed
  chains one degree up, the smallest sub-chain-complex containing them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .digraph import WeightedDigraph
from .errors import UnknownVertex, VertexCollision
from .linalg import ExactMatrix, _canonical_lattice_basis, _canonical_subspace_basis, _kernel_vectors
from .rings import Ring, coerce, format_scalar, parse_scalar

ElementaryPath = tuple[str, ...]

EMPTY_PATH: ElementaryPath = ()


def path_degree(path: ElementaryPath) -> int:
    return len(path) - 1


def is_regular(path: ElementaryPath) -> bool:
    return all(path[i] != path[i + 1] for i in range(len(path) - 1))


def is_allowed(g: WeightedDigraph, path: ElementaryPath) -> bool:
    if len(path) <= 1:
        return all(v in g.weights for v in path)
    return all(v in g.weights for v in path) and all(
        (path[i], path[i + 1]) in g.edges for i in range(len(path) - 1)
    )


class Chain:
    """A finite formal linear combination of regular elementary paths.

    All stored paths share the chain's degree; zero coefficients are never
    kept.  Coefficients are exact (int or Fraction).  Chains are value
    objects: arithmetic returns new instances.
    """

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms=None):
        self.degree = degree
        clean: dict[ElementaryPath, object] = {}
        for path, coeff in (terms or {}).items():
            path = tuple(path)
            if path_degree(path) != degree:
                raise ValueError(f"path {path} has degree {path_degree(path)}, chain has {degree}")
            if not is_regular(path):
                raise ValueError(f"path {path} is not regular")
            if coeff:
                clean[path] = clean.get(path, 0) + coeff
        self.terms = {p: c for p, c in clean.items() if c}

    @classmethod
    def single(cls, path, coeff=1) -> "Chain":
        path = tuple(path)
        return cls(path_degree(path), {path: coeff})

    @classmethod
    def zero(cls, degree: int) -> "Chain":
        return cls(degree, {})

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items())

    def support_vertices(self) -> set[str]:
        return {v for path in self.terms for v in path}

    def coefficient(self, path) -> object:
        return self.terms.get(tuple(path), 0)

    def __add__(self, other: "Chain") -> "Chain":
        if self.degree != other.degree:
            raise ValueError("cannot add chains of different degrees")
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms.get(p, 0) + c
        return Chain(self.degree, terms)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other.scale(-1)

    def scale(self, scalar) -> "Chain":
        if not scalar:
            return Chain.zero(self.degree)
        return Chain(self.degree, {p: scalar * c for p, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Chain({self.degree}, {self.render()})"

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for path, coeff in self.items():
            name = "e(" + ",".join(path) + ")"
            if coeff == 1:
                term = name
            elif coeff == -1:
                term = "-" + name
            else:
                term = f"{format_scalar(coeff)}*{name}"
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += " - " + term[1:] if term.startswith("-") else " + " + term
        return out

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [
                {"path": list(path), "coeff": format_scalar(coeff)} for path, coeff in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data) -> "Chain":
        terms = {tuple(t["path"]): parse_scalar(t["coeff"]) for t in data["terms"]}
        return cls(data["degree"], terms)


def enumerate_allowed_paths(g: WeightedDigraph, p: int) -> list[ElementaryPath]:
    """All allowed elementary p-paths, lexicographically by vertex sequence.

    Degree -1 yields the empty path; degree 0 yields every vertex.
    """
    if p < -1:
        raise ValueError("degree must be >= -1")
    if p == -1:
        return [EMPTY_PATH]
    succ = {v: g.successors(v) for v in g.vertices}
    paths: list[ElementaryPath] = []

    def extend(prefix, remaining):
        if remaining == 0:
            paths.append(prefix)
            return
        for nxt in succ[prefix[-1]]:
            extend(prefix + (nxt,), remaining - 1)

    for v in sorted(g.vertices):
        extend((v,), p)
    return paths


def _boundary_terms(path: ElementaryPath, weights: dict):
    """Regular faces of the weighted boundary: [(face, signed weight)]."""
    out = []
    n = len(path)
    for q in range(n):
        if 0 < q < n - 1 and path[q - 1] == path[q + 1]:
            continue  # the face would repeat a vertex; it dies in the regular basis
        face = path[:q] + path[q + 1 :]
        out.append((face, weights[path[q]] if q % 2 == 0 else -weights[path[q]]))
    return out


def weighted_boundary(c: Chain, g: WeightedDigraph) -> Chain:
    """Apply the weighted boundary: alternating sum over vertex deletions,
    each face scaled by the weight of the deleted vertex, non-regular
    faces dropped."""
    if c.degree < 0:
        raise ValueError("boundary needs a chain of degree >= 0")
    missing = c.support_vertices() - set(g.weights)
    if missing:
        raise UnknownVertex(f"chain mentions vertices not in the digraph: {sorted(missing)}")
    acc: dict[ElementaryPath, object] = {}
    for path, coeff in c.terms.items():
        for face, w in _boundary_terms(path, g.weights):
            acc[face] = acc.get(face, 0) + coeff * w
    return Chain(c.degree - 1, acc)


@dataclass(frozen=True)
class BoundaryMatrix:
    """The boundary matrix on allowed p-paths, with labeled rows.

    Columns follow ``enumerate_allowed_paths`` order.  Rows are the regular
    (p-1)-paths that occur in some column's boundary: first the allowed
    ones, then the non-allowed ones, each block lexicographic.
    """

    matrix: ExactMatrix
    column_paths: tuple[ElementaryPath, ...]
    row_paths: tuple[ElementaryPath, ...]
    allowed_rows: int

    @property
    def nonallowed_block(self) -> ExactMatrix:
        data = self.matrix.data[self.allowed_rows :]
        return ExactMatrix(self.matrix.ring, data, cols=self.matrix.cols)


def boundary_matrix(
    g: WeightedDigraph, p: int, weighted: bool = True, ring: Ring = Ring.INTEGERS
) -> BoundaryMatrix:
    if p < 0:
        raise ValueError("degree must be >= 0")
    columns = enumerate_allowed_paths(g, p)
    weights = _ring_weights(g, ring) if weighted else {v: 1 for v in g.vertices}
    allowed_faces = set(enumerate_allowed_paths(g, p - 1))
    col_terms = [_boundary_terms(path, weights) for path in columns]
    support = {face for terms in col_terms for face, _ in terms}
    rows_allowed = sorted(support & allowed_faces)
    rows_other = sorted(support - allowed_faces)
    row_paths = rows_allowed + rows_other
    index = {path: i for i, path in enumerate(row_paths)}
    data = [[0] * len(columns) for _ in row_paths]
    for j, terms in enumerate(col_terms):
        for face, w in terms:
            data[index[face]][j] += w
    return BoundaryMatrix(
        matrix=ExactMatrix(ring, data, cols=len(columns)),
        column_paths=tuple(columns),
        row_paths=tuple(row_paths),
        allowed_rows=len(rows_allowed),
    )


@dataclass(frozen=True)
class GradedBasis:
    """An ordered basis of a submodule of the degree-p regular chains.

    ``ambient`` lists the paths indexing the coordinates; ``vectors`` holds
    the basis as matrix columns over the active ring.
    """

    degree: int
    ambient: tuple[ElementaryPath, ...]
    vectors: ExactMatrix

    @property
    def dim(self) -> int:
        return self.vectors.cols

    def column_chain(self, j: int) -> Chain:
        coords = self.vectors.column(j)
        return Chain(self.degree, dict(zip(self.ambient, coords)))

    def chains(self) -> list[Chain]:
        return [self.column_chain(j) for j in range(self.dim)]

    def vector_of(self, chain: Chain) -> list:
        index = {p: i for i, p in enumerate(self.ambient)}
        vec = [0] * len(self.ambient)
        for path, coeff in chain.terms.items():
            if path not in index:
                raise ValueError(f"path {path} is outside the ambient of this basis")
            vec[index[path]] = coeff
        return vec


def _ring_weights(g: WeightedDigraph, ring: Ring) -> dict:
    return {v: coerce(ring, w) for v, w in g.weights.items()}


def _merge_disjoint_bases(unit_positions, extra_vectors, length, ring):
    """Canonical basis of a direct sum of a coordinate sublattice and a
    reduced basis supported on the complementary coordinates."""
    if extra_vectors:
        if ring.is_field:
            reduced = _canonical_subspace_basis(extra_vectors, length)
        else:
            reduced = _canonical_lattice_basis(extra_vectors, length)
    else:
        reduced = []
    vectors = []
    for pos in unit_positions:
        v = [0] * length
        v[pos] = 1
        vectors.append(v)
    vectors.extend(reduced)
    vectors.sort(key=lambda v: next(i for i, x in enumerate(v) if x))
    return vectors


class DigraphComplex:
    """Shared per-digraph computation context: allowed paths, boundary
    term caches, and the graded bases of both canonical subcomplexes.

    Pure and deterministic; build one per (digraph, ring) pair and reuse
    it across degrees.
    """

    def __init__(self, g: WeightedDigraph, ring: Ring):
        self.digraph = g
        self.ring = ring
        self.weights = _ring_weights(g, ring)
        self._allowed: dict[int, list[ElementaryPath]] = {}
        self._allowed_set: dict[int, set[ElementaryPath]] = {}
        self._bterms: dict[ElementaryPath, list] = {}
        self._omega: dict[int, GradedBasis] = {}
        self._gamma: dict[int, GradedBasis] = {}

    def allowed(self, p: int) -> list[ElementaryPath]:
        if p not in self._allowed:
            self._allowed[p] = enumerate_allowed_paths(self.digraph, p)
        return self._allowed[p]

    def allowed_set(self, p: int) -> set[ElementaryPath]:
        if p not in self._allowed_set:
            self._allowed_set[p] = set(self.allowed(p))
        return self._allowed_set[p]

    def boundary_terms(self, path: ElementaryPath) -> list:
        terms = self._bterms.get(path)
        if terms is None:
            terms = _boundary_terms(path, self.weights)
            self._bterms[path] = terms
        return terms

    def boundary_of_vector(self, ambient, coords) -> dict[ElementaryPath, object]:
        acc: dict[ElementaryPath, object] = {}
        for path, coeff in zip(ambient, coords):
            if not coeff:
                continue
            for face, w in self.boundary_terms(path):
                acc[face] = acc.get(face, 0) + coeff * w
        return {k: v for k, v in acc.items() if v}

    def omega(self, p: int) -> GradedBasis:
        if p not in self._omega:
            self._omega[p] = self._compute_omega(p)
        return self._omega[p]

    def gamma(self, p: int) -> GradedBasis:
        if p not in self._gamma:
            self._gamma[p] = self._compute_gamma(p)
        return self._gamma[p]

    def _compute_omega(self, p: int) -> GradedBasis:
        if p == -1:
            return GradedBasis(-1, (EMPTY_PATH,), ExactMatrix.identity(self.ring, 1))
        ambient = tuple(self.allowed(p))
        n = len(ambient)
        if p == 0:
            return GradedBasis(0, ambient, ExactMatrix.identity(self.ring, n))
        allowed_faces = self.allowed_set(p - 1)
        constraint_rows: dict[ElementaryPath, int] = {}
        dirty_cols: list[tuple[int, dict[int, object]]] = []
        clean_positions = []
        for j, path in enumerate(ambient):
            col: dict[int, object] = {}
            for face, w in self.boundary_terms(path):
                if face in allowed_faces:
                    continue
                r = constraint_rows.setdefault(face, len(constraint_rows))
                col[r] = col.get(r, 0) + w
            col = {k: v for k, v in col.items() if v}
            if col:
                dirty_cols.append((j, col))
            else:
                clean_positions.append(j)
        kernel_vectors = []
        if dirty_cols:
            kvecs = _kernel_vectors([c for _, c in dirty_cols], len(dirty_cols), self.ring.is_field)
            for kv in kvecs:
                v = [0] * n
                for local, val in kv.items():
                    v[dirty_cols[local][0]] = val
                kernel_vectors.append(v)
        vectors = _merge_disjoint_bases(clean_positions, kernel_vectors, n, self.ring)
        return GradedBasis(p, ambient, ExactMatrix.from_columns(self.ring, vectors, rows=n))

    def _compute_gamma(self, p: int) -> GradedBasis:
        if p == -1:
            return GradedBasis(-1, (EMPTY_PATH,), ExactMatrix.identity(self.ring, 1))
        allowed_here = self.allowed(p)
        allowed_set = self.allowed_set(p)
        # boundaries of allowed (p+1)-paths, projected off the allowed block:
        # together with all allowed unit chains they generate the sum module
        extra_rows: dict[ElementaryPath, int] = {}
        projections = []
        for path in self.allowed(p + 1):
            proj: dict[int, object] = {}
            for face, w in self.boundary_terms(path):
                if face in allowed_set:
                    continue
                r = extra_rows.setdefault(face, len(extra_rows))
                proj[r] = proj.get(r, 0) + w
            proj = {k: v for k, v in proj.items() if v}
            if proj:
                projections.append(proj)
        ambient = tuple(sorted(list(allowed_here) + list(extra_rows)))
        index = {path: i for i, path in enumerate(ambient)}
        extra_index = {r: index[path] for path, r in extra_rows.items()}
        n = len(ambient)
        dense_projections = []
        for proj in projections:
            v = [0] * n
            for r, val in proj.items():
                v[extra_index[r]] = val
            dense_projections.append(v)
        unit_positions = sorted(index[path] for path in allowed_here)
        vectors = _merge_disjoint_bases(unit_positions, dense_projections, n, self.ring)
        return GradedBasis(p, ambient, ExactMatrix.from_columns(self.ring, vectors, rows=n))


def omega_basis(g: WeightedDigraph, p: int, ring: Ring) -> GradedBasis:
    """Canonical basis of the boundary-invariant allowed p-chains.

    Over the integers this spans the full integral kernel of the
    non-allowed boundary block (a saturated submodule); the basis is
    Hermite-reduced, so identical inputs give identical bases.
    """
    return DigraphComplex(g, ring).omega(p)


def gamma_basis(g: WeightedDigraph, p: int, ring: Ring) -> GradedBasis:
    """Canonical basis of allowed p-chains plus boundaries of allowed
    (p+1)-chains.

    Over the integers this spans exactly the (generally non-saturated)
    sum of the two submodules, not its saturation.
    """
    return DigraphComplex(g, ring).gamma(p)


def concatenate(u: Chain, v: Chain) -> Chain:
    """Bilinear concatenation of chains on disjoint vertex sets.

    On paths: append the second vertex sequence after the first; degrees
    add plus one.  The empty path is the unit.
    """
    overlap = u.support_vertices() & v.support_vertices()
    if overlap:
        raise VertexCollision(f"chains share vertices: {sorted(overlap)}")
    degree = u.degree + v.degree + 1
    terms: dict[ElementaryPath, object] = {}
    for pu, cu in u.terms.items():
        for pv, cv in v.terms.items():
            path = pu + pv
            terms[path] = terms.get(path, 0) + cu * cv
    return Chain(degree, terms)
