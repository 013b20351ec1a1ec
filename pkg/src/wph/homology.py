"""Weighted path homology of weighted digraphs, over Z or Q.

For each degree p the engine restricts the weighted boundary operator to
one of the two canonical subcomplexes of the allowed chains (the
boundary-invariant chains by default, or the allowed-plus-boundaries
variant), takes exact kernels, expresses the image of the next degree in
kernel coordinates, and reads the quotient off a Smith normal form.  By
default the complex is truncated (the degree-0 boundary is zero); in
reduced mode the augmentation to degree -1 is kept and a degree -1 group
is reported as well.

Morphisms of weighted digraphs act on chains by relabeling path vertices
(killing paths that become non-regular); the induced maps on homology are
computed on the canonical generators, with entries reduced modulo the
torsion of the target.  Every induced map is certified at chain level:
basis chains land in the target subcomplex, cycles land in cycles, and
boundaries land in boundaries.  A certificate failure is an engine bug,
never expected behavior.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .abgroup import FgAbelianGroup
from .digraph import DigraphMorphism, WeightedDigraph, require_valid, validate_morphism
from .errors import CertificateFailure, InvalidMorphism, WrongRing
from .linalg import (
    ExactMatrix,
    SpanSolver,
    _kernel_vectors,
    _smith,
    canonical_columns,
    rank,
    reduce_columns,
    unimodular_inverse,
)
from .paths import Chain, DigraphComplex, GradedBasis
from .rings import Ring


class ComplexKind(enum.Enum):
    OMEGA = "omega"
    GAMMA = "gamma"


@dataclass(frozen=True)
class ClassGenerator:
    """A homology generator: a cycle chain plus its order (0 = infinite)."""

    chain: Chain
    order: int


class _ZClassReducer:
    """Maps kernel coordinates to generator coordinates over Z.

    Built from the Smith decomposition of the relation matrix: the row
    transform diagonalizes the relations, so in the transformed basis each
    coordinate is either dead (unit relation), cyclic (reduced modulo its
    order) or free (kept exactly).
    """

    def __init__(self, u_rows, orders, gen_indices):
        self._u = u_rows
        self.orders = orders
        self.gen_indices = gen_indices

    def reduce(self, x: list) -> list:
        out = []
        for i in self.gen_indices:
            row = self._u[i]
            y = sum(a * b for a, b in zip(row, x) if a and b)
            d = self.orders[i]
            out.append(y % d if d > 1 else y)
        return out


class _QClassReducer:
    """Maps kernel coordinates to generator coordinates over Q:
    eliminate the image echelon at its pivot rows, read off the rest."""

    def __init__(self, ech_cols, pivot_in_row, free_rows):
        self._ech = ech_cols
        self._piv = pivot_in_row
        self.free_rows = free_rows
        self.orders = [0] * len(free_rows)
        self.gen_indices = list(range(len(free_rows)))

    def reduce(self, x: list) -> list:
        t = {i: Fraction(v) for i, v in enumerate(x) if v}
        for r in sorted(self._piv):
            if r in t:
                col = self._ech[self._piv[r]]
                c = t[r] / col[r]
                for k, v in col.items():
                    nv = t.get(k, 0) - c * v
                    if nv:
                        t[k] = nv
                    else:
                        t.pop(k, None)
        return [t.get(r, Fraction(0)) for r in self.free_rows]


class DegreeHomology:
    """Everything the engine knows about one homology degree."""

    def __init__(self, degree, ring, chain_basis, cycle_ambient, boundary_coords,
                 image_ambient, group, generators, reducer):
        self.degree = degree
        self.ring = ring
        self.chain_basis: GradedBasis = chain_basis
        self.cycle_basis = GradedBasis(degree, chain_basis.ambient, cycle_ambient)
        self.boundary_coords: ExactMatrix = boundary_coords
        self.group: FgAbelianGroup = group
        self.generators: tuple[ClassGenerator, ...] = tuple(generators)
        self._image_ambient = image_ambient  # reduced image generators, ambient coords
        self._reducer = reducer
        self._cycle_solver = None
        self._chain_solver = None
        self._boundary_solver = None

    @property
    def ambient_index(self) -> dict:
        idx = getattr(self, "_ambient_index", None)
        if idx is None:
            idx = {path: i for i, path in enumerate(self.chain_basis.ambient)}
            self._ambient_index = idx
        return idx

    def cycle_solver(self) -> SpanSolver:
        if self._cycle_solver is None:
            self._cycle_solver = SpanSolver(self.cycle_basis.vectors.columns_as_dicts(), self.ring)
        return self._cycle_solver

    def chain_solver(self) -> SpanSolver:
        if self._chain_solver is None:
            self._chain_solver = SpanSolver(self.chain_basis.vectors.columns_as_dicts(), self.ring)
        return self._chain_solver

    def boundary_solver(self) -> SpanSolver:
        if self._boundary_solver is None:
            self._boundary_solver = SpanSolver(self._image_ambient, self.ring)
        return self._boundary_solver

    def generator_orders(self) -> list[int]:
        return [g.order for g in self.generators]

    def class_coords(self, vector) -> list | None:
        """Coordinates of a cycle (ambient coordinates) on the generators,
        reduced modulo torsion; None when the vector is not a cycle here."""
        x = self.cycle_solver().solve(vector)
        if x is None:
            return None
        return self._reducer.reduce(x)

    def chain_class_coords(self, chain: Chain) -> list | None:
        vec = {}
        idx = self.ambient_index
        for path, coeff in chain.terms.items():
            if path not in idx:
                return None
            vec[idx[path]] = coeff
        return self.class_coords(vec)


def _ambient_matrix(ring, chain_basis, coord_matrix) -> ExactMatrix:
    """Columns of the chain basis combined by coordinate columns."""
    n = chain_basis.vectors.rows
    cols = []
    basis_cols = chain_basis.vectors.columns_as_dicts()
    for j in range(coord_matrix.cols):
        acc: dict[int, object] = {}
        for i in range(coord_matrix.rows):
            c = coord_matrix.entry(i, j)
            if not c:
                continue
            for r, v in basis_cols[i].items():
                nv = acc.get(r, 0) + c * v
                if nv:
                    acc[r] = nv
                else:
                    acc.pop(r, None)
        dense = [0] * n
        for r, v in acc.items():
            dense[r] = v
        cols.append(dense)
    return ExactMatrix.from_columns(ring, cols, rows=n)


class HomologyReport:
    """Homology groups, cycle bases, boundary coordinates and generators
    for all degrees up to ``p_max`` (plus -1 in reduced mode)."""

    def __init__(self, digraph, ring, p_max, complex_kind, reduced, degrees):
        self.digraph = digraph
        self.ring = ring
        self.p_max = p_max
        self.complex_kind = complex_kind
        self.reduced = reduced
        self.degrees: dict[int, DegreeHomology] = degrees

    def degree_data(self, p: int) -> DegreeHomology:
        return self.degrees[p]

    def group(self, p: int) -> FgAbelianGroup:
        data = self.degrees.get(p)
        return data.group if data is not None else FgAbelianGroup.trivial()

    def betti(self, p: int) -> int:
        return self.group(p).free_rank

    def to_json(self) -> dict:
        out_degrees = []
        for p in sorted(self.degrees):
            d = self.degrees[p]
            out_degrees.append(
                {
                    "degree": p,
                    "free_rank": d.group.free_rank,
                    "torsion": list(d.group.torsion),
                    "generators": [g.chain.to_json() for g in d.generators],
                }
            )
        return {
            "ring": self.ring.value,
            "complex": self.complex_kind.value,
            "reduced": self.reduced,
            "degrees": out_degrees,
        }


def homology(
    g: WeightedDigraph,
    ring: Ring,
    p_max: int,
    complex_kind: ComplexKind = ComplexKind.OMEGA,
    reduced: bool = False,
) -> HomologyReport:
    """Weighted path homology of (G, w) in degrees 0..p_max.

    With ``reduced`` the augmented complex is used: the degree-0 boundary
    sends a vertex to its weight times the empty path and a degree -1
    group is reported (the coefficient ring modulo the vertex weights).
    """
    require_valid(g, ring)
    ctx = DigraphComplex(g, ring)
    lo = -1 if reduced else 0
    degrees: dict[int, DegreeHomology] = {}
    for p in range(lo, p_max + 1):
        degrees[p] = _degree_homology(ctx, ring, p, complex_kind, reduced)
    return HomologyReport(g, ring, p_max, complex_kind, reduced, degrees)


def _basis(ctx: DigraphComplex, p: int, kind: ComplexKind) -> GradedBasis:
    return ctx.omega(p) if kind is ComplexKind.OMEGA else ctx.gamma(p)


def _degree_homology(ctx, ring, p, kind, reduced) -> DegreeHomology:
    B = _basis(ctx, p, kind)
    k = B.dim
    field = ring.is_field

    # kernel of the boundary restricted to the subcomplex, in basis coordinates
    if (p == 0 and not reduced) or p == -1:
        kernel_coords = [{j: 1} for j in range(k)]
    else:
        rows: dict = {}
        cols = []
        basis_cols = B.vectors.columns_as_dicts()
        ambient = B.ambient
        for j in range(k):
            acc: dict = {}
            for i, v in basis_cols[j].items():
                for face, w in ctx.boundary_terms(ambient[i]):
                    nv = acc.get(face, 0) + v * w
                    if nv:
                        acc[face] = nv
                    else:
                        acc.pop(face, None)
            col = {}
            for face, v in acc.items():
                r = rows.setdefault(face, len(rows))
                col[r] = v
            cols.append(col)
        kernel_coords = canonical_columns(_kernel_vectors(cols, k, field), k, field)

    kappa = len(kernel_coords)
    coord_cols = []
    for kv in kernel_coords:
        dense = [0] * k
        for i, v in kv.items():
            dense[i] = v
        coord_cols.append(dense)
    cycle_coords = ExactMatrix.from_columns(ring, coord_cols, rows=k)

    # image of the next degree up, as reduced ambient-coordinate generators
    ambient_index = {path: i for i, path in enumerate(B.ambient)}
    image_cols = []
    if kind is ComplexKind.OMEGA:
        upper = ctx.omega(p + 1)
        upper_cols = upper.vectors.columns_as_dicts()
        for j in range(upper.dim):
            dense = _dense_from_dict(upper_cols[j], upper.vectors.rows)
            acc = ctx.boundary_of_vector(upper.ambient, dense)
            image_cols.append(_index_dict(acc, ambient_index))
    else:
        for path in ctx.allowed(p + 1):
            acc: dict = {}
            for face, w in ctx.boundary_terms(path):
                acc[face] = acc.get(face, 0) + w
            image_cols.append(_index_dict({f: v for f, v in acc.items() if v}, ambient_index))
    image_cols = [c for c in image_cols if c]
    image_cols = canonical_columns(image_cols, len(B.ambient), field)

    # express the image in cycle coordinates
    cycle_ambient = _ambient_matrix(ring, B, cycle_coords)
    solver = SpanSolver(cycle_ambient.columns_as_dicts(), ring)
    rel_cols = []
    for c in image_cols:
        x = solver.solve(c)
        if x is None:
            raise CertificateFailure(
                f"boundary image escapes the cycle module in degree {p}"
            )
        rel_cols.append(x)
    boundary_coords = ExactMatrix.from_columns(ring, rel_cols, rows=kappa)

    # quotient
    if field:
        ech = reduce_columns(boundary_coords.columns_as_dicts(), True)
        piv = {min(c): i for i, c in enumerate(ech)}
        free_rows = [i for i in range(kappa) if i not in piv]
        reducer = _QClassReducer(ech, piv, free_rows)
        group = FgAbelianGroup.free(len(free_rows))
        generators = [
            ClassGenerator(_column_chain(B, cycle_ambient, f, p), 0) for f in free_rows
        ]
    else:
        diag, U, _ = _smith(boundary_coords.data, kappa, boundary_coords.cols, track=True)
        orders = [diag[i] if i < len(diag) else 0 for i in range(kappa)]
        gen_indices = [i for i, d in enumerate(orders) if d != 1]
        reducer = _ZClassReducer(U, orders, gen_indices)
        group = FgAbelianGroup.from_diagonal(diag, kappa)
        generators = []
        if gen_indices:
            uinv = unimodular_inverse(ExactMatrix(Ring.INTEGERS, U, cols=kappa))
            gen_coord_matrix = cycle_coords @ uinv
            gen_ambient = _ambient_matrix(ring, B, gen_coord_matrix)
            for i in gen_indices:
                generators.append(
                    ClassGenerator(_column_chain(B, gen_ambient, i, p), orders[i])
                )

    out = DegreeHomology(
        degree=p,
        ring=ring,
        chain_basis=B,
        cycle_ambient=cycle_ambient,
        boundary_coords=boundary_coords,
        image_ambient=image_cols,
        group=group,
        generators=generators,
        reducer=reducer,
    )
    out._cycle_solver = solver
    return out


def _dense_from_dict(d: dict, n: int) -> list:
    out = [0] * n
    for k, v in d.items():
        out[k] = v
    return out


def _index_dict(path_dict: dict, index: dict) -> dict:
    out = {}
    for path, v in path_dict.items():
        if path not in index:
            raise CertificateFailure(f"chain leaves its expected module at {path}")
        out[index[path]] = v
    return out


def _column_chain(basis: GradedBasis, ambient_matrix: ExactMatrix, j: int, degree: int) -> Chain:
    coords = ambient_matrix.column(j)
    return Chain(degree, dict(zip(basis.ambient, coords)))


# ---------------------------------------------------------------------------
# induced maps


class InducedMap:
    """The action of a weighted-digraph morphism on homology.

    ``matrices[p]`` has one column per source generator and one row per
    target generator; entries on torsion rows are reduced into [0, order).
    Construction certifies, at chain level, that basis chains map into the
    target subcomplex, cycles to cycles and boundaries to boundaries.
    """

    def __init__(self, morphism, ring, p_max, reduced, source, target, matrices):
        self.morphism = morphism
        self.ring = ring
        self.p_max = p_max
        self.reduced = reduced
        self.source: HomologyReport = source
        self.target: HomologyReport = target
        self.matrices: dict[int, ExactMatrix] = matrices

    def matrix(self, p: int) -> ExactMatrix:
        return self.matrices[p]

    def source_orders(self, p: int) -> list[int]:
        return self.source.degree_data(p).generator_orders()

    def target_orders(self, p: int) -> list[int]:
        return self.target.degree_data(p).generator_orders()

    def is_identity(self, p: int) -> bool:
        m = self.matrices[p]
        return m.rows == m.cols and m == ExactMatrix.identity(self.ring, m.rows)

    def to_json(self) -> dict:
        return {
            "ring": self.ring.value,
            "degrees": [
                {
                    "degree": p,
                    "matrix": [[_json_scalar(x) for x in row] for row in self.matrices[p].data],
                    "source_orders": self.source_orders(p),
                    "target_orders": self.target_orders(p),
                }
                for p in sorted(self.matrices)
            ],
        }


def _json_scalar(x):
    from .rings import format_scalar

    return format_scalar(x)


def _map_chain_dict(vertex_map, terms: dict) -> dict:
    """Push a chain through a vertex map; paths that become non-regular die."""
    out: dict = {}
    for path, coeff in terms.items():
        image = tuple(vertex_map[v] for v in path)
        if any(image[i] == image[i + 1] for i in range(len(image) - 1)):
            continue
        nv = out.get(image, 0) + coeff
        if nv:
            out[image] = nv
        else:
            out.pop(image, None)
    return out


def induced_map(
    f: DigraphMorphism,
    ring: Ring,
    p_max: int,
    reduced: bool = False,
    source_report: HomologyReport | None = None,
    target_report: HomologyReport | None = None,
) -> InducedMap:
    """Homology action of a morphism, certified at chain level.

    Precomputed homology reports for the endpoints may be passed in; they
    must come from the default complex with matching ring/degree/reduced
    settings (persistence pipelines reuse one report per step this way).
    """
    require_valid(f.source, ring)
    require_valid(f.target, ring)
    violations = validate_morphism(f)
    if violations:
        raise InvalidMorphism("; ".join(str(v) for v in violations))
    source = source_report or homology(f.source, ring, p_max, ComplexKind.OMEGA, reduced)
    target = target_report or homology(f.target, ring, p_max, ComplexKind.OMEGA, reduced)
    for rep, which in ((source, "source"), (target, "target")):
        if rep.ring is not ring or rep.p_max < p_max or rep.reduced != reduced:
            raise ValueError(f"precomputed {which} report does not match the request")
        if rep.complex_kind is not ComplexKind.OMEGA:
            raise ValueError("induced maps are computed on the default complex")
    matrices: dict[int, ExactMatrix] = {}
    lo = -1 if reduced else 0
    for p in range(lo, p_max + 1):
        sd = source.degree_data(p)
        td = target.degree_data(p)
        tindex = td.ambient_index

        def push(path_dict):
            image = _map_chain_dict(f.vertex_map, path_dict)
            vec = {}
            for path, coeff in image.items():
                if path not in tindex:
                    raise CertificateFailure(
                        f"image path {path} is not allowed in the target (degree {p})"
                    )
                vec[tindex[path]] = coeff
            return vec

        sambient = sd.chain_basis.ambient
        chain_cols = sd.chain_basis.vectors.columns_as_dicts()
        chain_solver = td.chain_solver()
        for col in chain_cols:
            vec = push({sambient[i]: v for i, v in col.items()})
            if chain_solver.solve(vec) is None:
                raise CertificateFailure(
                    f"chain image leaves the target subcomplex in degree {p}"
                )
        boundary_solver = td.boundary_solver() if sd._image_ambient else None
        for col in sd._image_ambient:
            vec = push({sambient[i]: v for i, v in col.items()})
            if vec and boundary_solver.solve(vec) is None:
                raise CertificateFailure(
                    f"boundary image leaves the target boundaries in degree {p}"
                )
        cols = []
        for gen in sd.generators:
            vec = push(gen.chain.terms)
            coords = td.class_coords(vec)
            if coords is None:
                raise CertificateFailure(
                    f"cycle image is not a target cycle in degree {p}"
                )
            cols.append(coords)
        matrices[p] = ExactMatrix.from_columns(ring, cols, rows=len(td.generators))
    return InducedMap(f, ring, p_max, reduced, source, target, matrices)


def compose_matrices_mod_torsion(outer: ExactMatrix, inner: ExactMatrix, target_orders) -> ExactMatrix:
    prod = outer @ inner
    return _mod_torsion(prod, target_orders)


def _mod_torsion(m: ExactMatrix, target_orders) -> ExactMatrix:
    data = []
    for i, row in enumerate(m.data):
        d = target_orders[i]
        data.append([x % d if d > 1 else x for x in row])
    return ExactMatrix(m.ring, data, cols=m.cols)


def maps_equal_mod_torsion(a: ExactMatrix, b: ExactMatrix, target_orders) -> bool:
    return _mod_torsion(a, target_orders) == _mod_torsion(b, target_orders)


# ---------------------------------------------------------------------------
# weight independence over the rationals


def phi_rescale(c: Chain, g: WeightedDigraph, ring: Ring = Ring.RATIONALS) -> Chain:
    """Divide each coefficient by the product of its path's vertex weights.

    This carries unweighted cycles to weighted cycles; it needs division,
    hence the rationals.
    """
    if ring is not Ring.RATIONALS:
        raise WrongRing("the rescaling isomorphism requires rational coefficients")
    terms = {}
    for path, coeff in c.terms.items():
        denom = Fraction(1)
        for v in path:
            denom *= g.weights[v]
        terms[path] = Fraction(coeff) / denom
    return Chain(c.degree, terms)


@dataclass(frozen=True)
class WeightIndependenceDegree:
    degree: int
    betti: int
    betti_alt: int
    witness: ExactMatrix | None

    @property
    def equal(self) -> bool:
        return self.betti == self.betti_alt


@dataclass(frozen=True)
class WeightIndependenceReport:
    digraph: WeightedDigraph
    alt_weights: dict
    entries: tuple[WeightIndependenceDegree, ...]

    @property
    def all_equal(self) -> bool:
        return all(e.equal for e in self.entries)


def verify_weight_independence(
    g: WeightedDigraph, alt_weights: dict | None = None, p_max: int = 3
) -> WeightIndependenceReport:
    """Check that rational Betti numbers ignore the choice of weights.

    Compares (G, w) against (G, w_alt), with w_alt defaulting to the
    constant weight 1, and produces for every degree an invertible witness
    matrix conjugating the rescaled alternative cycle basis into the base
    cycle basis.  An inequality would be a counterexample and is reported,
    not raised; it must never occur.
    """
    if alt_weights is None:
        alt_weights = {v: Fraction(1) for v in g.vertices}
    alt = WeightedDigraph(g.vertices, g.edges, alt_weights)
    require_valid(g, Ring.RATIONALS)
    require_valid(alt, Ring.RATIONALS)
    base_report = homology(g, Ring.RATIONALS, p_max)
    alt_report = homology(alt, Ring.RATIONALS, p_max)
    entries = []
    for p in range(0, p_max + 1):
        bd = base_report.degree_data(p)
        ad = alt_report.degree_data(p)
        witness = None
        if bd.group.free_rank == ad.group.free_rank:
            solver = bd.cycle_solver()
            cols = []
            ok = True
            for j in range(ad.cycle_basis.dim):
                rescaled = {}
                for i, path in enumerate(ad.cycle_basis.ambient):
                    v = ad.cycle_basis.vectors.entry(i, j)
                    if not v:
                        continue
                    factor = Fraction(1)
                    for vertex in path:
                        factor *= Fraction(alt.weights[vertex]) / Fraction(g.weights[vertex])
                    idx = bd.ambient_index[path]
                    rescaled[idx] = Fraction(v) * factor
                x = solver.solve(rescaled)
                if x is None:
                    ok = False
                    break
                cols.append(x)
            if ok:
                w = ExactMatrix.from_columns(Ring.RATIONALS, cols, rows=bd.cycle_basis.dim)
                if w.rows == w.cols and rank(w) == w.rows:
                    witness = w
        entries.append(
            WeightIndependenceDegree(
                degree=p,
                betti=bd.group.free_rank,
                betti_alt=ad.group.free_rank,
                witness=witness,
            )
        )
    return WeightIndependenceReport(g, dict(alt_weights), tuple(entries))
