"""Exact linear algebra over Z and Q.

Matrices are stored densely (row-major lists of exact scalars); the
ambient dimensions in this package are desk scale, a few hundred at
most.  The elimination routines, however, convert to sparse column
dictionaries internally: boundary matrices are overwhelmingly sparse
and the exhaustive verification suites run thousands of instances, so
the reductions skip zeroes instead of scanning them.

Over the integers everything is kept exact with arbitrary-precision
ints; kernels of integer matrices are automatically saturated, and
quotients are presented through the Smith normal form, whose diagonal
carries the torsion.  Over the rationals the same entry points compute
plain linear algebra with ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .abgroup import FgAbelianGroup
from .errors import WrongRing
from .rings import Ring, coerce


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns (x, y, g) with x*a + y*b == g = gcd(a, b)."""
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return x, y, g


def _near_quo(b: int, a: int) -> int:
    """Quotient minimizing |b - q*a|; keeps elimination entries small."""
    q, r = divmod(b, a)
    if 2 * abs(r) > abs(a):
        q += 1
    return q


class ExactMatrix:
    """A dense matrix over Z or Q with exact entries."""

    __slots__ = ("ring", "rows", "cols", "data")

    def __init__(self, ring: Ring, data, cols: int | None = None):
        self.ring = ring
        self.data = [[coerce(ring, x) for x in row] for row in data]
        self.rows = len(self.data)
        if self.rows:
            widths = {len(row) for row in self.data}
            if len(widths) != 1:
                raise ValueError("ragged rows")
            self.cols = widths.pop()
            if cols is not None and cols != self.cols:
                raise ValueError("explicit column count disagrees with data")
        else:
            if cols is None:
                raise ValueError("empty matrix needs an explicit column count")
            self.cols = cols

    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "ExactMatrix":
        return cls(ring, [[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "ExactMatrix":
        return cls(ring, [[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, ring: Ring, columns, rows: int) -> "ExactMatrix":
        columns = list(columns)
        data = [[col[i] for col in columns] for i in range(rows)]
        return cls(ring, data, cols=len(columns))

    def entry(self, i: int, j: int):
        return self.data[i][j]

    def column(self, j: int) -> list:
        return [row[j] for row in self.data]

    def columns_as_dicts(self) -> list[dict]:
        out = []
        for j in range(self.cols):
            col = {}
            for i in range(self.rows):
                v = self.data[i][j]
                if v:
                    col[i] = v
            out.append(col)
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.ring, [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        if self.ring is not other.ring:
            raise WrongRing("cannot multiply matrices over different rings")
        out = []
        bt = other.transpose().data
        for row in self.data:
            out.append([sum(a * b for a, b in zip(row, col) if a and b) for col in bt])
        return ExactMatrix(self.ring, out, cols=other.cols)

    def is_zero(self) -> bool:
        return all(not v for row in self.data for v in row)

    def diagonal(self) -> list:
        return [self.data[i][i] for i in range(min(self.rows, self.cols))]

    def to_ring(self, ring: Ring) -> "ExactMatrix":
        return ExactMatrix(ring, self.data, cols=self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.ring is other.ring
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self) -> str:
        return f"ExactMatrix({self.ring}, {self.rows}x{self.cols})"


# ---------------------------------------------------------------------------
# sparse column elimination


def _echelon_columns(cols: list[dict], field: bool, transform: bool):
    """Column echelon by topmost-row pivoting, in place on copies.

    Returns (echelon_cols, trans, pivot_in_row).  Column operations are
    unimodular over Z (Euclidean 2x2 blocks) and invertible over Q, so the
    column span/lattice is preserved; ``trans[j]`` expresses echelon column j
    in terms of the input columns.  A column that reduces to the empty dict
    witnesses a kernel vector, namely its transform column.
    """
    cols = [dict(c) for c in cols]
    trans = [{j: 1} for j in range(len(cols))] if transform else None
    pivot_in_row: dict[int, int] = {}
    for j, col in enumerate(cols):
        while col:
            r = min(col)
            p = pivot_in_row.get(r)
            if p is None:
                pivot_in_row[r] = j
                break
            pc = cols[p]
            a = pc[r]
            b = col[r]
            if field or b % a == 0:
                q = b / a if field else b // a
                for k, v in pc.items():
                    nv = col.get(k, 0) - q * v
                    if nv:
                        col[k] = nv
                    else:
                        col.pop(k, None)
                if transform:
                    tj, tp = trans[j], trans[p]
                    for k, v in tp.items():
                        nv = tj.get(k, 0) - q * v
                        if nv:
                            tj[k] = nv
                        else:
                            tj.pop(k, None)
            else:
                x, y, g = xgcd(a, b)
                u, w = -(b // g), a // g
                newp, newc = {}, {}
                for k in pc.keys() | col.keys():
                    av, bv = pc.get(k, 0), col.get(k, 0)
                    n1 = x * av + y * bv
                    n2 = u * av + w * bv
                    if n1:
                        newp[k] = n1
                    if n2:
                        newc[k] = n2
                cols[p] = newp
                col.clear()
                col.update(newc)
                if transform:
                    tp, tj = trans[p], trans[j]
                    newtp, newtj = {}, {}
                    for k in tp.keys() | tj.keys():
                        av, bv = tp.get(k, 0), tj.get(k, 0)
                        n1 = x * av + y * bv
                        n2 = u * av + w * bv
                        if n1:
                            newtp[k] = n1
                        if n2:
                            newtj[k] = n2
                    trans[p] = newtp
                    tj.clear()
                    tj.update(newtj)
    return cols, trans, pivot_in_row


def reduce_columns(cols: list[dict], field: bool) -> list[dict]:
    """Replace a generating set by an equivalent echelon generating set.

    The returned nonzero columns span the same lattice (Z) or subspace (Q)
    as the input columns; useful to shrink large generating sets before
    solving or taking quotients.
    """
    ech, _, _ = _echelon_columns(cols, field, transform=False)
    return [c for c in ech if c]


def canonical_columns(cols: list[dict], length: int, field: bool) -> list[dict]:
    """Canonical reduced basis of the span of the given columns.

    Hermite-reduced over Z, reduced echelon over Q.  Besides determinism
    this keeps entries small: raw elimination transforms can blow up, and
    every persistent basis in the engine goes through here before it is
    stored or fed to a solver.
    """
    dense = []
    for c in cols:
        v = [0] * length
        for k, val in c.items():
            v[k] = val
        dense.append(v)
    if field:
        reduced = _canonical_subspace_basis(dense, length)
    else:
        reduced = _canonical_lattice_basis(dense, length)
    return [{i: x for i, x in enumerate(v) if x} for v in reduced]


class SpanSolver:
    """Exact membership and coordinates in the span of fixed columns.

    Over Z the span is the generated lattice (membership requires integer
    coordinates); over Q it is the linear span.
    """

    def __init__(self, columns: list[dict], ring: Ring):
        self.ring = ring
        self._field = ring.is_field
        self._ncols = len(columns)
        if self._field:
            columns = [{k: Fraction(v) for k, v in c.items()} for c in columns]
        self._ech, self._trans, self._piv = _echelon_columns(columns, self._field, True)

    def solve(self, vector) -> list | None:
        """Coordinates x with columns . x == vector, or None if not in the span."""
        if isinstance(vector, dict):
            t = {k: v for k, v in vector.items() if v}
        else:
            t = {i: v for i, v in enumerate(vector) if v}
        if self._field:
            t = {k: Fraction(v) for k, v in t.items()}
        y: dict[int, object] = {}
        while t:
            r = min(t)
            p = self._piv.get(r)
            if p is None:
                return None
            a = self._ech[p][r]
            b = t[r]
            if not self._field and b % a:
                return None
            q = b / a if self._field else b // a
            for k, v in self._ech[p].items():
                nv = t.get(k, 0) - q * v
                if nv:
                    t[k] = nv
                else:
                    t.pop(k, None)
            y[p] = y.get(p, 0) + q
        zero = Fraction(0) if self._field else 0
        x = [zero] * self._ncols
        for p, c in y.items():
            for k, v in self._trans[p].items():
                x[k] += c * v
        return x

    def contains(self, vector) -> bool:
        return self.solve(vector) is not None


def solve_in_span(basis: ExactMatrix, target) -> list | None:
    """Exact coordinates of ``target`` in the span of the basis columns.

    Returns None when the target is not in the span (over Z: not in the
    generated lattice).
    """
    if len(target) != basis.rows:
        raise ValueError("target length does not match basis row count")
    return SpanSolver(basis.columns_as_dicts(), basis.ring).solve(list(target))


def rank(a: ExactMatrix) -> int:
    ech, _, _ = _echelon_columns(a.columns_as_dicts(), a.ring.is_field, False)
    return sum(1 for c in ech if c)


# ---------------------------------------------------------------------------
# Hermite normal form


def _row_hnf(rows: list[list[int]], ncols: int, want_u: bool):
    """Row-echelon Hermite form; returns (H, U, pivot_positions)."""
    m = len(rows)
    H = [list(r) for r in rows]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)] if want_u else None
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if len(nz) <= 1:
                break
            ip = min(nz, key=lambda i: (abs(H[i][c]), i))
            piv = H[ip][c]
            for i in nz:
                if i == ip:
                    continue
                q = _near_quo(H[i][c], piv)
                if q:
                    Hi, Hp = H[i], H[ip]
                    for j in range(c, ncols):
                        Hi[j] -= q * Hp[j]
                    if want_u:
                        Ui, Up = U[i], U[ip]
                        for j in range(m):
                            Ui[j] -= q * Up[j]
        nz = [i for i in range(r, m) if H[i][c]]
        if not nz:
            continue
        i0 = nz[0]
        if i0 != r:
            H[r], H[i0] = H[i0], H[r]
            if want_u:
                U[r], U[i0] = U[i0], U[r]
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            if want_u:
                U[r] = [-x for x in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            if q:
                Hi, Hr = H[i], H[r]
                for j in range(ncols):
                    Hi[j] -= q * Hr[j]
                if want_u:
                    Ui, Ur = U[i], U[r]
                    for j in range(m):
                        Ui[j] -= q * Ur[j]
        pivots.append((r, c))
        r += 1
    return H, U, pivots


def hermite_normal_form(a: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix]:
    """Row Hermite normal form: U @ a == H with U unimodular.

    Pivots are positive, entries above each pivot are reduced into
    [0, pivot), zero rows sink to the bottom.
    """
    if a.ring is not Ring.INTEGERS:
        raise WrongRing("Hermite normal form requires integer entries")
    H, U, _ = _row_hnf(a.data, a.cols, want_u=True)
    return (
        ExactMatrix(Ring.INTEGERS, H, cols=a.cols),
        ExactMatrix(Ring.INTEGERS, U, cols=a.rows),
    )


def _canonical_lattice_basis(vectors: list[list[int]], length: int) -> list[list[int]]:
    """Unique Hermite-reduced basis of the lattice spanned by the vectors."""
    H, _, pivots = _row_hnf(vectors, length, want_u=False)
    return [H[i] for i, _ in enumerate(pivots)]


def _canonical_subspace_basis(vectors: list[list], length: int) -> list[list]:
    """Unique reduced-echelon basis of the rational span of the vectors."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    m = len(rows)
    r = 0
    pivots = []
    for c in range(length):
        if r >= m:
            break
        ip = next((i for i in range(r, m) if rows[i][c]), None)
        if ip is None:
            continue
        rows[r], rows[ip] = rows[ip], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r]


def kernel_basis(a: ExactMatrix) -> ExactMatrix:
    """Basis of the right kernel of ``a``, as matrix columns.

    Over Z the columns span the full integral kernel lattice (which is
    saturated); over Q they span the nullspace.  The basis is in a
    canonical reduced form in both cases, so identical inputs give
    identical outputs across runs.
    """
    if a.ring.is_field:
        vecs = _q_nullspace(a)
    else:
        kvecs = _kernel_vectors(a.columns_as_dicts(), a.cols, field=False)
        dense = []
        for kv in kvecs:
            v = [0] * a.cols
            for k, val in kv.items():
                v[k] = val
            dense.append(v)
        vecs = _canonical_lattice_basis(dense, a.cols)
    return ExactMatrix.from_columns(a.ring, vecs, rows=a.cols)


def _kernel_vectors(cols: list[dict], ncols: int, field: bool) -> list[dict]:
    if field:
        cols = [{k: Fraction(v) for k, v in c.items()} for c in cols]
    ech, trans, _ = _echelon_columns(cols, field, transform=True)
    return [trans[j] for j in range(ncols) if not ech[j]]


def _q_nullspace(a: ExactMatrix) -> list[list[Fraction]]:
    """Canonical nullspace basis from the reduced row echelon form."""
    rows = [[Fraction(x) for x in row] for row in a.data]
    m, n = a.rows, a.cols
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        ip = next((i for i in range(r, m) if rows[i][c]), None)
        if ip is None:
            continue
        rows[r], rows[ip] = rows[ip], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
    pivot_cols = {c for _, c in pivots}
    basis = []
    for f in range(n):
        if f in pivot_cols:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for pr, pc in pivots:
            v[pc] = -rows[pr][f]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V == S with S diagonal (d1 | d2 | ...) and U, V unimodular."""

    s: ExactMatrix
    u: ExactMatrix
    v: ExactMatrix
    shape: tuple[int, int]

    def diagonal(self) -> list[int]:
        return self.s.diagonal()

    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal() if d]


def _smith(data, m: int, n: int, track: bool):
    """Core Smith reduction; returns (diag, U, V) with diag the nonzero prefix."""
    M = [list(row) for row in data]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)] if track else None
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if track else None
    limit = min(m, n)

    def find_pivot(t):
        best = None
        for i in range(t, m):
            Mi = M[i]
            for j in range(t, n):
                v = Mi[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        return best
        return best

    def clean(t) -> bool:
        while True:
            best = find_pivot(t)
            if best is None:
                return False
            _, bi, bj = best
            if bi != t:
                M[t], M[bi] = M[bi], M[t]
                if track:
                    U[t], U[bi] = U[bi], U[t]
            if bj != t:
                for row in M:
                    row[t], row[bj] = row[bj], row[t]
                if track:
                    for row in V:
                        row[t], row[bj] = row[bj], row[t]
            pivot = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = M[i][t]
                if x:
                    q = _near_quo(x, pivot)
                    if q:
                        Mi, Mt = M[i], M[t]
                        for j in range(t, n):
                            Mi[j] -= q * Mt[j]
                        if track:
                            Ui, Ut = U[i], U[t]
                            for j in range(m):
                                Ui[j] -= q * Ut[j]
                    if M[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                x = M[t][j]
                if x:
                    q = _near_quo(x, pivot)
                    if q:
                        for row in M:
                            row[j] -= q * row[t]
                        if track:
                            for row in V:
                                row[j] -= q * row[t]
                    if M[t][j]:
                        dirty = True
            if not dirty:
                return True

    def diagonalize(start):
        t = start
        while t < limit:
            if not clean(t):
                break
            t += 1
        for i in range(t):
            if M[i][i] < 0:
                M[i] = [-x for x in M[i]]
                if track:
                    U[i] = [-x for x in U[i]]
        return t

    r = diagonalize(0)
    while True:
        bad = next((i for i in range(r - 1) if M[i + 1][i + 1] % M[i][i]), None)
        if bad is None:
            break
        Mi, Mi1 = M[bad], M[bad + 1]
        for j in range(n):
            Mi[j] += Mi1[j]
        if track:
            Ui, Ui1 = U[bad], U[bad + 1]
            for j in range(m):
                Ui[j] += Ui1[j]
        r = diagonalize(bad)
    return [M[i][i] for i in range(r)], U, V


def smith_normal_form(a: ExactMatrix) -> SmithDecomposition:
    """Smith normal form with both unimodular transforms.

    Deterministic: the pivot is always the nonzero entry of minimal
    absolute value, ties broken by lowest row then column index.
    """
    if a.ring is not Ring.INTEGERS:
        raise WrongRing("Smith normal form requires integer entries")
    diag, U, V = _smith(a.data, a.rows, a.cols, track=True)
    S = ExactMatrix.zeros(Ring.INTEGERS, a.rows, a.cols)
    for i, d in enumerate(diag):
        S.data[i][i] = d
    return SmithDecomposition(
        s=S,
        u=ExactMatrix(Ring.INTEGERS, U, cols=a.rows),
        v=ExactMatrix(Ring.INTEGERS, V, cols=a.cols),
        shape=(a.rows, a.cols),
    )


def smith_diagonal(a: ExactMatrix) -> list[int]:
    """Just the nonzero Smith diagonal, skipping the transform bookkeeping."""
    if a.ring is not Ring.INTEGERS:
        raise WrongRing("Smith normal form requires integer entries")
    diag, _, _ = _smith(a.data, a.rows, a.cols, track=False)
    return diag


def unimodular_inverse(u: ExactMatrix) -> ExactMatrix:
    """Inverse of a unimodular integer matrix (via its Hermite reduction)."""
    h, w = hermite_normal_form(u)
    if h != ExactMatrix.identity(Ring.INTEGERS, u.rows):
        raise ValueError("matrix is not unimodular")
    return w


def quotient_group(kernel: ExactMatrix, image_in_kernel_coords: ExactMatrix) -> FgAbelianGroup:
    """The group (span of kernel basis) / (span of image columns).

    The image matrix holds coordinate vectors with respect to the kernel
    basis, so the quotient is the cokernel of that matrix on Z^k (or Q^k):
    free rank k - rank(S) plus torsion from the Smith diagonal entries
    greater than 1.  Over the rationals the torsion is empty.
    """
    k = kernel.cols
    img = image_in_kernel_coords
    if img.rows != k:
        raise ValueError("image coordinates do not match the kernel dimension")
    if kernel.ring.is_field:
        return FgAbelianGroup.free(k - rank(img))
    return FgAbelianGroup.from_diagonal(smith_diagonal(img), k)
