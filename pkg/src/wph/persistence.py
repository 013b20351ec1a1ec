"""Persistent weighted path homology: filtrations, morphism sequences,
persistence modules, and barcodes over the rationals.

A filtration is a monotone sequence of weighted digraphs whose weights
are restrictions of one global weight function; more generally any
sequence of weighted digraphs connected by weight-preserving morphisms
gives a persistence module of homology groups and induced maps.  Over
the rationals that module decomposes into intervals, computed here from
the rank function of the composite maps; over the integers the report
keeps the groups and the connecting matrices (torsion carries genuine
weight information, and no interval decomposition exists in general).

Step indices are 1-based; a class alive at the last step dies at
infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .abgroup import FgAbelianGroup
from .digraph import DigraphMorphism, WeightedDigraph, Violation, validate_digraph, validate_morphism
from .errors import CertificateFailure, ParseError, ValidationError, WrongRing
from .homology import HomologyReport, InducedMap, homology, induced_map
from .linalg import ExactMatrix, rank
from .rings import Ring, format_scalar, parse_scalar


@dataclass(frozen=True)
class Filtration:
    """Monotone steps with weights induced from one global weight map."""

    steps: tuple[WeightedDigraph, ...]
    global_weights: dict[str, Fraction]

    def __init__(self, steps, global_weights):
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(
            self, "global_weights", {k: Fraction(v) for k, v in dict(global_weights).items()}
        )

    def __len__(self) -> int:
        return len(self.steps)

    def as_morphism_sequence(self) -> "MorphismSequence":
        maps = [
            DigraphMorphism.inclusion(self.steps[n], self.steps[n + 1])
            for n in range(len(self.steps) - 1)
        ]
        return MorphismSequence(self.steps, maps)


@dataclass(frozen=True)
class MorphismSequence:
    """Weighted digraphs connected by weight-preserving morphisms."""

    steps: tuple[WeightedDigraph, ...]
    maps: tuple[DigraphMorphism, ...]

    def __init__(self, steps, maps):
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(self, "maps", tuple(maps))

    def __len__(self) -> int:
        return len(self.steps)


def validate_filtration(filt: Filtration, ring: Ring) -> list[Violation]:
    out = []
    if not filt.steps:
        out.append(Violation("filtration", "no steps"))
        return out
    for n, step in enumerate(filt.steps, start=1):
        for v in validate_digraph(step, ring):
            out.append(Violation(f"step {n}", str(v)))
        for v in step.vertices:
            gw = filt.global_weights.get(v)
            if gw is None:
                out.append(Violation(f"step {n}", f"vertex {v} has no global weight"))
            elif step.weights[v] != gw:
                out.append(
                    Violation(f"step {n}", f"weight of {v} differs from the global weight")
                )
    for n in range(len(filt.steps) - 1):
        a, b = filt.steps[n], filt.steps[n + 1]
        if not a.vertex_set <= b.vertex_set:
            missing = sorted(a.vertex_set - b.vertex_set)
            out.append(Violation(f"step {n + 1}", f"vertices {missing} disappear at step {n + 2}"))
        if not a.edges <= b.edges:
            missing = sorted(a.edges - b.edges)
            out.append(Violation(f"step {n + 1}", f"edges {missing} disappear at step {n + 2}"))
    return out


def validate_sequence(seq: MorphismSequence, ring: Ring) -> list[Violation]:
    out = []
    if not seq.steps:
        out.append(Violation("sequence", "no steps"))
        return out
    if len(seq.maps) != len(seq.steps) - 1:
        out.append(Violation("sequence", "expected one map per consecutive pair of steps"))
        return out
    for n, step in enumerate(seq.steps, start=1):
        for v in validate_digraph(step, ring):
            out.append(Violation(f"step {n}", str(v)))
    for n, f in enumerate(seq.maps, start=1):
        if f.source != seq.steps[n - 1] or f.target != seq.steps[n]:
            out.append(Violation(f"map {n}", "endpoints do not match the steps"))
            continue
        for v in validate_morphism(f):
            out.append(Violation(f"map {n}", str(v)))
    return out


def _as_sequence(seq) -> MorphismSequence:
    return seq.as_morphism_sequence() if isinstance(seq, Filtration) else seq


def _require_valid_sequence(seq, ring) -> MorphismSequence:
    if isinstance(seq, Filtration):
        violations = validate_filtration(seq, ring)
    else:
        violations = validate_sequence(seq, ring)
    if violations:
        raise ValidationError(violations)
    return _as_sequence(seq)


# ---------------------------------------------------------------------------
# filtration files (.wfl): a digraph annotated with birth steps
#   v <id> <weight> <birth-step>
#   e <src> <dst> <birth-step>
# An edge cannot be born before either endpoint.


def parse_filtration(text: str) -> Filtration:
    births_v: dict[str, int] = {}
    weights: dict[str, Fraction] = {}
    vertex_order: list[str] = []
    births_e: dict[tuple[str, str], int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "v" and len(parts) == 4:
            _, vid, wtok, btok = parts
            if vid in weights:
                raise ParseError(line_no, f"duplicate vertex {vid}")
            try:
                weights[vid] = parse_scalar(wtok)
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from None
            if not btok.isdigit() or int(btok) < 1:
                raise ParseError(line_no, f"birth step must be a positive integer, got {btok!r}")
            births_v[vid] = int(btok)
            vertex_order.append(vid)
        elif parts[0] == "e" and len(parts) == 4:
            _, u, v, btok = parts
            for end in (u, v):
                if end not in weights:
                    raise ParseError(line_no, f"edge endpoint {end} not declared yet")
            if not btok.isdigit() or int(btok) < 1:
                raise ParseError(line_no, f"birth step must be a positive integer, got {btok!r}")
            birth = int(btok)
            if birth < max(births_v[u], births_v[v]):
                raise ParseError(
                    line_no, f"edge ({u},{v}) born at {birth} before an endpoint"
                )
            births_e[(u, v)] = birth
        else:
            raise ParseError(line_no, f"expected 'v <id> <w> <birth>' or 'e <u> <v> <birth>'")
    if not births_v:
        raise ParseError(0, "empty filtration file")
    last = max(list(births_v.values()) + list(births_e.values()))
    steps = []
    for n in range(1, last + 1):
        vs = [v for v in vertex_order if births_v[v] <= n]
        es = {e for e, b in births_e.items() if b <= n}
        steps.append(WeightedDigraph(vs, es, {v: weights[v] for v in vs}))
    return Filtration(steps, weights)


# ---------------------------------------------------------------------------
# persistence modules


class PersistenceModuleReport:
    """Per-step homology plus the connecting induced maps."""

    def __init__(self, ring, p_max, steps, reports, maps):
        self.ring: Ring = ring
        self.p_max = p_max
        self.steps: tuple[WeightedDigraph, ...] = tuple(steps)
        self.reports: tuple[HomologyReport, ...] = tuple(reports)
        self.maps: tuple[InducedMap, ...] = tuple(maps)

    def __len__(self) -> int:
        return len(self.steps)

    def groups(self, p: int) -> list[FgAbelianGroup]:
        return [r.group(p) for r in self.reports]

    def map_matrices(self, p: int) -> list[ExactMatrix]:
        return [m.matrix(p) for m in self.maps]

    def to_json(self) -> dict:
        return {
            "ring": self.ring.value,
            "p_max": self.p_max,
            "steps": len(self.steps),
            "degrees": [
                {
                    "degree": p,
                    "groups": [g.to_json() for g in self.groups(p)],
                    "maps": [
                        [[format_scalar(x) for x in row] for row in m.data]
                        for m in self.map_matrices(p)
                    ],
                }
                for p in range(0, self.p_max + 1)
            ],
        }


def persistence_module(seq, ring: Ring, p_max: int) -> PersistenceModuleReport:
    """Homology groups at every step plus induced-map matrices between
    consecutive steps, in the canonical generator bases."""
    mor_seq = _require_valid_sequence(seq, ring)
    reports = [homology(step, ring, p_max) for step in mor_seq.steps]
    maps = [
        induced_map(
            mor_seq.maps[n],
            ring,
            p_max,
            source_report=reports[n],
            target_report=reports[n + 1],
        )
        for n in range(len(mor_seq.maps))
    ]
    return PersistenceModuleReport(ring, p_max, mor_seq.steps, reports, maps)


# ---------------------------------------------------------------------------
# barcodes over the rationals


@dataclass(frozen=True)
class Bar:
    birth: int
    death: int | None  # None encodes infinity
    mult: int

    def render(self) -> str:
        end = "inf" if self.death is None else str(self.death)
        return f"[{self.birth}, {end}) x{self.mult}"


class Barcode:
    def __init__(self, p_max: int, bars: dict[int, tuple[Bar, ...]], bettis: dict[int, list[int]]):
        self.p_max = p_max
        self.bars = bars
        self._bettis = bettis

    def degree(self, p: int) -> tuple[Bar, ...]:
        return self.bars.get(p, ())

    def as_multiset(self, p: int) -> set[tuple[int, object, int]]:
        return {(b.birth, b.death, b.mult) for b in self.degree(p)}

    def betti_consistent(self) -> bool:
        """Each step's Betti number equals the number of bars covering it."""
        for p, bettis in self._bettis.items():
            for n, betti in enumerate(bettis, start=1):
                covered = sum(
                    b.mult
                    for b in self.degree(p)
                    if b.birth <= n and (b.death is None or n < b.death)
                )
                if covered != betti:
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "ring": "q",
            "degrees": [
                {
                    "degree": p,
                    "bars": [
                        {
                            "birth": b.birth,
                            "death": "inf" if b.death is None else b.death,
                            "mult": b.mult,
                        }
                        for b in self.degree(p)
                    ],
                }
                for p in range(0, self.p_max + 1)
            ],
        }

    def render_text(self) -> str:
        lines = []
        for p in range(0, self.p_max + 1):
            for b in self.degree(p):
                lines.append(f"p={p}  {b.render()}")
        return "\n".join(lines) + "\n" if lines else "(empty barcode)\n"


def barcode(seq, p_max: int, ring: Ring = Ring.RATIONALS) -> Barcode:
    """Interval decomposition of the rational persistence module.

    Multiplicities come from the rank function of composite connecting
    maps: a bar [i, j) counts classes alive from step i up to but not
    including step j.  Requires the rationals; torsion has no barcode.
    """
    if ring is not Ring.RATIONALS:
        raise WrongRing("barcodes require field coefficients")
    module = persistence_module(seq, Ring.RATIONALS, p_max)
    n_steps = len(module)
    bars: dict[int, tuple[Bar, ...]] = {}
    bettis: dict[int, list[int]] = {}
    for p in range(0, p_max + 1):
        betti = [r.betti(p) for r in module.reports]
        bettis[p] = betti
        mats = module.map_matrices(p)
        # r[i][j] = rank of the composite H_p(step i) -> H_p(step j), 1-based
        r: dict[tuple[int, int], int] = {}
        for i in range(1, n_steps + 1):
            r[(i, i)] = betti[i - 1]
            acc = None
            for j in range(i + 1, n_steps + 1):
                step_mat = mats[j - 2]
                acc = step_mat if acc is None else step_mat @ acc
                r[(i, j)] = rank(acc)

        def rk(i, j):
            return 0 if i == 0 else r[(i, j)]

        out = []
        for i in range(1, n_steps + 1):
            for j in range(i + 1, n_steps + 1):
                mult = (rk(i, j - 1) - rk(i, j)) - (rk(i - 1, j - 1) - rk(i - 1, j))
                if mult < 0:
                    raise CertificateFailure("negative interval multiplicity")
                if mult:
                    out.append(Bar(i, j, mult))
            mult_inf = rk(i, n_steps) - rk(i - 1, n_steps)
            if mult_inf < 0:
                raise CertificateFailure("negative interval multiplicity at infinity")
            if mult_inf:
                out.append(Bar(i, None, mult_inf))
        bars[p] = tuple(out)
    code = Barcode(p_max, bars, bettis)
    if not code.betti_consistent():
        raise CertificateFailure("barcode does not reproduce the Betti numbers")
    return code


# ---------------------------------------------------------------------------
# weight sensitivity over the integers


@dataclass(frozen=True)
class WeightSensitivityEntry:
    degree: int
    step: int
    group: FgAbelianGroup
    group_alt: FgAbelianGroup

    @property
    def flagged(self) -> bool:
        return self.group != self.group_alt


class WeightSensitivityReport:
    def __init__(self, entries, base_module, alt_module):
        self.entries: tuple[WeightSensitivityEntry, ...] = tuple(entries)
        self.base_module = base_module
        self.alt_module = alt_module

    @property
    def flags(self) -> tuple[WeightSensitivityEntry, ...]:
        return tuple(e for e in self.entries if e.flagged)

    def free_ranks_agree(self) -> bool:
        return all(e.group.free_rank == e.group_alt.free_rank for e in self.entries)

    def to_json(self) -> dict:
        return {
            "flags": [
                {
                    "degree": e.degree,
                    "step": e.step,
                    "group": e.group.to_json(),
                    "group_alt": e.group_alt.to_json(),
                }
                for e in self.flags
            ],
            "entries": len(self.entries),
        }


def _reweight(seq, alt_weights: dict):
    alt = {k: Fraction(v) for k, v in alt_weights.items()}
    if isinstance(seq, Filtration):
        steps = [
            WeightedDigraph(s.vertices, s.edges, {v: alt[v] for v in s.vertices})
            for s in seq.steps
        ]
        return Filtration(steps, alt)
    steps = [
        WeightedDigraph(s.vertices, s.edges, {v: alt[v] for v in s.vertices}) for s in seq.steps
    ]
    maps = [
        DigraphMorphism(steps[n], steps[n + 1], m.vertex_map) for n, m in enumerate(seq.maps)
    ]
    return MorphismSequence(steps, maps)


def weight_sensitivity_report(seq, alt_global_weights: dict, p_max: int) -> WeightSensitivityReport:
    """Integral persistence under two weightings, side by side.

    Differences can occur only in torsion: the free ranks are rational
    data and do not see the weights.  Every vertex appearing in the
    sequence needs an alternative weight; a reweighting that breaks a
    morphism's weight preservation is a validation error.
    """
    base = persistence_module(seq, Ring.INTEGERS, p_max)
    alt = persistence_module(_reweight(seq, alt_global_weights), Ring.INTEGERS, p_max)
    entries = []
    for p in range(0, p_max + 1):
        for n, (g0, g1) in enumerate(zip(base.groups(p), alt.groups(p)), start=1):
            entries.append(WeightSensitivityEntry(p, n, g0, g1))
    return WeightSensitivityReport(entries, base, alt)
