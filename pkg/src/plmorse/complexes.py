"""Polyhedral complex of a ReLU network, with ternary labels and orientations.

The input space is carved into cells on which every hidden neuron has a fixed
sign; cells are keyed by that ternary label (one entry per hidden neuron, in
layer order).  Construction is layer by layer: each cell of the partial
complex is split by the zero set of every next-layer pre-activation, which is
affine on the cell.  A cell's closed geometry and its relative interior are
both cut out by the same constraint list (weak vs strict), so no implicit
equality detection is ever needed here.

Also provides the network-level sanity predicates (genericity of each layer's
solution-set arrangement, transversality of node maps at level zero), flat
cell detection with per-level connected components, gradient orientation of
the 1-skeleton, and cell counts by dimension and boundedness.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb

from .geometry import (
    Polyhedron,
    Vec,
    canon_constraint,
    canonical_line_direction,
    dot,
    feasible,
    form_value,
    in_span,
    primitive_direction,
    rank,
    solve_linear,
    vec,
)
from .network import Network

Label = tuple[int, ...]


@dataclass(frozen=True)
class LabeledCell:
    label: Label
    geometry: Polyhedron
    gradient: Vec
    constant: Fraction
    flat: bool
    dimension: int

    def value_on_cell(self) -> Fraction:
        """F on the cell, defined when flat (F is then constant there)."""
        assert self.flat, "value_on_cell on a nonflat cell"
        p = self.geometry.affine_hull_point
        return dot(self.gradient, p) + self.constant

    def form_at(self, point) -> Fraction:
        return dot(self.gradient, point) + self.constant


@dataclass(frozen=True)
class Check:
    """Outcome of a yes/no network test, with a witness when it fails."""

    ok: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class FlatComponent:
    level: Fraction
    labels: tuple[Label, ...]


class CanonicalComplex:
    """All labeled cells of a network, with face poset and 1-skeleton data."""

    def __init__(self, net: Network, cells: dict[Label, LabeledCell], witnesses):
        self.network = net
        self.cells = cells
        self.transversality_witnesses = tuple(witnesses)

    def __repr__(self):
        return f"CanonicalComplex({len(self.cells)} cells, n0={self.network.n0})"

    def cells_of_dim(self, d: int) -> list[LabeledCell]:
        return [c for c in self.cells.values() if c.dimension == d]

    @cached_property
    def face_pairs(self) -> set[tuple[Label, Label]]:
        """(sub, super) for every strict face relation sub < super."""
        by_dim: dict[int, list[LabeledCell]] = {}
        for c in self.cells.values():
            by_dim.setdefault(c.dimension, []).append(c)
        deep = self.network.depth > 1
        pairs = set()
        for sub in self.cells.values():
            for d in range(sub.dimension + 1, max(by_dim) + 1):
                for sup in by_dim.get(d, ()):
                    if not _label_refines(sub.label, sup.label):
                        continue
                    if deep and not _contained(sub.geometry, sup.geometry):
                        continue
                    pairs.add((sub.label, sup.label))
        return pairs

    @cached_property
    def _cofaces(self) -> dict[Label, list[Label]]:
        out: dict[Label, list[Label]] = {lab: [] for lab in self.cells}
        for sub, sup in self.face_pairs:
            out[sub].append(sup)
        return out

    def faces_of(self, label: Label) -> list[Label]:
        return [sub for sub, sup in self.face_pairs if sup == label]

    def cofaces_of(self, label: Label, codim: int | None = None) -> list[Label]:
        out = self._cofaces[label]
        if codim is None:
            return list(out)
        want = self.cells[label].dimension + codim
        return [lab for lab in out if self.cells[lab].dimension == want]

    @cached_property
    def flat_labels(self) -> tuple[Label, ...]:
        return tuple(lab for lab, c in self.cells.items() if c.flat)

    @cached_property
    def nontransversal_thresholds(self) -> tuple[Fraction, ...]:
        return tuple(sorted({self.cells[lab].value_on_cell() for lab in self.flat_labels}))

    @cached_property
    def oriented_one_skeleton(self) -> dict[Label, str]:
        return {
            c.label: edge_orientation(self, c.label) for c in self.cells_of_dim(1)
        }


def _label_refines(sub: Label, sup: Label) -> bool:
    return all(a == b or a == 0 for a, b in zip(sub, sup))


def _contained(inner: Polyhedron, outer: Polyhedron) -> bool:
    """Exact containment of polyhedra (inner nonempty)."""
    eqs, stricts = inner.relint_system
    for coef, off in outer.ges:
        if feasible(inner.n, eqs=eqs, gts=list(stricts) + [(tuple(-x for x in coef), -off)]):
            return False
    for coef, off in outer.eqs:
        for flip in (1, -1):
            probe = (tuple(flip * -x for x in coef), flip * -off)
            if feasible(inner.n, eqs=eqs, gts=list(stricts) + [probe]):
                return False
    return True


# ---------------------------------------------------------------------------
# construction


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _initial_cell(n: int):
    ident = tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )
    zero = tuple(Fraction(0) for _ in range(n))
    # worklist entry: (label, eqs, ineqs, input_map_rows, input_offset)
    return ((), (), (), ident, zero)


def _node_form(wrow, b, rows, offs):
    """Affine form of one pre-activation in input coordinates, on a cell."""
    return tuple(dot(wrow, col) for col in zip(*rows)), dot(wrow, offs) + b


def _split_by_layer(work, layer, n: int):
    """Refine every cell by the zero set of each node; extend labels."""
    for wrow, b in zip(layer.weights, layer.bias):
        nxt = []
        for label, eqs, ineqs, rows, offs in work:
            g, k = _node_form(wrow, b, rows, offs)
            if all(x == 0 for x in g):
                nxt.append((label + (_sign(k),), eqs, ineqs, rows, offs))
                continue
            ge = canon_constraint(g, k)
            le = canon_constraint(tuple(-x for x in g), -k)
            eq = canon_constraint(g, k, equality=True)
            if feasible(n, eqs=eqs, gts=ineqs + (ge,)):
                nxt.append((label + (1,), eqs, ineqs + (ge,), rows, offs))
            if feasible(n, eqs=eqs + (eq,), gts=ineqs):
                nxt.append((label + (0,), eqs + (eq,), ineqs, rows, offs))
            if feasible(n, eqs=eqs, gts=ineqs + (le,)):
                nxt.append((label + (-1,), eqs, ineqs + (le,), rows, offs))
        work = nxt
    # ReLU: neurons labeled +1 pass through, the rest output zero
    zero = tuple(Fraction(0) for _ in range(n))
    post = []
    width = layer.out_dim
    for label, eqs, ineqs, rows, offs in work:
        block = label[-width:]
        new_rows, new_offs = [], []
        for s, wrow, b in zip(block, layer.weights, layer.bias):
            if s > 0:
                g, k = _node_form(wrow, b, rows, offs)
                new_rows.append(g)
                new_offs.append(k)
            else:
                new_rows.append(zero)
                new_offs.append(Fraction(0))
        post.append((label, eqs, ineqs, tuple(new_rows), tuple(new_offs)))
    return post


def build_complex(net: Network) -> CanonicalComplex:
    """Subdivide input space layer by layer into sign-labeled cells."""
    n = net.n0
    work = [_initial_cell(n)]
    witnesses: list[str] = []
    for li, layer in enumerate(net.layers[:-1]):
        # node-map transversality against the complex built so far
        for label, eqs, ineqs, rows, offs in work:
            eq_normals = [c for c, _ in eqs]
            for ni, (wrow, b) in enumerate(zip(layer.weights, layer.bias)):
                g, k = _node_form(wrow, b, rows, offs)
                if in_span(g, eq_normals):
                    point, _ = solve_linear(eq_normals, [-o for _, o in eqs], n)
                    if point is not None and dot(g, point) + k == 0:
                        witnesses.append(
                            f"node {ni} of hidden layer {li} is identically zero "
                            f"on the cell labeled {label}"
                        )
        work = _split_by_layer(work, layer, n)

    out = net.layers[-1]
    wrow, b0 = out.weights[0], out.bias[0]
    cells: dict[Label, LabeledCell] = {}
    for label, eqs, ineqs, rows, offs in work:
        grad = tuple(dot(wrow, col) for col in zip(*rows))
        const = dot(wrow, offs) + b0
        poly = Polyhedron(n, eqs=eqs, ges=ineqs, relint=(eqs, ineqs))
        flat = in_span(grad, [c for c, _ in poly.hull_eqs])
        cells[label] = LabeledCell(label, poly, grad, const, flat, poly.dim)
    return CanonicalComplex(net, cells, witnesses)


# ---------------------------------------------------------------------------
# queries


def zero_cells(cx: CanonicalComplex) -> list[tuple[Vec, Fraction]]:
    out = []
    for c in cx.cells_of_dim(0):
        p = c.geometry.affine_hull_point
        out.append((p, c.form_at(p)))
    return sorted(out)


def flat_cells(cx: CanonicalComplex) -> list[FlatComponent]:
    """Flat subcomplex, split into connected components at each level."""
    flats = list(cx.flat_labels)
    level = {lab: cx.cells[lab].value_on_cell() for lab in flats}
    parent = {lab: lab for lab in flats}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    flat_set = set(flats)
    for sub, sup in cx.face_pairs:
        if sub in flat_set and sup in flat_set:
            parent[find(sub)] = find(sup)
    groups: dict[Label, list[Label]] = {}
    for lab in flats:
        groups.setdefault(find(lab), []).append(lab)
    comps = [
        FlatComponent(level[root], tuple(sorted(labs))) for root, labs in groups.items()
    ]
    return sorted(comps, key=lambda c: (c.level, c.labels))


def reference_direction(cell: LabeledCell) -> Vec:
    """Stored direction along which a 1-cell's orientation is measured."""
    if cell.dimension != 1:
        raise ValueError("reference_direction needs a 1-cell")
    p = cell.geometry
    if p.lineality_basis:
        return canonical_line_direction(p.lineality_basis[0])
    verts = p.vertices
    if len(verts) == 2:
        return primitive_direction(tuple(b - a for a, b in zip(verts[0], verts[1])))
    return p.rays[0]


def edge_orientation(cx: CanonicalComplex, label: Label) -> str:
    """Does F increase, decrease, or stay constant along the reference direction."""
    cell = cx.cells[label]
    if cell.dimension != 1:
        raise ValueError(f"cell {label} has dimension {cell.dimension}, not 1")
    s = _sign(dot(cell.gradient, reference_direction(cell)))
    return {1: "increasing", -1: "decreasing", 0: "flat"}[s]


def census(cx: CanonicalComplex) -> dict[tuple[int, bool], int]:
    """Cell counts keyed by (dimension, bounded)."""
    counts: Counter[tuple[int, bool]] = Counter()
    for c in cx.cells.values():
        counts[(c.dimension, c.geometry.bounded)] += 1
    return dict(counts)


def generic_line_counts(m: int) -> dict[str, int]:
    """Closed-form cell census for m generic lines in the plane."""
    return {
        "two_cells": 1 + m + comb(m, 2),
        "bounded_two_cells": comb(m - 1, 2),
        "unbounded_two_cells": 2 * m,
        "one_cells": m * m,
        "unbounded_one_cells": 2 * m,
        "zero_cells": comb(m, 2),
    }


# ---------------------------------------------------------------------------
# network-level predicates


def is_generic(net: Network) -> Check:
    """Every small subset of each layer's solution sets meets in the expected
    dimension: k <= n0 of them in an affine subspace of codimension k (never
    empty, never degenerate), n0+1 of them in the empty set.  Deeper layers
    are checked cell by cell on the partial complex."""
    n = net.n0
    first = net.layers[0]
    m1 = first.out_dim
    for size in range(1, min(m1, n + 1) + 1):
        for T in combinations(range(m1), size):
            rows = [first.weights[i] for i in T]
            rhs = [-first.bias[i] for i in T]
            point, _ = solve_linear(rows, rhs, n)
            if size <= n:
                if point is None or rank(rows) != size:
                    return Check(False, f"hidden layer 0 nodes {T}: degenerate intersection")
            elif point is not None:
                return Check(False, f"hidden layer 0 nodes {T}: common point {point}")
    if net.depth > 1:
        deep = _deep_genericity(net)
        if deep is not None:
            return deep
    return Check(True)


def _deep_genericity(net: Network) -> Check | None:
    """Per-cell solution-set checks for layers past the first."""
    n = net.n0
    partial = _partial_complexes(net)
    for li in range(1, net.depth):
        layer = net.layers[li]
        for label, eqs, ineqs, rows, offs in partial[li]:
            eq_normals = [c for c, _ in eqs]
            base = rank(eq_normals)
            forms = []
            for wrow, b in zip(layer.weights, layer.bias):
                g = tuple(dot(wrow, col) for col in zip(*rows))
                forms.append((g, dot(wrow, offs) + b))
            for size in range(1, min(layer.out_dim, n + 1) + 1):
                for T in combinations(range(layer.out_dim), size):
                    sub_eqs = tuple(
                        canon_constraint(forms[i][0], forms[i][1], equality=True)
                        for i in T
                    )
                    if not feasible(n, eqs=eqs + sub_eqs, gts=ineqs):
                        continue
                    got = rank(eq_normals + [forms[i][0] for i in T])
                    if got != base + size:
                        return Check(
                            False,
                            f"hidden layer {li} nodes {T} on cell {label}: "
                            "degenerate intersection",
                        )
    return None


def _partial_complexes(net: Network):
    """Cells (with restricted affine input maps) before each hidden layer."""
    n = net.n0
    work = [_initial_cell(n)]
    stages = [work]
    for layer in net.layers[:-2]:
        work = _split_by_layer(work, layer, n)
        stages.append(work)
    return stages


def is_transversal(net: Network) -> Check:
    """No node map is identically zero on a cell of the complex before its layer."""
    cx = build_complex(net)
    if cx.transversality_witnesses:
        return Check(False, cx.transversality_witnesses[0])
    return Check(True)


def complex_summary(cx: CanonicalComplex) -> dict:
    """Diagnostic JSON-ready dump of the complex."""
    def fr(x):
        return f"{x.numerator}/{x.denominator}"

    cells = []
    for lab in sorted(cx.cells):
        c = cx.cells[lab]
        entry = {
            "label": list(lab),
            "dimension": c.dimension,
            "flat": c.flat,
            "bounded": c.geometry.bounded,
            "gradient": [fr(g) for g in c.gradient],
            "constant": fr(c.constant),
        }
        if c.geometry.pointed:
            entry["vertices"] = [[fr(x) for x in v] for v in c.geometry.vertices]
        if c.dimension == 1:
            entry["orientation"] = cx.oriented_one_skeleton[lab]
        cells.append(entry)
    return {
        "cell_count": len(cx.cells),
        "nontransversal_thresholds": [fr(t) for t in cx.nontransversal_thresholds],
        "cells": cells,
    }
