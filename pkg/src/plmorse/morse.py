"""Complexity measures and the shallow-network Morse classification.

Local H-complexity of a flat component K at level a is the relative homology
H_*(F<=a, F<=a minus K), computed on a compact strip model just below a via
excision and a barycentric complement.  Global complexity sums the local
totals; stable and coarse complexities look only at levels beyond every
nontransversal threshold.  For single-hidden-layer (depth-2) generic
transversal networks, vertices classify as regular, nondegenerate critical
with an index, or degenerate critical from the gradient orientations of
their paired edge cofaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .compact import (
    modeled_pair,
    strip_pair_model,
    sublevel_model,
    superlevel_model,
)
from .complexes import (
    CanonicalComplex,
    FlatComponent,
    Label,
    build_complex,
    is_generic,
)
from .geometry import Vec, dot, primitive_direction
from .homology import (
    SimplicialPair,
    barycentric_pair,
    betti,
    carried_simplices,
    complement_complex,
    relative_betti,
    triangulate,
)
from .network import Network

REGULAR = "Regular"
NONDEGENERATE = "NondegenerateCritical"
DEGENERATE = "DegenerateCritical"


class UnsupportedNetworkError(ValueError):
    """The requested analysis is defined only for a class this net is not in."""


@dataclass(frozen=True)
class LocalComplexityRecord:
    level: Fraction
    labels: tuple[Label, ...]
    ranks: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.ranks)

    @property
    def h_critical(self) -> bool:
        return self.total > 0


@dataclass(frozen=True)
class VertexClass:
    point: Vec
    kind: str
    index: int | None = None


@dataclass(frozen=True)
class StableComplexities:
    m: Fraction
    sub_minus: tuple[int, ...]
    sub_plus: tuple[int, ...]
    super_minus: tuple[int, ...]
    super_plus: tuple[int, ...]


@dataclass(frozen=True)
class CoarseComplexities:
    sublevel: tuple[int, ...]
    superlevel: tuple[int, ...]

    @property
    def sublevel_total(self) -> int:
        return sum(self.sublevel)

    @property
    def superlevel_total(self) -> int:
        return sum(self.superlevel)


@dataclass(frozen=True)
class ComplexityReport:
    thresholds: tuple[Fraction, ...]
    components: tuple[LocalComplexityRecord, ...]
    global_h_complexity: int
    stable: StableComplexities
    coarse: CoarseComplexities
    counts: tuple[int, int, int, int]
    vertices: tuple[VertexClass, ...] | None
    flags: dict


def big_m(cx: CanonicalComplex) -> Fraction:
    """Level beyond every nontransversal threshold by at least 1."""
    return max((abs(t) for t in cx.nontransversal_thresholds), default=Fraction(0)) + 1


def strip_epsilon(cx: CanonicalComplex, a) -> Fraction:
    """Half the gap down to the next smaller threshold, or 1 if none."""
    a = Fraction(a)
    smaller = [t for t in cx.nontransversal_thresholds if t < a]
    if smaller:
        return (a - max(smaller)) / 2
    return Fraction(1)


def _strip_records(cx: CanonicalComplex, a: Fraction) -> list[LocalComplexityRecord]:
    sm = strip_pair_model(cx, a, a - strip_epsilon(cx, a))
    tri = triangulate(sm.model)
    out = []
    for comp, ids in sm.k_cells:
        sd, sd_k = barycentric_pair(tri.complex, carried_simplices(tri, ids))
        away = complement_complex(sd, sd_k)
        ranks = relative_betti(SimplicialPair(sd, away))
        out.append(LocalComplexityRecord(a, comp.labels, ranks))
    return out


def local_h_complexity(cx: CanonicalComplex, comp: FlatComponent) -> LocalComplexityRecord:
    """Per-degree ranks of H_*(F<=a, F<=a minus K) for the flat component K."""
    for rec in _strip_records(cx, Fraction(comp.level)):
        if rec.labels == comp.labels:
            return rec
    raise ValueError(f"no flat component {comp.labels} at level {comp.level}")


def local_records(cx: CanonicalComplex) -> tuple[LocalComplexityRecord, ...]:
    """One record per flat component, sharing one strip model per threshold."""
    out = []
    for a in cx.nontransversal_thresholds:
        out.extend(_strip_records(cx, a))
    return tuple(out)


def global_h_complexity(cx: CanonicalComplex) -> int:
    return sum(rec.total for rec in local_records(cx))


def _stable_models(cx: CanonicalComplex):
    m = big_m(cx)
    return m, (
        sublevel_model(cx, -m),
        sublevel_model(cx, m),
        superlevel_model(cx, -m),
        superlevel_model(cx, m),
    )


def stable_complexities(cx: CanonicalComplex) -> StableComplexities:
    """Betti vectors of F<=-M, F<=M, F>=-M, F>=M."""
    m, models = _stable_models(cx)
    vecs = tuple(betti(triangulate(md).complex) for md in models)
    return StableComplexities(m, *vecs)


def component_counts(cx: CanonicalComplex) -> tuple[int, int, int, int]:
    """Connected components of the four stable models, by shared vertices."""
    _, models = _stable_models(cx)
    return tuple(len(md.components()) for md in models)


def _pair_ranks(cx: CanonicalComplex, levels, outer, inner) -> tuple[int, ...]:
    model, ids = modeled_pair(cx, levels, outer, inner)
    tri = triangulate(model)
    return relative_betti(SimplicialPair(tri.complex, carried_simplices(tri, ids)))


def coarse_complexities(cx: CanonicalComplex) -> CoarseComplexities:
    """Ranks of H_*(F<=M, F<=-M) and H_*(F>=-M, F>=M)."""
    m = big_m(cx)
    mp = m + 1
    sub = _pair_ranks(cx, [-mp, -m, m], (-mp, m), (-mp, -m))
    sup = _pair_ranks(cx, [-m, m, mp], (-m, mp), (m, mp))
    return CoarseComplexities(sub, sup)


# ---------------------------------------------------------------------------
# vertex classification for single-hidden-layer networks


def _away_direction(geometry, p: Vec) -> Vec:
    verts = geometry.vertices
    if len(verts) == 2:
        other = verts[1] if verts[0] == p else verts[0]
        return primitive_direction(tuple(b - a for a, b in zip(p, other)))
    return geometry.rays[0]


def _classify_zero_cell(cx: CanonicalComplex, label: Label) -> VertexClass:
    cell = cx.cells[label]
    p = cell.geometry.affine_hull_point
    n = cx.network.n0
    if sum(1 for s in label if s == 0) != n:
        raise UnsupportedNetworkError(
            f"vertex {p} lies on more than {n} hyperplanes; the network is not generic"
        )
    pairs: dict[frozenset, list[Label]] = {}
    for lab in cx.cofaces_of(label, 1):
        pairs.setdefault(frozenset(i for i, s in enumerate(lab) if s == 0), []).append(lab)
    if len(pairs) != n or any(len(g) != 2 for g in pairs.values()):
        raise UnsupportedNetworkError(
            f"vertex {p} has an unpaired edge coface; the network is not generic"
        )
    toward = 0
    for group in pairs.values():
        signs = []
        for lab in group:
            e = cx.cells[lab]
            if e.flat:
                return VertexClass(p, DEGENERATE)
            d = _away_direction(e.geometry, p)
            signs.append(1 if dot(e.gradient, d) > 0 else -1)
        if signs[0] != signs[1]:
            return VertexClass(p, REGULAR)
        if signs[0] < 0:
            toward += 1
    return VertexClass(p, NONDEGENERATE, toward)


def _require_shallow_generic(cx: CanonicalComplex) -> None:
    net = cx.network
    if net.depth != 1:
        raise UnsupportedNetworkError(
            "vertex classification needs a single hidden layer"
        )
    if cx.transversality_witnesses:
        raise UnsupportedNetworkError(
            f"network is not transversal: {cx.transversality_witnesses[0]}"
        )
    ok = is_generic(net)
    if not ok:
        raise UnsupportedNetworkError(f"network is not generic: {ok.witness}")


def classify_vertex(cx: CanonicalComplex, point) -> VertexClass:
    """Regular / nondegenerate-critical(index) / degenerate-critical at a 0-cell."""
    _require_shallow_generic(cx)
    p = tuple(Fraction(x) for x in point)
    for cell in cx.cells_of_dim(0):
        if cell.geometry.affine_hull_point == p:
            return _classify_zero_cell(cx, cell.label)
    raise ValueError(f"{p} is not a 0-cell of the complex")


def classify_vertices(cx: CanonicalComplex) -> tuple[VertexClass, ...]:
    """All 0-cells classified, sorted by coordinates."""
    _require_shallow_generic(cx)
    out = [_classify_zero_cell(cx, c.label) for c in cx.cells_of_dim(0)]
    return tuple(sorted(out, key=lambda v: v.point))


def is_pl_morse_depth2(net: Network) -> bool:
    """No region where every hidden unit is strictly inactive (Morse test)."""
    if net.depth != 1:
        raise UnsupportedNetworkError("PL Morse test needs a single hidden layer")
    ok = is_generic(net)
    if not ok:
        raise UnsupportedNetworkError(f"network is not generic: {ok.witness}")
    from .geometry import strict_feasible

    layer = net.layers[0]
    ineqs = [
        (tuple(-w for w in row), -b) for row, b in zip(layer.weights, layer.bias)
    ]
    return not strict_feasible(net.n0, ineqs)


# ---------------------------------------------------------------------------
# full report


def analyze(net: Network) -> ComplexityReport:
    """Every complexity measure of the network in one report.

    Raises UnsupportedNetworkError when the network is not transversal; vertex
    classifications are included only for generic single-hidden-layer nets.
    """
    cx = build_complex(net)
    if cx.transversality_witnesses:
        raise UnsupportedNetworkError(
            f"network is not transversal: {cx.transversality_witnesses[0]}"
        )
    records = local_records(cx)
    glob = sum(rec.total for rec in records)
    m, models = _stable_models(cx)
    vecs = tuple(betti(triangulate(md).complex) for md in models)
    stable = StableComplexities(m, *vecs)
    counts = tuple(len(md.components()) for md in models)
    coarse = coarse_complexities(cx)
    vertices: tuple[VertexClass, ...] | None
    try:
        vertices = classify_vertices(cx)
    except UnsupportedNetworkError:
        vertices = None
    flags = {
        "coarse_le_global": coarse.sublevel_total <= glob
        and coarse.superlevel_total <= glob,
        "global_le_vertex_count": glob <= len(cx.cells_of_dim(0)),
    }
    return ComplexityReport(
        thresholds=cx.nontransversal_thresholds,
        components=records,
        global_h_complexity=glob,
        stable=stable,
        coarse=coarse,
        counts=counts,
        vertices=vertices,
        flags=flags,
    )


def _fr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def report_to_json(report: ComplexityReport) -> dict:
    """JSON-ready dict with the stable field names."""
    vertices = None
    if report.vertices is not None:
        vertices = []
        for v in report.vertices:
            entry = {"point": [_fr(x) for x in v.point], "class": v.kind}
            if v.index is not None:
                entry["index"] = v.index
            vertices.append(entry)
    return {
        "thresholds": [_fr(t) for t in report.thresholds],
        "components": [
            {
                "level": _fr(rec.level),
                "cells": [list(lab) for lab in rec.labels],
                "ranks": list(rec.ranks),
                "total": rec.total,
                "h_critical": rec.h_critical,
            }
            for rec in report.components
        ],
        "global_h_complexity": report.global_h_complexity,
        "stable": {
            "M": _fr(report.stable.m),
            "sub_minus": list(report.stable.sub_minus),
            "sub_plus": list(report.stable.sub_plus),
            "super_minus": list(report.stable.super_minus),
            "super_plus": list(report.stable.super_plus),
        },
        "coarse": {
            "sublevel": list(report.coarse.sublevel),
            "superlevel": list(report.coarse.superlevel),
        },
        "counts": {
            "n_minus": report.counts[0],
            "n_plus": report.counts[1],
            "n_super_minus": report.counts[2],
            "n_super_plus": report.counts[3],
        },
        "vertices": vertices,
        "flags": dict(report.flags),
    }


_FRACTION = {"type": "string", "pattern": "^-?[0-9]+/[0-9]+$"}
_RANKS = {"type": "array", "items": {"type": "integer", "minimum": 0}}

REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "thresholds",
        "components",
        "global_h_complexity",
        "stable",
        "coarse",
        "counts",
        "vertices",
        "flags",
    ],
    "properties": {
        "thresholds": {"type": "array", "items": _FRACTION},
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["level", "cells", "ranks", "total", "h_critical"],
                "properties": {
                    "level": _FRACTION,
                    "cells": {
                        "type": "array",
                        "items": {"type": "array", "items": {"type": "integer"}},
                    },
                    "ranks": _RANKS,
                    "total": {"type": "integer", "minimum": 0},
                    "h_critical": {"type": "boolean"},
                },
            },
        },
        "global_h_complexity": {"type": "integer", "minimum": 0},
        "stable": {
            "type": "object",
            "required": ["M", "sub_minus", "sub_plus", "super_minus", "super_plus"],
            "properties": {
                "M": _FRACTION,
                "sub_minus": _RANKS,
                "sub_plus": _RANKS,
                "super_minus": _RANKS,
                "super_plus": _RANKS,
            },
        },
        "coarse": {
            "type": "object",
            "required": ["sublevel", "superlevel"],
            "properties": {"sublevel": _RANKS, "superlevel": _RANKS},
        },
        "counts": {
            "type": "object",
            "required": ["n_minus", "n_plus", "n_super_minus", "n_super_plus"],
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "vertices": {
            "type": ["array", "null"],
            "items": {
                "type": "object",
                "required": ["point", "class"],
                "properties": {
                    "point": {"type": "array", "items": _FRACTION},
                    "class": {"enum": [REGULAR, NONDEGENERATE, DEGENERATE]},
                    "index": {"type": "integer", "minimum": 0},
                },
            },
        },
        "flags": {
            "type": "object",
            "required": ["coarse_le_global", "global_le_vertex_count"],
            "additionalProperties": {"type": "boolean"},
        },
    },
}
