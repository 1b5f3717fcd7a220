"""Interval refinement and compact polytopal models of level-split sets.

Sublevel, superlevel, level, and strip sets of a network are unions of cells
of the canonical complex refined along finitely many values of F.  Each such
set is modeled by a compact polytopal complex: essentialize every connected
component (project out the common lineality by intersecting with the span of
the constraint normals), then take convex hulls of vertex sets together with
all of their faces.  The model carries provenance back to the refined pieces,
so distinguished subcomplexes (flat components, strip floors) can be marked.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import (
    CanonicalComplex,
    FlatComponent,
    Label,
    _contained,
    _label_refines,
    flat_cells,
)
from .geometry import (
    Polyhedron,
    Vec,
    canon_constraint,
    dot,
    feasible,
    nullspace_basis,
    rank,
    row_space_basis,
    solve_linear,
)

Interval = tuple[Fraction | None, Fraction | None]
PieceKey = tuple[Label, Interval]


def _iv_sort(iv: Interval):
    lo, hi = iv
    return (lo is not None, lo or 0, hi is not None, hi or 0)


def piece_sort_key(key: PieceKey):
    return (key[0], _iv_sort(key[1]))


@dataclass(frozen=True)
class RefinedCell:
    source: Label
    interval: Interval
    geometry: Polyhedron
    gradient: Vec
    constant: Fraction

    @property
    def key(self) -> PieceKey:
        return (self.source, self.interval)


class RefinedComplex:
    """Cells of a canonical complex cut along level sets of F."""

    def __init__(self, cx: CanonicalComplex, thresholds, cells):
        self.source = cx
        self.thresholds = tuple(thresholds)
        self.cells: dict[PieceKey, RefinedCell] = cells

    def __repr__(self):
        return f"RefinedComplex({len(self.cells)} pieces at {self.thresholds})"

    def keys_in(self, lo, hi) -> list[PieceKey]:
        """Pieces whose F-interval sits inside [lo, hi] (None = unbounded)."""
        return sorted(
            (k for k, p in self.cells.items() if _interval_subset(p.interval, (lo, hi))),
            key=piece_sort_key,
        )

    def containment_pairs(self, keys):
        """(inner, outer) over the given keys, inner a proper subset of outer."""
        keys = list(keys)
        deep = self.source.network.depth > 1
        pairs = []
        for a in keys:
            pa = self.cells[a]
            for b in keys:
                if a == b:
                    continue
                pb = self.cells[b]
                if pa.geometry.dim >= pb.geometry.dim:
                    continue
                if not _label_refines(a[0], b[0]):
                    continue
                if not _interval_subset(a[1], b[1]):
                    continue
                if deep and a[0] != b[0] and not _contained(pa.geometry, pb.geometry):
                    continue
                pairs.append((a, b))
        return pairs

    def components(self, keys) -> list[list[PieceKey]]:
        keys = list(keys)
        parent = {k: k for k in keys}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.containment_pairs(keys):
            parent[find(a)] = find(b)
        groups: dict[PieceKey, list[PieceKey]] = {}
        for k in keys:
            groups.setdefault(find(k), []).append(k)
        return [
            sorted(g, key=piece_sort_key)
            for _, g in sorted(groups.items(), key=lambda kv: piece_sort_key(kv[0]))
        ]


def _interval_subset(inner: Interval, outer: Interval) -> bool:
    lo1, hi1 = inner
    lo2, hi2 = outer
    if lo2 is not None and (lo1 is None or lo1 < lo2):
        return False
    if hi2 is not None and (hi1 is None or hi1 > hi2):
        return False
    return True


def _scalar_in_relint(v: Fraction, iv: Interval) -> bool:
    lo, hi = iv
    if lo is not None and hi is not None and lo == hi:
        return v == lo
    if lo is not None and not v > lo:
        return False
    if hi is not None and not v < hi:
        return False
    return True


def _interval_constraints(g: Vec, k: Fraction, iv: Interval):
    """Canonical (equalities, inequalities) expressing F in the interval."""
    lo, hi = iv
    eqs, ineqs = [], []
    if lo is not None and hi is not None and lo == hi:
        eqs.append(canon_constraint(g, k - lo, equality=True))
    else:
        if lo is not None:
            ineqs.append(canon_constraint(g, k - lo))
        if hi is not None:
            ineqs.append(canon_constraint(tuple(-x for x in g), hi - k))
    return eqs, ineqs


def refine_at_levels(cx: CanonicalComplex, thresholds) -> RefinedComplex:
    """Cut every cell along F = t for each threshold t.

    A piece (C, I) is kept when the relative interior of C meets the relative
    interior of F^{-1}(I), so each point of |C| lands in exactly one piece.
    """
    ts = sorted({Fraction(t) for t in thresholds})
    intervals: list[Interval] = []
    if not ts:
        intervals = [(None, None)]
    else:
        intervals.append((None, ts[0]))
        for i, t in enumerate(ts):
            intervals.append((t, t))
            if i + 1 < len(ts):
                intervals.append((t, ts[i + 1]))
        intervals.append((ts[-1], None))

    n = cx.network.n0
    pieces: dict[PieceKey, RefinedCell] = {}
    for lab, c in cx.cells.items():
        req, rst = c.geometry.relint_system
        if c.flat:
            v = c.value_on_cell()
            for iv in intervals:
                if _scalar_in_relint(v, iv):
                    pieces[(lab, iv)] = RefinedCell(lab, iv, c.geometry, c.gradient, c.constant)
            continue
        for iv in intervals:
            eqc, inc = _interval_constraints(c.gradient, c.constant, iv)
            if not feasible(n, eqs=list(req) + eqc, gts=list(rst) + inc):
                continue
            geo = Polyhedron(
                n,
                eqs=list(c.geometry.eqs) + eqc,
                ges=list(c.geometry.ges) + inc,
                relint=(tuple(req) + tuple(eqc), tuple(rst) + tuple(inc)),
            )
            pieces[(lab, iv)] = RefinedCell(lab, iv, geo, c.gradient, c.constant)
    return RefinedComplex(cx, ts, pieces)


# ---------------------------------------------------------------------------
# essentialization


@dataclass(frozen=True)
class Essentialization:
    """Projection record: normal-span rank and the directions projected out."""

    rank: int
    kernel: tuple[Vec, ...]


def essentialize(pieces, n: int):
    """Intersect a connected group of cells with the span of their normals.

    The kernel directions are common lineality of every cell, so this is a
    homotopy equivalence onto cells whose dimension drops by n - rank; when
    the normals already span, the input is returned unchanged.
    """
    normals = []
    for p in pieces:
        normals.extend(p.geometry.all_normals)
    r = rank(normals)
    if r == n:
        return list(pieces), Essentialization(r, ())
    kernel = nullspace_basis(normals, n)
    eq_cons = [canon_constraint(d, 0, equality=True) for d in kernel]
    out = []
    for p in pieces:
        req, rst = p.geometry.relint_system
        geo = Polyhedron(
            n,
            eqs=list(p.geometry.eqs) + eq_cons,
            ges=p.geometry.ges,
            relint=(tuple(req) + tuple(eq_cons), rst),
        )
        out.append(RefinedCell(p.source, p.interval, geo, p.gradient, p.constant))
    return out, Essentialization(r, tuple(kernel))


# ---------------------------------------------------------------------------
# compact part


@dataclass(frozen=True)
class ModelCell:
    verts: frozenset[int]
    dimension: int
    gradient: Vec
    constant: Fraction
    sources: frozenset[PieceKey]


class CompactModel:
    """Compact polytopal complex: vertex hulls of cells plus all their faces."""

    def __init__(self, vertices, cells):
        self.vertices: tuple[Vec, ...] = tuple(vertices)
        self.cells: dict[frozenset[int], ModelCell] = cells

    def __repr__(self):
        return f"CompactModel({len(self.vertices)} vertices, {len(self.cells)} cells)"

    @property
    def dim(self) -> int:
        return max((c.dimension for c in self.cells.values()), default=-1)

    def cells_of_dim(self, d: int) -> list[ModelCell]:
        return [c for c in self.cells.values() if c.dimension == d]

    def cells_with_source(self, keys) -> frozenset:
        keys = frozenset(keys)
        return frozenset(cid for cid, c in self.cells.items() if c.sources & keys)

    def components(self) -> list[frozenset]:
        """Connected components, as sets of cell ids, via shared vertices."""
        ids = sorted(self.cells, key=sorted)
        parent = {cid: cid for cid in ids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        by_vert: dict[int, frozenset] = {}
        for cid in ids:
            for v in cid:
                if v in by_vert:
                    parent[find(by_vert[v])] = find(cid)
                else:
                    by_vert[v] = cid
        groups: dict[frozenset, set] = {}
        for cid in ids:
            groups.setdefault(find(cid), set()).add(cid)
        return [frozenset(g) for g in groups.values()]


def _affine_rank(verts) -> int:
    vs = list(verts)
    v0 = vs[0]
    return rank([tuple(a - b for a, b in zip(v, v0)) for v in vs[1:]])


def _polytope_faces(verts: tuple[Vec, ...], memo) -> set[frozenset[Vec]]:
    """All nonempty faces of conv(verts), each as a frozenset of vertices."""
    from itertools import combinations

    verts = tuple(sorted(verts))
    key = frozenset(verts)
    got = memo.get(key)
    if got is not None:
        return got
    out = {key}
    d = _affine_rank(verts)
    if d == 0:
        memo[key] = out
        return out
    n = len(verts[0])
    v0 = verts[0]
    basis = row_space_basis([tuple(a - b for a, b in zip(v, v0)) for v in verts[1:]], n)
    coord_rows = [tuple(b[i] for b in basis) for i in range(n)]
    lam = {}
    for v in verts:
        sol, _ = solve_linear(coord_rows, [a - b for a, b in zip(v, v0)], d)
        lam[v] = sol
    for t in combinations(verts, d):
        dirs = [tuple(a - b for a, b in zip(lam[u], lam[t[0]])) for u in t[1:]]
        ns = nullspace_basis(dirs, d)
        if len(ns) != 1:
            continue
        eta = ns[0]
        base = dot(eta, lam[t[0]])
        svals = [dot(eta, lam[v]) - base for v in verts]
        if all(s >= 0 for s in svals) or all(s <= 0 for s in svals):
            face = tuple(v for v, s in zip(verts, svals) if s == 0)
            if len(face) < len(verts):
                out |= _polytope_faces(face, memo)
    memo[key] = out
    return out


def compact_part(pieces) -> CompactModel:
    """Union of vertex hulls and all their faces, deduplicated by vertex set.

    Every input cell must be pointed; unbounded directions are dropped, which
    is a deformation retraction for complexes whose components have full
    normal span.
    """
    memo: dict[frozenset[Vec], set[frozenset[Vec]]] = {}
    sources: dict[frozenset[Vec], set[PieceKey]] = {}
    forms: dict[frozenset[Vec], tuple[Vec, Fraction]] = {}
    for p in pieces:
        if not p.geometry.pointed:
            raise ValueError(
                f"cell {p.source} over F-interval {p.interval} is unpointed; "
                "essentialize the component first"
            )
        vs = p.geometry.vertices
        for face in _polytope_faces(tuple(vs), memo):
            sources.setdefault(face, set()).add(p.key)
            forms.setdefault(face, (p.gradient, p.constant))
    all_verts = sorted({v for face in sources for v in face})
    vid = {v: i for i, v in enumerate(all_verts)}
    cells: dict[frozenset[int], ModelCell] = {}
    for face, src in sources.items():
        g, k = forms[face]
        cells[frozenset(vid[v] for v in face)] = ModelCell(
            frozenset(vid[v] for v in face),
            _affine_rank(sorted(face)),
            g,
            k,
            frozenset(src),
        )
    return CompactModel(tuple(all_verts), cells)


# ---------------------------------------------------------------------------
# level-split models


def _selected_model(cx: CanonicalComplex, levels, lo, hi):
    rcx = refine_at_levels(cx, levels)
    keys = rcx.keys_in(lo, hi)
    ess_pieces = []
    for comp in rcx.components(keys):
        ess, _ = essentialize([rcx.cells[k] for k in comp], cx.network.n0)
        ess_pieces.extend(ess)
    if lo is not None and hi is not None:
        for p in ess_pieces:
            for l in p.geometry.lineality_basis:
                assert dot(p.gradient, l) == 0, "strip recession is not F-constant"
            for r in p.geometry.rays:
                assert dot(p.gradient, r) == 0, "strip recession is not F-constant"
    model = compact_part(ess_pieces)
    return model, rcx, keys


def sublevel_model(cx: CanonicalComplex, c) -> CompactModel:
    """Compact model of F <= c."""
    c = Fraction(c)
    return _selected_model(cx, [c], None, c)[0]


def superlevel_model(cx: CanonicalComplex, c) -> CompactModel:
    """Compact model of F >= c."""
    c = Fraction(c)
    return _selected_model(cx, [c], c, None)[0]


def level_model(cx: CanonicalComplex, c) -> CompactModel:
    """Compact model of F = c."""
    c = Fraction(c)
    return _selected_model(cx, [c], c, c)[0]


def modeled_pair(cx: CanonicalComplex, levels, outer, inner):
    """Model of the pieces in the outer F-range, with the inner range marked.

    Returns (model, ids of model cells coming from the inner range).
    """
    model, rcx, keys = _selected_model(cx, levels, outer[0], outer[1])
    inner_keys = [k for k in rcx.keys_in(inner[0], inner[1]) if k in set(keys)]
    return model, model.cells_with_source(inner_keys)


@dataclass(frozen=True)
class StripModel:
    model: CompactModel
    level: Fraction
    lower: Fraction
    floor: frozenset
    k_cells: tuple[tuple[FlatComponent, frozenset], ...]


def strip_pair_model(cx: CanonicalComplex, a, lower) -> StripModel:
    """Compact model of the strip lower <= F <= a, with the flat components
    at level a and the floor F = lower marked as subcomplexes.

    The open interval (lower, a) must be free of nontransversal thresholds
    and lower itself must be a transversal value.
    """
    a, lower = Fraction(a), Fraction(lower)
    if not lower < a:
        raise ValueError("strip needs lower < a")
    for t in cx.nontransversal_thresholds:
        if lower <= t < a:
            raise ValueError(
                f"nontransversal threshold {t} inside the strip [{lower}, {a})"
            )
    model, rcx, keys = _selected_model(cx, [lower, a], lower, a)
    key_set = set(keys)
    floor = model.cells_with_source(
        [k for k in key_set if k[1] == (lower, lower)]
    )
    marks = []
    for comp in flat_cells(cx):
        if comp.level != a:
            continue
        k_keys = [(lab, (a, a)) for lab in comp.labels]
        assert all(k in key_set for k in k_keys)
        marks.append((comp, model.cells_with_source(k_keys)))
    return StripModel(model, a, lower, floor, tuple(marks))
