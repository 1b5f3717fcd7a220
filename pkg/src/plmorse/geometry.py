"""Exact rational linear algebra and convex polyhedra.

All arithmetic is over the rationals (fractions.Fraction); no floats enter any
geometric predicate.  A linear constraint is a pair ``(coef, off)`` encoding the
affine form ``<coef, x> + off`` and is stored in canonical integer form: every
entry an int, gcd of all entries 1.  Equality constraints additionally have
their first nonzero coefficient positive, so that a hyperplane has one key.

Polyhedra are kept in H-representation.  The relative interior of a polyhedron
is characterised by a system ``(eqs, stricts)``: the points satisfying every
equality and every strict inequality.  Cell-construction code passes this
system in explicitly (it is the sign-pattern system of the cell); for ad hoc
polyhedra it is recovered by implicit-equality probing.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd

Vec = tuple[Fraction, ...]
IntVec = tuple[int, ...]
Constraint = tuple[IntVec, int]


def vec(xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


def dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def form_value(coef, off, point) -> Fraction:
    return dot(coef, point) + off


def canon_constraint(coef, off, equality: bool = False) -> Constraint:
    """Scale an affine form to primitive integers; orient equalities."""
    entries = [Fraction(c) for c in coef] + [Fraction(off)]
    lcm = 1
    for e in entries:
        lcm = lcm * e.denominator // gcd(lcm, e.denominator)
    ints = [int(e * lcm) for e in entries]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    if equality:
        lead = next((v for v in ints[:-1] if v != 0), None)
        if lead is None and ints[-1] != 0:
            lead = ints[-1]
        if lead is not None and lead < 0:
            ints = [-v for v in ints]
    return tuple(ints[:-1]), ints[-1]


# ---------------------------------------------------------------------------
# dense exact linear algebra


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows) -> int:
    rows = [row for row in rows if any(x != 0 for x in row)]
    if not rows:
        return 0
    return len(rref(rows)[0])


def nullspace_basis(rows, n: int) -> list[Vec]:
    """Basis of {x in Q^n : row . x = 0 for every row}."""
    rows = [row for row in rows if any(x != 0 for x in row)]
    if not rows:
        return [tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)]
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(tuple(v))
    return basis


def row_space_basis(rows, n: int) -> list[Vec]:
    rows = [row for row in rows if any(x != 0 for x in row)]
    if not rows:
        return []
    red, _ = rref(rows)
    return [tuple(r) for r in red]


def in_span(target, rows) -> bool:
    """Whether target lies in the row space of rows."""
    if all(x == 0 for x in target):
        return True
    base = [row for row in rows if any(x != 0 for x in row)]
    return rank(base + [list(target)]) == rank(base)


def solve_linear(rows, rhs, n: int) -> tuple[Vec | None, list[Vec]]:
    """Solve rows . x = rhs exactly.

    Returns (particular solution or None if inconsistent, nullspace basis).
    """
    aug = [list(row) + [r] for row, r in zip(rows, rhs)]
    if not aug:
        return tuple(Fraction(0) for _ in range(n)), nullspace_basis([], n)
    red, pivots = rref(aug)
    if n in pivots:
        return None, nullspace_basis(rows, n)
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = red[i][n]
    return tuple(x), nullspace_basis(rows, n)


# ---------------------------------------------------------------------------
# exact feasibility (Fourier-Motzkin with strictness tracking)


def _const_ok(off, strict: bool) -> bool:
    return off > 0 if strict else off >= 0


def feasible(n: int, eqs=(), ges=(), gts=()) -> bool:
    """Exact feasibility of {x : eqs = 0, ges >= 0, gts > 0} over Q^n.

    Equalities are removed by Gaussian substitution, then Fourier-Motzkin
    eliminates the remaining variables.  Total and exact; the combination of
    a strict inequality with any other is strict.
    """
    ineqs: list[tuple[list[Fraction], Fraction, bool]] = []
    for coef, off in ges:
        ineqs.append(([Fraction(c) for c in coef], Fraction(off), False))
    for coef, off in gts:
        ineqs.append(([Fraction(c) for c in coef], Fraction(off), True))

    # Gaussian substitution for the equalities.
    pending = [[Fraction(c) for c in coef] + [Fraction(off)] for coef, off in eqs]
    while pending:
        row = pending.pop()
        j = next((k for k in range(n) if row[k] != 0), None)
        if j is None:
            if row[n] != 0:
                return False
            continue
        pj = row[j]
        for other in pending:
            if other[j] != 0:
                t = other[j] / pj
                for k in range(n + 1):
                    other[k] -= t * row[k]
        new_ineqs = []
        for c, off, s in ineqs:
            if c[j] != 0:
                t = c[j] / pj
                c = [a - t * b for a, b in zip(c, row[:n])]
                off = off - t * row[n]
                c[j] = Fraction(0)
            new_ineqs.append((c, off, s))
        ineqs = new_ineqs

    # Fourier-Motzkin elimination of the remaining variables.
    def canon(c, off, s):
        coef, ioff = canon_constraint(c, off)
        return coef, ioff, s

    work = set()
    for c, off, s in ineqs:
        if all(x == 0 for x in c):
            if not _const_ok(off, s):
                return False
            continue
        work.add(canon(c, off, s))

    while work:
        counts = {}
        for coef, off, s in work:
            for k in range(n):
                if coef[k] != 0:
                    counts.setdefault(k, [0, 0])
        for coef, off, s in work:
            for k in counts:
                if coef[k] > 0:
                    counts[k][0] += 1
                elif coef[k] < 0:
                    counts[k][1] += 1
        if not counts:
            break
        j = min(counts, key=lambda k: counts[k][0] * counts[k][1])
        pos, neg, rest = [], [], set()
        for con in work:
            cj = con[0][j]
            if cj > 0:
                pos.append(con)
            elif cj < 0:
                neg.append(con)
            else:
                rest.add(con)
        work = rest
        for pc, po, ps in pos:
            for nc, no, ns in neg:
                a, b = pc[j], nc[j]
                c = [Fraction(-b) * x + Fraction(a) * y for x, y in zip(pc, nc)]
                off = -b * po + a * no
                s = ps or ns
                if all(x == 0 for x in c):
                    if not _const_ok(off, s):
                        return False
                    continue
                work.add(canon(c, off, s))
    return True


def strict_feasible(n: int, ineqs) -> bool:
    """Exact nonemptiness of the open polyhedron {x : <g,x> + c > 0 for all}."""
    return feasible(n, gts=ineqs)


# ---------------------------------------------------------------------------
# polyhedra


class VertexEnumerationError(ValueError):
    """Raised when vertices of an unpointed polyhedron are requested."""


class Polyhedron:
    """Closed convex polyhedron {x : eqs = 0, ges >= 0} in Q^n."""

    def __init__(self, n: int, eqs=(), ges=(), relint=None):
        self.n = n
        self.eqs = tuple(sorted({canon_constraint(c, o, equality=True) for c, o in eqs}))
        self.ges = tuple(sorted({canon_constraint(c, o) for c, o in ges}))
        if relint is not None:
            req, rst = relint
            relint = (
                tuple(sorted({canon_constraint(c, o, equality=True) for c, o in req})),
                tuple(sorted({canon_constraint(c, o) for c, o in rst})),
            )
        self._relint = relint

    @classmethod
    def whole_space(cls, n: int) -> "Polyhedron":
        return cls(n, (), (), relint=((), ()))

    def __repr__(self):
        return f"Polyhedron(n={self.n}, eqs={len(self.eqs)}, ges={len(self.ges)}, dim={self.dim})"

    # -- basic predicates ---------------------------------------------------

    @cached_property
    def nonempty(self) -> bool:
        return feasible(self.n, eqs=self.eqs, ges=self.ges)

    @cached_property
    def relint_system(self) -> tuple[tuple[Constraint, ...], tuple[Constraint, ...]]:
        """(equalities, strict inequalities) cutting out the relative interior."""
        if self._relint is not None:
            return self._relint
        if not self.nonempty:
            return self.eqs, self.ges
        eqs = list(self.eqs)
        stricts = []
        for g in self.ges:
            if feasible(self.n, eqs=self.eqs, ges=self.ges, gts=[g]):
                stricts.append(g)
            else:
                eqs.append(canon_constraint(g[0], g[1], equality=True))
        self._relint = (tuple(sorted(set(eqs))), tuple(sorted(set(stricts))))
        return self._relint

    @property
    def hull_eqs(self) -> tuple[Constraint, ...]:
        return self.relint_system[0]

    @cached_property
    def dim(self) -> int:
        if not self.nonempty:
            return -1
        return self.n - rank([c for c, _ in self.hull_eqs])

    @cached_property
    def all_normals(self) -> list[IntVec]:
        return [c for c, _ in self.eqs] + [c for c, _ in self.ges]

    @cached_property
    def lineality_basis(self) -> list[Vec]:
        basis = nullspace_basis(self.all_normals, self.n)
        return [primitive_direction(v) for v in basis]

    @cached_property
    def normal_span_basis(self) -> list[Vec]:
        return row_space_basis(self.all_normals, self.n)

    @property
    def nspan_rank(self) -> int:
        return len(self.normal_span_basis)

    @property
    def pointed(self) -> bool:
        return not self.lineality_basis

    def contains(self, point) -> bool:
        return all(form_value(c, o, point) == 0 for c, o in self.eqs) and all(
            form_value(c, o, point) >= 0 for c, o in self.ges
        )

    def in_relint(self, point) -> bool:
        eqs, stricts = self.relint_system
        return all(form_value(c, o, point) == 0 for c, o in eqs) and all(
            form_value(c, o, point) > 0 for c, o in stricts
        )

    @cached_property
    def affine_hull_point(self) -> Vec | None:
        """A point of the affine hull (not necessarily of the polyhedron)."""
        if not self.nonempty:
            return None
        eqs = self.hull_eqs
        sol, _ = solve_linear([c for c, _ in eqs], [-o for _, o in eqs], self.n)
        return sol

    # -- V-representation ---------------------------------------------------

    @cached_property
    def vertices(self) -> list[Vec]:
        """All 0-faces, sorted lexicographically.  Requires pointedness."""
        if not self.nonempty:
            return []
        if not self.pointed:
            raise VertexEnumerationError(
                "vertex enumeration on unpointed polyhedron; essentialize first"
            )
        eqs, stricts = self.relint_system
        eq_rows = [c for c, _ in eqs]
        eq_rhs = [-o for _, o in eqs]
        base_rank = rank(eq_rows)
        need = self.n - base_rank
        found = set()
        for subset in combinations(stricts, need):
            rows = eq_rows + [c for c, _ in subset]
            rhs = eq_rhs + [-o for _, o in subset]
            if rank(rows) != self.n:
                continue
            sol, _ = solve_linear(rows, rhs, self.n)
            if sol is not None and self.contains(sol):
                found.add(sol)
        return sorted(found)

    @cached_property
    def rays(self) -> list[Vec]:
        """Extreme rays of the recession cone (primitive integer directions)."""
        if not self.nonempty:
            return []
        if not self.pointed:
            raise VertexEnumerationError(
                "ray enumeration on unpointed polyhedron; essentialize first"
            )
        eqs, stricts = self.relint_system
        eq_rows = [c for c, _ in eqs]
        base_rank = rank(eq_rows)
        need = self.n - base_rank - 1
        if need < 0:
            return []
        ineq_rows = [c for c, _ in stricts]

        def in_cone(d):
            return all(dot(r, d) == 0 for r in eq_rows) and all(
                dot(r, d) >= 0 for r in ineq_rows
            )

        found = {}
        for subset in combinations(range(len(ineq_rows)), need):
            rows = eq_rows + [ineq_rows[i] for i in subset]
            if rank(rows) != self.n - 1:
                continue
            null = nullspace_basis(rows, self.n)
            if len(null) != 1:
                continue
            d = null[0]
            for cand in (d, tuple(-x for x in d)):
                if not in_cone(cand):
                    continue
                tight = eq_rows + [r for r in ineq_rows if dot(r, cand) == 0]
                if rank(tight) == self.n - 1:
                    found[primitive_direction(cand)] = True
        return sorted(found)

    @cached_property
    def bounded(self) -> bool:
        if not self.nonempty:
            return True
        return self.pointed and not self.rays

    # -- constructors -------------------------------------------------------

    def with_constraints(self, eqs=(), ges=(), relint=None) -> "Polyhedron":
        return Polyhedron(
            self.n, list(self.eqs) + list(eqs), list(self.ges) + list(ges), relint=relint
        )

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if other.n != self.n:
            raise ValueError("ambient dimensions differ")
        return Polyhedron(
            self.n, list(self.eqs) + list(other.eqs), list(self.ges) + list(other.ges)
        )


def primitive_direction(v) -> Vec:
    """Scale a nonzero rational vector to primitive integers, keeping direction."""
    fr = [Fraction(x) for x in v]
    lcm = 1
    for e in fr:
        lcm = lcm * e.denominator // gcd(lcm, e.denominator)
    ints = [int(e * lcm) for e in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(Fraction(x) for x in ints)


def canonical_line_direction(v) -> Vec:
    """Primitive direction with first nonzero entry positive (sign-free lines)."""
    d = primitive_direction(v)
    lead = next((x for x in d if x != 0), None)
    if lead is not None and lead < 0:
        d = tuple(-x for x in d)
    return d
