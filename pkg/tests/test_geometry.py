"""Exact linear algebra, feasibility, and polyhedron tests."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plmorse.geometry import (
    Polyhedron,
    VertexEnumerationError,
    canon_constraint,
    canonical_line_direction,
    dot,
    feasible,
    in_span,
    nullspace_basis,
    primitive_direction,
    rank,
    solve_linear,
    strict_feasible,
    vec,
)

F = Fraction


def test_canon_constraint_scales_to_primitive_integers():
    coef, off = canon_constraint((F(2, 3), F(-4, 3)), F(2))
    assert (coef, off) == ((1, -2), 3)


def test_canon_constraint_equality_sign():
    coef, off = canon_constraint((-2, 4), 6, equality=True)
    assert (coef, off) == ((1, -2), -3)
    coef, off = canon_constraint((0, 0), -5, equality=True)
    assert (coef, off) == ((0, 0), 1)


def test_rank_and_nullspace():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert rank(rows) == 2
    ns = nullspace_basis(rows, 3)
    assert len(ns) == 1
    for row in rows:
        assert dot(row, ns[0]) == 0


def test_solve_linear_unique_and_inconsistent():
    sol, null = solve_linear([[2, 0], [1, 1]], [4, 3], 2)
    assert sol == (F(2), F(1))
    assert null == []
    sol, _ = solve_linear([[1, 1], [1, 1]], [0, 1], 2)
    assert sol is None


def test_in_span():
    assert in_span((2, 4), [(1, 2)])
    assert not in_span((1, 0), [(1, 2)])
    assert in_span((0, 0), [])


# -- feasibility: witnessed-feasible vs Farkas-certified infeasible ---------


def test_feasible_with_witness():
    # (1/2, 1/3) satisfies the system; feasibility must agree.
    sys_ges = [((2, 0), -1), ((0, 3), -1), ((-1, -1), 1)]
    for coef, off in sys_ges:
        assert dot(coef, (F(1, 2), F(1, 3))) + off >= 0
    assert feasible(2, ges=sys_ges)


def test_infeasible_by_farkas_certificate():
    # x >= 1, y >= 1, x + y <= 1:  summing the three gives 0 >= 1.
    assert not feasible(2, ges=[((1, 0), -1), ((0, 1), -1), ((-1, -1), 1)])


def test_strict_needs_interior():
    # x >= 0 and -x >= 0 is the line x = 0: weakly feasible, strictly not.
    assert feasible(1, ges=[((1,), 0), ((-1,), 0)])
    assert not strict_feasible(1, [((1,), 0), ((-1,), 0)])


def test_equalities_mixed_with_stricts():
    # x + y = 1, x > 0, y > 0 has solutions; adding x > 1 kills them.
    assert feasible(2, eqs=[((1, 1), -1)], gts=[((1, 0), 0), ((0, 1), 0)])
    assert not feasible(
        2, eqs=[((1, 1), -1)], gts=[((1, 0), 0), ((0, 1), 0), ((1, 0), -1)]
    )


def test_inconsistent_equalities():
    assert not feasible(2, eqs=[((1, 1), 0), ((1, 1), -1)])


def test_strict_open_but_not_closed_gap():
    # x > 0, x < 0 infeasible; x > 0, x < 1 feasible.
    assert not feasible(1, gts=[((1,), 0), ((-1,), 0)])
    assert feasible(1, gts=[((1,), 0), ((-1,), 1)])


def test_feasible_zero_variables_constants():
    assert feasible(0, ges=[((), 0)])
    assert not feasible(0, gts=[((), 0)])
    assert not feasible(0, eqs=[((), 3)])


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.tuples(*[st.integers(-4, 4)] * 3),
            st.integers(-4, 4),
        ),
        max_size=5,
    ),
    st.tuples(*[st.fractions(F(-3), F(3))] * 3),
)
def test_feasible_never_rejects_a_witness(ges, point):
    """Any system a concrete point satisfies must be reported feasible."""
    if all(dot(c, point) + o >= 0 for c, o in ges):
        assert feasible(3, ges=ges)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.tuples(*[st.integers(-4, 4)] * 2), st.integers(-4, 4)),
        max_size=4,
    ),
    st.tuples(*[st.fractions(F(-3), F(3))] * 2),
)
def test_strict_feasible_never_rejects_a_witness(gts, point):
    if all(dot(c, point) + o > 0 for c, o in gts):
        assert feasible(2, gts=gts)


# -- polyhedra --------------------------------------------------------------


def unit_square():
    return Polyhedron(
        2, ges=[((1, 0), 0), ((-1, 0), 1), ((0, 1), 0), ((0, -1), 1)]
    )


def test_square_vertices_and_dim():
    p = unit_square()
    assert p.dim == 2
    assert p.bounded
    assert p.vertices == [vec((0, 0)), vec((0, 1)), vec((1, 0)), vec((1, 1))]
    assert p.rays == []


def test_vertex_defining_property():
    # Every reported vertex satisfies all constraints and is tight on a
    # full-rank subset; checked directly, independent of the enumerator.
    p = Polyhedron(2, ges=[((1, 1), -1), ((1, -1), 1), ((-1, 0), 2)])
    for v in p.vertices:
        assert p.contains(v)
        tight = [c for c, o in p.ges if dot(c, v) + o == 0]
        assert rank(tight) == 2


def test_minkowski_reconstruction_of_quadrant_shift():
    # {x >= 1, y >= 2} = vertex (1,2) + cone(e1, e2).
    p = Polyhedron(2, ges=[((1, 0), -1), ((0, 1), -2)])
    assert p.vertices == [vec((1, 2))]
    assert sorted(p.rays) == [vec((0, 1)), vec((1, 0))]
    assert not p.bounded


def test_lower_dimensional_segment():
    # Segment from (0,0) to (1,1) on the diagonal.
    p = Polyhedron(2, eqs=[((1, -1), 0)], ges=[((1, 0), 0), ((-1, 0), 1)])
    assert p.dim == 1
    assert p.vertices == [vec((0, 0)), vec((1, 1))]
    assert p.bounded


def test_implicit_equality_detected():
    # x >= 0, -x >= 0 forces the hull onto x = 0 without an explicit equality.
    p = Polyhedron(2, ges=[((1, 0), 0), ((-1, 0), 0), ((0, 1), 0)])
    assert p.dim == 1
    assert ((1, 0), 0) in p.hull_eqs


def test_empty_polyhedron():
    p = Polyhedron(1, ges=[((1,), -1), ((-1,), 0)])
    assert not p.nonempty
    assert p.dim == -1
    assert p.vertices == []


def test_unpointed_vertex_enumeration_refuses():
    # A vertical strip contains the line x = 0 direction: no vertices exist.
    p = Polyhedron(2, ges=[((1, 0), 0), ((-1, 0), 1)])
    assert p.lineality_basis == [vec((0, 1))]
    with pytest.raises(VertexEnumerationError):
        p.vertices


def test_half_strip():
    # {0 <= x <= 1, y <= 0}: pointed, two vertices, one recession ray.
    p = Polyhedron(2, ges=[((1, 0), 0), ((-1, 0), 1), ((0, -1), 0)])
    assert p.pointed
    assert p.vertices == [vec((0, 0)), vec((1, 0))]
    assert p.rays == [vec((0, -1))]


def test_relint_membership():
    p = unit_square()
    assert p.in_relint((F(1, 2), F(1, 2)))
    assert not p.in_relint((F(0), F(1, 2)))
    assert p.contains((F(0), F(1, 2)))


def test_relint_system_passed_through_unprobed():
    p = Polyhedron(
        2,
        ges=[((1, 0), 0), ((0, 1), 0)],
        relint=((), (((1, 0), 0), ((0, 1), 0))),
    )
    eqs, stricts = p.relint_system
    assert eqs == ()
    assert set(stricts) == {((1, 0), 0), ((0, 1), 0)}
    assert p.dim == 2


def test_normal_span_and_lineality_are_complements():
    p = Polyhedron(3, ges=[((1, 0, 0), 0), ((0, 1, 0), 0), ((1, 1, 0), -1)])
    assert p.nspan_rank == 2
    assert p.lineality_basis == [vec((0, 0, 1))]
    for b in p.lineality_basis:
        for nrm in p.normal_span_basis:
            assert dot(b, nrm) == 0


def test_affine_hull_point_solves_equalities():
    p = Polyhedron(2, eqs=[((1, 1), -2)], ges=[((1, 0), 0)])
    pt = p.affine_hull_point
    assert pt is not None
    assert dot((1, 1), pt) - 2 == 0


def test_primitive_direction():
    assert primitive_direction((F(2, 3), F(-4, 3))) == vec((1, -2))
    assert canonical_line_direction((0, F(-1, 2))) == vec((0, 1))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.tuples(st.tuples(*[st.integers(-3, 3)] * 2), st.integers(-3, 3)),
        min_size=1,
        max_size=5,
    )
)
def test_vertices_lie_in_polyhedron(ges):
    p = Polyhedron(2, ges=ges)
    if not p.nonempty or not p.pointed:
        return
    for v in p.vertices:
        assert p.contains(v)
        tight = [c for c, o in list(p.eqs) + list(p.ges) if dot(c, v) + o == 0]
        assert rank(tight) == 2
