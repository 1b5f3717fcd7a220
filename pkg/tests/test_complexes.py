"""Complex construction, labels, flats, orientations, census, predicates."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plmorse.complexes import (
    build_complex,
    census,
    edge_orientation,
    flat_cells,
    generic_line_counts,
    is_generic,
    is_transversal,
    reference_direction,
    zero_cells,
)
from plmorse.geometry import dot, vec
from plmorse.network import (
    AffineLayer,
    Network,
    build_coarse_bound_network,
    build_fan_network,
    prescribe_edge_orientations,
    random_network,
)

F = Fraction


def n1_network():
    return Network(
        (
            AffineLayer.make([[1, 0], [0, 1]], [0, 0], "relu"),
            AffineLayer.make([[1, 1]], [0], "none"),
        )
    )


def three_line_network(out=(2, -3, 1)):
    """Rows x=0, y=0, x+y=1; output weights as given."""
    return Network(
        (
            AffineLayer.make([[1, 0], [0, -1], [-1, -1]], [0, 0, 1], "relu"),
            AffineLayer.make([list(out)], [0], "none"),
        )
    )


def test_n1_cell_counts():
    cx = build_complex(n1_network())
    assert len(cx.cells) == 9
    assert len(cx.cells_of_dim(2)) == 4
    assert len(cx.cells_of_dim(1)) == 4
    assert len(cx.cells_of_dim(0)) == 1


def test_n1_zero_cells():
    cx = build_complex(n1_network())
    assert zero_cells(cx) == [(vec((0, 0)), F(0))]


def test_n1_flat_component_is_third_quadrant():
    cx = build_complex(n1_network())
    comps = flat_cells(cx)
    assert len(comps) == 1
    comp = comps[0]
    assert comp.level == 0
    assert set(comp.labels) == {(-1, -1), (-1, 0), (0, -1), (0, 0)}
    dims = sorted(cx.cells[lab].dimension for lab in comp.labels)
    assert dims == [0, 1, 1, 2]


def test_n1_edge_orientations():
    cx = build_complex(n1_network())
    # positive x-axis: F = x, increasing away from the origin
    assert edge_orientation(cx, (1, 0)) == "increasing"
    assert reference_direction(cx.cells[(1, 0)]) == vec((1, 0))
    # negative x-axis: F = 0
    assert edge_orientation(cx, (-1, 0)) == "flat"


def test_n1_census():
    c = census(build_complex(n1_network()))
    assert c[(1, False)] == 4
    assert c[(2, False)] == 4
    assert c[(0, True)] == 1


def test_generic_three_line_counts():
    net = random_network((2, 3, 1), seed=11)
    assert is_generic(net)
    cx = build_complex(net)
    assert len(cx.cells_of_dim(2)) == 7
    assert len(cx.cells_of_dim(1)) == 9
    assert len(cx.cells_of_dim(0)) == 3
    assert len(zero_cells(cx)) == 3
    c = census(cx)
    want = generic_line_counts(3)
    assert c.get((1, False), 0) == want["unbounded_one_cells"] == 6
    assert c.get((2, False), 0) == want["unbounded_two_cells"] == 6
    assert c.get((2, True), 0) == want["bounded_two_cells"] == 1


def test_generic_four_line_counts():
    net = random_network((2, 4, 1), seed=2)
    assert is_generic(net)
    c = census(build_complex(net))
    assert c.get((1, False), 0) == 8
    assert c.get((2, False), 0) == 8
    assert c.get((2, True), 0) == 3


def test_three_line_flat_set():
    # Flat set: the all-minus region (x<=0, y>=0, x+y>=1) with its faces at
    # level 0, plus the isolated vertices (0,0) at level 1 and (1,0) at 2.
    net = three_line_network()
    cx = build_complex(net)
    comps = flat_cells(cx)
    assert len(comps) == 3
    by_level = {c.level: c for c in comps}
    assert sorted(by_level) == [0, 1, 2]
    big = by_level[F(0)]
    assert (-1, -1, -1) in big.labels
    assert sorted(cx.cells[l].dimension for l in big.labels) == [0, 1, 1, 2]
    assert [cx.cells[l].dimension for l in by_level[F(1)].labels] == [0]
    assert [cx.cells[l].dimension for l in by_level[F(2)].labels] == [0]
    # dense evaluation oracle: F vanishes throughout the all-minus region
    for x in range(-8, 1):
        for y in range(-2, 9):
            if x <= 0 and y >= 0 and x + y >= 1:
                assert net.evaluate((x, y))[0] == 0
    # and every positive-dimensional flat cell is a face of that region
    for cell in cx.cells.values():
        if cell.flat and cell.dimension > 0:
            assert _label_refines_all_minus(cell.label)


def _label_refines_all_minus(label):
    return all(s <= 0 for s in label)


def test_fan1_vertices_and_flat_square():
    cx = build_complex(build_fan_network(1))
    zs = zero_cells(cx)
    assert [p for p, _ in zs] == [
        vec((-1, -1)),
        vec((-1, 1)),
        vec((1, -1)),
        vec((1, 1)),
    ]
    comps = flat_cells(cx)
    central = [c for c in comps if any(cx.cells[l].dimension == 2 for l in c.labels)]
    assert len(central) == 1
    assert central[0].level == 0
    # closed square: one 2-cell, four edges, four vertices
    dims = sorted(cx.cells[l].dimension for l in central[0].labels)
    assert dims == [0, 0, 0, 0, 1, 1, 1, 1, 2]


def test_fan2_flat_hexagon():
    cx = build_complex(build_fan_network(2))
    comps = flat_cells(cx)
    central = [c for c in comps if any(cx.cells[l].dimension == 2 for l in c.labels)]
    assert len(central) == 1 and central[0].level == 0
    dims = sorted(cx.cells[l].dimension for l in central[0].labels)
    assert dims == [0] * 6 + [1] * 6 + [2]


def test_fan1_incident_rays_alternate_with_output_weights():
    net = build_fan_network(1)
    cx = build_complex(net)
    w = net.layers[1].weights[0]
    seen = 0
    for cell in cx.cells_of_dim(1):
        pos = [i for i, s in enumerate(cell.label) if s > 0]
        if len(pos) != 1 or cell.geometry.bounded or not cell.geometry.pointed:
            continue
        away = cell.geometry.rays[0]
        got = dot(cell.gradient, away)
        assert (got > 0) == (w[pos[0]] > 0) and got != 0
        seen += 1
    assert seen == 8


def test_prescribed_orientations_measured_on_complex():
    base = build_fan_network(1).layers[0]
    for signs in [(1, 1, 1, 1), (-1, -1, -1, -1), (1, -1, 1, -1)]:
        s = prescribe_edge_orientations(base, signs)
        net = Network((base, AffineLayer.make([list(s)], [0], "none")))
        cx = build_complex(net)
        for cell in cx.cells_of_dim(1):
            pos = [i for i, v in enumerate(cell.label) if v > 0]
            if len(pos) != 1 or cell.geometry.bounded:
                continue
            away = cell.geometry.rays[0]
            assert dot(cell.gradient, away) * signs[pos[0]] > 0


def test_face_pairs_match_label_refinement():
    cx = build_complex(n1_network())
    assert ((0, 0), (1, 1)) in cx.face_pairs
    assert ((0, 1), (1, 1)) in cx.face_pairs
    assert ((0, 1), (1, -1)) not in cx.face_pairs
    assert cx.cofaces_of((0, 0), codim=1) == [(0, 1), (0, -1), (1, 0), (-1, 0)] or set(
        cx.cofaces_of((0, 0), codim=1)
    ) == {(0, 1), (0, -1), (1, 0), (-1, 0)}


def test_flat_subcomplex_closed_under_faces():
    for net in (build_fan_network(2), random_network((2, 4, 1), seed=8)):
        cx = build_complex(net)
        flats = set(cx.flat_labels)
        for sub, sup in cx.face_pairs:
            if sup in flats:
                assert sub in flats


def test_all_zero_cells_flat_and_thresholds_cover_them():
    net = random_network((2, 4, 1), seed=21)
    cx = build_complex(net)
    for c in cx.cells_of_dim(0):
        assert c.flat
        assert c.value_on_cell() in cx.nontransversal_thresholds


def test_genericity_verdicts():
    assert not is_generic(build_fan_network(2))
    dup = Network(
        (
            AffineLayer.make([[1, 0], [1, 0]], [0, 0], "relu"),
            AffineLayer.make([[1, 1]], [0], "none"),
        )
    )
    res = is_generic(dup)
    assert not res and res.witness is not None
    assert is_generic(n1_network())


def test_random_nets_generic_and_transversal():
    for seed in range(40):
        net = random_network((2, 3, 1), seed=seed)
        assert is_generic(net)
        assert is_transversal(net)


def test_transversality_witness_for_zero_node():
    net = Network(
        (
            AffineLayer.make([[0, 0], [0, 1]], [0, 0], "relu"),
            AffineLayer.make([[1, 1]], [0], "none"),
        )
    )
    res = is_transversal(net)
    assert not res
    assert "node 0" in res.witness


def test_deep_network_cells_match_evaluation():
    net = random_network((2, 2, 2, 1), seed=13)
    cx = build_complex(net)
    pts = [
        (F(x, 3), F(y, 3)) for x in range(-6, 7, 3) for y in range(-6, 7, 3)
    ]
    for p in pts:
        lab = net.activation_pattern(p)
        assert lab in cx.cells
        cell = cx.cells[lab]
        assert cell.geometry.contains(p)
        assert cell.form_at(p) == net.evaluate(p)[0]


def test_coarse_bound_network_generic_transversal():
    for m in (3, 4, 5):
        net = build_coarse_bound_network(m)
        assert is_generic(net)
        assert is_transversal(net)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.tuples(*[st.fractions(F(-5), F(5))] * 2))
def test_sample_points_land_in_matching_cells(seed, p):
    net = random_network((2, 3, 1), seed=seed)
    cx = build_complex(net)
    lab = net.activation_pattern(p)
    assert lab in cx.cells
    assert cx.cells[lab].geometry.contains(p)
    assert cx.cells[lab].form_at(p) == net.evaluate(p)[0]


def test_negation_duality_cells_and_orientations():
    net = random_network((2, 3, 1), seed=31)
    cx = build_complex(net)
    nx = build_complex(net.negate())
    assert set(cx.cells) == set(nx.cells)
    flip = {"increasing": "decreasing", "decreasing": "increasing", "flat": "flat"}
    for lab, ori in cx.oriented_one_skeleton.items():
        assert nx.oriented_one_skeleton[lab] == flip[ori]
