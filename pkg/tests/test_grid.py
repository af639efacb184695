import json
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from packing_sat.grid import (
    ORIGIN,
    Coloring,
    Vertex,
    ball,
    coloring_from_rows,
    diamond_size,
    diamond_vertices,
    dihedral_images,
    dihedral_maps,
    in_fundamental_octant,
    l1_distance,
    octant_vertices,
    plus_shape,
    verify_coloring,
)

radii = st.integers(min_value=0, max_value=12)
points = st.tuples(st.integers(-20, 20), st.integers(-20, 20))


@given(radii)
def test_diamond_size_closed_form(r):
    d = diamond_vertices(r)
    assert len(d) == diamond_size(r) == 2 * r * r + 2 * r + 1
    assert len(set(d.vertices)) == len(d)
    assert list(d.vertices) == sorted(d.vertices)


def test_diamond_membership_and_index():
    d = diamond_vertices(4)
    assert (4, 0) in d and (2, 2) in d and (3, 2) not in d
    assert [d.index(v) for v in d] == list(range(len(d)))
    with pytest.raises(ValueError):
        diamond_vertices(-1)


def test_plus_shape_is_unit_ball():
    p = plus_shape((3, -2))
    assert p[0] == Vertex(3, -2)
    assert set(p) == set(ball((3, -2), 1))


@given(points, points)
def test_dihedral_maps_preserve_distance(u, v):
    for g in dihedral_maps():
        assert l1_distance(g(*u), g(*v)) == l1_distance(u, v)


@given(points)
def test_every_orbit_meets_the_octant(v):
    assert any(in_fundamental_octant(w) for w in dihedral_images(v))


def test_octant_vertices():
    assert octant_vertices(0) == [ORIGIN]
    assert set(octant_vertices(2)) == {(0, 0), (0, 1), (0, 2), (1, 1)}


def _brute_valid(col):
    vs = list(col.assignment)
    return all(not (col[u] == col[w] and l1_distance(u, w) <= col[u]) for u, w in combinations(vs, 2))


@given(st.integers(0, 3).flatmap(
    lambda r: st.tuples(st.just(r), st.lists(st.integers(1, 6), min_size=diamond_size(r), max_size=diamond_size(r)))))
def test_verify_coloring_matches_pair_scan(data):
    r, colors = data
    col = Coloring(r, dict(zip(diamond_vertices(r), colors)))
    assert (verify_coloring(col) is None) == _brute_valid(col)


def test_verify_coloring_reports_smallest_violation():
    col = Coloring(1, {v: 1 for v in diamond_vertices(1)})
    bad = verify_coloring(col)
    assert bad == ((-1, 0), (0, 0), 1)
    col.assignment[ORIGIN] = 2  # the four leaves are pairwise 2 apart
    assert verify_coloring(col) is None


def test_verify_coloring_rejects_partial_and_out_of_range():
    with pytest.raises(ValueError):
        verify_coloring(Coloring(1, {ORIGIN: 1}))
    col = Coloring(0, {ORIGIN: 5})
    with pytest.raises(ValueError):
        verify_coloring(col, k=4)


def test_coloring_serialisation_roundtrip():
    col = Coloring(2, {v: 1 + (i % 11) for i, v in enumerate(diamond_vertices(2))})
    assert Coloring.from_text(col.to_text()) == col
    assert Coloring.from_json(col.to_json()) == col
    assert json.loads(col.to_json())["radius"] == 2
    pic = col.render().splitlines()
    assert len(pic) == 5 and pic[2].split()[2] == str(col[ORIGIN])


def test_coloring_from_rows():
    rows = [[9, 9, 2, 9, 9], [9, 3, 1, 4, 9], [2, 1, 5, 1, 6], [9, 4, 1, 3, 9], [9, 9, 7, 9, 9]]
    col = coloring_from_rows(rows, 2)
    assert col[(0, 0)] == 5 and col[(0, 2)] == 2 and col[(2, 0)] == 6
    assert len(col.assignment) == 13
    with pytest.raises(ValueError):
        coloring_from_rows(rows[:4], 2)
