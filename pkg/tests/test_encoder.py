from collections import Counter
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from packing_sat.checker import rup_check_forward
from packing_sat.cnf import Formula
from packing_sat.drat import ADD, DELETE, ProofSegment
from packing_sat.encoder import (
    Coverage,
    EncodingOptions,
    add_alod,
    add_symmetry_layers,
    amod_count,
    apply_chessboard,
    clauses_per_color,
    default_layer_colors,
    encode,
    encode_direct,
    encode_plus,
    pair_coverage,
    place_regions,
    plus_parts,
    symmetry_clauses,
)
from packing_sat.grid import diamond_size, diamond_vertices, l1_distance, octant_vertices


def brute_amod(r, t):
    vs = diamond_vertices(r).vertices
    return sum(1 for u, w in combinations(vs, 2) if 0 < l1_distance(u, w) <= t)


@pytest.mark.parametrize("r", range(0, 9))
def test_amod_count_matches_pair_enumeration(r):
    for t in range(1, 11):
        assert amod_count(r, t) == brute_amod(r, t)


def test_amod_count_fixed_values():
    assert amod_count(1, 1) == 4
    assert amod_count(4, 10) == 820 == 41 * 40 // 2


@given(st.integers(0, 5), st.integers(1, 8), st.data())
@settings(max_examples=40, deadline=None)
def test_direct_encoding_shape(r, k, data):
    c = data.draw(st.integers(1, k))
    f, vmap = encode_direct(r, k, c)
    n = diamond_size(r)
    assert f.num_vars == n * k
    assert f.num_clauses == n + sum(amod_count(r, t) for t in range(1, k + 1)) + 1
    assert f.clauses[-1] == (vmap.x((0, 0), c),)
    f.validate()


def test_encode_rejects_bad_center():
    with pytest.raises(ValueError):
        encode_direct(3, 5, 6)
    with pytest.raises(ValueError):
        encode_plus(3, 5, 0)


def test_encodings_are_deterministic():
    a, _ = encode(4, 9, 4, EncodingOptions("plus", alod=True, symmetry_layers=(9, 8)))
    b, _ = encode(4, 9, 4, EncodingOptions("plus", alod=True, symmetry_layers=(9, 8)))
    assert a == b


@pytest.mark.parametrize("r", range(0, 9))
def test_regions_are_disjoint_plus_shapes_inside_the_diamond(r):
    regions = place_regions(r)
    d = diamond_vertices(r)
    seen = Counter(u for reg in regions for u in reg.members)
    assert all(n == 1 for n in seen.values())
    for reg in regions:
        assert len(reg.members) == 5 and all(u in d for u in reg.members)
        assert all(l1_distance(u, reg.center) <= 1 for u in reg.members)


def test_region_placement_small_cases():
    assert place_regions(0) == []
    assert [tuple(s.center) for s in place_regions(1)] == [(0, 0)]


def test_plus_parts_shape():
    vmap, regions, parts = plus_parts(5, 10, 5)
    assert list(parts) == ["aloc", "definition", "membership", "region_vertex", "region_region", "amod", "center"]
    assert len(parts["membership"]) == 5 * len(regions) * 7
    assert parts["definition"] == []
    vmap, regions, parts = plus_parts(2, 5, 1, definitions=True)
    assert len(parts["definition"]) == len(regions) * 2


def test_plus_below_four_colors_is_direct():
    f, _ = encode_plus(2, 3, 2)
    g, _ = encode_direct(2, 3, 2)
    assert f.clauses == g.clauses


def _alod_blocked(r, k):
    f, vmap = encode_direct(r, k, 1 + (k - 1) // 2)
    g = add_alod(f)
    by_lit = {}
    for cl in f.clauses:
        for l in cl:
            by_lit.setdefault(l, []).append(cl)
    for cl in g.clauses[f.num_clauses:]:
        pivot = vmap.x(vmap.decode(cl[0])[1], 1)
        # the pivot is x_{v,1} for the vertex v whose neighbourhood the clause covers
        pivot = next(l for l in cl if l == pivot)
        for d in by_lit.get(-pivot, []):
            resolvent = (set(cl) | set(d)) - {pivot, -pivot}
            if not any(-l in resolvent for l in resolvent):
                return False
    return True


@pytest.mark.parametrize("r", range(1, 7))
def test_alod_clauses_are_blocked(r):
    assert _alod_blocked(r, 6)


def test_alod_corner_clause_truncated():
    f, vmap = encode_direct(3, 4, 2)
    g = add_alod(f)
    extra = g.clauses[f.num_clauses:]
    assert len(extra) == diamond_size(3)
    idx = diamond_vertices(3).index((3, 0))
    # (3, 0) keeps only itself and (2, 0): its other three neighbours leave D_3
    assert sorted(extra[idx]) == sorted((vmap.x((3, 0), 1), vmap.x((2, 0), 1)))
    side = extra[diamond_vertices(3).index((1, 2))]
    assert len(side) == 3


@pytest.mark.parametrize("r", range(1, 5))
def test_plus_forbids_every_direct_conflict(r):
    """Every pairwise AMOD clause of the direct encoding is RUP w.r.t. the plus encoding."""
    k = 2 * r + 1
    f, vmap = encode_plus(r, k, 1)
    steps = []
    for t in range(1, k + 1):
        for u, w in combinations(diamond_vertices(r).vertices, 2):
            if l1_distance(u, w) <= t:
                cl = (-vmap.x(u, t), -vmap.x(w, t))
                steps += [(ADD, cl), (DELETE, cl)]
    rep = rup_check_forward(f, ProofSegment.from_steps(steps, "solver"), claim_unsat=False)
    assert rep.ok, rep.message
    assert rep.rat_checks == 0


def test_pair_coverage_kinds():
    regions = place_regions(6)
    kinds = set()
    for t in (4, 8, 11):
        for u, w in combinations(diamond_vertices(3).vertices, 2):
            if l1_distance(u, w) <= t:
                kinds.add(pair_coverage(u, w, t, regions))
    assert kinds == set(Coverage)
    with pytest.raises(ValueError):
        pair_coverage((0, 0), (5, 0), 4, regions)
    with pytest.raises(ValueError):
        pair_coverage((0, 0), (1, 0), 3, regions)


def test_symmetry_layers():
    assert default_layer_colors(6, 11) == (11, 10, 9, 8, 7, 6)
    assert default_layer_colors(2, 5) == (5, 4, 3, 2, 1)
    assert default_layer_colors(2, 11) == ()
    f, vmap = encode_direct(3, 6, 3)
    cl = symmetry_clauses(3, 6, (6,), vmap)
    # color 6 may only sit in the octant part of D_3
    assert len(cl) == diamond_size(3) - len(octant_vertices(3))
    assert all(len(c) == 1 for c in cl)
    two = symmetry_clauses(3, 6, (6, 5), vmap)
    assert all(len(c) == len(octant_vertices(3)) + len(octant_vertices(2)) + 1 for c in two[len(cl):])
    with pytest.raises(ValueError):
        symmetry_clauses(2, 6, (6,), vmap)
    with pytest.raises(ValueError):
        add_symmetry_layers(f, 3, 6, (6, 6))
    with pytest.raises(ValueError):
        EncodingOptions(symmetry_layers=(5, 5))


def test_chessboard():
    f, _ = encode_direct(2, 5, 3)
    g = apply_chessboard(f)
    assert g.num_clauses == f.num_clauses + 4
    with pytest.raises(ValueError):
        apply_chessboard(encode_direct(2, 5, 1)[0])


@pytest.mark.parametrize("r,t,size", [(4, 4, 243), (4, 7, 303), (4, 10, 285), (14, 4, 3703), (14, 10, 7093)])
def test_plus_clauses_per_color(r, t, size):
    assert clauses_per_color(r, 10, "plus")[t] == size


def test_direct_clauses_per_color():
    assert clauses_per_color(4, 10)[4] == 454
    assert clauses_per_color(14, 10)[10] == 30990
