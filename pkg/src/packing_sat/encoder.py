"""CNF encodings of the diamond packing-coloring instance D_{r,k,c}.

Two base encodings are provided. The direct encoding uses one variable per
(vertex, color) pair with at-least-one-color clauses, pairwise
at-most-one-distance (AMOD) clauses and a unit fixing the center color. The
plus encoding adds one regional variable per (region, color) for colors 4..k,
where the regions are disjoint "+" shapes (D_1 balls), and replaces most
pairwise AMOD clauses by region-level clauses.

On top of either encoding one can add ALOD clauses (every D_1(v) contains a
1), layered symmetry-breaking clauses and a chessboard pattern of 1's.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .cnf import Clause, Formula, VarMap
from .grid import (
    ORIGIN,
    Vertex,
    diamond_vertices,
    in_fundamental_octant,
    l1_distance,
    l1_norm,
    octant_vertices,
    plus_shape,
)

# colors below this value are always encoded directly
FIRST_REGIONAL_COLOR = 4


@dataclass(frozen=True)
class Region:
    id: int
    center: Vertex
    members: Tuple[Vertex, ...]

    def __contains__(self, v) -> bool:
        return l1_distance(self.center, v) <= 1


@dataclass(frozen=True)
class EncodingOptions:
    variant: str = "direct"  # "direct" or "plus"
    alod: bool = False
    symmetry_layers: Tuple[int, ...] = ()
    chessboard: bool = False
    # region definition clauses (~r v x_1 v ... v x_5); not part of the default plus encoding
    definitions: bool = False

    def __post_init__(self):
        if self.variant not in ("direct", "plus"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if len(set(self.symmetry_layers)) != len(self.symmetry_layers):
            raise ValueError("symmetry layer colors must be distinct")


def _check_instance(r: int, k: int, c: int) -> None:
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    if k < 1:
        raise ValueError(f"need at least one color, got k={k}")
    if not 1 <= c <= k:
        raise ValueError(f"center color must satisfy 1 <= c <= k, got c={c}, k={k}")


def _instance_meta(variant: str, r: int, k: int, c: int) -> Dict:
    return {"variant": variant, "r": r, "k": k, "c": c, "alod": False,
            "symmetry_layers": [], "chessboard": False}


# ---------------------------------------------------------------------------
# direct encoding


def aloc_clauses(vmap: VarMap) -> List[Clause]:
    k = vmap.k
    return [tuple(vmap.x(v, t) for t in range(1, k + 1)) for v in vmap.vertices]


def amod_pairs(r: int, t: int):
    """Unordered vertex pairs of D_r (canonical order) at distance in (0, t]."""
    verts = diamond_vertices(r).vertices
    for i, u in enumerate(verts):
        for w in verts[i + 1:]:
            if l1_distance(u, w) <= t:
                yield u, w


def amod_count(r: int, t: int) -> int:
    if t < 1:
        raise ValueError("color must be positive")
    return sum(1 for _ in amod_pairs(r, t))


def encode_direct(r: int, k: int, c: int) -> Tuple[Formula, VarMap]:
    _check_instance(r, k, c)
    vmap = VarMap(r, k)
    f = Formula(vmap.num_vars, meta=_instance_meta("direct", r, k, c))
    f.extend(aloc_clauses(vmap))
    for t in range(1, k + 1):
        f.extend((-vmap.x(u, t), -vmap.x(w, t)) for u, w in amod_pairs(r, t))
    f.add((vmap.x(ORIGIN, c),))
    return f, vmap


# ---------------------------------------------------------------------------
# regions and the plus encoding


def region_centers(r: int) -> List[Vertex]:
    """Points of the lattice generated by (1,-2) and (2,1) with l1 norm <= r-1."""
    if r < 1:
        return []
    out = set()
    # a*(1,-2) + b*(2,1) = (a + 2b, b - 2a); |a|,|b| <= r suffices for norm <= r-1
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            p = Vertex(a + 2 * b, b - 2 * a)
            if l1_norm(p) <= r - 1:
                out.add(p)
    return sorted(out, key=lambda p: (l1_norm(p), p.x, p.y))


def place_regions(r: int) -> List[Region]:
    return [Region(i, ctr, plus_shape(ctr)) for i, ctr in enumerate(region_centers(r))]


def vertex_region_span(v, region: Region) -> int:
    """Largest distance from v to a member of the region."""
    return max(l1_distance(v, u) for u in region.members)


def region_region_span(a: Region, b: Region) -> int:
    return max(vertex_region_span(u, b) for u in a.members)


class Coverage(enum.Enum):
    REGION_VERTEX = "region-vertex"
    REGION_REGION = "region-region"
    WITHIN_REGION = "within-region"
    RESIDUAL = "residual"


class _ColorLayout:
    """Which conflicts of one color are expressed through regional clauses."""

    def __init__(self, r: int, t: int, regions: Sequence[Region]):
        self.t = t
        self.regions = list(regions)
        self.member_of: Dict[Vertex, int] = {u: reg.id for reg in self.regions for u in reg.members}
        self._by_id = {reg.id: reg for reg in self.regions}
        self.region_pairs = [
            (a.id, b.id) for a, b in combinations(self.regions, 2) if region_region_span(a, b) <= t
        ]
        self._pair_set = set(self.region_pairs)
        self.region_vertex: List[Tuple[int, Vertex]] = [
            (reg.id, v)
            for reg in self.regions
            for v in (diamond_vertices(r).vertices if r >= 0 else ())
            if self._region_vertex_applies(reg.id, v)
        ]

    def _paired(self, i: int, j: Optional[int]) -> bool:
        return j is not None and (min(i, j), max(i, j)) in self._pair_set

    def _region_vertex_applies(self, i: int, v: Vertex) -> bool:
        reg = self._by_id[i]
        if v in reg:
            return False
        # a region-region clause already covers every member of v's region
        if self._paired(i, self.member_of.get(v)):
            return False
        return vertex_region_span(v, reg) <= self.t

    def classify(self, u: Vertex, v: Vertex) -> Coverage:
        iu, iv = self.member_of.get(u), self.member_of.get(v)
        if iu is not None and iu == iv:
            return Coverage.WITHIN_REGION
        if iu is not None and self._paired(iu, iv):
            return Coverage.REGION_REGION
        if (iu is not None and self._region_vertex_applies(iu, v)) or (
            iv is not None and self._region_vertex_applies(iv, u)
        ):
            return Coverage.REGION_VERTEX
        return Coverage.RESIDUAL


def pair_coverage(u, v, t: int, regions: Sequence[Region]) -> Coverage:
    """How the plus encoding forbids u and v both taking color t (requires 0 < d(u,v) <= t, t >= 4)."""
    u, v = Vertex(*u), Vertex(*v)
    d = l1_distance(u, v)
    if not 0 < d <= t:
        raise ValueError(f"pair {u},{v} at distance {d} is not a color-{t} conflict")
    if t < FIRST_REGIONAL_COLOR:
        raise ValueError(f"colors below {FIRST_REGIONAL_COLOR} have no regional variables")
    return _ColorLayout(-1, t, regions).classify(u, v)


def plus_parts(r: int, k: int, c: int, definitions: bool = False):
    """The plus encoding as (VarMap, regions, ordered {clause kind: clauses})."""
    _check_instance(r, k, c)
    vmap = VarMap(r, k)
    regions = place_regions(r)
    colors = list(range(FIRST_REGIONAL_COLOR, k + 1))
    for reg in regions:
        for t in colors:
            vmap.register_region(reg.id, t)
    rv = vmap.var_of_region
    x = vmap.x
    layouts = {t: _ColorLayout(r, t, regions) for t in colors}

    parts: Dict[str, List[Clause]] = {
        "aloc": aloc_clauses(vmap),
        "definition": [],
        "membership": [],
        "region_vertex": [],
        "region_region": [],
        "amod": [],
        "center": [(x(ORIGIN, c),)],
    }
    for reg in regions:
        for t in colors:
            if definitions:
                parts["definition"].append((-rv(reg.id, t),) + tuple(x(u, t) for u in reg.members))
            parts["membership"].extend((rv(reg.id, t), -x(u, t)) for u in reg.members)
    for t in colors:
        parts["region_vertex"].extend((-rv(i, t), -x(v, t)) for i, v in layouts[t].region_vertex)
        parts["region_region"].extend((-rv(i, t), -rv(j, t)) for i, j in layouts[t].region_pairs)
    for t in range(1, k + 1):
        layout = layouts.get(t)
        for u, w in amod_pairs(r, t):
            if layout is None or layout.classify(u, w) in (Coverage.RESIDUAL, Coverage.WITHIN_REGION):
                parts["amod"].append((-x(u, t), -x(w, t)))
    return vmap, regions, parts


def encode_plus(r: int, k: int, c: int, definitions: bool = False) -> Tuple[Formula, VarMap]:
    """Plus encoding; falls back to the direct encoding when k < 4 (no regional colors)."""
    if k < FIRST_REGIONAL_COLOR:
        f, vmap = encode_direct(r, k, c)
        f.meta["variant"] = "plus"
        f.meta["region_centers"] = []
        return f, vmap
    vmap, regions, parts = plus_parts(r, k, c, definitions)
    f = Formula(vmap.num_vars, meta=_instance_meta("plus", r, k, c))
    for clauses in parts.values():
        f.extend(clauses)
    f.meta["region_centers"] = [list(reg.center) for reg in regions]
    f.meta["definitions"] = definitions
    return f, vmap


def clauses_per_color(r: int, k: int, variant: str = "direct") -> Dict[int, int]:
    """Size of the color-t part of the encoding: AMOD pairs for direct; membership,
    region-vertex, region-region and leftover AMOD clauses for plus."""
    if variant == "direct" or k < FIRST_REGIONAL_COLOR:
        return {t: amod_count(r, t) for t in range(1, k + 1)}
    vmap, _, parts = plus_parts(r, k, 1)
    out = {t: 0 for t in range(1, k + 1)}
    for kind in ("membership", "region_vertex", "region_region", "amod"):
        for clause in parts[kind]:
            out[vmap.decode(abs(clause[0]))[2]] += 1
    return out


# ---------------------------------------------------------------------------
# optional layers


def _vertex_map(f: Formula) -> VarMap:
    try:
        return VarMap(f.meta["r"], f.meta["k"])
    except KeyError:
        raise ValueError("formula metadata lacks the instance descriptor (r, k)") from None


def alod_clauses(r: int, vmap: VarMap) -> List[Clause]:
    out = []
    verts = diamond_vertices(r)
    for v in verts:
        out.append(tuple(vmap.x(w, 1) for w in plus_shape(v) if w in verts))
    return out


def add_alod(f: Formula, r: Optional[int] = None) -> Formula:
    r = f.meta.get("r") if r is None else r
    g = f.copy()
    g.extend(alod_clauses(r, _vertex_map(f)))
    g.meta["alod"] = True
    return g


def default_layer_colors(r: int, k: int, layers: int = 6) -> Tuple[int, ...]:
    """Colors k, k-1, ... (at most ``layers`` of them) whose half-radius fits in D_r."""
    return tuple(t for t in range(k, max(k - layers, 0), -1) if t // 2 <= r)


def symmetry_clauses(r: int, k: int, layer_colors: Sequence[int], vmap: VarMap) -> List[Clause]:
    out: List[Clause] = []
    layered: List[int] = []
    for t in layer_colors:
        if not 1 <= t <= k:
            raise ValueError(f"layer color {t} outside 1..{k}")
        h = t // 2
        if h > r:
            raise ValueError(f"layer color {t} needs D_{h}, larger than D_{r}")
        layered.append(t)
        broken: Tuple[int, ...] = ()
        if len(layered) > 1:
            broken = tuple(vmap.x(v, s) for s in layered for v in octant_vertices(s // 2))
        for v in diamond_vertices(h):
            if not in_fundamental_octant(v):
                out.append((-vmap.x(v, t),) + broken)
    return out


def add_symmetry_layers(f: Formula, r: int, k: int, layer_colors: Sequence[int]) -> Formula:
    if len(set(layer_colors)) != len(layer_colors):
        raise ValueError("symmetry layer colors must be distinct")
    g = f.copy()
    g.extend(symmetry_clauses(r, k, layer_colors, _vertex_map(f)))
    g.meta["symmetry_layers"] = list(layer_colors)
    return g


def chessboard_clauses(r: int, vmap: VarMap) -> List[Clause]:
    return [(vmap.x(v, 1),) for v in diamond_vertices(r) if (v.x + v.y) % 2]


def apply_chessboard(f: Formula, r: Optional[int] = None) -> Formula:
    """Fix color 1 on every vertex of odd coordinate sum."""
    r = f.meta.get("r") if r is None else r
    if f.meta.get("c") == 1 and r >= 1:
        raise ValueError("chessboard fixing puts color 1 next to a center colored 1")
    g = f.copy()
    g.extend(chessboard_clauses(r, _vertex_map(f)))
    g.meta["chessboard"] = True
    return g


def encode(r: int, k: int, c: int, options: EncodingOptions = EncodingOptions()) -> Tuple[Formula, VarMap]:
    if options.variant == "plus":
        f, vmap = encode_plus(r, k, c, definitions=options.definitions)
    else:
        f, vmap = encode_direct(r, k, c)
    if options.alod:
        f = add_alod(f, r)
    if options.symmetry_layers:
        f = add_symmetry_layers(f, r, k, options.symmetry_layers)
    if options.chessboard:
        f = apply_chessboard(f, r)
    return f, vmap


def manifest(f: Formula) -> Dict:
    m = dict(f.meta)
    m["num_vars"] = f.num_vars
    m["num_clauses"] = f.num_clauses
    return m
