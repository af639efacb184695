"""Geometry of the square grid: l1 diamonds, dihedral symmetries and packing colorings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple


class Vertex(NamedTuple):
    x: int
    y: int

    def __repr__(self) -> str:
        return f"({self.x},{self.y})"


ORIGIN = Vertex(0, 0)

# The 8 elements of the dihedral group acting on Z^2 around the origin.
_DIHEDRAL = (
    lambda x, y: (x, y),
    lambda x, y: (-y, x),
    lambda x, y: (-x, -y),
    lambda x, y: (y, -x),
    lambda x, y: (-x, y),
    lambda x, y: (x, -y),
    lambda x, y: (y, x),
    lambda x, y: (-y, -x),
)


def l1_norm(v: Tuple[int, int]) -> int:
    return abs(v[0]) + abs(v[1])


def l1_distance(u: Tuple[int, int], v: Tuple[int, int]) -> int:
    return abs(u[0] - v[0]) + abs(u[1] - v[1])


@dataclass(frozen=True)
class Diamond:
    """The l1 ball of radius ``radius`` around the origin, vertices sorted by (x, y)."""

    radius: int
    vertices: Tuple[Vertex, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, v) -> bool:
        return l1_norm(v) <= self.radius

    def index(self, v: Tuple[int, int]) -> int:
        return _index_map(self.radius)[Vertex(*v)]


@lru_cache(maxsize=None)
def diamond_vertices(r: int) -> Diamond:
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    verts = tuple(
        Vertex(x, y)
        for x in range(-r, r + 1)
        for y in range(-(r - abs(x)), r - abs(x) + 1)
    )
    return Diamond(r, verts)


@lru_cache(maxsize=None)
def _index_map(r: int) -> Dict[Vertex, int]:
    return {v: i for i, v in enumerate(diamond_vertices(r).vertices)}


def diamond_size(r: int) -> int:
    return 2 * r * r + 2 * r + 1


def ball(center: Tuple[int, int], r: int) -> List[Vertex]:
    """Vertices of D_r(center), in canonical order."""
    cx, cy = center
    return [Vertex(cx + v.x, cy + v.y) for v in diamond_vertices(r).vertices]


def plus_shape(center: Tuple[int, int]) -> Tuple[Vertex, ...]:
    """D_1(center) listed center first, then E, W, N, S."""
    x, y = center
    return (Vertex(x, y), Vertex(x + 1, y), Vertex(x - 1, y), Vertex(x, y + 1), Vertex(x, y - 1))


def dihedral_images(v: Tuple[int, int]) -> set:
    return {Vertex(*g(v[0], v[1])) for g in _DIHEDRAL}


def dihedral_maps():
    """The 8 group elements as callables (x, y) -> (x', y')."""
    return _DIHEDRAL


def in_fundamental_octant(v: Tuple[int, int]) -> bool:
    return v[0] >= 0 and v[1] >= v[0]


def octant_vertices(r: int) -> List[Vertex]:
    return [v for v in diamond_vertices(r) if in_fundamental_octant(v)]


# ---------------------------------------------------------------------------
# colorings


@dataclass
class Coloring:
    radius: int
    assignment: Dict[Vertex, int] = field(default_factory=dict)

    def __getitem__(self, v) -> int:
        return self.assignment[Vertex(*v)]

    @property
    def num_colors(self) -> int:
        return max(self.assignment.values(), default=0)

    def is_total(self) -> bool:
        return all(v in self.assignment for v in diamond_vertices(self.radius))

    # text format: one "x y color" line per vertex in canonical order
    def to_text(self) -> str:
        return "".join(f"{v.x} {v.y} {self.assignment[v]}\n" for v in diamond_vertices(self.radius))

    @classmethod
    def from_text(cls, text: str) -> "Coloring":
        assignment = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'x y color', got {line!r}")
            x, y, c = map(int, parts)
            assignment[Vertex(x, y)] = c
        radius = max((l1_norm(v) for v in assignment), default=0)
        return cls(radius, assignment)

    def to_json(self) -> str:
        cells = [[v.x, v.y, self.assignment[v]] for v in diamond_vertices(self.radius)]
        return json.dumps({"radius": self.radius, "cells": cells}, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Coloring":
        data = json.loads(text)
        return cls(data["radius"], {Vertex(x, y): c for x, y, c in data["cells"]})

    def render(self) -> str:
        """ASCII picture with y growing upwards; colors above 9 print as letters."""
        r = self.radius
        rows = []
        for y in range(r, -r - 1, -1):
            row = []
            for x in range(-r, r + 1):
                c = self.assignment.get(Vertex(x, y))
                row.append(" ." if c is None else f"{c:2d}" if c < 10 else " " + chr(ord("A") + c - 10))
            rows.append("".join(row))
        return "\n".join(rows)


class Violation(NamedTuple):
    u: Vertex
    v: Vertex
    color: int


def verify_coloring(col: Coloring, k: Optional[int] = None) -> Optional[Violation]:
    """Return None for a valid packing coloring, else the smallest violating (u, v, color).

    Raises ValueError on partial colorings or colors outside 1..k.
    """
    verts = diamond_vertices(col.radius).vertices
    missing = [v for v in verts if v not in col.assignment]
    if missing:
        raise ValueError(f"coloring is not total: {len(missing)} vertices missing, e.g. {missing[0]}")
    for v in verts:
        c = col.assignment[v]
        if c < 1 or (k is not None and c > k):
            raise ValueError(f"vertex {v} has color {c} outside 1..{k}")
    by_color: Dict[int, List[Vertex]] = {}
    for v in verts:
        by_color.setdefault(col.assignment[v], []).append(v)
    best = None
    for c, vs in by_color.items():
        for i, u in enumerate(vs):
            for w in vs[i + 1:]:
                if l1_distance(u, w) <= c:
                    cand = Violation(u, w, c)
                    if best is None or cand < best:
                        best = cand
                    break
    return best


def coloring_from_rows(rows: Iterable[Iterable[int]], radius: int) -> Coloring:
    """Build a coloring from a square picture (top row = largest y), ignoring cells outside D_r."""
    rows = [list(r) for r in rows]
    size = 2 * radius + 1
    if len(rows) != size or any(len(r) != size for r in rows):
        raise ValueError(f"expected a {size}x{size} picture")
    assignment = {}
    for i, row in enumerate(rows):
        y = radius - i
        for j, c in enumerate(row):
            x = j - radius
            if abs(x) + abs(y) <= radius:
                assignment[Vertex(x, y)] = c
    return Coloring(radius, assignment)
