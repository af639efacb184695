"""PTR cube generation (positives P, top colors T, closest regions R).

The cubes assign regional variables of the T highest colors. A cube with the
maximal number P of positive literals says "color q_i appears in region
S_{j_i}" for P distinct top colors; a cube with fewer positives also says
that every other top color is absent from all R closest regions.

Equivalently the cubes are the leaves of a decision tree that visits the top
colors in order and, while positives remain, branches R + 1 ways on each:
"region j holds the color" for each of the R regions, or "none of them
does". That tree is what :mod:`packing_sat.proof` turns into a resolution
refutation of the negated cubes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .cnf import Formula, VarMap
from .encoder import FIRST_REGIONAL_COLOR, Region
from .grid import ORIGIN, l1_distance


@dataclass(frozen=True)
class SplitParams:
    P: int
    T: int
    R: int
    k: int
    c: int

    def __post_init__(self):
        if min(self.P, self.T, self.R) < 0:
            raise ValueError("P, T and R must be non-negative")
        if self.P > self.T:
            raise ValueError(f"P={self.P} exceeds T={self.T}")
        if self.T > self.k:
            raise ValueError(f"T={self.T} exceeds k={self.k}")
        if not 1 <= self.c <= self.k:
            raise ValueError(f"center color {self.c} outside 1..{self.k}")


@dataclass(frozen=True)
class Cube:
    index: int
    lits: Tuple[int, ...]

    def __iter__(self):
        return iter(self.lits)

    def __len__(self):
        return len(self.lits)

    def negation(self) -> Tuple[int, ...]:
        return tuple(-l for l in self.lits)


def count_cubes(P: int, T: int, R: int) -> int:
    if P > T:
        raise ValueError(f"P={P} exceeds T={T}")
    return sum(R**i * comb(T, i) for i in range(P + 1))


def top_colors(T: int, k: int, c: int) -> List[int]:
    """The T highest colors, with the center color swapped for k - T."""
    colors = list(range(k, k - T, -1))
    if c in colors:
        colors.remove(c)
        colors.append(k - T)
    return sorted(colors)


def region_distance(region: Region, v=ORIGIN) -> int:
    return min(l1_distance(u, v) for u in region.members)


def closest_regions(regions: Sequence[Region], R: int) -> List[Region]:
    """The R regions nearest to the center (min member distance), ties by center (x, y)."""
    if R > len(regions):
        raise ValueError(f"R={R} exceeds the {len(regions)} available regions")
    return sorted(regions, key=lambda s: (region_distance(s), s.center.x, s.center.y))[:R]


@dataclass
class PtrLayout:
    """The variables a PTR split talks about: ``var(j, q)`` for region slot j and top color q."""

    params: SplitParams
    colors: List[int]
    var: Callable[[int, int], int]

    @property
    def num_vars(self) -> int:
        return len(self.colors) * self.params.R

    def variables(self) -> List[int]:
        return [self.var(j, q) for q in self.colors for j in range(self.params.R)]


def ptr_layout(params: SplitParams, regions: Optional[Sequence[Region]] = None,
               vmap: Optional[VarMap] = None) -> PtrLayout:
    """Bind a split to an encoding's regional variables.

    Without ``vmap`` the variables are numbered 1.. in (color, region) order,
    which is convenient for studying the split on its own.
    """
    colors = top_colors(params.T, params.k, params.c)
    if vmap is None:
        index = {q: i for i, q in enumerate(colors)}
        return PtrLayout(params, colors, lambda j, q: 1 + index[q] * params.R + j)
    if regions is None:
        raise ValueError("binding to an encoding needs its regions")
    for q in colors:
        if q < FIRST_REGIONAL_COLOR:
            raise ValueError(f"top color {q} has no regional variables")
    chosen = closest_regions(regions, params.R)
    ids = [s.id for s in chosen]
    return PtrLayout(params, colors, lambda j, q: vmap.var_of_region(ids[j], q))


def ptr_cubes(params: SplitParams, regions: Optional[Sequence[Region]] = None,
              vmap: Optional[VarMap] = None, layout: Optional[PtrLayout] = None) -> Iterator[Cube]:
    """Stream the cubes: p = P down to 0, color subsets in lexicographic order,
    region tuples in row-major order. Positives come first in each cube."""
    if layout is None:
        layout = ptr_layout(params, regions, vmap)
    P, R = params.P, params.R
    colors = layout.colors
    var = layout.var
    index = 0
    for p in range(P, -1, -1):
        for chosen in combinations(colors, p):
            negs: Tuple[int, ...] = ()
            if p < P:
                negs = tuple(-var(j, q) for q in colors if q not in chosen for j in range(R))
            for tup in product(range(R), repeat=p):
                yield Cube(index, tuple(var(j, q) for j, q in zip(tup, chosen)) + negs)
                index += 1


# ---------------------------------------------------------------------------
# tautology checks


def _involved(cubes) -> List[int]:
    return sorted({abs(l) for c in cubes for l in c})


def tautology_brute_force(cubes, variables: Optional[Sequence[int]] = None, max_vars: int = 24) -> bool:
    cubes = [tuple(c) for c in cubes]
    variables = list(variables) if variables is not None else _involved(cubes)
    n = len(variables)
    if n > max_vars:
        raise ValueError(f"{n} variables is too many for brute force (limit {max_vars})")
    bit = {v: i for i, v in enumerate(variables)}
    assignments = np.arange(1 << n, dtype=np.uint32)
    covered = np.zeros(1 << n, dtype=bool)
    for cube in cubes:
        pos = neg = 0
        for l in cube:
            if l > 0:
                pos |= 1 << bit[l]
            else:
                neg |= 1 << bit[-l]
        if pos & neg:
            continue
        covered |= ((assignments & pos) == pos) & ((assignments & neg) == 0)
    return bool(covered.all())


def negation_formula(cubes) -> Formula:
    cubes = [tuple(c) for c in cubes]
    nv = max((abs(l) for c in cubes for l in c), default=0)
    return Formula(nv, [tuple(-l for l in c) for c in cubes])


def tautology_by_solver(cubes) -> bool:
    from .engine import solve

    return solve(negation_formula(cubes)).is_unsat


def check_tautology(cubes, variables: Optional[Sequence[int]] = None, method: str = "auto") -> bool:
    """Does every assignment satisfy some cube?  method: brute, sat, auto or both."""
    cubes = [tuple(c) for c in cubes]
    if method == "brute":
        return tautology_brute_force(cubes, variables)
    if method == "sat":
        return tautology_by_solver(cubes)
    n = len(variables) if variables is not None else len(_involved(cubes))
    if method == "both":
        a, b = tautology_brute_force(cubes, variables), tautology_by_solver(cubes)
        if a != b:
            raise AssertionError("brute-force and solver tautology checks disagree")
        return a
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    return tautology_brute_force(cubes, variables) if n <= 20 else tautology_by_solver(cubes)


def split_manifest(params: SplitParams, layout: PtrLayout) -> Dict:
    return {"P": params.P, "T": params.T, "R": params.R, "k": params.k, "c": params.c,
            "top_colors": layout.colors, "cubes": count_cubes(params.P, params.T, params.R)}
