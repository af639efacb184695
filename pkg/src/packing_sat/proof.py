"""End-to-end unsatisfiability proofs and the bound certificate.

A full proof starts from the direct encoding and proceeds in four parts:

* symmetry: symmetry-breaking clauses, admitted as trusted axioms;
* re-encoding: RAT additions turning the direct encoding into the optimized one;
* implication: one solver proof per cube, each ending with the cube's negation;
* tautology: a resolution refutation of the negated cubes.

:func:`run_pipeline` builds all parts, concatenates them and checks the result
against the direct encoding with the forward checker.
"""

from __future__ import annotations

import hashlib
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .checker import CheckReport, rup_check_forward
from .cnf import Formula, write_dimacs
from .drat import ADD, DELETE, ProofSegment, ProofStep, concat
from .encoder import (
    EncodingOptions,
    FIRST_REGIONAL_COLOR,
    add_symmetry_layers,
    alod_clauses,
    encode,
    encode_direct,
    plus_parts,
    region_region_span,
    vertex_region_span,
)
from .engine import CubeRunReport, solve, solve_cubes
from .splitter import Cube, PtrLayout, SplitParams, negation_formula, ptr_cubes, ptr_layout

PIPELINE_ORDER = ("symmetry", "reencoding", "implication", "tautology")


class ProofConstructionError(RuntimeError):
    pass


def _key(clause) -> Tuple[int, ...]:
    return tuple(sorted(clause))


# ---------------------------------------------------------------------------
# re-encoding


def _plus_steps(r: int, k: int, c: int, definitions: bool) -> Tuple[List[ProofStep], List[Tuple[int, ...]]]:
    """RAT additions producing the plus clauses, plus helper clauses to delete afterwards.

    Region-region clauses need, as RAT support, the region-vertex clauses
    between one region and the members of the other. The plus encoding leaves
    those out, so they are added first and removed again.
    """
    vmap, regions, parts = plus_parts(r, k, c, definitions)
    steps: List[ProofStep] = []
    for clause in parts["definition"]:
        steps.append(ProofStep(ADD, clause, clause[0]))
    for clause in parts["membership"]:
        steps.append(ProofStep(ADD, clause, clause[0]))
    for clause in parts["region_vertex"]:
        steps.append(ProofStep(ADD, clause, clause[0]))
    present = {_key(s.clause) for s in steps}
    helpers = []
    by_id = {reg.id: reg for reg in regions}
    for clause in parts["region_region"]:
        ri, rj = -clause[0], -clause[1]
        (_, a, t), (_, b, _) = vmap.decode(ri), vmap.decode(rj)
        for rid, other in ((ri, by_id[b]), (rj, by_id[a])):
            for u in other.members:
                h = (-rid, -vmap.x(u, t))
                if _key(h) not in present:
                    present.add(_key(h))
                    helpers.append(h)
                    steps.append(ProofStep(ADD, h, h[0]))
    for clause in parts["region_region"]:
        steps.append(ProofStep(ADD, clause, clause[0]))
    return steps, helpers


def reencoding_proof(direct: Formula, optimized: Formula, check: bool = True) -> ProofSegment:
    """RAT additions and deletions turning ``direct`` into ``optimized`` exactly.

    Both formulas must describe the same instance; symmetry clauses, if any,
    must already be present in both (they are not part of this step).
    """
    dm, om = direct.meta, optimized.meta
    for key in ("r", "k", "c"):
        if dm.get(key) != om.get(key):
            raise ValueError(f"instance mismatch on {key}: {dm.get(key)} vs {om.get(key)}")
    if dm.get("variant") != "direct" or dm.get("alod"):
        raise ValueError("the source formula must be the plain direct encoding")
    if list(dm.get("symmetry_layers", [])) != list(om.get("symmetry_layers", [])):
        raise ValueError("symmetry layers differ; add them with a symmetry segment first")
    if om.get("chessboard") or dm.get("chessboard"):
        raise ValueError("chessboard fixing is not satisfiability preserving and has no re-encoding proof")
    r, k, c = om["r"], om["k"], om["c"]
    steps: List[ProofStep] = []
    helpers: List[Tuple[int, ...]] = []
    if om.get("variant") == "plus" and k >= FIRST_REGIONAL_COLOR:
        if optimized.num_vars < direct.num_vars:
            raise ValueError("optimized formula lacks variables of the direct encoding")
        plus_steps, helpers = _plus_steps(r, k, c, bool(om.get("definitions")))
        steps.extend(plus_steps)
    if om.get("alod"):
        for clause in alod_clauses(r, _vmap_of(om)):
            steps.append(ProofStep(ADD, clause, clause[0]))
    for h in helpers:
        steps.append(ProofStep(DELETE, h))
    target = Counter(_key(cl) for cl in optimized.clauses)
    acc = Counter(_key(cl) for cl in direct.clauses)
    for s in steps:
        if s.op == ADD:
            acc[_key(s.clause)] += 1
        else:
            acc[_key(s.clause)] -= 1
    for cl in direct.clauses:
        key = _key(cl)
        if acc[key] > target.get(key, 0):
            acc[key] -= 1
            steps.append(ProofStep(DELETE, cl))
    acc = +acc
    if acc != target:
        missing = list((target - acc).elements())[:3]
        extra = list((acc - target).elements())[:3]
        raise ProofConstructionError(f"re-encoding does not reach the target: missing {missing}, extra {extra}")
    seg = ProofSegment.from_steps(steps, "reencoding")
    if check:
        rep = rup_check_forward(direct, seg, claim_unsat=False)
        if not rep.ok:
            raise ProofConstructionError(f"re-encoding clause {rep.failed_clause} fails its RAT check")
    return seg


def _vmap_of(meta):
    from .cnf import VarMap

    return VarMap(meta["r"], meta["k"])


def symmetry_segment(direct: Formula, layer_colors: Sequence[int]) -> ProofSegment:
    """The symmetry-breaking clauses as trusted additions."""
    r, k = direct.meta["r"], direct.meta["k"]
    with_sym = add_symmetry_layers(direct, r, k, layer_colors)
    extra = with_sym.clauses[len(direct.clauses):]
    return ProofSegment.from_steps([ProofStep(ADD, cl) for cl in extra], "symmetry",
                                   meta={"trusted": True, "layers": list(layer_colors)})


# ---------------------------------------------------------------------------
# tautology


def _ptr_tree_steps(layout: PtrLayout, negated: set) -> List[ProofStep]:
    P, R = layout.params.P, layout.params.R
    colors, var = layout.colors, layout.var
    steps: List[ProofStep] = []
    leaves = []

    def leaf(chosen, ci, budget):
        clause = tuple(-l for l in chosen)
        if budget > 0:
            used = {q for q, _ in chosen_colors(chosen)}
            clause += tuple(var(j, q) for q in colors if q not in used for j in range(R))
        return clause

    color_of = {var(j, q): q for q in colors for j in range(R)}

    def chosen_colors(chosen):
        return [(color_of[l], l) for l in chosen]

    def node(chosen, ci, budget):
        if budget == 0 or ci == len(colors):
            clause = leaf(chosen, ci, budget)
            if _key(clause) not in negated:
                raise ProofConstructionError(f"cube set lacks the case {tuple(-l for l in clause)}")
            leaves.append(clause)
            return clause
        q = colors[ci]
        children = [node(chosen + (var(j, q),), ci + 1, budget - 1) for j in range(R)]
        cur = node(chosen, ci + 1, budget)
        for j in range(R):
            lit = var(j, q)
            cur = tuple(l for l in cur if l != lit) + tuple(l for l in children[j] if l != -lit and l not in cur)
            steps.append(ProofStep(ADD, cur))
        return cur

    root = node((), 0, P)
    if root:
        raise ProofConstructionError("the resolution tree does not end in the empty clause")
    if len(leaves) != len(negated):
        raise ProofConstructionError("cube set has cases outside the split")
    return steps


def tautology_proof(cubes, layout: Optional[PtrLayout] = None) -> ProofSegment:
    """Refute the negated cubes.

    For a PTR split (``layout`` given) this is a tree of m - 1 binary
    resolutions following the split's decision tree. Otherwise the negated
    cubes are handed to the solver and its proof is used.
    """
    cubes = [tuple(c) for c in cubes]
    if not cubes:
        raise ProofConstructionError("an empty set of cubes is not a tautology")
    if any(len(c) == 0 for c in cubes):
        return ProofSegment("tautology", meta={"method": "empty-cube"})
    negated = {_key(-l for l in c) for c in cubes}
    if layout is not None and len(negated) == len(cubes):
        try:
            return ProofSegment.from_steps(_ptr_tree_steps(layout, negated), "tautology",
                                           meta={"method": "ptr-tree"})
        except ProofConstructionError:
            pass
    res = solve(negation_formula(cubes), proof=True)
    if not res.is_unsat:
        raise ProofConstructionError("the cubes are not a tautology: their negation is satisfiable")
    seg = res.proof
    seg.tag = "tautology"
    seg.meta["method"] = "solver"
    return seg


# ---------------------------------------------------------------------------
# concatenation


def concat_pipeline(parts: Sequence[ProofSegment]) -> ProofSegment:
    """Concatenate proof parts in the order symmetry, re-encoding, implication, tautology.

    Each part is optional, but the order is enforced. Symmetry steps are
    recorded as trusted in ``meta['trusted_prefix']``.
    """
    rank = -1
    for p in parts:
        if p.tag not in PIPELINE_ORDER:
            raise ValueError(f"segment tagged {p.tag!r} cannot be part of a pipeline")
        rk = PIPELINE_ORDER.index(p.tag)
        if rk < rank:
            raise ValueError(f"{p.tag} part after {PIPELINE_ORDER[rank]} part")
        rank = rk
    seg = concat(list(parts), "pipeline")
    seg.meta["parts"] = [(p.tag, len(p)) for p in parts]
    seg.meta["trusted_prefix"] = sum(len(p) for p in parts if p.tag == "symmetry")
    return seg


def check_pipeline(direct: Formula, seg: ProofSegment, claim_unsat: bool = True) -> CheckReport:
    mask = np.zeros(len(seg), dtype=np.int8)
    mask[: seg.meta.get("trusted_prefix", 0)] = 1
    return rup_check_forward(direct, seg, claim_unsat=claim_unsat, trusted=(), trusted_mask=mask)


# ---------------------------------------------------------------------------
# the whole pipeline


@dataclass
class PipelineResult:
    status: str  # "UNSAT" (proved), "SAT" (a cube is satisfiable) or "FAILED" (proof rejected)
    r: int
    k: int
    c: int
    options: Dict
    direct: Formula
    optimized: Formula
    cubes: List[Tuple[int, ...]]
    run: Optional[CubeRunReport] = None
    proof: Optional[ProofSegment] = None
    check: Optional[CheckReport] = None
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def proved(self) -> bool:
        return self.status == "UNSAT"

    def summary(self) -> Dict:
        out = {"status": self.status, "r": self.r, "k": self.k, "c": self.c, "cubes": len(self.cubes)}
        out.update(self.options)
        out.update({f"time_{k}": round(v, 3) for k, v in self.timings.items()})
        if self.proof is not None:
            out["proof_steps"] = len(self.proof)
        if self.check is not None:
            out["check_ok"] = self.check.ok
        return out


def run_pipeline(
    r: int,
    k: int,
    c: int,
    variant: str = "plus",
    alod: bool = False,
    symmetry: Sequence[int] = (),
    split: Optional[Tuple[int, int, int]] = None,
    workers: int = 1,
    seed: int = 0,
) -> PipelineResult:
    """Encode, split, solve every cube with proofs, assemble and check the full proof."""
    timings: Dict[str, float] = {}
    t0 = time.perf_counter()
    direct, _ = encode_direct(r, k, c)
    opts = EncodingOptions(variant=variant, alod=alod, symmetry_layers=tuple(symmetry))
    optimized, vmap = encode(r, k, c, opts)
    parts: List[ProofSegment] = []
    base = direct
    if symmetry:
        sym = symmetry_segment(direct, symmetry)
        parts.append(sym)
        base = add_symmetry_layers(direct, r, k, symmetry)
    parts.append(reencoding_proof(base, optimized))
    layout = None
    if split is None:
        cubes: List[Tuple[int, ...]] = [()]
    else:
        P, T, R = split
        params = SplitParams(P, T, R, k, c)
        from .encoder import place_regions

        layout = ptr_layout(params, place_regions(r), vmap)
        cubes = [cube.lits for cube in ptr_cubes(params, layout=layout)]
    timings["build"] = time.perf_counter() - t0
    options = {"variant": variant, "alod": alod, "symmetry": list(symmetry), "split": list(split or ())}
    result = PipelineResult("FAILED", r, k, c, options, direct, optimized, cubes, timings=timings)

    t0 = time.perf_counter()
    run = solve_cubes(optimized, cubes, workers=workers, proof=True, seed=seed)
    timings["solve"] = run.total_runtime
    timings["solve_wall"] = time.perf_counter() - t0
    result.run = run
    if run.satisfiable:
        result.status = "SAT"
        return result
    if not run.all_unsat:
        return result
    parts.append(run.implication_proof())
    parts.append(tautology_proof(cubes, layout))
    proof = concat_pipeline(parts)
    result.proof = proof
    t0 = time.perf_counter()
    result.check = check_pipeline(direct, proof)
    timings["check"] = time.perf_counter() - t0
    result.status = "UNSAT" if result.check.ok else "FAILED"
    return result


# ---------------------------------------------------------------------------
# bound certificate


def formula_digest(f: Formula) -> str:
    return hashlib.sha256(write_dimacs(f)).hexdigest()


@dataclass
class BoundCertificate:
    r: int
    k: int
    c: int
    prior_bound: int
    prior_source: str
    conclusion: int
    evidence: Dict
    trusted: List[str]
    argument: List[str]

    def statement(self) -> str:
        return f"chi_rho(Z^2) >= {self.conclusion}"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


class CertificationRefused(ValueError):
    pass


def certify_bound(r: int, k: int, c: int, prior_bound: int, evidence, prior_source: str = "") -> BoundCertificate:
    """Turn a checked refutation of D_{r,k,c} plus a prior bound >= k into the bound k + 1.

    ``evidence`` is a :class:`PipelineResult` (or any object with ``proved``,
    ``direct``, ``proof`` and ``check`` attributes) for the same instance.
    """
    if not 1 <= c <= k:
        raise CertificationRefused(f"center color {c} must lie in 1..{k}")
    if prior_bound < k:
        raise CertificationRefused(f"prior bound {prior_bound} is below k={k}")
    if not getattr(evidence, "proved", False) or evidence.check is None or not evidence.check.ok:
        raise CertificationRefused("no checked unsatisfiability proof was supplied")
    if (evidence.r, evidence.k, evidence.c) != (r, k, c):
        raise CertificationRefused(
            f"evidence is about D_{evidence.r},{evidence.k},{evidence.c}, not D_{r},{k},{c}")
    trusted = ["symmetry"] if evidence.proof.meta.get("trusted_prefix", 0) else []
    argument = [
        f"Suppose the grid has a packing {k}-coloring phi. Because chi_rho >= {k} (prior bound {prior_bound}), "
        f"phi uses color {k} somewhere.",
        f"If phi uses color {c} at some vertex v, restricting phi to the radius-{r} diamond around v "
        f"satisfies D_{r},{k},{c}, which the proof refutes.",
        f"Otherwise recolor every vertex of color {k} with color {c}: since {c} <= {k} and color {c} was unused, "
        f"the result is a packing coloring without color {k}, i.e. a packing {k - 1}-coloring, "
        f"contradicting chi_rho >= {k}.",
        f"Hence chi_rho(Z^2) >= {k + 1}.",
    ]
    ev = {
        "direct_formula_sha256": formula_digest(evidence.direct),
        "proof_sha256": evidence.proof.digest(),
        "proof_steps": len(evidence.proof),
        "checker": "forward RUP/RAT",
        "check_ok": True,
        "parts": evidence.proof.meta.get("parts", []),
    }
    return BoundCertificate(r, k, c, prior_bound, prior_source, k + 1, ev, trusted, argument)
