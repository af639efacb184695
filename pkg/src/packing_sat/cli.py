"""Command-line interface.

Every subcommand prints machine-readable ``key=value`` lines and writes a JSON
manifest next to each output file. Exit codes: 0 done, 10 satisfiable,
20 unsatisfiable, 1 error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .cnf import Formula, parse_dimacs, write_dimacs, write_icnf
from .drat import parse_drat, write_drat
from .encoder import EncodingOptions, default_layer_colors, encode, encode_direct, manifest, place_regions
from .engine import SAT, UNSAT, extract_coloring, run_external, solve, solve_cubes
from .grid import verify_coloring
from .proof import (
    CertificationRefused,
    PipelineResult,
    certify_bound,
    check_pipeline,
    formula_digest,
    run_pipeline,
)
from .splitter import SplitParams, count_cubes, ptr_cubes, ptr_layout, split_manifest

EXIT_OK, EXIT_ERROR, EXIT_SAT, EXIT_UNSAT = 0, 1, 10, 20

log = logging.getLogger("packing_sat")


def _kv(**items) -> None:
    print(" ".join(f"{k}={_fmt(v)}" for k, v in items.items()), flush=True)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3f}"
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v)) or "-"
    return str(v)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_output(path: str, data: bytes, subcommand: str, args, extra: Optional[Dict] = None) -> None:
    Path(path).write_bytes(data)
    opts = {k: v for k, v in vars(args).items() if k != "func"}
    m = {"subcommand": subcommand, "options": opts, "tool_version": __version__,
         "output": os.path.basename(path), "output_sha256": _sha256(data)}
    m.update(extra or {})
    Path(path + ".json").write_text(json.dumps(m, indent=2, sort_keys=True, default=str) + "\n")


def _layers(args) -> tuple:
    if args.sym_layers:
        return tuple(int(t) for t in args.sym_layers.split(","))
    if args.sym:
        return default_layer_colors(args.r, args.k)
    return ()


def _options(args) -> EncodingOptions:
    return EncodingOptions(variant=args.variant, alod=args.alod, symmetry_layers=_layers(args),
                           chessboard=getattr(args, "chessboard", False),
                           definitions=getattr(args, "definitions", False))


def _split(text: Optional[str]):
    if not text:
        return None
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("--split takes P,T,R")
    return tuple(parts)


# ---------------------------------------------------------------------------


def cmd_encode(args) -> int:
    f, _ = encode(args.r, args.k, args.c, _options(args))
    if args.output:
        _write_output(args.output, write_dimacs(f), "encode", args, {"instance": manifest(f)})
    _kv(vars=f.num_vars, clauses=f.num_clauses, variant=args.variant, r=args.r, k=args.k, c=args.c,
        alod=int(args.alod), sym=list(_layers(args)), chessboard=int(args.chessboard))
    return EXIT_OK


def cmd_split(args) -> int:
    if args.count_only:
        _kv(cubes=count_cubes(args.P, args.T, args.R), P=args.P, T=args.T, R=args.R)
        return EXIT_OK
    params = SplitParams(args.P, args.T, args.R, args.k, args.c)
    if args.r is not None:
        f, vmap = encode(args.r, args.k, args.c, _options(args))
        layout = ptr_layout(params, place_regions(args.r), vmap)
    else:
        f, layout = Formula(0), ptr_layout(params)
    cubes = [c.lits for c in ptr_cubes(params, layout=layout)]
    if args.output:
        _write_output(args.output, write_icnf(f, cubes), "split", args, {"split": split_manifest(params, layout)})
    _kv(cubes=len(cubes), P=args.P, T=args.T, R=args.R, top_colors=layout.colors)
    return EXIT_OK


def _solve_formula(args):
    if args.cnf:
        return parse_dimacs(Path(args.cnf).read_bytes()), None
    if None in (args.r, args.k, args.c):
        raise ValueError("give either --cnf or -r/-k/-c")
    return encode(args.r, args.k, args.c, _options(args))


def cmd_solve(args) -> int:
    f, vmap = _solve_formula(args)
    split = _split(args.split)
    if split is not None:
        if vmap is None:
            raise ValueError("--split needs an instance given by -r/-k/-c")
        params = SplitParams(*split, args.k, args.c)
        layout = ptr_layout(params, place_regions(args.r), vmap)
        cubes = [c.lits for c in ptr_cubes(params, layout=layout)]
        rep = solve_cubes(f, cubes, workers=args.workers, proof=bool(args.proof_dir), budget=args.budget,
                          seed=args.seed, journal=args.journal, proof_dir=args.proof_dir)
        status = SAT if rep.satisfiable else UNSAT if rep.all_unsat else "UNKNOWN"
        if args.report:
            Path(args.report + ".csv").write_text(rep.to_csv())
            Path(args.report + ".json").write_text(json.dumps(rep.summary(), indent=2) + "\n")
        _kv(status=status, cubes=len(cubes), max_runtime=rep.max_runtime, avg_runtime=rep.avg_runtime,
            total_runtime=rep.total_runtime)
        return {SAT: EXIT_SAT, UNSAT: EXIT_UNSAT}.get(status, EXIT_OK)

    if args.external:
        res = run_external(f, args.external if args.external != "env" else None)
    else:
        res = solve(f, budget=args.budget, proof=bool(args.proof), seed=args.seed)
    stats = {k: v for k, v in res.stats.items()}
    _kv(status=res.status, **stats)
    if res.is_sat and vmap is not None:
        col = extract_coloring(res.model, vmap, args.r, args.k)
        bad = verify_coloring(col, args.k)
        if bad is not None:
            print(f"error: extracted coloring is invalid: {bad}", file=sys.stderr)
            return EXIT_ERROR
        _kv(coloring="valid", center=col[(0, 0)])
        if args.coloring:
            Path(args.coloring).write_text(col.to_text())
        if not args.quiet:
            print(col.render())
    if res.is_unsat and args.proof:
        Path(args.proof).write_text(write_drat(res.proof))
    return {SAT: EXIT_SAT, UNSAT: EXIT_UNSAT}.get(res.status, EXIT_OK)


def _pipeline(args) -> PipelineResult:
    return run_pipeline(args.r, args.k, args.c, variant=args.variant, alod=args.alod, symmetry=_layers(args),
                        split=_split(args.split), workers=args.workers, seed=args.seed)


def _save_pipeline(res: PipelineResult, out: Path, args) -> None:
    out.mkdir(parents=True, exist_ok=True)
    if res.run is not None:
        (out / "cubes.csv").write_text(res.run.to_csv())
    summary = res.summary()
    if res.proof is not None:
        text = write_drat(res.proof).encode()
        (out / "proof.drat").write_bytes(text)
        summary["proof_sha256"] = _sha256(text)
        summary["trusted_prefix"] = res.proof.meta.get("trusted_prefix", 0)
        summary["parts"] = res.proof.meta.get("parts", [])
    summary["direct_sha256"] = formula_digest(res.direct)
    summary["tool_version"] = __version__
    summary["seed"] = args.seed
    (out / "pipeline.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def cmd_pipeline(args) -> int:
    res = _pipeline(args)
    if args.out_dir:
        _save_pipeline(res, Path(args.out_dir), args)
    _kv(**{k: v for k, v in res.summary().items() if not isinstance(v, dict)})
    if res.status == "SAT":
        print("verdict: satisfiable; no lower bound follows", file=sys.stderr)
        return EXIT_SAT
    if res.status != "UNSAT":
        print(f"error: proof check failed: {res.check.message if res.check else 'no proof'}", file=sys.stderr)
        return EXIT_ERROR
    if args.prior is not None:
        cert = certify_bound(args.r, args.k, args.c, args.prior, res, args.prior_source)
        if args.out_dir:
            (Path(args.out_dir) / "certificate.json").write_text(cert.to_json() + "\n")
        _kv(certificate=cert.statement().replace(" ", ""))
    return EXIT_OK


class _Evidence:
    """A re-checked proof file, shaped like a pipeline result for certify_bound."""

    def __init__(self, r, k, c, direct, proof, check):
        self.r, self.k, self.c = r, k, c
        self.direct, self.proof, self.check = direct, proof, check
        self.proved = check.ok


def cmd_certify(args) -> int:
    if args.from_dir:
        d = Path(args.from_dir)
        info = json.loads((d / "pipeline.json").read_text())
        if (info["r"], info["k"], info["c"]) != (args.r, args.k, args.c):
            raise ValueError("pipeline directory is about a different instance")
        direct, _ = encode_direct(args.r, args.k, args.c)
        if formula_digest(direct) != info["direct_sha256"]:
            raise ValueError("direct encoding digest does not match the pipeline manifest")
        raw = (d / "proof.drat").read_bytes()
        if _sha256(raw) != info.get("proof_sha256"):
            raise ValueError("proof file digest does not match the pipeline manifest")
        proof = parse_drat(raw, "solver")
        proof.tag = "pipeline"
        proof.meta["trusted_prefix"] = info.get("trusted_prefix", 0)
        proof.meta["parts"] = info.get("parts", [])
        ev = _Evidence(args.r, args.k, args.c, direct, proof, check_pipeline(direct, proof))
    else:
        ev = _pipeline(args)
    try:
        cert = certify_bound(args.r, args.k, args.c, args.prior, ev, args.prior_source)
    except CertificationRefused as e:
        print(f"error: certification refused: {e}", file=sys.stderr)
        return EXIT_ERROR
    text = cert.to_json() + "\n"
    if args.output:
        Path(args.output).write_text(text)
    _kv(certificate=cert.statement().replace(" ", ""), trusted=cert.trusted)
    return EXIT_OK


def cmd_sweep_center(args) -> int:
    rows = ["c,status,wall,conflicts"]
    print(rows[0], flush=True)
    for c in range(1, args.k + 1):
        f, _ = encode(args.r, args.k, c, EncodingOptions(variant=args.variant, alod=args.alod))
        res = solve(f, budget=args.budget, seed=args.seed)
        line = f"{c},{res.status},{res.stats['wall']:.4f},{res.stats['conflicts']}"
        rows.append(line)
        print(line, flush=True)
    if args.output:
        Path(args.output).write_text("\n".join(rows) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _instance(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("-r", type=int, required=required, help="diamond radius")
    p.add_argument("-k", type=int, required=required, help="number of colors")
    p.add_argument("-c", type=int, required=required, help="center color")


def _encoding(p: argparse.ArgumentParser, variant: str = "direct") -> None:
    p.add_argument("--variant", choices=("direct", "plus"), default=variant)
    p.add_argument("--alod", action="store_true", help="add at-least-one-distance clauses")
    p.add_argument("--sym", action="store_true", help="add the default symmetry-breaking layers")
    p.add_argument("--sym-layers", help="comma-separated layer colors (overrides --sym)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="packing-sat", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="write the CNF of D_{r,k,c}")
    _instance(p)
    _encoding(p)
    p.add_argument("--chessboard", action="store_true", help="fix color 1 on odd vertices")
    p.add_argument("--definitions", action="store_true", help="emit region definition clauses")
    p.add_argument("-o", "--output", help="DIMACS output path")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("split", help="generate PTR cubes")
    p.add_argument("-r", type=int, help="bind to the plus encoding of this radius")
    p.add_argument("-k", type=int, default=14)
    p.add_argument("-c", type=int, default=6)
    p.add_argument("-P", type=int, required=True)
    p.add_argument("-T", type=int, default=None)
    p.add_argument("-R", type=int, default=None)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("-o", "--output", help="iCNF output path")
    p.set_defaults(func=cmd_split, variant="plus", alod=False, sym=False, sym_layers=None)

    p = sub.add_parser("solve", help="solve an instance, optionally split into cubes")
    _instance(p, required=False)
    _encoding(p, "plus")
    p.add_argument("--cnf", help="solve this DIMACS file instead")
    p.add_argument("--split", help="P,T,R")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, help="conflict limit per solver call")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--external", help="solver command template with {path}, or 'env' for $PACKING_SAT_SOLVER")
    p.add_argument("--proof", help="write the DRAT proof here (UNSAT only)")
    p.add_argument("--proof-dir", help="per-cube DRAT proofs (with --split)")
    p.add_argument("--journal", help="JSONL journal for resumable cube runs")
    p.add_argument("--report", help="prefix for the cube report (.csv/.json)")
    p.add_argument("--coloring", help="write the coloring here (SAT only)")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_solve, chessboard=False)

    for name, func in (("pipeline", cmd_pipeline), ("certify", cmd_certify)):
        p = sub.add_parser(name, help="prove and check" if name == "pipeline" else "emit a bound certificate")
        _instance(p)
        _encoding(p, "plus")
        p.add_argument("--split", help="P,T,R (default: a single empty cube)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--prior", type=int, required=(name == "certify"), help="known lower bound on chi_rho")
        p.add_argument("--prior-source", default="", help="where the prior bound comes from")
        if name == "pipeline":
            p.add_argument("--out-dir", help="directory for proof, report and manifests")
        else:
            p.add_argument("--from", dest="from_dir", help="re-check a pipeline output directory")
            p.add_argument("-o", "--output", help="certificate JSON path")
        p.set_defaults(func=func)

    p = sub.add_parser("sweep-center", help="solve D_{r,k,c} for every center color c")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--variant", choices=("direct", "plus"), default="plus")
    p.add_argument("--alod", action="store_true")
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="CSV output path")
    p.set_defaults(func=cmd_sweep_center)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "split":
        if args.T is None:
            args.T = max(args.P, 7 if args.count_only else args.P)
        if args.R is None:
            args.R = 9
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
