"""Clausal proofs: a compact in-memory segment type and the text DRAT format.

A segment is a list of (add | delete, clause) steps. Solver proofs can hold
millions of clauses, so a segment stores its steps in flat numpy arrays
rather than as Python tuples. Each addition may carry an explicit RAT pivot;
``0`` means "no pivot", i.e. the clause is expected to be RUP.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

ADD = 1
DELETE = 2

TAGS = ("symmetry", "reencoding", "implication", "tautology", "solver", "pipeline")


class ProofStep(NamedTuple):
    op: int
    clause: Tuple[int, ...]
    pivot: int = 0

    @property
    def is_add(self) -> bool:
        return self.op == ADD


@dataclass
class ProofSegment:
    """Ordered clause additions and deletions with a provenance tag."""

    tag: str = "solver"
    ops: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    offsets: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))
    lits: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int32))
    pivots: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int32))
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown provenance tag {self.tag!r}")

    @classmethod
    def from_steps(cls, steps: Iterable, tag: str = "solver", meta: Optional[dict] = None) -> "ProofSegment":
        ops, offsets, lits, pivots = [], [0], [], []
        for step in steps:
            step = ProofStep(*step)
            if step.op not in (ADD, DELETE):
                raise ValueError(f"bad proof opcode {step.op}")
            if step.pivot and step.pivot not in step.clause:
                raise ValueError(f"pivot {step.pivot} not in clause {step.clause}")
            ops.append(step.op)
            lits.extend(step.clause)
            offsets.append(len(lits))
            pivots.append(step.pivot)
        return cls(
            tag,
            np.array(ops, dtype=np.int8),
            np.array(offsets, dtype=np.int64),
            np.array(lits, dtype=np.int32),
            np.array(pivots, dtype=np.int32),
            dict(meta or {}),
        )

    @classmethod
    def from_stream(cls, stream: np.ndarray, tag: str = "solver") -> "ProofSegment":
        """Decode the solver kernel's flat ``op, size, lits...`` record stream."""
        from .cdcl import split_stream

        ops, offsets, lits = split_stream(np.asarray(stream, dtype=np.int32))
        return cls(tag, ops, offsets, lits, np.zeros(len(ops), dtype=np.int32))

    def __len__(self) -> int:
        return len(self.ops)

    def step(self, i: int) -> ProofStep:
        a, b = self.offsets[i], self.offsets[i + 1]
        return ProofStep(int(self.ops[i]), tuple(int(x) for x in self.lits[a:b]), int(self.pivots[i]))

    def __iter__(self) -> Iterator[ProofStep]:
        for i in range(len(self)):
            yield self.step(i)

    @property
    def num_additions(self) -> int:
        return int(np.count_nonzero(self.ops == ADD))

    @property
    def num_deletions(self) -> int:
        return int(np.count_nonzero(self.ops == DELETE))

    def derives_empty_clause(self) -> bool:
        adds = np.flatnonzero(self.ops == ADD)
        return bool(len(adds)) and self.offsets[adds[-1]] == self.offsets[adds[-1] + 1]

    def last_addition(self) -> Optional[Tuple[int, ...]]:
        adds = np.flatnonzero(self.ops == ADD)
        return self.step(int(adds[-1])).clause if len(adds) else None

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.ops.tobytes())
        h.update(self.offsets.tobytes())
        h.update(self.lits.tobytes())
        h.update(self.pivots.tobytes())
        return h.hexdigest()


def concat(segments: Sequence[ProofSegment], tag: Optional[str] = None) -> ProofSegment:
    if not segments:
        return ProofSegment(tag or "solver")
    ops = np.concatenate([s.ops for s in segments])
    lits = np.concatenate([s.lits for s in segments])
    pivots = np.concatenate([s.pivots for s in segments])
    sizes = np.concatenate([np.diff(s.offsets) for s in segments])
    offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    return ProofSegment(tag or segments[0].tag, ops, offsets, lits.astype(np.int32), pivots.astype(np.int32))


def live_additions(segment: ProofSegment) -> List[Tuple[int, ...]]:
    """Clauses added by the segment and not deleted again by it (multiset semantics)."""
    live = {}
    for step in segment:
        key = tuple(sorted(step.clause))
        if step.op == ADD:
            live.setdefault(key, []).append(step.clause)
        elif live.get(key):
            live[key].pop()
    return [c for cs in live.values() for c in cs]


# ---------------------------------------------------------------------------
# text DRAT


def write_drat(segment: ProofSegment, out=None) -> Optional[str]:
    """Write text DRAT. RAT pivots are moved to the front, as DRAT checkers expect."""
    buf = out if out is not None else io.StringIO()
    for step in segment:
        clause = step.clause
        if step.pivot and clause and clause[0] != step.pivot:
            clause = (step.pivot,) + tuple(l for l in clause if l != step.pivot)
        body = " ".join(map(str, clause))
        prefix = "d " if step.op == DELETE else ""
        buf.write(f"{prefix}{body} 0\n" if body else f"{prefix}0\n")
    return buf.getvalue() if out is None else None


def parse_drat(text, tag: str = "solver", pivots: bool = True) -> ProofSegment:
    """Parse text DRAT; with ``pivots`` the first literal of each addition is its RAT pivot."""
    if isinstance(text, bytes):
        text = text.decode()
    steps = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        op = ADD
        if line.startswith("d"):
            op = DELETE
            line = line[1:]
        try:
            lits = [int(t) for t in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: malformed DRAT line") from None
        if not lits or lits[-1] != 0 or 0 in lits[:-1]:
            raise ValueError(f"line {lineno}: clause must end with a single 0")
        clause = tuple(lits[:-1])
        pivot = clause[0] if (pivots and op == ADD and clause) else 0
        steps.append(ProofStep(op, clause, pivot))
    return ProofSegment.from_steps(steps, tag)
