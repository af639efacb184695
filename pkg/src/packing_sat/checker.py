"""Forward DRAT checker.

Each added clause must be RUP with respect to the accumulated formula, or RAT
on its declared pivot. The checker keeps the top-level unit-propagation
closure of the accumulated formula, so a RUP check only propagates the
negated clause on top of it. Once the accumulated formula propagates to a
conflict every later addition is trivially implied, until a deletion
possibly restores consistency; the closure is then rebuilt from scratch
before the next addition.

Deleted clauses are matched against live clauses as literal sets. Deleting a
clause that is the reason of a top-level literal triggers a recomputation of
the closure, so the checker never relies on a deleted clause.

This module is deliberately independent of the solver kernel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from numba import njit, types
from numba.typed import Dict

from .cnf import Formula
from .drat import ADD, DELETE, ProofSegment

FAIL_NONE = 0
FAIL_LEMMA = 1
FAIL_PIVOT = 2


@njit(cache=True)
def _grow(a, need):
    if need <= a.size:
        return a
    b = np.empty(max(need, 2 * a.size + 16), dtype=a.dtype)
    b[: a.size] = a
    return b


@njit(cache=True)
def _enc(d):
    return 2 * (abs(d) - 1) + (1 if d < 0 else 0)


@njit(cache=True)
def _mix(lit):
    z = (np.uint64(lit) + np.uint64(0x9E3779B97F4A7C15))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _hash(ca, st, sz):
    h = np.uint64(sz)
    for i in range(sz):
        h += _mix(ca[st + i])
    return np.int64(h >> np.uint64(1))


@njit(cache=True)
def _push(pool, start, length, cap, top, lit, cid, blk):
    n = length[lit]
    if n == cap[lit]:
        newcap = 4 if cap[lit] == 0 else 2 * cap[lit]
        pool = _grow(pool, top + 2 * newcap)
        s = start[lit]
        for i in range(2 * n):
            pool[top + i] = pool[s + i]
        start[lit] = top
        cap[lit] = newcap
        top += 2 * newcap
    s = start[lit] + 2 * n
    pool[s] = cid
    pool[s + 1] = blk
    length[lit] = n + 1
    return pool, top


@njit(cache=True)
def _attach(pool, start, length, cap, top, ca, st, n, cid):
    """Watch the first two literals; binary clauses are flagged by a negative id."""
    wid = -cid - 1 if n == 2 else cid
    pool, top = _push(pool, start, length, cap, top, ca[st], wid, ca[st + 1])
    pool, top = _push(pool, start, length, cap, top, ca[st + 1], wid, ca[st])
    return pool, top


@njit(cache=True)
def _propagate(ca, c_start, c_size, alive, lval, reason, trail, tlen, qhead,
               pool, w_start, w_len, w_cap, w_top):
    """Unit propagation from qhead; returns (conflict, tlen, pool, w_top)."""
    while qhead < tlen:
        fl = trail[qhead] ^ 1
        qhead += 1
        ws = w_start[fl]
        wn = w_len[fl]
        i = 0
        j = 0
        conflict = False
        while i < wn:
            cid = pool[ws + 2 * i]
            blk = pool[ws + 2 * i + 1]
            i += 1
            if lval[blk] == 1:
                # satisfied by the blocker (dead entries are dropped on a later visit)
                pool[ws + 2 * j] = cid
                pool[ws + 2 * j + 1] = blk
                j += 1
                continue
            if cid < 0:
                # binary clause: the blocker is the other literal
                bc = -cid - 1
                if alive[bc] == 0:
                    continue
                pool[ws + 2 * j] = cid
                pool[ws + 2 * j + 1] = blk
                j += 1
                vb = lval[blk]
                if vb == -1:
                    while i < wn:
                        pool[ws + 2 * j] = pool[ws + 2 * i]
                        pool[ws + 2 * j + 1] = pool[ws + 2 * i + 1]
                        i += 1
                        j += 1
                    w_len[fl] = j
                    return True, tlen, pool, w_top
                lval[blk] = 1
                lval[blk ^ 1] = -1
                reason[blk >> 1] = bc
                trail[tlen] = blk
                tlen += 1
                continue
            if alive[cid] == 0:
                continue
            st = c_start[cid]
            if ca[st] == fl:
                ca[st] = ca[st + 1]
                ca[st + 1] = fl
            first = ca[st]
            if first != blk and lval[first] == 1:
                pool[ws + 2 * j] = cid
                pool[ws + 2 * j + 1] = first
                j += 1
                continue
            moved = False
            for kk in range(2, c_size[cid]):
                lk = ca[st + kk]
                if lval[lk] != -1:
                    ca[st + 1] = lk
                    ca[st + kk] = fl
                    pool, w_top = _push(pool, w_start, w_len, w_cap, w_top, lk, cid, first)
                    ws = w_start[fl]
                    moved = True
                    break
            if moved:
                continue
            pool[ws + 2 * j] = cid
            pool[ws + 2 * j + 1] = first
            j += 1
            if lval[first] == -1:
                conflict = True
                while i < wn:
                    pool[ws + 2 * j] = pool[ws + 2 * i]
                    pool[ws + 2 * j + 1] = pool[ws + 2 * i + 1]
                    i += 1
                    j += 1
                w_len[fl] = j
                return True, tlen, pool, w_top
            lval[first] = 1
            lval[first ^ 1] = -1
            reason[first >> 1] = cid
            trail[tlen] = first
            tlen += 1
        w_len[fl] = j
    return False, tlen, pool, w_top


@njit(cache=True)
def _undo(lval, reason, trail, tlen, mark):
    for q in range(tlen - 1, mark - 1, -1):
        lit = trail[q]
        lval[lit] = 0
        lval[lit ^ 1] = 0
        reason[lit >> 1] = -1
    return mark


@njit(cache=True)
def _rup(ca, c_start, c_size, alive, lval, reason, trail, tlen, pool, w_start, w_len, w_cap, w_top,
         lits, n, skip1, skip2):
    """Is the clause ``lits[:n]`` minus the literals skip1/skip2 implied by unit propagation?

    Returns (result, pool, w_top); the assignment is restored afterwards.
    A tautological literal set counts as implied.
    """
    mark = tlen
    implied = False
    for q in range(n):
        l = lits[q]
        if l == skip1 or l == skip2:
            continue
        if lval[l] == 1:
            implied = True
            break
        if lval[l] == 0:
            lval[l ^ 1] = 1
            lval[l] = -1
            reason[l >> 1] = -1
            trail[tlen] = l ^ 1
            tlen += 1
    if not implied:
        implied, tlen, pool, w_top = _propagate(ca, c_start, c_size, alive, lval, reason, trail,
                                                tlen, mark, pool, w_start, w_len, w_cap, w_top)
    _undo(lval, reason, trail, tlen, mark)
    return implied, pool, w_top


@njit(cache=True)
def _rebuild(ca, c_start, c_size, alive, next_id, lval, reason, trail, tlen,
             pool, w_start, w_len, w_cap, w_top):
    """Recompute watches and the top-level closure of the live clauses from scratch.

    Returns (inconsistent, tlen, pool, w_top).
    """
    tlen = _undo(lval, reason, trail, tlen, 0)
    w_len[:] = 0
    bad = False
    for cid in range(next_id):
        if alive[cid] == 0:
            continue
        n = c_size[cid]
        st = c_start[cid]
        if n == 0:
            bad = True
        elif n >= 2:
            pool, w_top = _attach(pool, w_start, w_len, w_cap, w_top, ca, st, n, cid)
    if bad:
        return True, tlen, pool, w_top
    for cid in range(next_id):
        if alive[cid] == 0 or c_size[cid] != 1:
            continue
        l0 = ca[c_start[cid]]
        if lval[l0] == -1:
            return True, tlen, pool, w_top
        if lval[l0] == 0:
            lval[l0] = 1
            lval[l0 ^ 1] = -1
            reason[l0 >> 1] = cid
            trail[tlen] = l0
            tlen += 1
    confl, tlen, pool, w_top = _propagate(ca, c_start, c_size, alive, lval, reason, trail,
                                          tlen, 0, pool, w_start, w_len, w_cap, w_top)
    return confl, tlen, pool, w_top


@njit(cache=True)
def check_forward(nvars, f_lits, f_start, s_ops, s_lits, s_start, s_pivot, s_trusted, rup_first, compact_min):
    """Check a proof forward against a formula (both in DIMACS literals, CSR form).

    ``s_trusted[i] == 1`` admits addition i without a check. With
    ``rup_first`` false an addition that has a pivot must pass the RAT test
    itself (used to test RAT in isolation). Deleted clauses are squeezed out
    of the arena once they hold more than ``compact_min`` literals and more
    than the live clauses do.

    Returns an int64 vector: ok, failed step, failure kind, first step at
    which the accumulated formula became inconsistent (-1 if never, -2 if
    already the formula is), unmatched deletions, RUP checks, RAT checks,
    closure recomputations.
    """
    nf = f_start.size - 1
    ns = s_ops.size
    nlits = 2 * nvars + 2
    total = f_lits.size + s_lits.size
    ca = np.empty(max(total, 1), dtype=np.int32)
    ncl = nf
    for i in range(ns):
        if s_ops[i] == 1:
            ncl += 1
    c_start = np.zeros(ncl + 1, dtype=np.int64)
    c_size = np.zeros(ncl + 1, dtype=np.int32)
    alive = np.zeros(ncl + 1, dtype=np.int8)
    h_next = np.full(ncl + 1, -1, dtype=np.int64)
    heads = Dict.empty(key_type=types.int64, value_type=types.int64)

    lval = np.zeros(nlits, dtype=np.int8)
    reason = np.full(nvars + 1, -1, dtype=np.int64)
    trail = np.zeros(nvars + 1, dtype=np.int32)
    tlen = 0
    pool = np.empty(1024, dtype=np.int64)
    w_start = np.zeros(nlits, dtype=np.int64)
    w_len = np.zeros(nlits, dtype=np.int64)
    w_cap = np.zeros(nlits, dtype=np.int64)
    w_top = 0
    stamp = np.zeros(nlits, dtype=np.int64)
    stamp_id = 0
    buf = np.empty(nlits, dtype=np.int32)
    units = np.empty(16, dtype=np.int64)
    nunits = 0

    out = np.zeros(8, dtype=np.int64)
    out[0] = 1
    out[1] = -1
    out[3] = -1
    inconsistent = False
    dead = 0  # literals of deleted clauses still occupying the arena
    dirty = False  # a deletion happened while inconsistent: closure must be rebuilt before use
    ca_top = 0
    next_id = 0

    for step in range(-nf, ns):
        if step < 0:
            src = f_lits
            a = f_start[step + nf]
            b = f_start[step + nf + 1]
            op = 1
            pivot = 0
            trusted = True
        else:
            src = s_lits
            a = s_start[step]
            b = s_start[step + 1]
            op = s_ops[step]
            pivot = _enc(s_pivot[step]) if s_pivot[step] != 0 else -1
            trusted = s_trusted[step] == 1
        sz = b - a

        # internal literals, duplicates removed
        stamp_id += 1
        n = 0
        taut = False
        for q in range(a, b):
            l = _enc(src[q])
            if stamp[l] == stamp_id:
                continue
            if stamp[l ^ 1] == stamp_id:
                taut = True
            stamp[l] = stamp_id
            buf[n] = l
            n += 1

        if op == 2:
            h = _hash(buf, 0, n)
            found = -1
            prev = -1
            if h in heads:
                cur = heads[h]
                while cur >= 0:
                    if c_size[cur] == n:
                        same = True
                        cs = c_start[cur]
                        for q in range(n):
                            if stamp[ca[cs + q]] != stamp_id:
                                same = False
                                break
                        if same:
                            found = cur
                            break
                    prev = cur
                    cur = h_next[cur]
            if found < 0:
                out[4] += 1
                continue
            if prev < 0:
                if h_next[found] >= 0:
                    heads[h] = h_next[found]
                else:
                    del heads[h]
            else:
                h_next[prev] = h_next[found]
            alive[found] = 0
            dead += c_size[found]
            if inconsistent:
                dirty = True
                continue
            if n == 0:
                continue
            is_reason = False
            for q in range(min(n, 2)):
                lq = ca[c_start[found] + q]
                if lval[lq] == 1 and reason[lq >> 1] == found:
                    is_reason = True
            if is_reason:
                # the closure used this clause: rebuild it without
                out[7] += 1
                tlen = _undo(lval, reason, trail, tlen, 0)
                for q in range(nunits):
                    u = units[q]
                    if alive[u] == 0:
                        continue
                    lu = ca[c_start[u]]
                    if lval[lu] == -1:
                        inconsistent = True
                        break
                    if lval[lu] == 0:
                        lval[lu] = 1
                        lval[lu ^ 1] = -1
                        reason[lu >> 1] = u
                        trail[tlen] = lu
                        tlen += 1
                if not inconsistent:
                    confl, tlen, pool, w_top = _propagate(ca, c_start, c_size, alive, lval, reason, trail,
                                                          tlen, 0, pool, w_start, w_len, w_cap, w_top)
                    inconsistent = confl
            continue

        if dead > compact_min and dead > ca_top - dead:
            # compact the arena and the watch pool; ids stay the same
            live = np.empty(ca_top - dead + 1024, dtype=np.int32)
            top = 0
            for cid in range(next_id):
                if alive[cid] == 1:
                    cs = c_start[cid]
                    for q in range(c_size[cid]):
                        live[top + q] = ca[cs + q]
                    c_start[cid] = top
                    top += c_size[cid]
            ca = live
            ca_top = top
            dead = 0
            w_start[:] = 0
            w_cap[:] = 0
            w_top = 0
            dirty = True
        if dirty:
            out[7] += 1
            inconsistent, tlen, pool, w_top = _rebuild(ca, c_start, c_size, alive, next_id, lval, reason,
                                                       trail, tlen, pool, w_start, w_len, w_cap, w_top)
            dirty = False

        # --- addition: check
        if step >= 0 and not trusted and not inconsistent and not taut:
            ok = False
            if rup_first or pivot < 0:
                out[5] += 1
                ok, pool, w_top = _rup(ca, c_start, c_size, alive, lval, reason, trail, tlen,
                                       pool, w_start, w_len, w_cap, w_top, buf, n, -1, -1)
            if not ok and pivot >= 0:
                inside = False
                for q in range(n):
                    if buf[q] == pivot:
                        inside = True
                if not inside:
                    out[0] = 0
                    out[1] = step
                    out[2] = FAIL_PIVOT
                    return out
                out[6] += 1
                ok = True
                npiv = pivot ^ 1
                for d in range(next_id):
                    if alive[d] == 0:
                        continue
                    ds = c_start[d]
                    dn = c_size[d]
                    has = False
                    for q in range(dn):
                        if ca[ds + q] == npiv:
                            has = True
                            break
                    if not has:
                        continue
                    # resolvent = clause - pivot + d - ~pivot
                    m = 0
                    for q in range(n):
                        if buf[q] != pivot:
                            buf[n + m] = buf[q]
                            m += 1
                    rtaut = False
                    stamp_id += 1
                    for q in range(m):
                        stamp[buf[n + q]] = stamp_id
                    for q in range(dn):
                        l = ca[ds + q]
                        if l == npiv:
                            continue
                        if stamp[l ^ 1] == stamp_id:
                            rtaut = True
                            break
                        if stamp[l] != stamp_id:
                            stamp[l] = stamp_id
                            buf[n + m] = l
                            m += 1
                    if rtaut:
                        continue
                    res, pool, w_top = _rup(ca, c_start, c_size, alive, lval, reason, trail, tlen,
                                            pool, w_start, w_len, w_cap, w_top, buf[n:], m, -1, -1)
                    if not res:
                        ok = False
                        break
            if not ok:
                out[0] = 0
                out[1] = step
                out[2] = FAIL_LEMMA
                return out

        # --- addition: store and attach
        cid = next_id
        next_id += 1
        ca = _grow(ca, ca_top + n)
        st = ca_top
        for q in range(n):
            ca[st + q] = buf[q]
        ca_top += n
        c_start[cid] = st
        c_size[cid] = n
        alive[cid] = 1
        h = _hash(ca, st, n)
        if h in heads:
            h_next[cid] = heads[h]
        heads[h] = cid
        if n == 1:
            units = _grow(units, nunits + 1)
            units[nunits] = cid
            nunits += 1
        if inconsistent or taut:
            if n >= 2 and taut:
                pool, w_top = _attach(pool, w_start, w_len, w_cap, w_top, ca, st, n, cid)
            continue
        if n == 0:
            inconsistent = True
        else:
            # move non-false literals to the front, true ones first
            w = 0
            for q in range(n):
                if lval[ca[st + q]] == 1:
                    tmp = ca[st + w]
                    ca[st + w] = ca[st + q]
                    ca[st + q] = tmp
                    w += 1
            nsat = w
            for q in range(w, n):
                if lval[ca[st + q]] == 0:
                    tmp = ca[st + w]
                    ca[st + w] = ca[st + q]
                    ca[st + q] = tmp
                    w += 1
            if n >= 2:
                pool, w_top = _attach(pool, w_start, w_len, w_cap, w_top, ca, st, n, cid)
            if nsat == 0:
                if w == 0:
                    inconsistent = True
                elif w == 1:
                    l0 = ca[st]
                    lval[l0] = 1
                    lval[l0 ^ 1] = -1
                    reason[l0 >> 1] = cid
                    trail[tlen] = l0
                    tlen += 1
                    confl, tlen, pool, w_top = _propagate(ca, c_start, c_size, alive, lval, reason, trail,
                                                          tlen, tlen - 1, pool, w_start, w_len, w_cap, w_top)
                    inconsistent = confl
        if inconsistent and out[3] == -1:
            out[3] = step if step >= 0 else -2
    return out


# ---------------------------------------------------------------------------
# Python interface


@dataclass
class CheckReport:
    ok: bool
    refuted: bool
    failed_step: Optional[int] = None
    failed_clause: Optional[Tuple[int, ...]] = None
    message: str = ""
    rup_checks: int = 0
    rat_checks: int = 0
    unmatched_deletions: int = 0
    recomputations: int = 0
    wall: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def _formula_arrays(f: Formula):
    sizes = np.fromiter((len(c) for c in f.clauses), dtype=np.int64, count=len(f.clauses))
    starts = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=starts[1:])
    lits = np.fromiter((l for c in f.clauses for l in c), dtype=np.int32, count=int(starts[-1]))
    return lits, starts


def _max_var(f: Formula, seg: ProofSegment) -> int:
    m = f.num_vars
    if seg.lits.size:
        m = max(m, int(np.abs(seg.lits).max()))
    return m


def rup_check_forward(
    f: Formula,
    segment: ProofSegment,
    claim_unsat: bool = True,
    trusted: Sequence[str] = ("symmetry",),
    trusted_mask: Optional[np.ndarray] = None,
    compact_min: int = 1 << 20,
) -> CheckReport:
    """Check ``segment`` forward against ``f``.

    Additions must be RUP or RAT on their recorded pivot. Steps whose segment
    tag is listed in ``trusted`` (or flagged in ``trusted_mask``) are admitted
    as axioms. With ``claim_unsat`` the proof must also add the empty clause.
    """
    t0 = time.perf_counter()
    f_lits, f_start = _formula_arrays(f)
    if trusted_mask is None:
        trusted_mask = np.full(len(segment), 1 if segment.tag in trusted else 0, dtype=np.int8)
    out = check_forward(_max_var(f, segment), f_lits, f_start, segment.ops, segment.lits,
                        segment.offsets, segment.pivots, trusted_mask.astype(np.int8), True, compact_min)
    wall = time.perf_counter() - t0
    rep = CheckReport(
        ok=bool(out[0]), refuted=int(out[3]) != -1,
        rup_checks=int(out[5]), rat_checks=int(out[6]),
        unmatched_deletions=int(out[4]), recomputations=int(out[7]), wall=wall,
    )
    if not rep.ok:
        rep.failed_step = int(out[1])
        rep.failed_clause = segment.step(rep.failed_step).clause
        kind = "pivot not in clause" if out[2] == FAIL_PIVOT else "neither RUP nor RAT"
        rep.message = f"step {rep.failed_step}: clause {rep.failed_clause} is {kind}"
        return rep
    if claim_unsat and not segment.derives_empty_clause():
        rep.ok = False
        rep.message = "proof does not add the empty clause"
    return rep


def rat_check(clause: Sequence[int], f: Formula, pivot: int) -> bool:
    """True iff every resolvent of ``clause`` on ``pivot`` with a clause of ``f`` is a tautology or RUP."""
    clause = tuple(clause)
    if pivot not in clause:
        raise ValueError(f"pivot {pivot} is not a literal of {clause}")
    seg = ProofSegment.from_steps([(ADD, clause, pivot)], "reencoding")
    f_lits, f_start = _formula_arrays(f)
    out = check_forward(_max_var(f, seg), f_lits, f_start, seg.ops, seg.lits, seg.offsets,
                        seg.pivots, np.zeros(1, dtype=np.int8), False, 1 << 20)
    return bool(out[0])


def rup_check(clause: Sequence[int], f: Formula) -> bool:
    seg = ProofSegment.from_steps([(ADD, tuple(clause))], "solver")
    return rup_check_forward(f, seg, claim_unsat=False).ok
