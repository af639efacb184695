"""Compiled CDCL core.

A single entry point, :func:`cdcl_solve`, runs conflict-driven clause learning
with two watched literals (binary clauses get their own implication lists),
EVSIDS branching with phase saving, LBD-driven restarts with blocking and
LBD-based learned-clause reduction. Clause additions and deletions can be
logged as a DRAT stream.

Internally literal ``v`` (1-based DIMACS) is ``2*(v-1)`` and ``-v`` is
``2*(v-1)+1``. The function works on flat numpy arrays so that numba can
compile it; the Python-facing wrapper lives in :mod:`packing_sat.engine`.
"""

import numpy as np
from numba import njit

SAT = 10
UNSAT = 20
UNKNOWN = 0

# proof buffer opcodes
PROOF_ADD = 1
PROOF_DELETE = 2

# indices into the stats vector
ST_CONFLICTS = 0
ST_DECISIONS = 1
ST_PROPAGATIONS = 2
ST_RESTARTS = 3
ST_LEARNED = 4
ST_DELETED = 5
ST_REDUCTIONS = 6
ST_BLOCKED_RESTARTS = 7
N_STATS = 8


@njit(cache=True)
def _grow_i32(a, need):
    n = a.size
    if need <= n:
        return a
    m = max(need, 2 * n + 16)
    b = np.empty(m, dtype=np.int32)
    b[:n] = a
    return b


@njit(cache=True)
def _grow_i64(a, need):
    n = a.size
    if need <= n:
        return a
    m = max(need, 2 * n + 16)
    b = np.empty(m, dtype=np.int64)
    b[:n] = a
    return b


@njit(cache=True)
def _grow_f64(a, need):
    n = a.size
    if need <= n:
        return a
    m = max(need, 2 * n + 16)
    b = np.zeros(m, dtype=np.float64)
    b[:n] = a
    return b


@njit(cache=True)
def _grow_i8(a, need):
    n = a.size
    if need <= n:
        return a
    m = max(need, 2 * n + 16)
    b = np.zeros(m, dtype=np.int8)
    b[:n] = a
    return b


@njit(cache=True)
def _to_dimacs(lit):
    v = (lit >> 1) + 1
    return -v if lit & 1 else v


@njit(cache=True)
def _ws_push(pool, start, length, cap, top, lit, a, b):
    """Append the pair (a, b) to the watch segment of ``lit``; returns (pool, top)."""
    n = length[lit]
    if n == cap[lit]:
        newcap = 4 if cap[lit] == 0 else 2 * cap[lit]
        pool = _grow_i32(pool, top + 2 * newcap)
        s = start[lit]
        for i in range(2 * n):
            pool[top + i] = pool[s + i]
        start[lit] = top
        cap[lit] = newcap
        top += 2 * newcap
    s = start[lit] + 2 * n
    pool[s] = a
    pool[s + 1] = b
    length[lit] = n + 1
    return pool, top


@njit(cache=True)
def _log(proof, plen, op, ca, st, size):
    proof = _grow_i32(proof, plen + size + 2)
    proof[plen] = op
    proof[plen + 1] = size
    for i in range(size):
        proof[plen + 2 + i] = _to_dimacs(ca[st + i])
    return proof, plen + size + 2


@njit(cache=True)
def _heap_up(heap, hidx, act, i):
    v = heap[i]
    a = act[v]
    while i > 0:
        parent = (i - 1) >> 1
        pv = heap[parent]
        if act[pv] >= a:
            break
        heap[i] = pv
        hidx[pv] = i
        i = parent
    heap[i] = v
    hidx[v] = i


@njit(cache=True)
def _heap_down(heap, hidx, act, i, hsize):
    v = heap[i]
    a = act[v]
    while True:
        child = 2 * i + 1
        if child >= hsize:
            break
        right = child + 1
        if right < hsize and act[heap[right]] > act[heap[child]]:
            child = right
        cv = heap[child]
        if act[cv] <= a:
            break
        heap[i] = cv
        hidx[cv] = i
        i = child
    heap[i] = v
    hidx[v] = i


@njit(cache=True)
def _heap_insert(heap, hidx, act, hsize, v):
    if hidx[v] >= 0:
        return hsize
    heap[hsize] = v
    hidx[v] = hsize
    _heap_up(heap, hidx, act, hsize)
    return hsize + 1


@njit(cache=True)
def _heap_pop(heap, hidx, act, hsize):
    v = heap[0]
    hidx[v] = -1
    hsize -= 1
    if hsize > 0:
        last = heap[hsize]
        heap[0] = last
        hidx[last] = 0
        _heap_down(heap, hidx, act, 0, hsize)
    return v, hsize


@njit(cache=True)
def cdcl_solve(nvars, in_lits, in_starts, assumptions, max_conflicts, seed, log_proof, cleanup):
    """Run CDCL on the clause list given in CSR form (DIMACS literals).

    Returns (status, model, stats, proof). ``model[v]`` is 1/0 for variable v
    (index 0 unused). ``proof`` is a flat int32 stream of records
    ``op, size, lit_1 .. lit_size`` with op 1 = add, 2 = delete.
    """
    np.random.seed(seed)
    nlits = 2 * nvars + 2
    stats = np.zeros(N_STATS, dtype=np.int64)
    model = np.zeros(nvars + 1, dtype=np.int8)
    proof = np.empty(1024, dtype=np.int32)
    plen = 0

    lval = np.zeros(nlits, dtype=np.int8)
    level = np.zeros(nvars + 1, dtype=np.int32)
    reason = np.full(nvars + 1, -1, dtype=np.int64)
    trail = np.zeros(nvars + 1, dtype=np.int32)
    trail_lim = np.zeros(nvars + 2, dtype=np.int64)
    tlen = 0
    qhead = 0
    nlevels = 0
    seen = np.zeros(nvars + 1, dtype=np.int8)
    polarity = np.ones(nvars + 1, dtype=np.int8)  # 1 = negative phase
    act = np.zeros(nvars + 1, dtype=np.float64)
    for v in range(nvars):
        act[v] = np.random.random() * 1e-5
    var_inc = 1.0
    var_decay = 0.8
    heap = np.zeros(nvars + 1, dtype=np.int32)
    hidx = np.full(nvars + 1, -1, dtype=np.int64)
    hsize = 0

    # clause store
    nin = in_starts.size - 1
    ca = np.empty(max(16, 2 * in_lits.size), dtype=np.int32)
    ca_top = 0
    cap_c = max(16, 2 * nin)
    c_start = np.zeros(cap_c, dtype=np.int64)
    c_size = np.zeros(cap_c, dtype=np.int32)
    c_lbd = np.zeros(cap_c, dtype=np.int32)
    c_learnt = np.zeros(cap_c, dtype=np.int8)
    c_dead = np.zeros(cap_c, dtype=np.int8)
    c_used = np.zeros(cap_c, dtype=np.int8)
    c_act = np.zeros(cap_c, dtype=np.float64)
    ncl = 0
    cla_inc = 1.0
    cla_decay = 0.999

    # watches: long clauses (cid, blocker) and binaries (other, cid)
    w_pool = np.empty(1024, dtype=np.int32)
    w_start = np.zeros(nlits, dtype=np.int64)
    w_len = np.zeros(nlits, dtype=np.int32)
    w_cap = np.zeros(nlits, dtype=np.int32)
    w_top = 0
    b_pool = np.empty(1024, dtype=np.int32)
    b_start = np.zeros(nlits, dtype=np.int64)
    b_len = np.zeros(nlits, dtype=np.int32)
    b_cap = np.zeros(nlits, dtype=np.int32)
    b_top = 0

    status = UNKNOWN
    unsat0 = False
    mark = np.zeros(nlits, dtype=np.int32)  # per-literal stamp for duplicate removal
    stamp = 0

    # ---- load clauses
    for ci in range(nin):
        s = in_starts[ci]
        e = in_starts[ci + 1]
        stamp += 1
        taut = False
        n = 0
        ca = _grow_i32(ca, ca_top + (e - s) + 1)
        for i in range(s, e):
            d = in_lits[i]
            lit = 2 * (abs(d) - 1) + (1 if d < 0 else 0)
            if mark[lit] == stamp:
                continue
            if mark[lit ^ 1] == stamp:
                taut = True
                break
            mark[lit] = stamp
            ca[ca_top + n] = lit
            n += 1
        if taut:
            continue
        if n == 0:
            unsat0 = True
            continue
        if n == 1:
            lit = ca[ca_top]
            if lval[lit] == -1:
                unsat0 = True
            elif lval[lit] == 0:
                lval[lit] = 1
                lval[lit ^ 1] = -1
                level[lit >> 1] = 0
                reason[lit >> 1] = -1
                trail[tlen] = lit
                tlen += 1
            continue
        if ncl >= c_start.size:
            c_start = _grow_i64(c_start, ncl + 1)
            c_size = _grow_i32(c_size, c_start.size)
            c_lbd = _grow_i32(c_lbd, c_start.size)
            c_learnt = _grow_i8(c_learnt, c_start.size)
            c_dead = _grow_i8(c_dead, c_start.size)
            c_used = _grow_i8(c_used, c_start.size)
            c_act = _grow_f64(c_act, c_start.size)
        c_start[ncl] = ca_top
        c_size[ncl] = n
        if n == 2:
            b_pool, b_top = _ws_push(b_pool, b_start, b_len, b_cap, b_top, ca[ca_top], ca[ca_top + 1], ncl)
            b_pool, b_top = _ws_push(b_pool, b_start, b_len, b_cap, b_top, ca[ca_top + 1], ca[ca_top], ncl)
        else:
            w_pool, w_top = _ws_push(w_pool, w_start, w_len, w_cap, w_top, ca[ca_top], ncl, ca[ca_top + 1])
            w_pool, w_top = _ws_push(w_pool, w_start, w_len, w_cap, w_top, ca[ca_top + 1], ncl, ca[ca_top])
        ca_top += n
        ncl += 1
    n_original = ncl

    for v in range(nvars):
        hsize = _heap_insert(heap, hidx, act, hsize, v)

    # assumptions in internal form
    na = assumptions.size
    assump = np.zeros(na, dtype=np.int32)
    for i in range(na):
        d = assumptions[i]
        assump[i] = 2 * (abs(d) - 1) + (1 if d < 0 else 0)

    # restart / reduction bookkeeping
    lbd_q = np.zeros(50, dtype=np.int64)
    lbd_q_n = 0
    lbd_q_pos = 0
    lbd_q_sum = 0
    trail_q = np.zeros(5000, dtype=np.int64)
    trail_q_n = 0
    trail_q_pos = 0
    trail_q_sum = 0
    sum_lbd = 0.0
    next_reduce = 2000
    reduce_inc = 300
    reductions = 0

    learnt = np.zeros(nvars + 1, dtype=np.int32)
    stack = np.zeros(nvars + 1, dtype=np.int32)
    to_clear = np.zeros(nvars + 1, dtype=np.int32)
    lvl_stamp = np.zeros(nvars + 2, dtype=np.int64)
    lvl_counter = 0
    conflicts = 0

    refuted = unsat0
    if unsat0:
        status = UNSAT
    while status == UNKNOWN:
        # ---------------- propagate
        confl = -1
        while qhead < tlen and confl < 0:
            p = trail[qhead]
            qhead += 1
            stats[ST_PROPAGATIONS] += 1
            fl = p ^ 1
            # binary implications
            bs = b_start[fl]
            bn = b_len[fl]
            for i in range(bn):
                o = b_pool[bs + 2 * i]
                vo = lval[o]
                if vo == 1:
                    continue
                if vo == -1:
                    confl = b_pool[bs + 2 * i + 1]
                    break
                lval[o] = 1
                lval[o ^ 1] = -1
                level[o >> 1] = nlevels
                reason[o >> 1] = b_pool[bs + 2 * i + 1]
                trail[tlen] = o
                tlen += 1
            if confl >= 0:
                break
            # long clauses
            ws = w_start[fl]
            wn = w_len[fl]
            i = 0
            j = 0
            while i < wn:
                cid = w_pool[ws + 2 * i]
                blk = w_pool[ws + 2 * i + 1]
                i += 1
                if lval[blk] == 1:
                    w_pool[ws + 2 * j] = cid
                    w_pool[ws + 2 * j + 1] = blk
                    j += 1
                    continue
                st = c_start[cid]
                if ca[st] == fl:
                    ca[st] = ca[st + 1]
                    ca[st + 1] = fl
                first = ca[st]
                if first != blk and lval[first] == 1:
                    w_pool[ws + 2 * j] = cid
                    w_pool[ws + 2 * j + 1] = first
                    j += 1
                    continue
                sz = c_size[cid]
                moved = False
                for kk in range(2, sz):
                    lk = ca[st + kk]
                    if lval[lk] != -1:
                        ca[st + 1] = lk
                        ca[st + kk] = fl
                        w_pool, w_top = _ws_push(w_pool, w_start, w_len, w_cap, w_top, lk, cid, first)
                        moved = True
                        break
                if moved:
                    continue
                w_pool[ws + 2 * j] = cid
                w_pool[ws + 2 * j + 1] = first
                j += 1
                if lval[first] == -1:
                    confl = cid
                    while i < wn:
                        w_pool[ws + 2 * j] = w_pool[ws + 2 * i]
                        w_pool[ws + 2 * j + 1] = w_pool[ws + 2 * i + 1]
                        i += 1
                        j += 1
                else:
                    lval[first] = 1
                    lval[first ^ 1] = -1
                    level[first >> 1] = nlevels
                    reason[first >> 1] = cid
                    trail[tlen] = first
                    tlen += 1
            w_len[fl] = j

        if confl >= 0:
            # ---------------- conflict
            conflicts += 1
            stats[ST_CONFLICTS] = conflicts
            if nlevels == 0:
                status = UNSAT
                refuted = True
                break
            # trail-size queue for restart blocking
            if trail_q_n == 5000:
                trail_q_sum -= trail_q[trail_q_pos]
            else:
                trail_q_n += 1
            trail_q[trail_q_pos] = tlen
            trail_q_sum += tlen
            trail_q_pos = (trail_q_pos + 1) % 5000
            if conflicts > 10000 and lbd_q_n == 50 and tlen > 1.4 * trail_q_sum / trail_q_n:
                lbd_q_n = 0
                lbd_q_pos = 0
                lbd_q_sum = 0
                stats[ST_BLOCKED_RESTARTS] += 1

            # first-UIP analysis
            path = 0
            p = -1
            nl = 1
            idx = tlen - 1
            while True:
                if c_learnt[confl] == 1:
                    c_act[confl] += cla_inc
                    if c_act[confl] > 1e20:
                        for q in range(ncl):
                            c_act[q] *= 1e-20
                        cla_inc *= 1e-20
                    # refresh the LBD of clauses that take part in conflicts
                    if c_lbd[confl] > 2:
                        lvl_counter += 1
                        nb = 0
                        st = c_start[confl]
                        for q in range(c_size[confl]):
                            lv = level[ca[st + q] >> 1]
                            if lvl_stamp[lv] != lvl_counter:
                                lvl_stamp[lv] = lvl_counter
                                nb += 1
                        if nb + 1 < c_lbd[confl]:
                            if c_lbd[confl] <= 30:
                                c_used[confl] = 1
                            c_lbd[confl] = nb
                st = c_start[confl]
                for q in range(c_size[confl]):
                    lit = ca[st + q]
                    v = lit >> 1
                    if p >= 0 and v == (p >> 1):
                        continue
                    if seen[v] == 0 and level[v] > 0:
                        act[v] += var_inc
                        if act[v] > 1e100:
                            for u in range(nvars):
                                act[u] *= 1e-100
                            var_inc *= 1e-100
                        if hidx[v] >= 0:
                            _heap_up(heap, hidx, act, hidx[v])
                        seen[v] = 1
                        if level[v] >= nlevels:
                            path += 1
                        else:
                            learnt[nl] = lit
                            nl += 1
                while seen[trail[idx] >> 1] == 0:
                    idx -= 1
                p = trail[idx]
                idx -= 1
                confl = reason[p >> 1]
                seen[p >> 1] = 0
                path -= 1
                if path == 0:
                    break
            learnt[0] = p ^ 1

            # recursive minimization
            nclear = 0
            for q in range(1, nl):
                to_clear[nclear] = learnt[q]
                nclear += 1
            abstract = 0
            for q in range(1, nl):
                abstract |= 1 << (level[learnt[q] >> 1] & 31)
            j2 = 1
            for q in range(1, nl):
                lit = learnt[q]
                v = lit >> 1
                keep = True
                if reason[v] >= 0:
                    # is lit implied by the other literals of the clause?
                    top = nclear
                    sp = 0
                    stack[sp] = lit
                    sp += 1
                    redundant = True
                    while sp > 0:
                        sp -= 1
                        cur = stack[sp]
                        rc = reason[cur >> 1]
                        cst = c_start[rc]
                        for t in range(c_size[rc]):
                            l2 = ca[cst + t]
                            v2 = l2 >> 1
                            if v2 == (cur >> 1):
                                continue
                            if seen[v2] == 0 and level[v2] > 0:
                                if reason[v2] >= 0 and (abstract & (1 << (level[v2] & 31))) != 0:
                                    seen[v2] = 1
                                    stack[sp] = l2
                                    sp += 1
                                    to_clear[nclear] = l2
                                    nclear += 1
                                else:
                                    for t2 in range(top, nclear):
                                        seen[to_clear[t2] >> 1] = 0
                                    nclear = top
                                    redundant = False
                                    break
                        if not redundant:
                            break
                    keep = not redundant
                if keep:
                    learnt[j2] = lit
                    j2 += 1
            nl = j2
            seen[learnt[0] >> 1] = 0
            for q in range(nclear):
                seen[to_clear[q] >> 1] = 0

            # backjump level, second watch
            bt = 0
            if nl > 1:
                mi = 1
                for q in range(2, nl):
                    if level[learnt[q] >> 1] > level[learnt[mi] >> 1]:
                        mi = q
                tmp = learnt[1]
                learnt[1] = learnt[mi]
                learnt[mi] = tmp
                bt = level[learnt[1] >> 1]
            lvl_counter += 1
            lbd = 0
            for q in range(nl):
                lv = level[learnt[q] >> 1]
                if lvl_stamp[lv] != lvl_counter:
                    lvl_stamp[lv] = lvl_counter
                    lbd += 1
            if lbd_q_n == 50:
                lbd_q_sum -= lbd_q[lbd_q_pos]
            else:
                lbd_q_n += 1
            lbd_q[lbd_q_pos] = lbd
            lbd_q_sum += lbd
            lbd_q_pos = (lbd_q_pos + 1) % 50
            sum_lbd += lbd
            stats[ST_LEARNED] += 1

            # undo to bt
            if nlevels > bt:
                lim = trail_lim[bt]
                for q in range(tlen - 1, lim - 1, -1):
                    lit = trail[q]
                    v = lit >> 1
                    lval[lit] = 0
                    lval[lit ^ 1] = 0
                    reason[v] = -1
                    polarity[v] = lit & 1
                    if hidx[v] < 0:
                        hsize = _heap_insert(heap, hidx, act, hsize, v)
                tlen = lim
                qhead = lim
                nlevels = bt

            # store and assert
            if log_proof:
                proof, plen = _log(proof, plen, PROOF_ADD, learnt, 0, nl)
            a0 = learnt[0]
            if nl == 1:
                lval[a0] = 1
                lval[a0 ^ 1] = -1
                level[a0 >> 1] = 0
                reason[a0 >> 1] = -1
                trail[tlen] = a0
                tlen += 1
            else:
                if ncl >= c_start.size:
                    c_start = _grow_i64(c_start, ncl + 1)
                    c_size = _grow_i32(c_size, c_start.size)
                    c_lbd = _grow_i32(c_lbd, c_start.size)
                    c_learnt = _grow_i8(c_learnt, c_start.size)
                    c_dead = _grow_i8(c_dead, c_start.size)
                    c_used = _grow_i8(c_used, c_start.size)
                    c_act = _grow_f64(c_act, c_start.size)
                ca = _grow_i32(ca, ca_top + nl)
                for q in range(nl):
                    ca[ca_top + q] = learnt[q]
                c_start[ncl] = ca_top
                c_size[ncl] = nl
                c_lbd[ncl] = lbd
                c_learnt[ncl] = 1
                c_dead[ncl] = 0
                c_used[ncl] = 0
                c_act[ncl] = cla_inc
                if nl == 2:
                    b_pool, b_top = _ws_push(b_pool, b_start, b_len, b_cap, b_top, learnt[0], learnt[1], ncl)
                    b_pool, b_top = _ws_push(b_pool, b_start, b_len, b_cap, b_top, learnt[1], learnt[0], ncl)
                else:
                    w_pool, w_top = _ws_push(w_pool, w_start, w_len, w_cap, w_top, learnt[0], ncl, learnt[1])
                    w_pool, w_top = _ws_push(w_pool, w_start, w_len, w_cap, w_top, learnt[1], ncl, learnt[0])
                ca_top += nl
                lval[a0] = 1
                lval[a0 ^ 1] = -1
                level[a0 >> 1] = bt
                reason[a0 >> 1] = ncl
                trail[tlen] = a0
                tlen += 1
                ncl += 1
            var_inc /= var_decay
            cla_inc /= cla_decay
            if conflicts % 5000 == 0 and var_decay < 0.95:
                var_decay += 0.01
            if max_conflicts >= 0 and conflicts >= max_conflicts:
                break
            continue

        # ---------------- no conflict: restart, reduce, decide
        if lbd_q_n == 50 and (lbd_q_sum / 50.0) * 0.8 > sum_lbd / conflicts:
            lbd_q_n = 0
            lbd_q_pos = 0
            lbd_q_sum = 0
            stats[ST_RESTARTS] += 1
            if nlevels > 0:
                lim = trail_lim[0]
                for q in range(tlen - 1, lim - 1, -1):
                    lit = trail[q]
                    v = lit >> 1
                    lval[lit] = 0
                    lval[lit ^ 1] = 0
                    reason[v] = -1
                    polarity[v] = lit & 1
                    if hidx[v] < 0:
                        hsize = _heap_insert(heap, hidx, act, hsize, v)
                tlen = lim
                qhead = lim
                nlevels = 0

        if conflicts >= next_reduce:
            reductions += 1
            stats[ST_REDUCTIONS] = reductions
            next_reduce = conflicts + 2000 + reduce_inc * reductions
            # candidates: unlocked learned clauses with lbd > 2
            cand = np.empty(ncl, dtype=np.int64)
            nc = 0
            maxact = 1e-300
            for q in range(n_original, ncl):
                if c_dead[q] == 0 and c_learnt[q] == 1 and c_size[q] > 2:
                    if c_act[q] > maxact:
                        maxact = c_act[q]
            for q in range(n_original, ncl):
                if c_dead[q] == 1 or c_learnt[q] == 0 or c_size[q] <= 2 or c_lbd[q] <= 2:
                    continue
                l0 = ca[c_start[q]]
                if lval[l0] == 1 and reason[l0 >> 1] == q:
                    continue
                cand[nc] = q
                nc += 1
            keys = np.empty(nc, dtype=np.float64)
            for q in range(nc):
                cid = cand[q]
                keys[q] = c_lbd[cid] + 0.999 * (1.0 - c_act[cid] / maxact)
            order = np.argsort(-keys, kind="mergesort")
            target = nc // 2
            removed = 0
            for q in range(nc):
                if removed >= target:
                    break
                cid = cand[order[q]]
                if c_used[cid] == 1:
                    c_used[cid] = 0
                    continue
                c_dead[cid] = 1
                removed += 1
                stats[ST_DELETED] += 1
                if log_proof:
                    proof, plen = _log(proof, plen, PROOF_DELETE, ca, c_start[cid], c_size[cid])
            # compact the arena and rebuild long watches
            newtop = 0
            for q in range(ncl):
                if c_dead[q] == 1:
                    continue
                st = c_start[q]
                sz = c_size[q]
                if st != newtop:
                    for t in range(sz):
                        ca[newtop + t] = ca[st + t]
                c_start[q] = newtop
                newtop += sz
            ca_top = newtop
            w_len[:] = 0
            w_cap[:] = 0
            w_top = 0
            for q in range(ncl):
                if c_dead[q] == 1 or c_size[q] == 2:
                    continue
                st = c_start[q]
                w_pool, w_top = _ws_push(w_pool, w_start, w_len, w_cap, w_top, ca[st], q, ca[st + 1])
                w_pool, w_top = _ws_push(w_pool, w_start, w_len, w_cap, w_top, ca[st + 1], q, ca[st])

        # decide
        nxt = -1
        while nlevels < na:
            a = assump[nlevels]
            if lval[a] == 1:
                trail_lim[nlevels] = tlen
                nlevels += 1
            elif lval[a] == -1:
                status = UNSAT
                break
            else:
                nxt = a
                break
        if status != UNKNOWN:
            break
        if nxt < 0:
            while hsize > 0:
                v, hsize = _heap_pop(heap, hidx, act, hsize)
                if lval[2 * v] == 0:
                    nxt = 2 * v + polarity[v]
                    break
            if nxt < 0:
                status = SAT
                break
            stats[ST_DECISIONS] += 1
        trail_lim[nlevels] = tlen
        nlevels += 1
        lval[nxt] = 1
        lval[nxt ^ 1] = -1
        level[nxt >> 1] = nlevels
        reason[nxt >> 1] = -1
        trail[tlen] = nxt
        tlen += 1

    if status == SAT:
        for v in range(nvars):
            model[v + 1] = 1 if lval[2 * v] == 1 else 0
    elif status == UNSAT and log_proof:
        if refuted:
            # refuted without assumptions: the empty clause
            proof, plen = _log(proof, plen, PROOF_ADD, learnt, 0, 0)
        # the negation of the assumption cube closes the segment
        if na > 0:
            neg = np.empty(na, dtype=np.int32)
            for i in range(na):
                neg[i] = assump[i] ^ 1
            proof, plen = _log(proof, plen, PROOF_ADD, neg, 0, na)
        if cleanup:
            for q in range(n_original, ncl):
                if c_learnt[q] == 1 and c_dead[q] == 0:
                    proof, plen = _log(proof, plen, PROOF_DELETE, ca, c_start[q], c_size[q])
    return status, model, stats, proof[:plen].copy()


@njit(cache=True)
def split_stream(stream):
    """Split a proof record stream into (ops, offsets, lits)."""
    n = stream.size
    count = 0
    total = 0
    i = 0
    while i < n:
        count += 1
        total += stream[i + 1]
        i += 2 + stream[i + 1]
    ops = np.empty(count, dtype=np.int8)
    offsets = np.zeros(count + 1, dtype=np.int64)
    lits = np.empty(total, dtype=np.int32)
    i = 0
    j = 0
    p = 0
    while i < n:
        ops[j] = stream[i]
        sz = stream[i + 1]
        for q in range(sz):
            lits[p + q] = stream[i + 2 + q]
        p += sz
        offsets[j + 1] = p
        j += 1
        i += 2 + sz
    return ops, offsets, lits
