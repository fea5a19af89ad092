"""Compiled inner loops: monomial ranking, squaring expansion, row routing,
sparse GF(2) elimination and normal-form back-substitution.

Monomials are int64 exponent vectors.  A monomial of degree n in k variables
is identified by its combinatorial rank in [0, C(n+k-1, k-1)).
"""
import numba as nb
import numpy as np

BIN_ROWS = 600
BIN_COLS = 9


def binom_table(rows=BIN_ROWS, cols=BIN_COLS):
    t = np.zeros((rows, cols), dtype=np.int64)
    for a in range(rows):
        t[a, 0] = 1
        for b in range(1, min(a, cols - 1) + 1):
            t[a, b] = t[a - 1, b - 1] + (t[a - 1, b] if b <= a - 1 else 0)
    return t


BIN = binom_table()


@nb.njit(cache=True)
def rank_of(e, BIN):
    k = e.shape[0]
    r = 0
    s = 0
    for j in range(k - 1):
        s += e[j]
        r += BIN[s + j, j + 1]
    return r


@nb.njit(cache=True)
def rank_rows(E, BIN):
    out = np.empty(E.shape[0], dtype=np.int64)
    for q in range(E.shape[0]):
        out[q] = rank_of(E[q], BIN)
    return out


@nb.njit(cache=True)
def next_composition(e):
    # lexicographically descending successor; False when e is the last one
    k = e.shape[0]
    j = k - 2
    while j >= 0 and e[j] == 0:
        j -= 1
    if j < 0:
        return False
    tail = 0
    for q in range(j + 1, k):
        tail += e[q]
        e[q] = 0
    e[j] -= 1
    e[j + 1] = tail + 1
    return True


@nb.njit(cache=True)
def compositions(n, k, BIN):
    N = BIN[n + k - 1, k - 1]
    out = np.zeros((N, k), dtype=np.int64)
    e = np.zeros(k, dtype=np.int64)
    e[0] = n
    q = 0
    while True:
        out[q] = e
        q += 1
        if not next_composition(e):
            break
    return out


@nb.njit(cache=True)
def weight_rows(E, L):
    W = np.zeros((E.shape[0], L), dtype=np.int64)
    for q in range(E.shape[0]):
        for j in range(E.shape[1]):
            x = E[q, j]
            b = 0
            while x:
                if x & 1:
                    W[q, b] += 1
                x >>= 1
                b += 1
    return W


@nb.njit(cache=True)
def weight_below(e, thr):
    # True when the weight vector of e is strictly below thr (zero padded)
    L = thr.shape[0]
    for b in range(L):
        w = 0
        for j in range(e.shape[0]):
            w += (e[j] >> b) & 1
        if w != thr[b]:
            return w < thr[b]
    for j in range(e.shape[0]):
        if e[j] >> L:
            return False
    return False


@nb.njit(cache=True)
def sq_expand(i, e, out):
    """Write the terms of Sq^i(x^e) into out; return the count or -1 on overflow."""
    k = e.shape[0]
    if i == 0:
        out[0, :k] = e
        return 1
    suf = np.zeros(k + 1, dtype=np.int64)
    for j in range(k - 1, -1, -1):
        suf[j] = suf[j + 1] + e[j]
    if i > suf[0]:
        return 0
    state = np.full(k, -1, dtype=np.int64)
    rem = np.zeros(k + 1, dtype=np.int64)
    rem[0] = i
    cnt = 0
    j = 0
    while j >= 0:
        if j == k - 1:
            r = rem[j]
            if (r & ~e[j]) == 0:
                if cnt >= out.shape[0]:
                    return -1
                for q in range(k - 1):
                    out[cnt, q] = e[q] + state[q]
                out[cnt, k - 1] = e[k - 1] + r
                cnt += 1
            j -= 1
            continue
        a = e[j]
        s = state[j]
        while True:
            if s < 0:
                s = 0
            else:
                s = ((s | ~a) + 1) & a
                if s == 0:
                    s = -1
                    break
            if s > rem[j]:
                s = -1
                break
            if rem[j] - s <= suf[j + 1]:
                break
        if s < 0:
            state[j] = -1
            j -= 1
            continue
        state[j] = s
        rem[j + 1] = rem[j] - s
        j += 1
    return cnt


@nb.njit(cache=True)
def _grow_i32(a, need):
    if need <= a.shape[0]:
        return a
    m = a.shape[0] * 2
    while m < need:
        m *= 2
    b = np.empty(m, dtype=a.dtype)
    b[:a.shape[0]] = a
    return b


@nb.njit(cache=True)
def _grow_i64(a, need):
    if need <= a.shape[0]:
        return a
    m = a.shape[0] * 2
    while m < need:
        m *= 2
    b = np.empty(m, dtype=a.dtype)
    b[:a.shape[0]] = a
    return b


@nb.njit(cache=True)
def _find(keys, x):
    lo = 0
    hi = keys.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    if lo < keys.shape[0] and keys[lo] == x:
        return lo
    return -1


@nb.njit(cache=True)
def _toggle(c, mark, touched, nt):
    # mark: 0 untouched, 1 odd parity, 2 touched with even parity
    m = mark[c]
    if m == 0:
        touched[nt] = c
        nt += 1
        mark[c] = 1
    elif m == 1:
        mark[c] = 2
    else:
        mark[c] = 1
    return nt


@nb.njit(cache=True)
def _route(f, r0, raw_layer, raw_keys, raw_cols, sub_keys, sub_ptr, sub_idx,
           bottom_col, BIN, yb, mark, touched, nt):
    k = f.shape[0]
    mask = 0
    r = 0
    for j in range(k):
        if f[j] & 1:
            mask |= 1 << j
            r += 1
    if r == r0:
        for j in range(k):
            yb[j] = f[j] >> 1
        p = _find(sub_keys, rank_of(yb, BIN))
        if p >= 0:
            for z in range(sub_ptr[p], sub_ptr[p + 1]):
                nt = _toggle(bottom_col[mask, sub_idx[z]], mark, touched, nt)
    elif r > r0 and raw_layer[r]:
        p = _find(raw_keys, rank_of(f, BIN))
        if p >= 0:
            nt = _toggle(raw_cols[p], mark, touched, nt)
    return nt


@nb.njit(cache=True)
def _emit(mark, touched, nt, data, top, lens, nrows):
    L = 0
    for q in range(nt):
        c = touched[q]
        if mark[c] == 1:
            data[top + L] = c
            L += 1
        mark[c] = 0
    if L > 0:
        data[top:top + L].sort()
        lens[nrows] = L
    return L


@nb.njit(cache=True)
def direct_rows(n, k, gens, thr, col_of_rank, BIN):
    """Relations Sq^i(m) for every i in gens and every m of degree n-i,
    restricted to columns with col_of_rank >= 0."""
    data = np.empty(1 << 20, dtype=np.int32)
    lens = np.empty(1 << 16, dtype=np.int64)
    ot = np.empty(1 << 16, dtype=np.int8)
    orank = np.empty(1 << 16, dtype=np.int64)
    terms = np.empty((1 << 14, k), dtype=np.int64)
    top = 0
    nrows = 0
    for gi in range(gens.shape[0]):
        i = gens[gi]
        ds = n - i
        if ds < 0:
            continue
        t = 0
        while (1 << t) < i:
            t += 1
        e = np.zeros(k, dtype=np.int64)
        e[0] = ds
        while True:
            if not (thr.shape[0] > 0 and weight_below(e, thr)):
                cnt = sq_expand(i, e, terms)
                while cnt < 0:
                    terms = np.empty((terms.shape[0] * 4, k), dtype=np.int64)
                    cnt = sq_expand(i, e, terms)
                data = _grow_i32(data, top + cnt)
                L = 0
                for q in range(cnt):
                    c = col_of_rank[rank_of(terms[q], BIN)]
                    if c >= 0:
                        data[top + L] = c
                        L += 1
                if L > 0:
                    data[top:top + L].sort()
                    lens = _grow_i64(lens, nrows + 1)
                    if ot.shape[0] < nrows + 1:
                        o2 = np.empty(lens.shape[0], dtype=np.int8)
                        o2[:ot.shape[0]] = ot
                        ot = o2
                    orank = _grow_i64(orank, nrows + 1)
                    lens[nrows] = L
                    ot[nrows] = t
                    orank[nrows] = rank_of(e, BIN)
                    nrows += 1
                    top += L
            if not next_composition(e):
                break
    return data[:top], lens[:nrows], ot[:nrows], orank[:nrows]


@nb.njit(cache=True)
def layered_rows(n, k, gens, thr, r0, raw_layer, raw_keys, raw_cols,
                 sub_keys, sub_ptr, sub_idx, bottom_col, D, BIN):
    """Relations Sq^i(x_T w^2) for sources with more than r0 odd exponents,
    with every term routed to a raw column or to bottom coordinates."""
    data = np.empty(1 << 20, dtype=np.int32)
    lens = np.empty(1 << 16, dtype=np.int64)
    ot = np.empty(1 << 16, dtype=np.int8)
    orank = np.empty(1 << 16, dtype=np.int64)
    terms = np.empty((1 << 14, k), dtype=np.int64)
    mark = np.zeros(D, dtype=np.int8)
    touched = np.empty(max(D, 1), dtype=np.int64)
    yb = np.zeros(k, dtype=np.int64)
    top = 0
    nrows = 0
    for gi in range(gens.shape[0]):
        i = gens[gi]
        ds = n - i
        if ds < 0:
            continue
        t = 0
        while (1 << t) < i:
            t += 1
        for mask in range(1 << k):
            rp = 0
            for j in range(k):
                rp += (mask >> j) & 1
            if rp <= r0 or rp > ds or (ds - rp) % 2 != 0:
                continue
            h = (ds - rp) // 2
            w = np.zeros(k, dtype=np.int64)
            w[0] = h
            e = np.zeros(k, dtype=np.int64)
            while True:
                for j in range(k):
                    e[j] = 2 * w[j] + ((mask >> j) & 1)
                if not (thr.shape[0] > 0 and weight_below(e, thr)):
                    cnt = sq_expand(i, e, terms)
                    while cnt < 0:
                        terms = np.empty((terms.shape[0] * 4, k), dtype=np.int64)
                        cnt = sq_expand(i, e, terms)
                    nt = 0
                    for q in range(cnt):
                        nt = _route(terms[q], r0, raw_layer, raw_keys, raw_cols,
                                    sub_keys, sub_ptr, sub_idx, bottom_col, BIN,
                                    yb, mark, touched, nt)
                    data = _grow_i32(data, top + nt)
                    lens = _grow_i64(lens, nrows + 1)
                    orank = _grow_i64(orank, nrows + 1)
                    if ot.shape[0] < nrows + 1:
                        o2 = np.empty(lens.shape[0], dtype=np.int8)
                        o2[:ot.shape[0]] = ot
                        ot = o2
                    L = _emit(mark, touched, nt, data, top, lens, nrows)
                    if L > 0:
                        ot[nrows] = t
                        orank[nrows] = rank_of(e, BIN)
                        nrows += 1
                        top += L
                if not next_composition(w):
                    break
    return data[:top], lens[:nrows], ot[:nrows], orank[:nrows]


@nb.njit(cache=True)
def route_nf(E, r0, raw_layer, raw_keys, raw_cols, sub_keys, sub_ptr, sub_idx,
             bottom_col, D, NF, BIN):
    """Normal forms (bitsets) of the monomials E in a layered quotient."""
    W = NF.shape[1]
    out = np.zeros((E.shape[0], W), dtype=np.uint64)
    mark = np.zeros(D, dtype=np.int8)
    touched = np.empty(max(D, 1), dtype=np.int64)
    yb = np.zeros(E.shape[1], dtype=np.int64)
    for q in range(E.shape[0]):
        nt = _route(E[q], r0, raw_layer, raw_keys, raw_cols, sub_keys, sub_ptr,
                    sub_idx, bottom_col, BIN, yb, mark, touched, 0)
        for z in range(nt):
            c = touched[z]
            if mark[c] == 1:
                for w in range(W):
                    out[q, w] ^= NF[c, w]
            mark[c] = 0
    return out


@nb.njit(cache=True)
def dedupe(data, RS, RL):
    """Indices of the first occurrence of every distinct row."""
    R = RS.shape[0]
    h = np.empty(R, dtype=np.uint64)
    for r in range(R):
        x = np.uint64(1469598103934665603)
        for z in range(RS[r], RS[r] + RL[r]):
            x = (x ^ np.uint64(data[z])) * np.uint64(1099511628211)
        h[r] = x ^ np.uint64(RL[r])
    order = np.argsort(h, kind='mergesort')
    keep = np.ones(R, dtype=np.bool_)
    g = 0
    while g < R:
        e = g + 1
        while e < R and h[order[e]] == h[order[g]]:
            e += 1
        for a in range(g, e):
            ra = order[a]
            if not keep[ra]:
                continue
            for b in range(a + 1, e):
                rb = order[b]
                if not keep[rb] or RL[ra] != RL[rb]:
                    continue
                same = True
                for z in range(RL[ra]):
                    if data[RS[ra] + z] != data[RS[rb] + z]:
                        same = False
                        break
                if same:
                    keep[max(ra, rb)] = False
                    if rb < ra:
                        break
        g = e
    return np.nonzero(keep)[0]


@nb.njit(cache=True)
def compact(D, c0, data, RS, RL, nrows, pivot, head, nxt, orig):
    # keep pivot rows and rows still queued in buckets >= c0
    keep = np.zeros(nrows, dtype=np.uint8)
    for q in range(D):
        if pivot[q] >= 0:
            keep[pivot[q]] = 1
    for q in range(c0, D):
        r = head[q]
        while r >= 0:
            keep[r] = 1
            r = nxt[r]
    remap = np.full(nrows, -1, dtype=np.int64)
    o = 0
    newn = 0
    for q in range(nrows):
        if keep[q]:
            s = RS[q]
            L = RL[q]
            for z in range(L):
                data[o + z] = data[s + z]
            RS[newn] = o
            RL[newn] = L
            orig[newn] = orig[q]
            remap[q] = newn
            o += L
            newn += 1
    for q in range(D):
        if pivot[q] >= 0:
            pivot[q] = remap[pivot[q]]
    newnxt = np.full(newn, -1, dtype=np.int64)
    for q in range(c0, D):
        r = head[q]
        if r >= 0:
            head[q] = remap[r]
            while r >= 0:
                rn = nxt[r]
                newnxt[remap[r]] = remap[rn] if rn >= 0 else -1
                r = rn
    nxt[:newn] = newnxt
    return newn, o


@nb.njit(cache=True)
def eliminate(D, data, RS, RL, nrows, pivot, head, nxt, orig, c_start, top):
    """Column-by-column elimination with the shortest row of each bucket as
    pivot.  Returns early (column < D) when the pool is too small."""
    work = 0
    for c in range(c_start, D):
        h = head[c]
        if h < 0:
            continue
        best = h
        r = h
        need = 0
        cnt = 0
        while r >= 0:
            if RL[r] < RL[best]:
                best = r
            need += RL[r]
            cnt += 1
            r = nxt[r]
        need += cnt * RL[best]
        if top + need > data.shape[0] or nrows + cnt > RS.shape[0]:
            nrows, top = compact(D, c, data, RS, RL, nrows, pivot, head, nxt, orig)
            h = head[c]
            best = h
            r = h
            while r >= 0:
                if RL[r] < RL[best]:
                    best = r
                r = nxt[r]
            if top + need > data.shape[0] or nrows + cnt > RS.shape[0]:
                return c, nrows, top, work
        pivot[c] = best
        ps = RS[best]
        pl = RL[best]
        r = h
        while r >= 0:
            rn = nxt[r]
            if r != best:
                a = RS[r] + 1
                ae = RS[r] + RL[r]
                b = ps + 1
                be = ps + pl
                o = top
                while a < ae and b < be:
                    x = data[a]
                    y = data[b]
                    if x < y:
                        data[o] = x
                        o += 1
                        a += 1
                    elif y < x:
                        data[o] = y
                        o += 1
                        b += 1
                    else:
                        a += 1
                        b += 1
                while a < ae:
                    data[o] = data[a]
                    o += 1
                    a += 1
                while b < be:
                    data[o] = data[b]
                    o += 1
                    b += 1
                work += RL[r] + pl
                L = o - top
                if L > 0:
                    RS[nrows] = top
                    RL[nrows] = L
                    orig[nrows] = orig[r]
                    lc = data[top]
                    nxt[nrows] = head[lc]
                    head[lc] = nrows
                    nrows += 1
                    top = o
            r = rn
    return D, nrows, top, work


@nb.njit(cache=True)
def backsub(D, pivot, RS, RL, data, coord, W):
    """Normal-form bitsets of every column over the free columns."""
    NF = np.zeros((D, W), dtype=np.uint64)
    for c in range(D - 1, -1, -1):
        if coord[c] >= 0:
            b = coord[c]
            NF[c, b >> 6] = np.uint64(1) << np.uint64(b & 63)
        else:
            p = pivot[c]
            for z in range(RS[p] + 1, RS[p] + RL[p]):
                cc = data[z]
                for w in range(W):
                    NF[c, w] ^= NF[cc, w]
    return NF


@nb.njit(cache=True)
def bits_to_csr(B):
    n = B.shape[0]
    ptr = np.zeros(n + 1, dtype=np.int64)
    for q in range(n):
        s = 0
        for w in range(B.shape[1]):
            x = B[q, w]
            while x:
                x &= x - np.uint64(1)
                s += 1
        ptr[q + 1] = ptr[q] + s
    idx = np.empty(ptr[n], dtype=np.int32)
    for q in range(n):
        o = ptr[q]
        for w in range(B.shape[1]):
            x = B[q, w]
            b = 0
            while x:
                if x & np.uint64(1):
                    idx[o] = w * 64 + b
                    o += 1
                x >>= np.uint64(1)
                b += 1
    return ptr, idx


@nb.njit(cache=True)
def bottom_nf(masks, sub_keys, sub_ptr, sub_idx, bottom_col, NF, k, BIN):
    """Normal forms of x_T y^2 for every mask T in masks and every key y."""
    W = NF.shape[1]
    n_sub_keys = sub_keys.shape[0]
    out = np.zeros((masks.shape[0] * n_sub_keys, W), dtype=np.uint64)
    for a in range(masks.shape[0]):
        m = masks[a]
        for p in range(n_sub_keys):
            o = a * n_sub_keys + p
            for z in range(sub_ptr[p], sub_ptr[p + 1]):
                c = bottom_col[m, sub_idx[z]]
                for w in range(W):
                    out[o, w] ^= NF[c, w]
    return out


# ----------------------------------------------------------------------------
# block elimination with dense payloads


@nb.njit(cache=True)
def eliminate_payload(D, data, RS, RL, nrows, pivot, head, nxt, slot, c_start, top, PL,
                      zero, nzero):
    """Like ``eliminate``, but every row also carries a dense payload
    PL[slot[r]] that is added along with it.  Rows whose sparse part
    vanishes are recorded in ``zero`` (by slot)."""
    work = 0
    W = PL.shape[1]
    for c in range(c_start, D):
        h = head[c]
        if h < 0:
            continue
        best = h
        r = h
        need = 0
        cnt = 0
        while r >= 0:
            if RL[r] < RL[best]:
                best = r
            need += RL[r]
            cnt += 1
            r = nxt[r]
        need += cnt * RL[best]
        if top + need > data.shape[0] or nrows + cnt > RS.shape[0]:
            nrows, top = compact(D, c, data, RS, RL, nrows, pivot, head, nxt, slot)
            h = head[c]
            best = h
            r = h
            while r >= 0:
                if RL[r] < RL[best]:
                    best = r
                r = nxt[r]
            if top + need > data.shape[0] or nrows + cnt > RS.shape[0]:
                return c, nrows, top, work, nzero
        pivot[c] = best
        ps = RS[best]
        pl = RL[best]
        sb = slot[best]
        r = h
        while r >= 0:
            rn = nxt[r]
            if r != best:
                a = RS[r] + 1
                ae = RS[r] + RL[r]
                b = ps + 1
                be = ps + pl
                o = top
                while a < ae and b < be:
                    x = data[a]
                    y = data[b]
                    if x < y:
                        data[o] = x
                        o += 1
                        a += 1
                    elif y < x:
                        data[o] = y
                        o += 1
                        b += 1
                    else:
                        a += 1
                        b += 1
                while a < ae:
                    data[o] = data[a]
                    o += 1
                    a += 1
                while b < be:
                    data[o] = data[b]
                    o += 1
                    b += 1
                sr = slot[r]
                for w in range(W):
                    PL[sr, w] ^= PL[sb, w]
                work += RL[r] + pl + W
                L = o - top
                if L > 0:
                    RS[nrows] = top
                    RL[nrows] = L
                    slot[nrows] = sr
                    lc = data[top]
                    nxt[nrows] = head[lc]
                    head[lc] = nrows
                    nrows += 1
                    top = o
                else:
                    zero[nzero] = sr
                    nzero += 1
            r = rn
    return D, nrows, top, work, nzero


@nb.njit(cache=True)
def block_rref(D, pivot, RS, RL, data, slot, PL, freeidx, Wf):
    """Fully reduced pivot rows of one block: row c holds the free-column
    part (Wf words, indexed by freeidx) followed by the payload."""
    W = PL.shape[1]
    RR = np.zeros((D, Wf + W), dtype=np.uint64)
    for c in range(D - 1, -1, -1):
        if freeidx[c] >= 0:
            b = freeidx[c]
            RR[c, b >> 6] = np.uint64(1) << np.uint64(b & 63)
            continue
        p = pivot[c]
        s = slot[p]
        for w in range(W):
            RR[c, Wf + w] = PL[s, w]
        for z in range(RS[p] + 1, RS[p] + RL[p]):
            cc = data[z]
            for w in range(Wf + W):
                RR[c, w] ^= RR[cc, w]
    # free columns are not rows of the echelon
    for c in range(D):
        if freeidx[c] >= 0:
            RR[c, :] = 0
    return RR


@nb.njit(cache=True)
def _setbit(x, q):
    x[q >> 6] ^= np.uint64(1) << np.uint64(q & 63)


@nb.njit(cache=True)
def coupling_block(ptr, idx, out, Dr, blk_of, blk, local_of, RR, fpos, final_pos, Wt):
    """Add the reduction of every raw entry of block ``blk`` to the dense
    rows ``out`` = [free raw positions | tail].  ``fpos`` maps the block's
    free index to its final position, ``final_pos`` does the same for a
    global column (-1 when the column is a block pivot)."""
    Wf = RR.shape[1] - Wt
    Wr = out.shape[1] - Wt
    for q in range(ptr.shape[0] - 1):
        for z in range(ptr[q], ptr[q + 1]):
            g = idx[z]
            if g >= Dr or blk_of[g] != blk:
                continue
            lc = local_of[g]
            fp = final_pos[g]
            if fp >= 0:
                _setbit(out[q], fp)
                continue
            for w in range(Wf):
                x = RR[lc, w]
                b = 0
                while x:
                    if x & np.uint64(1):
                        _setbit(out[q], fpos[w * 64 + b])
                    x >>= np.uint64(1)
                    b += 1
            for w in range(Wt):
                out[q, Wr + w] ^= RR[lc, Wf + w]
    return out


@nb.njit(cache=True)
def tail_bits(ptr, idx, Dr, out, Wr):
    for q in range(ptr.shape[0] - 1):
        for z in range(ptr[q], ptr[q + 1]):
            g = idx[z]
            if g >= Dr:
                _setbit(out[q], Wr * 64 + g - Dr)
    return out


@nb.njit(cache=True)
def _lowbit(x):
    b = 0
    while (x & np.uint64(1)) == 0:
        x >>= np.uint64(1)
        b += 1
    return b


@nb.njit(cache=True)
def rref_feed(X, off, start, F, fpiv, nrank, r0, is_piv, rowof, P, posmap):
    """Insert rows X[start:] (dense over positions; X word w is position
    word off + w) into a reduced echelon stored over the active positions
    P.  Stops early once more than half of P has become pivotal (r0 is
    the rank when P was last compressed)."""
    Wp = F.shape[1]
    z = np.zeros(Wp, dtype=np.uint64)
    nP = P.shape[0]
    work = 0
    for q in range(start, X.shape[0]):
        z[:] = 0
        for w in range(X.shape[1]):
            x = X[q, w]
            base = (off + w) * 64
            while x:
                b = _lowbit(x)
                x ^= np.uint64(1) << np.uint64(b)
                pos = base + b
                if is_piv[pos]:
                    r = rowof[pos]
                    for u in range(Wp):
                        z[u] ^= F[r, u]
                    work += Wp
                else:
                    _setbit(z, posmap[pos])
        lead = -1
        for u in range(Wp):
            if z[u]:
                lead = u * 64 + _lowbit(z[u])
                break
        if lead < 0:
            continue
        _setbit(z, lead)
        lw = lead >> 6
        lb = np.uint64(1) << np.uint64(lead & 63)
        for r in range(nrank):
            if F[r, lw] & lb:
                for u in range(Wp):
                    F[r, u] ^= z[u]
                F[r, lw] ^= lb
        work += nrank
        F[nrank, :] = z
        p = P[lead]
        fpiv[nrank] = p
        is_piv[p] = True
        rowof[p] = nrank
        nrank += 1
        if (nrank - r0) * 2 > nP and nP >= 256:
            return q + 1, nrank, work
    return X.shape[0], nrank, work


@nb.njit(cache=True)
def rref_compress(F, nrank, P, posmap, is_piv):
    """Restrict the echelon to the positions of P that are still free."""
    nf = 0
    for i in range(P.shape[0]):
        if not is_piv[P[i]]:
            nf += 1
    P2 = np.empty(nf, dtype=np.int64)
    old = np.empty(nf, dtype=np.int64)
    j = 0
    for i in range(P.shape[0]):
        if not is_piv[P[i]]:
            P2[j] = P[i]
            old[j] = i
            j += 1
    W2 = max(1, (nf + 63) // 64)
    F2 = np.zeros((F.shape[0], W2), dtype=np.uint64)
    for r in range(nrank):
        for j in range(nf):
            i = old[j]
            if (F[r, i >> 6] >> np.uint64(i & 63)) & np.uint64(1):
                F2[r, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    for i in range(P.shape[0]):
        posmap[P[i]] = -1
    for j in range(nf):
        posmap[P2[j]] = j
    return F2, P2


@nb.njit(cache=True)
def m4r_tables(T):
    """Byte tables for multiplying bit rows by the matrix T (rows of T are
    indexed by bit position)."""
    n, W = T.shape
    nc = (n + 7) // 8
    tab = np.zeros((nc, 256, W), dtype=np.uint64)
    for c in range(nc):
        for v in range(1, 256):
            low = v & -v
            b = 0
            while (1 << b) != low:
                b += 1
            row = c * 8 + b
            prev = v ^ low
            for w in range(W):
                tab[c, v, w] = tab[c, prev, w]
            if row < n:
                for w in range(W):
                    tab[c, v, w] ^= T[row, w]
    return tab


@nb.njit(cache=True)
def m4r_apply(X, off, nbits, tab, out):
    """out[q] ^= (bits off..off+nbits of X[q]) * T."""
    nc = tab.shape[0]
    W = out.shape[1]
    for q in range(X.shape[0]):
        for c in range(nc):
            pos = off + c * 8
            w = pos >> 6
            sh = pos & 63
            v = (X[q, w] >> np.uint64(sh)) & np.uint64(255)
            if sh > 56 and w + 1 < X.shape[1]:
                v |= (X[q, w + 1] << np.uint64(64 - sh)) & np.uint64(255)
            if v:
                iv = int(v)
                for u in range(W):
                    out[q, u] ^= tab[c, iv, u]
    return out


@nb.njit(cache=True)
def block_nf(RR, Wf, fpos, NFpos, out, cols):
    """out[cols[i]] ^= sum of NFpos over the free part of RR[i]."""
    for i in range(RR.shape[0]):
        c = cols[i]
        if c < 0:
            continue
        for w in range(Wf):
            x = RR[i, w]
            while x:
                b = _lowbit(x)
                x ^= np.uint64(1) << np.uint64(b)
                fp = fpos[w * 64 + b]
                for u in range(out.shape[1]):
                    out[c, u] ^= NFpos[fp, u]
    return out
