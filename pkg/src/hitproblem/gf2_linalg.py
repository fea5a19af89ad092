"""GF(2) linear algebra keyed to a monomial column order.

Position 0 is the largest monomial, so the leading position of a row (its
lowest set position) is its largest monomial.  Two layers live here:

* ``BitRow`` / ``EchelonBasis``: Python-integer bitsets for small and
  medium problems (kernels, coordinate maps, tests).
* ``sparse_eliminate``: the compiled row-pool eliminator used for hit
  spaces with hundreds of thousands of columns.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels as K

MAGIC = b"HITB1"


class IndexingMismatch(ValueError):
    pass


class ColumnIndexing:
    """Bijection between a list of monomials and positions 0..D-1, with
    position 0 the largest monomial."""

    def __init__(self, monomials, presorted: bool = False):
        from .monomial_core import as_exponents, order_key
        mons = [as_exponents(m) for m in monomials]
        if not presorted:
            mons.sort(key=order_key, reverse=True)
        self.monomials = mons
        self.position = {m: i for i, m in enumerate(mons)}
        if len(self.position) != len(mons):
            raise ValueError("duplicate monomials in indexing")

    def __len__(self):
        return len(self.monomials)

    def __contains__(self, m):
        return tuple(m) in self.position

    def row(self, monomials) -> "BitRow":
        x = 0
        for m in monomials:
            x ^= 1 << self.position[tuple(m)]
        return BitRow(x, len(self))

    def monomials_of(self, row) -> list:
        return [self.monomials[p] for p in BitRow.coerce(row, len(self)).positions()]


class BitRow:
    __slots__ = ("bits", "D")

    def __init__(self, bits: int = 0, D: int = 0):
        self.bits = bits
        self.D = D

    @classmethod
    def from_positions(cls, positions, D: int):
        x = 0
        for p in positions:
            if not 0 <= p < D:
                raise IndexError(p)
            x ^= 1 << p
        return cls(x, D)

    @classmethod
    def coerce(cls, r, D):
        if isinstance(r, BitRow):
            if r.D != D:
                raise IndexingMismatch(f"row length {r.D} vs {D}")
            return r
        return cls(int(r), D)

    def __bool__(self):
        return self.bits != 0

    def __xor__(self, other):
        other = BitRow.coerce(other, self.D)
        return BitRow(self.bits ^ other.bits, self.D)

    def __eq__(self, other):
        return isinstance(other, BitRow) and self.bits == other.bits and self.D == other.D

    def __hash__(self):
        return hash((self.bits, self.D))

    @property
    def leading(self):
        if not self.bits:
            return None
        return (self.bits & -self.bits).bit_length() - 1

    def positions(self):
        x = self.bits
        out = []
        while x:
            low = x & -x
            out.append(low.bit_length() - 1)
            x ^= low
        return out

    def __repr__(self):
        return f"BitRow({self.positions()}, D={self.D})"


@dataclass(frozen=True)
class Absorbed:
    pass


@dataclass(frozen=True)
class NewPivot:
    position: int


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


class EchelonBasis:
    """Rows with distinct leading positions (lazily reduced)."""

    def __init__(self, D: int):
        self.D = D
        self.rows: dict[int, int] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _bits(self, row) -> int:
        if isinstance(row, BitRow):
            if row.D != self.D:
                raise IndexingMismatch(f"row length {row.D} vs basis {self.D}")
            return row.bits
        x = int(row)
        if x >> self.D:
            raise IndexingMismatch("row has bits beyond the basis length")
        return x

    def _reduce_lead(self, x: int) -> int:
        rows = self.rows
        while x:
            p = _low(x)
            r = rows.get(p)
            if r is None:
                return x
            x ^= r
        return 0

    def reduce_insert(self, row):
        x = self._reduce_lead(self._bits(row))
        if not x:
            return Absorbed()
        p = _low(x)
        self.rows[p] = x
        return NewPivot(p)

    def member(self, row) -> bool:
        return self._reduce_lead(self._bits(row)) == 0

    def leading_positions(self) -> set:
        return set(self.rows)

    def free_positions(self) -> list:
        return [p for p in range(self.D) if p not in self.rows]

    def normal_form(self, row) -> int:
        """Full reduction: the remainder has no pivot positions set."""
        x = self._bits(row)
        rows = self.rows
        out = 0
        while x:
            p = _low(x)
            r = rows.get(p)
            if r is None:
                out |= 1 << p
                x ^= 1 << p
            else:
                x ^= r
        return out

    def back_substitute(self):
        """Bring every stored row to reduced echelon form."""
        for p in sorted(self.rows, reverse=True):
            r = self.rows[p]
            self.rows[p] = (1 << p) | self.normal_form(r ^ (1 << p))
        return self

    def iter_rows(self):
        for p in sorted(self.rows):
            yield BitRow(self.rows[p], self.D)

    def save(self, path_or_stream):
        rows = [BitRow(self.rows[p], self.D).positions() for p in sorted(self.rows)]
        write_checkpoint(path_or_stream, self.D, rows)

    @classmethod
    def load(cls, path_or_stream) -> "EchelonBasis":
        D, rows = read_checkpoint(path_or_stream)
        b = cls(D)
        for pos in rows:
            b.reduce_insert(BitRow.from_positions(pos, D))
        return b


def rank_of_rows(rows, D: int) -> int:
    b = EchelonBasis(D)
    for r in rows:
        b.reduce_insert(r)
    return b.rank


def kernel_of_stacked_maps(domain_dim: int, maps, codomains=None) -> EchelonBasis:
    """Joint kernel of linear maps given as per-domain-coordinate images.

    ``maps[j][i]`` is the image (int bitset over codomain j) of the i-th
    domain basis vector.  When ``codomains[j]`` is an EchelonBasis, images
    are first reduced modulo it, so the kernel is taken in the quotient.
    """
    widths = []
    for j, m in enumerate(maps):
        if len(m) != domain_dim:
            raise IndexingMismatch(f"map {j} has {len(m)} columns, expected {domain_dim}")
        if codomains is not None and codomains[j] is not None:
            widths.append(codomains[j].D)
        else:
            widths.append(max((int(x).bit_length() for x in m), default=0))
    C = sum(widths)
    work = EchelonBasis(C + domain_dim)
    kernel = EchelonBasis(domain_dim)
    for i in range(domain_dim):
        x = 0
        off = 0
        for j, m in enumerate(maps):
            v = m[i]
            v = v.bits if isinstance(v, BitRow) else int(v)
            if codomains is not None and codomains[j] is not None:
                v = codomains[j].normal_form(v)
            x |= v << off
            off += widths[j]
        x |= 1 << (C + i)
        x = work._reduce_lead(x)
        if x and _low(x) < C:
            work.rows[_low(x)] = x
        elif x:
            kernel.reduce_insert(x >> C)
            work.rows[_low(x)] = x
    return kernel


def dense_rank(matrix) -> int:
    """Rank of a 0/1 numpy matrix by plain Gaussian elimination."""
    M = (np.asarray(matrix) & 1).astype(np.uint8).copy()
    r = 0
    rows, cols = M.shape
    for c in range(cols):
        piv = None
        for q in range(r, rows):
            if M[q, c]:
                piv = q
                break
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for q in range(rows):
            if q != r and M[q, c]:
                M[q] ^= M[r]
        r += 1
        if r == rows:
            break
    return r


# ----------------------------------------------------------------------------
# checkpoint format: MAGIC, varint D, varint row count, then per row a varint
# length followed by position deltas (first delta = first position)


def _varint(x: int) -> bytes:
    out = bytearray()
    while True:
        b = x & 0x7F
        x >>= 7
        if x:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _read_varint(buf, pos):
    x = 0
    shift = 0
    while True:
        b = buf[pos]
        pos += 1
        x |= (b & 0x7F) << shift
        if not b & 0x80:
            return x, pos
        shift += 7


def encode_rows(D: int, rows) -> bytes:
    out = bytearray(MAGIC)
    out += _varint(D)
    out += _varint(len(rows))
    for r in rows:
        r = [int(p) for p in r]
        out += _varint(len(r))
        prev = 0
        for p in r:
            if p < prev or p >= D:
                raise ValueError("row positions must be sorted and inside 0..D-1")
            out += _varint(p - prev)
            prev = p
    return bytes(out)


def decode_rows(buf: bytes):
    if buf[:5] != MAGIC:
        raise ValueError("not a HITB1 checkpoint")
    pos = 5
    D, pos = _read_varint(buf, pos)
    n, pos = _read_varint(buf, pos)
    rows = []
    for _ in range(n):
        L, pos = _read_varint(buf, pos)
        r = []
        prev = 0
        for _ in range(L):
            d, pos = _read_varint(buf, pos)
            prev += d
            r.append(prev)
        rows.append(r)
    return D, rows


def write_checkpoint(path_or_stream, D: int, rows):
    data = encode_rows(D, rows)
    if isinstance(path_or_stream, (str, os.PathLike)):
        tmp = str(path_or_stream) + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path_or_stream)
    else:
        path_or_stream.write(data)


def read_checkpoint(path_or_stream):
    if isinstance(path_or_stream, (str, os.PathLike)):
        with open(path_or_stream, "rb") as fh:
            return decode_rows(fh.read())
    if isinstance(path_or_stream, io.IOBase) or hasattr(path_or_stream, "read"):
        return decode_rows(path_or_stream.read())
    return decode_rows(bytes(path_or_stream))


# compact array form of the same format, used for large pivot sets
def encode_csr(D: int, ptr: np.ndarray, idx: np.ndarray) -> bytes:
    n = len(ptr) - 1
    lens = np.diff(ptr)
    deltas = idx.astype(np.int64).copy()
    if len(idx):
        starts = ptr[:-1][lens > 0]
        body = np.diff(np.concatenate([[0], deltas]))
        body[starts] = deltas[starts]
        deltas = body
    stream = np.empty(n + len(idx), dtype=np.int64)
    # interleave: length then deltas for every row
    pos = np.arange(n) + ptr[:-1]
    stream[pos] = lens
    mask = np.ones(len(stream), dtype=bool)
    mask[pos] = False
    stream[mask] = deltas
    return MAGIC + _varint(D) + _varint(n) + _varints(stream)


def _varints(values: np.ndarray) -> bytes:
    v = values.astype(np.uint64)
    out = []
    while True:
        low = (v & np.uint64(0x7F)).astype(np.uint8)
        v = v >> np.uint64(7)
        more = v > 0
        out.append(low | (more.astype(np.uint8) << 7))
        if not more.any():
            break
    # bytes of each value are consecutive; the number of bytes per value is
    # the index of its last chunk plus one
    chunks = np.stack(out, axis=1)
    nbytes = np.ones(len(values), dtype=np.int64)
    for j in range(1, chunks.shape[1]):
        nbytes += (chunks[:, j - 1] & 0x80) > 0
    keep = np.arange(chunks.shape[1])[None, :] < nbytes[:, None]
    return chunks[keep].tobytes()


def decode_csr(buf: bytes):
    D, rows = decode_rows(buf)
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(r) for r in rows])
    idx = np.fromiter((p for r in rows for p in r), dtype=np.int32, count=int(ptr[-1]))
    return D, ptr, idx


# ----------------------------------------------------------------------------


@dataclass
class SparseEchelon:
    """Result of ``sparse_eliminate``: pivot rows inside a shared pool."""
    D: int
    pivot: np.ndarray      # column -> row index in the pool, or -1
    data: np.ndarray
    RS: np.ndarray
    RL: np.ndarray
    origin: np.ndarray     # row -> index of the input relation it descends from
    work: int = 0

    @property
    def rank(self) -> int:
        return int((self.pivot >= 0).sum())

    def free_columns(self) -> np.ndarray:
        return np.nonzero(self.pivot < 0)[0]

    def pivot_rows_csr(self):
        cols = np.nonzero(self.pivot >= 0)[0]
        rows = self.pivot[cols]
        lens = self.RL[rows]
        ptr = np.zeros(len(cols) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum(lens)
        idx = np.empty(int(ptr[-1]), dtype=np.int32)
        for q, r in enumerate(rows):
            idx[ptr[q]:ptr[q + 1]] = self.data[self.RS[r]:self.RS[r] + self.RL[r]]
        return ptr, idx

    def save(self, path):
        ptr, idx = self.pivot_rows_csr()
        tmp = str(path) + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(encode_csr(self.D, ptr, idx))
        os.replace(tmp, path)

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            D, ptr, idx = decode_csr(fh.read())
        n = len(ptr) - 1
        pivot = np.full(D, -1, dtype=np.int64)
        if n:
            pivot[idx[ptr[:-1]]] = np.arange(n)
        return cls(D, pivot, idx, ptr[:-1].copy(), np.diff(ptr), np.full(n, -1, dtype=np.int64))

    def normal_form_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Bitset normal forms of every column over the free columns, and
        the column -> coordinate map."""
        free = self.free_columns()
        coord = np.full(self.D, -1, dtype=np.int64)
        coord[free] = np.arange(len(free))
        W = max(1, (len(free) + 63) // 64)
        NF = K.backsub(self.D, self.pivot, self.RS, self.RL, self.data, coord, W)
        return NF, coord


def sparse_eliminate(D: int, data: np.ndarray, lens: np.ndarray, slack: float = 3.0,
                     dedupe: bool = True, log=None) -> SparseEchelon:
    """Echelonize rows given as concatenated sorted column lists.

    Rows are bucketed by leading column; columns are processed in order and
    the shortest row of each bucket becomes the pivot.  The pool grows by
    doubling whenever fill-in exhausts it.
    """
    R = len(lens)
    RS0 = np.zeros(R, dtype=np.int64)
    if R:
        RS0[1:] = np.cumsum(lens)[:-1]
    keep = np.arange(R)
    if dedupe and R:
        keep = K.dedupe(data, RS0, lens.astype(np.int64))
    R = len(keep)
    lens_k = lens[keep].astype(np.int64)
    nnz = int(lens_k.sum())
    cap = max(int(nnz * slack), 1 << 16)
    caprows = max(2 * R, 1 << 12)
    pool = np.empty(cap, dtype=np.int32)
    RS = np.zeros(caprows, dtype=np.int64)
    RL = np.zeros(caprows, dtype=np.int64)
    orig = np.full(caprows, -1, dtype=np.int64)
    o = 0
    for q, r in enumerate(keep):
        L = lens_k[q]
        pool[o:o + L] = data[RS0[r]:RS0[r] + L]
        RS[q] = o
        RL[q] = L
        orig[q] = r
        o += L
    nxt = np.full(caprows, -1, dtype=np.int64)
    head = np.full(D, -1, dtype=np.int64)
    if R:
        _bucket(pool, RS, R, head, nxt)
    pivot = np.full(D, -1, dtype=np.int64)
    c, nrows, top, work = 0, R, o, 0
    while True:
        c, nrows, top, w = K.eliminate(D, pool, RS, RL, nrows, pivot, head, nxt, orig, c, top)
        work += w
        if c >= D:
            break
        if log:
            log(f"pool grow at column {c}/{D}: {pool.shape[0]} entries, {RS.shape[0]} rows")
        pool = _grow(pool, 2 * pool.shape[0])
        m = 2 * RS.shape[0]
        RS, RL, orig = _grow(RS, m), _grow(RL, m), _grow(orig, m, fill=-1)
        nxt = _grow(nxt, m, fill=-1)
    return SparseEchelon(D, pivot, pool, RS[:nrows], RL[:nrows], orig[:nrows], work)


def _grow(a, m, fill=0):
    b = np.full(m, fill, dtype=a.dtype) if fill else np.empty(m, dtype=a.dtype)
    b[:a.shape[0]] = a
    return b


def _bucket(pool, RS, R, head, nxt):
    lead = pool[RS[:R]]
    order = np.argsort(lead, kind="stable")[::-1]
    for r in order:
        nxt[r] = head[lead[r]]
        head[lead[r]] = r


# ----------------------------------------------------------------------------
# block-structured elimination


@dataclass
class BlockEchelon:
    """Result of ``block_eliminate``: free columns and normal forms only."""
    D: int
    free: np.ndarray
    NF: np.ndarray
    work: int = 0
    blocks: int = 0

    @property
    def rank(self) -> int:
        return self.D - len(self.free)

    def free_columns(self) -> np.ndarray:
        return self.free

    def normal_form_table(self):
        coord = np.full(self.D, -1, dtype=np.int64)
        coord[self.free] = np.arange(len(self.free))
        return self.NF, coord

    def save(self, path):
        tmp = str(path) + ".tmp.npz"
        np.savez_compressed(tmp, D=self.D, free=self.free, NF=self.NF)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path):
        with np.load(path) as z:
            return cls(int(z["D"]), z["free"], z["NF"])


def _words(n):
    return max(1, (n + 63) // 64)


def _sub_rows(data, RS, lens, rows):
    L = lens[rows]
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum(L)
    idx = np.empty(int(ptr[-1]), dtype=np.int32)
    for q, r in enumerate(rows):
        idx[ptr[q]:ptr[q + 1]] = data[RS[r]:RS[r] + lens[r]]
    return ptr, idx


def block_eliminate(D: int, Dr: int, data: np.ndarray, lens: np.ndarray,
                    blk_of: np.ndarray, log=None) -> BlockEchelon:
    """Echelonize rows over columns [0, Dr) + [Dr, D) where the first part
    splits into blocks (``blk_of``) that few rows straddle.

    Rows inside one block are eliminated there, the tail columns riding
    along as dense payloads.  Rows straddling blocks are then reduced by
    the fully reduced block echelons, and everything left (free block
    columns plus the tail) is finished by a dense reduced echelon.  The
    pivot columns are those of plain elimination in column order.
    """
    R = len(lens)
    RS = np.zeros(R, dtype=np.int64)
    if R:
        RS[1:] = np.cumsum(lens)[:-1]
    keep = K.dedupe(data, RS, lens.astype(np.int64)) if R else np.arange(0)
    Dt = D - Dr
    Wt = _words(Dt)
    nb_ = int(blk_of.max()) + 1 if Dr else 0
    local_of = np.zeros(Dr, dtype=np.int64)
    cols_of = []
    for b in range(nb_):
        cs = np.nonzero(blk_of == b)[0]
        local_of[cs] = np.arange(len(cs))
        cols_of.append(cs)
    # classify rows by the blocks they touch
    rowid = np.repeat(np.arange(R), lens)
    rawm = data < Dr
    rb = np.full(R, -1, dtype=np.int64)
    multi = np.zeros(R, dtype=bool)
    if Dr:
        rr, bb = rowid[rawm], blk_of[data[rawm]]
        first = np.full(R, -1, dtype=np.int64)
        first[rr[::-1]] = bb[::-1]
        multi[rr[bb != first[rr]]] = True
        rb = first
    keepm = np.zeros(R, dtype=bool)
    keepm[keep] = True
    tail_rows = np.nonzero(keepm & (rb < 0))[0]
    coup_rows = np.nonzero(keepm & multi)[0]
    work = 0
    RRs, fposs, frees, payload_rows = [], [], [], []
    free_raw = []
    for b in range(nb_):
        rows = np.nonzero(keepm & (rb == b) & ~multi)[0]
        Dc = len(cols_of[b])
        ptr, idx = _sub_rows(data, RS, lens, rows)
        n = len(rows)
        PL = np.zeros((n, Wt), dtype=np.uint64)
        isr = idx < Dr
        K.tail_bits(ptr, idx, Dr, PL, 0)
        rl = np.add.reduceat(isr.astype(np.int64), ptr[:-1]) if n else np.zeros(0, np.int64)
        loc = local_of[idx[isr]].astype(np.int32)
        nnz = len(loc)
        cap = max(3 * nnz, 1 << 16)
        caprows = max(2 * n, 1 << 12)
        pool = np.empty(cap, dtype=np.int32)
        pool[:nnz] = loc
        RSb = np.zeros(caprows, dtype=np.int64)
        RLb = np.zeros(caprows, dtype=np.int64)
        slot = np.full(caprows, -1, dtype=np.int64)
        if n:
            RSb[1:n] = np.cumsum(rl)[:-1]
        RLb[:n] = rl
        slot[:n] = np.arange(n)
        nxt = np.full(caprows, -1, dtype=np.int64)
        head = np.full(Dc, -1, dtype=np.int64)
        if n:
            _bucket(pool, RSb, n, head, nxt)
        pivot = np.full(Dc, -1, dtype=np.int64)
        zero = np.empty(n, dtype=np.int64)
        c, nrows, top, nz = 0, n, nnz, 0
        while True:
            c, nrows, top, w, nz = K.eliminate_payload(
                Dc, pool, RSb, RLb, nrows, pivot, head, nxt, slot, c, top, PL, zero, nz)
            work += w
            if c >= Dc:
                break
            pool = _grow(pool, 2 * pool.shape[0])
            m = 2 * RSb.shape[0]
            RSb, RLb, slot = _grow(RSb, m), _grow(RLb, m), _grow(slot, m, fill=-1)
            nxt = _grow(nxt, m, fill=-1)
        freel = np.nonzero(pivot < 0)[0]
        freeidx = np.full(Dc, -1, dtype=np.int64)
        freeidx[freel] = np.arange(len(freel))
        Wf = _words(len(freel))
        RR = K.block_rref(Dc, pivot, RSb, RLb, pool, slot, PL, freeidx, Wf)
        payload_rows.append(PL[zero[:nz]])
        del PL, pool
        RRs.append(RR)
        frees.append(freel)
        free_raw.append(cols_of[b][freel])
        if log:
            log(f"block {b}: {Dc} columns, {n} rows, rank {Dc - len(freel)}, "
                f"{nz} payload rows")
    # final positions: free raw columns in global order, then the tail
    fr = np.sort(np.concatenate(free_raw)) if free_raw else np.zeros(0, np.int64)
    nFR = len(fr)
    Wr = _words(nFR) if nFR else 0
    final_pos = np.full(Dr, -1, dtype=np.int64)
    final_pos[fr] = np.arange(nFR)
    for b in range(nb_):
        fposs.append(final_pos[cols_of[b][frees[b]]])
    NPOS = (Wr + Wt) * 64
    valid = np.concatenate([np.arange(nFR), Wr * 64 + np.arange(Dt)]).astype(np.int64)
    is_piv = np.zeros(NPOS, dtype=np.bool_)
    rowof = np.full(NPOS, -1, dtype=np.int64)
    posmap = np.full(NPOS, -1, dtype=np.int64)
    posmap[valid] = np.arange(len(valid))
    P = valid
    cap = len(valid)
    F = np.zeros((cap, _words(len(P))), dtype=np.uint64)
    fpiv = np.full(cap, -1, dtype=np.int64)
    nrank = 0

    r0 = 0

    def feed(X, off):
        nonlocal F, P, nrank, work, r0
        s = 0
        while s < X.shape[0]:
            s, nrank, w = K.rref_feed(X, off, s, F, fpiv, nrank, r0, is_piv, rowof, P, posmap)
            work += w
            if s < X.shape[0]:
                F, P = K.rref_compress(F, nrank, P, posmap, is_piv)
                r0 = nrank
    # tail-only rows, in chunks to bound the dense copy
    for a in range(0, len(tail_rows), 65536):
        rows = tail_rows[a:a + 65536]
        ptr, idx = _sub_rows(data, RS, lens, rows)
        X = np.zeros((len(rows), Wt), dtype=np.uint64)
        K.tail_bits(ptr, idx, Dr, X, 0)
        feed(X, Wr)
    for PLz in payload_rows:
        for a in range(0, len(PLz), 65536):
            feed(np.ascontiguousarray(PLz[a:a + 65536]), Wr)
    for a in range(0, len(coup_rows), 16384):
        rows = coup_rows[a:a + 16384]
        ptr, idx = _sub_rows(data, RS, lens, rows)
        X = np.zeros((len(rows), Wr + Wt), dtype=np.uint64)
        K.tail_bits(ptr, idx, Dr, X, Wr)
        for b in range(nb_):
            K.coupling_block(ptr, idx, X, Dr, blk_of, b, local_of, RRs[b], fposs[b],
                             final_pos, Wt)
        feed(X, 0)
    del payload_rows
    F, P = K.rref_compress(F, nrank, P, posmap, is_piv)
    if log:
        log(f"final echelon: {len(valid)} positions, rank {nrank}, free {len(P)}")
    # normal forms
    nfree = len(P)
    W = _words(nfree)
    NFpos = np.zeros((NPOS, W), dtype=np.uint64)
    for j, p in enumerate(P):
        NFpos[p, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    NFpos[fpiv[:nrank]] = F[:nrank]
    gfree = np.empty(nfree, dtype=np.int64)
    israw = P < nFR
    gfree[israw] = fr[P[israw]]
    gfree[~israw] = Dr + P[~israw] - Wr * 64
    NF = np.zeros((D, W), dtype=np.uint64)
    # final positions -> global columns
    NF[fr] = NFpos[:nFR]
    NF[Dr:] = NFpos[Wr * 64:Wr * 64 + Dt]
    tab = K.m4r_tables(np.ascontiguousarray(NFpos[Wr * 64:Wr * 64 + Dt]))
    for b in range(nb_):
        RR = RRs[b]
        Wf = RR.shape[1] - Wt
        piv_local = np.nonzero(~np.isin(np.arange(len(cols_of[b])), frees[b]))[0]
        sub = np.ascontiguousarray(RR[piv_local])
        out = np.zeros((len(piv_local), W), dtype=np.uint64)
        K.m4r_apply(np.ascontiguousarray(sub[:, Wf:]), 0, Dt, tab, out)
        K.block_nf(sub, Wf, fposs[b], NFpos, out, np.arange(len(piv_local)))
        NF[cols_of[b][piv_local]] = out
        RRs[b] = None
    free = gfree
    return BlockEchelon(D, free, NF, work, nb_)
