"""Hit spaces, admissible bases and weight-graded quotients.

Every computation is an instance of one object: the quotient

    Q(k, n, thr, s) = P_k(n) / (A_s^+ P_k + span{u : omega(u) < thr})

where A_s^+ is generated by Sq^(2^t), t < s (s = None for all of A^+), and
thr is a weight vector (empty = no threshold).  The basis of Q consists of
the monomials that are not leading terms (pivot at the largest monomial), so

* thr = weight of the minimal spike gives QP_k(n) itself (Singer's
  criterion makes everything below it hit),
* thr = omega gives QP_k(omega) exactly as the monomials of weight omega
  in the basis,
* thr = omega(u), s = len(omega(u)) decides strict inadmissibility of u.

Two solvers produce such a quotient.

Direct: eliminate all relations Sq^(2^t)(m) over the monomials of weight at
least thr.

Layered: split monomials by r = omega_1 (number of odd exponents).  Writing
u = x_T y^2 with |T| = r, the span of monomials with omega_1 <= r is an
A-submodule.  The lowest layer r0 allowed by thr is handled recursively:
x_T y^2 with y running over the basis of Q(k, (n - r0)/2, tail(thr), s-1),
because Sq^(2^t)(x_T w^2) equals x_T (Sq^(2^(t-1)) w)^2 plus terms of smaller
omega_1, which lie below thr.  Higher layers keep raw monomial columns.  The
remaining relations (sources with omega_1 > r0) are routed term by term to
raw columns or to bottom coordinates and eliminated once.  The result is the
same quotient as the direct solver, with far fewer columns.
"""
from __future__ import annotations

import json
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _kernels as K
from .gf2_linalg import BlockEchelon, SparseEchelon, block_eliminate, sparse_eliminate
from .monomial_core import (
    WeightVector, as_exponents, format_monomial, minimal_spike, mu,
    singer_threshold, weight_vector,
)
from .poly_f2 import NotHomogeneous, PolynomialF2

ALGO_VERSION = 1
DIRECT_LIMIT = 70000
DEFAULT_MAX_BLOCK_GIB = 8.0


class ResourceRefusal(RuntimeError):
    pass


@dataclass
class EngineConfig:
    max_block_gib: float = DEFAULT_MAX_BLOCK_GIB
    checkpoint_dir: str | None = None
    direct_limit: int = DIRECT_LIMIT
    verbose: bool = False
    raw_solver: str = "blocks"      # or "sparse": one elimination over everything

    def log(self, msg):
        if self.verbose:
            print(f"[hit {time.strftime('%H:%M:%S')}] {msg}", flush=True)


CONFIG = EngineConfig(checkpoint_dir=os.environ.get("HIT_CHECKPOINT_DIR") or None)


def configure(**kw):
    for key, val in kw.items():
        if not hasattr(CONFIG, key):
            raise TypeError(f"unknown engine option {key}")
        setattr(CONFIG, key, val)
    return CONFIG


# ----------------------------------------------------------------------------
# array helpers


def sort_desc(E: np.ndarray, n: int) -> np.ndarray:
    """Permutation sorting exponent rows descending in the monomial order."""
    if len(E) == 0:
        return np.zeros(0, dtype=np.int64)
    L = max(n.bit_length(), 1)
    W = K.weight_rows(E, L)
    keys = [E[:, j] for j in range(E.shape[1] - 1, -1, -1)]
    keys += [W[:, b] for b in range(L - 1, -1, -1)]
    return np.lexsort(keys)[::-1]


def not_below(E: np.ndarray, thr: tuple, n: int) -> np.ndarray:
    """Mask of rows whose weight vector is >= thr."""
    if not thr or len(E) == 0:
        return np.ones(len(E), dtype=bool)
    L = max(n.bit_length(), len(thr))
    W = K.weight_rows(E, L)
    t = np.zeros(L, dtype=np.int64)
    t[:len(thr)] = thr
    diff = W - t
    nz = diff != 0
    first = nz.argmax(axis=1)
    below = nz.any(axis=1) & (diff[np.arange(len(E)), first] < 0)
    return ~below


def ranks(E: np.ndarray) -> np.ndarray:
    return K.rank_rows(np.ascontiguousarray(E, dtype=np.int64), K.BIN)


def generator_indices(n: int, s):
    out = []
    t = 0
    while (1 << t) <= n and (s is None or t < s):
        out.append(1 << t)
        t += 1
    return np.array(out, dtype=np.int64)


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass
class NFMap:
    """Sparse normal forms: sorted ranks of the monomials with nonzero
    normal form, their exponents, and coordinate lists in CSR form."""
    keys: np.ndarray
    exps: np.ndarray
    ptr: np.ndarray
    idx: np.ndarray

    @staticmethod
    def build(exps, bits):
        ptr, idx = K.bits_to_csr(bits)
        nonzero = np.diff(ptr) > 0
        exps = exps[nonzero]
        keys = ranks(exps)
        order = np.argsort(keys, kind="stable")
        lens = np.diff(ptr)[nonzero][order]
        starts = ptr[:-1][nonzero][order]
        nptr = np.zeros(len(order) + 1, dtype=np.int64)
        nptr[1:] = np.cumsum(lens)
        nidx = np.empty(int(nptr[-1]), dtype=np.int32)
        for q in range(len(order)):
            nidx[nptr[q]:nptr[q + 1]] = idx[starts[q]:starts[q] + lens[q]]
        return NFMap(keys[order], exps[order], nptr, nidx)


# ----------------------------------------------------------------------------
# quotient levels


class Level:
    """Q(k, n, thr, s) with basis, normal forms and provenance."""

    kind = "abstract"

    def __init__(self, k, n, thr, s):
        self.k = k
        self.n = n
        self.thr = tuple(thr)
        self.s = s
        self.basis = np.zeros((0, k), dtype=np.int64)
        self._nfmap = None
        self.stats = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def words(self) -> int:
        return max(1, (self.dim + 63) // 64)

    def basis_tuples(self):
        return [tuple(int(x) for x in r) for r in self.basis]

    def index_of(self, m):
        e = tuple(as_exponents(m))
        for i, r in enumerate(self.basis):
            if tuple(int(x) for x in r) == e:
                return i
        return None

    def nf_bits(self, E: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def nf_map(self) -> NFMap:
        raise NotImplementedError

    def nf_coords(self, f) -> list:
        """Coordinates (basis indices) of the class of a polynomial."""
        if isinstance(f, PolynomialF2):
            terms = list(f.terms)
        else:
            terms = [as_exponents(f)]
        if not terms:
            return []
        E = np.array(terms, dtype=np.int64).reshape(len(terms), self.k)
        if np.any(E.sum(axis=1) != self.n):
            raise NotHomogeneous(f"terms must have degree {self.n}")
        bits = np.bitwise_xor.reduce(self.nf_bits(E), axis=0)
        out = []
        for w, x in enumerate(bits):
            x = int(x)
            while x:
                low = x & -x
                out.append(w * 64 + low.bit_length() - 1)
                x ^= low
        return out

    def weight_dims(self) -> dict:
        c = Counter(weight_vector(tuple(int(x) for x in r)).entries for r in self.basis)
        return dict(sorted(c.items(), reverse=True))


class DirectLevel(Level):
    kind = "direct"

    def __init__(self, k, n, thr, s, config=None):
        super().__init__(k, n, thr, s)
        cfg = config or CONFIG
        t0 = time.time()
        E = K.compositions(n, k, K.BIN)
        E = E[not_below(E, self.thr, n)]
        E = E[sort_desc(E, n)]
        self.cols = E
        D = len(E)
        N = int(K.BIN[n + k - 1, k - 1])
        self.col_of_rank = np.full(N, -1, dtype=np.int32)
        self.col_of_rank[ranks(E)] = np.arange(D, dtype=np.int32)
        thr_arr = np.array(self.thr, dtype=np.int64)
        gens = generator_indices(n, s)
        ech = _load_checkpoint(self, D, cfg)
        if ech is None:
            data, lens, ot, orank = K.direct_rows(n, k, gens, thr_arr, self.col_of_rank, K.BIN)
            self.row_origin = (ot, orank)
            ech = sparse_eliminate(D, data, lens, log=cfg.log if cfg.verbose else None)
            _save_checkpoint(self, ech, cfg)
        self.ech = ech
        self.NF, self.coord = ech.normal_form_table()
        self.basis = E[ech.free_columns()]
        self.stats = dict(columns=D, rank=ech.rank, work=ech.work, seconds=time.time() - t0)
        cfg.log(f"direct k={k} n={n} thr={self.thr} s={s}: D={D} dim={self.dim} "
                f"{time.time() - t0:.1f}s")

    def nf_bits(self, E):
        r = ranks(E)
        c = self.col_of_rank[r]
        out = np.zeros((len(E), self.NF.shape[1]), dtype=np.uint64)
        ok = c >= 0
        out[ok] = self.NF[c[ok]]
        return out

    def nf_map(self):
        if self._nfmap is None:
            self._nfmap = NFMap.build(self.cols, self.NF)
        return self._nfmap

    def is_pivot(self, m) -> bool:
        c = self.col_of_rank[ranks(np.array([as_exponents(m)], dtype=np.int64))[0]]
        return bool(c >= 0 and self.ech.pivot[c] >= 0)


class LayeredLevel(Level):
    kind = "layered"

    def __init__(self, k, n, thr, s, config=None):
        super().__init__(k, n, thr, s)
        cfg = config or CONFIG
        t0 = time.time()
        th1 = self.thr[0] if self.thr else 0
        r0 = th1 if (n - th1) % 2 == 0 else th1 + 1
        self.r0 = r0
        sub_thr = self.thr[1:] if (self.thr and r0 == th1) else ()
        bottom_masks = [m for m in range(1 << k) if _popcount(m) == r0] if r0 <= min(k, n) else []
        if bottom_masks:
            self.sub = get_level(k, (n - r0) // 2, sub_thr, None if s is None else s - 1, cfg)
            sub_map = self.sub.nf_map()
            sub_basis = self.sub.basis
        else:
            self.sub = None
            sub_map = NFMap(np.zeros(0, np.int64), np.zeros((0, k), np.int64),
                            np.zeros(1, np.int64), np.zeros(0, np.int32))
            sub_basis = np.zeros((0, k), dtype=np.int64)
        # raw layers
        raw_parts = []
        raw_layer = np.zeros(k + 1, dtype=np.bool_)
        for r in range(r0 + 2, min(k, n) + 1, 2):
            raw_layer[r] = True
            Y = K.compositions((n - r) // 2, k, K.BIN)
            for m in range(1 << k):
                if _popcount(m) == r:
                    bits = np.array([(m >> j) & 1 for j in range(k)], dtype=np.int64)
                    raw_parts.append(2 * Y + bits)
        raw = np.concatenate(raw_parts) if raw_parts else np.zeros((0, k), dtype=np.int64)
        Dr = len(raw)
        q = len(sub_basis)
        Db = len(bottom_masks) * q
        if cfg.raw_solver == "blocks":
            # dense payloads of the reduced block rows, plus live block rows
            est = 3 * Dr * 8 * max(1, (Db + 63) // 64) / 2 ** 30
            what = f"{Dr} raw columns with {Db}-column dense payloads need"
        else:
            est = Dr * Dr / 8 / 2 ** 30
            what = f"raw block of {Dr} columns needs"
        if est > cfg.max_block_gib:
            raise ResourceRefusal(
                f"k={k} n={n} thr={self.thr}: {what} ~{est:.1f} GiB "
                f"(cap {cfg.max_block_gib} GiB)")
        raw = raw[sort_desc(raw, n)]
        self.raw = raw
        rk = ranks(raw)
        order = np.argsort(rk)
        self.raw_keys = rk[order]
        self.raw_cols = order.astype(np.int32)
        self.raw_layer = raw_layer
        # bottom coordinates x_T b^2
        bot = []
        owner = []
        for m in bottom_masks:
            bits = np.array([(m >> j) & 1 for j in range(k)], dtype=np.int64)
            bot.append(2 * sub_basis + bits)
            owner.append(np.stack([np.full(q, m), np.arange(q)], axis=1))
        bot = np.concatenate(bot) if bot else np.zeros((0, k), dtype=np.int64)
        owner = np.concatenate(owner) if owner else np.zeros((0, 2), dtype=np.int64)
        perm = sort_desc(bot, n)
        bot = bot[perm]
        owner = owner[perm]
        self.bottom = bot
        self.bottom_col = np.full((1 << k, max(q, 1)), -1, dtype=np.int32)
        if len(owner):
            self.bottom_col[owner[:, 0], owner[:, 1]] = Dr + np.arange(len(owner), dtype=np.int32)
        D = Dr + len(bot)
        self.D = D
        self.sub_map = sub_map
        ech = _load_checkpoint(self, D, cfg)
        if ech is None:
            gens = generator_indices(n, s)
            thr_arr = np.array(self.thr, dtype=np.int64)
            data, lens, ot, orank = K.layered_rows(
                n, k, gens, thr_arr, r0, raw_layer, self.raw_keys, self.raw_cols,
                sub_map.keys, sub_map.ptr, sub_map.idx, self.bottom_col, D, K.BIN)
            self.row_origin = (ot, orank)
            cfg.log(f"layered k={k} n={n} thr={self.thr}: raw={Dr} bottom={len(bot)} "
                    f"rows={len(lens)} nnz={int(lens.sum())} {time.time() - t0:.1f}s")
            lg = cfg.log if cfg.verbose else None
            if cfg.raw_solver == "blocks" and Dr:
                odd = np.zeros(Dr, dtype=np.int64)
                for j in range(k):
                    odd |= (raw[:, j] & 1) << j
                _, blk = np.unique(odd, return_inverse=True)
                ech = block_eliminate(D, Dr, data, lens, blk.astype(np.int64), log=lg)
            else:
                ech = sparse_eliminate(D, data, lens, log=lg)
            _save_checkpoint(self, ech, cfg)
        self.ech = ech
        self.NF, self.coord = ech.normal_form_table()
        free = ech.free_columns()
        allcols = np.concatenate([raw, bot]) if len(bot) else raw
        self.basis = allcols[free]
        self.stats = dict(columns=D, raw=Dr, bottom=len(bot), rank=ech.rank, work=ech.work,
                          seconds=time.time() - t0)
        cfg.log(f"layered k={k} n={n} thr={self.thr} s={s}: D={D} dim={self.dim} "
                f"{time.time() - t0:.1f}s")

    def nf_bits(self, E):
        m = self.sub_map
        return K.route_nf(np.ascontiguousarray(E, dtype=np.int64), self.r0, self.raw_layer,
                          self.raw_keys, self.raw_cols, m.keys, m.ptr, m.idx,
                          self.bottom_col, self.D, self.NF, K.BIN)

    def nf_map(self):
        if self._nfmap is None:
            k = self.k
            parts_e = [self.raw]
            parts_b = [self.NF[:len(self.raw)]]
            m = self.sub_map
            masks = np.array([x for x in range(1 << k) if _popcount(x) == self.r0
                              and self.sub is not None], dtype=np.int64)
            if len(masks) and len(m.keys):
                bits = K.bottom_nf(masks, m.keys, m.ptr, m.idx, self.bottom_col, self.NF, k, K.BIN)
                ex = []
                for x in masks:
                    mb = np.array([(x >> j) & 1 for j in range(k)], dtype=np.int64)
                    ex.append(2 * m.exps + mb)
                parts_e.append(np.concatenate(ex))
                parts_b.append(bits)
            self._nfmap = NFMap.build(np.concatenate(parts_e), np.concatenate(parts_b))
        return self._nfmap


# ----------------------------------------------------------------------------
# level cache and checkpoints

_CACHE: dict = {}


def clear_cache():
    _CACHE.clear()


def _key(k, n, thr, s):
    return (k, n, tuple(thr), s)


# sparse echelons are stored as HITB1 pivot rows, block results as npz
_CKPT_TYPES = ((".hitb", SparseEchelon), (".npz", BlockEchelon))


def _ckpt_path(level, cfg, ext=".hitb"):
    if not cfg.checkpoint_dir:
        return None
    os.makedirs(cfg.checkpoint_dir, exist_ok=True)
    th = "-".join(map(str, level.thr)) or "none"
    name = f"v{ALGO_VERSION}_{level.kind}_k{level.k}_n{level.n}_w{th}_s{level.s}{ext}"
    return os.path.join(cfg.checkpoint_dir, name)


def _load_checkpoint(level, D, cfg):
    for ext, cls in _CKPT_TYPES:
        path = _ckpt_path(level, cfg, ext)
        if path and os.path.exists(path):
            ech = cls.load(path)
            if ech.D == D:
                cfg.log(f"loaded checkpoint {os.path.basename(path)}")
                return ech
    return None


def _save_checkpoint(level, ech, cfg):
    ext = ".npz" if isinstance(ech, BlockEchelon) else ".hitb"
    path = _ckpt_path(level, cfg, ext)
    if path and level.kind == "layered" or (path and ech.D >= 20000):
        ech.save(path)
        meta = dict(k=level.k, n=level.n, thr=list(level.thr), s=level.s, D=ech.D,
                    rank=ech.rank, algo=ALGO_VERSION)
        with open(path + ".json", "w") as fh:
            json.dump(meta, fh)


def get_level(k, n, thr=(), s=None, config=None, mode="auto") -> Level:
    """Memoized quotient Q(k, n, thr, s)."""
    cfg = config or CONFIG
    thr = tuple(WeightVector.coerce(thr).entries) if thr else ()
    if thr and WeightVector(thr).degree != n:
        raise ValueError(f"threshold {thr} has degree {WeightVector(thr).degree}, not {n}")
    key = _key(k, n, thr, s) + (mode,)
    lv = _CACHE.get(key)
    if lv is None and mode != "auto":
        lv = _CACHE.get(_key(k, n, thr, s) + ("auto",))
        if lv is not None and lv.kind != mode:
            lv = None
    if lv is not None:
        return lv
    # degree 0 would be its own sub-level in the layered solver
    if mode == "direct" or n == 0 or (mode == "auto" and comb(n + k - 1, k - 1) <= cfg.direct_limit):
        lv = DirectLevel(k, n, thr, s, cfg)
    else:
        lv = LayeredLevel(k, n, thr, s, cfg)
    _CACHE[key] = lv
    return lv


# ----------------------------------------------------------------------------
# public API


@dataclass
class DegreeSpace:
    k: int
    n: int
    monomials: list
    classes: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.monomials)


def enumerate_degree(k: int, n: int) -> DegreeSpace:
    if n < 0:
        raise ValueError("negative degree")
    E = K.compositions(n, k, K.BIN)
    E = E[sort_desc(E, n)]
    mons = [tuple(int(x) for x in r) for r in E]
    classes: dict = {}
    for m in mons:
        classes.setdefault(weight_vector(m).entries, []).append(m)
    return DegreeSpace(k, n, mons, classes)


def enumerate_weight_class(k: int, omega) -> list:
    w = WeightVector.coerce(omega)
    if any(x > k for x in w):
        return []
    from itertools import combinations
    out = [tuple([0] * k)]
    for i, wi in enumerate(w):
        nxt = []
        for m in out:
            for S in combinations(range(k), wi):
                e = list(m)
                for j in S:
                    e[j] += 1 << i
                nxt.append(tuple(e))
        out = nxt
    out.sort(key=lambda e: e, reverse=True)
    return out


@dataclass(frozen=True)
class HitRelation:
    t: int
    source: tuple
    value: PolynomialF2


def generate_hit_relations(k: int, n: int, s_limit=None, prune=False):
    """Stream Sq^(2^t)(m) for every m of degree n - 2^t (pure Python path).

    With prune=True, terms whose weight vector lies below the minimal spike
    are dropped (they are hit by Singer's criterion)."""
    from .steenrod_action import sq_on_monomial
    thr = singer_threshold(n, k) if prune else None
    for i in generator_indices(n, s_limit):
        t = int(i).bit_length() - 1
        for m in K.compositions(n - int(i), k, K.BIN):
            m = tuple(int(x) for x in m)
            v = sq_on_monomial(int(i), m)
            if thr is not None:
                v = PolynomialF2._from_set({u for u in v.terms if weight_vector(u) >= thr}, k)
            if v:
                yield HitRelation(t, m, v)


def total_threshold(k: int, n: int, prune):
    """Threshold used for a whole-degree computation."""
    if prune == "auto":
        prune = n >= 64
    if prune in (True, "singer"):
        w = singer_threshold(n, k)
        return w.entries if w is not None else ()
    return ()


@dataclass
class QuotientReport:
    k: int
    degree: int
    total: int
    per_omega: dict
    basis: list
    threshold: tuple = ()
    s_limit: int | None = None
    stats: dict = field(default_factory=dict)

    def split_B0_Bplus(self):
        return split_B0_Bplus(self)

    def omega_rows(self):
        b0, bp = Counter(), Counter()
        for m in self.basis:
            w = weight_vector(m).entries
            (b0 if 0 in m else bp)[w] += 1
        rows = []
        for w, d in self.per_omega.items():
            rows.append((self.degree, WeightVector(w), d, b0[w], bp[w]))
        return rows

    def to_tsv(self) -> str:
        lines = ["degree\tomega\tdim\tdim_B0\tdim_Bplus"]
        for deg, w, d, a, b in self.omega_rows():
            lines.append(f"{deg}\t{w}\t{d}\t{a}\t{b}")
        b0 = sum(1 for m in self.basis if 0 in m)
        lines.append(f"{self.degree}\ttotal\t{self.total}\t{b0}\t{self.total - b0}")
        return "\n".join(lines) + "\n"

    def basis_listing(self, omega=None) -> str:
        w = WeightVector.coerce(omega).entries if omega is not None else None
        rows = [format_monomial(m) for m in self.basis
                if w is None or weight_vector(m).entries == w]
        return "".join(r + "\n" for r in rows)


def _report_from_level(lv: Level) -> QuotientReport:
    basis = lv.basis_tuples()
    return QuotientReport(lv.k, lv.n, lv.dim, lv.weight_dims(), basis, lv.thr, lv.s,
                          dict(lv.stats))


def quotient_level(k: int, n: int, prune="auto", s_limit=None) -> Level:
    return get_level(k, n, total_threshold(k, n, prune), s_limit)


def admissible_basis(k: int, n: int, s_limit=None, prune="auto") -> QuotientReport:
    """Admissible monomials of degree n (the basis of QP_k in degree n)."""
    if n < 0:
        raise ValueError("negative degree")
    return _report_from_level(quotient_level(k, n, prune, s_limit))


def _homog(f, k=None) -> PolynomialF2:
    if isinstance(f, PolynomialF2):
        if not f.is_homogeneous():
            raise NotHomogeneous("polynomial is not homogeneous")
        return f
    return PolynomialF2.monomial(as_exponents(f))


def check_hit(f, prune="auto") -> bool:
    f = _homog(f)
    if not f.terms:
        return True
    lv = quotient_level(f.k, f.degree, prune)
    return not lv.nf_coords(f)


def check_admissible(u) -> bool:
    e = as_exponents(u)
    n = sum(e)
    lv = get_level(len(e), n, weight_vector(e).entries, None)
    return lv.index_of(e) is not None


def check_strictly_inadmissible(u) -> bool:
    e = as_exponents(u)
    w = weight_vector(e).entries
    lv = get_level(len(e), sum(e), w, len(w))
    return lv.index_of(e) is None


def quotient_by_weight(k: int, omega):
    """(dim, basis) of QP_k(omega): weight-omega basis monomials of the
    quotient with threshold omega."""
    w = WeightVector.coerce(omega)
    if any(x > k for x in w):
        return 0, []
    lv = get_level(k, w.degree, w.entries, None)
    basis = [m for m in lv.basis_tuples() if weight_vector(m).entries == w.entries]
    return len(basis), basis


def split_B0_Bplus(report_or_basis):
    basis = report_or_basis.basis if isinstance(report_or_basis, QuotientReport) else report_or_basis
    b0 = [m for m in basis if 0 in m]
    bp = [m for m in basis if 0 not in m]
    return b0, bp


def weight_coordinates(k: int, omega, f) -> list:
    """Coordinates in QP_k(omega) of a polynomial whose terms have weight
    at most omega (terms below omega vanish)."""
    w = WeightVector.coerce(omega)
    lv = get_level(k, w.degree, w.entries, None)
    coords = lv.nf_coords(f)
    basis = lv.basis_tuples()
    pos = {}
    for i, m in enumerate(basis):
        if weight_vector(m).entries == w.entries:
            pos[i] = len(pos)
    out = []
    for c in coords:
        if c not in pos:
            raise ValueError("polynomial has components above the weight class")
        out.append(pos[c])
    return sorted(out)


def sf_tilde(k: int, omega, include_empty: bool = True):
    """Joint kernel of the induced maps QP_k(omega) -> QP_{k-1}(omega).

    Returns (dim, kernel EchelonBasis over QP_k(omega) coordinates)."""
    from .gf2_linalg import kernel_of_stacked_maps
    from .homomorphisms import enumerate_N_k, induced_map_matrix
    w = WeightVector.coerce(omega)
    d, basis = quotient_by_weight(k, w)
    maps = []
    for idx in enumerate_N_k(k):
        if not idx[1] and not include_empty:
            continue
        maps.append(induced_map_matrix(idx, w, k))
    ker = kernel_of_stacked_maps(d, maps)
    return ker.rank, ker


def expected_free_weight_check(report: QuotientReport) -> list:
    """Weight vectors in the basis violating the shape forced on admissible
    monomials (no zero followed by a nonzero entry; once an entry drops
    below k it stays below k)."""
    bad = []
    for w in report.per_omega:
        seen_zero = False
        below = False
        for x in w:
            if seen_zero and x:
                bad.append(w)
                break
            if below and x == report.k:
                bad.append(w)
                break
            seen_zero |= x == 0
            below |= x < report.k
    return bad


__all__ = [
    "DegreeSpace", "HitRelation", "QuotientReport", "ResourceRefusal", "admissible_basis",
    "check_admissible", "check_hit", "check_strictly_inadmissible", "enumerate_degree",
    "enumerate_weight_class", "generate_hit_relations", "get_level", "quotient_by_weight",
    "sf_tilde", "split_B0_Bplus", "configure", "minimal_spike", "mu",
]
