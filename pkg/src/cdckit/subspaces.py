"""Canonical subspaces, subspace distance, lifting, and distance verification.

A subspace is stored by the unique RREF of any generator matrix, so equality
is byte equality.  Distances are computed as 2*rank(stack) - dim U - dim V,
one elimination per pair; for GF(2) the verifier packs rows into integers
and aborts a pair as soon as its rank shows the pair cannot improve on the
current minimum, which keeps exhaustive checks exact but fast.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import (
    AmbientMismatch,
    HypothesisViolated,
    InvalidParameters,
    PairLimitExceeded,
    RankCapViolated,
)
from .gf import GF, gf, same_field
from .matrices import Matrix, mat_rank, mat_rref, pack_rows_gf2, rank_gf2
from .rankcodes import FerrersShape


def pair_limit() -> int:
    return int(os.environ.get("CDCKIT_PAIR_LIMIT", 10**9))


class Subspace:
    """A k-dimensional subspace of GF(q)^n in canonical RREF form."""

    __slots__ = ("n", "k", "mat", "pivots", "_packed")

    def __init__(self, mat: Matrix, pivots: Tuple[int, ...]):
        self.n = mat.ncols
        self.k = mat.nrows
        self.mat = mat
        self.pivots = pivots
        self._packed: Optional[Tuple[int, ...]] = None

    @property
    def field(self) -> GF:
        return self.mat.field

    def key(self) -> Tuple[int, ...]:
        return self.mat.entries

    def packed(self) -> Tuple[int, ...]:
        if self._packed is None:
            self._packed = tuple(pack_rows_gf2(self.mat))
        return self._packed

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.k == other.k
            and self.mat == other.mat
        )

    def __hash__(self):
        return hash((self.n, self.k, self.mat.entries))

    def __repr__(self):
        return f"Subspace(GF({self.field.q})^{self.n}, dim={self.k})"


@dataclass(frozen=True)
class IdentifyingVector:
    bits: Tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def as_int(self) -> int:
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v


@dataclass(frozen=True)
class FerrersData:
    """Dots per row of the Ferrers diagram, plus the tableaux entries."""

    row_lengths: Tuple[int, ...]
    tableaux: Tuple[Tuple[int, ...], ...]


def subspace_from_rows(m: Matrix, allow_rank_deficient: bool = False) -> Subspace:
    red, pivots = mat_rref(m)
    if len(pivots) < m.nrows:
        if not allow_rank_deficient:
            raise ValueError("rows are linearly dependent")
        red = red.submatrix(range(len(pivots)), range(m.ncols))
    return Subspace(red, pivots)


def subspace_distance(u: Subspace, v: Subspace) -> int:
    if u.n != v.n:
        raise AmbientMismatch(f"ambient dimensions {u.n} and {v.n}")
    same_field(u.field, v.field)
    if u.field.p == 2 and u.field.degree == 1:
        rk = _union_rank_gf2(u.packed(), v.packed(), u.n)
    else:
        rk = _union_rank_generic(u.mat.rows(), v.mat.rows(), u.field)
    return 2 * rk - u.k - v.k


def _union_rank_gf2(rows_a: Sequence[int], rows_b: Sequence[int], n: int) -> int:
    basis = [0] * (n + 1)
    r = 0
    for v in rows_a:
        basis[v.bit_length()] = v
        r += 1
    for v in rows_b:
        while v:
            b = v.bit_length()
            w = basis[b]
            if w:
                v ^= w
            else:
                basis[b] = v
                r += 1
                break
    return r


def _union_rank_generic(rows_a, rows_b, field: GF) -> int:
    basis = {}

    def insert(row) -> int:
        row = list(row)
        while True:
            lead = next((c for c, x in enumerate(row) if x), None)
            if lead is None:
                return 0
            ex = basis.get(lead)
            if ex is None:
                inv = field.inv(row[lead])
                basis[lead] = [field.mul(inv, x) for x in row]
                return 1
            f = row[lead]
            row = [field.sub(x, field.mul(f, y)) for x, y in zip(row, ex)]

    r = 0
    for row in rows_a:
        r += insert(row)
    for row in rows_b:
        r += insert(row)
    return r


def identifying_vector(u: Subspace) -> IdentifyingVector:
    bits = [0] * u.n
    for p in u.pivots:
        bits[p] = 1
    return IdentifyingVector(tuple(bits))


def hamming_distance(a: IdentifyingVector, b: IdentifyingVector) -> int:
    return sum(x != y for x, y in zip(a.bits, b.bits))


def hamming_lb_check(u: Subspace, v: Subspace) -> bool:
    """Subspace distance is bounded below by the Hamming distance of the
    identifying vectors; returns whether that held for this pair."""
    if u.k != v.k:
        raise InvalidParameters("equal dimensions required")
    dh = hamming_distance(identifying_vector(u), identifying_vector(v))
    return subspace_distance(u, v) >= dh


def ferrers_of(u: Subspace) -> FerrersData:
    pivset = set(u.pivots)
    lengths = []
    tableaux = []
    for i in range(u.k):
        p = u.pivots[i]
        cols = [c for c in range(p + 1, u.n) if c not in pivset]
        lengths.append(len(cols))
        tableaux.append(tuple(u.mat[i, c] for c in cols))
    return FerrersData(tuple(lengths), tuple(tableaux))


def lift_matrix(a: Matrix) -> Subspace:
    """Row space of (I_k | A); already in RREF with pivots 0..k-1."""
    k = a.nrows
    entries: List[int] = []
    for i in range(k):
        row = [0] * k
        row[i] = 1
        entries.extend(row)
        entries.extend(a.row(i))
    return Subspace(Matrix(a.field, k, k + a.ncols, entries), tuple(range(k)))


def special_form_bits(delta1: int, delta2: int, u1: int, u2: int, Delta: int) -> Tuple[int, ...]:
    if delta1 < Delta + u1 or delta2 < u2:
        raise HypothesisViolated("identifying vector does not fit its blocks")
    return (
        (0,) * Delta + (1,) * u1 + (0,) * (delta1 - Delta - u1)
        + (1,) * u2 + (0,) * (delta2 - u2)
    )


def lift_special_form(v: IdentifyingVector, m: Matrix, shape: FerrersShape) -> Subspace:
    """Lift one Ferrers-supported matrix to the subspace with vector v.

    `m` is the k x (n-k-Delta) block matrix [[M1, M3], [0, M2]]; the upper
    right block M3 must have rank at most u1 - d_f for the insert to stay
    compatible with the linkage code.
    """
    u1, u2, w1, w2 = shape.u1, shape.u2, shape.w1, shape.w2
    if v.bits != special_form_bits(shape.delta1, shape.delta2, u1, u2, shape.Delta):
        raise InvalidParameters("identifying vector does not match the shape")
    if (m.nrows, m.ncols) != (u1 + u2, w1 + w2):
        raise InvalidParameters("matrix does not match the shape")
    m3 = m.submatrix(range(u1), range(w1, w1 + w2))
    if mat_rank(m3) > u1 - shape.d_f:
        raise RankCapViolated(
            f"rank(M3) = {mat_rank(m3)} exceeds u1 - d_f = {u1 - shape.d_f}"
        )
    f = m.field
    k = u1 + u2
    n = shape.delta1 + shape.delta2
    entries: List[int] = []
    for i in range(u1):
        row = [0] * n
        row[shape.Delta + i] = 1
        for j in range(w1):
            row[shape.Delta + u1 + j] = m[i, j]
        for j in range(w2):
            row[shape.delta1 + u2 + j] = m[i, w1 + j]
        entries.extend(row)
    for i in range(u2):
        row = [0] * n
        row[shape.delta1 + i] = 1
        for j in range(w2):
            row[shape.delta1 + u2 + j] = m[u1 + i, w1 + j]
        entries.extend(row)
    pivots = tuple(range(shape.Delta, shape.Delta + u1)) + tuple(
        range(shape.delta1, shape.delta1 + u2)
    )
    return Subspace(Matrix(f, k, n, entries), pivots)


def insertion_predicate(u: Subspace, n1: int, n2: int, d: int) -> bool:
    """True iff u meets both coordinate subspaces S1 = R(0 | I_{n2}) and
    S2 = R(I_{n1} | 0) in dimension >= d/2."""
    if n1 + n2 != u.n:
        raise AmbientMismatch(f"n1 + n2 = {n1 + n2} != ambient {u.n}")
    if d % 2:
        raise InvalidParameters("subspace distances are even")
    left = u.mat.submatrix(range(u.k), range(n1))
    right = u.mat.submatrix(range(u.k), range(n1, u.n))
    dim_s2 = u.k - mat_rank(right)  # vectors of u supported on first n1 coords
    dim_s1 = u.k - mat_rank(left)
    return dim_s1 >= d // 2 and dim_s2 >= d // 2


class CDC:
    """Container for a constant-dimension code; codewords kept sorted by
    their serialized RREF so files and comparisons are canonical.

    Constructions require distinct codewords; files loaded for verification
    may carry duplicates (strict=False), which the verifier then reports as
    distance-0 witnesses.
    """

    def __init__(self, q: int, n: int, k: int, d: int,
                 codewords: Iterable[Subspace], provenance: str = "",
                 strict: bool = True):
        self.q = q
        self.n = n
        self.k = k
        self.d = d
        self.provenance = provenance
        words = sorted(codewords, key=lambda s: s.key())
        seen = set()
        for w in words:
            if w.n != n or w.k != k or w.field.q != q:
                raise InvalidParameters("codeword does not match container parameters")
            if strict:
                if w.key() in seen:
                    raise InvalidParameters("duplicate codeword")
                seen.add(w.key())
        self.codewords = words

    def __len__(self):
        return len(self.codewords)

    def __iter__(self):
        return iter(self.codewords)

    def __repr__(self):
        return f"CDC(({self.n}, {len(self)}, {self.d}, {self.k})_{self.q})"


@dataclass
class VerifyReport:
    min_found: float
    witness: Optional[Tuple[int, int]]
    pairs_checked: int
    mode: str
    seed: Optional[int] = None

    def ok(self, claimed_d: int) -> bool:
        return self.min_found >= claimed_d


def _pair_scan_gf2(packs: List[Tuple[int, ...]], k: int, n: int, lo: int, hi: int):
    """Exact minimum over codeword pairs with index in [lo, hi).

    Pairs are linearized i-major; early exit per pair once the running rank
    shows it cannot beat the current local minimum.
    """
    n_words = len(packs)
    best = 2 * k + 2  # above any real distance, so the first pair resolves fully
    witness = None
    idx = 0
    for i in range(n_words - 1):
        row_count = n_words - 1 - i
        if idx + row_count <= lo:
            idx += row_count
            continue
        basis0 = [0] * (n + 1)
        for v in packs[i]:
            basis0[v.bit_length()] = v
        j0 = i + 1 + max(0, lo - idx)
        j1 = i + 1 + min(row_count, hi - idx)
        stop = k + best // 2
        for j in range(j0, j1):
            basis = basis0.copy()
            r = k
            for v in packs[j]:
                while v:
                    b = v.bit_length()
                    w = basis[b]
                    if w:
                        v ^= w
                    else:
                        basis[b] = v
                        r += 1
                        break
                if r == stop:
                    break
            if r < stop:
                dist = 2 * (r - k)
                if dist < best:
                    best = dist
                    witness = (i, j)
                    stop = k + best // 2
                    if best == 0:
                        return best, witness, hi - lo
        idx += row_count
        if idx >= hi:
            break
    return best, witness, hi - lo


def _pair_distance(code: CDC, i: int, j: int) -> int:
    return subspace_distance(code.codewords[i], code.codewords[j])


_FORK_STATE: dict = {}


def _fork_worker(span):
    lo, hi = span
    return _pair_scan_gf2(
        _FORK_STATE["packs"], _FORK_STATE["k"], _FORK_STATE["n"], lo, hi
    )


def verify_min_distance(
    code: CDC,
    mode: str = "exhaustive",
    sample_count: int = 0,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> VerifyReport:
    """Exhaustive or seeded-sample minimum-distance check.

    Exhaustive mode returns the true minimum and a witness pair (indices
    into the sorted codeword list); sample mode returns the minimum over
    `sample_count` seeded pairs.
    """
    n_words = len(code)
    total_pairs = n_words * (n_words - 1) // 2
    if n_words < 2:
        return VerifyReport(math.inf, None, 0, mode, seed)

    if mode == "sample":
        rng = random.Random(seed)
        best: float = math.inf
        witness = None
        for _ in range(sample_count):
            i = rng.randrange(n_words)
            j = rng.randrange(n_words - 1)
            if j >= i:
                j += 1
            if i > j:
                i, j = j, i
            dist = _pair_distance(code, i, j)
            if dist < best:
                best, witness = dist, (i, j)
        return VerifyReport(best, witness, sample_count, "sample", seed)

    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    if total_pairs > pair_limit():
        raise PairLimitExceeded(f"{total_pairs} pairs exceed the limit {pair_limit()}")

    if code.codewords[0].field.p == 2 and code.codewords[0].field.degree == 1:
        packs = [w.packed() for w in code.codewords]
        if jobs > 1 and total_pairs < 200_000:
            jobs = 1  # fork overhead dominates below this size; result identical
        if jobs <= 1:
            best, witness, _ = _pair_scan_gf2(packs, code.k, code.n, 0, total_pairs)
        else:
            import multiprocessing as mp

            _FORK_STATE.update(packs=packs, k=code.k, n=code.n)
            bounds = [total_pairs * w // jobs for w in range(jobs + 1)]
            spans = [(bounds[w], bounds[w + 1]) for w in range(jobs) if bounds[w] < bounds[w + 1]]
            with mp.get_context("fork").Pool(jobs) as pool:
                parts = pool.map(_fork_worker, spans)
            _FORK_STATE.clear()
            best, witness = min(
                ((b, wtn) for b, wtn, _ in parts if wtn is not None),
                key=lambda t: (t[0], t[1]),
            )
        return VerifyReport(best, witness, total_pairs, "exhaustive")

    best, witness, _ = _scan_generic(code, 0, total_pairs)
    return VerifyReport(best, witness, total_pairs, "exhaustive")


def _scan_generic(code: CDC, lo: int, hi: int):
    best: float = math.inf
    witness = None
    idx = 0
    n_words = len(code)
    checked = 0
    for i in range(n_words - 1):
        for j in range(i + 1, n_words):
            if lo <= idx < hi:
                dist = _pair_distance(code, i, j)
                checked += 1
                if dist < best:
                    best, witness = dist, (i, j)
            idx += 1
    return best, witness, checked


# -- CDC file format ---------------------------------------------------------


def cdc_to_text(code: CDC) -> str:
    lines = [f"CDC {code.q} {code.n} {code.k} {code.d} {len(code)}"]
    for w in code.codewords:
        lines.append("")
        for i in range(code.k):
            lines.append(" ".join(str(x) for x in w.mat.row(i)))
    return "\n".join(lines) + "\n"


def cdc_from_text(text: str, provenance: str = "file") -> CDC:
    lines = text.splitlines()
    head = lines[0].split()
    if head[0] != "CDC":
        raise ValueError("not a CDC file")
    q, n, k, d, count = (int(x) for x in head[1:6])
    field = gf(q)
    words = []
    rows: List[List[int]] = []
    for ln in lines[1:] + [""]:
        if ln.strip():
            rows.append([int(t) for t in ln.split()])
            if len(rows) == k:
                words.append(subspace_from_rows(Matrix.from_rows(field, rows)))
                rows = []
        elif rows:
            raise ValueError("truncated codeword record")
    if len(words) != count:
        raise ValueError(f"header says {count} codewords, file has {len(words)}")
    return CDC(q, n, k, d, words, provenance=provenance, strict=False)
