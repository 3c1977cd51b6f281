"""Syndrome lookup table holding the most likely error for each syndrome.

Patterns are visited lightest-first (see :func:`pgrand.noise.enumerate_patterns`)
and a syndrome keeps the first pattern that produced it. Syndromes and patterns
are stored as packed little-endian uint64 words; the table is kept sorted by
syndrome so lookups are a binary search (or a dict probe for syndromes wider
than one word).
"""

from __future__ import annotations

import hashlib
import json
import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .clifford import ParityCheckMatrix
from .noise import count_patterns, weight_class_codes
from .pauli import PauliString

log = logging.getLogger(__name__)

MAGIC = b"PGRANDv1"
_HEADER = struct.Struct("<8sIIIQII")
NO_SEED = 2**64 - 1

DEFAULT_MEM_BUDGET = 2 * 1024**3  # bytes
DEFAULT_CHUNK = 1 << 21  # patterns per vectorized block


class ResourceLimitError(MemoryError):
    """The requested table would not fit in the configured memory budget."""


@dataclass
class SyndromeTable:
    n: int
    k: int
    t: int
    syndromes: np.ndarray  # (size, Ws) uint64, sorted by numeric value
    patterns: np.ndarray  # (size, Wp) uint64, canonical dense index words
    patterns_seen: list[int]
    patterns_stored: list[int]
    encoder_seed: int | None = None
    num_gates: int = 0
    measured: tuple[int, ...] = ()
    p: float | None = None
    _dict: dict | None = field(default=None, repr=False, compare=False)

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def size(self) -> int:
        return self.syndromes.shape[0]

    def __len__(self) -> int:
        return self.size

    # -- lookup ------------------------------------------------------------

    def lookup(self, packed: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Batch decode of packed syndromes ``(m, Ws)``.

        Returns ``(found, patterns)``; rows of ``patterns`` where ``found`` is
        False are zero and meaningless.
        """
        packed = np.asarray(packed, dtype=np.uint64)
        m = packed.shape[0]
        out = np.zeros((m, self.patterns.shape[1]), dtype=np.uint64)
        if self.size == 0:
            return np.zeros(m, dtype=bool), out
        if self.syndromes.shape[1] == 1:
            keys = self.syndromes[:, 0]
            q = packed[:, 0]
            pos = np.searchsorted(keys, q)
            pos_c = np.minimum(pos, self.size - 1)
            found = keys[pos_c] == q
            out[found] = self.patterns[pos_c[found]]
            return found, out
        if self._dict is None:
            self._dict = {row.tobytes(): i for i, row in enumerate(self.syndromes)}
        found = np.zeros(m, dtype=bool)
        for j, row in enumerate(packed):
            i = self._dict.get(row.tobytes())
            if i is not None:
                found[j] = True
                out[j] = self.patterns[i]
        return found, out

    def decode(self, s) -> PauliString | None:
        """Stored pattern for syndrome ``s`` (bit vector or int), or None."""
        if isinstance(s, (int, np.integer)):
            value = int(s)
            if value >> self.r:
                raise ValueError(f"syndrome wider than {self.r} bits")
        else:
            bits = np.asarray(s, dtype=np.uint8).ravel()
            if bits.size != self.r:
                raise ValueError(f"syndrome length {bits.size} != n-k = {self.r}")
            value = sum(int(b) << i for i, b in enumerate(bits))
        found, pats = self.lookup(int_to_words(value, self.syndromes.shape[1])[None, :])
        if not found[0]:
            return None
        return PauliString.from_dense_index(self.n, words_to_int(pats[0]))

    def items(self):
        """``(syndrome_int, PauliString)`` pairs in syndrome order."""
        for s, p in zip(self.syndromes, self.patterns):
            yield words_to_int(s), PauliString.from_dense_index(self.n, words_to_int(p))

    # -- persistence ------------------------------------------------------------

    def to_bytes(self) -> bytes:
        sb = -(-self.r // 8)
        pb = -(-2 * self.n // 8)
        seed = NO_SEED if self.encoder_seed is None else self.encoder_seed
        parts = [_HEADER.pack(MAGIC, self.n, self.k, self.t, seed, self.num_gates, self.size)]
        sy = _words_to_bytes(self.syndromes, sb)
        pa = _words_to_bytes(self.patterns, pb)
        parts.append(np.concatenate([sy, pa], axis=1).tobytes())
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> SyndromeTable:
        magic, n, k, t, seed, gates, count = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise ValueError("not a PGRAND lookup-table file")
        r = n - k
        sb = -(-r // 8)
        pb = -(-2 * n // 8)
        body = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        if body.size != count * (sb + pb):
            raise ValueError("truncated or oversized lookup-table file")
        body = body.reshape(count, sb + pb)
        syn = _bytes_to_words(body[:, :sb], -(-r // 64))
        pat = _bytes_to_words(body[:, sb:], -(-2 * n // 64))
        weights = _pattern_weights(pat, n)
        stored = np.bincount(weights, minlength=t + 1)[: t + 1].tolist()
        seen = [count_patterns(n, w) for w in range(t + 1)]
        return cls(
            n, k, t, syn, pat, seen, stored,
            encoder_seed=None if seed == NO_SEED else int(seed), num_gates=gates,
        )

    def save(self, path: str | Path, sidecar: bool = True) -> None:
        path = Path(path)
        path.write_bytes(self.to_bytes())
        if sidecar:
            meta = {
                "n": self.n, "k": self.k, "t": self.t, "p": self.p,
                "encoder_seed": self.encoder_seed, "num_gates": self.num_gates,
                "measured": list(self.measured), "size": self.size,
                "patterns_seen": self.patterns_seen, "patterns_stored": self.patterns_stored,
                "sha256": hashlib.sha256(path.read_bytes()).hexdigest(),
            }
            path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> SyndromeTable:
        path = Path(path)
        table = cls.from_bytes(path.read_bytes())
        meta_path = path.with_suffix(path.suffix + ".json")
        if meta_path.exists():
            meta = json.loads(meta_path.read_text())
            table.p = meta.get("p")
            table.measured = tuple(meta.get("measured", ()))
        return table


# ---------------------------------------------------------------------------
# word helpers


def int_to_words(v: int, nwords: int) -> np.ndarray:
    return np.array([(v >> (64 * i)) & 0xFFFFFFFFFFFFFFFF for i in range(nwords)], dtype=np.uint64)


def words_to_int(words: Sequence) -> int:
    return sum(int(w) << (64 * i) for i, w in enumerate(words))


def _words_to_bytes(words: np.ndarray, nbytes: int) -> np.ndarray:
    raw = words.astype("<u8").view(np.uint8).reshape(words.shape[0], -1)
    return raw[:, :nbytes]


def _bytes_to_words(raw: np.ndarray, nwords: int) -> np.ndarray:
    padded = np.zeros((raw.shape[0], nwords * 8), dtype=np.uint8)
    padded[:, : raw.shape[1]] = raw
    return padded.view("<u8").astype(np.uint64).reshape(raw.shape[0], nwords)


def _pattern_weights(pat: np.ndarray, n: int) -> np.ndarray:
    # a qubit is hit iff either bit of its 2-bit code is set
    w = np.zeros(pat.shape[0], dtype=np.int64)
    lo = np.uint64(0x5555555555555555)
    for j in range(pat.shape[1]):
        word = pat[:, j]
        hit = (word | (word >> np.uint64(1))) & lo
        w += _popcount64(hit)
    return w


def _popcount64(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(a).astype(np.int64)
    a = a - ((a >> np.uint64(1)) & np.uint64(0x5555555555555555))
    a = (a & np.uint64(0x3333333333333333)) + ((a >> np.uint64(2)) & np.uint64(0x3333333333333333))
    a = (a + (a >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return ((a * np.uint64(0x0101010101010101)) >> np.uint64(56)).astype(np.int64)


def _sort_rows(words: np.ndarray) -> np.ndarray:
    """Indices sorting multiword little-endian integers numerically."""
    if words.shape[1] == 1:
        return np.argsort(words[:, 0], kind="stable")
    return np.lexsort(tuple(words[:, j] for j in range(words.shape[1])))


def _first_unique(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rows and the index of each one's first occurrence."""
    if words.shape[1] == 1:
        u, idx = np.unique(words[:, 0], return_index=True)
        return u[:, None], idx
    u, idx = np.unique(words, axis=0, return_index=True)
    return u, idx


def _chunk_candidates(single: np.ndarray, supports: np.ndarray, paulis: np.ndarray):
    """Syndromes of one block of a weight class, deduplicated to first occurrence."""
    c, w = supports.shape
    m = paulis.shape[0]
    syn = np.zeros((c, m, single.shape[2]), dtype=np.uint64)
    for j in range(w):
        syn ^= single[supports[:, j]][:, paulis[:, j], :]
    flat = syn.reshape(c * m, -1)
    return _first_unique(flat)


def _dense_words(n: int, supports: np.ndarray, paulis: np.ndarray, flat_idx: np.ndarray) -> np.ndarray:
    nw = -(-2 * n // 64)
    m = paulis.shape[0]
    out = np.zeros((flat_idx.size, nw), dtype=np.uint64)
    sup = supports[flat_idx // m]
    pau = paulis[flat_idx % m]
    for j in range(supports.shape[1]):
        off = 2 * sup[:, j]
        word = off // 64
        val = pau[:, j].astype(np.uint64) << (off % 64).astype(np.uint64)
        for wd in range(nw):
            sel = word == wd
            out[sel, wd] |= val[sel]
    return out


class _KnownSet:
    """Growing set of syndromes, kept as sorted word rows for vectorized membership."""

    def __init__(self, nwords: int):
        self.nwords = nwords
        self.sorted = np.zeros((0, nwords), dtype=np.uint64)
        self._set: set[bytes] = set()

    def __len__(self):
        return self.sorted.shape[0] if self.nwords == 1 else len(self._set)

    def missing(self, rows: np.ndarray) -> np.ndarray:
        if self.nwords == 1:
            return ~np.isin(rows[:, 0], self.sorted[:, 0], assume_unique=True)
        return np.array([r.tobytes() not in self._set for r in rows], dtype=bool)

    def add(self, rows: np.ndarray) -> None:
        if self.nwords == 1:
            merged = np.concatenate([self.sorted[:, 0], rows[:, 0]])
            merged.sort(kind="stable")
            self.sorted = merged[:, None]
        else:
            self._set.update(r.tobytes() for r in rows)


def estimate_table_bytes(n: int, k: int, t: int) -> int:
    entries = min(sum(count_patterns(n, w) for w in range(t + 1)), 2 ** (n - k))
    return entries * 8 * (-(-(n - k) // 64) + -(-2 * n // 64))


def build_table(
    H: ParityCheckMatrix,
    t: int,
    p: float | None = None,
    *,
    encoder_seed: int | None = None,
    num_gates: int = 0,
    mem_budget: int = DEFAULT_MEM_BUDGET,
    chunk_patterns: int = DEFAULT_CHUNK,
    workers: int = 1,
    checkpoint_dir: str | Path | None = None,
) -> SyndromeTable:
    """Enumerate patterns up to weight ``t`` and keep the first pattern per syndrome.

    With ``workers > 1`` the blocks of each weight class are processed in a
    process pool and merged in enumeration order, which yields exactly the
    same table as the serial build. ``checkpoint_dir`` stores the table after
    every finished weight class so an interrupted build resumes there.
    """
    n, r = H.n, H.r
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}, n={n}")
    need = estimate_table_bytes(n, H.k, t)
    if need > mem_budget:
        raise ResourceLimitError(
            f"table for n={n}, k={H.k}, t={t} needs ~{need} bytes, budget is {mem_budget}"
        )
    ws = H.syndrome_words
    capacity = 2**r
    single = np.asarray(H.single_syndromes)
    known = _KnownSet(ws)
    syn_parts: list[np.ndarray] = []
    pat_parts: list[np.ndarray] = []
    seen = [0] * (t + 1)
    stored = [0] * (t + 1)
    start_w = 0

    ckpt = None
    if checkpoint_dir is not None:
        ckpt = Path(checkpoint_dir)
        ckpt.mkdir(parents=True, exist_ok=True)
        tag = hashlib.sha256(H.H.words.tobytes() + struct.pack("<III", n, H.k, t)).hexdigest()[:16]
        ckpt = ckpt / f"lut-{tag}.npz"
        if ckpt.exists():
            data = np.load(ckpt)
            start_w = int(data["next_w"])
            syn_parts.append(data["syndromes"])
            pat_parts.append(data["patterns"])
            known.add(data["syndromes"])
            seen[:start_w] = data["seen"].tolist()[:start_w]
            stored[:start_w] = data["stored"].tolist()[:start_w]
            log.info("resuming LUT build at weight %d from %s", start_w, ckpt)

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for w in range(start_w, t + 1):
            n_w = count_patterns(n, w)
            seen[w] = n_w
            if len(known) >= capacity:
                continue
            supports, paulis = weight_class_codes(n, w)
            m = paulis.shape[0]
            block = max(1, chunk_patterns // m)
            starts = range(0, supports.shape[0], block)
            blocks = [supports[s : s + block] for s in starts]
            if pool is not None:
                results = pool.map(_chunk_candidates, [single] * len(blocks), blocks, [paulis] * len(blocks))
            else:
                results = (_chunk_candidates(single, b, paulis) for b in blocks)
            for s0, blk, (u, idx) in zip(starts, blocks, results):
                keep = known.missing(u)
                if not keep.any():
                    continue
                u, idx = u[keep], idx[keep]
                order = np.argsort(idx, kind="stable")
                u, idx = u[order], idx[order]
                known.add(u)
                syn_parts.append(u)
                pat_parts.append(_dense_words(n, blk, paulis, idx))
                stored[w] += u.shape[0]
                if len(known) >= capacity:
                    break
            log.debug("weight %d: seen %d, stored %d", w, n_w, stored[w])
            if ckpt is not None:
                syn_all, pat_all = _concat(syn_parts, pat_parts, ws, n)
                np.savez(ckpt, next_w=w + 1, syndromes=syn_all, patterns=pat_all,
                         seen=np.array(seen), stored=np.array(stored))
    finally:
        if pool is not None:
            pool.shutdown()

    syn_all, pat_all = _concat(syn_parts, pat_parts, ws, n)
    order = _sort_rows(syn_all)
    return SyndromeTable(
        n, H.k, t, syn_all[order], pat_all[order], seen, stored,
        encoder_seed=encoder_seed, num_gates=num_gates, measured=H.measured, p=p,
    )


def _concat(syn_parts, pat_parts, ws, n):
    if not syn_parts:
        return np.zeros((0, ws), dtype=np.uint64), np.zeros((0, -(-2 * n // 64)), dtype=np.uint64)
    return np.concatenate(syn_parts), np.concatenate(pat_parts)


def decode(table: SyndromeTable, s) -> PauliString | None:
    return table.decode(s)


def empirical_correctable_fraction(table: SyndromeTable, w: int) -> float:
    """Share of weight-``w`` patterns that are their syndrome's stored representative."""
    if w < 0 or w > table.n:
        raise ValueError(f"weight {w} out of range for n={table.n}")
    if w > table.t:
        return 0.0
    return table.patterns_stored[w] / count_patterns(table.n, w)


def codes_to_dense_words(codes: np.ndarray) -> np.ndarray:
    """Pack ``(m, n)`` per-qubit codes into canonical dense-index words ``(m, Wp)``."""
    codes = np.asarray(codes, dtype=np.uint64)
    m, n = codes.shape
    nw = -(-2 * n // 64)
    out = np.zeros((m, nw), dtype=np.uint64)
    for q in range(n):
        wd, sh = divmod(2 * q, 64)
        out[:, wd] |= codes[:, q] << np.uint64(sh)
    return out


def dense_words_to_codes(words: np.ndarray, n: int) -> np.ndarray:
    words = np.asarray(words, dtype=np.uint64)
    out = np.zeros((words.shape[0], n), dtype=np.uint8)
    for q in range(n):
        wd, sh = divmod(2 * q, 64)
        out[:, q] = ((words[:, wd] >> np.uint64(sh)) & np.uint64(3)).astype(np.uint8)
    return out


def table_fingerprint(table: SyndromeTable) -> str:
    return hashlib.sha256(table.to_bytes()).hexdigest()


def max_table_entries(n: int, k: int, t: int) -> int:
    return min(sum(count_patterns(n, w) for w in range(t + 1)), 2 ** (n - k))


__all__ = [
    "ResourceLimitError", "SyndromeTable", "build_table", "decode",
    "empirical_correctable_fraction", "codes_to_dense_words", "dense_words_to_codes",
    "max_table_entries", "table_fingerprint", "estimate_table_bytes",
]

