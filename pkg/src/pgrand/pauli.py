"""Phase-free Pauli strings and packed GF(2) matrices.

A Pauli string on ``n`` qubits is stored as two ``n``-bit integers, one for the
X components and one for the Z components (bit ``i`` belongs to qubit ``i``).
Python integers are arbitrary-width bitsets, so XOR / AND / popcount run
word-parallel without any per-qubit loop.

The canonical dense index of a pattern interleaves the two bitsets: qubit ``i``
contributes the 2-bit code ``x_i | (z_i << 1)`` at bit offset ``2 i``, giving
``I=00, X=01, Z=10, Y=11``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

PAULI_CHARS = "IXZY"  # indexed by 2-bit code
_CHAR_TO_CODE = {c: i for i, c in enumerate(PAULI_CHARS)}


class DimensionMismatch(ValueError):
    """Raised when two objects defined on different qubit counts are combined."""


def _mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli error pattern with the phase dropped."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        if self.x >> self.n or self.z >> self.n or self.x < 0 or self.z < 0:
            raise ValueError(f"bit vectors do not fit in {self.n} qubits")

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, pauli: str) -> PauliString:
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for n={n}")
        code = _CHAR_TO_CODE[pauli.upper()]
        return cls(n, (code & 1) << qubit, (code >> 1) << qubit)

    @classmethod
    def from_string(cls, s: str) -> PauliString:
        """Parse e.g. ``"XIZ"``; character ``i`` is qubit ``i``."""
        x = z = 0
        for i, c in enumerate(s):
            try:
                code = _CHAR_TO_CODE[c.upper()]
            except KeyError:
                raise ValueError(f"invalid Pauli character {c!r}") from None
            x |= (code & 1) << i
            z |= (code >> 1) << i
        return cls(len(s), x, z)

    @classmethod
    def from_codes(cls, codes: Iterable[int]) -> PauliString:
        codes = list(codes)
        x = z = 0
        for i, c in enumerate(codes):
            x |= (int(c) & 1) << i
            z |= ((int(c) >> 1) & 1) << i
        return cls(len(codes), x, z)

    @classmethod
    def from_dense_index(cls, n: int, index: int) -> PauliString:
        x = z = 0
        for i in range(n):
            code = (index >> (2 * i)) & 3
            x |= (code & 1) << i
            z |= (code >> 1) << i
        if index >> (2 * n):
            raise ValueError("dense index too large for n qubits")
        return cls(n, x, z)

    @classmethod
    def from_symplectic(cls, bits: np.ndarray) -> PauliString:
        """Inverse of :meth:`symplectic`: ``bits = [x_0..x_{n-1}, z_0..z_{n-1}]``."""
        bits = np.asarray(bits, dtype=np.uint8).ravel()
        if bits.size % 2:
            raise ValueError("symplectic vector must have even length")
        n = bits.size // 2
        x = int(np.dot(bits[:n].astype(object), [1 << i for i in range(n)])) if n else 0
        z = int(np.dot(bits[n:].astype(object), [1 << i for i in range(n)])) if n else 0
        return cls(n, x, z)

    # -- views ----------------------------------------------------------------

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def codes(self) -> list[int]:
        return [((self.x >> i) & 1) | (((self.z >> i) & 1) << 1) for i in range(self.n)]

    def dense_index(self) -> int:
        out = 0
        for i, c in enumerate(self.codes()):
            out |= c << (2 * i)
        return out

    def symplectic(self) -> np.ndarray:
        """Length-2n uint8 vector ``[x | z]``."""
        out = np.zeros(2 * self.n, dtype=np.uint8)
        for i in range(self.n):
            out[i] = (self.x >> i) & 1
            out[self.n + i] = (self.z >> i) & 1
        return out

    def support(self) -> list[int]:
        s = self.x | self.z
        return [i for i in range(self.n) if (s >> i) & 1]

    def __str__(self) -> str:
        return "".join(PAULI_CHARS[c] for c in self.codes())

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def __mul__(self, other: PauliString) -> PauliString:
        return compose(self, other)


def weight(p: PauliString) -> int:
    """Number of qubits on which ``p`` acts non-trivially."""
    return p.weight


def _check_same(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise DimensionMismatch(f"qubit counts differ: {p.n} != {q.n}")


def compose(p: PauliString, q: PauliString) -> PauliString:
    """Phase-free product: componentwise XOR of the X and Z bitsets."""
    _check_same(p, q)
    return PauliString(p.n, p.x ^ q.x, p.z ^ q.z)


def symplectic_product(p: PauliString, q: PauliString) -> int:
    """0 if ``p`` and ``q`` commute, 1 if they anticommute."""
    _check_same(p, q)
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) & 1


# ---------------------------------------------------------------------------
# packed bit matrices


class BitMatrix:
    """Dense GF(2) matrix with rows packed little-endian into uint64 words.

    Column ``j`` of a row lives in word ``j // 64`` at bit ``j % 64``.
    """

    __slots__ = ("rows", "cols", "_words")

    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        nw = max(1, -(-cols // 64))
        if words is None:
            words = np.zeros((rows, nw), dtype=np.uint64)
        else:
            words = np.array(words, dtype=np.uint64, copy=True).reshape(rows, nw)
        self._words = words

    @classmethod
    def from_dense(cls, a) -> BitMatrix:
        a = np.asarray(a, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        m = cls(*a.shape)
        for r in range(a.shape[0]):
            for c in np.flatnonzero(a[r]):
                m._words[r, c // 64] |= np.uint64(1) << np.uint64(c % 64)
        return m

    @classmethod
    def from_row_ints(cls, rows: Iterable[int], cols: int) -> BitMatrix:
        rows = list(rows)
        m = cls(len(rows), cols)
        for r, v in enumerate(rows):
            if v >> cols:
                raise ValueError("row value wider than the column count")
            for w in range(m._words.shape[1]):
                m._words[r, w] = np.uint64((v >> (64 * w)) & 0xFFFFFFFFFFFFFFFF)
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def words(self) -> np.ndarray:
        view = self._words.view()
        view.flags.writeable = False
        return view

    def _check(self, r: int, c: int | None = None) -> None:
        if not 0 <= r < self.rows:
            raise IndexError(f"row {r} out of range [0, {self.rows})")
        if c is not None and not 0 <= c < self.cols:
            raise IndexError(f"column {c} out of range [0, {self.cols})")

    def get(self, r: int, c: int) -> int:
        self._check(r, c)
        return int((self._words[r, c // 64] >> np.uint64(c % 64)) & np.uint64(1))

    def set(self, r: int, c: int, value: int) -> None:
        self._check(r, c)
        bit = np.uint64(1) << np.uint64(c % 64)
        if value & 1:
            self._words[r, c // 64] |= bit
        else:
            self._words[r, c // 64] &= ~bit

    def row_int(self, r: int) -> int:
        self._check(r)
        out = 0
        for w, v in enumerate(self._words[r]):
            out |= int(v) << (64 * w)
        return out

    def row_add(self, src: int, dst: int) -> None:
        """``row[dst] ^= row[src]``."""
        self._check(src)
        self._check(dst)
        self._words[dst] ^= self._words[src]

    def row_swap(self, a: int, b: int) -> None:
        self._check(a)
        self._check(b)
        self._words[[a, b]] = self._words[[b, a]]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r in range(self.rows):
            v = self.row_int(r)
            for c in range(self.cols):
                out[r, c] = (v >> c) & 1
        return out

    def copy(self) -> BitMatrix:
        return BitMatrix(self.rows, self.cols, self._words)

    def rank(self) -> int:
        """GF(2) rank by Gaussian elimination on a copy."""
        rows = [self.row_int(r) for r in range(self.rows)]
        return gf2_rank(rows)

    def matvec(self, v: int) -> int:
        """``M @ v`` over GF(2), ``v`` given as a column bitset; returns a row bitset."""
        out = 0
        for r in range(self.rows):
            out |= ((self.row_int(r) & v).bit_count() & 1) << r
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.shape == other.shape
            and np.array_equal(self._words, other._words)
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank of a set of GF(2) row vectors given as integers."""
    basis: dict[int, int] = {}  # pivot bit -> reduced row
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)
