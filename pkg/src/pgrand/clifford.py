"""Random two-qubit Clifford encoders and Heisenberg-picture stabilizer evolution.

Every two-qubit Clifford is stored by its action on the four generators
``X_a, Z_a, X_b, Z_b`` (a signed two-qubit Pauli each). Because phases are
dropped everywhere downstream, conjugating a Pauli pattern only needs the
phase-free part, which collapses to a 16-entry lookup table on the local
4-bit code ``x_a | z_a << 1 | x_b << 2 | z_b << 3``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .pauli import BitMatrix, DimensionMismatch, PauliString

GROUP_ORDER = 11520

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = 1j * _X @ _Z  # = [[0,-i],[i,0]]
_PAULI_1Q = [_I2, _X, _Z, _Y]  # by 2-bit code (x | z << 1)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j])
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)  # control = local qubit 0 (left tensor factor)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

# 16 two-qubit Paulis indexed by code_a | code_b << 2; local qubit a is the left factor
_PAULI_2Q = np.array(
    [np.kron(_PAULI_1Q[c & 3], _PAULI_1Q[c >> 2]) for c in range(16)]
)
_GEN_CODES = (1, 2, 4, 8)  # X_a, Z_a, X_b, Z_b


def _signed_images(u: np.ndarray) -> tuple[tuple[int, int], ...]:
    """``(code, sign_bit)`` of ``u G u^dagger`` for the four generators."""
    ud = u.conj().T
    images = np.stack([u @ _PAULI_2Q[g] @ ud for g in _GEN_CODES])
    coeffs = np.einsum("pij,gij->gp", _PAULI_2Q.conj(), images) / 4.0
    out = []
    for row in coeffs:
        p = int(np.argmax(np.abs(row)))
        c = row[p]
        if abs(abs(c) - 1) > 1e-9 or abs(c.imag) > 1e-9:
            raise AssertionError("not a Clifford conjugation")
        out.append((p, 0 if c.real > 0 else 1))
    return tuple(out)


def _table_from_images(images: Sequence[tuple[int, int]]) -> np.ndarray:
    table = np.zeros(16, dtype=np.uint8)
    for code in range(16):
        out = 0
        for bit, (img, _) in enumerate(images):
            if (code >> bit) & 1:
                out ^= img
        table[code] = out
    return table


class TwoQubitCliffordGroup:
    """Canonical enumeration of the 11520-element two-qubit Clifford group.

    Elements are generated by breadth-first search over words in
    ``{H_a, H_b, S_a, S_b, CNOT_ab}``, identified by their signed generator
    images, then sorted by that key so the index of an element does not
    depend on the search order.
    """

    def __init__(self):
        gens = [
            np.kron(_H, _I2),
            np.kron(_I2, _H),
            np.kron(_S, _I2),
            np.kron(_I2, _S),
            _CNOT,
        ]
        start = np.eye(4, dtype=complex)
        seen = {_signed_images(start): start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for g in gens:
                v = g @ u
                key = _signed_images(v)
                if key not in seen:
                    seen[key] = v
                    queue.append(v)
        if len(seen) != GROUP_ORDER:
            raise AssertionError(f"enumerated {len(seen)} elements, expected {GROUP_ORDER}")
        self.keys = sorted(seen)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.unitaries = np.stack([seen[k] for k in self.keys])
        self.tables = np.stack([_table_from_images(k) for k in self.keys])

    def __len__(self) -> int:
        return len(self.keys)

    def index_of(self, u: np.ndarray) -> int:
        return self.index[_signed_images(u)]

    def inverse(self, i: int) -> int:
        return self.index_of(self.unitaries[i].conj().T)


@lru_cache(maxsize=1)
def clifford_group() -> TwoQubitCliffordGroup:
    return TwoQubitCliffordGroup()


_NAMED_1Q = {"H": _H, "S": _S, "SDG": _S.conj().T, "X": _X, "Y": _Y, "Z": _Z}
_NAMED_2Q = {"CNOT": _CNOT, "CX": _CNOT, "CZ": _CZ, "SWAP": _SWAP}
_NAMED_INVERSE = {"S": "SDG", "SDG": "S"}


@lru_cache(maxsize=None)
def _named_table(name: str) -> np.ndarray:
    if name in _NAMED_2Q:
        return _table_from_images(_signed_images(_NAMED_2Q[name]))
    u = np.kron(_NAMED_1Q[name], _I2)
    return _table_from_images(_signed_images(u))[:4]


@dataclass(frozen=True)
class CliffordGate:
    """A group element index (0..11519) or a named gate, with its target qubits."""

    kind: int | str
    targets: tuple[int, ...]

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if isinstance(self.kind, str):
            name = self.kind.upper()
            object.__setattr__(self, "kind", name)
            arity = 2 if name in _NAMED_2Q else 1 if name in _NAMED_1Q else None
            if arity is None:
                raise ValueError(f"unknown gate name {self.kind!r}")
        else:
            if not 0 <= int(self.kind) < GROUP_ORDER:
                raise ValueError(f"Clifford index {self.kind} out of range")
            object.__setattr__(self, "kind", int(self.kind))
            arity = 2
        if len(targets) != arity:
            raise ValueError(f"gate {self.kind} needs {arity} targets, got {len(targets)}")
        if len(set(targets)) != len(targets) or min(targets) < 0:
            raise ValueError(f"targets must be distinct non-negative indices: {targets}")

    @property
    def table(self) -> np.ndarray:
        if isinstance(self.kind, str):
            return _named_table(self.kind)
        return clifford_group().tables[self.kind]

    def unitary(self) -> np.ndarray:
        """Local 2x2 or 4x4 unitary (first target is the left tensor factor)."""
        if isinstance(self.kind, str):
            return (_NAMED_2Q.get(self.kind) if len(self.targets) == 2 else _NAMED_1Q[self.kind]).copy()
        return clifford_group().unitaries[self.kind].copy()

    def inverse(self) -> CliffordGate:
        if isinstance(self.kind, str):
            return CliffordGate(_NAMED_INVERSE.get(self.kind, self.kind), self.targets)
        return CliffordGate(clifford_group().inverse(self.kind), self.targets)


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list; ``gates[0]`` acts first."""

    n: int
    gates: tuple[CliffordGate, ...] = ()
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n:
                raise ValueError(f"gate targets {g.targets} out of range for n={self.n}")

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> CliffordCircuit:
        return CliffordCircuit(self.n, tuple(g.inverse() for g in reversed(self.gates)), self.seed)

    # -- serialization -------------------------------------------------------

    def dumps(self) -> str:
        lines = [f"n={self.n} seed={self.seed if self.seed is not None else 'none'}"]
        group = None
        for g in self.gates:
            kind = g.kind
            if isinstance(kind, str):
                if len(g.targets) != 2:
                    raise ValueError("single-qubit named gates have no group index to serialize")
                group = group or clifford_group()
                kind = group.index_of(g.unitary())
            lines.append(f"{kind} {g.targets[0]} {g.targets[1]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> CliffordCircuit:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty circuit file")
        header = dict(tok.split("=", 1) for tok in lines[0].split())
        try:
            n = int(header["n"])
        except KeyError:
            raise ValueError("circuit header must define n=<n>") from None
        seed = header.get("seed", "none")
        seed = None if seed == "none" else int(seed)
        gates = []
        for ln in lines[1:]:
            idx, a, b = (int(v) for v in ln.split())
            gates.append(CliffordGate(idx, (a, b)))
        return cls(n, tuple(gates), seed)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> CliffordCircuit:
        return cls.loads(Path(path).read_text())


def default_gate_count(n: int) -> int:
    """``ceil(0.14 n log2(n)^2)`` gates."""
    # round first so products like 0.14*32*25 = 112.00000000000001 do not ceil upward
    return max(1, math.ceil(round(0.14 * n * math.log2(n) ** 2, 9)))


def sample_random_encoder(n: int, num_gates: int | None = None, seed: int = 0) -> CliffordCircuit:
    """Draw ``num_gates`` uniform two-qubit Cliffords on uniform random qubit pairs."""
    if n < 2:
        raise ValueError(f"random encoder needs n >= 2, got {n}")
    if num_gates is None:
        num_gates = default_gate_count(n)
    if num_gates < 1:
        raise ValueError("num_gates must be >= 1")
    rng = np.random.default_rng(seed)
    kinds = rng.integers(0, GROUP_ORDER, size=num_gates)
    gates = []
    for kind in kinds:
        a, b = sorted(int(q) for q in rng.choice(n, size=2, replace=False))
        gates.append(CliffordGate(int(kind), (a, b)))
    return CliffordCircuit(n, tuple(gates), seed)


def conjugate_arrays(circuit: CliffordCircuit, x: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evolve a batch of Pauli strings, given as ``(m, n)`` 0/1 arrays, through ``circuit``."""
    x = np.array(x, dtype=np.uint8, copy=True)
    z = np.array(z, dtype=np.uint8, copy=True)
    if x.shape != z.shape or x.ndim != 2 or x.shape[1] != circuit.n:
        raise DimensionMismatch(f"expected (m, {circuit.n}) arrays, got {x.shape} and {z.shape}")
    for g in circuit.gates:
        t = g.table
        if len(g.targets) == 2:
            a, b = g.targets
            code = x[:, a] | (z[:, a] << 1) | (x[:, b] << 2) | (z[:, b] << 3)
            out = t[code]
            x[:, a] = out & 1
            z[:, a] = (out >> 1) & 1
            x[:, b] = (out >> 2) & 1
            z[:, b] = (out >> 3) & 1
        else:
            (a,) = g.targets
            out = t[x[:, a] | (z[:, a] << 1)]
            x[:, a] = out & 1
            z[:, a] = (out >> 1) & 1
    return x, z


def _to_arrays(paulis: Sequence[PauliString], n: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.zeros((len(paulis), n), dtype=np.uint8)
    z = np.zeros((len(paulis), n), dtype=np.uint8)
    for r, p in enumerate(paulis):
        if p.n != n:
            raise DimensionMismatch(f"Pauli on {p.n} qubits, circuit on {n}")
        for i in range(n):
            x[r, i] = (p.x >> i) & 1
            z[r, i] = (p.z >> i) & 1
    return x, z


def _from_arrays(x: np.ndarray, z: np.ndarray) -> list[PauliString]:
    n = x.shape[1]
    weights = 1 << np.arange(n, dtype=object)
    return [
        PauliString(n, int(np.dot(xr.astype(object), weights)), int(np.dot(zr.astype(object), weights)))
        for xr, zr in zip(x, z)
    ]


def conjugate_many(circuit: CliffordCircuit, paulis: Sequence[PauliString]) -> list[PauliString]:
    if not paulis:
        return []
    x, z = conjugate_arrays(circuit, *_to_arrays(paulis, circuit.n))
    return _from_arrays(x, z)


def conjugate_pauli(circuit: CliffordCircuit, p: PauliString) -> PauliString:
    """``U P U^dagger`` with the phase dropped."""
    return conjugate_many(circuit, [p])[0]


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """``(n-k) x 2n`` stabilizer matrix in ``[x | z]`` symplectic form.

    ``single_syndromes[i, c]`` holds the packed syndrome words of the
    single-qubit Pauli with code ``c`` on qubit ``i``; any pattern's syndrome
    is the XOR of its components' entries.
    """

    n: int
    k: int
    rows: tuple[PauliString, ...]
    measured: tuple[int, ...]
    H: BitMatrix = field(repr=False)
    single_syndromes: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def syndrome_words(self) -> int:
        return self.single_syndromes.shape[2]

    @classmethod
    def from_rows(cls, rows: Sequence[PauliString], measured: Sequence[int] | None = None) -> ParityCheckMatrix:
        rows = tuple(rows)
        if not rows:
            raise ValueError("parity-check matrix needs at least one row")
        n = rows[0].n
        if any(p.n != n for p in rows):
            raise DimensionMismatch("rows act on different qubit counts")
        if any(p.weight == 0 for p in rows):
            raise ValueError("parity-check rows must be nonzero")
        r = len(rows)
        H = BitMatrix.from_row_ints((p.x | (p.z << n) for p in rows), 2 * n)
        nw = -(-r // 64)
        table = np.zeros((n, 4, nw), dtype=np.uint64)
        for j, p in enumerate(rows):
            word, bit = divmod(j, 64)
            bit = np.uint64(1) << np.uint64(bit)
            for i in range(n):
                xi, zi = (p.x >> i) & 1, (p.z >> i) & 1
                # anticommutation of row j with X_i is z_i, with Z_i is x_i
                if zi:
                    table[i, 1, word] |= bit
                if xi:
                    table[i, 2, word] |= bit
                if xi ^ zi:
                    table[i, 3, word] |= bit
        table.flags.writeable = False
        if measured is None:
            measured = tuple(range(n - r, n))
        return cls(n, n - r, rows, tuple(measured), H, table)

    def syndrome_int(self, e: PauliString) -> int:
        if e.n != self.n:
            raise DimensionMismatch(f"error on {e.n} qubits, code on {self.n}")
        out = 0
        for j, row in enumerate(self.rows):
            out |= (((row.x & e.z).bit_count() + (row.z & e.x).bit_count()) & 1) << j
        return out

    def syndrome_codes(self, codes: np.ndarray) -> np.ndarray:
        """Packed syndromes for a batch of patterns given as ``(m, n)`` code arrays."""
        codes = np.asarray(codes, dtype=np.uint8)
        if codes.ndim != 2 or codes.shape[1] != self.n:
            raise DimensionMismatch(f"expected (m, {self.n}) code array")
        picked = self.single_syndromes[np.arange(self.n), codes]  # (m, n, W)
        return np.bitwise_xor.reduce(picked, axis=1)


def build_parity_check(
    circuit: CliffordCircuit, measured_qubits: Iterable[int] | None = None, k: int | None = None
) -> ParityCheckMatrix:
    """Evolve ``Z_m`` for each measured qubit ``m`` through the encoder.

    ``measured_qubits`` defaults to the last ``n - k`` indices.
    """
    n = circuit.n
    if measured_qubits is None:
        if k is None:
            raise ValueError("give either measured_qubits or k")
        if not 1 <= k < n:
            raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
        measured = tuple(range(k, n))
    else:
        measured = tuple(int(m) for m in measured_qubits)
        if len(set(measured)) != len(measured):
            raise ValueError(f"duplicate measured qubits: {measured}")
        for m in measured:
            if not 0 <= m < n:
                raise IndexError(f"measured qubit {m} out of range for n={n}")
        if k is not None and len(measured) != n - k:
            raise ValueError(f"|measured| = {len(measured)} but n - k = {n - k}")
    if not measured:
        raise ValueError("at least one measured qubit is required")
    z = np.zeros((len(measured), n), dtype=np.uint8)
    z[np.arange(len(measured)), measured] = 1
    xs, zs = conjugate_arrays(circuit, np.zeros_like(z), z)
    return ParityCheckMatrix.from_rows(_from_arrays(xs, zs), measured)


def logical_operators(circuit: CliffordCircuit, kept_qubits: Iterable[int]) -> list[PauliString]:
    """Evolved ``X_j`` and ``Z_j`` for every kept qubit ``j`` (X first, then Z)."""
    kept = list(kept_qubits)
    n = circuit.n
    m = len(kept)
    x = np.zeros((2 * m, n), dtype=np.uint8)
    z = np.zeros((2 * m, n), dtype=np.uint8)
    x[np.arange(m), kept] = 1
    z[m + np.arange(m), kept] = 1
    return _from_arrays(*conjugate_arrays(circuit, x, z))


def syndrome(H: ParityCheckMatrix, e: PauliString) -> np.ndarray:
    """Length ``n-k`` bit vector; bit ``i`` is the commutation of row ``i`` with ``e``."""
    s = H.syndrome_int(e)
    return np.array([(s >> i) & 1 for i in range(H.r)], dtype=np.uint8)


def apply_measurement_update(s, m) -> np.ndarray:
    """XOR the measured syndrome with Alice's outcome bits."""
    s = np.asarray(s, dtype=np.uint8)
    m = np.asarray(m, dtype=np.uint8)
    if s.shape != m.shape:
        raise ValueError(f"length mismatch: {s.shape} vs {m.shape}")
    return s ^ m


def gate_cost_estimate(n: int, k: int) -> dict[str, Fraction]:
    """Qubit overhead per output pair and the average gate content of syndrome extraction."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    return {
        "overhead_per_pair": 3 * (Fraction(n, k) - 1),
        "expected_cnots": (n - k) * Fraction(3 * n, 4),
        "expected_single_qubit": (n - k) * Fraction(7 * n, 2),
    }
