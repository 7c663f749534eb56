"""Brute-force statevector simulation used as ground truth at desk scale.

Bit order convention, shared with sampling output and histogram formatting:
qubit 0 is the least significant bit of the amplitude index, and bitstrings
print qubit 0 leftmost. So ``amplitudes[x]`` is the amplitude of the basis
state whose qubit-i value is ``(x >> i) & 1``, and the string for index x is
``format(x, f"0{n}b")[::-1]``.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, gate_unitary

MAX_QUBITS = 24
MAX_UNITARY_QUBITS = 12


def simulate(c: Circuit) -> np.ndarray:
    """Return U_c |0...0> as a dense vector of 2**n amplitudes."""
    n = c.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"statevector simulation capped at {MAX_QUBITS} qubits, got {n}")
    state = np.zeros(2**n, dtype=np.complex128)
    state[0] = 1.0
    # axis j of the reshaped tensor holds qubit n-1-j (row-major, qubit 0 = LSB)
    psi = state.reshape([2] * n)
    for g in c.gates:
        psi = _apply_gate(psi, g, n)
    return psi.reshape(-1)


def _apply_gate(psi: np.ndarray, g, n: int) -> np.ndarray:
    u = gate_unitary(g)
    if len(g.qubits) == 1:
        ax = n - 1 - g.qubits[0]
        psi = np.tensordot(u, psi, axes=([1], [ax]))
        return np.moveaxis(psi, 0, ax)
    a, b = g.qubits
    ax_a, ax_b = n - 1 - a, n - 1 - b
    u4 = u.reshape(2, 2, 2, 2)  # (out_a, out_b, in_a, in_b)
    psi = np.tensordot(u4, psi, axes=([2, 3], [ax_a, ax_b]))
    return np.moveaxis(psi, [0, 1], [ax_a, ax_b])


def unitary(c: Circuit) -> np.ndarray:
    """Dense 2**n x 2**n unitary of the circuit (guarded to small n)."""
    n = c.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise ValueError(f"dense unitary capped at {MAX_UNITARY_QUBITS} qubits, got {n}")
    dim = 2**n
    # apply the circuit to all basis columns at once via an extra axis
    cols = np.eye(dim, dtype=np.complex128).reshape([2] * n + [dim])
    for g in c.gates:
        cols = _apply_gate(cols, g, n)
    return cols.reshape(dim, dim)


def index_to_bits(x: int, n: int) -> str:
    """Bitstring with qubit 0 leftmost."""
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def bits_to_index(bits: str) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b == "1")


def peak_of(state: np.ndarray) -> tuple[str, float]:
    """Most probable bitstring and its probability (lowest index on ties)."""
    probs = np.abs(state) ** 2
    n = int(np.log2(len(state)))
    idx = int(np.argmax(probs))  # argmax returns the first (lowest) index on ties
    return index_to_bits(idx, n), float(probs[idx])


def tvd(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance (1/2) sum |p - q| between two distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution size mismatch: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def permutation_unitary(mapping: tuple[int, ...]) -> np.ndarray:
    """Dense operator moving the content of wire i to wire mapping[i]."""
    n = len(mapping)
    dim = 2**n
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for x in range(dim):
        y = permute_index(mapping, x)
        mat[y, x] = 1.0
    return mat


def permute_index(mapping: tuple[int, ...], x: int) -> int:
    """Basis index after moving wire i's bit to wire mapping[i]."""
    y = 0
    for i, m in enumerate(mapping):
        if (x >> i) & 1:
            y |= 1 << m
    return y


def permute_statevector(mapping: tuple[int, ...], state: np.ndarray) -> np.ndarray:
    """Apply the wire-relabeling permutation to a dense state."""
    out = np.empty_like(state)
    for x in range(len(state)):
        out[permute_index(mapping, x)] = state[x]
    return out
