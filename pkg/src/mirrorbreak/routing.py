"""Routing to linear nearest-neighbor connectivity, SWAP stripping, and qubit
relabeling.

Layout maps are permutations ``layout[logical] = wire``. A routed circuit
satisfies, as an operator identity,

    U(routed) = P(output_layout) . U(original) . P(input_layout)^{-1}

where ``P(pi)`` is the unitary that moves the content of wire i to wire
pi[i]. Forward routing starts from the identity layout and lets the drift
accumulate at the end (output_layout); reverse routing ends at the identity
layout and pushes the drift to the beginning (input_layout). Neither mode
appends restoring SWAPs; callers fold the exported layout into their own
bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import ORIGIN_ROUTING, ORIGIN_SOURCE, Circuit, Gate


@dataclass(frozen=True)
class QubitPermutation:
    """Bijection on wire labels with an adjacent-transposition factorization.

    ``mapping[i]`` is the new label of wire i. ``factorization`` is a list of
    adjacent pairs (i, i+1); applying them in list order as label swaps to
    the identity reproduces ``mapping``.
    """

    mapping: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"{self.mapping!r} is not a permutation")

    @classmethod
    def identity(cls, n: int) -> "QubitPermutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "QubitPermutation":
        m = list(range(n))
        m[i], m[j] = m[j], m[i]
        return cls(tuple(m))

    @property
    def size(self) -> int:
        return len(self.mapping)

    def is_identity(self) -> bool:
        return all(m == i for i, m in enumerate(self.mapping))

    def inverse(self) -> "QubitPermutation":
        inv = [0] * self.size
        for i, m in enumerate(self.mapping):
            inv[m] = i
        return QubitPermutation(tuple(inv))

    def compose(self, other: "QubitPermutation") -> "QubitPermutation":
        """self after other: (self . other)[i] = self[other[i]].

        Matches operator products: P(a) P(b) = P(a.compose(b)).
        """
        if self.size != other.size:
            raise ValueError("permutation size mismatch")
        return QubitPermutation(tuple(self.mapping[o] for o in other.mapping))

    def apply_to_bits(self, bits: str) -> str:
        out = ["0"] * self.size
        for i, b in enumerate(bits):
            out[self.mapping[i]] = b
        return "".join(out)

    @property
    def factorization(self) -> tuple[tuple[int, int], ...]:
        """Adjacent transpositions whose in-order composition equals mapping.

        Bubble sort of the one-line notation; length is at most n(n-1)/2.
        """
        a = list(self.mapping)
        swaps: list[tuple[int, int]] = []
        changed = True
        while changed:
            changed = False
            for x in range(len(a) - 1):
                if a[x] > a[x + 1]:
                    a[x], a[x + 1] = a[x + 1], a[x]
                    swaps.append((x, x + 1))
                    changed = True
        return tuple(swaps)


def compose_transpositions(n: int, swaps) -> QubitPermutation:
    """Apply (i, i+1) label swaps in order to the identity mapping."""
    perm = QubitPermutation.identity(n)
    for i, j in swaps:
        perm = QubitPermutation.transposition(n, i, j).compose(perm)
    return perm


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit
    input_layout: QubitPermutation
    output_layout: QubitPermutation


class _Layout:
    """Mutable logical<->wire map used while routing and stripping."""

    def __init__(self, n: int, mapping=None):
        self.l2p = list(mapping) if mapping is not None else list(range(n))
        self.p2l = [0] * n
        for l, p in enumerate(self.l2p):
            self.p2l[p] = l

    def swap_wires(self, w1: int, w2: int):
        a, b = self.p2l[w1], self.p2l[w2]
        self.p2l[w1], self.p2l[w2] = b, a
        self.l2p[a], self.l2p[b] = w2, w1

    def as_permutation(self) -> QubitPermutation:
        return QubitPermutation(tuple(self.l2p))


def _bring_adjacent(layout: _Layout, a: int, b: int, emit) -> tuple[int, int]:
    """Move the higher wire down next to the lower one, emitting tagged SWAPs."""
    p, q = layout.l2p[a], layout.l2p[b]
    lo, hi = min(p, q), max(p, q)
    for w in range(hi, lo + 1, -1):
        emit(Gate("swap", (w - 1, w), (), ORIGIN_ROUTING))
        layout.swap_wires(w - 1, w)
    return layout.l2p[a], layout.l2p[b]


def route_linear(c: Circuit, direction: str = "forward") -> RoutedCircuit:
    """Insert tagged SWAPs so every two-qubit gate acts on adjacent wires.

    Greedy, no lookahead: for each non-adjacent pair the farther wire is
    walked over to sit next to the nearer one, and the running layout keeps
    the drift instead of swapping back. ``direction="forward"`` drifts the
    output layout; ``direction="reverse"`` processes gates from the end so
    that the drift lands on the input layout and the circuit ends aligned.
    """
    n = c.num_qubits
    layout = _Layout(n)
    emitted: list[Gate] = []
    emit = emitted.append

    if direction == "forward":
        gate_iter = c.gates
    elif direction == "reverse":
        gate_iter = tuple(reversed(c.gates))
    else:
        raise ValueError(f"direction must be forward or reverse, got {direction!r}")

    for g in gate_iter:
        if len(g.qubits) == 1:
            emit(Gate(g.kind, (layout.l2p[g.qubits[0]],), g.params, g.origin))
            continue
        a, b = g.qubits
        pa, pb = layout.l2p[a], layout.l2p[b]
        if abs(pa - pb) != 1:
            pa, pb = _bring_adjacent(layout, a, b, emit)
        emit(Gate(g.kind, (pa, pb), g.params, g.origin))

    if direction == "forward":
        routed = Circuit(n, tuple(emitted))
        return RoutedCircuit(routed, QubitPermutation.identity(n), layout.as_permutation())
    routed = Circuit(n, tuple(reversed(emitted)))
    return RoutedCircuit(routed, layout.as_permutation(), QubitPermutation.identity(n))


def strip_transpilation_swaps(
    c: Circuit, initial_layout: QubitPermutation | None = None
) -> Circuit:
    """Drop routing SWAPs and rewrite the remaining gates back to the logical
    labels they had before routing.

    ``initial_layout`` is the layout in force at the first gate (identity for
    a complete forward-routed circuit; routed remainders pass their tracked
    cut layout). Source gates, including source SWAPs, are kept.
    """
    n = c.num_qubits
    layout = _Layout(n, initial_layout.mapping if initial_layout else None)
    out: list[Gate] = []
    for g in c.gates:
        if g.origin == ORIGIN_ROUTING:
            w1, w2 = g.qubits
            layout.swap_wires(w1, w2)
            continue
        logical = tuple(layout.p2l[q] for q in g.qubits)
        out.append(Gate(g.kind, logical, g.params, ORIGIN_SOURCE))
    return Circuit(n, tuple(out))


def reindex(c: Circuit, p: QubitPermutation) -> Circuit:
    """Map every gate's qubit indices through ``p``; gate order unchanged.

    Satisfies U(reindex(c, p)) = P(p) U(c) P(p)^{-1}.
    """
    if p.size != c.num_qubits:
        raise ValueError(f"permutation on {p.size} wires, circuit has {c.num_qubits}")
    gates = tuple(
        Gate(g.kind, tuple(p.mapping[q] for q in g.qubits), g.params, g.origin)
        for g in c.gates
    )
    return Circuit(c.num_qubits, gates)


def advance_layout(layout: QubitPermutation, wire_a: int, wire_b: int) -> QubitPermutation:
    """Layout after a SWAP of two wires executes (content exchange)."""
    tau = QubitPermutation.transposition(layout.size, wire_a, wire_b)
    return tau.compose(layout)
