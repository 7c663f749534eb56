"""Circuit representation, gate unitaries, an OpenQASM-2 subset parser and
serializer, and midpoint splitting.

Conventions fixed here and relied on everywhere else:

* Two-qubit gate matrices are written in the basis ``|ab>`` where ``a`` is
  the first qubit listed on the gate and ``b`` the second, with ``a`` as the
  most significant bit (index = 2*a + b). For ``cx`` the first qubit is the
  control.
* ``rzz(theta) = diag(exp(-i theta/2), exp(+i theta/2), exp(+i theta/2),
  exp(-i theta/2))`` in the computational basis.
* Angles serialize as decimal literals with 17 significant digits, which is
  enough for an exact float64 round trip.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

ORIGIN_SOURCE = "source"
ORIGIN_ROUTING = "transpilation-swap"

# kind -> (qubit count, parameter count)
GATE_ARITY = {
    "h": (1, 0),
    "x": (1, 0),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "u3": (1, 3),
    "cx": (2, 0),
    "rzz": (2, 1),
    "swap": (2, 0),
}


class QasmError(ValueError):
    """Parse failure with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    origin: str = ORIGIN_SOURCE

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        nq, np_ = GATE_ARITY[self.kind]
        if len(self.qubits) != nq:
            raise ValueError(f"{self.kind} acts on {nq} qubit(s), got {self.qubits}")
        if len(self.params) != np_:
            raise ValueError(f"{self.kind} takes {np_} parameter(s), got {len(self.params)}")
        if nq == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"two-qubit gate on identical qubits {self.qubits}")
        if self.origin not in (ORIGIN_SOURCE, ORIGIN_ROUTING):
            raise ValueError(f"bad origin tag {self.origin!r}")
        if self.origin == ORIGIN_ROUTING and self.kind != "swap":
            raise ValueError("only swap gates may carry the transpilation-swap tag")

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.num_qubits for q in g.qubits):
                raise ValueError(f"gate {g} addresses a qubit outside 0..{self.num_qubits - 1}")

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)


def gate_unitary(g: Gate) -> np.ndarray:
    """Dense 2x2 or 4x4 unitary for a gate, in the conventions above."""
    p = g.params
    if g.kind == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if g.kind == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if g.kind == "rx":
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if g.kind == "ry":
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if g.kind == "rz":
        return np.array(
            [[np.exp(-0.5j * p[0]), 0], [0, np.exp(0.5j * p[0])]], dtype=complex
        )
    if g.kind == "u3":
        theta, phi, lam = p
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array(
            [
                [c, -np.exp(1j * lam) * s],
                [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
            ],
            dtype=complex,
        )
    if g.kind == "cx":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if g.kind == "rzz":
        e_m, e_p = np.exp(-0.5j * p[0]), np.exp(0.5j * p[0])
        return np.diag([e_m, e_p, e_p, e_m]).astype(complex)
    if g.kind == "swap":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    raise ValueError(f"unknown gate kind {g.kind!r}")


def inverse_gate(g: Gate) -> Gate:
    """Gate whose unitary is the adjoint of ``g``'s."""
    if g.kind in ("h", "x", "cx", "swap"):
        return g
    if g.kind in ("rx", "ry", "rz", "rzz"):
        return Gate(g.kind, g.qubits, (-g.params[0],), g.origin)
    if g.kind == "u3":
        theta, phi, lam = g.params
        return Gate("u3", g.qubits, (-theta, -lam, -phi), g.origin)
    raise ValueError(f"unknown gate kind {g.kind!r}")


def inverse_circuit(c: Circuit) -> Circuit:
    """Circuit implementing the adjoint: gates reversed and inverted."""
    return Circuit(c.num_qubits, tuple(inverse_gate(g) for g in reversed(c.gates)))


def split_at_midpoint(c: Circuit) -> tuple[Circuit, Circuit]:
    """Split into (first, second) halves balanced by two-qubit gate count.

    The first half receives floor(T/2) of the T two-qubit gates (ties give
    the smaller half to the left). The cut falls immediately after the last
    two-qubit gate assigned to the first half, so single-qubit gates at the
    junction go to the second half. Concatenating the halves reproduces the
    input exactly.
    """
    if not c.gates:
        raise ValueError("cannot split an empty circuit")
    total = c.two_qubit_count()
    if total == 0:
        k = len(c.gates) // 2
    else:
        target = total // 2
        if target == 0:
            k = 0
        else:
            seen = 0
            k = 0
            for i, g in enumerate(c.gates):
                if g.is_two_qubit:
                    seen += 1
                    if seen == target:
                        k = i + 1
                        break
    return (
        Circuit(c.num_qubits, c.gates[:k]),
        Circuit(c.num_qubits, c.gates[k:]),
    )


# --------------------------------------------------------------------------
# OpenQASM 2.0 subset
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<float>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<string>"[^"]*")
  | (?P<arrow>->)
  | (?P<punct>[;,\[\]()*/+-])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        pos = 0
        while pos < len(line):
            m = _TOKEN_RE.match(line, pos)
            if m is None:
                raise QasmError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            kind = m.lastgroup
            pos = m.end()
            if kind in ("ws", "comment"):
                continue
            tokens.append((kind, m.group(), lineno, m.start() + 1))
    return tokens


class _TokenStream:
    def __init__(self, tokens):
        self._tokens = tokens
        self._i = 0

    def peek(self):
        return self._tokens[self._i] if self._i < len(self._tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            last = self._tokens[-1] if self._tokens else ("", "", 1, 1)
            raise QasmError("unexpected end of input", last[2], last[3])
        self._i += 1
        return tok

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            raise QasmError(f"expected {value!r}, found {tok[1]!r}", tok[2], tok[3])
        return tok


def _parse_angle(ts: _TokenStream) -> float:
    """Arithmetic over numbers and pi with + - * / and parentheses."""

    def parse_expr():
        val = parse_term()
        while True:
            tok = ts.peek()
            if tok and tok[1] in "+-":
                ts.next()
                rhs = parse_term()
                val = val + rhs if tok[1] == "+" else val - rhs
            else:
                return val

    def parse_term():
        val = parse_factor()
        while True:
            tok = ts.peek()
            if tok and tok[1] in "*/":
                ts.next()
                rhs = parse_factor()
                if tok[1] == "*":
                    val = val * rhs
                else:
                    val = val / rhs
            else:
                return val

    def parse_factor():
        tok = ts.next()
        if tok[1] == "-":
            return -parse_factor()
        if tok[1] == "+":
            return parse_factor()
        if tok[1] == "(":
            val = parse_expr()
            ts.expect(")")
            return val
        if tok[0] in ("float", "int"):
            return float(tok[1])
        if tok[1] == "pi":
            return math.pi
        raise QasmError(f"bad angle expression near {tok[1]!r}", tok[2], tok[3])

    return parse_expr()


def _parse_qubit_operand(ts: _TokenStream, qreg: str, size: int) -> int:
    tok = ts.next()
    if tok[0] != "name" or tok[1] != qreg:
        raise QasmError(f"expected qubit register {qreg!r}, found {tok[1]!r}", tok[2], tok[3])
    ts.expect("[")
    idx_tok = ts.next()
    if idx_tok[0] != "int":
        raise QasmError("expected qubit index", idx_tok[2], idx_tok[3])
    idx = int(idx_tok[1])
    if idx >= size:
        raise QasmError(f"qubit index {idx} out of register bounds [0, {size})", idx_tok[2], idx_tok[3])
    ts.expect("]")
    return idx


def parse_qasm(text: str) -> Circuit:
    """Parse an OpenQASM 2.0 program restricted to one quantum register and
    the gate set h/x/rx/ry/rz/u3/cx/rzz/swap. ``include``, ``creg``,
    ``barrier`` and measurements are accepted and ignored; anything else is
    rejected with a named error.
    """
    ts = _TokenStream(_tokenize(text))
    tok = ts.next()
    if tok[1] != "OPENQASM":
        raise QasmError("program must start with 'OPENQASM 2.0;'", tok[2], tok[3])
    ver = ts.next()
    if ver[1] != "2.0":
        raise QasmError(f"unsupported OPENQASM version {ver[1]!r}", ver[2], ver[3])
    ts.expect(";")

    qreg_name = None
    qreg_size = 0
    creg_names: set[str] = set()
    gates: list[Gate] = []

    while True:
        tok = ts.peek()
        if tok is None:
            break
        kind, value, line, col = ts.next()

        if value == "include":
            fname = ts.next()
            if fname[0] != "string":
                raise QasmError("expected include file name", fname[2], fname[3])
            ts.expect(";")
            continue

        if value == "qreg":
            if qreg_name is not None:
                raise QasmError("multiple quantum registers are not supported", line, col)
            name_tok = ts.next()
            qreg_name = name_tok[1]
            ts.expect("[")
            size_tok = ts.next()
            qreg_size = int(size_tok[1])
            if qreg_size < 1:
                raise QasmError("register size must be positive", size_tok[2], size_tok[3])
            ts.expect("]")
            ts.expect(";")
            continue

        if value == "creg":
            name_tok = ts.next()
            creg_names.add(name_tok[1])
            ts.expect("[")
            ts.next()
            ts.expect("]")
            ts.expect(";")
            continue

        if value in ("measure", "barrier"):
            # skip to the terminating semicolon; measurements are dropped
            while True:
                t = ts.next()
                if t[1] == ";":
                    break
            continue

        if value in GATE_ARITY:
            if qreg_name is None:
                raise QasmError("gate before qreg declaration", line, col)
            nq, nparams = GATE_ARITY[value]
            params: tuple[float, ...] = ()
            if nparams:
                ts.expect("(")
                vals = [_parse_angle(ts)]
                while ts.peek() and ts.peek()[1] == ",":
                    ts.next()
                    vals.append(_parse_angle(ts))
                ts.expect(")")
                if len(vals) != nparams:
                    raise QasmError(
                        f"{value} takes {nparams} parameter(s), got {len(vals)}", line, col
                    )
                params = tuple(vals)
            qubits = [_parse_qubit_operand(ts, qreg_name, qreg_size)]
            while ts.peek() and ts.peek()[1] == ",":
                ts.next()
                qubits.append(_parse_qubit_operand(ts, qreg_name, qreg_size))
            ts.expect(";")
            if len(qubits) != nq:
                raise QasmError(
                    f"{value} acts on {nq} qubit(s), got {len(qubits)}", line, col
                )
            if nq == 2 and qubits[0] == qubits[1]:
                raise QasmError(f"{value} needs distinct qubits", line, col)
            gates.append(Gate(value, tuple(qubits), params))
            continue

        raise QasmError(f"unsupported construct {value!r}", line, col)

    if qreg_name is None:
        raise QasmError("program declares no quantum register", 1, 1)
    return Circuit(qreg_size, tuple(gates))


def serialize_qasm(c: Circuit) -> str:
    """Emit the circuit as OpenQASM 2.0, one gate per line, angles with 17
    significant digits. Origin tags are not represented in QASM; parsing the
    output marks every gate as source.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    for g in c.gates:
        params = ""
        if g.params:
            params = "(" + ",".join(f"{p:.17g}" for p in g.params) + ")"
        operands = ",".join(f"q[{q}]" for q in g.qubits)
        lines.append(f"{g.kind}{params} {operands};")
    return "\n".join(lines) + "\n"
