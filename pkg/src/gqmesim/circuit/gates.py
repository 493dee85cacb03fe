"""Gate IR over the {RZ, SX, CX} basis and its text format.

Qubit 0 is the least-significant bit of a basis-state index, so on two
qubits ``CX(control=0, target=1)`` maps basis state 1 to basis state 3.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DimensionError, SeriesFormatError, ValidationError

RZ, SX, CX, UNITARY = "RZ", "SX", "CX", "UNITARY"

SX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)


def rz_matrix(lam: float) -> np.ndarray:
    return np.array([[cmath.exp(-0.5j * lam), 0], [0, cmath.exp(0.5j * lam)]])


def cx_matrix() -> np.ndarray:
    """CX with control q0 and target q1 in the qubit-0-LSB ordering."""
    return np.array(
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
    )


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        n = {RZ: 1, SX: 1, CX: 2}.get(self.kind)
        if self.kind == UNITARY:
            if self.matrix is None or self.matrix.shape != (2 ** len(self.qubits),) * 2:
                raise DimensionError("UNITARY gate matrix does not match its qubit count")
        elif n is None:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        elif len(self.qubits) != n:
            raise ValidationError(f"{self.kind} acts on {n} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValidationError("gate qubits must be distinct")

    @staticmethod
    def rz(q: int, lam: float) -> Gate:
        return Gate(RZ, (q,), float(lam))

    @staticmethod
    def sx(q: int) -> Gate:
        return Gate(SX, (q,))

    @staticmethod
    def cx(control: int, target: int) -> Gate:
        return Gate(CX, (control, target))

    @staticmethod
    def unitary(m: np.ndarray, qubits) -> Gate:
        return Gate(UNITARY, tuple(qubits), None, np.asarray(m, dtype=complex))

    def local_matrix(self) -> np.ndarray:
        if self.kind == RZ:
            return rz_matrix(self.param)
        if self.kind == SX:
            return SX_MATRIX
        if self.kind == CX:
            return cx_matrix()
        return self.matrix


@dataclass
class GateSequence:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    global_phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if any(q < 0 or q >= self.n_qubits for q in g.qubits):
            raise ValidationError(f"gate {g.kind}{g.qubits} outside {self.n_qubits} qubits")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def __len__(self) -> int:
        return len(self.gates)

    def counts(self) -> dict[str, int]:
        out = {RZ: 0, SX: 0, CX: 0}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out


def apply_gate(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply ``gate`` to a tensor of shape (2,)*n + batch.

    Axis ``n - 1 - q`` holds qubit q, matching qubit 0 = least-significant bit.
    """
    if gate.kind == CX:
        c, t = gate.qubits
        ac, at = n - 1 - c, n - 1 - t
        out = state.copy()
        sl = [slice(None)] * state.ndim
        sl[ac] = 1
        sub = state[tuple(sl)]
        out[tuple(sl)] = np.flip(sub, axis=at if at < ac else at - 1)
        return out
    m = gate.local_matrix()
    qs = gate.qubits
    k = len(qs)
    # local index bit i <-> qs[i]; reshape puts the most significant first
    axes = [n - 1 - q for q in reversed(qs)]
    moved = np.moveaxis(state, axes, list(range(k)))
    shape = moved.shape
    res = (m @ moved.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(res, list(range(k)), axes)


def reconstruct(seq: GateSequence) -> np.ndarray:
    """Dense unitary of ``seq`` (gates applied in list order) times its phase."""
    n = seq.n_qubits
    dim = 2**n
    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in seq.gates:
        if any(q >= n for q in g.qubits):
            raise ValidationError(f"gate {g.kind}{g.qubits} outside {n} qubits")
        state = apply_gate(state, g, n)
    return seq.global_phase * state.reshape(dim, dim)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phi} b| with phi fitted on the largest entry of b."""
    a = np.asarray(a)
    b = np.asarray(b)
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) == 0:
        return float(np.max(np.abs(a)))
    ph = a[k] / b[k]
    ph /= abs(ph) if abs(ph) > 0 else 1.0
    return float(np.max(np.abs(a - ph * b)))


# text format ---------------------------------------------------------------

HEADER = "QCIRC v1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_circuit(seq: GateSequence) -> str:
    ph = complex(seq.global_phase)
    lines = [f"{HEADER} nq={seq.n_qubits} phase={_fmt(ph.real)} {_fmt(ph.imag)}"]
    for g in seq.gates:
        if g.kind == RZ:
            lines.append(f"RZ q{g.qubits[0]} {_fmt(g.param)}")
        elif g.kind == SX:
            lines.append(f"SX q{g.qubits[0]}")
        elif g.kind == CX:
            lines.append(f"CX q{g.qubits[0]} q{g.qubits[1]}")
        else:
            raise ValidationError("UNITARY gates have no text form; transpile first")
    return "\n".join(lines) + "\n"


def _qubit(tok: str, lineno: int) -> int:
    if not tok.startswith("q") or not tok[1:].isdigit():
        raise SeriesFormatError(f"bad qubit token {tok!r}", record=lineno)
    return int(tok[1:])


def parse_circuit(text: str) -> GateSequence:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SeriesFormatError("empty circuit file")
    head = lines[0].split()
    if head[:2] != HEADER.split() or len(head) != 5:
        raise SeriesFormatError(f"bad circuit header {lines[0]!r}")
    try:
        if not head[2].startswith("nq=") or not head[3].startswith("phase="):
            raise ValueError("expected nq= and phase=")
        nq = int(head[2][3:])
        phase = complex(float(head[3][6:]), float(head[4]))
    except ValueError as exc:
        raise SeriesFormatError(f"bad circuit header: {exc}") from None
    seq = GateSequence(nq, global_phase=phase)
    for lineno, line in enumerate(lines[1:], start=2):
        tok = line.split()
        op = tok[0]
        try:
            if op == RZ and len(tok) == 3:
                g = Gate.rz(_qubit(tok[1], lineno), float(tok[2]))
            elif op == SX and len(tok) == 2:
                g = Gate.sx(_qubit(tok[1], lineno))
            elif op == CX and len(tok) == 3:
                g = Gate.cx(_qubit(tok[1], lineno), _qubit(tok[2], lineno))
            else:
                raise SeriesFormatError(f"unrecognized gate line {line!r}", record=lineno)
            seq.append(g)
        except ValueError as exc:
            raise SeriesFormatError(str(exc), record=lineno) from None
    return seq


def write_circuit(seq: GateSequence, path: str | Path) -> None:
    Path(path).write_text(format_circuit(seq), encoding="ascii")


def read_circuit(path: str | Path) -> GateSequence:
    return parse_circuit(Path(path).read_text(encoding="ascii"))


def n_qubits_for(dim: int) -> int:
    q = int(math.log2(dim)) if dim > 0 else -1
    if dim < 1 or 2**q != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return q
