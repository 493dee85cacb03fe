"""Dense unitary -> {RZ, SX, CX} gate sequence.

Stages:

1. ``two_level_decompose`` reduces U to the identity with phase diagonals and
   real Givens rotations.  Every rotation pairs basis states that differ in a
   single bit, i.e. neighbours on a Gray-code path, so each one is a
   single-qubit rotation fully controlled on the remaining qubits.
2. ``TwoLevel`` operations on arbitrary pairs are first routed along a Gray
   code path with controlled swaps (``route_two_level``).
3. Fully controlled rotations that share a target qubit and act on disjoint
   pairs are fused into one uniformly controlled rotation, expanded into a
   Gray-code ladder of CX and single-qubit rotations.  Diagonals are expanded
   the same way, one qubit at a time.
4. A peephole pass merges runs of single-qubit gates and cancels CX pairs;
   each surviving single-qubit unitary becomes RZ SX RZ SX RZ (or one RZ).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, ValidationError
from .gates import Gate, GateSequence, n_qubits_for, rz_matrix

UNITARY_TOL = 1e-10
_ZERO = 1e-14
_ANGLE_EPS = 1e-13


@dataclass(frozen=True)
class Diagonal:
    phases: np.ndarray  # diag(exp(i * phases))

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * self.phases))

    def dagger(self) -> Diagonal:
        return Diagonal(-self.phases)


@dataclass(frozen=True)
class TwoLevel:
    """2x2 unitary ``m`` on basis states ``(lo, hi)`` with ``lo < hi``."""

    lo: int
    hi: int
    m: np.ndarray

    def dagger(self) -> TwoLevel:
        return TwoLevel(self.lo, self.hi, self.m.conj().T)

    def embed(self, dim: int) -> np.ndarray:
        out = np.eye(dim, dtype=complex)
        idx = np.ix_([self.lo, self.hi], [self.lo, self.hi])
        out[idx] = self.m
        return out


@dataclass(frozen=True)
class Multiplexor:
    """Rotation about ``axis`` on ``target`` with angle ``angles[c]`` for control pattern c.

    Controls are all other qubits in increasing order; pattern bit i belongs
    to the i-th of them.
    """

    axis: str
    target: int
    angles: np.ndarray

    def dagger(self) -> Multiplexor:
        return Multiplexor(self.axis, self.target, -self.angles)


def _rot(axis: str, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return rz_matrix(theta)


def _pattern(index: int, target: int, n: int) -> int:
    """Control pattern of basis ``index`` with the target bit removed."""
    low = index & ((1 << target) - 1)
    high = index >> (target + 1)
    return low | (high << target)


def _check_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"unitary must be square, got {u.shape}")
    n_qubits_for(u.shape[0])
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > UNITARY_TOL:
        raise ValidationError(f"matrix is not unitary (|U^+U - I| = {err:.2e})")
    return u


# stage 1 -------------------------------------------------------------------


def two_level_decompose(u: np.ndarray) -> list[Diagonal | TwoLevel]:
    """Operations ``w_1, ..., w_m`` with ``w_m ... w_1 U = I``.

    Column j is first made real and nonnegative by a diagonal, then gathered
    into row j by Givens rotations bit by bit (bit 0 first).  Pairs touching
    finished rows are never used.
    """
    v = _check_unitary(u).copy()
    dim = v.shape[0]
    n = n_qubits_for(dim)
    ops: list[Diagonal | TwoLevel] = []
    for j in range(dim - 1):
        col = v[j:, j]
        phases = np.zeros(dim)
        phases[j:] = -np.angle(np.where(np.abs(col) > _ZERO, col, 1.0))
        if np.any(np.abs(phases) > _ANGLE_EPS):
            ops.append(Diagonal(phases))
            v = np.exp(1j * phases)[:, None] * v
        v[j:, j] = v[j:, j].real
        for b in range(n):
            bit = 1 << b
            for lo in range(dim):
                if lo & bit:
                    continue
                hi = lo | bit
                keep, drop = (hi, lo) if j & bit else (lo, hi)
                if keep < j or drop < j:
                    continue
                y = v[drop, j].real
                if abs(y) <= _ZERO:
                    v[drop, j] = 0.0
                    continue
                x = v[keep, j].real
                r = math.hypot(x, y)
                c, s = x / r, y / r
                if keep == lo:
                    m = np.array([[c, s], [-s, c]], dtype=complex)
                else:
                    m = np.array([[c, -s], [s, c]], dtype=complex)
                ops.append(TwoLevel(lo, hi, m))
                rows = v[[lo, hi], :]
                v[[lo, hi], :] = m @ rows
                v[drop, j] = 0.0
                v[keep, j] = r
    final = -np.angle(np.diag(v))
    if np.any(np.abs(final) > _ANGLE_EPS):
        ops.append(Diagonal(final))
    return ops


def compose_two_level(ops: list[Diagonal | TwoLevel], dim: int) -> np.ndarray:
    """Dense ``w_m ... w_1`` for checking ``two_level_decompose``."""
    out = np.eye(dim, dtype=complex)
    for op in ops:
        mat = op.matrix() if isinstance(op, Diagonal) else op.embed(dim)
        out = mat @ out
    return out


# stage 2 -------------------------------------------------------------------


def gray_path(s: int, t: int) -> list[int]:
    """Basis states from s to t flipping one differing bit at a time."""
    path = [s]
    cur = s
    diff = s ^ t
    b = 0
    while diff >> b:
        if (diff >> b) & 1:
            cur ^= 1 << b
            path.append(cur)
        b += 1
    return path


def _zyz(m: np.ndarray) -> tuple[float, float, float, float]:
    """m = exp(i delta) Rz(phi) Ry(theta) Rz(lam); returns (delta, phi, theta, lam)."""
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    delta = cmath.phase(det) / 2
    v = m * cmath.exp(-1j * delta)
    a, b = v[0, 0], v[1, 0]
    theta = 2 * math.atan2(abs(b), abs(a))
    arg_a = cmath.phase(a) if abs(a) > _ZERO else 0.0
    arg_b = cmath.phase(b) if abs(b) > _ZERO else 0.0
    phi = arg_b - arg_a
    lam = -arg_a - arg_b
    return delta, phi, theta, lam


def _single_pattern(axis: str, lo: int, hi: int, theta: float, n: int) -> Multiplexor:
    target = (lo ^ hi).bit_length() - 1
    angles = np.zeros(2 ** (n - 1))
    angles[_pattern(lo, target, n)] = theta
    return Multiplexor(axis, target, angles)


def _adjacent_ops(lo: int, hi: int, m: np.ndarray, n: int) -> list:
    """Circuit-ordered primitives for a two-level unitary on Hamming-adjacent states."""
    delta, phi, theta, lam = _zyz(m)
    out: list = []
    for axis, ang in (("z", lam), ("y", theta), ("z", phi)):
        if abs(ang) > _ANGLE_EPS:
            out.append(_single_pattern(axis, lo, hi, ang, n))
    if abs(delta) > _ANGLE_EPS:
        phases = np.zeros(2**n)
        phases[[lo, hi]] = delta
        out.append(Diagonal(phases))
    return out


def route_two_level(op: TwoLevel, n: int) -> list:
    """Circuit-ordered primitives for ``op`` on any pair of basis states.

    States along the Gray path from ``lo`` are moved next to ``hi`` with
    controlled Ry(pi) swaps, the rotation acts on the adjacent pair, and the
    swaps are undone.
    """
    path = gray_path(op.lo, op.hi)
    if len(path) == 2:
        return _adjacent_ops(op.lo, op.hi, op.m, n)
    swaps = []
    sign = 1.0
    for a, b in zip(path[:-2], path[1:-1]):
        lo, hi = min(a, b), max(a, b)
        # Ry(pi) sends |lo> -> |hi> and |hi> -> -|lo>
        sign *= 1.0 if a == lo else -1.0
        swaps.append(_single_pattern("y", lo, hi, math.pi, n))
    p = path[-2]
    inner = np.array(
        [[op.m[0, 0], sign * op.m[0, 1]], [sign * op.m[1, 0], op.m[1, 1]]], dtype=complex
    )
    if p > op.hi:
        inner = inner[::-1, ::-1]
    core = _adjacent_ops(min(p, op.hi), max(p, op.hi), inner, n)
    undo = [s.dagger() for s in reversed(swaps)]
    return swaps + core + undo


# stage 3 -------------------------------------------------------------------


def _multiplex_gates(mux: Multiplexor, n: int) -> list:
    """Gray-code CX ladder for a uniformly controlled rotation.

    Controls on which the angles do not depend are dropped first, so a
    rotation that depends on k controls costs 2^k CX.
    """
    controls = [q for q in range(n) if q != mux.target]
    angles = np.asarray(mux.angles, dtype=float)
    if np.all(np.abs(angles) <= _ANGLE_EPS):
        return []
    used = []
    arr = angles.reshape((2,) * len(controls))  # axis 0 = last control
    for i, q in enumerate(controls):
        ax = len(controls) - 1 - i
        a0 = np.take(arr, 0, axis=ax)
        a1 = np.take(arr, 1, axis=ax)
        if np.max(np.abs(a0 - a1)) > _ANGLE_EPS:
            used.append(i)
    # angle table over the used controls only
    k = len(used)
    theta = np.zeros(2**k)
    for c in range(2**k):
        full = 0
        for pos, i in enumerate(used):
            if (c >> pos) & 1:
                full |= 1 << i
        theta[c] = angles[full]
    if k == 0:
        return [("rot", mux.axis, mux.target, float(theta[0]))]
    size = 2**k
    gray = [i ^ (i >> 1) for i in range(size)]
    sign = np.array(
        [[(-1) ** bin(c & gray[i]).count("1") for i in range(size)] for c in range(size)]
    )
    alpha = sign.T @ theta / size
    out = []
    for i in range(size):
        out.append(("rot", mux.axis, mux.target, float(alpha[i])))
        flip = (i + 1 & -(i + 1)).bit_length() - 1 if i < size - 1 else k - 1
        out.append(("cx", controls[used[flip]], mux.target))
    return out


def _diagonal_gates(diag: Diagonal, n: int) -> tuple[list, float]:
    """Expand a diagonal into multiplexed Rz's; returns (gates, global phase)."""
    phases = np.asarray(diag.phases, dtype=float)
    out = []
    qubits = list(range(n))
    while qubits:
        q = qubits.pop()  # highest remaining qubit; phases indexed by qubits[:q+1]
        half = phases.reshape(2, -1)  # bit q is the most significant remaining bit
        p0, p1 = half[0], half[1]
        out += _multiplex_gates(Multiplexor("z", q, p1 - p0), q + 1)
        phases = 0.5 * (p0 + p1)
    return out, float(phases[0])


# stage 4 -------------------------------------------------------------------


def _local(op) -> np.ndarray:
    if op[0] == "rot":
        return _rot(op[1], op[3])
    return op[1]


def _peephole(ops: list, n: int) -> tuple[list, complex]:
    """Merge single-qubit runs and cancel adjacent CX pairs in one linear pass."""
    out: list = []
    hist: list[list[int]] = [[] for _ in range(n)]
    phase = 1.0 + 0.0j
    for op in ops:
        if op[0] == "cx":
            _, c, t = op
            if hist[c] and hist[t] and hist[c][-1] == hist[t][-1] and out[hist[c][-1]] == op:
                out[hist[c].pop()] = None
                hist[t].pop()
                continue
            out.append(op)
            hist[c].append(len(out) - 1)
            hist[t].append(len(out) - 1)
            continue
        q = op[2]
        m = _local(op)
        last = hist[q][-1] if hist[q] else -1
        if last >= 0 and out[last][0] == "u":
            merged = m @ out[last][1]
            if abs(merged[0, 1]) < _ZERO and abs(merged[1, 0]) < _ZERO and abs(merged[0, 0] - merged[1, 1]) < _ZERO:
                phase *= merged[0, 0]
                out[last] = None
                hist[q].pop()
            else:
                out[last] = ("u", merged, q)
            continue
        out.append(("u", m, q))
        hist[q].append(len(out) - 1)
    return [op for op in out if op is not None], phase


def _wrap(angle: float) -> tuple[float, complex]:
    """Angle in (-pi, pi] and the phase picked up: Rz(a + 2 pi) = -Rz(a)."""
    k = math.floor((angle + math.pi) / (2 * math.pi))
    wrapped = angle - 2 * math.pi * k
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
        k -= 1
    return wrapped, (-1.0) ** (k % 2)


def synthesize_1q(m: np.ndarray, q: int) -> tuple[list[Gate], complex]:
    """RZ/SX gates (circuit order) and phase p with p * product == m.

    RZ(lam) SX RZ(theta - pi) SX RZ(phi + pi) equals i Rz(phi) Ry(theta) Rz(lam);
    a diagonal m needs one RZ.
    """
    delta, phi, theta, lam = _zyz(m)
    phase = cmath.exp(1j * delta)
    if abs(theta) < _ANGLE_EPS:
        w, sgn = _wrap(phi + lam)
        gates = [Gate.rz(q, w)] if abs(w) >= _ANGLE_EPS else []
        return gates, phase * sgn
    phase *= -1j
    gates = []
    for k, a in enumerate((lam, theta - math.pi, phi + math.pi)):
        if k:
            gates.append(Gate.sx(q))
        w, sgn = _wrap(a)
        phase *= sgn
        if abs(w) >= _ANGLE_EPS:
            gates.append(Gate.rz(q, w))
    return gates, phase


def _emit(ops: list, n: int, phase: complex) -> GateSequence:
    seq = GateSequence(n, global_phase=phase)
    gates = seq.gates
    for op in ops:
        if op[0] == "cx":
            gates.append(Gate.cx(op[1], op[2]))
        else:
            g1, ph = synthesize_1q(op[1], op[2])
            gates.extend(g1)
            seq.global_phase *= ph
    return seq


def _fuse_layers(circuit_ops: list, n: int) -> list:
    """Merge runs of diagonals and of same-target, same-axis multiplexors."""
    fused: list = []
    for op in circuit_ops:
        if isinstance(op, Diagonal) and fused and isinstance(fused[-1], Diagonal):
            fused[-1] = Diagonal(fused[-1].phases + op.phases)
            continue
        if (
            isinstance(op, Multiplexor)
            and fused
            and isinstance(fused[-1], Multiplexor)
            and fused[-1].target == op.target
            and fused[-1].axis == op.axis
        ):
            prev = fused[-1]
            # only fuse when the active control patterns are disjoint
            if not np.any((np.abs(prev.angles) > _ANGLE_EPS) & (np.abs(op.angles) > _ANGLE_EPS)):
                fused[-1] = Multiplexor(op.axis, op.target, prev.angles + op.angles)
                continue
        fused.append(op)
    return fused


def _real_rotation_angle(m: np.ndarray) -> float | None:
    """theta when m == Ry(theta) exactly (the Givens rotations of stage 1)."""
    if np.max(np.abs(m.imag)) > _ZERO:
        return None
    c, s = m[0, 0].real, m[1, 0].real
    if abs(m[1, 1].real - c) > 1e-12 or abs(m[0, 1].real + s) > 1e-12:
        return None
    return 2 * math.atan2(s, c)


def transpile(u: np.ndarray) -> GateSequence:
    """Gate sequence whose reconstruction equals ``u`` (global phase included)."""
    u = _check_unitary(u)
    n = n_qubits_for(u.shape[0])
    ops = two_level_decompose(u)
    # U = w_1^+ ... w_m^+, so the circuit applies w_m^+ first
    primitives: list = []
    for op in reversed(ops):
        d = op.dagger()
        if isinstance(d, Diagonal):
            primitives.append(d)
            continue
        theta = _real_rotation_angle(d.m) if (d.lo ^ d.hi).bit_count() == 1 else None
        if theta is not None:
            primitives.append(_single_pattern("y", d.lo, d.hi, theta, n))
        else:
            primitives.extend(route_two_level(d, n))
    primitives = _fuse_layers(primitives, n)

    flat: list = []
    phase = 1.0 + 0.0j
    for prim in primitives:
        if isinstance(prim, Diagonal):
            g, gp = _diagonal_gates(prim, n)
            flat.extend(g)
            phase *= cmath.exp(1j * gp)
        else:
            flat.extend(_multiplex_gates(prim, n))
    merged, ph = _peephole(flat, n)
    return _emit(merged, n, phase * ph)


def transpile_two_level(op: TwoLevel, n: int) -> GateSequence:
    """Transpile a single two-level unitary through Gray-code routing."""
    flat: list = []
    phase = 1.0 + 0.0j
    for prim in route_two_level(op, n):
        if isinstance(prim, Diagonal):
            g, gp = _diagonal_gates(prim, n)
            flat.extend(g)
            phase *= cmath.exp(1j * gp)
        else:
            flat.extend(_multiplex_gates(prim, n))
    merged, ph = _peephole(flat, n)
    return _emit(merged, n, phase * ph)
