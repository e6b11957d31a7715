"""Gate-level synthesis: Pauli rotations, two-qubit KAK, encoded triangle
blocks, edge/chirality gadgets, transpilation to {RZ, sqrt(X), CNOT}, and
gate counting."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .pauli import PauliString, PauliSum
from .encoder import CliffordCircuit, canonical_encoder, extract_effective
from .symmetry import classify

_TOL = 1e-9

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)


def _rz(t: float) -> np.ndarray:
    return np.array([[cmath.exp(-0.5j * t), 0], [0, cmath.exp(0.5j * t)]])


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    kind is one of RZ, SQRT_X, HADAMARD, CNOT, U1Q.  For CNOT the qubit
    tuple is (control, target).  U1Q carries an explicit 2x2 matrix and
    only exists before transpilation.
    """

    kind: str
    qubits: Tuple[int, ...]
    angle: Optional[float] = None
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "CNOT":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError("CNOT needs two distinct qubits")
        elif len(self.qubits) != 1:
            raise ValueError("single-qubit gate needs one qubit")
        if self.kind == "RZ" and self.angle is None:
            raise ValueError("RZ needs an angle")
        if self.kind == "U1Q" and self.matrix is None:
            raise ValueError("U1Q needs a matrix")

    def dense1q(self) -> np.ndarray:
        if self.kind == "RZ":
            return _rz(self.angle)
        if self.kind == "SQRT_X":
            return _SX
        if self.kind == "HADAMARD":
            return _H
        if self.kind == "U1Q":
            return self.matrix
        raise ValueError(self.kind)


@dataclass
class GateCounts:
    cnot: int = 0
    rz_nonclifford: int = 0
    rz_clifford: int = 0
    sqrtx: int = 0


class GateCircuit:
    """Ordered gate list on n_qubits wires.

    The first gate in the list acts first.  A tracked global phase makes
    unitary() exact; the phase is bookkeeping only and is never realized
    by hardware gates.
    """

    def __init__(self, n_qubits: int, gates: Optional[Sequence[Gate]] = None,
                 phase: complex = 1.0):
        self.n_qubits = n_qubits
        self.gates: List[Gate] = list(gates) if gates else []
        self.phase = phase
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        for q in g.qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError("qubit index out of range")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, gates: Sequence[Gate]) -> None:
        for g in gates:
            self.append(g)

    def unitary(self) -> np.ndarray:
        """Dense matrix, qubit 0 the least significant bit."""
        n = self.n_qubits
        u = np.eye(2 ** n, dtype=complex) * self.phase
        u = u.reshape([2] * (2 * n))
        for g in self.gates:
            u = _apply_gate_tensor(u, g, n)
        return u.reshape(2 ** n, 2 ** n)

    def to_text(self) -> str:
        lines = []
        for g in self.gates:
            if g.kind == "CNOT":
                lines.append("CNOT %d %d" % g.qubits)
            elif g.kind == "RZ":
                lines.append("RZ %d %r" % (g.qubits[0], g.angle))
            elif g.kind in ("SQRT_X", "HADAMARD"):
                lines.append("%s %d" % (g.kind, g.qubits[0]))
            else:
                raise ValueError("transpile before dumping U1Q gates")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, n_qubits: int) -> "GateCircuit":
        c = cls(n_qubits)
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "CNOT":
                c.append(Gate("CNOT", (int(parts[1]), int(parts[2]))))
            elif parts[0] == "RZ":
                c.append(Gate("RZ", (int(parts[1]),), angle=float(parts[2])))
            elif parts[0] in ("SQRT_X", "HADAMARD"):
                c.append(Gate(parts[0], (int(parts[1]),)))
            else:
                raise ValueError("bad gate line: " + line)
        return c


def _apply_gate_tensor(u, g: Gate, n: int):
    # u has 2n axes; row axis for qubit q is n-1-q.
    if g.kind == "CNOT":
        c, t = g.qubits
        ax_c, ax_t = n - 1 - c, n - 1 - t
        u = np.moveaxis(u, (ax_c, ax_t), (0, 1))
        u = u.copy()
        u[1] = u[1, ::-1]
        return np.moveaxis(u, (0, 1), (ax_c, ax_t))
    m = g.dense1q()
    ax = n - 1 - g.qubits[0]
    u = np.tensordot(m, u, axes=([1], [ax]))
    return np.moveaxis(u, 0, ax)


# ---------------------------------------------------------------------------
# Pauli rotations


def pauli_rotation(p: PauliString, theta: float) -> GateCircuit:
    """Circuit for exp(-i theta p), p a Hermitian non-identity string.

    Uses 2(w-1) CNOTs for weight w, a chain ladder, and one RZ(2 theta).
    """
    if p.phase_exp % 2:
        raise ValueError("string must be Hermitian")
    sign = -1 if p.phase_exp == 2 else 1
    sup = list(p.support)
    if not sup:
        raise ValueError("identity string has no rotation circuit")
    c = GateCircuit(p.n_sites)
    pre: List[Gate] = []
    for q in sup:
        letter = p.letter_at(q)
        if letter == "X":
            pre.append(Gate("HADAMARD", (q,)))
        elif letter == "Y":
            pre.append(Gate("RZ", (q,), angle=-math.pi / 2))
            pre.append(Gate("HADAMARD", (q,)))
    ladder = [Gate("CNOT", (sup[i], sup[i + 1])) for i in range(len(sup) - 1)]
    c.extend(pre)
    c.extend(ladder)
    c.append(Gate("RZ", (sup[-1],), angle=2 * theta * sign))
    c.extend(reversed(ladder))
    for g in reversed(pre):
        if g.kind == "RZ":
            c.append(Gate("RZ", g.qubits, angle=-g.angle))
        else:
            c.append(g)
    return c


# ---------------------------------------------------------------------------
# Two-qubit KAK decomposition (magic basis)

_MAGIC = np.array(
    [[1, 0, 0, 1j],
     [0, 1j, 1, 0],
     [0, 1j, -1, 0],
     [1, 0, 0, -1j]], dtype=complex) / math.sqrt(2)

_XX = np.kron(_X, _X)
_YY = np.kron(_Y, _Y)
_ZZ = np.kron(_Z, _Z)
_SIGMA = (_X, _Y, _Z)


def _interaction(coords) -> np.ndarray:
    h = coords[0] * _XX + coords[1] * _YY + coords[2] * _ZZ
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def _simultaneous_real_diag(p: np.ndarray):
    """Real orthogonal Q and complex eigenvalues of a unitary symmetric p."""
    re, im = p.real, p.imag
    w, q = np.linalg.eigh(re)
    # refine within degenerate blocks of the real part
    i = 0
    while i < 4:
        j = i + 1
        while j < 4 and abs(w[j] - w[i]) < 1e-7:
            j += 1
        if j - i > 1:
            blk = q[:, i:j]
            sub = blk.T @ im @ blk
            _, r = np.linalg.eigh(0.5 * (sub + sub.T))
            q[:, i:j] = blk @ r
        i = j
    vals = np.array([q[:, k] @ p @ q[:, k] for k in range(4)])
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q, vals


def _kron_factor(u: np.ndarray):
    """Split u ~ phase * kron(a1, a0); qubit 0 is the least significant."""
    t = u.reshape(2, 2, 2, 2)
    idx = np.unravel_index(np.argmax(np.abs(t)), t.shape)
    i0, k0, j0, l0 = idx
    a1 = t[:, k0, :, l0].copy()
    a0 = t[i0, :, j0, :].copy()
    a0 = a0 / a1[i0, j0]
    # normalize determinants to 1 and pull out the phase
    d1 = np.linalg.det(a1)
    a1 = a1 / cmath.sqrt(d1)
    d0 = np.linalg.det(a0)
    a0 = a0 / cmath.sqrt(d0)
    rebuilt = np.kron(a1, a0)
    ref = rebuilt.flat[np.argmax(np.abs(rebuilt))]
    phase = u.flat[np.argmax(np.abs(rebuilt))] / ref
    if np.abs(u - phase * rebuilt).max() > 1e-8:
        raise ValueError("matrix does not factor into a tensor product")
    return phase, a1, a0


_THETA_BASIS = None


def _theta_basis():
    global _THETA_BASIS
    if _THETA_BASIS is None:
        md = _MAGIC.conj().T
        cols = [np.diagonal(md @ m @ _MAGIC).real for m in (_XX, _YY, _ZZ)]
        cols.append(np.ones(4))
        _THETA_BASIS = np.array(cols).T
    return _THETA_BASIS


def kak_decompose(u: np.ndarray):
    """Return (phase, a1, a0, coords, b1, b0) with

        u = phase * kron(a1,a0) @ exp(i sum_k coords[k] S_k x S_k) @ kron(b1,b0)

    and coords canonical: pi/4 >= x >= y >= |z|, z >= 0 when x = pi/4.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4) or np.abs(u @ u.conj().T - np.eye(4)).max() > 1e-10:
        raise ValueError("input is not a 4x4 unitary")
    det = np.linalg.det(u)
    alpha = det ** 0.25
    u4 = u / alpha
    v = _MAGIC.conj().T @ u4 @ _MAGIC
    p = v.T @ v
    q, vals = _simultaneous_real_diag(p)
    theta = 0.5 * np.angle(vals)
    d = np.exp(1j * theta)
    if np.prod(d).real < 0:
        theta[0] += math.pi
        d[0] = -d[0]
    o1 = v @ q @ np.diag(1.0 / d)
    if np.abs(o1.imag).max() > 1e-7:
        raise ValueError("KAK orthogonal factor not real")
    o1 = o1.real
    sol, *_ = np.linalg.lstsq(_theta_basis(), theta, rcond=None)
    coords = list(sol[:3])
    g0 = sol[3]
    k1 = _MAGIC @ o1.astype(complex) @ _MAGIC.conj().T
    k2 = _MAGIC @ q.T.astype(complex) @ _MAGIC.conj().T
    ph1, a1, a0 = _kron_factor(k1)
    ph2, b1, b0 = _kron_factor(k2)
    phase = alpha * cmath.exp(1j * g0) * ph1 * ph2
    phase, a1, a0, coords, b1, b0 = _canonicalize(
        phase, a1, a0, coords, b1, b0)
    return phase, a1, a0, tuple(coords), b1, b0


def _canonicalize(phase, a1, a0, coords, b1, b0):
    coords = list(coords)

    def shift(k, m):
        # exp(icSS) = exp(i(c - m pi/2)SS) * (i S x S)^m
        nonlocal phase, b1, b0
        coords[k] -= m * math.pi / 2
        s = _SIGMA[k]
        for _ in range(m % 4):
            b1 = s @ b1
            b0 = s @ b0
            phase *= 1j

    def negate(k1, k2):
        nonlocal a1, b1
        k3 = 3 - k1 - k2
        s = _SIGMA[k3]
        a1 = a1 @ s
        b1 = s @ b1
        coords[k1] = -coords[k1]
        coords[k2] = -coords[k2]

    def swap(k1, k2):
        nonlocal a1, a0, b1, b0
        s = (_SIGMA[k1] + _SIGMA[k2]) / math.sqrt(2)
        a1 = a1 @ s
        a0 = a0 @ s
        b1 = s @ b1
        b0 = s @ b0
        coords[k1], coords[k2] = coords[k2], coords[k1]

    for k in range(3):
        m = int(math.floor((coords[k] + math.pi / 4) / (math.pi / 2)))
        if m:
            shift(k, m)
    if abs(coords[0]) < abs(coords[1]):
        swap(0, 1)
    if abs(coords[1]) < abs(coords[2]):
        swap(1, 2)
    if abs(coords[0]) < abs(coords[1]):
        swap(0, 1)
    if coords[0] < -_TOL:
        if coords[1] < -_TOL:
            negate(0, 1)
        else:
            negate(0, 2)
    if coords[1] < -_TOL:
        negate(1, 2)
    if coords[0] > math.pi / 4 - _TOL and coords[2] < -_TOL:
        negate(0, 2)
        shift(0, -1)
    return phase, a1, a0, coords, b1, b0


def cnot_class(coords, tol: float = 1e-8) -> int:
    x, y, z = coords
    if abs(x) < tol and abs(y) < tol and abs(z) < tol:
        return 0
    if abs(x - math.pi / 4) < tol and abs(y) < tol and abs(z) < tol:
        return 1
    if abs(z) < tol:
        return 2
    return 3


def _template(coords) -> GateCircuit:
    x, y, z = coords
    k = cnot_class(coords)
    c = GateCircuit(2)
    if k == 1:
        c.append(Gate("CNOT", (0, 1)))
    elif k == 2:
        c.append(Gate("CNOT", (0, 1)))
        c.append(Gate("U1Q", (0,), matrix=_rx(-2 * x)))
        c.append(Gate("RZ", (1,), angle=-2 * y))
        c.append(Gate("CNOT", (0, 1)))
    elif k == 3:
        # Vatan-Williams three-CNOT form; interaction content (x, y, z)
        c.append(Gate("CNOT", (1, 0)))
        c.append(Gate("RZ", (0,), angle=2 * z + math.pi / 2))
        c.append(Gate("U1Q", (1,), matrix=_ry(2 * x + math.pi / 2)))
        c.append(Gate("CNOT", (0, 1)))
        c.append(Gate("U1Q", (1,), matrix=_ry(2 * y + math.pi / 2)))
        c.append(Gate("CNOT", (1, 0)))
    return c


def kak_su4(u: np.ndarray) -> GateCircuit:
    """Synthesize a 4x4 unitary with at most three CNOTs.

    CNOT count is 0/1/2/3 exactly by the degeneracy pattern of the
    canonical interaction coordinates.
    """
    phase, a1, a0, coords, b1, b0 = kak_decompose(u)
    k = cnot_class(coords)
    out = GateCircuit(2)
    if k == 0:
        out.append(Gate("U1Q", (0,), matrix=a0 @ b0))
        out.append(Gate("U1Q", (1,), matrix=a1 @ b1))
        out.phase = phase
    else:
        tmpl = _template(coords)
        pe, ae1, ae0, ce, be1, be0 = kak_decompose(tmpl.unitary())
        if max(abs(ce[i] - coords[i]) for i in range(3)) > 1e-8:
            raise AssertionError("template interaction mismatch")
        out.append(Gate("U1Q", (0,), matrix=be0.conj().T @ b0))
        out.append(Gate("U1Q", (1,), matrix=be1.conj().T @ b1))
        out.extend(tmpl.gates)
        out.append(Gate("U1Q", (0,), matrix=a0 @ ae0.conj().T))
        out.append(Gate("U1Q", (1,), matrix=a1 @ ae1.conj().T))
        out.phase = phase / pe
    if np.abs(out.unitary() - u).max() > 1e-8:
        raise AssertionError("KAK reconstruction failed")
    return out


# ---------------------------------------------------------------------------
# Encoded triangle blocks

_CLIFF_1Q = {
    "HADAMARD": _H,
    "SQRT_X": _SX,
    "SQRT_Y": 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]]),
    "SQRT_Z": np.diag([1, 1j]).astype(complex),
}


def _clifford_gates(circ: CliffordCircuit, offset: int = 0) -> List[Gate]:
    out = []
    for name, *qs in circ.gates:
        if name == "CNOT":
            out.append(Gate("CNOT", (qs[0] + offset, qs[1] + offset)))
        elif name == "SQRT_Z":
            out.append(Gate("RZ", (qs[0] + offset,), angle=math.pi / 2))
        elif name == "HADAMARD":
            out.append(Gate("HADAMARD", (qs[0] + offset,)))
        elif name == "SQRT_X":
            out.append(Gate("SQRT_X", (qs[0] + offset,)))
        else:
            out.append(Gate("U1Q", (qs[0] + offset,), matrix=_CLIFF_1Q[name]))
    return out


def triangle_block(h: PauliSum, tau: float,
                   encoder: Optional[CliffordCircuit] = None) -> GateCircuit:
    """Exact circuit for exp(-i h tau) on a three-site cluster.

    The Hamiltonian is conjugated by a symmetry encoder so the propagator
    factorizes into a one-qubit rotation and one SU(4) block; total CNOT
    budget is 3 + 3 + 3.
    """
    if h.n_sites != 3:
        raise ValueError("triangle blocks act on exactly three sites")
    if encoder is None:
        ls = sorted(classify(h, (0, 1, 2)))
        if not ls:
            raise ValueError("Hamiltonian is not confined to a single class")
        encoder = canonical_encoder(ls[0])
    g_eff, h_eff = extract_effective(h, encoder, 0)
    out = GateCircuit(3)
    out.extend(_clifford_gates(encoder))
    gm = _embedded_dense(g_eff, (0,), 1)
    w, v = np.linalg.eigh(gm)
    um = (v * np.exp(-1j * tau * w)) @ v.conj().T
    if np.abs(um - np.eye(2) * um[0, 0]).max() > 1e-14:
        out.append(Gate("U1Q", (0,), matrix=um))
    else:
        out.phase *= um[0, 0]
    hm = _embedded_dense(h_eff, (1, 2), 2)
    w, v = np.linalg.eigh(hm)
    kak = kak_su4((v * np.exp(-1j * tau * w)) @ v.conj().T)
    for g in kak.gates:
        out.append(Gate(g.kind, tuple(q + 1 for q in g.qubits),
                        angle=g.angle, matrix=g.matrix))
    out.phase *= kak.phase
    out.extend(_clifford_gates(encoder.inverse()))
    return out


def _embedded_dense(s: PauliSum, wires: Tuple[int, ...], nq: int) -> np.ndarray:
    """Dense matrix of a sum supported on the given wires, relabelled 0..nq-1."""
    remap = {w: i for i, w in enumerate(wires)}
    out = np.zeros((2 ** nq, 2 ** nq), dtype=complex)
    for p, coef in s.terms.items():
        sup = list(p.support)
        if any(q not in remap for q in sup):
            raise ValueError("term leaves the designated wires")
        q = PauliString.from_letters(
            "".join(p.letter_at(w) for w in sup), nq,
            tuple(remap[w] for w in sup))
        out += complex(coef.constant_value()) * q.to_dense()
    return out


# ---------------------------------------------------------------------------
# Conventional gadgets


def heisenberg_edge_block(phi: float) -> GateCircuit:
    """exp(-i phi (XX + YY + ZZ)) on two qubits via KAK."""
    h = _XX + _YY + _ZZ
    w, v = np.linalg.eigh(h)
    return kak_su4((v * np.exp(-1j * phi * w)) @ v.conj().T)


def chirality_gadget(phi: float) -> GateCircuit:
    """exp(-i phi (Z0 X1 Y2 - Z0 Y1 X2)) with six CNOTs.

    The two component strings commute, so both rotations ride a shared
    CNOT ladder conjugation.
    """
    c = GateCircuit(3)
    pre = [
        Gate("HADAMARD", (1,)),
        Gate("RZ", (2,), angle=-math.pi / 2),
        Gate("HADAMARD", (2,)),
        Gate("CNOT", (0, 1)),
        Gate("CNOT", (1, 2)),
    ]
    c.extend(pre)
    # ZXY has become Z2, ZYX has become X1 Z2
    c.append(Gate("RZ", (2,), angle=2 * phi))
    c.append(Gate("HADAMARD", (1,)))
    c.append(Gate("CNOT", (1, 2)))
    c.append(Gate("RZ", (2,), angle=-2 * phi))
    c.append(Gate("CNOT", (1, 2)))
    c.append(Gate("HADAMARD", (1,)))
    for g in reversed(pre):
        if g.kind == "RZ":
            c.append(Gate("RZ", g.qubits, angle=-g.angle))
        else:
            c.append(g)
    return c


# ---------------------------------------------------------------------------
# Transpilation and counting


def _euler_zxzxz(u: np.ndarray, qubit: int) -> Tuple[List[Gate], complex]:
    """Rewrite a 2x2 unitary as RZ sqrtX RZ sqrtX RZ, returning the phase."""
    det = np.linalg.det(u)
    su = u / cmath.sqrt(det)
    # ZYZ Euler angles of su = RZ(al) RY(be) RZ(ga)
    be = 2 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[0, 0]) > 1e-12 and abs(su[1, 0]) > 1e-12:
        al = cmath.phase(su[1, 1]) + cmath.phase(su[1, 0])
        ga = cmath.phase(su[1, 1]) - cmath.phase(su[1, 0])
    elif abs(su[0, 0]) > 1e-12:
        al = 2 * cmath.phase(su[1, 1])
        ga = 0.0
    else:
        al = 2 * cmath.phase(su[1, 0])
        ga = 0.0
    angles = (al, math.pi - be, ga - math.pi)
    gates = [Gate("RZ", (qubit,), angle=angles[2]),
             Gate("SQRT_X", (qubit,)),
             Gate("RZ", (qubit,), angle=angles[1]),
             Gate("SQRT_X", (qubit,)),
             Gate("RZ", (qubit,), angle=angles[0])]
    rebuilt = _rz(angles[0]) @ _SX @ _rz(angles[1]) @ _SX @ _rz(angles[2])
    ref = int(np.argmax(np.abs(rebuilt)))
    phase = u.flat[ref] / rebuilt.flat[ref]
    if np.abs(u - phase * rebuilt).max() > 1e-10:
        raise AssertionError("Euler rewrite failed")
    return gates, phase


def _normalize_angle(a: float) -> float:
    a = math.fmod(a, 2 * math.pi)
    if a > math.pi:
        a -= 2 * math.pi
    elif a <= -math.pi:
        a += 2 * math.pi
    return a


def _is_clifford_angle(a: float) -> bool:
    r = math.fmod(abs(a), math.pi / 2)
    return min(r, math.pi / 2 - r) < 1e-12


def transpile(c: GateCircuit) -> GateCircuit:
    """Rewrite into the {RZ, sqrtX, CNOT} basis with local simplification.

    Runs of single-qubit gates merge into one matrix and re-emerge as a
    minimal RZ / sqrtX pattern; back-to-back identical CNOTs cancel.
    Action is preserved exactly (tracked global phase included).
    """
    n = c.n_qubits
    pend: List[Optional[np.ndarray]] = [None] * n
    out = GateCircuit(n, phase=c.phase)

    def flush(q: int) -> None:
        m = pend[q]
        pend[q] = None
        if m is None:
            return
        if np.abs(m - np.eye(2) * m[0, 0]).max() < 1e-12:
            out.phase *= m[0, 0]
            return
        if abs(m[0, 1]) < 1e-12 and abs(m[1, 0]) < 1e-12:
            ang = _normalize_angle(cmath.phase(m[1, 1]) - cmath.phase(m[0, 0]))
            out.phase *= m[0, 0] * cmath.exp(0.5j * ang)
            out.append(Gate("RZ", (q,), angle=ang))
            return
        ph = m[0, 0] / _SX[0, 0]
        if np.abs(m - ph * _SX).max() < 1e-12:
            out.phase *= ph
            out.append(Gate("SQRT_X", (q,)))
            return
        gates, ph = _euler_zxzxz(m, q)
        out.phase *= ph
        for g in gates:
            if g.kind == "RZ":
                a = _normalize_angle(g.angle)
                # RZ(a + 2 pi k) = (-1)^k RZ(a)
                k = round((g.angle - a) / (2 * math.pi))
                if k % 2:
                    out.phase *= -1
                if abs(a) < 1e-12:
                    continue
                out.append(Gate("RZ", (q,), angle=a))
            else:
                out.append(g)

    for g in c.gates:
        if g.kind == "CNOT":
            flush(g.qubits[0])
            flush(g.qubits[1])
            if out.gates and out.gates[-1].kind == "CNOT" \
                    and out.gates[-1].qubits == g.qubits:
                out.gates.pop()
            else:
                out.append(g)
        else:
            m = g.dense1q()
            q = g.qubits[0]
            pend[q] = m if pend[q] is None else m @ pend[q]
    for q in range(n):
        flush(q)
    return out


def count_gates(c: GateCircuit) -> GateCounts:
    counts = GateCounts()
    for g in c.gates:
        if g.kind == "CNOT":
            counts.cnot += 1
        elif g.kind == "SQRT_X":
            counts.sqrtx += 1
        elif g.kind == "RZ":
            if _is_clifford_angle(g.angle):
                counts.rz_clifford += 1
            else:
                counts.rz_nonclifford += 1
        elif g.kind == "HADAMARD":
            counts.sqrtx += 1
        else:
            raise ValueError("count_gates expects a transpiled circuit")
    return counts
