"""Statevector and density-matrix simulation backends.

Both backends store the register as a rank-n (or rank-2n) tensor of
per-qubit axes while gates are applied; qubit q occupies axis n-1-q so a
flattened tensor reads as the usual little-endian basis ordering used by
PauliString.to_dense and GateCircuit.unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .models import LatticeModel
from .pauli import Coefficient, PauliString, PauliSum, chirality
from .synth import Gate, GateCircuit

NOISE_MODES = ("none", "depolarizing", "dephasing")


@dataclass
class NoiseSpec:
    """Per-gate error channel parameters.

    In depolarizing mode every transpiled single-qubit gate is followed by
    a uniform single-qubit depolarizing channel with probability p1 and
    every CNOT by the two-qubit analogue with probability p2.  Dephasing
    mode instead applies a Z-flip channel with probability pz after each
    non-Clifford RZ, leaving all other gates noiseless.
    """

    p1: float = 0.0
    p2: float = 0.0
    pz: float = 0.0
    mode: str = "none"

    def __post_init__(self):
        if self.mode not in NOISE_MODES:
            raise ValueError("unknown noise mode: " + self.mode)
        for v in (self.p1, self.p2, self.pz):
            if not 0.0 <= v <= 1.0:
                raise ValueError("noise probabilities must lie in [0, 1]")

    def is_trivial(self) -> bool:
        if self.mode == "none":
            return True
        if self.mode == "depolarizing":
            return self.p1 == 0.0 and self.p2 == 0.0
        return self.pz == 0.0


class StateVector:
    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if n_qubits > 12:
            raise ValueError("backends are sized for at most 12 qubits")
        amplitudes = np.asarray(amplitudes)
        if amplitudes.shape != (2 ** n_qubits,):
            raise ValueError("amplitude vector has the wrong length")
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes.astype(complex)
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("state is not normalized")

    @classmethod
    def computational(cls, n_qubits: int, basis_index: int = 0):
        amps = np.zeros(2 ** n_qubits, dtype=complex)
        amps[basis_index] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


class DensityMatrix:
    def __init__(self, n_qubits: int, entries: np.ndarray,
                 dtype=np.complex128):
        if n_qubits > 12:
            raise ValueError("backends are sized for at most 12 qubits")
        d = 2 ** n_qubits
        entries = np.asarray(entries, dtype=dtype)
        if entries.shape != (d, d):
            raise ValueError("density matrix has the wrong shape")
        self.n_qubits = n_qubits
        self.entries = entries

    @classmethod
    def from_statevector(cls, psi: StateVector,
                         dtype=np.complex128) -> "DensityMatrix":
        v = psi.amplitudes.astype(dtype)
        return cls(psi.n_qubits, np.outer(v, v.conj()), dtype=dtype)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def check(self, tol: float = 1e-10) -> None:
        if abs(self.trace() - 1.0) > tol:
            raise ValueError("trace drifted from one")
        if np.abs(self.entries - self.entries.conj().T).max() > tol:
            raise ValueError("density matrix is not Hermitian")


# ---------------------------------------------------------------------------
# gate application


def _apply_gate_vec(t: np.ndarray, g: Gate, n: int) -> np.ndarray:
    if g.kind == "CNOT":
        c, q = g.qubits
        ax_c, ax_t = n - 1 - c, n - 1 - q
        t = np.moveaxis(t, (ax_c, ax_t), (0, 1)).copy()
        t[1] = t[1, ::-1]
        return np.moveaxis(t, (0, 1), (ax_c, ax_t))
    m = g.dense1q().astype(t.dtype)
    ax = n - 1 - g.qubits[0]
    t = np.tensordot(m, t, axes=([1], [ax]))
    return np.moveaxis(t, 0, ax)


def _depolarize(t: np.ndarray, qubits, p: float, n: int) -> np.ndarray:
    """Uniform depolarizing channel on a density tensor.

    Uses the closed form (1-d^2 p/(d^2-1)) rho + (d^2 p/(d^2-1)) I/d (x)
    tr_q rho, equivalent to the uniform non-identity Pauli mixture.
    """
    k = len(qubits)
    d2 = 4 ** k
    lam = d2 * p / (d2 - 1.0)
    pairs = [(n - 1 - q, 2 * n - 1 - q) for q in qubits]
    reduced = t
    while pairs:
        r, c = pairs.pop()
        reduced = np.trace(reduced, axis1=r, axis2=c)
        # tracing removed two axes; shift the remaining indices down
        pairs = [(x - (x > r) - (x > c), y - (y > r) - (y > c))
                 for x, y in pairs]
    out = (1.0 - lam) * t
    eye = np.eye(2, dtype=t.dtype) / 2.0
    piece = reduced
    for _ in qubits:
        piece = np.tensordot(eye, piece, axes=0)
    # piece axes: (r1,c1,...,rk,ck, rest...); route them home
    src = list(range(2 * len(qubits)))
    dst = []
    for q in qubits:
        dst.append(n - 1 - q)
        dst.append(2 * n - 1 - q)
    piece = np.moveaxis(piece, src, dst)
    out += lam * piece
    return out


def _dephase(t: np.ndarray, qubit: int, p: float, n: int) -> np.ndarray:
    ax_r, ax_c = n - 1 - qubit, 2 * n - 1 - qubit
    out = t.copy()
    sl_r = [slice(None)] * (2 * n)
    sl_r[ax_r] = 1
    sl_r[ax_c] = 0
    sl_c = [slice(None)] * (2 * n)
    sl_c[ax_r] = 0
    sl_c[ax_c] = 1
    out[tuple(sl_r)] *= 1.0 - 2.0 * p
    out[tuple(sl_c)] *= 1.0 - 2.0 * p
    return out


_CLIFFORD_QUANTUM = math.pi / 2


def _is_clifford_rz(angle: float) -> bool:
    r = angle / _CLIFFORD_QUANTUM
    return abs(r - round(r)) < 1e-9


def _density_gate(t: np.ndarray, g: Gate, n: int,
                  noise: NoiseSpec) -> np.ndarray:
    t = _apply_gate_vec(t, g, n)
    # column side: same qubit labels, addressed as the upper n wires
    if g.kind == "CNOT":
        cg = g
    else:
        cg = Gate("U1Q", g.qubits, matrix=g.dense1q().conj())
    t = _apply_gate_vec(t, cg, 2 * n)
    if noise.mode == "depolarizing":
        if g.kind == "CNOT":
            if noise.p2:
                t = _depolarize(t, g.qubits, noise.p2, n)
        elif noise.p1:
            t = _depolarize(t, g.qubits, noise.p1, n)
    elif noise.mode == "dephasing":
        if g.kind == "RZ" and not _is_clifford_rz(g.angle) and noise.pz:
            t = _dephase(t, g.qubits[0], noise.pz, n)
    return t


def apply_circuit(state: Union[StateVector, DensityMatrix], c: GateCircuit,
                  noise: Optional[NoiseSpec] = None
                  ) -> Union[StateVector, DensityMatrix]:
    noise = noise or NoiseSpec()
    if isinstance(state, StateVector):
        if not noise.is_trivial():
            raise ValueError("noisy simulation needs a DensityMatrix")
        if c.n_qubits != state.n_qubits:
            raise ValueError("qubit count mismatch")
        n = state.n_qubits
        t = state.amplitudes.reshape([2] * n)
        for g in c.gates:
            t = _apply_gate_vec(t, g, n)
        amps = t.reshape(-1) * c.phase
        # gates are unitary; the norm drifts only by accumulated roundoff
        return StateVector(n, amps / np.linalg.norm(amps))
    if c.n_qubits != state.n_qubits:
        raise ValueError("qubit count mismatch")
    n = state.n_qubits
    t = state.entries.reshape([2] * (2 * n))
    for g in c.gates:
        t = _density_gate(t, g, n, noise)
    return DensityMatrix(n, t.reshape(2 ** n, 2 ** n),
                         dtype=state.entries.dtype)


def channel_matrix(c: GateCircuit, noise: Optional[NoiseSpec] = None
                   ) -> np.ndarray:
    """Superoperator of a small circuit with its interleaved noise.

    Returns the 4^k x 4^k matrix acting on row-major-flattened k-qubit
    density matrices.  The global circuit phase cancels between the two
    sides of U rho U+, so it never enters.
    """
    noise = noise or NoiseSpec()
    k = c.n_qubits
    if k > 3:
        raise ValueError("channel_matrix is sized for at most 3 qubits")
    d = 2 ** k
    s = np.zeros((d * d, d * d), dtype=complex)
    for col in range(d * d):
        e = np.zeros((d, d), dtype=complex)
        e[col // d, col % d] = 1.0
        t = e.reshape([2] * (2 * k))
        for g in c.gates:
            t = _density_gate(t, g, k, noise)
        s[:, col] = t.reshape(-1)
    return s


def apply_channel(state: DensityMatrix, s: np.ndarray,
                  sites: Tuple[int, ...]) -> DensityMatrix:
    """Apply a channel_matrix superoperator to a subset of sites.

    One contraction per block instead of one per gate: this is what makes
    deep noisy sweeps affordable on the 12-qubit density backend.
    """
    n = state.n_qubits
    k = len(sites)
    if s.shape != (4 ** k, 4 ** k):
        raise ValueError("superoperator size does not match site count")
    t = state.entries.reshape([2] * (2 * n))
    # tensor axes of the block, in the same bit order channel_matrix used
    axes = ([n - 1 - q for q in reversed(sites)]
            + [2 * n - 1 - q for q in reversed(sites)])
    sm = s.astype(t.dtype).reshape([2] * (4 * k))
    t = np.tensordot(sm, t, axes=(list(range(2 * k, 4 * k)), axes))
    t = np.moveaxis(t, list(range(2 * k)), axes)
    return DensityMatrix(n, t.reshape(2 ** n, 2 ** n),
                         dtype=state.entries.dtype)


# ---------------------------------------------------------------------------
# Pauli action, observables


def _term_phases(p: PauliString, n: int) -> np.ndarray:
    """Column phases: P|i> = phase(i) |i ^ x_mask>.

    The stored string is i^{phase_exp} (x) letters; writing the letters in
    X^x Z^z form adds a factor i per Y site.
    """
    idx = np.arange(2 ** n, dtype=np.uint64)
    par = np.bitwise_count(idx & np.uint64(p.z_mask)) & 1
    y_count = int(p.x_mask & p.z_mask).bit_count()
    return (1j ** ((p.phase_exp + y_count) % 4)) * np.where(par, -1.0, 1.0)


def apply_pauli_sum(h: PauliSum, amps: np.ndarray,
                    couplings: Optional[dict] = None) -> np.ndarray:
    n = h.n_sites
    out = np.zeros_like(amps, dtype=complex)
    idx = np.arange(2 ** n, dtype=np.uint64)
    for p, coef in h.terms.items():
        w = coef.evaluate(couplings or {})
        if w == 0:
            continue
        out[idx ^ np.uint64(p.x_mask)] += w * _term_phases(p, n) * amps
    return out


def expectation(state: Union[StateVector, DensityMatrix], o: PauliSum,
                couplings: Optional[dict] = None) -> float:
    if isinstance(state, StateVector):
        v = apply_pauli_sum(o, state.amplitudes, couplings)
        val = np.vdot(state.amplitudes, v)
    else:
        n = state.n_qubits
        val = 0.0 + 0.0j
        idx = np.arange(2 ** n, dtype=np.uint64)
        for p, coef in o.terms.items():
            w = coef.evaluate(couplings or {})
            if w == 0:
                continue
            rows = (idx ^ np.uint64(p.x_mask)).astype(np.intp)
            val += w * np.sum(_term_phases(p, n)
                              * state.entries[idx.astype(np.intp), rows])
    if abs(val.imag) > 1e-8:
        raise ValueError("expectation of a non-Hermitian observable")
    return float(val.real)


def fidelity(rho: Union[StateVector, DensityMatrix],
             psi_ideal: StateVector) -> float:
    """Uhlmann fidelity against a pure reference, F = <psi|rho|psi>."""
    if isinstance(rho, StateVector):
        return float(abs(rho.overlap(psi_ideal)) ** 2)
    v = psi_ideal.amplitudes.astype(rho.entries.dtype)
    return float(np.real(np.vdot(v, rho.entries @ v)))


def total_spin_ops(n: int):
    """The three global spin components sum_i sigma_a(i) / 2."""
    out = []
    for axis in "XYZ":
        h = PauliSum(n)
        for s in range(n):
            h.add_term(PauliString.from_letters(axis, n, (s,)),
                       Coefficient.number(Fraction(1, 2)))
        out.append(h)
    return out


def chirality_observable(model: LatticeModel) -> PauliSum:
    """Ring-averaged spin chirality, (1/6) sum over the six triangles."""
    if model.name != "kagome-ring-12":
        raise ValueError("chirality observable is defined for kagome-ring-12")
    o = PauliSum(12)
    for j in range(6):
        a, b, c = 2 * j, 2 * j + 1, (2 * j + 2) % 12
        o = o + chirality(b, a, c, 12, Coefficient.number(Fraction(1, 6)))
    return o


def initial_state_kagome(n: int = 12) -> StateVector:
    """Product state with per-site phases 2(k-1)pi/3, k = 1..n."""
    amps = np.ones(1, dtype=complex)
    for k in range(n):
        site = np.array([1.0, np.exp(2j * k * math.pi / 3)]) / math.sqrt(2)
        amps = np.kron(site, amps)  # site k is bit k (little-endian)
    return StateVector(n, amps)


def kagome_prep_circuit(n: int = 12) -> GateCircuit:
    c = GateCircuit(n)
    for k in range(n):
        c.append(Gate("HADAMARD", (k,)))
        angle = 2.0 * k * math.pi / 3.0
        if angle:
            c.append(Gate("RZ", (k,), angle=angle))
        c.phase *= np.exp(1j * angle / 2.0)
    return c


# ---------------------------------------------------------------------------
# exact propagation


def sparse_hamiltonian(h: PauliSum,
                       couplings: Optional[dict] = None) -> sp.csr_matrix:
    n = h.n_sites
    dim = 2 ** n
    idx = np.arange(dim, dtype=np.uint64)
    rows, cols, data = [], [], []
    for p, coef in h.terms.items():
        w = coef.evaluate(couplings or {})
        if w == 0:
            continue
        rows.append((idx ^ np.uint64(p.x_mask)).astype(np.intp))
        cols.append(idx.astype(np.intp))
        data.append(w * _term_phases(p, n))
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=complex)
    m = sp.coo_matrix((np.concatenate(data),
                       (np.concatenate(rows), np.concatenate(cols))),
                      shape=(dim, dim)).tocsr()
    return m


def _lanczos_step(a: sp.csr_matrix, v: np.ndarray, dt: float,
                  m: int = 30) -> np.ndarray:
    dim = v.shape[0]
    m = min(m, dim)
    basis = np.zeros((m, dim), dtype=complex)
    alphas = np.zeros(m)
    betas = np.zeros(max(m - 1, 0))
    basis[0] = v
    w = a @ basis[0]
    alphas[0] = np.real(np.vdot(basis[0], w))
    w = w - alphas[0] * basis[0]
    k = 1
    for j in range(1, m):
        b = np.linalg.norm(w)
        if b < 1e-14:
            break
        betas[j - 1] = b
        basis[j] = w / b
        w = a @ basis[j]
        w = w - betas[j - 1] * basis[j - 1]
        alphas[j] = np.real(np.vdot(basis[j], w))
        w = w - alphas[j] * basis[j]
        # full reorthogonalization keeps the subspace numerically exact
        w = w - basis[:j + 1].conj() @ w @ basis[:j + 1]
        k = j + 1
    tri = np.diag(alphas[:k]) + np.diag(betas[:k - 1], 1) \
        + np.diag(betas[:k - 1], -1)
    ew, ev = np.linalg.eigh(tri)
    small = ev @ (np.exp(-1j * dt * ew) * ev[0].conj())
    return basis[:k].T @ small


def exact_evolve(h: PauliSum, t: float, psi: StateVector,
                 couplings: Optional[dict] = None) -> StateVector:
    """exp(-iHt)|psi> by Krylov propagation with adaptive substepping."""
    a = sparse_hamiltonian(h, couplings)
    herm_gap = abs(a - a.conj().T)
    if herm_gap.count_nonzero() and herm_gap.max() > 1e-10:
        raise ValueError("Hamiltonian is not Hermitian")
    if t == 0:
        return psi.copy()

    def run(steps: int) -> np.ndarray:
        v = psi.amplitudes.copy()
        dt = t / steps
        for _ in range(steps):
            v = _lanczos_step(a, v, dt)
            v = v / np.linalg.norm(v)
        return v

    steps = 1
    prev = run(steps)
    while True:
        steps *= 2
        cur = run(steps)
        if np.linalg.norm(cur - prev) <= 1e-11 or steps >= 1 << 12:
            return StateVector(psi.n_qubits, cur / np.linalg.norm(cur))
        prev = cur
