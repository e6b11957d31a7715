"""Statevector / density-matrix backends and the exact-evolution oracle."""

import numpy as np
import pytest
import scipy.linalg as sla

from su2trotter.models import build_model
from su2trotter.pauli import (Coefficient, PauliString, PauliSum, chirality,
                              heisenberg_edge, to_dense)
from su2trotter.sim import (DensityMatrix, NoiseSpec, StateVector,
                            apply_channel, apply_circuit, apply_pauli_sum,
                            channel_matrix, chirality_observable,
                            exact_evolve, expectation, fidelity,
                            initial_state_kagome, kagome_prep_circuit,
                            sparse_hamiltonian, total_spin_ops)
from su2trotter.synth import Gate, GateCircuit, kak_su4, transpile


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return StateVector(n, v / np.linalg.norm(v))


def random_circuit(n, depth, seed):
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(depth):
        if rng.random() < 0.4 and n > 1:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(Gate("CNOT", (int(a), int(b))))
        else:
            kind = rng.choice(["HADAMARD", "SQRT_X", "RZ"])
            q = int(rng.integers(n))
            if kind == "RZ":
                gates.append(Gate("RZ", (q,), angle=float(rng.uniform(0, 6))))
            else:
                gates.append(Gate(kind, (q,)))
    return GateCircuit(n, gates)


def test_statevector_matches_dense_unitary():
    for seed in range(4):
        c = random_circuit(4, 30, seed)
        psi = random_state(4, 100 + seed)
        got = apply_circuit(psi, c)
        want = c.unitary() @ psi.amplitudes
        assert np.abs(got.amplitudes - want).max() < 1e-10


def test_noiseless_density_matches_pure_evolution():
    c = random_circuit(3, 20, 7)
    psi = random_state(3, 17)
    rho = apply_circuit(DensityMatrix.from_statevector(psi), c)
    ev = apply_circuit(psi, c)
    pure = np.outer(ev.amplitudes, ev.amplitudes.conj())
    assert np.abs(rho.entries - pure).max() < 1e-12


def kraus_apply(rho, kraus):
    return sum(k @ rho @ k.conj().T for k in kraus)


def test_depolarizing_single_qubit_matches_kraus():
    p = 0.013
    c = GateCircuit(2, [Gate("HADAMARD", (1,))])
    psi = random_state(2, 3)
    rho = apply_circuit(DensityMatrix.from_statevector(psi), c,
                        NoiseSpec(p1=p, mode="depolarizing"))
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2)
    u = c.unitary()
    base = u @ np.outer(psi.amplitudes, psi.amplitudes.conj()) @ u.conj().T
    # qubit 1 is the high bit
    kraus = [np.sqrt(1 - p) * np.kron(eye, eye)]
    kraus += [np.sqrt(p / 3.0) * np.kron(m, eye) for m in (x, y, z)]
    assert np.abs(rho.entries - kraus_apply(base, kraus)).max() < 1e-12


def test_depolarizing_two_qubit_matches_kraus():
    p = 0.02
    c = GateCircuit(2, [Gate("CNOT", (0, 1))])
    psi = random_state(2, 5)
    rho = apply_circuit(DensityMatrix.from_statevector(psi), c,
                        NoiseSpec(p2=p, mode="depolarizing"))
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]),
              np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]
    cnot = c.unitary()
    base = cnot @ np.outer(psi.amplitudes, psi.amplitudes.conj()) @ cnot.T
    kraus = [np.sqrt(1 - p) * np.eye(4)]
    for i in range(4):
        for j in range(4):
            if i == j == 0:
                continue
            kraus.append(np.sqrt(p / 15.0) * np.kron(paulis[j], paulis[i]))
    assert np.abs(rho.entries - kraus_apply(base, kraus)).max() < 1e-12


def test_dephasing_hits_only_nonclifford_rz():
    pz = 0.04
    psi = random_state(1, 9)
    base = np.outer(psi.amplitudes, psi.amplitudes.conj())
    z = np.diag([1.0, -1.0]).astype(complex)

    # non-Clifford angle: channel applies
    c = GateCircuit(1, [Gate("RZ", (0,), angle=0.3)])
    rho = apply_circuit(DensityMatrix.from_statevector(psi), c,
                        NoiseSpec(pz=pz, mode="dephasing"))
    u = sla.expm(-1j * 0.15 * z)
    after = u @ base @ u.conj().T
    want = (1 - pz) * after + pz * (z @ after @ z)
    assert np.abs(rho.entries - want).max() < 1e-12

    # Clifford angle: no channel
    c = GateCircuit(1, [Gate("RZ", (0,), angle=np.pi / 2)])
    rho = apply_circuit(DensityMatrix.from_statevector(psi), c,
                        NoiseSpec(pz=pz, mode="dephasing"))
    u = sla.expm(-1j * np.pi / 4 * z)
    assert np.abs(rho.entries - u @ base @ u.conj().T).max() < 1e-12


def test_statevector_rejects_noise():
    with pytest.raises(ValueError):
        apply_circuit(random_state(2, 1), GateCircuit(2, []),
                      NoiseSpec(p1=0.1, mode="depolarizing"))


def test_channel_matrix_agrees_with_per_gate_path():
    noise = NoiseSpec(p1=3e-3, p2=1e-2, mode="depolarizing")
    block = random_circuit(3, 25, 21)
    sites = (4, 0, 2)
    remapped = GateCircuit(5, [
        Gate(g.kind, tuple(sites[q] for q in g.qubits), angle=g.angle,
             matrix=g.matrix) for g in block.gates])
    psi = random_state(5, 33)
    slow = apply_circuit(DensityMatrix.from_statevector(psi), remapped, noise)
    fast = apply_channel(DensityMatrix.from_statevector(psi),
                         channel_matrix(block, noise), sites)
    assert np.abs(slow.entries - fast.entries).max() < 1e-12


def test_channel_matrix_is_trace_preserving():
    noise = NoiseSpec(p1=0.01, p2=0.05, mode="depolarizing")
    s = channel_matrix(random_circuit(2, 12, 2), noise)
    # trace functional is a left fixed point of the superoperator
    tr = np.eye(4).reshape(-1)
    assert np.abs(tr @ s - tr).max() < 1e-12


def test_expectation_and_pauli_apply():
    h = heisenberg_edge(0, 1, 3, Coefficient.symbol("J")) + chirality(
        0, 1, 2, 3, Coefficient.symbol("K"))
    vals = {"J": 0.8, "K": 0.5}
    psi = random_state(3, 12)
    dense = to_dense(h, vals)
    want_vec = dense @ psi.amplitudes
    assert np.abs(apply_pauli_sum(h, psi.amplitudes, vals)
                  - want_vec).max() < 1e-12
    want = float(np.real(np.vdot(psi.amplitudes, want_vec)))
    assert expectation(psi, h, vals) == pytest.approx(want, abs=1e-10)
    rho = DensityMatrix.from_statevector(psi)
    assert expectation(rho, h, vals) == pytest.approx(want, abs=1e-10)


def test_fidelity_definitions():
    a, b = random_state(3, 1), random_state(3, 2)
    want = abs(np.vdot(b.amplitudes, a.amplitudes)) ** 2
    assert fidelity(a, b) == pytest.approx(want, abs=1e-12)
    rho = DensityMatrix.from_statevector(a)
    assert fidelity(rho, b) == pytest.approx(want, abs=1e-10)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-12)


def test_sparse_hamiltonian_matches_dense():
    h = heisenberg_edge(0, 2, 3, Coefficient.symbol("J")) + chirality(
        0, 1, 2, 3, Coefficient.symbol("K"))
    vals = {"J": 1.1, "K": 0.4}
    assert np.abs(sparse_hamiltonian(h, vals).toarray()
                  - to_dense(h, vals)).max() < 1e-12


def test_exact_evolve_matches_dense_expm():
    h = heisenberg_edge(0, 1, 3, Coefficient.symbol("J")) + chirality(
        0, 1, 2, 3, Coefficient.symbol("K"))
    vals = {"J": 1.0, "K": 0.1}
    psi = random_state(3, 44)
    for t in (0.3, 2.0, np.pi):
        want = sla.expm(-1j * t * to_dense(h, vals)) @ psi.amplitudes
        got = exact_evolve(h, t, psi, vals)
        assert np.abs(got.amplitudes - want).max() < 1e-9


def test_sparse_hamiltonian_is_hermitian():
    h = PauliSum(2)
    h.add_term(PauliString.from_letters("XY", 2, (0, 1)),
               Coefficient.number(1))
    m = sparse_hamiltonian(h, {})
    assert np.abs((m - m.conj().T).toarray()).max() < 1e-12


def test_exact_evolve_conserves_total_spin():
    model = build_model("kagome-ring-12")
    psi = initial_state_kagome()
    sx, sy, sz = total_spin_ops(12)
    before = [expectation(psi, o) for o in (sx, sy, sz)]
    ev = exact_evolve(model.hamiltonian(), 1.3, psi, {"J": 1.0, "K": 0.1})
    after = [expectation(ev, o) for o in (sx, sy, sz)]
    assert np.abs(np.array(after) - np.array(before)).max() < 1e-9


def test_prep_circuit_builds_reference_product_state():
    want = initial_state_kagome()
    got = apply_circuit(StateVector.computational(12),
                        transpile(kagome_prep_circuit(12)))
    overlap = abs(np.vdot(want.amplitudes, got.amplitudes))
    assert abs(overlap - 1.0) < 1e-12


def test_chirality_observable_shape():
    model = build_model("kagome-ring-12")
    obs = chirality_observable(model)
    # six triangles, six strings each
    assert len(obs.terms) == 36
    psi = initial_state_kagome()
    assert expectation(psi, obs) == pytest.approx(0.0, abs=1e-12)
