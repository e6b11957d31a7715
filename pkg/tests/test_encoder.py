"""Clifford encoders that move a class onto the symmetry wire."""

import numpy as np
import scipy.linalg as sla

from su2trotter.encoder import (canonical_encoder, conjugate,
                                extract_effective, synthesize_encoder)
from su2trotter.pauli import (Coefficient, PauliString, PauliSum, chirality,
                              heisenberg_edge, to_dense)
from su2trotter.symmetry import canonical_classes
from su2trotter.synth import GateCircuit, _clifford_gates

SITES = (0, 1, 2)


def encoder_unitary(enc):
    return GateCircuit(3, _clifford_gates(enc)).unitary()


def triangle_hamiltonian():
    h = PauliSum(3)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        h = h + heisenberg_edge(i, j, 3, Coefficient.symbol("J"))
    return h + chirality(0, 1, 2, 3, Coefficient.symbol("K"))


def is_single_qubit_pauli(p, wire):
    mask = 1 << wire
    return (p.x_mask | p.z_mask) != 0 and (p.x_mask | p.z_mask) & ~mask == 0


def test_canonical_encoder_maps_generators_to_one_wire():
    for g in canonical_classes(SITES):
        enc = canonical_encoder(g.label)
        for b in g.basis:
            (p, _), = b.terms.items()
            q = conjugate(enc, p)
            assert is_single_qubit_pauli(q, 0)


def test_conjugation_preserves_products():
    enc = canonical_encoder(2)
    rng = np.random.default_rng(11)
    from su2trotter.pauli import multiply
    strings = []
    for _ in range(20):
        x, z = int(rng.integers(8)), int(rng.integers(8))
        if x | z:
            strings.append(PauliString(3, x, z))
    for a in strings:
        for b in strings:
            lhs = conjugate(enc, multiply(a, b))
            rhs = multiply(conjugate(enc, a), conjugate(enc, b))
            assert lhs == rhs


def test_extract_effective_reassembles_conjugated_hamiltonian():
    h = triangle_hamiltonian()
    enc = canonical_encoder(2)
    g_eff, h_eff = extract_effective(h, enc, 0)
    vals = {"J": 0.9, "K": 0.4}
    u = encoder_unitary(enc)
    want = u @ to_dense(h, vals) @ u.conj().T
    got = to_dense(g_eff, vals) + to_dense(h_eff, vals)
    assert np.allclose(got, want, atol=1e-12)
    # the effective part must not touch the symmetry wire
    for p, _ in h_eff.terms.items():
        assert (p.x_mask | p.z_mask) & 1 == 0
    for p, _ in g_eff.terms.items():
        assert (p.x_mask | p.z_mask) & ~1 == 0 or (
            (p.x_mask | p.z_mask) & 1) == 0


def test_propagator_factorizes_across_the_split():
    h = triangle_hamiltonian()
    enc = canonical_encoder(2)
    g_eff, h_eff = extract_effective(h, enc, 0)
    vals = {"J": 1.0, "K": 0.1}
    u = encoder_unitary(enc)
    rng = np.random.default_rng(3)
    for _ in range(4):
        tau = float(rng.uniform(0.0, 2 * np.pi))
        lhs = u @ sla.expm(-1j * tau * to_dense(h, vals)) @ u.conj().T
        rhs = sla.expm(-1j * tau * to_dense(g_eff, vals)) @ sla.expm(
            -1j * tau * to_dense(h_eff, vals))
        assert np.abs(lhs - rhs).max() < 1e-12


def test_synthesized_encoder_matches_canonical_action():
    for g in canonical_classes(SITES):
        enc = synthesize_encoder(g, 0)
        for b in g.basis:
            (p, _), = b.terms.items()
            assert is_single_qubit_pauli(conjugate(enc, p), 0)


def test_encoder_circuit_is_small():
    for l in range(1, 5):
        enc = canonical_encoder(l)
        n_cnot = sum(1 for gate in enc.gates if gate[0] == "CNOT")
        assert n_cnot <= 3


def test_encoder_text_roundtrip():
    from su2trotter.encoder import CliffordCircuit
    enc = canonical_encoder(3)
    again = CliffordCircuit.from_text(enc.to_text(), enc.n_sites)
    assert again.gates == enc.gates
