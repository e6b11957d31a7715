"""Symplectic Pauli algebra against dense-matrix oracles."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from su2trotter.pauli import (Coefficient, PauliString, PauliSum, chirality,
                              chirality_piece, commutator, commutes,
                              heisenberg_edge, multiply, to_dense)

PAULI_1Q = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_of_letters(letters):
    m = np.eye(1)
    # site 0 is the least significant qubit
    for ch in reversed(letters):
        m = np.kron(m, PAULI_1Q[ch])
    return m


def string_from_word(word, n):
    sites = tuple(i for i, ch in enumerate(word) if ch != "I")
    return PauliString.from_letters(
        "".join(ch for ch in word if ch != "I"), n, sites)


def dense_of_string(p, n):
    letters = []
    for i in range(n):
        x = (p.x_mask >> i) & 1
        z = (p.z_mask >> i) & 1
        letters.append("IXZY"[x + 2 * z] if x + 2 * z != 3 else "Y")
    return (1j ** (p.phase_exp % 4)) * dense_of_letters("".join(letters))


def all_words(n):
    return ["".join(w) for w in itertools.product("IXYZ", repeat=n)]


def test_from_letters_roundtrip_dense():
    for word in all_words(2):
        p = string_from_word(word, 2)
        h = PauliSum(2)
        h.add_term(p, Coefficient.number(1))
        assert np.allclose(to_dense(h), dense_of_letters(word))


def test_multiply_x_z_gives_minus_i_y():
    x = PauliString.from_letters("X", 1, (0,))
    z = PauliString.from_letters("Z", 1, (0,))
    prod = multiply(x, z)
    assert prod.x_mask == 1 and prod.z_mask == 1
    # -iY carries phase exponent 3
    assert prod.phase_exp == 3


def test_multiply_identity_is_neutral():
    eye = PauliString(3)
    for word in ("XYZ", "IXI", "ZZY"):
        p = string_from_word(word, 3)
        assert multiply(eye, p) == p
        assert multiply(p, eye) == p


def test_multiply_matches_dense_exhaustively():
    for wa in all_words(2):
        for wb in all_words(2):
            a, b = string_from_word(wa, 2), string_from_word(wb, 2)
            assert np.allclose(dense_of_string(multiply(a, b), 2),
                               dense_of_letters(wa) @ dense_of_letters(wb))


def test_known_cross_product():
    # (X1 X2)(Y2 Y3) = i X1 Z2 Y3
    a = string_from_word("XXI", 3)
    b = string_from_word("IYY", 3)
    got = multiply(a, b)
    want = string_from_word("XZY", 3)
    assert got.x_mask == want.x_mask and got.z_mask == want.z_mask
    assert np.allclose(dense_of_string(got, 3),
                       dense_of_letters("XXI") @ dense_of_letters("IYY"))


def test_commutes_matches_dense():
    for wa in all_words(2):
        for wb in all_words(2):
            a, b = string_from_word(wa, 2), string_from_word(wb, 2)
            da, db = dense_of_letters(wa), dense_of_letters(wb)
            assert commutes(a, b) == np.allclose(da @ db, db @ da)


def test_commutator_is_normalized_by_2i():
    # [a, b] stored as (ab - ba) / (2i), checked densely on three sites
    rng = np.random.default_rng(5)
    words = all_words(3)
    for _ in range(60):
        wa, wb = rng.choice(words), rng.choice(words)
        ha, hb = PauliSum(3), PauliSum(3)
        ha.add_term(string_from_word(wa, 3), Coefficient.number(1))
        hb.add_term(string_from_word(wb, 3), Coefficient.number(1))
        da, db = to_dense(ha), to_dense(hb)
        want = (da @ db - db @ da) / 2j
        assert np.allclose(to_dense(commutator(ha, hb)), want, atol=1e-12)


def test_heisenberg_edge_terms():
    h = heisenberg_edge(0, 1, 3, Coefficient.symbol("J"))
    assert len(h.terms) == 3
    want = (dense_of_letters("XXI") + dense_of_letters("YYI")
            + dense_of_letters("ZZI"))
    assert np.allclose(to_dense(h, {"J": 1.0}), want)


def test_chirality_dense():
    # sigma_i . (sigma_j x sigma_k) expands to six signed XYZ permutations
    c = chirality(0, 1, 2, 3, Coefficient.number(1))
    assert len(c.terms) == 6
    want = np.zeros((8, 8), dtype=complex)
    for (a, b, d), sign in [((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                            ((0, 2, 1), -1), ((2, 1, 0), -1),
                            ((1, 0, 2), -1)]:
        word = ["I"] * 3
        word[a], word[b], word[d] = "X", "Y", "Z"
        want += sign * dense_of_letters("".join(word))
    assert np.allclose(to_dense(c), want)


def test_chirality_piece_sum_is_chirality():
    total = PauliSum(3)
    for z_site in range(3):
        total = total + chirality_piece(0, 1, 2, 3, Coefficient.number(1),
                                        z_site=z_site)
    assert np.allclose(to_dense(total),
                       to_dense(chirality(0, 1, 2, 3, Coefficient.number(1))))


def test_heisenberg_commutes_with_chirality():
    h = PauliSum(3)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        h = h + heisenberg_edge(i, j, 3, Coefficient.symbol("J"))
    c = chirality(0, 1, 2, 3, Coefficient.symbol("K"))
    assert len(commutator(h, c).terms) == 0


def test_ordered_edge_commutators_give_chirality():
    edges = [heisenberg_edge(i, j, 3, Coefficient.number(1))
             for i, j in ((0, 1), (1, 2), (2, 0))]
    acc = PauliSum(3)
    for a in range(3):
        for b in range(a + 1, 3):
            acc = acc + commutator(edges[a], edges[b])
    dense_acc = to_dense(acc)
    dense_chi = to_dense(chirality(0, 1, 2, 3, Coefficient.number(1)))
    r, c = np.argwhere(np.abs(dense_chi) > 1e-9)[0]
    ratio = dense_acc[r, c] / dense_chi[r, c]
    assert abs(ratio.imag) < 1e-12 and abs(ratio) > 1e-9
    assert np.allclose(dense_acc, ratio.real * dense_chi)


def test_coefficient_arithmetic():
    j = Coefficient.symbol("J")
    k = Coefficient.symbol("K")
    prod = j * k
    assert prod.evaluate({"J": 2.0, "K": 0.5}) == pytest.approx(1.0)
    half = Coefficient.number(Fraction(1, 2))
    assert half.constant_value() == Fraction(1, 2)
    s = j + j
    assert s.evaluate({"J": 3.0}) == pytest.approx(6.0)


def test_to_dense_scales_with_coupling():
    h = PauliSum(2)
    h.add_term(string_from_word("XX", 2), Coefficient.symbol("J"))
    assert np.allclose(to_dense(h, {"J": 2.0}),
                       2.0 * dense_of_letters("XX"))


def test_pauli_sum_text_roundtrip():
    h = heisenberg_edge(0, 1, 3, Coefficient.symbol("J")) + chirality(
        0, 1, 2, 3, Coefficient.symbol("K"))
    again = PauliSum.from_text(h.to_text())
    assert np.allclose(to_dense(again, {"J": 1.2, "K": 0.3}),
                       to_dense(h, {"J": 1.2, "K": 0.3}))
