"""Three-site symmetry-class machinery."""

import itertools

import numpy as np

from su2trotter.pauli import Coefficient, PauliString, PauliSum, chirality, \
    heisenberg_edge, to_dense
from su2trotter.symmetry import (algebra_type, canonical_classes, classify,
                                 decompose_by_class, intersect_spans,
                                 sector_of, span_rank, torus_space)

SITES = (0, 1, 2)


def all_nonidentity_strings():
    out = []
    for word in itertools.product("IXYZ", repeat=3):
        w = "".join(word)
        if w == "III":
            continue
        sites = tuple(i for i, ch in enumerate(w) if ch != "I")
        out.append(PauliString.from_letters(
            "".join(ch for ch in w if ch != "I"), 3, sites))
    return out


def test_every_string_gets_exactly_one_sector():
    strings = all_nonidentity_strings()
    assert len(strings) == 63
    counts = {}
    for p in strings:
        lab = sector_of(p, SITES)
        counts[(lab.kind, lab.l)] = counts.get((lab.kind, lab.l), 0) + 1
    assert counts[("C", None)] == 3
    for l in range(1, 5):
        assert counts[("G", l)] == 3
        assert counts[("H", l)] == 12
    assert sum(counts.values()) == 63


def test_generator_spaces_span_twelve_dimensions():
    classes = canonical_classes(SITES)
    assert [g.label for g in classes] == [1, 2, 3, 4]
    every = [b for g in classes for b in g.basis]
    assert span_rank(every) == 12


def test_each_generator_space_is_su2():
    for g in canonical_classes(SITES):
        assert len(g.basis) == 3
        assert algebra_type(g) == "su2"


def test_torus_is_three_dimensional_and_abelian():
    t = torus_space(SITES)
    assert span_rank(t.basis) == 3
    assert algebra_type(t) == "torus3"


def test_commutant_sector_intersection():
    # the commutant sectors of any two classes overlap exactly in the torus
    strings = all_nonidentity_strings()
    torus = [b for b in torus_space(SITES).basis]

    def commutant_span(l):
        span = []
        for p in strings:
            lab = sector_of(p, SITES)
            if (lab.kind == "H" and lab.l == l) or lab.kind == "C":
                h = PauliSum(3)
                h.add_term(p, Coefficient.number(1))
                span.append(h)
        return span

    for la in range(1, 5):
        sa = commutant_span(la)
        assert span_rank(sa) == 15
        for lb in range(la + 1, 5):
            inter = intersect_spans(sa, commutant_span(lb))
            assert span_rank(inter) == 3
            assert span_rank(inter + torus) == 3


def test_commutant_strings_commute_with_generators():
    for g in canonical_classes(SITES):
        for p in all_nonidentity_strings():
            lab = sector_of(p, SITES)
            if not ((lab.kind == "H" and lab.l == g.label)
                    or lab.kind == "C"):
                continue
            hp = PauliSum(3)
            hp.add_term(p, Coefficient.number(1))
            dp = to_dense(hp)
            for b in g.basis:
                db = to_dense(b)
                assert np.allclose(dp @ db, db @ dp, atol=1e-12)


def test_classify_heisenberg_chirality_triangle():
    h = PauliSum(3)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        h = h + heisenberg_edge(i, j, 3, Coefficient.symbol("J"))
    h = h + chirality(0, 1, 2, 3, Coefficient.symbol("K"))
    assert classify(h, SITES) == {2}


def test_classify_each_canonical_class():
    for g in canonical_classes(SITES):
        h = PauliSum(3)
        for b in g.basis:
            for p, _ in b.terms.items():
                h.add_term(p, Coefficient.number(1))
        assert classify(h, SITES) == {g.label}


def test_decompose_reassembles_input():
    h = PauliSum(3)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        h = h + heisenberg_edge(i, j, 3, Coefficient.symbol("J"))
    h = h + chirality(0, 1, 2, 3, Coefficient.symbol("K"))
    parts = decompose_by_class(h, SITES)
    total = PauliSum(3)
    for part in parts:
        total = total + part
    vals = {"J": 0.7, "K": 1.3}
    assert np.allclose(to_dense(total, vals), to_dense(h, vals))
