"""Lattice models, clusterings, and residual accounting."""

from fractions import Fraction

import numpy as np
import pytest

from su2trotter.models import (MODEL_NAMES, TABLE1_MODELS, build_model,
                               conservation_generators,
                               conventional_clustering, format_polynomial,
                               proposed_clustering, residual_count,
                               table1_rows)
from su2trotter.pauli import Coefficient, PauliSum, commutator

EXPECTED_TABLE = {
    "tfim-1d": (2, 2, "2", "0.5"),
    "heis-1d": (2, 2, "6", "3"),
    "j1j2-two-layer": (4, 2, "6+12t+6t^2", "3+12t+12t^2"),
    "tfim-2d": (3, 2, "4", "2"),
    "heis-2d": (4, 3, "36", "30"),
    "kagome-heis": (4, 2, "28", "24"),
    "kagome-chirality": (10, 2, "28+48t+28t^2", "24+48t+24t^2"),
    "triangular-heis": (6, 3, "66", "60"),
    "triangular-chirality": (24, 3, "66+288t+264t^2", "60+288t+504t^2"),
}


def test_model_registry():
    assert set(TABLE1_MODELS) <= set(MODEL_NAMES)
    assert "kagome-ring-12" in MODEL_NAMES
    with pytest.raises(Exception):
        build_model("no-such-lattice")


def test_kagome_ring_geometry():
    m = build_model("kagome-ring-12")
    assert m.n_sites == 12
    assert len(m.edges) == 18
    assert len(m.triangles) == 6
    # corner-sharing: triangle j covers sites (2j, 2j+1, 2j+2 mod 12)
    for i, j, k, sym in m.triangles:
        assert sym == "K"
        assert len({i, j, k}) == 3


@pytest.mark.parametrize("name", TABLE1_MODELS + ("kagome-ring-12",))
@pytest.mark.parametrize("builder", [conventional_clustering,
                                     proposed_clustering])
def test_clusters_reassemble_hamiltonian(name, builder):
    model = build_model(name)
    clustering = builder(model)
    period = clustering.schedule_period
    total = PauliSum(model.n_sites)
    for c in clustering.clusters:
        total = total + c.hamiltonian
    h = model.hamiltonian()
    scaled = PauliSum(model.n_sites)
    for p, coef in h.terms.items():
        scaled.add_term(p, coef * Coefficient.number(period))
    # exact symbolic equality of the term dictionaries
    assert set(total.terms) == set(scaled.terms)
    for p, coef in total.terms.items():
        assert coef == scaled.terms[p]


@pytest.mark.parametrize("name", sorted(EXPECTED_TABLE))
def test_cluster_counts_and_residuals(name):
    conv_n, prop_n, conv_r, prop_r = EXPECTED_TABLE[name]
    model = build_model(name)
    conv = conventional_clustering(model)
    prop = proposed_clustering(model)
    assert conv.cluster_count() == conv_n
    assert prop.cluster_count() == prop_n
    assert format_polynomial(residual_count(conv)) == conv_r
    assert format_polynomial(residual_count(prop)) == prop_r


def test_table1_rows_match_computed_values():
    for name, conv_n, prop_n, conv_r, prop_r in table1_rows():
        model = build_model(name)
        assert conventional_clustering(model).cluster_count() == conv_n
        assert proposed_clustering(model).cluster_count() == prop_n
        assert format_polynomial(
            residual_count(conventional_clustering(model))) == conv_r
        assert format_polynomial(
            residual_count(proposed_clustering(model))) == prop_r


def test_blocks_are_disjoint_within_cluster():
    for name in ("kagome-ring-12", "kagome-chirality", "triangular-heis"):
        model = build_model(name)
        for builder in (conventional_clustering, proposed_clustering):
            for c in builder(model).clusters:
                seen = set()
                for sites, _ in c.blocks:
                    assert not (seen & set(sites))
                    seen |= set(sites)


def test_conservation_generators_commute_with_kagome():
    model = build_model("kagome-ring-12")
    h = model.hamiltonian()
    gens = conservation_generators(model)
    assert len(gens) == 3
    for g in gens:
        assert len(commutator(h, g).terms) == 0


def test_format_polynomial():
    assert format_polynomial({0: Fraction(2)}) == "2"
    assert format_polynomial({0: Fraction(1, 2)}) == "0.5"
    assert format_polynomial(
        {0: Fraction(3), 1: Fraction(12), 2: Fraction(12)}) == "3+12t+12t^2"
