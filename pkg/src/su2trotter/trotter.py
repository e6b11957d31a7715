"""Product-formula schedule construction.

Builds first- and second-order Trotter circuits from a Clustering.  Every
cluster is a sum of blocks on pairwise disjoint site sets, so a cluster
propagator is the product of independent block propagators; blocks are
synthesized per size (one site: a single rotation, two sites: KAK, three
sites: either the symmetry-encoded block or commuting-string rotations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .models import Cluster, Clustering
from .pauli import Coefficient, PauliSum, commutator
from .synth import Gate, GateCircuit, kak_su4, pauli_rotation, triangle_block

SYNTH_MODES = ("conventional", "triangle")


@dataclass
class TrotterSchedule:
    clustering: Clustering
    order: int
    n_steps: int
    total_time: float
    merged: bool = True
    couplings: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        period = self.clustering.schedule_period
        if self.n_steps % period:
            raise ValueError(
                "n_steps must be a multiple of the schedule period")


def _layer_plan(s: TrotterSchedule) -> List[Tuple[int, float]]:
    """Sequence of (cluster index, tau) pairs covering the whole evolution."""
    m = len(s.clustering.clusters)
    dt = s.total_time / s.n_steps
    passes = s.n_steps // s.clustering.schedule_period
    plan: List[Tuple[int, float]] = []
    if s.order == 1:
        for _ in range(passes):
            plan.extend((k, dt) for k in range(m))
        return plan
    for _ in range(passes):
        plan.extend((k, dt / 2) for k in range(m - 1))
        plan.append((m - 1, dt))
        plan.extend((k, dt / 2) for k in range(m - 2, -1, -1))
    if s.merged:
        merged_plan: List[Tuple[int, float]] = []
        for k, tau in plan:
            if merged_plan and merged_plan[-1][0] == k:
                prev_k, prev_tau = merged_plan.pop()
                merged_plan.append((prev_k, prev_tau + tau))
            else:
                merged_plan.append((k, tau))
        plan = merged_plan
    return plan


def _numeric(h: PauliSum, couplings: Dict[str, float]) -> PauliSum:
    out = PauliSum(h.n_sites)
    for p, coef in h.terms.items():
        v = coef.evaluate(couplings)
        if v:
            out.add_term(p, Coefficient.number(Fraction(v).limit_denominator(
                10 ** 12)))
    return out


def _remap_gates(local: GateCircuit, wires, out: GateCircuit) -> None:
    for g in local.gates:
        out.append(Gate(g.kind, tuple(wires[q] for q in g.qubits),
                        angle=g.angle, matrix=g.matrix))
    out.phase *= local.phase


def _dense_local(h: PauliSum, k: int) -> np.ndarray:
    out = np.zeros((2 ** k, 2 ** k), dtype=complex)
    for p, coef in h.terms.items():
        out += complex(coef.constant_value()) * p.to_dense()
    return out


def _block_circuit(block_h: PauliSum, sites: Tuple[int, ...], tau: float,
                   synth_mode: str,
                   couplings: Dict[str, float]) -> GateCircuit:
    k = len(sites)
    mapping = {s: i for i, s in enumerate(sites)}
    local = _numeric(block_h, couplings).map_sites(mapping, k)
    if k == 1:
        m = _dense_local(local, 1)
        w, v = np.linalg.eigh(m)
        u = (v * np.exp(-1j * tau * w)) @ v.conj().T
        return GateCircuit(1, [Gate("U1Q", (0,), matrix=u)])
    if k == 2:
        m = _dense_local(local, 2)
        w, v = np.linalg.eigh(m)
        return kak_su4((v * np.exp(-1j * tau * w)) @ v.conj().T)
    if k == 3:
        if synth_mode == "triangle":
            return triangle_block(local, tau)
        # the conventional route needs mutually commuting strings so the
        # product of single-string rotations is still exact
        terms = local.sorted_terms()
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                if not terms[i][0].commutes_with(terms[j][0]):
                    raise ValueError("non-commuting block in conventional "
                                     "synthesis")
        out = GateCircuit(3)
        for p, coef in terms:
            q, sign = p.hermitian_canonical()
            theta = tau * sign * float(coef.constant_value())
            rot = pauli_rotation(q, theta)
            _remap_gates(rot, tuple(range(3)), out)
        return out
    raise ValueError("no synthesis route for blocks larger than three sites")


def block_sequence(s: TrotterSchedule, synth_mode: str = "triangle"
                   ) -> List[Tuple[Tuple[int, ...], GateCircuit]]:
    """Ordered per-block local circuits for the whole schedule.

    Each entry pairs the sites a block acts on with its circuit on
    len(sites) wires.  Repeated (cluster, duration) blocks share one
    synthesized circuit object, so callers can cache per-block work by
    identity.
    """
    if synth_mode not in SYNTH_MODES:
        raise ValueError("unknown synth mode: " + synth_mode)
    out: List[Tuple[Tuple[int, ...], GateCircuit]] = []
    cache: Dict[Tuple[int, float], List[Tuple[Tuple[int, ...], GateCircuit]]] = {}
    for k, tau in _layer_plan(s):
        key = (k, tau)
        if key not in cache:
            cluster = s.clustering.clusters[k]
            cache[key] = [
                (sites, _block_circuit(h, sites, tau, synth_mode,
                                       s.couplings))
                for sites, h in cluster.blocks]
        out.extend(cache[key])
    return out


def build_circuit(s: TrotterSchedule,
                  synth_mode: str = "triangle") -> GateCircuit:
    n = s.clustering.model.n_sites
    out = GateCircuit(n)
    for sites, circ in block_sequence(s, synth_mode):
        _remap_gates(circ, sites, out)
    return out


def step_error_generator(c: Clustering) -> PauliSum:
    """Normalized leading error generator (1/s) sum_{a<b} [H_a, H_b]."""
    n = c.model.n_sites
    res = PauliSum(n)
    hams = [cl.hamiltonian for cl in c.clusters]
    for a in range(len(hams)):
        for b in range(a + 1, len(hams)):
            res = res + commutator(hams[a], hams[b])
    return res.scaled(Fraction(1, c.schedule_period))
