"""Clifford encoders mapping a symmetry triple onto a single wire.

Conjugation is implemented through exact generator images: a Clifford
gate is described by where it sends each X_q and Z_q, and an arbitrary
Pauli string is rebuilt from those images with exact phase tracking.
"""

from __future__ import annotations

from .pauli import PauliString, PauliSum, _popcount
from .symmetry import GeneratorSpace, algebra_type

# images of X and Z on the touched qubit(s), written as letter/sign pairs
_ONE_QUBIT_IMAGES = {
    "H":      {"X": ("Z", 1), "Z": ("X", 1)},
    "SQRT_X": {"X": ("X", 1), "Z": ("Y", -1)},
    "SQRT_Y": {"X": ("Z", -1), "Z": ("X", 1)},
    "SQRT_Z": {"X": ("Y", 1), "Z": ("Z", 1)},
}

_GATE_ARITY = {"H": 1, "SQRT_X": 1, "SQRT_Y": 1, "SQRT_Z": 1,
               "CNOT": 2, "SWAP": 2}


class CliffordCircuit:
    """Ordered gate list; gates earlier in the list act first."""

    def __init__(self, n_sites: int, gates=None):
        self.n_sites = n_sites
        self.gates = []
        for g in (gates or []):
            self.append(*g)

    def append(self, kind: str, *qubits) -> None:
        if kind not in _GATE_ARITY:
            raise ValueError(f"unknown Clifford gate {kind}")
        if len(qubits) != _GATE_ARITY[kind]:
            raise ValueError(f"{kind} takes {_GATE_ARITY[kind]} qubit(s)")
        if any(q < 0 or q >= self.n_sites for q in qubits):
            raise IndexError("qubit index out of range")
        if len(set(qubits)) != len(qubits):
            raise ValueError("qubit indices must be distinct")
        self.gates.append((kind, *qubits))

    def extend(self, other: "CliffordCircuit") -> None:
        for g in other.gates:
            self.append(*g)

    def inverse(self) -> "CliffordCircuit":
        out = CliffordCircuit(self.n_sites)
        for g in reversed(self.gates):
            kind = g[0]
            if kind in ("CNOT", "SWAP", "H"):
                out.gates.append(g)
            else:
                out.gates.extend([g, g, g])  # sqrt-gate cubed is its inverse
        return out

    # -- conjugation -------------------------------------------------------

    def _gate_images(self, gate):
        """Images of X_q / Z_q generators under one gate, as PauliSum-free
        (PauliString, sign) pairs keyed by ('X'|'Z', qubit)."""
        kind = gate[0]
        n = self.n_sites
        out = {}
        if kind == "CNOT":
            c, t = gate[1], gate[2]
            out[("X", c)] = (PauliString.from_letters("XX", n, (c, t)), 1)
            out[("X", t)] = (PauliString.from_letters("X", n, (t,)), 1)
            out[("Z", c)] = (PauliString.from_letters("Z", n, (c,)), 1)
            out[("Z", t)] = (PauliString.from_letters("ZZ", n, (c, t)), 1)
        elif kind == "SWAP":
            a, b = gate[1], gate[2]
            out[("X", a)] = (PauliString.from_letters("X", n, (b,)), 1)
            out[("X", b)] = (PauliString.from_letters("X", n, (a,)), 1)
            out[("Z", a)] = (PauliString.from_letters("Z", n, (b,)), 1)
            out[("Z", b)] = (PauliString.from_letters("Z", n, (a,)), 1)
        else:
            q = gate[1]
            for axis in "XZ":
                letter, sign = _ONE_QUBIT_IMAGES[kind][axis]
                out[(axis, q)] = (
                    PauliString.from_letters(letter, n, (q,)), sign)
        return out

    def _conjugate_by_gate(self, gate, p: PauliString) -> PauliString:
        images = self._gate_images(gate)
        n = self.n_sites
        # p = i^(e+k) * prod X_q * prod Z_q ; conjugate factor by factor
        k = _popcount(p.x_mask & p.z_mask)
        acc = PauliString(n, 0, 0, (p.phase_exp + k) % 4)
        for axis, mask in (("X", p.x_mask), ("Z", p.z_mask)):
            for q in range(n):
                if not (mask >> q) & 1:
                    continue
                img, sign = images.get((axis, q),
                                       (PauliString.from_letters(
                                           axis, n, (q,)), 1))
                acc = acc.multiply(img)
                if sign < 0:
                    acc = PauliString(n, acc.x_mask, acc.z_mask,
                                      (acc.phase_exp + 2) % 4)
        return acc

    def conjugate(self, p: PauliString) -> PauliString:
        """Return (circuit) p (circuit)^dagger exactly."""
        if p.n_sites != self.n_sites:
            raise ValueError("site-count mismatch")
        for g in self.gates:
            p = self._conjugate_by_gate(g, p)
        return p

    def conjugate_sum(self, h: PauliSum) -> PauliSum:
        out = PauliSum(self.n_sites)
        for p, c in h.terms.items():
            out.add_term(self.conjugate(p), c)
        return out

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        return "\n".join(" ".join(str(x) for x in g) for g in self.gates)

    @classmethod
    def from_text(cls, text: str, n_sites: int) -> "CliffordCircuit":
        out = cls(n_sites)
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            out.append(parts[0], *(int(x) for x in parts[1:]))
        return out

    def __repr__(self):
        return f"CliffordCircuit({self.n_sites}, {self.gates})"


def conjugate(c: CliffordCircuit, p: PauliString) -> PauliString:
    return c.conjugate(p)


def canonical_encoder(l: int, sites=(0, 1, 2),
                      n_sites: int | None = None) -> CliffordCircuit:
    """Encoder U_l sending class-l generators to the first listed site.

    U_1 is empty; U_2 is the three-CNOT circuit; U_3 and U_4 prepend
    single-qubit Cliffords that rotate their class onto class 2 (signs on
    individual generators are free).
    """
    if l not in (1, 2, 3, 4):
        raise ValueError("class index must be 1..4")
    s0, s1, s2 = sites
    if n_sites is None:
        n_sites = max(sites) + 1
    c = CliffordCircuit(n_sites)
    if l == 1:
        return c
    if l == 3:
        # cyclic letter rotation X->Y->Z->X on the symmetry wire
        c.append("SQRT_Z", s0)
        c.append("SQRT_Y", s0)
    elif l == 4:
        # anticyclic rotation X->Z->Y->X
        for _ in range(3):
            c.append("SQRT_Y", s0)
        for _ in range(3):
            c.append("SQRT_Z", s0)
    c.append("CNOT", s1, s2)
    c.append("CNOT", s0, s1)
    c.append("CNOT", s2, s0)
    return c


def synthesize_encoder(g: GeneratorSpace, target_wire: int) -> CliffordCircuit:
    """Clifford circuit conjugating an su(2) triple of Pauli strings onto
    {+-X, +-Y, +-Z} of target_wire (symplectic Gaussian elimination)."""
    if algebra_type(g) != "su2":
        raise ValueError("generator space is not su(2)-typed")
    strings = []
    for b in g.basis:
        if b.term_count() != 1:
            raise ValueError("synthesis requires single-string generators")
        strings.append(next(iter(b.terms)))
    n = g.n_sites
    circ = CliffordCircuit(n)

    def conj_all(gate):
        circ.append(*gate)
        for i, p in enumerate(strings):
            strings[i] = circ._conjugate_by_gate(gate, p)

    # stage 1: first generator -> X on target_wire
    for q in list(strings[0].support):
        letter = strings[0].letter_at(q)
        if letter == "Z":
            conj_all(("H", q))
        elif letter == "Y":
            conj_all(("SQRT_Z", q))  # Y -> -X
    support = list(strings[0].support)
    anchor = target_wire if target_wire in support else support[0]
    for q in support:
        if q != anchor:
            conj_all(("CNOT", anchor, q))
    if anchor != target_wire:
        conj_all(("SWAP", anchor, target_wire))
    # stage 2: an anticommuting partner -> Z on target_wire, fixing X_t
    b_idx = next(i for i in (1, 2)
                 if not strings[i].commutes_with(strings[0]))
    b = strings[b_idx]
    if b.letter_at(target_wire) == "Y":
        conj_all(("SQRT_X", target_wire))  # Y -> Z there, X fixed
    for q in list(strings[b_idx].support):
        if q == target_wire:
            continue
        letter = strings[b_idx].letter_at(q)
        if letter == "X":
            conj_all(("H", q))
        elif letter == "Y":
            conj_all(("SQRT_X", q))
    for q in list(strings[b_idx].support):
        if q != target_wire:
            conj_all(("CNOT", q, target_wire))
    # sanity: both pinned generators act only on the target wire now
    for i in (0, b_idx):
        if strings[i].support not in ((target_wire,), ()):
            raise AssertionError("encoder synthesis failed to localize")
    return circ


def extract_effective(h: PauliSum, u: CliffordCircuit, symmetry_wire: int):
    """Split u h u^dagger into a symmetry-wire part and a rest part.

    Returns (g_prime, h_prime) as PauliSums on the full register; raises
    if any conjugated term straddles the symmetry wire and the rest.
    """
    conj = u.conjugate_sum(h)
    g_prime = PauliSum(h.n_sites)
    h_prime = PauliSum(h.n_sites)
    for p, c in conj.terms.items():
        sup = p.support
        if all(s == symmetry_wire for s in sup):
            g_prime.add_term(p, c)
        elif symmetry_wire not in sup:
            h_prime.add_term(p, c)
        else:
            raise ValueError(
                f"term {p!r} straddles the symmetry wire; "
                "operator is not confined to this class")
    return g_prime, h_prime
