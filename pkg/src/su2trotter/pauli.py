"""Exact Pauli-string algebra on up to 12 sites.

Strings are stored in symplectic form (x_mask, z_mask) with a quartic
phase exponent: the operator is i**phase_exp times the tensor product of
site letters, where a site with x=1,z=0 is X, x=0,z=1 is Z and x=1,z=1
is Y (the i of Y = iXZ is folded into the phase bookkeeping, not stored).
Coefficients are exact polynomials over the formal coupling symbols
{J, K, h, J1, J2} with Fraction values, so residual-error accounting is
free of floating-point noise.
"""

from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

SYMBOLS = ("J", "K", "h", "J1", "J2")
_SYMBOL_INDEX = {s: i for i, s in enumerate(SYMBOLS)}

_LETTER_FROM_BITS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS_FROM_LETTER = {v: k for k, v in _LETTER_FROM_BITS.items()}

_DENSE_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(x: int) -> int:
    return bin(x).count("1")


class PauliString:
    __slots__ = ("n_sites", "x_mask", "z_mask", "phase_exp")

    def __init__(self, n_sites: int, x_mask: int = 0, z_mask: int = 0,
                 phase_exp: int = 0):
        if n_sites <= 0:
            raise ValueError("n_sites must be positive")
        mask = (1 << n_sites) - 1
        if x_mask & ~mask or z_mask & ~mask:
            raise ValueError("mask bits outside n_sites")
        self.n_sites = n_sites
        self.x_mask = x_mask
        self.z_mask = z_mask
        self.phase_exp = phase_exp % 4

    @classmethod
    def from_letters(cls, letters: str, n_sites: int | None = None,
                     sites=None, phase_exp: int = 0) -> "PauliString":
        """Build from a letter string like "XYZ".

        letters[k] is placed on sites[k] (default sites 0,1,2,...).
        """
        if sites is None:
            sites = range(len(letters))
        sites = list(sites)
        if len(sites) != len(letters):
            raise ValueError("letters/sites length mismatch")
        if n_sites is None:
            n_sites = max(sites) + 1 if sites else 1
        x = z = 0
        for letter, s in zip(letters, sites):
            xb, zb = _BITS_FROM_LETTER[letter]
            x |= xb << s
            z |= zb << s
        return cls(n_sites, x, z, phase_exp)

    def letters(self) -> str:
        return "".join(
            _LETTER_FROM_BITS[((self.x_mask >> i) & 1, (self.z_mask >> i) & 1)]
            for i in range(self.n_sites))

    def letter_at(self, site: int) -> str:
        return _LETTER_FROM_BITS[((self.x_mask >> site) & 1,
                                  (self.z_mask >> site) & 1)]

    @property
    def support(self) -> tuple:
        m = self.x_mask | self.z_mask
        return tuple(i for i in range(self.n_sites) if (m >> i) & 1)

    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    def key(self):
        return (self.z_mask, self.x_mask)

    def multiply(self, other: "PauliString") -> "PauliString":
        if self.n_sites != other.n_sites:
            raise ValueError("site-count mismatch")
        x = self.x_mask ^ other.x_mask
        z = self.z_mask ^ other.z_mask
        k1 = _popcount(self.x_mask & self.z_mask)
        k2 = _popcount(other.x_mask & other.z_mask)
        k12 = _popcount(x & z)
        # reorder Z^z1 X^x2 -> X^x2 Z^z1 picks up (-1)^(z1.x2)
        e = (self.phase_exp + other.phase_exp + k1 + k2
             + 2 * _popcount(self.z_mask & other.x_mask) - k12)
        return PauliString(self.n_sites, x, z, e % 4)

    __mul__ = multiply

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n_sites != other.n_sites:
            raise ValueError("site-count mismatch")
        return (_popcount(self.x_mask & other.z_mask)
                + _popcount(self.z_mask & other.x_mask)) % 2 == 0

    def hermitian_canonical(self):
        """Return (phase-0 string, real sign). Requires even phase."""
        if self.phase_exp % 2:
            raise ValueError("string is not Hermitian")
        sign = 1 if self.phase_exp == 0 else -1
        return PauliString(self.n_sites, self.x_mask, self.z_mask, 0), sign

    def to_dense(self) -> np.ndarray:
        """Dense matrix; qubit 0 is the least-significant index bit."""
        out = np.array([[1.0 + 0j]])
        for i in range(self.n_sites):
            out = np.kron(_DENSE_1Q[self.letter_at(i)], out)
        return (1j ** self.phase_exp) * out

    def map_sites(self, mapping, n_sites: int) -> "PauliString":
        """Relabel sites via mapping[old] = new on an n_sites register."""
        x = z = 0
        for i in range(self.n_sites):
            if (self.x_mask >> i) & 1:
                x |= 1 << mapping[i]
            if (self.z_mask >> i) & 1:
                z |= 1 << mapping[i]
        return PauliString(n_sites, x, z, self.phase_exp)

    def __eq__(self, other):
        return (isinstance(other, PauliString)
                and self.n_sites == other.n_sites
                and self.x_mask == other.x_mask
                and self.z_mask == other.z_mask
                and self.phase_exp == other.phase_exp)

    def __hash__(self):
        return hash((self.n_sites, self.x_mask, self.z_mask, self.phase_exp))

    def __repr__(self):
        pre = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase_exp]
        return f"{pre}{self.letters()}"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    return a.multiply(b)


def commutes(a: PauliString, b: PauliString) -> bool:
    return a.commutes_with(b)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)  # exact binary expansion; dyadics stay dyadic
    raise TypeError(f"unsupported coefficient value {v!r}")


class Coefficient:
    """Exact polynomial over the formal coupling symbols.

    monomials maps an exponent tuple (one slot per symbol in SYMBOLS) to a
    Fraction. The zero polynomial has an empty map.
    """

    __slots__ = ("monomials",)

    def __init__(self, monomials=None):
        self.monomials = {}
        if monomials:
            for expo, val in monomials.items():
                val = _as_fraction(val)
                if val != 0:
                    if sum(expo) > 4:
                        raise ValueError("monomial degree above 4")
                    self.monomials[tuple(expo)] = val

    @classmethod
    def number(cls, v) -> "Coefficient":
        return cls({(0,) * len(SYMBOLS): _as_fraction(v)})

    @classmethod
    def symbol(cls, name: str, power: int = 1, scale=1) -> "Coefficient":
        expo = [0] * len(SYMBOLS)
        expo[_SYMBOL_INDEX[name]] = power
        return cls({tuple(expo): _as_fraction(scale)})

    def is_zero(self) -> bool:
        return not self.monomials

    def __add__(self, other):
        out = dict(self.monomials)
        for expo, val in other.monomials.items():
            new = out.get(expo, Fraction(0)) + val
            if new == 0:
                out.pop(expo, None)
            else:
                out[expo] = new
        c = Coefficient()
        c.monomials = out
        return c

    def __neg__(self):
        c = Coefficient()
        c.monomials = {e: -v for e, v in self.monomials.items()}
        return c

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Coefficient):
            other = Coefficient.number(other)
        out = {}
        for e1, v1 in self.monomials.items():
            for e2, v2 in other.monomials.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                new = out.get(expo, Fraction(0)) + v1 * v2
                if new == 0:
                    out.pop(expo, None)
                else:
                    out[expo] = new
        return Coefficient(out)

    __rmul__ = __mul__

    def evaluate(self, couplings: dict) -> float:
        total = 0.0
        for expo, val in self.monomials.items():
            term = float(val)
            for s, p in zip(SYMBOLS, expo):
                if p:
                    if s not in couplings:
                        raise KeyError(f"unbound coupling symbol {s}")
                    term *= couplings[s] ** p
            total += term
        return total

    def constant_value(self) -> Fraction:
        """Value when the polynomial is a pure number (else error)."""
        if not self.monomials:
            return Fraction(0)
        zero = (0,) * len(SYMBOLS)
        if set(self.monomials) != {zero}:
            raise ValueError("coefficient is not a constant")
        return self.monomials[zero]

    def __eq__(self, other):
        return isinstance(other, Coefficient) and self.monomials == other.monomials

    def __repr__(self):
        if not self.monomials:
            return "0"
        return " + ".join(f"{v}*{_monomial_text(e)}"
                          for e, v in sorted(self.monomials.items()))


def _monomial_text(expo) -> str:
    parts = [f"{s}^{p}" for s, p in zip(SYMBOLS, expo) if p]
    return "".join(parts) if parts else "1"


_MONO_RE = re.compile(r"([A-Za-z][A-Za-z0-9]*)\^(\d+)")


def _monomial_from_text(text: str):
    expo = [0] * len(SYMBOLS)
    if text == "1":
        return tuple(expo)
    pos = 0
    for m in _MONO_RE.finditer(text):
        if m.start() != pos:
            raise ValueError(f"bad monomial {text!r}")
        pos = m.end()
        expo[_SYMBOL_INDEX[m.group(1)]] = int(m.group(2))
    if pos != len(text):
        raise ValueError(f"bad monomial {text!r}")
    return tuple(expo)


class PauliSum:
    """Hermitian operator: phase-0 Pauli strings with polynomial weights."""

    __slots__ = ("n_sites", "terms")

    def __init__(self, n_sites: int):
        self.n_sites = n_sites
        self.terms: dict[PauliString, Coefficient] = {}

    @classmethod
    def from_terms(cls, n_sites: int, pairs) -> "PauliSum":
        out = cls(n_sites)
        for p, c in pairs:
            out.add_term(p, c)
        return out

    @classmethod
    def from_string(cls, p: PauliString, coeff=1) -> "PauliSum":
        out = cls(p.n_sites)
        out.add_term(p, coeff)
        return out

    def add_term(self, p: PauliString, coeff) -> None:
        if p.n_sites != self.n_sites:
            raise ValueError("site-count mismatch")
        if not isinstance(coeff, Coefficient):
            coeff = Coefficient.number(coeff)
        p0, sign = p.hermitian_canonical()
        if sign < 0:
            coeff = -coeff
        cur = self.terms.get(p0)
        new = coeff if cur is None else cur + coeff
        if new.is_zero():
            self.terms.pop(p0, None)
        else:
            self.terms[p0] = new

    def copy(self) -> "PauliSum":
        out = PauliSum(self.n_sites)
        out.terms = dict(self.terms)
        return out

    def __add__(self, other: "PauliSum") -> "PauliSum":
        out = self.copy()
        for p, c in other.terms.items():
            out.add_term(p, c)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scaled(-1)

    def scaled(self, factor) -> "PauliSum":
        if not isinstance(factor, Coefficient):
            factor = Coefficient.number(factor)
        out = PauliSum(self.n_sites)
        for p, c in self.terms.items():
            prod = c * factor
            if not prod.is_zero():
                out.terms[p] = prod
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def term_count(self) -> int:
        return len(self.terms)

    @property
    def support(self) -> tuple:
        m = 0
        for p in self.terms:
            m |= p.x_mask | p.z_mask
        return tuple(i for i in range(self.n_sites) if (m >> i) & 1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].key())

    def commutator(self, other: "PauliSum") -> "PauliSum":
        return commutator(self, other)

    def to_dense(self, couplings: dict | None = None) -> np.ndarray:
        if self.n_sites > 12:
            raise ValueError("too many sites for dense materialization")
        couplings = couplings or {}
        dim = 1 << self.n_sites
        out = np.zeros((dim, dim), dtype=complex)
        for p, c in self.terms.items():
            out += c.evaluate(couplings) * p.to_dense()
        return out

    def map_sites(self, mapping, n_sites: int) -> "PauliSum":
        out = PauliSum(n_sites)
        for p, c in self.terms.items():
            out.add_term(p.map_sites(mapping, n_sites), c)
        return out

    def restrict_to(self, sites) -> "PauliSum":
        """Project onto a sub-register (terms must be supported there)."""
        sites = list(sites)
        mapping = {s: i for i, s in enumerate(sites)}
        out = PauliSum(len(sites))
        for p, c in self.terms.items():
            if any(s not in mapping for s in p.support):
                raise ValueError("term outside requested sites")
            full_map = {s: mapping.get(s, 0) for s in range(self.n_sites)}
            out.add_term(p.map_sites(full_map, len(sites)), c)
        return out

    def __eq__(self, other):
        return (isinstance(other, PauliSum) and self.n_sites == other.n_sites
                and self.terms == other.terms)

    def to_text(self) -> str:
        lines = []
        for p, c in self.sorted_terms():
            for expo, val in sorted(c.monomials.items()):
                v = float(val)
                sign = "+" if v >= 0 else "-"
                lines.append(f"{sign}{abs(v)!r}*{_monomial_text(expo)} "
                             f"{p.letters()}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, n_sites: int | None = None) -> "PauliSum":
        out = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            m = re.fullmatch(r"([+-])([0-9.eE+-]+)\*(\S+)\s+([IXYZ]+)", line)
            if not m:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}")
            sign, mag, mono, letters = m.groups()
            if out is None:
                out = cls(n_sites if n_sites is not None else len(letters))
            coeff = Coefficient({_monomial_from_text(mono):
                                 _as_fraction(float(mag))})
            if sign == "-":
                coeff = -coeff
            out.add_term(PauliString.from_letters(
                letters, n_sites=out.n_sites), coeff)
        if out is None:
            raise ValueError("empty operator text")
        return out

    def __repr__(self):
        if not self.terms:
            return "PauliSum(0)"
        return "PauliSum[" + ", ".join(
            f"{c!r}*{p!r}" for p, c in self.sorted_terms()) + "]"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """Normalized Lie bracket [a, b] / (2i)."""
    if a.n_sites != b.n_sites:
        raise ValueError("site-count mismatch")
    out = PauliSum(a.n_sites)
    for p, cp in a.terms.items():
        for q, cq in b.terms.items():
            if p.commutes_with(q):
                continue
            r = p.multiply(q)  # [p,q] = 2pq for anticommuting p,q
            # pq/i = i^(e-1) * r0 with e odd, so the result stays Hermitian
            r0 = PauliString(r.n_sites, r.x_mask, r.z_mask,
                             (r.phase_exp - 1) % 4)
            out.add_term(r0, cp * cq)
    return out


def to_dense(h: PauliSum, couplings: dict | None = None) -> np.ndarray:
    return h.to_dense(couplings)


def heisenberg_edge(i: int, j: int, n_sites: int, coeff) -> PauliSum:
    """coeff * (XiXj + YiYj + ZiZj)."""
    out = PauliSum(n_sites)
    for letter in "XYZ":
        out.add_term(PauliString.from_letters(letter * 2, n_sites=n_sites,
                                              sites=(i, j)), coeff)
    return out


_CHI_TERMS = (("XYZ", 1), ("XZY", -1), ("YZX", 1), ("YXZ", -1),
              ("ZXY", 1), ("ZYX", -1))


def chirality(i: int, j: int, k: int, n_sites: int, coeff) -> PauliSum:
    """coeff * sigma_i . (sigma_j x sigma_k), six Pauli terms."""
    if not isinstance(coeff, Coefficient):
        coeff = Coefficient.number(coeff)
    out = PauliSum(n_sites)
    for letters, sign in _CHI_TERMS:
        out.add_term(PauliString.from_letters(letters, n_sites=n_sites,
                                              sites=(i, j, k)),
                     coeff if sign > 0 else -coeff)
    return out


def chirality_piece(i: int, j: int, k: int, n_sites: int, coeff,
                    z_site: int = 0) -> PauliSum:
    """One of the three 2-term pieces of the chirality operator.

    z_site selects which slot (0 -> i, 1 -> j, 2 -> k) carries the Z letter;
    the three pieces sum to chirality(i, j, k).
    """
    if not isinstance(coeff, Coefficient):
        coeff = Coefficient.number(coeff)
    picked = [(ls, sg) for ls, sg in _CHI_TERMS if ls[z_site] == "Z"]
    out = PauliSum(n_sites)
    for letters, sign in picked:
        out.add_term(PauliString.from_letters(letters, n_sites=n_sites,
                                              sites=(i, j, k)),
                     coeff if sign > 0 else -coeff)
    return out
