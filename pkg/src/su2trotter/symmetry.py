"""Four-class SU(2) classification of three-site generators.

All membership and span computations are exact: operators are flattened
to rational coordinate vectors indexed by (Pauli string, coupling
monomial) and handled with Fraction Gaussian elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .pauli import Coefficient, PauliString, PauliSum, commutator

_CLASS_LETTERS = {
    1: ("X", "Y", "Z"),
    2: ("XXX", "YYY", "ZZZ"),
    3: ("XYY", "YZZ", "ZXX"),
    4: ("XZZ", "YXX", "ZYY"),
}


@dataclass(frozen=True)
class GeneratorSpace:
    basis: tuple  # three PauliSums
    label: object = "custom"

    @property
    def n_sites(self) -> int:
        return self.basis[0].n_sites


@dataclass(frozen=True)
class SectorLabel:
    kind: str          # "C", "G" or "H"
    l: int | None = None

    def __repr__(self):
        return self.kind if self.l is None else f"{self.kind}({self.l})"


def canonical_classes(sites, n_sites: int | None = None) -> list:
    """The representative generator spaces on an ordered site triple."""
    sites = tuple(sites)
    if len(sites) != 3 or len(set(sites)) != 3:
        raise ValueError("three distinct site indices required")
    if n_sites is None:
        n_sites = max(sites) + 1
    out = []
    for l, words in _CLASS_LETTERS.items():
        basis = []
        for w in words:
            used = sites[:1] if len(w) == 1 else sites
            basis.append(PauliSum.from_string(
                PauliString.from_letters(w, n_sites=n_sites, sites=used)))
        out.append(GeneratorSpace(tuple(basis), l))
    return out


def torus_space(sites, n_sites: int | None = None) -> GeneratorSpace:
    """The shared abelian space C = span{X2X3, Y2Y3, Z2Z3}."""
    sites = tuple(sites)
    if n_sites is None:
        n_sites = max(sites) + 1
    basis = tuple(PauliSum.from_string(PauliString.from_letters(
        w, n_sites=n_sites, sites=sites[1:])) for w in ("XX", "YY", "ZZ"))
    return GeneratorSpace(basis, "C")


def _single_strings(space: GeneratorSpace) -> list:
    out = []
    for b in space.basis:
        if b.term_count() != 1:
            return []
        out.append(next(iter(b.terms)))
    return out


def sector_of(p: PauliString, sites) -> SectorLabel:
    """Unique Theorem-1 sector of a non-identity three-site string."""
    sites = tuple(sites)
    if p.is_identity():
        raise ValueError("identity string has no sector")
    if any(s not in sites for s in p.support):
        raise ValueError("support outside the site triple")
    p0, _ = p.hermitian_canonical()
    torus = {q.hermitian_canonical()[0]
             for b in torus_space(sites, p.n_sites).basis
             for q in b.terms}
    if p0 in torus:
        return SectorLabel("C")
    classes = canonical_classes(sites, p.n_sites)
    for space in classes:
        if p0 in {s.hermitian_canonical()[0]
                  for s in _single_strings(space)}:
            return SectorLabel("G", space.label)
    hits = [space.label for space in classes
            if all(p0.commutes_with(s) for s in _single_strings(space))]
    if len(hits) != 1:
        raise AssertionError(f"string {p0!r} matched sectors {hits}")
    return SectorLabel("H", hits[0])


def classify(h: PauliSum, sites) -> set:
    """Class indices l such that every term of h sits in G_l or H_l."""
    sites = tuple(sites)
    if any(s not in sites for s in h.support):
        raise ValueError("support outside the site triple")
    out = set()
    for space in canonical_classes(sites, h.n_sites):
        gen_strings = _single_strings(space)
        gen_set = {s.hermitian_canonical()[0] for s in gen_strings}
        ok = all(p in gen_set or all(p.commutes_with(s) for s in gen_strings)
                 for p in h.terms)
        if ok:
            out.add(space.label)
    return out


def decompose_by_class(h: PauliSum, sites):
    """Split h = H1 + H2 + H3 + H4 routing each term by its sector.

    Terms in the shared torus C are assigned to class 1.
    """
    sites = tuple(sites)
    parts = [PauliSum(h.n_sites) for _ in range(4)]
    for p, c in h.terms.items():
        label = sector_of(p, sites)
        l = 1 if label.kind == "C" else label.l
        parts[l - 1].add_term(p, c)
    return tuple(parts)


# ---------------------------------------------------------------------------
# Exact span utilities


def _coordinates(ops):
    """Flatten PauliSums to Fraction vectors over a shared key basis."""
    keys = []
    index = {}
    rows = []
    for op in ops:
        entries = {}
        for p, c in op.terms.items():
            for expo, val in c.monomials.items():
                key = (p.key(), expo)
                if key not in index:
                    index[key] = len(keys)
                    keys.append(key)
                entries[index[key]] = val
        rows.append(entries)
    mat = [[row.get(j, Fraction(0)) for j in range(len(keys))]
           for row in rows]
    return keys, mat


def _rref(mat):
    """In-place reduced row echelon form; returns pivot column list."""
    pivots = []
    r = 0
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = mat[r][c]
        mat[r] = [v / inv for v in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def span_rank(ops) -> int:
    ops = list(ops)
    if not ops:
        return 0
    _, mat = _coordinates(ops)
    if not mat or not mat[0]:
        return 0
    return len(_rref(mat))


def _sum_from_vector(keys, vec, n_sites) -> PauliSum:
    out = PauliSum(n_sites)
    per_string = {}
    for key, val in zip(keys, vec):
        if val == 0:
            continue
        (zm, xm), expo = key
        per_string.setdefault((zm, xm), {})[expo] = val
    for (zm, xm), monos in per_string.items():
        out.add_term(PauliString(n_sites, xm, zm, 0), Coefficient(monos))
    return out


def intersect_spans(a, b):
    """Basis of span(a) intersect span(b) (Zassenhaus construction)."""
    a, b = list(a), list(b)
    if not a or not b:
        return []
    n_sites = (a + b)[0].n_sites
    keys, mat = _coordinates(a + b)
    width = len(keys)
    rows = []
    for vec in mat[:len(a)]:
        rows.append(vec + vec)
    for vec in mat[len(a):]:
        rows.append(vec + [Fraction(0)] * width)
    _rref(rows)
    out = []
    for row in rows:
        left, right = row[:width], row[width:]
        if any(v != 0 for v in left):
            continue
        if any(v != 0 for v in right):
            out.append(_sum_from_vector(keys, right, n_sites))
    return out


def _solve_in_span(target: PauliSum, ops):
    """Coefficients writing target as a combination of ops, or None."""
    ops = list(ops)
    keys, mat = _coordinates(ops + [target])
    cols = len(keys)
    rows = [mat[i] + [Fraction(1) if j == i else Fraction(0)
                      for j in range(len(ops))]
            for i in range(len(ops))]
    _rref(rows)
    residual = list(mat[-1])
    combo = [Fraction(0)] * len(ops)
    for row in rows:
        lead = next((c for c in range(cols) if row[c] != 0), None)
        if lead is None:
            continue
        f = residual[lead] / row[lead]
        if f != 0:
            residual = [a - f * b for a, b in zip(residual, row[:cols])]
            combo = [a + f * b for a, b in zip(combo, row[cols:])]
    if any(v != 0 for v in residual):
        return None
    return combo


def algebra_type(g: GeneratorSpace) -> str:
    """Certify a rank-3 space as 'su2', 'torus3' or 'other'."""
    basis = list(g.basis)
    if span_rank(basis) < 3:
        raise ValueError("generator space must have rank 3")
    brackets = {}
    all_zero = True
    for a in range(3):
        for b in range(a + 1, 3):
            br = commutator(basis[a], basis[b])
            brackets[(a, b)] = br
            if not br.is_zero():
                all_zero = False
    if all_zero:
        return "torus3"
    # structure constants in the given basis (exact solve)
    f = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    for (a, b), br in brackets.items():
        combo = _solve_in_span(br, basis)
        if combo is None:
            return "other"
        for c in range(3):
            f[a][b][c] = combo[c]
            f[b][a][c] = -combo[c]
    # Killing form; negative definite iff the algebra is su(2)
    kill = [[sum(f[a][b][c] * f[d][c][b] for b in range(3) for c in range(3))
             for d in range(3)] for a in range(3)]
    minors = []
    for k in (1, 2, 3):
        sub = [row[:k] for row in kill[:k]]
        minors.append(_det(sub))
    if all((m < 0 if i % 2 == 0 else m > 0) for i, m in enumerate(minors)):
        return "su2"
    return "other"


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * _det(minor)
    return total
