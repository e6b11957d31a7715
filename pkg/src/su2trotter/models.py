"""Lattice-model builders, conventional and proposed clusterings, and the
per-vertex residual-error counter.

Site indexing is 0-based throughout.  Two-dimensional lattices use
row-major indexing site = i*L + j with periodic wraparound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .pauli import (SYMBOLS, Coefficient, PauliString, PauliSum, chirality,
                    chirality_piece, commutator, heisenberg_edge)

MODEL_NAMES = (
    "tfim-1d", "heis-1d", "j1j2-two-layer", "tfim-2d", "heis-2d",
    "kagome-heis", "kagome-chirality", "triangular-heis",
    "triangular-chirality", "kagome-ring-12",
)


@dataclass
class LatticeModel:
    name: str
    n_sites: int
    edges: List[Tuple[int, int, str, str]]          # (i, j, symbol, kind)
    triangles: List[Tuple[int, int, int, str]]      # chirality terms
    fields: List[Tuple[int, str, str]]              # (site, symbol, axis)
    periodic: bool = True

    def __post_init__(self):
        for i, j, *_ in self.edges:
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise ValueError("edge index out of range")
        for i, j, k, _ in self.triangles:
            if len({i, j, k}) != 3 or max(i, j, k) >= self.n_sites:
                raise ValueError("bad triangle")

    def hamiltonian(self) -> PauliSum:
        h = PauliSum(self.n_sites)
        for i, j, sym, kind in self.edges:
            if kind == "Heisenberg":
                h = h + heisenberg_edge(i, j, self.n_sites,
                                        Coefficient.symbol(sym))
            else:
                h.add_term(PauliString.from_letters("ZZ", self.n_sites,
                                                    tuple(sorted((i, j)))),
                           Coefficient.symbol(sym))
        for i, j, k, sym in self.triangles:
            h = h + chirality(i, j, k, self.n_sites, Coefficient.symbol(sym))
        for s, sym, axis in self.fields:
            h.add_term(PauliString.from_letters(axis, self.n_sites, (s,)),
                       Coefficient.symbol(sym, scale=-1))
        return h


@dataclass
class Cluster:
    hamiltonian: PauliSum
    blocks: List[Tuple[Tuple[int, ...], PauliSum]]
    kind: str  # edge-matching | field | chirality-set | triangle-set


@dataclass
class Clustering:
    model: LatticeModel
    clusters: List[Cluster]
    schedule_period: int = 1

    def cluster_count(self) -> int:
        # a 2-step interleaved schedule reports clusters per time unit
        return len(self.clusters) // self.schedule_period

    def total(self) -> PauliSum:
        out = PauliSum(self.model.n_sites)
        for c in self.clusters:
            out = out + c.hamiltonian
        return out


# ---------------------------------------------------------------------------
# model builders


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def build_model(name: str, params: Optional[Dict] = None) -> LatticeModel:
    params = dict(params or {})
    if name == "tfim-1d":
        n = int(params.get("N", 8))
        _require(n >= 4 and n % 4 == 0, "tfim-1d needs N a multiple of 4")
        edges = [(i, (i + 1) % n, "J", "ZZ") for i in range(n)]
        flds = [(i, "h", "X") for i in range(n)]
        return LatticeModel(name, n, edges, [], flds)
    if name == "heis-1d":
        n = int(params.get("N", 8))
        _require(n >= 4 and n % 4 == 0, "heis-1d needs N a multiple of 4")
        edges = [(i, (i + 1) % n, "J", "Heisenberg") for i in range(n)]
        return LatticeModel(name, n, edges, [], [])
    if name == "j1j2-two-layer":
        n = int(params.get("N", 8))
        _require(n >= 8 and n % 4 == 0, "j1j2 needs N a multiple of 4")
        edges = [(i, (i + 1) % n, "J1", "Heisenberg") for i in range(n)]
        edges += [(i, (i + 2) % n, "J2", "Heisenberg") for i in range(n)]
        return LatticeModel(name, n, edges, [], [])
    if name == "tfim-2d":
        l = int(params.get("L", 4))
        _require(l >= 2 and l % 2 == 0, "tfim-2d needs even L")
        n = l * l
        idx = lambda i, j: (i % l) * l + (j % l)
        edges = []
        for i in range(l):
            for j in range(l):
                edges.append((idx(i, j), idx(i, j + 1), "J", "ZZ"))
                edges.append((idx(i, j), idx(i + 1, j), "J", "ZZ"))
        flds = [(s, "h", "X") for s in range(n)]
        return LatticeModel(name, n, edges, [], flds)
    if name == "heis-2d":
        l = int(params.get("L", 6))
        _require(l >= 6 and l % 6 == 0, "heis-2d needs L a multiple of 6")
        n = l * l
        idx = lambda i, j: (i % l) * l + (j % l)
        edges = []
        for i in range(l):
            for j in range(l):
                edges.append((idx(i, j), idx(i, j + 1), "J", "Heisenberg"))
                edges.append((idx(i, j), idx(i + 1, j), "J", "Heisenberg"))
        return LatticeModel(name, n, edges, [], [])
    if name in ("kagome-heis", "kagome-chirality"):
        l = int(params.get("L", 2))
        # odd-L tori obstruct the 4-edge-coloring of the kagome graph
        _require(l >= 2 and l % 2 == 0, "kagome lattice needs even L >= 2")
        return _kagome_2d(name, l)
    if name in ("triangular-heis", "triangular-chirality"):
        l = int(params.get("L", 6))
        _require(l >= 6 and l % 6 == 0, "triangular needs L a multiple of 6")
        return _triangular(name, l)
    if name == "kagome-ring-12":
        edges, tris = [], []
        for j in range(6):
            a, b, c = 2 * j, 2 * j + 1, (2 * j + 2) % 12
            edges += [(a, b, "J", "Heisenberg"), (b, c, "J", "Heisenberg"),
                      (a, c, "J", "Heisenberg")]
            tris.append((b, a, c, "K"))
        return LatticeModel(name, 12, edges, tris, [])
    raise ValueError("unknown model: " + name)


def _kagome_2d(name: str, l: int) -> LatticeModel:
    """Corner-sharing triangle lattice: sites are honeycomb edges.

    Honeycomb cells (i,j) carry sublattice-A and -B vertices; the three
    edges at an A vertex form an up triangle, at a B vertex a down one.
    """
    site = {}

    def sid(i, j, k):  # k in 0..2 labels the honeycomb edge within a cell
        key = (i % l, j % l, k)
        if key not in site:
            site[key] = len(site)
        return site[key]

    up, down = [], []
    for i in range(l):
        for j in range(l):
            # edges incident to A(i,j): e0(i,j), e1(i,j), e2(i,j)
            up.append((sid(i, j, 0), sid(i, j, 1), sid(i, j, 2)))
            # edges incident to B(i,j): e0(i,j), e1(i,j+1), e2(i+1,j)
            down.append((sid(i, j, 0), sid(i, j + 1, 1), sid(i + 1, j, 2)))
    n = len(site)
    edges = []
    tris = []
    for tri in up + down:
        a, b, c = tri
        edges += [(a, b, "J", "Heisenberg"), (b, c, "J", "Heisenberg"),
                  (a, c, "J", "Heisenberg")]
        if name == "kagome-chirality":
            tris.append((a, b, c, "K"))
    m = LatticeModel(name, n, edges, tris, [])
    m._up_triangles = up
    m._down_triangles = down
    return m


def _triangular(name: str, l: int) -> LatticeModel:
    n = l * l
    idx = lambda i, j: (i % l) * l + (j % l)
    edges = []
    for i in range(l):
        for j in range(l):
            edges.append((idx(i, j), idx(i, j + 1), "J", "Heisenberg"))
            edges.append((idx(i, j), idx(i + 1, j), "J", "Heisenberg"))
            edges.append((idx(i, j), idx(i + 1, j + 1), "J", "Heisenberg"))
    tris = []
    if name == "triangular-chirality":
        for i in range(l):
            for j in range(l):
                # base orientation is counter-clockwise; one colour class of
                # each triangle type is reversed (see _triangular_orientation)
                u = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1))
                d = (idx(i, j), idx(i + 1, j + 1), idx(i, j + 1))
                c = (i + j) % 3
                tris.append(_triangular_orientation(u, c, up=True) + ("K",))
                tris.append(_triangular_orientation(d, c, up=False) + ("K",))
    return LatticeModel(name, n, edges, tris, [])


def _triangular_orientation(tri, color, up):
    """Sign convention for triangular-lattice chirality terms.

    Upward triangles of colour 1 and downward triangles of colour 0 are
    stored clockwise, the rest counter-clockwise.  This mixed convention is
    what lets the staggered cluster schedules cancel the bulk of the
    cross-cluster commutators; a uniform convention provably cannot.
    """
    flip = (color == 1) if up else (color == 0)
    return (tri[0], tri[2], tri[1]) if flip else tri


# ---------------------------------------------------------------------------
# clustering helpers


def _edge_sum(model: LatticeModel, edges) -> PauliSum:
    h = PauliSum(model.n_sites)
    for i, j, sym, kind in edges:
        if kind == "Heisenberg":
            h = h + heisenberg_edge(i, j, model.n_sites,
                                    Coefficient.symbol(sym))
        else:
            h.add_term(PauliString.from_letters("ZZ", model.n_sites,
                                                tuple(sorted((i, j)))),
                       Coefficient.symbol(sym))
    return h


def _edge_local(model: LatticeModel, e) -> Tuple[Tuple[int, ...], PauliSum]:
    i, j, sym, kind = e
    if kind == "Heisenberg":
        return ((i, j), heisenberg_edge(i, j, model.n_sites,
                                        Coefficient.symbol(sym)))
    h = PauliSum(model.n_sites)
    h.add_term(PauliString.from_letters("ZZ", model.n_sites,
                                        tuple(sorted((i, j)))),
               Coefficient.symbol(sym))
    return ((i, j), h)


def _matching_cluster(model: LatticeModel, edges) -> Cluster:
    seen = set()
    for i, j, *_ in edges:
        if i in seen or j in seen:
            raise ValueError("edge cluster is not a matching")
        seen.update((i, j))
    return Cluster(_edge_sum(model, edges),
                   [_edge_local(model, e) for e in edges], "edge-matching")


def _edge_coloring(edges, n_colors: int) -> List[List]:
    """Deterministic backtracking proper edge coloring, most-constrained first."""
    color = [-1] * len(edges)
    incident = {}
    for k, (i, j, *_r) in enumerate(edges):
        incident.setdefault(i, []).append(k)
        incident.setdefault(j, []).append(k)

    def available(k):
        used = {color[o]
                for o in incident[edges[k][0]] + incident[edges[k][1]]
                if color[o] != -1}
        return [c for c in range(n_colors) if c not in used]

    def solve():
        best, best_av = None, None
        for k in range(len(edges)):
            if color[k] != -1:
                continue
            av = available(k)
            if best_av is None or len(av) < len(best_av):
                best, best_av = k, av
                if not av:
                    return False
        if best is None:
            return True
        for c in best_av:
            color[best] = c
            if solve():
                return True
            color[best] = -1
        return False

    if not solve():
        raise ValueError("no %d-matching decomposition found" % n_colors)
    out = [[] for _ in range(n_colors)]
    for k, e in enumerate(edges):
        out[color[k]].append(e)
    return out


def _triangle_local(model: LatticeModel, tri, j_sym: str, chi_sym=None,
                    chi_scale=1) -> Tuple[Tuple[int, ...], PauliSum]:
    a, b, c = tri
    n = model.n_sites
    h = heisenberg_edge(a, b, n, Coefficient.symbol(j_sym)) \
        + heisenberg_edge(b, c, n, Coefficient.symbol(j_sym)) \
        + heisenberg_edge(a, c, n, Coefficient.symbol(j_sym))
    if chi_sym is not None:
        h = h + chirality(a, b, c, n,
                          Coefficient.symbol(chi_sym, scale=chi_scale))
    return ((a, b, c), h)


def _cluster_from_blocks(model: LatticeModel, blocks, kind: str) -> Cluster:
    total = PauliSum(model.n_sites)
    for _, h in blocks:
        total = total + h
    return Cluster(total, list(blocks), kind)


def _chi_piece_cluster(model: LatticeModel, tris, z_slot: int) -> Cluster:
    """One chirality sub-piece (fixed Z position) over a disjoint triangle set."""
    blocks = []
    for a, b, c in tris:
        h = chirality_piece(a, b, c, model.n_sites,
                            Coefficient.symbol("K"), z_slot)
        blocks.append(((a, b, c), h))
    return _cluster_from_blocks(model, blocks, "chirality-set")


# ---------------------------------------------------------------------------
# conventional clusterings


def conventional_clustering(model: LatticeModel) -> Clustering:
    name = model.name
    n = model.n_sites
    if name == "tfim-1d":
        zz = Cluster(_edge_sum(model, model.edges),
                     [_edge_local(model, e) for e in model.edges],
                     "edge-matching")
        fl = _field_cluster(model)
        return Clustering(model, [zz, fl], 1)
    if name == "tfim-2d":
        horiz = [e for k, e in enumerate(model.edges) if k % 2 == 0]
        vert = [e for k, e in enumerate(model.edges) if k % 2 == 1]
        zz_h = Cluster(_edge_sum(model, horiz),
                       [_edge_local(model, e) for e in horiz],
                       "edge-matching")
        zz_v = Cluster(_edge_sum(model, vert),
                       [_edge_local(model, e) for e in vert],
                       "edge-matching")
        return Clustering(model, [zz_h, zz_v, _field_cluster(model)], 1)
    if name == "heis-1d":
        even = [e for e in model.edges if e[0] % 2 == 0]
        odd = [e for e in model.edges if e[0] % 2 == 1]
        return Clustering(model, [_matching_cluster(model, even),
                                  _matching_cluster(model, odd)], 1)
    if name == "j1j2-two-layer":
        j1 = [e for e in model.edges if e[2] == "J1"]
        j2 = [e for e in model.edges if e[2] == "J2"]
        j1_odd = [e for e in j1 if e[0] % 2 == 1]
        j1_even = [e for e in j1 if e[0] % 2 == 0]
        j2_a = [e for e in j2 if (e[0] // 2) % 2 == 0]
        j2_b = [e for e in j2 if (e[0] // 2) % 2 == 1]
        # both nearest-neighbour matchings go first: their sum commutes with
        # every next-nearest edge, so the mixed-coupling brackets cancel
        return Clustering(model, [_matching_cluster(model, j1_odd),
                                  _matching_cluster(model, j1_even),
                                  _matching_cluster(model, j2_a),
                                  _matching_cluster(model, j2_b)], 1)
    if name == "heis-2d":
        l = _side(n)
        groups = [[], [], [], []]
        for e in model.edges:
            i, j = e[0] // l, e[0] % l
            horiz = e[1] in ((e[0] // l) * l + (j + 1) % l,)
            if horiz:
                groups[j % 2].append(e)
            else:
                groups[2 + i % 2].append(e)
        return Clustering(model,
                          [_matching_cluster(model, g) for g in groups], 1)
    if name in ("kagome-heis", "kagome-chirality"):
        matchings = _edge_coloring(model.edges, 4)
        clusters = [_matching_cluster(model, m) for m in matchings]
        if name == "kagome-chirality":
            for tris in (model._up_triangles, model._down_triangles):
                for slot in range(3):
                    clusters.append(_chi_piece_cluster(model, tris, slot))
        return Clustering(model, clusters, 1)
    if name in ("triangular-heis", "triangular-chirality"):
        l = _side(n)
        groups = [[], [], [], [], [], []]
        for e in model.edges:
            i, j = e[0] // l, e[0] % l
            d = _tri_edge_dir(e, l)
            if d == 0:
                groups[j % 2].append(e)
            elif d == 1:
                groups[2 + i % 2].append(e)
            else:
                groups[4 + i % 2].append(e)
        if name == "triangular-heis":
            return Clustering(model,
                              [_matching_cluster(model, g) for g in groups], 1)
        # sandwich each triangle type between matching directions: the two
        # horizontal matchings go first, then the three upward families, the
        # two vertical matchings, the three downward families, and the two
        # diagonal matchings last; this placement cancels the bulk of the
        # matching-chirality cross terms
        up, down = _triangular_triangle_colors(l)
        clusters = [_matching_cluster(model, groups[0]),
                    _matching_cluster(model, groups[1])]
        for fam in up:
            for slot in range(3):
                clusters.append(_chi_piece_cluster(model, fam, slot))
        clusters.append(_matching_cluster(model, groups[2]))
        clusters.append(_matching_cluster(model, groups[3]))
        for fam in down:
            for slot in range(3):
                clusters.append(_chi_piece_cluster(model, fam, slot))
        clusters.append(_matching_cluster(model, groups[4]))
        clusters.append(_matching_cluster(model, groups[5]))
        return Clustering(model, clusters, 1)
    if name == "kagome-ring-12":
        matchings = _edge_coloring(model.edges, 4)
        clusters = [_matching_cluster(model, m) for m in matchings]
        up = [t[:3] for k, t in enumerate(model.triangles) if k % 2 == 0]
        down = [t[:3] for k, t in enumerate(model.triangles) if k % 2 == 1]
        for tris in (up, down):
            for slot in range(3):
                clusters.append(_chi_piece_cluster(model, tris, slot))
        return Clustering(model, clusters, 1)
    raise ValueError("unknown model: " + name)


def _field_cluster(model: LatticeModel) -> Cluster:
    blocks = []
    for s, sym, axis in model.fields:
        h = PauliSum(model.n_sites)
        h.add_term(PauliString.from_letters(axis, model.n_sites, (s,)),
                   Coefficient.symbol(sym, scale=-1))
        blocks.append(((s,), h))
    return _cluster_from_blocks(model, blocks, "field")


def _side(n: int) -> int:
    l = round(n ** 0.5)
    assert l * l == n
    return l


def _tri_edge_dir(e, l: int) -> int:
    i, j = e[0] // l, e[0] % l
    ti, tj = e[1] // l, e[1] % l
    di, dj = (ti - i) % l, (tj - j) % l
    if (di, dj) == (0, 1):
        return 0
    if (di, dj) == (1, 0):
        return 1
    return 2


def _triangular_triangle_colors(l: int):
    """Vertex-disjoint triangle families: three colors up, three down."""
    idx = lambda i, j: (i % l) * l + (j % l)
    up = [[], [], []]
    down = [[], [], []]
    for i in range(l):
        for j in range(l):
            c = (i + j) % 3
            u = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1))
            d = (idx(i, j), idx(i + 1, j + 1), idx(i, j + 1))
            up[c].append(_triangular_orientation(u, c, up=True))
            down[c].append(_triangular_orientation(d, c, up=False))
    return up, down


# ---------------------------------------------------------------------------
# proposed clusterings


def proposed_clustering(model: LatticeModel) -> Clustering:
    name = model.name
    n = model.n_sites
    if name == "tfim-1d":
        blocks_a, blocks_b = [], []
        for k in range(n // 4):
            blocks_a.append(_tfim_chain_block(model, 4 * k))
            blocks_b.append(_tfim_chain_block(model, 4 * k + 2))
        return Clustering(model,
                          [_cluster_from_blocks(model, blocks_a, "triangle-set"),
                           _cluster_from_blocks(model, blocks_b, "triangle-set")],
                          1)
    if name == "tfim-2d":
        l = _side(n)
        idx = lambda i, j: (i % l) * l + (j % l)
        fams = [[], []]
        for i in range(l):
            for j in range(l):
                c = idx(i, j)
                h = PauliSum(n)
                h.add_term(PauliString.from_letters(
                    "ZZ", n, tuple(sorted((c, idx(i, j + 1))))),
                    Coefficient.symbol("J"))
                h.add_term(PauliString.from_letters(
                    "ZZ", n, tuple(sorted((c, idx(i + 1, j))))),
                    Coefficient.symbol("J"))
                h.add_term(PauliString.from_letters("X", n, (c,)),
                           Coefficient.symbol("h", scale=-1))
                fams[(i + j) % 2].append(((c, idx(i, j + 1), idx(i + 1, j)), h))
        return Clustering(model,
                          [_cluster_from_blocks(model, f, "triangle-set")
                           for f in fams], 1)
    if name == "heis-1d":
        fams = [[], []]
        for k in range(n // 2):
            a = 2 * k
            blk = heisenberg_edge(a, (a + 1) % n, n, Coefficient.symbol("J")) \
                + heisenberg_edge((a + 1) % n, (a + 2) % n, n,
                                  Coefficient.symbol("J"))
            fams[k % 2].append(((a, (a + 1) % n, (a + 2) % n), blk))
        return Clustering(model,
                          [_cluster_from_blocks(model, f, "triangle-set")
                           for f in fams], 1)
    if name == "j1j2-two-layer":
        fams = [[], [], [], []]
        for k in range(n // 2):
            a = 2 * k
            fams[k % 2].append(_j1j2_block(model, a))
            fams[2 + k % 2].append(_j1j2_block(model, a + 1))
        return Clustering(model,
                          [_cluster_from_blocks(model, f, "triangle-set")
                           for f in fams], 2)
    if name == "heis-2d":
        l = _side(n)
        idx = lambda i, j: (i % l) * l + (j % l)
        fams = [[], [], []]
        for i in range(l):
            for j in range(l):
                a, b, c = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)
                blk = heisenberg_edge(a, b, n, Coefficient.symbol("J")) \
                    + heisenberg_edge(b, c, n, Coefficient.symbol("J"))
                fams[(i + j) % 3].append(((a, b, c), blk))
        return Clustering(model,
                          [_cluster_from_blocks(model, f, "triangle-set")
                           for f in fams], 1)
    if name in ("kagome-heis", "kagome-chirality"):
        chi = "K" if name == "kagome-chirality" else None
        clusters = []
        for tris in (model._up_triangles, model._down_triangles):
            blocks = [_triangle_local(model, t, "J", chi) for t in tris]
            clusters.append(_cluster_from_blocks(model, blocks,
                                                 "triangle-set"))
        return Clustering(model, clusters, 1)
    if name in ("triangular-heis", "triangular-chirality"):
        l = _side(n)
        chi = "K" if name == "triangular-chirality" else None
        up, down = _triangular_triangle_colors(l)
        clusters = []
        # alternate the triangle types, each up family followed by the down
        # family of the same colour, visiting colours in the order 1, 2, 0:
        # this staggering cancels the shared-edge brackets
        order = [fam for c in (1, 2, 0) for fam in (up[c], down[c])]
        for fam in order:
            blocks = [_triangle_local(model, t, "J", chi, chi_scale=2)
                      for t in fam]
            clusters.append(_cluster_from_blocks(model, blocks,
                                                 "triangle-set"))
        return Clustering(model, clusters, 2)
    if name == "kagome-ring-12":
        clusters = []
        for par in (0, 1):
            blocks = []
            for k, (b, a, c) in enumerate(t[:3] for t in model.triangles):
                if k % 2 != par:
                    continue
                h = heisenberg_edge(a, b, 12, Coefficient.symbol("J")) \
                    + heisenberg_edge(b, c, 12, Coefficient.symbol("J")) \
                    + heisenberg_edge(a, c, 12, Coefficient.symbol("J")) \
                    + chirality(b, a, c, 12, Coefficient.symbol("K"))
                blocks.append(((a, b, c), h))
            clusters.append(_cluster_from_blocks(model, blocks,
                                                 "triangle-set"))
        return Clustering(model, clusters, 1)
    raise ValueError("unknown model: " + name)


def _tfim_chain_block(model: LatticeModel, start: int):
    n = model.n_sites
    a, b, c = start % n, (start + 1) % n, (start + 2) % n
    h = PauliSum(n)
    h.add_term(PauliString.from_letters("ZZ", n, tuple(sorted((a, b)))),
               Coefficient.symbol("J"))
    h.add_term(PauliString.from_letters("ZZ", n, tuple(sorted((b, c)))),
               Coefficient.symbol("J"))
    h.add_term(PauliString.from_letters("X", n, (a,)),
               Coefficient.symbol("h", scale=-1))
    h.add_term(PauliString.from_letters("X", n, (b,)),
               Coefficient.symbol("h", scale=-1))
    return ((a, b, c), h)


def _j1j2_block(model: LatticeModel, start: int):
    # the long edge carries 2*J2: each next-nearest edge is shared by the
    # two interleaved half-schedules
    n = model.n_sites
    a, b, c = start % n, (start + 1) % n, (start + 2) % n
    h = heisenberg_edge(a, b, n, Coefficient.symbol("J1")) \
        + heisenberg_edge(b, c, n, Coefficient.symbol("J1")) \
        + heisenberg_edge(a, c, n, Coefficient.symbol("J2", scale=2))
    return ((a, b, c), h)


# ---------------------------------------------------------------------------
# residual counting


_T_SYMBOL = {"K": "K", "J2": "J2"}


def residual_count(c: Clustering) -> Dict[int, Fraction]:
    """Per-vertex residual weight as a polynomial in t.

    Computes (1/s) * sum_{a<b} [H_a, H_b]/(2i) over the ordered schedule,
    groups terms by coupling monomial, sums absolute coefficients and
    divides by the site count.  The polynomial variable is t = K/J for
    chirality models and t = J2/J1 for the two-layer chain; transverse
    field and Ising couplings are identified (h = J).
    """
    n = c.model.n_sites
    res = PauliSum(n)
    hams = [cl.hamiltonian for cl in c.clusters]
    for a in range(len(hams)):
        for b in range(a + 1, len(hams)):
            res = res + commutator(hams[a], hams[b])
    poly: Dict[int, Fraction] = {}
    for p, coef in res.terms.items():
        for expo, frac in coef.monomials.items():
            power = _t_power(expo)
            poly[power] = poly.get(power, Fraction(0)) + abs(frac)
    out = {}
    for power, total in poly.items():
        v = total / (c.schedule_period * n)
        if v:
            out[power] = v
    return out


def _t_power(expo) -> int:
    d = dict(zip(SYMBOLS, expo))
    return d.get("K", 0) + d.get("J2", 0)


def format_polynomial(poly: Dict[int, Fraction]) -> str:
    if not poly:
        return "0"
    parts = []
    for power in sorted(poly):
        v = poly[power]
        txt = str(v.numerator) if v.denominator == 1 else str(float(v))
        if power == 0:
            parts.append(txt)
        else:
            var = "t" if power == 1 else "t^%d" % power
            parts.append(var if txt == "1" else txt + var)
    return "+".join(parts)


def conservation_generators(model: LatticeModel) -> List[PauliSum]:
    out = []
    for axis in "XYZ":
        s = PauliSum(model.n_sites)
        for i in range(model.n_sites):
            s.add_term(PauliString.from_letters(axis, model.n_sites, (i,)), 1)
        out.append(s)
    return out


TABLE1_MODELS = MODEL_NAMES[:9]


def table1_rows() -> List[Tuple[str, int, int, str, str]]:
    rows = []
    for name in TABLE1_MODELS:
        model = build_model(name)
        conv = conventional_clustering(model)
        prop = proposed_clustering(model)
        rows.append((name, conv.cluster_count(), prop.cluster_count(),
                     format_polynomial(residual_count(conv)),
                     format_polynomial(residual_count(prop))))
    return rows
