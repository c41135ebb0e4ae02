"""The higher Prym representation: boundary subspace B, the quotient lattice
V_K, integral matrices of mapping classes on V_K, and the alternating
intersection form (computed from the lifted fatgraph, then verified against
the invariant radical == B).

All arithmetic is exact; basis choices come from Smith normal form with a
fixed pivot rule, so every run is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import intmat
from .util import content_hash, matrix_to_lists
from .words import Word
from .presentation import (EndomorphismTable, PresentationError,
                           SurfaceGroupPresentation)
from .covers import CoverData, NotInSubgroup
from .fatgraph import ContractedCover


class KernelNotPreserved(ValueError):
    def __init__(self, gen_name, coset):
        super().__init__(
            f"endomorphism does not preserve K: image of subgroup generator "
            f"{gen_name} reaches coset {coset}")
        self.generator = gen_name
        self.coset = coset


@dataclass
class BoundarySubspace:
    """Saturated span of the peripheral-cycle classes in H1(K;Z), plus a
    complementary lattice giving integral coordinates on V_K = H1(K;Q)/B."""
    cover: CoverData
    matrix: np.ndarray        # h1_rank x b, columns = peripheral cycle vectors
    rank: int                 # d_B
    saturation: np.ndarray    # h1_rank x d_B primitive basis of sat(B)
    complement: np.ndarray    # h1_rank x dim_v lattice basis of V_K
    projection: np.ndarray    # dim_v x h1_rank, proj@complement = I, proj@B = 0

    @property
    def dim_v(self) -> int:
        return self.cover.h1_rank - self.rank

    def project(self, vec) -> np.ndarray:
        return self.projection @ np.asarray(vec, dtype=object)


def boundary_subspace(cover: CoverData) -> BoundarySubspace:
    cycles = cover.peripheral_cycles()
    if cycles:
        B = np.stack([c.vector for c in cycles], axis=1).astype(object)
    else:
        B = intmat.zeros(cover.h1_rank, 0)
    r, sat, comp, proj, _ = intmat.column_space_data(B)
    return BoundarySubspace(cover, B, r, sat, comp, proj)


@dataclass
class PrymMatrix:
    generator_name: str
    raw: np.ndarray     # on the H1(K;Z) basis
    matrix: np.ndarray  # induced map on the V_K lattice

    def det(self):
        return intmat.det(self.matrix)


def _graph_matrix(cover: CoverData, e: EndomorphismTable) -> np.ndarray:
    cols = []
    for i in range(cover.n_schreier):
        w = e(cover.schreier_word(i))
        try:
            cols.append(cover.graph_vector(w))
        except NotInSubgroup as exc:
            raise KernelNotPreserved(cover.schreier_names[i], exc.coset)
    return np.stack(cols, axis=1).astype(object)


def raw_matrix(cover: CoverData, e: EndomorphismTable) -> np.ndarray:
    """Action of e on H1(K;Z): column i = class of e(schreier generator i).

    Requires e to preserve K (checked via the coset action); raises
    KernelNotPreserved with the violating generator otherwise.
    """
    if e.presentation != cover.presentation:
        raise PresentationError("endomorphism/cover presentation mismatch")
    M = _graph_matrix(cover, e)
    if cover.h1_projection is None:
        return M
    # closed case: push through the relator quotient
    comp = cover_relator_complement(cover)
    return cover.h1_projection @ M @ comp


def cover_relator_complement(cover: CoverData) -> np.ndarray:
    if getattr(cover, "_relator_complement", None) is None:
        _, _, comp, _, _ = intmat.column_space_data(cover.relator_lattice)
        cover._relator_complement = comp
    return cover._relator_complement


def prym_matrix(cover: CoverData, e: EndomorphismTable,
                boundary: BoundarySubspace | None = None,
                name: str = "") -> PrymMatrix:
    """Integral Prym matrix of e on the V_K lattice (plus the raw matrix)."""
    if boundary is None:
        boundary = boundary_subspace(cover)
    raw = raw_matrix(cover, e)
    vk = boundary.projection @ raw @ boundary.complement
    if abs(intmat.det(vk)) != 1:
        raise ArithmeticError("Prym matrix is not invertible over Z")
    return PrymMatrix(name, raw, vk)


@dataclass
class SymplecticFormMatrix:
    matrix: np.ndarray   # alternating nondegenerate form on the V_K lattice
    raw: np.ndarray      # the form on H1(K;Z) (radical = boundary subspace)

    def pair(self, u, v):
        u = np.asarray(u, dtype=object)
        v = np.asarray(v, dtype=object)
        return int((u @ self.matrix @ v))


def intersection_form(cover: CoverData,
                      boundary: BoundarySubspace | None = None
                      ) -> SymplecticFormMatrix:
    """Alternating form on V_K from the lifted fatgraph.

    The contracted cover fatgraph gives the intersection pairing on
    H1(graph) = the Schreier basis; its radical must equal the boundary
    subspace (free case) / the lifted-relator span (closed case) exactly,
    which is checked, and the form is then pushed to the V_K lattice.
    """
    if boundary is None:
        boundary = boundary_subspace(cover)
    Jg = ContractedCover(cover).pairing_matrix()

    if cover.h1_projection is None:
        J_K = Jg
        radical_target = boundary.saturation
    else:
        comp = cover_relator_complement(cover)
        J_K = comp.T @ Jg @ comp
        _, rel_sat, _, _, _ = intmat.column_space_data(cover.relator_lattice)
        radical_target = rel_sat
        rad_g = intmat.kernel_basis(Jg)
        if not intmat.lattice_equal(rad_g, radical_target):
            raise ArithmeticError(
                "radical of the graph form differs from the relator span")
        radical_target = intmat.zeros(cover.h1_rank, 0)

    rad = intmat.kernel_basis(J_K)
    target = (boundary.saturation if cover.h1_projection is None
              else radical_target)
    if not intmat.lattice_equal(rad, target):
        raise ArithmeticError(
            "radical of the raw intersection form does not equal the "
            "boundary subspace")
    J_V = boundary.complement.T @ J_K @ boundary.complement
    if intmat.det(J_V) == 0:
        raise ArithmeticError("form on V_K is degenerate")
    if not intmat.mat_eq(J_V.T, -J_V):
        raise ArithmeticError("form is not alternating")
    return SymplecticFormMatrix(J_V, J_K)


def transfer_matrix(cover: CoverData) -> np.ndarray:
    """The transfer H1(base;Z) -> H1(K;Z): a base class maps to the sum of
    its lifts; column j = sum over cosets of the class of edge (c, j)."""
    n = cover.n_schreier
    T = intmat.zeros(n, cover.presentation.rank)
    for idx, (c, j) in enumerate(cover.schreier_edges):
        T[idx, j - 1] += 1
    if cover.h1_projection is not None:
        T = cover.h1_projection @ T
    return T


def deck_matrix(cover: CoverData, w: Word) -> np.ndarray:
    """Deck transformation action of (the coset of) w on H1(K;Z), computed
    directly from left translation of the Schreier tree, independently of
    the rewriting used by raw_matrix."""
    size = cover.size
    # left action: coset c |-> coset of w * t_c
    left = [cover.act(0, w) if c == 0 else None for c in range(size)]
    for c in range(size):
        from .words import wmul
        left[c] = cover.act(0, wmul(w, cover.transversal[c]))
    n = cover.n_schreier
    cols = []
    for (c, j) in cover.schreier_edges:
        # translate the basis cycle: tree path to c, edge (c,j), reverse path
        vec = np.zeros(n, dtype=object) + 0
        for (d, k), sign in _tree_cycle_edges(cover, c, j):
            i = cover.edge_index.get((left[d], k))
            if i is not None:
                vec[i] += sign
        cols.append(vec)
    M = np.stack(cols, axis=1).astype(object)
    if cover.h1_projection is not None:
        M = cover.h1_projection @ M @ cover_relator_complement(cover)
    return M


def _tree_cycle_edges(cover: CoverData, c: int, j: int):
    """Edges (with signs) of the basis cycle: tree path 0->c, edge (c,j),
    tree path back from c.x_j to 0."""
    out = []

    def path_edges(target):
        edges = []
        d = target
        while d != 0:
            parent, k = cover.tree_edge[d]
            edges.append((parent, k))
            d = parent
        return list(reversed(edges))

    for e in path_edges(c):
        out.append((e, 1))
    out.append(((c, j), 1))
    for e in reversed(path_edges(cover.table[c][j - 1])):
        out.append((e, -1))
    return out


# ---------------------------------------------------------------------------
# Prym bundle: the serialized contract consumed by analysis/verification

TOOL_VERSION = "prymrep 0.1.0"


def build_bundle(cover: CoverData, generators, library_id: str = "") -> dict:
    """Assemble the JSON-ready Prym bundle for named generator tables.

    generators: list of (name, EndomorphismTable) or NamedMcgGenerator.
    """
    boundary = boundary_subspace(cover)
    form = intersection_form(cover, boundary)
    gen_entries = []
    for g in generators:
        name, table = (g.name, g.table) if hasattr(g, "table") else g
        pm = prym_matrix(cover, table, boundary, name=name)
        raw_lists = matrix_to_lists(pm.raw)
        gen_entries.append({
            "name": name,
            "raw_matrix": raw_lists,
            "vk_matrix": matrix_to_lists(pm.matrix),
            "raw_matrix_hash": content_hash(raw_lists),
        })
    return {
        "format": "prym-bundle",
        "tool_version": TOOL_VERSION,
        "surface": str(cover.presentation.surface),
        "marking_hash": cover.marking.content_key(),
        "library_id": library_id,
        "basis_meta": {
            "h1_rank": int(cover.h1_rank),
            "boundary_rank": int(boundary.rank),
            "dim_v": int(boundary.dim_v),
            "complement": matrix_to_lists(boundary.complement),
            "projection": matrix_to_lists(boundary.projection),
            "boundary_saturation": matrix_to_lists(boundary.saturation),
        },
        "form": matrix_to_lists(form.matrix),
        "generators": gen_entries,
    }


def bundle_arrays(bundle: dict):
    """Exact-integer views of the bundle pieces used by verification."""
    meta = bundle["basis_meta"]
    form = intmat.arr(bundle["form"])
    proj = intmat.arr(meta["projection"])
    gens = {g["name"]: g for g in bundle["generators"]}
    return form, proj, gens
