"""One-vertex fatgraph of the base surface, its lift to a cover, spanning
tree contraction, and the combinatorial intersection pairing.

Base convention (matching the presentation convention
prod [a_i,b_i] z_1 ... z_{n+p} = 1): the cyclic order of ribbon ends around
the single base vertex is, per handle, a+ b- a- b+, followed by z+ z- for
each z generator.  With faces traced as orbits of (ccw successor) o (end
swap), the base faces read exactly the relator (closed case) or the
inverses of the peripheral words.

Half-edge ends of the cover graph: edge (c, j) runs from coset c to coset
c.x_j; its departure end sits in vertex c's slot (j,+), its arrival end in
vertex (c.x_j)'s slot (j,-).
"""

from __future__ import annotations

import numpy as np

from . import intmat
from .words import winv
from .presentation import SurfaceGroupPresentation


def base_cyclic_order(pres: SurfaceGroupPresentation) -> list:
    order = []
    for i in range(1, pres.surface.g + 1):
        a, b = 2 * i - 1, 2 * i
        order += [(a, +1), (b, -1), (a, -1), (b, +1)]
    for z in range(2 * pres.surface.g + 1, pres.rank + 1):
        order += [(z, +1), (z, -1)]
    return order


def trace_faces(vertices, end_vertex, alpha):
    """Faces of a fatgraph.

    vertices: dict vertex -> cyclic list of half-end ids;
    end_vertex: dict half-end -> vertex;
    alpha: dict half-end -> opposite half-end of the same edge.
    Returns a list of faces, each a list of half-ends (departure ends in
    traversal order).
    """
    succ = {}
    for v, cyc in vertices.items():
        n = len(cyc)
        for k, h in enumerate(cyc):
            succ[h] = cyc[(k + 1) % n]
    faces = []
    seen = set()
    for start in succ:
        if start in seen:
            continue
        face = []
        h = start
        while h not in seen:
            seen.add(h)
            face.append(h)
            h = succ[alpha[h]]
        faces.append(face)
    return faces


def base_face_words(pres: SurfaceGroupPresentation) -> list:
    """Face words of the base fatgraph, as words in the generators."""
    cyc = base_cyclic_order(pres)
    vertices = {0: [("e", g, s) for g, s in cyc]}
    end_vertex = {h: 0 for h in vertices[0]}
    alpha = {("e", g, s): ("e", g, -s) for g, s in cyc}
    faces = trace_faces(vertices, end_vertex, alpha)
    words = []
    for face in faces:
        words.append(tuple(g if s > 0 else -g for _, g, s in face))
    return words


class ContractedCover:
    """The cover fatgraph with its Schreier tree contracted to one vertex.

    After contraction the cyclic order contains the 2*n_schreier ends of the
    non-tree (Schreier) edges; the intersection pairing of the Schreier
    basis loops is read from chord interleaving in this cyclic word.
    """

    def __init__(self, cover):
        self.cover = cover
        pres = cover.presentation
        base = base_cyclic_order(pres)

        def out_end(c, j):
            return ("o", c, j)

        def in_end(c, j):
            return ("i", c, j)

        vertices = {}
        for c in range(cover.size):
            cyc = []
            for g, s in base:
                if s > 0:
                    cyc.append(out_end(c, g))
                else:
                    cyc.append(in_end(cover.table_inv[c][g - 1], g))
            vertices[c] = cyc
        alpha = {}
        for c in range(cover.size):
            for j in range(1, pres.rank + 1):
                alpha[out_end(c, j)] = in_end(c, j)
                alpha[in_end(c, j)] = out_end(c, j)
        self._alpha = alpha

        # faces before contraction = boundary cycles of the cover
        end_vertex = {}
        for v, cyc in vertices.items():
            for h in cyc:
                end_vertex[h] = v
        self.face_count = len(trace_faces(vertices, end_vertex, alpha))

        # contract the Schreier tree: coset d >= 1 discovered via edge
        # (parent, j); contraction merges vertex d into the parent's vertex.
        home = {c: c for c in range(cover.size)}   # coset -> current vertex

        def find(c):
            while home[c] != c:
                home[c] = home[home[c]]
                c = home[c]
            return c

        for d in range(1, cover.size):
            c, j = cover.tree_edge[d]
            h1 = out_end(c, j)       # sits at find(c)
            h2 = in_end(c, j)        # sits at find(d)
            u, w = find(c), find(d)
            assert u != w, "tree edge inside one vertex"
            cu, cw = vertices[u], vertices[w]
            k1 = cu.index(h1)
            k2 = cw.index(h2)
            spliced = cw[k2 + 1:] + cw[:k2]
            vertices[u] = cu[:k1] + spliced + cu[k1 + 1:]
            del vertices[w]
            home[w] = u
        assert len(vertices) == 1
        self.order = next(iter(vertices.values()))
        assert len(self.order) == 2 * cover.n_schreier

        # contraction preserves the surface: face count must be unchanged
        vtx = {0: self.order}
        ev = {h: 0 for h in self.order}
        al = {h: alpha[h] for h in self.order}
        assert len(trace_faces(vtx, ev, al)) == self.face_count

        self.position = {h: k for k, h in enumerate(self.order)}

    def pairing_matrix(self) -> np.ndarray:
        """Alternating intersection form on the Schreier basis of H1(graph).

        <e, f> = +1 if the ccw arc from e's departure end to e's arrival end
        contains f's arrival end (and not its departure end), -1 in the
        mirrored case, 0 otherwise.  Normalized so that the trivial cover of
        the torus gives <a1, b1> = +1.
        """
        cover = self.cover
        n = cover.n_schreier
        N = len(self.order)
        pos = self.position
        J = intmat.zeros(n, n)
        ends = []
        for (c, j) in cover.schreier_edges:
            ends.append((pos[("o", c, j)], pos[("i", c, j)]))

        def in_arc(a, b, x):
            return 0 < (x - a) % N < (b - a) % N

        for e in range(n):
            eo, ei = ends[e]
            for f in range(e + 1, n):
                fo, fi = ends[f]
                fin = in_arc(eo, ei, fi)
                fout = in_arc(eo, ei, fo)
                if fin and not fout:
                    v = 1
                elif fout and not fin:
                    v = -1
                else:
                    v = 0
                J[e, f] = v
                J[f, e] = -v
        return J
