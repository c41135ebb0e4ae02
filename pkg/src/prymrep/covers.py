"""Finite-index subgroups K of surface groups via finite quotient markings:
coset tables, Schreier transversals, Reidemeister-Schreier rewriting to
H1(K;Z), characteristic-subgroup constructions, peripheral cycle data.

Cosets are identified with elements of the image subgroup of the marking
(the marking IS the coset table); no Todd-Coxeter enumeration is needed.
The transversal is the breadth-first Schreier tree in generator order, so
all derived data is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import intmat
from .util import content_hash, vector_to_list
from .words import Word, free_reduce, wmul, winv, wpow
from .presentation import (SurfaceGroupPresentation, PresentationError,
                           build_surface_group, SurfaceType, EndomorphismTable)


class CapExceeded(RuntimeError):
    pass


class NotInSubgroup(ValueError):
    def __init__(self, coset):
        super().__init__(f"word lies outside K (reaches coset {coset})")
        self.coset = coset


# ---------------------------------------------------------------------------

class FiniteGroupTable:
    """A finite group as an explicit multiplication table.

    table[x][y] = x*y as element indices; associativity, identity and
    inverses are verified on construction.
    """

    def __init__(self, name: str, table, labels=None, check=True):
        self.name = name
        self.table = [list(map(int, row)) for row in table]
        self.order = len(self.table)
        self.labels = (list(labels) if labels is not None
                       else [str(i) for i in range(self.order)])
        if len(self.labels) != self.order:
            raise ValueError("need one label per element")
        ident = None
        for e in range(self.order):
            if (all(self.table[e][x] == x for x in range(self.order))
                    and all(self.table[x][e] == x for x in range(self.order))):
                ident = e
                break
        if ident is None:
            raise ValueError("no identity element")
        self.identity = ident
        self._inv = [None] * self.order
        for x in range(self.order):
            for y in range(self.order):
                if self.table[x][y] == ident:
                    self._inv[x] = y
        if check:
            if any(v is None for v in self._inv):
                raise ValueError("missing inverses")
            n = self.order
            for x in range(n):
                for y in range(n):
                    for z in range(n):
                        if (self.table[self.table[x][y]][z]
                                != self.table[x][self.table[y][z]]):
                            raise ValueError("multiplication not associative")

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self._inv[x]

    def label(self, x: int) -> str:
        return self.labels[x]

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def power(self, x: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(x), -k)
        acc = self.identity
        for _ in range(k):
            acc = self.mul(acc, x)
        return acc

    def subgroup_closure(self, gens) -> list:
        """Sorted element list of the subgroup generated by gens."""
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    for y in (self.mul(x, g), self.mul(x, self.inv(g))):
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def element_order(self, x: int) -> int:
        k, acc = 1, x
        while acc != self.identity:
            acc = self.mul(acc, x)
            k += 1
        return k

    # -- constructions ------------------------------------------------------

    @staticmethod
    def trivial() -> "FiniteGroupTable":
        return FiniteGroupTable("1", [[0]], ["e"])

    @staticmethod
    def cyclic(L: int) -> "FiniteGroupTable":
        table = [[(x + y) % L for y in range(L)] for x in range(L)]
        return FiniteGroupTable(f"Z{L}", table, [str(x) for x in range(L)])

    @staticmethod
    def direct_product(groups, name=None) -> "FiniteGroupTable":
        groups = list(groups)
        if not groups:
            return FiniteGroupTable.trivial()
        elems = list(product(*[range(G.order) for G in groups]))
        idx = {e: i for i, e in enumerate(elems)}
        table = [[idx[tuple(G.mul(a[k], b[k]) for k, G in enumerate(groups))]
                  for b in elems] for a in elems]
        labels = ["(" + ",".join(G.label(e[k]) for k, G in enumerate(groups))
                  + ")" for e in elems]
        nm = name or "x".join(G.name for G in groups)
        return FiniteGroupTable(nm, table, labels)

    @staticmethod
    def elementary_abelian(L: int, k: int) -> "FiniteGroupTable":
        G = FiniteGroupTable.direct_product(
            [FiniteGroupTable.cyclic(L)] * k, name=f"Z{L}^{k}")
        return G

    @staticmethod
    def quaternion8() -> "FiniteGroupTable":
        # elements 1, -1, i, -i, j, -j, k, -k encoded as (sign, axis)
        labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]

        def unpack(x):
            return (1 if x % 2 == 0 else -1), x // 2  # axis 0=1,1=i,2=j,3=k

        def pack(sign, axis):
            return 2 * axis + (0 if sign == 1 else 1)

        mul_axis = {  # quaternion axis products: (axis, axis) -> (sign, axis)
            (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 0): (1, 1), (2, 0): (1, 2), (3, 0): (1, 3),
            (1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
            (1, 2): (1, 3), (2, 3): (1, 1), (3, 1): (1, 2),
            (2, 1): (-1, 3), (3, 2): (-1, 1), (1, 3): (-1, 2),
        }
        table = []
        for x in range(8):
            sx, ax = unpack(x)
            row = []
            for y in range(8):
                sy, ay = unpack(y)
                s, a = mul_axis[(ax, ay)]
                row.append(pack(sx * sy * s, a))
            table.append(row)
        return FiniteGroupTable("Q8", table, labels)

    @staticmethod
    def symmetric3() -> "FiniteGroupTable":
        perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]
        idx = {p: i for i, p in enumerate(perms)}
        table = [[idx[tuple(p[q[k]] for k in range(3))] for q in perms]
                 for p in perms]
        labels = ["e", "r", "rr", "s", "sr", "srr"]
        return FiniteGroupTable("S3", table, labels)

    @staticmethod
    def dihedral4() -> "FiniteGroupTable":
        # D4 = <r, s | r^4 = s^2 = 1, s r s = r^-1>, elements r^a s^b
        elems = [(a, b) for b in range(2) for a in range(4)]
        idx = {e: i for i, e in enumerate(elems)}

        def mul(x, y):
            a1, b1 = x
            a2, b2 = y
            a = (a1 + (a2 if b1 == 0 else -a2)) % 4
            return (a, (b1 + b2) % 2)
        table = [[idx[mul(x, y)] for y in elems] for x in elems]
        labels = [f"r{a}" + ("s" if b else "") for a, b in elems]
        return FiniteGroupTable("D4", table, labels)

    @staticmethod
    def builtin(name: str) -> "FiniteGroupTable":
        name = name.lower().removesuffix(".grp")
        reg = {
            "1": FiniteGroupTable.trivial, "trivial": FiniteGroupTable.trivial,
            "q8": FiniteGroupTable.quaternion8,
            "s3": FiniteGroupTable.symmetric3,
            "d4": FiniteGroupTable.dihedral4,
        }
        if name in reg:
            return reg[name]()
        if name.startswith("z") and name[1:].isdigit():
            return FiniteGroupTable.cyclic(int(name[1:]))
        if name.startswith("v4"):
            return FiniteGroupTable.elementary_abelian(2, 2)
        raise ValueError(f"unknown builtin group {name!r}")

    # -- file format ---------------------------------------------------------

    def serialize(self) -> str:
        lines = [f"group {self.name} order {self.order}"]
        lines.append("labels " + " ".join(self.labels))
        for row in self.table:
            lines.append(" ".join(str(x) for x in row))
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> "FiniteGroupTable":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "group" or head[2] != "order":
            raise ValueError("group file must start with 'group NAME order m'")
        name, m = head[1], int(head[3])
        labels = None
        body = lines[1:]
        if body and body[0].startswith("labels "):
            labels = body[0].split()[1:]
            body = body[1:]
        table = [[int(t) for t in ln.split()] for ln in body[:m]]
        return FiniteGroupTable(name, table, labels)

    def content_key(self) -> str:
        return content_hash({"name": self.name, "table": self.table,
                             "labels": self.labels})


# ---------------------------------------------------------------------------

class QuotientMarking:
    """A homomorphism pi_1 -> Q given by generator images."""

    def __init__(self, pres: SurfaceGroupPresentation, group: FiniteGroupTable,
                 images, characteristic=False):
        self.presentation = pres
        self.group = group
        self.images = tuple(int(x) for x in images)
        if len(self.images) != pres.rank:
            raise PresentationError("need one image per generator")
        if pres.relator is not None:
            if self.act_word(group.identity, pres.relator) != group.identity:
                raise PresentationError("relator does not map to identity")
        self.image_subgroup = group.subgroup_closure(self.images)
        self.surjective = len(self.image_subgroup) == group.order
        self.characteristic = characteristic

    def word_image(self, w: Word) -> int:
        return self.act_word(self.group.identity, w)

    def act_word(self, e: int, w: Word) -> int:
        """Right action: e * image(w)."""
        G = self.group
        for x in w:
            gx = self.images[abs(x) - 1]
            e = G.mul(e, gx if x > 0 else G.inv(gx))
        return e

    @property
    def index(self) -> int:
        return len(self.image_subgroup)

    def serialize(self) -> str:
        pres = self.presentation
        clauses = [f"marking {pres.surface} {self.group.name}"]
        for nm, img in zip(pres.names, self.images):
            clauses.append(f"{nm} -> {self.group.label(img)}")
        return "; ".join(clauses) + "\n"

    @staticmethod
    def parse(text: str, group: FiniteGroupTable) -> "QuotientMarking":
        clauses = [c.strip() for c in text.strip().split(";") if c.strip()]
        head = clauses[0].split()
        if head[0] != "marking":
            raise ValueError("marking must start with 'marking g,n,p GROUP'")
        pres = build_surface_group(SurfaceType.parse(head[1]))
        if len(head) > 2 and head[2] != group.name:
            raise ValueError(f"marking wants group {head[2]}, got {group.name}")
        imgs = {}
        for cl in clauses[1:]:
            lhs, rhs = cl.split("->")
            imgs[pres.generator(lhs.strip())] = group.index_of(rhs.strip())
        images = [imgs[j + 1] for j in range(pres.rank)]
        return QuotientMarking(pres, group, images)

    @staticmethod
    def parse_images(pres, group, text: str) -> "QuotientMarking":
        """Parse a compact CLI form like "a->i, b->j"."""
        imgs = {}
        for cl in text.replace(";", ",").split(","):
            if not cl.strip():
                continue
            lhs, rhs = cl.split("->")
            imgs[pres.generator(lhs.strip())] = group.index_of(rhs.strip())
        if sorted(imgs) != list(range(1, pres.rank + 1)):
            missing = [pres.names[j] for j in range(pres.rank)
                       if j + 1 not in imgs]
            raise ValueError(f"marking missing generators: {missing}")
        return QuotientMarking(pres, group, [imgs[j + 1]
                                             for j in range(pres.rank)])

    def content_key(self) -> str:
        return content_hash({
            "surface": str(self.presentation.surface),
            "group": self.group.content_key(),
            "images": list(self.images)})


def level_marking(pres: SurfaceGroupPresentation, L: int) -> QuotientMarking:
    """Marking onto H1(pi_1; Z/L): the mod-L abelianization.  Its kernel is
    a verbal subgroup, hence characteristic."""
    if L < 2:
        raise ValueError("level must be >= 2")
    if pres.is_free:
        k = pres.rank
        Q = FiniteGroupTable.elementary_abelian(L, k)
        images = []
        for j in range(k):
            tup = [0] * k
            tup[j] = 1
            images.append(_tuple_index(L, k, tup))
    else:
        k = 2 * pres.surface.g
        Q = FiniteGroupTable.elementary_abelian(L, k)
        images = []
        for j in range(pres.rank):
            tup = [0] * k
            tup[j] = 1
            images.append(_tuple_index(L, k, tup))
    return QuotientMarking(pres, Q, images, characteristic=True)


def _tuple_index(L, k, tup) -> int:
    """Index of a (Z/L)^k element in direct_product enumeration order."""
    idx = 0
    for t in tup:
        idx = idx * L + (t % L)
    return idx


def epi_closure_marking(pres: SurfaceGroupPresentation, Q: FiniteGroupTable,
                        cap: int = 10 ** 6) -> QuotientMarking:
    """Marking whose kernel is the intersection of the kernels of ALL
    epimorphisms pres -> Q, realized into a product group with one factor
    per epimorphism class (classes = Aut(Q)-orbits, which share kernels).
    The kernel is Aut(free)-invariant, hence characteristic."""
    if not pres.is_free:
        raise PresentationError("epi closure needs a free presentation")
    r = pres.rank
    total = Q.order ** r
    if total > cap:
        raise CapExceeded(
            f"|Q|^rank = {total} exceeds cap {cap}")
    auts = finite_group_aut(Q)
    reps = set()
    count = 0
    for tup in product(range(Q.order), repeat=r):
        if len(Q.subgroup_closure(tup)) != Q.order:
            continue
        count += 1
        canon = min(tuple(a[x] for x in tup) for a in auts)
        reps.add(canon)
    reps = sorted(reps)
    if not reps:
        T = FiniteGroupTable.trivial()
        return QuotientMarking(pres, T, [0] * r, characteristic=True)
    prod = FiniteGroupTable.direct_product(
        [Q] * len(reps), name=f"{Q.name}^{len(reps)}")
    images = []
    for j in range(r):
        tup = tuple(rep[j] for rep in reps)
        idx = 0
        for t in tup:
            idx = idx * Q.order + t
        images.append(idx)
    m = QuotientMarking(pres, prod, images, characteristic=True)
    m.epimorphism_count = count
    m.class_count = len(reps)
    return m


def finite_group_aut(Q: FiniteGroupTable, cap: int = 16) -> list:
    """All automorphisms of Q (as permutation lists), brute force over
    generator images.  Deterministic order."""
    if Q.order > cap:
        raise CapExceeded(f"|Q| = {Q.order} exceeds Aut cap {cap}")
    # greedy small generating set
    gens = []
    sub = {Q.identity}
    for x in range(Q.order):
        if x not in sub:
            gens.append(x)
            sub = set(Q.subgroup_closure(list(gens)))
        if len(sub) == Q.order:
            break
    if not gens:
        return [[0] * Q.order if Q.order else []] if Q.order == 0 else [[Q.identity]]
    # express every element as a word in gens (BFS)
    word_of = {Q.identity: ()}
    frontier = [Q.identity]
    while frontier:
        nxt = []
        for e in frontier:
            for gi, g in enumerate(gens):
                y = Q.mul(e, g)
                if y not in word_of:
                    word_of[y] = word_of[e] + (gi,)
                    nxt.append(y)
        frontier = nxt
    auts = []
    for cand in product(range(Q.order), repeat=len(gens)):
        phi = [None] * Q.order
        ok = True
        for e in range(Q.order):
            img = Q.identity
            for gi in word_of[e]:
                img = Q.mul(img, cand[gi])
            phi[e] = img
        if len(set(phi)) != Q.order:
            continue
        for x in range(Q.order):
            for y in range(Q.order):
                if phi[Q.mul(x, y)] != Q.mul(phi[x], phi[y]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            auts.append(phi)
    return auts


# ---------------------------------------------------------------------------

@dataclass
class PeripheralCycle:
    peripheral_index: int
    length: int
    rep_coset: int
    rep_word: Word          # transversal element t
    vector: np.ndarray      # class of t z^k t^-1 in H1(K;Z)


class CoverData:
    """The finite cover corresponding to ker(marking), with coset table,
    Schreier transversal, subgroup generators, rewriting to H1(K;Z) and
    peripheral cycle data."""

    def __init__(self, marking: QuotientMarking):
        pres = marking.presentation
        if not marking.surjective and marking.index != marking.group.order:
            pass  # cosets are the image subgroup; index = its order
        self.marking = marking
        self.presentation = pres
        G = marking.group

        elems = marking.image_subgroup
        # BFS over right multiplication by generator images, generator order
        base = G.identity
        index_of = {base: 0}
        order = [base]
        self.transversal: list[Word] = [()]
        self.tree_edge: list = [None]   # coset -> (parent_coset, gen_index>=1)
        tree_edges = set()
        q = [base]
        while q:
            nxt = []
            for e in q:
                c = index_of[e]
                for j in range(1, pres.rank + 1):
                    y = G.mul(e, marking.images[j - 1])
                    if y not in index_of:
                        index_of[y] = len(order)
                        order.append(y)
                        self.transversal.append(
                            wmul(self.transversal[c], (j,)))
                        self.tree_edge.append((c, j))
                        tree_edges.add((c, j))
                        nxt.append(y)
            q = nxt
        if len(order) != len(elems):
            raise PresentationError("marking image subgroup not reached "
                                    "by positive words")  # cannot happen
        self.size = len(order)
        self._elem_of_coset = order

        # right-action coset table
        self.table = [[index_of[G.mul(order[c], marking.images[j - 1])]
                       for j in range(1, pres.rank + 1)]
                      for c in range(self.size)]
        self.table_inv = [[index_of[G.mul(order[c],
                                          G.inv(marking.images[j - 1]))]
                           for j in range(1, pres.rank + 1)]
                          for c in range(self.size)]

        # Schreier generators = non-tree edges, in (coset, gen) order
        self.schreier_edges = []
        self.edge_index = {}
        for c in range(self.size):
            for j in range(1, pres.rank + 1):
                if (c, j) not in tree_edges:
                    self.edge_index[(c, j)] = len(self.schreier_edges)
                    self.schreier_edges.append((c, j))
        self.n_schreier = len(self.schreier_edges)
        self.schreier_names = [f"s{c}_{pres.names[j - 1]}"
                               for c, j in self.schreier_edges]

        # H1(K;Z): free case = Z^n_schreier; closed case quotient by the
        # abelianized lifted relators via Smith normal form
        if pres.is_free:
            self.h1_rank = self.n_schreier
            self.h1_projection = None       # identity
            self.relator_lattice = intmat.zeros(self.n_schreier, 0)
            self.torsion = []
        else:
            cols = []
            for c in range(self.size):
                cols.append(self.cycle_vector(c, pres.relator))
            R = np.stack(cols, axis=1).astype(object) if cols else \
                intmat.zeros(self.n_schreier, 0)
            r, sat, comp, proj, torsion = intmat.column_space_data(R)
            self.torsion = torsion
            if torsion:
                raise PresentationError(
                    f"unexpected torsion in H1 of a surface cover: {torsion}")
            self.h1_rank = self.n_schreier - r
            self.h1_projection = proj
            self.relator_lattice = R

        self._peripheral_cycles = None

    # -- coset walking -------------------------------------------------------

    def act(self, coset: int, w: Word) -> int:
        for x in w:
            if x > 0:
                coset = self.table[coset][x - 1]
            else:
                coset = self.table_inv[coset][-x - 1]
        return coset

    def in_kernel(self, w: Word) -> bool:
        return self.act(0, w) == 0

    def schreier_word(self, i: int) -> Word:
        """The subgroup generator t_c x t_{cx}^{-1} for edge i."""
        c, j = self.schreier_edges[i]
        t1 = self.transversal[c]
        t2 = self.transversal[self.table[c][j - 1]]
        return wmul(t1, (j,), winv(t2))

    # -- rewriting -----------------------------------------------------------

    def graph_vector(self, w: Word) -> np.ndarray:
        """Abelianized Reidemeister-Schreier rewriting of w in K: the vector
        over the Schreier edge basis.  Raises NotInSubgroup if w is not in K."""
        vec = np.zeros(self.n_schreier, dtype=object) + 0
        c = 0
        for x in w:
            if x > 0:
                i = self.edge_index.get((c, x))
                if i is not None:
                    vec[i] += 1
                c = self.table[c][x - 1]
            else:
                cprev = self.table_inv[c][-x - 1]
                i = self.edge_index.get((cprev, -x))
                if i is not None:
                    vec[i] -= 1
                c = cprev
        if c != 0:
            raise NotInSubgroup(c)
        return vec

    def cycle_vector(self, start: int, w: Word) -> np.ndarray:
        """Class of the closed walk of w starting at an arbitrary coset."""
        vec = np.zeros(self.n_schreier, dtype=object) + 0
        c = start
        for x in w:
            if x > 0:
                i = self.edge_index.get((c, x))
                if i is not None:
                    vec[i] += 1
                c = self.table[c][x - 1]
            else:
                cprev = self.table_inv[c][-x - 1]
                i = self.edge_index.get((cprev, -x))
                if i is not None:
                    vec[i] -= 1
                c = cprev
        assert c == start, "walk does not close up"
        return vec

    def rewrite(self, w: Word) -> np.ndarray:
        """Coordinates of w in H1(K;Z) (free case: the Schreier basis)."""
        v = self.graph_vector(w)
        if self.h1_projection is None:
            return v
        return self.h1_projection @ v

    # -- peripheral data -----------------------------------------------------

    def peripheral_cycles(self) -> list:
        if self._peripheral_cycles is not None:
            return self._peripheral_cycles
        out = []
        for i, z in enumerate(self.presentation.peripheral):
            perm = [self.act(c, z) for c in range(self.size)]
            seen = [False] * self.size
            for c0 in range(self.size):
                if seen[c0]:
                    continue
                cyc = [c0]
                seen[c0] = True
                c = perm[c0]
                while c != c0:
                    seen[c] = True
                    cyc.append(c)
                    c = perm[c]
                k = len(cyc)
                vec = self.cycle_vector(c0, wpow(z, k))
                if self.h1_projection is not None:
                    vec = self.h1_projection @ vec
                out.append(PeripheralCycle(i, k, c0, self.transversal[c0], vec))
        self._peripheral_cycles = out
        return out

    @property
    def boundary_count(self) -> int:
        return len(self.peripheral_cycles())

    # -- invariants ----------------------------------------------------------

    def riemann_hurwitz(self):
        """(cover_chi, closed_genus g', boundary_count b); checks integrality."""
        chi = self.size * self.presentation.surface.chi
        b = self.boundary_count
        two_minus_2g = chi + b
        if two_minus_2g % 2 != 0:
            raise ArithmeticError("2 - 2g' is odd: inconsistent cover data")
        gprime = (2 - two_minus_2g) // 2
        return chi, gprime, b

    def content_key(self) -> str:
        return content_hash({
            "marking": self.marking.content_key(),
            "table": self.table})

    def summary(self) -> dict:
        chi, gp, b = self.riemann_hurwitz()
        return {
            "surface": str(self.presentation.surface),
            "index": self.size,
            "h1_rank": int(self.h1_rank),
            "boundary_count": int(b),
            "cover_chi": int(chi),
            "closed_genus": int(gp),
            "schreier_generators": int(self.n_schreier),
        }


def coset_table(marking: QuotientMarking) -> CoverData:
    return CoverData(marking)


def schreier_rewrite(cover: CoverData, w: Word) -> np.ndarray:
    return cover.rewrite(free_reduce(w))


def peripheral_cycles(cover: CoverData) -> list:
    return cover.peripheral_cycles()


# ---------------------------------------------------------------------------

def nielsen_generators(pres: SurfaceGroupPresentation) -> list:
    """A finite generating set of Aut(F_rank) as endomorphism tables:
    invert x1; swap x1,x2; cycle x1->x2->...->x1; x1 -> x1 x2."""
    r = pres.rank
    out = []

    def table(images):
        return EndomorphismTable(pres, images)

    ident = [(j + 1,) for j in range(r)]
    inv1 = list(ident)
    inv1[0] = (-1,)
    out.append(("invert_x1", table(inv1)))
    if r >= 2:
        swap = list(ident)
        swap[0], swap[1] = (2,), (1,)
        out.append(("swap_x1_x2", table(swap)))
        cyc = [(j + 2,) for j in range(r - 1)] + [(1,)]
        out.append(("cycle", table(cyc)))
        mul = list(ident)
        mul[0] = (1, 2)
        out.append(("x1_to_x1x2", table(mul)))
    return out


@dataclass
class CharacteristicReport:
    characteristic: bool
    witness: tuple | None   # (nielsen name, schreier gen name, coset reached)

    def __str__(self):
        if self.characteristic:
            return "characteristic: yes (all Nielsen generators preserve K)"
        nm, sg, c = self.witness
        return (f"characteristic: NO (Nielsen move {nm} sends {sg} "
                f"to coset {c})")


def is_characteristic(marking: QuotientMarking, lib=None) -> CharacteristicReport:
    """Exact check that ker(marking) is Aut(free-group)-invariant, via the
    Nielsen generating set.  (Each Nielsen image of K inside K forces
    equality since the index is finite.)  The optional generator library is
    additionally checked as a sanity cross-check."""
    pres = marking.presentation
    if not pres.is_free:
        raise PresentationError("characteristic check needs a free presentation")
    cover = CoverData(marking)
    tables = nielsen_generators(pres)
    if lib is not None:
        tables = tables + [(g.name, g.table) for g in lib.generators]
    for name, t in tables:
        for i in range(cover.n_schreier):
            img = t(cover.schreier_word(i))
            c = cover.act(0, img)
            if c != 0:
                return CharacteristicReport(
                    False, (name, cover.schreier_names[i], c))
    return CharacteristicReport(True, None)
