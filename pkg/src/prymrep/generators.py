"""Curated, validated generating sets for Mod_{g,n}^{p+1} acting on
pi_1(Sigma_{g,n}^p, v0).

Twist tables are data, not computed from curves; correctness is enforced by
the validation suite (exact braid/commutation/chain relations, peripheral
preservation, symplectic images).  Twist orientation is right-handed:
T_a1(b1) = b1 a1 on the once-punctured torus with <a1,b1> = +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import intmat
from .words import Word, free_reduce, wmul, winv, exponent_vector
from .presentation import (SurfaceType, SurfaceGroupPresentation,
                           build_surface_group, EndomorphismTable,
                           identity_table, inner_table, PresentationError,
                           verify_peripheral_structure, abelianized_matrix)


def base_symplectic_form(pres: SurfaceGroupPresentation) -> np.ndarray:
    """The (degenerate for n+p >= 2) intersection form on the abelianized
    generators: <a_i, b_i> = +1, z generators in the radical."""
    r = pres.rank
    J = intmat.zeros(r, r)
    for i in range(pres.surface.g):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = -1
    return J


def transvection(pres: SurfaceGroupPresentation, curve_class) -> np.ndarray:
    """x |-> x + <c, x> c on the abelianization, c = the twist curve's class."""
    r = pres.rank
    c = np.array(curve_class, dtype=object).reshape(r, 1)
    J = base_symplectic_form(pres)
    return intmat.eye(r) + c @ (c.T @ J)


@dataclass
class NamedMcgGenerator:
    name: str
    kind: str                       # "twist" | "push" | "boundary-twist"
    table: EndomorphismTable
    symplectic_image: np.ndarray    # declared matrix on H1(base)
    curve_word: Word | None = None  # twist curve's free class, twists only

    def validate(self) -> list[str]:
        """Return a list of failure strings (empty = pass)."""
        fails = []
        if not self.table.is_automorphism:
            fails.append(f"{self.name}: no verified inverse table")
        else:
            inv = self.table.inverse()
            rt = self.table.compose(inv)
            ident = identity_table(self.table.presentation)
            if rt != ident or inv.compose(self.table) != ident:
                fails.append(f"{self.name}: inverse round trip failed")
        if not verify_peripheral_structure(self.table).ok:
            fails.append(f"{self.name}: peripheral structure not preserved")
        if not intmat.mat_eq(abelianized_matrix(self.table),
                             self.symplectic_image):
            fails.append(f"{self.name}: abelianized != declared symplectic image")
        return fails


# relations are token lists [(name, power), ...];  empty list = identity
Relation = tuple


@dataclass
class GeneratorLibrary:
    presentation: SurfaceGroupPresentation
    generators: list
    relations: list = field(default_factory=list)
    library_id: str = ""

    def __post_init__(self):
        if not self.library_id:
            s = self.presentation.surface
            self.library_id = f"std({s})"

    def __getitem__(self, name: str) -> NamedMcgGenerator:
        for gen in self.generators:
            if gen.name == name:
                return gen
        raise KeyError(f"no generator named {name!r} in {self.library_id}")

    def names(self) -> list:
        return [g.name for g in self.generators]

    def twist_names(self) -> list:
        return [g.name for g in self.generators if g.kind == "twist"]

    def evaluate(self, tokens) -> EndomorphismTable:
        """Compose the named generators (leftmost outermost, as functions)."""
        acc = identity_table(self.presentation)
        for name, power in tokens:
            t = self[name].table
            if power < 0:
                t = t.inverse()
                power = -power
            for _ in range(power):
                acc = acc.compose(t)
        return acc


@dataclass
class RelationReport:
    results: list          # (lhs_text, rhs_text, passed)
    generator_failures: list

    @property
    def ok(self) -> bool:
        return not self.generator_failures and all(r[2] for r in self.results)

    def __str__(self):
        lines = []
        for f in self.generator_failures:
            lines.append(f"FAIL generator: {f}")
        for lhs, rhs, passed in self.results:
            lines.append(f"{'pass' if passed else 'FAIL'} relation: {lhs} = {rhs}")
        lines.append(f"overall: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def validate_mcg_relations(lib: GeneratorLibrary) -> RelationReport:
    gen_fails = []
    for gen in lib.generators:
        gen_fails.extend(gen.validate())
    results = []
    for lhs, rhs in lib.relations:
        ok = lib.evaluate(lhs) == lib.evaluate(rhs)
        results.append((tokens_text(lhs), tokens_text(rhs), ok))
    return RelationReport(results, gen_fails)


@dataclass
class MultitwistReport:
    ok: bool
    word_equal: bool
    abelianized_equal: bool
    peripheral_ok: bool

    def __str__(self):
        return (f"multitwist check: {'PASS' if self.ok else 'FAIL'} "
                f"(words {self.word_equal}, abelianized {self.abelianized_equal}, "
                f"peripheral {self.peripheral_ok})")


def multitwist_check(e: EndomorphismTable, lib: GeneratorLibrary,
                     factorization) -> MultitwistReport:
    """Verify a claimed factorization of e as a product of library twists.

    `factorization` is a token string like "T_a1 T_b1^-1" (or a token list);
    the test is exact generator-wise word equality.
    """
    tokens = (parse_tokens(factorization)
              if isinstance(factorization, str) else list(factorization))
    for name, _ in tokens:
        lib[name]
    prod = lib.evaluate(tokens)
    word_equal = prod == e
    ab_equal = intmat.mat_eq(abelianized_matrix(prod), abelianized_matrix(e))
    periph = verify_peripheral_structure(e).ok
    return MultitwistReport(word_equal, word_equal, ab_equal, periph)


def point_push(pres: SurfaceGroupPresentation, loop: Word) -> EndomorphismTable:
    """Push the basepoint puncture around `loop`: g |-> loop g loop^-1."""
    pres.check_word(free_reduce(loop))
    return inner_table(pres, loop)


# ---------------------------------------------------------------------------
# curated twist data (derived once from the planar fatgraph model and locked
# in by the validation suite)

_RANK2_TWISTS = [
    # name, images, inverse images, curve word
    ("T_a1", "a1 -> a1\nb1 -> b1 a1", "a1 -> a1\nb1 -> b1 A1", "a1"),
    ("T_b1", "a1 -> a1 B1\nb1 -> b1", "a1 -> a1 b1\nb1 -> b1", "b1"),
]

_RANK3_TWISTS = [
    ("T_a1", "a1 -> a1\nb1 -> b1 a1\nz1 -> z1",
     "a1 -> a1\nb1 -> b1 A1\nz1 -> z1", "a1"),
    ("T_b1", "a1 -> a1 B1\nb1 -> b1\nz1 -> z1",
     "a1 -> a1 b1\nb1 -> b1\nz1 -> z1", "b1"),
]

_RANK4_TWISTS = [
    ("T_a1", "a1 -> a1\nb1 -> b1 a1\na2 -> a2\nb2 -> b2",
     "a1 -> a1\nb1 -> b1 A1\na2 -> a2\nb2 -> b2", "a1"),
    ("T_b1", "a1 -> a1 B1\nb1 -> b1\na2 -> a2\nb2 -> b2",
     "a1 -> a1 b1\nb1 -> b1\na2 -> a2\nb2 -> b2", "b1"),
    ("T_c12", "a1 -> a1\nb1 -> a2 a1 b1\na2 -> a2\nb2 -> a1 a2 b2",
     "a1 -> a1\nb1 -> A1 A2 b1\na2 -> a2\nb2 -> A2 A1 b2", "a1 a2"),
    ("T_b2", "a1 -> a1\nb1 -> b1\na2 -> a2 B2\nb2 -> b2",
     "a1 -> a1\nb1 -> b1\na2 -> a2 b2\nb2 -> b2", "b2"),
    ("T_a2", "a1 -> a1\nb1 -> b1\na2 -> a2\nb2 -> b2 a2",
     "a1 -> a1\nb1 -> b1\na2 -> a2\nb2 -> b2 A2", "a2"),
]

_BUILTIN_TYPES = {(1, 0, 1), (1, 1, 0), (2, 1, 0), (2, 0, 1), (1, 1, 1)}


def _twist_generator(pres, name, images, inv_images, curve_text):
    table = EndomorphismTable.parse(pres, images, inv_images)
    cw = pres.word(curve_text)
    sym = transvection(pres, exponent_vector(cw, pres.rank))
    return NamedMcgGenerator(name, "twist", table, sym, cw)


def _push_generator(pres, name, loop, kind="push"):
    return NamedMcgGenerator(name, kind, point_push(pres, loop),
                             intmat.eye(pres.rank), None)


def standard_generators(surface: SurfaceType) -> GeneratorLibrary:
    """Built-in library for the supported types (1,0,1), (1,1,0), (2,1,0),
    (2,0,1), (1,1,1); other types must be loaded from data files."""
    key = (surface.g, surface.n, surface.p)
    if key not in _BUILTIN_TYPES:
        raise PresentationError(
            f"no built-in generator library for Sigma_{surface}; "
            "load one from a data file with load_library()")
    pres = build_surface_group(surface)
    gens: list[NamedMcgGenerator] = []
    relations: list[Relation] = []

    if pres.rank == 2:
        for row in _RANK2_TWISTS:
            gens.append(_twist_generator(pres, *row))
        gens.append(_push_generator(pres, "Push_a1", (1,)))
        gens.append(_push_generator(pres, "Push_b1", (2,)))
        gens.append(_push_generator(pres, "T_bdry1", pres.peripheral[0],
                                    kind="boundary-twist"))
        braid = ([("T_a1", 1), ("T_b1", 1), ("T_a1", 1)],
                 [("T_b1", 1), ("T_a1", 1), ("T_b1", 1)])
        chain = ([("T_a1", 1), ("T_b1", 1)] * 6, [("T_bdry1", 1)])
        relations = [braid, chain]

    elif pres.rank == 3:
        for row in _RANK3_TWISTS:
            gens.append(_twist_generator(pres, *row))
        # separating curve around the handle: T_sep = (T_a1 T_b1)^6, verified
        ta, tb = gens[0].table, gens[1].table
        tab = ta.compose(tb)
        sep = identity_table(pres)
        for _ in range(6):
            sep = sep.compose(tab)
        gens.append(NamedMcgGenerator(
            "T_sep", "twist", sep,
            transvection(pres, exponent_vector(pres.word("a1 b1 A1 B1"), 3)),
            pres.word("a1 b1 A1 B1")))
        gens.append(_push_generator(pres, "Push_a1", (1,)))
        gens.append(_push_generator(pres, "Push_b1", (2,)))
        gens.append(_push_generator(pres, "Push_z1", (3,)))
        gens.append(_push_generator(pres, "T_bdry1", pres.peripheral[0],
                                    kind="boundary-twist"))
        gens.append(_push_generator(pres, "T_bdry2", pres.peripheral[1],
                                    kind="boundary-twist"))
        relations = [
            ([("T_a1", 1), ("T_b1", 1), ("T_a1", 1)],
             [("T_b1", 1), ("T_a1", 1), ("T_b1", 1)]),
            ([("T_a1", 1), ("T_b1", 1)] * 6, [("T_sep", 1)]),
            ([("T_sep", 1), ("T_a1", 1)], [("T_a1", 1), ("T_sep", 1)]),
            ([("T_sep", 1), ("T_b1", 1)], [("T_b1", 1), ("T_sep", 1)]),
        ]

    else:
        for row in _RANK4_TWISTS:
            gens.append(_twist_generator(pres, *row))
        for j, nm in enumerate(["a1", "b1", "a2", "b2"]):
            gens.append(_push_generator(pres, f"Push_{nm}", (j + 1,)))
        gens.append(_push_generator(pres, "T_bdry1", pres.peripheral[0],
                                    kind="boundary-twist"))
        chain_names = ["T_a1", "T_b1", "T_c12", "T_b2", "T_a2"]
        for i in range(4):
            x, y = chain_names[i], chain_names[i + 1]
            relations.append(([(x, 1), (y, 1), (x, 1)],
                              [(y, 1), (x, 1), (y, 1)]))
        for i in range(5):
            for j in range(i + 2, 5):
                x, y = chain_names[i], chain_names[j]
                relations.append(([(x, 1), (y, 1)], [(y, 1), (x, 1)]))
        # odd-chain relation: both boundary twists of the chain neighborhood
        # act trivially on pi_1(base, v0), so the 6th power is the identity
        relations.append(([(nm, 1) for nm in chain_names] * 6, []))

    return GeneratorLibrary(pres, gens, relations)


# ---------------------------------------------------------------------------
# plain-text file format:
#   surface g n p
#   gen NAME kind
#   x -> word            (one per generator)
#   inv x -> word        (inverse table)
#   class -> word        (twists only: the twist curve's free class)
#   relation LHS = RHS   (words in generator names, powers as NAME^k)

def tokens_text(tokens) -> str:
    if not tokens:
        return "1"
    out = []
    for name, power in tokens:
        out.append(name if power == 1 else f"{name}^{power}")
    return " ".join(out)


def parse_tokens(text: str) -> list:
    text = text.strip()
    if text in ("", "1"):
        return []
    out = []
    for tok in text.split():
        if "^" in tok:
            name, p = tok.split("^")
            out.append((name, int(p)))
        else:
            out.append((tok, 1))
    return out


def save_library(lib: GeneratorLibrary) -> str:
    pres = lib.presentation
    s = pres.surface
    lines = [f"surface {s.g} {s.n} {s.p}"]
    for gen in lib.generators:
        lines.append(f"gen {gen.name} {gen.kind}")
        for nm, w in zip(pres.names, gen.table.images):
            lines.append(f"{nm} -> {pres.format(w)}")
        if gen.table.inverse_images is not None:
            for nm, w in zip(pres.names, gen.table.inverse_images):
                lines.append(f"inv {nm} -> {pres.format(w)}")
        if gen.curve_word is not None:
            lines.append(f"class -> {pres.format(gen.curve_word)}")
    for lhs, rhs in lib.relations:
        lines.append(f"relation {tokens_text(lhs)} = {tokens_text(rhs)}")
    return "\n".join(lines) + "\n"


def load_library(text: str, library_id: str = "") -> GeneratorLibrary:
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("surface "):
        raise PresentationError("library file must start with 'surface g n p'")
    g, n, p = (int(t) for t in lines[0].split()[1:4])
    pres = build_surface_group(SurfaceType(g, n, p))
    if not pres.is_free:
        raise PresentationError(
            "loading closed-surface libraries is not supported (no general "
            "inverse-table verification); supply a punctured type")
    gens: list[NamedMcgGenerator] = []
    relations: list[Relation] = []
    cur = None          # (name, kind, imgs{}, invs{}, class_word)

    def flush():
        nonlocal cur
        if cur is None:
            return
        name, kind, imgs, invs, cls = cur
        images = tuple(imgs[nm] for nm in pres.names)
        inv = tuple(invs[nm] for nm in pres.names) if invs else None
        if inv is None:
            inv = nielsen_inverse(pres, images)
            if inv is None:
                raise PresentationError(
                    f"generator {name}: no inverse lines and Nielsen "
                    "inversion failed (not an automorphism?)")
        table = EndomorphismTable(pres, images, inv)
        if cls is not None:
            sym = transvection(pres, exponent_vector(cls, pres.rank))
        elif kind in ("push", "boundary-twist"):
            sym = intmat.eye(pres.rank)
        else:
            sym = abelianized_matrix(table)
        gens.append(NamedMcgGenerator(name, kind, table, sym, cls))
        cur = None

    for ln in lines[1:]:
        if ln.startswith("gen "):
            flush()
            _, name, kind = ln.split()
            cur = (name, kind, {}, {}, None)
        elif ln.startswith("relation "):
            flush()
            lhs, rhs = ln[len("relation "):].split("=")
            relations.append((parse_tokens(lhs), parse_tokens(rhs)))
        elif ln.startswith("inv "):
            lhs, rhs = ln[len("inv "):].split("->")
            cur[3][lhs.strip()] = pres.word(rhs.strip())
        elif ln.startswith("class ->"):
            cur = (*cur[:4], pres.word(ln.split("->")[1].strip()))
        else:
            lhs, rhs = ln.split("->")
            cur[2][lhs.strip()] = pres.word(rhs.strip())
    flush()
    return GeneratorLibrary(pres, gens, relations,
                            library_id=library_id or "file")


def nielsen_inverse(pres: SurfaceGroupPresentation, images):
    """Invert a free-group automorphism given by generator images, by Nielsen
    reduction of the image tuple.  Returns the inverse images or None."""
    r = pres.rank
    W = [free_reduce(w) for w in images]
    moves = []  # elementary automorphisms applied on the right, in order

    def total():
        return sum(len(w) for w in W)

    guard = 0
    while total() > r:
        guard += 1
        if guard > 10000:
            return None
        best = None  # (new_len, i, replacement, move_images)
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                for sj in (1, -1):
                    wj = W[j] if sj > 0 else winv(W[j])
                    for side in ("R", "L"):
                        cand = wmul(W[i], wj) if side == "R" else wmul(wj, W[i])
                        if len(cand) < len(W[i]):
                            # the applied elementary map rho: x_i -> images
                            rho = [(k + 1,) for k in range(r)]
                            if side == "R":
                                rho[i] = wmul((i + 1,), (sj * (j + 1),))
                            else:
                                rho[i] = wmul((sj * (j + 1),), (i + 1,))
                            if best is None or len(cand) < best[0]:
                                best = (len(cand), i, cand, tuple(rho))
        if best is None:
            return None
        _, i, cand, rho = best
        W[i] = cand
        moves.append(rho)

    # W must now be a signed permutation of the basis
    perm = {}
    for i, w in enumerate(W):
        if len(w) != 1:
            return None
        perm[i] = w[0]
    if sorted(abs(v) for v in perm.values()) != list(range(1, r + 1)):
        return None
    # inverse of the final letter permutation pi: x_i -> perm[i]
    pi_inv = [None] * r
    for i, v in enumerate(perm.values()):
        pi_inv[abs(v) - 1] = (i + 1,) if v > 0 else (-(i + 1),)
    # phi = pi o rho_k^-1 o ... o rho_1^-1, so phi^-1 = rho_1 o ... o rho_k o pi^-1
    acc = [(k + 1,) for k in range(r)]   # identity images

    def apply_images(base, imgs):
        # table of base o imgs (imgs applied first)
        out = []
        for w in imgs:
            word = ()
            for x in w:
                piece = base[x - 1] if x > 0 else winv(base[-x - 1])
                word = wmul(word, piece)
            out.append(word)
        return out

    for rho in moves:
        acc = apply_images(acc, rho)
    acc = apply_images(acc, pi_inv)
    # verify
    cand = EndomorphismTable(pres, tuple(acc))
    orig = EndomorphismTable(pres, tuple(images))
    for k in range(r):
        if orig(cand((k + 1,))) != (k + 1,) or cand(orig((k + 1,))) != (k + 1,):
            return None
    return tuple(acc)
