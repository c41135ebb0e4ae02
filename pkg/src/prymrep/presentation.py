"""Surface group presentations with peripheral structure, and endomorphism
tables for the mapping class group action on pi_1.

Conventions (fixed once, used everywhere):

* generators a1, b1, ..., ag, bg, z1, ..., z_{n+p-1}; the free case has rank
  2g + n + p - 1, the closed case carries the single relator
  R = [a1,b1]...[ag,bg];
* peripheral words z_1, ..., z_{n+p} with R * z_1 * ... * z_{n+p} = 1, i.e.
  the last one is derived:  z_{n+p} = (R z_1 ... z_{n+p-1})^{-1};
* boundary components are listed before punctures; the distinction is
  metadata only, pi_1 treats both identically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import (Word, free_reduce, wmul, winv, wpow, commutator,
                    exponent_vector, cyclic_conjugator, format_word,
                    parse_word, max_index)


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceType:
    """Orientable surface of genus g with n boundary components, p punctures."""
    g: int
    n: int
    p: int

    def __post_init__(self):
        if self.g < 0 or self.n < 0 or self.p < 0:
            raise PresentationError("g, n, p must be nonnegative")

    @property
    def chi(self) -> int:
        return 2 - 2 * self.g - self.n - self.p

    @property
    def peripherals(self) -> int:
        return self.n + self.p

    def is_nondegenerate(self) -> bool:
        """pi_1 is a nonabelian free/surface group usable for covers."""
        return self.g >= 1 or self.peripherals >= 3

    def __str__(self):
        return f"{self.g},{self.n},{self.p}"

    @staticmethod
    def parse(text: str) -> "SurfaceType":
        parts = [int(t) for t in text.replace(" ", "").split(",")]
        if len(parts) != 3:
            raise PresentationError(f"expected 'g,n,p', got {text!r}")
        return SurfaceType(*parts)


class SurfaceGroupPresentation:
    """Presentation of pi_1(Sigma_{g,n}^p, v0) with ordered peripheral words."""

    def __init__(self, surface: SurfaceType):
        if not surface.is_nondegenerate():
            raise PresentationError(
                f"degenerate surface {surface}: need g >= 1 or n+p >= 3")
        self.surface = surface
        g, k = surface.g, surface.peripherals
        self.is_free = k >= 1
        names = []
        for i in range(1, g + 1):
            names += [f"a{i}", f"b{i}"]
        for j in range(1, k):  # z_{n+p} is derived, not a generator
            names.append(f"z{j}")
        self.names = tuple(names)
        self.rank = len(names)

        R: Word = ()
        for i in range(1, g + 1):
            R = wmul(R, commutator((2 * i - 1,), (2 * i,)))
        self.relator: Word | None = None if self.is_free else R

        peripheral: list[Word] = []
        if k >= 1:
            zs = [(2 * g + 1 + j,) for j in range(k - 1)]
            last = winv(wmul(R, *zs))
            peripheral = zs + [last]
            assert wmul(R, *peripheral) == ()
        self.peripheral = tuple(peripheral)

    def __eq__(self, other):
        return (isinstance(other, SurfaceGroupPresentation)
                and other.surface == self.surface)

    def __hash__(self):
        return hash(self.surface)

    def __repr__(self):
        kind = "free" if self.is_free else "one-relator"
        return (f"<pi_1(Sigma_{self.surface}) {kind} on "
                f"{', '.join(self.names)}>")

    def generator(self, name: str) -> int:
        """Signed index for a generator name; bare 'a'/'b'/'z' resolve when
        unambiguous (so 'a' means 'a1' on a genus-1 surface)."""
        if name in self.names:
            return self.names.index(name) + 1
        matches = [i for i, nm in enumerate(self.names)
                   if nm == name or (nm[0] == name and nm[1:] == "1")]
        if len(matches) == 1:
            return matches[0] + 1
        raise PresentationError(f"unknown generator {name!r}")

    def word(self, text: str) -> Word:
        return parse_word(text, self.names)

    def format(self, w: Word) -> str:
        return format_word(w, self.names)

    def check_word(self, w: Word):
        if max_index(w) > self.rank:
            raise PresentationError(
                f"word uses generator index > rank {self.rank}")

    def peripheral_kind(self, i: int) -> str:
        """'boundary' or 'puncture' for peripheral index i (0-based)."""
        return "boundary" if i < self.surface.n else "puncture"


def build_surface_group(surface: SurfaceType) -> SurfaceGroupPresentation:
    return SurfaceGroupPresentation(surface)


class EndomorphismTable:
    """An endomorphism of the surface group: one image word per generator.

    A table flagged as an automorphism carries its inverse table; validity
    (round trip = identity, and in the closed case relator |-> conjugate of
    relator, orientation preserving) is checked on construction.
    """

    def __init__(self, pres: SurfaceGroupPresentation, images,
                 inverse_images=None, _checked=False):
        self.presentation = pres
        images = tuple(free_reduce(w) for w in images)
        if len(images) != pres.rank:
            raise PresentationError("need one image per generator")
        for w in images:
            pres.check_word(w)
        self.images = images
        self.inverse_images = (tuple(free_reduce(w) for w in inverse_images)
                               if inverse_images is not None else None)
        if self.inverse_images is not None and not _checked:
            self._check_automorphism()

    # -- basic action ------------------------------------------------------

    def __call__(self, w: Word) -> Word:
        out: list[int] = []
        for x in w:
            img = self.images[x - 1] if x > 0 else winv(self.images[-x - 1])
            for y in img:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def apply_inverse(self, w: Word) -> Word:
        return self.inverse().__call__(w)

    @property
    def is_automorphism(self) -> bool:
        return self.inverse_images is not None

    def inverse(self) -> "EndomorphismTable":
        if self.inverse_images is None:
            raise PresentationError("no inverse table attached")
        return EndomorphismTable(self.presentation, self.inverse_images,
                                 self.images, _checked=True)

    def _check_automorphism(self):
        inv = EndomorphismTable(self.presentation, self.inverse_images)
        for j in range(self.presentation.rank):
            g = (j + 1,)
            if self(inv(g)) != g or inv(self(g)) != g:
                raise PresentationError(
                    f"inverse table does not invert on generator {j + 1}")
        rel = self.presentation.relator
        if rel is not None:
            img = self(rel)
            c = cyclic_conjugator(img, rel)
            if c is None:
                if cyclic_conjugator(img, winv(rel)) is not None:
                    raise PresentationError(
                        "orientation-reversing table: relator |-> relator^-1")
                raise PresentationError("relator not sent to a conjugate")

    # -- algebra -----------------------------------------------------------

    def compose(self, other: "EndomorphismTable") -> "EndomorphismTable":
        """self o other (other applied first)."""
        if other.presentation != self.presentation:
            raise PresentationError("mismatched presentations")
        images = tuple(self(w) for w in other.images)
        inv = None
        if self.is_automorphism and other.is_automorphism:
            oinv = other.inverse()
            sinv = self.inverse()
            inv = tuple(oinv(w) for w in sinv.images)
        return EndomorphismTable(self.presentation, images, inv, _checked=True)

    def __eq__(self, other):
        return (isinstance(other, EndomorphismTable)
                and other.presentation == self.presentation
                and other.images == self.images)

    def __hash__(self):
        return hash((self.presentation.surface, self.images))

    def __repr__(self):
        pres = self.presentation
        body = ", ".join(f"{nm} -> {pres.format(w)}"
                         for nm, w in zip(pres.names, self.images))
        return f"<endomorphism {body}>"

    # -- text form: one "gen -> word" line per generator ---------------------

    def serialize(self) -> str:
        pres = self.presentation
        return "\n".join(f"{nm} -> {pres.format(w)}"
                         for nm, w in zip(pres.names, self.images))

    @staticmethod
    def parse(pres: SurfaceGroupPresentation, text: str,
              inverse_text=None) -> "EndomorphismTable":
        def read(block):
            imgs = {}
            for line in block.strip().splitlines():
                line = line.strip()
                if not line:
                    continue
                lhs, rhs = line.split("->")
                imgs[lhs.strip()] = pres.word(rhs.strip())
            return tuple(imgs[nm] for nm in pres.names)
        inv = read(inverse_text) if inverse_text is not None else None
        return EndomorphismTable(pres, read(text), inv)


def identity_table(pres: SurfaceGroupPresentation) -> EndomorphismTable:
    imgs = tuple((j + 1,) for j in range(pres.rank))
    return EndomorphismTable(pres, imgs, imgs, _checked=True)


def inner_table(pres: SurfaceGroupPresentation, u: Word) -> EndomorphismTable:
    """Conjugation g |-> u g u^-1 (an automorphism)."""
    u = free_reduce(u)
    imgs = tuple(wmul(u, (j + 1,), winv(u)) for j in range(pres.rank))
    inv = tuple(wmul(winv(u), (j + 1,), u) for j in range(pres.rank))
    return EndomorphismTable(pres, imgs, inv, _checked=True)


# --- spec operations as free functions -------------------------------------

def apply_endomorphism(e: EndomorphismTable, w: Word) -> Word:
    e.presentation.check_word(w)
    return e(w)


def compose(e1: EndomorphismTable, e2: EndomorphismTable) -> EndomorphismTable:
    return e1.compose(e2)


@dataclass
class PeripheralReport:
    ok: bool
    conjugators: list  # per peripheral word: Word or None

    def __str__(self):
        return ("peripheral structure: PASS" if self.ok
                else "peripheral structure: FAIL "
                     f"(indices {[i for i, c in enumerate(self.conjugators) if c is None]})")


def verify_peripheral_structure(e: EndomorphismTable) -> PeripheralReport:
    """For each peripheral word z, find c with e(z) = c z c^-1."""
    conj = []
    for z in e.presentation.peripheral:
        conj.append(cyclic_conjugator(e(z), z))
    return PeripheralReport(all(c is not None for c in conj), conj)


def abelianized_matrix(e: EndomorphismTable):
    """Matrix of the induced map on Z^rank; column j = image of generator j.

    Functorial: abelianized_matrix(e1 o e2) = product of the matrices.
    """
    import numpy as np
    r = e.presentation.rank
    M = np.zeros((r, r), dtype=object)
    for j, w in enumerate(e.images):
        for i, c in enumerate(exponent_vector(w, r)):
            M[i, j] = c
    return M
