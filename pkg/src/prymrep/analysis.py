"""Orbit finiteness search, invariants/coinvariants, marking stabilizers,
and point-pushing certificates.

The certificate encodes the paper-independent content of a virtual-surjection
witness: a nonzero v0 in V_K fixed by a finite-index subgroup G of the
puncture-filled mapping class group, and the induced nonzero G-invariant
functional psi = <v0, .> o projection on H1(K;Q).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import intmat
from .util import content_hash, matrix_to_lists, vector_to_list
from .covers import (CoverData, QuotientMarking, CapExceeded,
                     finite_group_aut)
from .generators import GeneratorLibrary, tokens_text, parse_tokens
from .prym import (BoundarySubspace, SymplecticFormMatrix, boundary_subspace,
                   intersection_form, prym_matrix, bundle_arrays, TOOL_VERSION)


# ---------------------------------------------------------------------------
# linear invariants

def fixed_subspace(matrices) -> np.ndarray:
    """Primitive basis (columns) of the common fixed space of the matrices:
    the intersection of ker(M - I)."""
    mats = [np.asarray(M, dtype=object) for M in matrices]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    for M in mats:
        if M.shape != (n, n):
            raise ValueError("matrices must be square of equal dimension")
    stacked = np.concatenate([M - intmat.eye(n) for M in mats], axis=0)
    return intmat.kernel_basis(stacked)


def coinvariants_dimension(matrices) -> int:
    """dim of the coinvariants V / span{x - Mx}, computed two ways
    (duality with the fixed space of the transposes, and direct saturation)
    which must agree."""
    mats = [np.asarray(M, dtype=object) for M in matrices]
    n = mats[0].shape[0]
    # (a) duality: (V_G)^* = (V^*)^G
    dual = fixed_subspace([M.T for M in mats]).shape[1]
    # (b) direct: W = sum (M - I) V, saturated under the action until stable
    W = np.concatenate([M - intmat.eye(n) for M in mats], axis=1)
    r = intmat.rank(W)
    while True:
        W2 = np.concatenate([W] + [M @ W for M in mats], axis=1)
        r2 = intmat.rank(W2)
        if r2 == r:
            break
        W, r = W2, r2
    direct = n - r
    if dual != direct:
        raise ArithmeticError(
            f"coinvariants disagree: duality {dual} vs direct {direct}")
    return direct


# ---------------------------------------------------------------------------
# orbit search

@dataclass
class OrbitResult:
    status: str                 # "finite" | "cap-exceeded"
    orbit_size: int | None
    cap: int
    witness: tuple              # primitive integral starting vector
    orbit: list = field(default_factory=list, repr=False)

    @property
    def finite(self) -> bool:
        return self.status == "finite"


def _primitive(v) -> tuple:
    v = [int(x) for x in v]
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("orbit search needs a nonzero vector")
    return tuple(x // g for x in v)


def orbit_search(matrices, v, cap: int = 10 ** 6) -> OrbitResult:
    """Breadth-first closure of {v} under the matrices and their inverses.

    v is scaled to a primitive integer vector (no sign normalization: v and
    -v are distinct orbit points).  "cap-exceeded" is a status, never a
    proof of infinitude.
    """
    for x in np.asarray(v).flat:
        if not isinstance(x, (int, np.integer)):
            raise ValueError("non-integral vector: scale to primitive first")
    start = _primitive(np.asarray(v).flatten())
    mats = [np.asarray(M, dtype=object) for M in matrices]
    mats = mats + [intmat.inverse_unimodular(M) for M in mats]
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            uv = np.array(u, dtype=object)
            for M in mats:
                w = tuple(int(x) for x in (M @ uv))
                if w not in seen:
                    if len(seen) >= cap:
                        return OrbitResult("cap-exceeded", None, cap, start)
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    orbit = sorted(seen)
    # closure re-verification: every image of every member stays inside
    for u in orbit:
        uv = np.array(u, dtype=object)
        for M in mats:
            if tuple(int(x) for x in (M @ uv)) not in seen:
                raise ArithmeticError("orbit closure verification failed")
    return OrbitResult("finite", len(orbit), cap, start, orbit)


# ---------------------------------------------------------------------------
# candidate vectors for the finite-orbit search

def candidate_vectors(matrices, dim: int, max_word_len: int = 3,
                      order_bound: int = 64, sup_norm: int = 1,
                      max_candidates: int = 5000) -> list:
    """Deterministic candidate list for orbit searches.

    Strategy "finite-order-fixed": for short words M in the generator
    matrices that have finite order, take primitive bases of the fixed
    lattice ker(M - I) and of its invariant complement ker(I + M + ... +
    M^{ord-1}).  Strategy "short-vectors": primitive vectors of sup-norm
    <= sup_norm (first nonzero positive).  Duplicates removed, order kept.
    """
    mats = [np.asarray(M, dtype=object) for M in matrices]
    out = []
    seen = set()

    def push(vec):
        v = tuple(int(x) for x in vec)
        if all(x == 0 for x in v):
            return
        g = 0
        for x in v:
            g = gcd(g, abs(x))
        v = tuple(x // g for x in v)
        if v not in seen and len(out) < max_candidates:
            seen.add(v)
            out.append(v)

    # finite-order words, deterministic enumeration
    words = [[i] for i in range(len(mats))]
    for _ in range(max_word_len - 1):
        words += [w + [i] for w in words if len(w) == len(words[0])
                  for i in range(len(mats))]
    words = [w for w in words if len(w) <= max_word_len]
    for w in words:
        M = intmat.eye(dim)
        for i in w:
            M = M @ mats[i]
        # bounded order test
        P = M
        order = None
        for k in range(1, order_bound + 1):
            if intmat.mat_eq(P, intmat.eye(dim)):
                order = k
                break
            P = P @ M
        if order is None or order == 1:
            continue
        fixed = intmat.kernel_basis(M - intmat.eye(dim))
        for col in range(fixed.shape[1]):
            push(fixed[:, col])
        S = intmat.eye(dim)
        Pk = intmat.eye(dim)
        for _ in range(order - 1):
            Pk = Pk @ M
            S = S + Pk
        anti = intmat.kernel_basis(S)
        for col in range(anti.shape[1]):
            push(anti[:, col])
        if anti.shape[1] >= 2:
            push(anti[:, 0] + anti[:, 1])

    # short lattice vectors
    def short_vectors(prefix):
        if len(prefix) == dim:
            if any(prefix):
                first = next(x for x in prefix if x != 0)
                if first > 0:
                    push(prefix)
            return
        for x in range(-sup_norm, sup_norm + 1):
            short_vectors(prefix + [x])

    if dim <= 12:
        short_vectors([])
    return out


CANDIDATE_STRATEGY = "finite-order-fixed+short-vectors"


# ---------------------------------------------------------------------------
# marking stabilizer

@dataclass
class StabilizerData:
    marking: QuotientMarking
    orbit: list                     # canonical image tuples (Aut(Q) classes)
    schreier_generators: list       # token lists in MCG generator names
    index: int

    def generator_names(self) -> list:
        return [tokens_text(t) for t in self.schreier_generators]


def marking_stabilizer(marking: QuotientMarking, lib: GeneratorLibrary,
                       cap: int = 10 ** 5, aut_cap: int = 16) -> StabilizerData:
    """Orbit of the Aut(Q)-class of the marking under the library action
    (f acts by precomposition with f^-1), with Schreier generators of the
    stabilizer from the orbit graph."""
    pres = marking.presentation
    if lib.presentation != pres:
        raise ValueError("library/marking presentation mismatch")
    Q = marking.group
    auts = finite_group_aut(Q, cap=aut_cap)

    def canon(images) -> tuple:
        return min(tuple(a[x] for x in images) for a in auts)

    def act(images, gen) -> tuple:
        """Images of marking o f^-1 for f = the generator's table."""
        inv = gen.table.inverse()
        out = []
        for j in range(pres.rank):
            w = inv.images[j]
            e = Q.identity
            for x in w:
                gx = images[abs(x) - 1]
                e = Q.mul(e, gx if x > 0 else Q.inv(gx))
            out.append(e)
        return tuple(out)

    start_imgs = tuple(marking.images)
    start = canon(start_imgs)
    # BFS over classes; keep one concrete representative tuple per class
    rep = {start: start_imgs}
    access = {start: []}            # token list reaching the class
    order = [start]
    schreier = []
    frontier = [start]
    steps = []
    for g in lib.generators:
        steps.append((g, 1))
        steps.append((g, -1))
    while frontier:
        nxt = []
        for cls in frontier:
            imgs = rep[cls]
            for g, sign in steps:
                gen_for_act = g if sign == 1 else _inverse_gen(g)
                new_imgs = act(imgs, gen_for_act)
                new_cls = canon(new_imgs)
                tok = (g.name, sign)
                if new_cls not in rep:
                    if len(rep) >= cap:
                        raise CapExceeded(
                            f"marking orbit exceeded cap {cap}")
                    rep[new_cls] = new_imgs
                    access[new_cls] = access[cls] + [tok]
                    order.append(new_cls)
                    nxt.append(new_cls)
                else:
                    word = access[cls] + [tok] + _invert_tokens(access[new_cls])
                    word = _reduce_tokens(word)
                    _add_schreier(schreier, word)
        frontier = nxt
    return StabilizerData(marking, order, schreier, len(order))


class _InverseGenView:
    def __init__(self, gen):
        self.name = gen.name
        self.kind = gen.kind
        self.table = gen.table.inverse()


def _inverse_gen(gen):
    return _InverseGenView(gen)


def _invert_tokens(tokens):
    return [(name, -sign) for name, sign in reversed(tokens)]


def _reduce_tokens(tokens):
    out = []
    for name, sign in tokens:
        if out and out[-1][0] == name and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((name, sign))
    return out


def _add_schreier(schreier, word):
    """Append a Schreier word unless it (or its inverse) is already kept."""
    if word and word not in schreier and _invert_tokens(word) not in schreier:
        schreier.append(word)


# ---------------------------------------------------------------------------
# point-pushing certificates

CERT_FORMAT = "point-pushing-certificate"


class CertificateError(ValueError):
    pass


def certify_point_pushing(cover: CoverData, v0, g_words, lib: GeneratorLibrary,
                          bundle: dict, library_id: str = "") -> dict:
    """Emit a self-contained certificate that psi = <v0, .> o projection is a
    nonzero functional on H1(K;Q) invariant under the subgroup G generated
    by the given words (in twist generator names, drawn from the split
    puncture-filled copy: no pushes).

    The conclusion (H1(K;Q))_G != 0 then follows by duality, hence the
    finite-index subgroup K x| G virtually surjects onto Z.
    """
    pres = cover.presentation
    if pres.surface.n < 1:
        raise CertificateError(
            "splitting unavailable: the certificate needs a surface with "
            "n >= 1 boundary components")
    v0 = np.asarray([int(x) for x in v0], dtype=object)
    if all(x == 0 for x in v0):
        raise CertificateError("v0 = 0")
    form, proj, bgens = bundle_arrays(bundle)
    if v0.shape[0] != form.shape[0]:
        raise CertificateError("v0 has the wrong dimension for V_K")

    psi = (form @ v0) @ proj          # row functional on the H1(K) basis
    if all(x == 0 for x in psi):
        raise CertificateError("psi = 0 (form degenerate at v0?)")

    gen_entries = []
    words = [parse_tokens(w) if isinstance(w, str) else list(w)
             for w in g_words]
    for idx, tokens in enumerate(words):
        for name, _ in tokens:
            if lib[name].kind != "twist":
                raise CertificateError(
                    f"generator word {tokens_text(tokens)} uses {name} of "
                    f"kind {lib[name].kind}: the split copy admits twists only")
        raw, vk = _word_matrices(bgens, tokens)
        if not intmat.mat_eq((vk @ v0).reshape(-1, 1), v0.reshape(-1, 1)):
            raise CertificateError(
                f"generator {tokens_text(tokens)} moves v0")
        if not intmat.mat_eq((psi @ raw).reshape(1, -1), psi.reshape(1, -1)):
            raise CertificateError(
                f"psi not invariant under {tokens_text(tokens)}")
        gen_entries.append({
            "name": f"G{idx + 1}",
            "word": tokens_text(tokens),
            "raw_matrix_hash": content_hash(matrix_to_lists(raw)),
            "invariance": "pass",
        })
    witness = next(i for i, x in enumerate(psi) if x != 0)
    return {
        "format": CERT_FORMAT,
        "surface": str(pres.surface),
        "marking_hash": cover.marking.content_key(),
        "library_id": library_id or lib.library_id,
        "basis_meta": bundle["basis_meta"],
        "v0": vector_to_list(v0),
        "psi": vector_to_list(psi),
        "generators": gen_entries,
        "witness_index": int(witness),
        "tool_version": TOOL_VERSION,
    }


def _word_matrices(bundle_gens, tokens):
    """Product of bundle raw/vk matrices over a token word."""
    raw = vk = None
    for name, power in tokens:
        if name not in bundle_gens:
            raise CertificateError(f"bundle has no generator {name!r}")
        R = intmat.arr(bundle_gens[name]["raw_matrix"])
        V = intmat.arr(bundle_gens[name]["vk_matrix"])
        if power < 0:
            R = intmat.inverse_unimodular(R)
            V = intmat.inverse_unimodular(V)
            power = -power
        for _ in range(power):
            raw = R if raw is None else raw @ R
            vk = V if vk is None else vk @ V
    if raw is None:
        n = len(next(iter(bundle_gens.values()))["raw_matrix"])
        m = len(next(iter(bundle_gens.values()))["vk_matrix"])
        raw, vk = intmat.eye(n), intmat.eye(m)
    return raw, vk


@dataclass
class VerifyReport:
    checks: list        # (name, passed)

    @property
    def ok(self) -> bool:
        return all(p for _, p in self.checks)

    def failed(self) -> list:
        return [n for n, p in self.checks if not p]

    def __str__(self):
        lines = [f"{'pass' if p else 'FAIL'} {n}" for n, p in self.checks]
        lines.append(f"certificate: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def verify_certificate(bundle: dict, cert: dict) -> VerifyReport:
    """Independent re-check of a certificate against a Prym bundle:
    recomputes psi from v0, the form and the projection, and re-verifies
    hashes, invariance and nonvanishing."""
    checks = []

    def add(name, passed):
        checks.append((name, bool(passed)))

    add("format", cert.get("format") == CERT_FORMAT
        and bundle.get("format") == "prym-bundle")
    add("surface_match", cert.get("surface") == bundle.get("surface"))
    add("marking_match", cert.get("marking_hash") == bundle.get("marking_hash"))

    form, proj, bgens = bundle_arrays(bundle)
    v0 = np.asarray([int(x) for x in cert.get("v0", [])], dtype=object)
    ok_dim = v0.shape[0] == form.shape[0]
    add("v0_dimension", ok_dim)
    if not ok_dim:
        return VerifyReport(checks)
    add("v0_nonzero", any(x != 0 for x in v0))

    psi_rec = (form @ v0) @ proj
    stored = np.asarray([int(x) for x in cert.get("psi", [])], dtype=object)
    if stored.shape[0] == psi_rec.shape[0] and any(x != 0 for x in stored):
        k = next((i for i, x in enumerate(psi_rec) if x != 0), None)
        proportional = (k is not None and stored[k] != 0 and all(
            stored[i] * psi_rec[k] == psi_rec[i] * stored[k]
            for i in range(len(stored))))
    else:
        proportional = False
    add("psi_consistent", proportional)

    for entry in cert.get("generators", []):
        nm = entry.get("name", "?")
        try:
            tokens = parse_tokens(entry.get("word", ""))
            raw, vk = _word_matrices(bgens, tokens)
        except (CertificateError, KeyError):
            add(f"{nm}_matrix", False)
            continue
        add(f"{nm}_matrix",
            content_hash(matrix_to_lists(raw)) == entry.get("raw_matrix_hash"))
        add(f"{nm}_invariance",
            intmat.mat_eq((psi_rec @ raw).reshape(1, -1),
                          psi_rec.reshape(1, -1)))
        add(f"{nm}_fixes_v0",
            intmat.mat_eq((vk @ v0).reshape(-1, 1), v0.reshape(-1, 1)))

    w = cert.get("witness_index", -1)
    add("witness", isinstance(w, int) and 0 <= w < len(psi_rec)
        and psi_rec[w] != 0)
    return VerifyReport(checks)


# ---------------------------------------------------------------------------
# the full counterexample pipeline (stabilizer -> candidates -> orbit ->
# stabilizer of v0 in the twist subgroup -> certificate)

@dataclass
class PipelineResult:
    stabilizer: StabilizerData
    orbit_result: OrbitResult | None
    v0: tuple | None
    g_words: list
    certificate: dict | None
    bundle: dict
    cert_surface: str
    candidates_tried: int
    strategy: str = CANDIDATE_STRATEGY


def point_pushing_pipeline(marking: QuotientMarking, lib: GeneratorLibrary,
                           cap: int = 10 ** 6, precap: int = 20000,
                           aut_cap: int = 16) -> PipelineResult:
    """Chain: marking stabilizer -> candidate search -> orbit_search ->
    certificate, switching one puncture to a boundary component when the
    base surface has n = 0 (the pi_1 data is identical; the certificate
    construction needs n >= 1 for the Birman splitting)."""
    from .presentation import SurfaceType, build_surface_group
    from .generators import standard_generators

    stab = marking_stabilizer(marking, lib, aut_cap=aut_cap)
    pres = marking.presentation
    s = pres.surface
    if s.n >= 1:
        cert_surface = s
        cert_pres, cert_lib, cert_marking = pres, lib, marking
    else:
        cert_surface = SurfaceType(s.g, 1, s.p - 1)
        cert_pres = build_surface_group(cert_surface)
        cert_lib = standard_generators(cert_surface)
        cert_marking = QuotientMarking(cert_pres, marking.group,
                                       marking.images,
                                       characteristic=marking.characteristic)
    cover = CoverData(cert_marking)
    boundary = boundary_subspace(cover)
    form = intersection_form(cover, boundary)

    # Prym matrices of the stabilizer generators (on the certificate cover;
    # the pi_1 action is identical to the original one)
    stab_tables = [(tokens_text(t), cert_lib.evaluate(t))
                   for t in stab.schreier_generators]
    stab_mats = [prym_matrix(cover, tbl, boundary, name=nm).matrix
                 for nm, tbl in stab_tables]

    bundle = build_bundle_cached(cover, cert_lib)

    result = None
    v0 = None
    tried = 0
    if stab_mats and boundary.dim_v > 0:
        cands = candidate_vectors(stab_mats, boundary.dim_v)
        survivors = []
        for cand in cands:
            tried += 1
            r = orbit_search(stab_mats, cand, cap=min(precap, cap))
            if r.finite:
                survivors.append(cand)
                break
        for cand in survivors:
            r = orbit_search(stab_mats, cand, cap=cap)
            if r.finite:
                result, v0 = r, cand
                break

    g_words = []
    cert = None
    if v0 is not None:
        g_words = stabilizer_of_vector(cert_lib, cover, boundary, bundle, v0,
                                       cap=cap)
        if g_words:
            cert = certify_point_pushing(cover, v0, g_words, cert_lib, bundle,
                                         library_id=cert_lib.library_id)
    return PipelineResult(stab, result, v0, g_words, cert, bundle,
                          str(cert_surface), tried)


def build_bundle_cached(cover, lib):
    from .prym import build_bundle
    return build_bundle(cover, lib.generators, library_id=lib.library_id)


def stabilizer_of_vector(lib: GeneratorLibrary, cover: CoverData,
                         boundary: BoundarySubspace, bundle: dict, v0,
                         cap: int = 10 ** 6) -> list:
    """Schreier generators (token lists) of the stabilizer of v0 inside the
    subgroup generated by the library's twist generators."""
    twist_gens = [g for g in lib.generators if g.kind == "twist"]
    _, _, bgens = bundle_arrays(bundle)
    mats = {}
    for g in twist_gens:
        M = intmat.arr(bgens[g.name]["vk_matrix"])
        mats[(g.name, 1)] = M
        mats[(g.name, -1)] = intmat.inverse_unimodular(M)

    start = tuple(int(x) for x in v0)
    access = {start: []}
    order = [start]
    schreier = []
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            uv = np.array(u, dtype=object)
            for g in twist_gens:
                for sign in (1, -1):
                    w = tuple(int(x) for x in (mats[(g.name, sign)] @ uv))
                    tok = (g.name, sign)
                    if w not in access:
                        if len(access) >= cap:
                            raise CapExceeded(
                                f"v0 twist-orbit exceeded cap {cap}")
                        access[w] = access[u] + [tok]
                        order.append(w)
                        nxt.append(w)
                    else:
                        word = _reduce_tokens(
                            access[u] + [tok] + _invert_tokens(access[w]))
                        _add_schreier(schreier, word)
        frontier = nxt
    return schreier
