import random

import pytest

from prymrep import intmat
from prymrep.words import wmul
from prymrep.presentation import (SurfaceType, build_surface_group,
                                  identity_table, abelianized_matrix,
                                  compose)
from prymrep.generators import (standard_generators, validate_mcg_relations,
                                point_push, multitwist_check, save_library,
                                load_library, GeneratorLibrary,
                                NamedMcgGenerator, PresentationError,
                                transvection)

BUILTINS = [(1, 0, 1), (1, 1, 0), (2, 1, 0), (2, 0, 1), (1, 1, 1)]


@pytest.mark.parametrize("t", BUILTINS)
def test_builtin_libraries_validate(t):
    lib = standard_generators(SurfaceType(*t))
    rep = validate_mcg_relations(lib)
    assert rep.ok, str(rep)


def test_unsupported_type_rejected():
    with pytest.raises(PresentationError):
        standard_generators(SurfaceType(3, 0, 1))


def test_torus_twist_tables_pinned():
    lib = standard_generators(SurfaceType(1, 0, 1))
    p = lib.presentation
    ta, tb = lib["T_a1"].table, lib["T_b1"].table
    assert ta.images == (p.word("a1"), p.word("b1 a1"))
    assert tb.images == (p.word("a1 B1"), p.word("b1"))
    # braid relation
    assert compose(ta, compose(tb, ta)) == compose(tb, compose(ta, tb))
    # symplectic image of T_a1: transvection fixing a1, b1 |-> b1 + a1
    assert intmat.mat_eq(lib["T_a1"].symplectic_image,
                         intmat.arr([[1, 1], [0, 1]]))


def test_transvection_matches_declared():
    for t in BUILTINS:
        lib = standard_generators(SurfaceType(*t))
        for g in lib.generators:
            assert intmat.mat_eq(abelianized_matrix(g.table),
                                 g.symplectic_image), (t, g.name)


def test_corrupted_library_fails():
    lib = standard_generators(SurfaceType(1, 0, 1))
    # replace T_b1 by the identity: braid relation must fail
    bad_gens = [NamedMcgGenerator(g.name, g.kind,
                                  identity_table(lib.presentation)
                                  if g.name == "T_b1" else g.table,
                                  g.symplectic_image, g.curve_word)
                for g in lib.generators]
    bad = GeneratorLibrary(lib.presentation, bad_gens, lib.relations)
    rep = validate_mcg_relations(bad)
    assert not rep.ok
    assert any("T_b1" in lhs and not ok for lhs, _, ok in rep.results)


def test_flipped_orientation_fails():
    lib = standard_generators(SurfaceType(1, 0, 1))
    flipped = [NamedMcgGenerator(g.name, g.kind,
                                 g.table.inverse() if g.name == "T_a1"
                                 else g.table,
                                 g.symplectic_image, g.curve_word)
               for g in lib.generators]
    bad = GeneratorLibrary(lib.presentation, flipped, lib.relations)
    rep = validate_mcg_relations(bad)
    assert not rep.ok


def test_point_push():
    p = build_surface_group(SurfaceType(1, 0, 1))
    assert point_push(p, ()) == identity_table(p)
    e = point_push(p, p.word("a1"))
    assert e(p.word("b1")) == p.word("a1 b1 A1")
    assert intmat.mat_eq(abelianized_matrix(e), intmat.eye(2))


def test_push_homomorphism():
    p = build_surface_group(SurfaceType(2, 1, 0))
    rng = random.Random(21)
    for _ in range(20):
        u = tuple(rng.choice([1, -1]) * rng.randint(1, 4) for _ in range(5))
        v = tuple(rng.choice([1, -1]) * rng.randint(1, 4) for _ in range(4))
        assert point_push(p, wmul(u, v)) == compose(point_push(p, u),
                                                    point_push(p, v))


def test_sl2_minus_identity_word_search():
    """The symplectic images of the (1,0,1) twists generate SL2(Z): breadth
    first search over short words finds -I."""
    lib = standard_generators(SurfaceType(1, 0, 1))
    A = lib["T_a1"].symplectic_image
    B = lib["T_b1"].symplectic_image
    target = -intmat.eye(2)
    gens = [A, B, intmat.inverse_unimodular(A), intmat.inverse_unimodular(B)]
    frontier = {((1, 0), (0, 1)): ()}
    seen = set(frontier)
    found = False
    for _ in range(8):
        nxt = {}
        for key in frontier:
            M = intmat.arr([list(r) for r in key])
            for g in gens:
                P = M @ g
                k = tuple(tuple(int(x) for x in row) for row in P)
                if k not in seen:
                    seen.add(k)
                    nxt[k] = None
                if intmat.mat_eq(P, target):
                    found = True
        frontier = nxt
        if found:
            break
    assert found


def test_multitwist_examples():
    lib = standard_generators(SurfaceType(1, 0, 1))
    p = lib.presentation
    # push about the peripheral word equals the boundary twist
    e = point_push(p, p.peripheral[0])
    assert multitwist_check(e, lib, "T_bdry1").ok
    # identity vs empty factorization
    assert multitwist_check(identity_table(p), lib, "").ok
    # a push that is not a single twist
    e2 = point_push(p, p.word("a1 b1 A1 B1 a1"))
    rep = multitwist_check(e2, lib, "T_a1")
    assert not rep.ok and not rep.abelianized_equal
    with pytest.raises(KeyError):
        multitwist_check(e, lib, "T_nonexistent")


def test_chain_relation_is_validated():
    lib = standard_generators(SurfaceType(2, 1, 0))
    texts = [lhs for lhs, _ in lib.relations]
    assert any(len(lhs) == 30 for lhs in texts)  # (five-twist chain)^6 = 1


@pytest.mark.parametrize("t", BUILTINS)
def test_file_round_trip(t):
    lib = standard_generators(SurfaceType(*t))
    text = save_library(lib)
    lib2 = load_library(text)
    assert save_library(lib2) == text
    assert validate_mcg_relations(lib2).ok


def test_load_without_inverse_lines_uses_nielsen_inversion():
    lib = standard_generators(SurfaceType(2, 1, 0))
    text = save_library(lib)
    stripped = "\n".join(ln for ln in text.splitlines()
                         if not ln.startswith("inv "))
    lib2 = load_library(stripped)
    assert validate_mcg_relations(lib2).ok
    for g2, g1 in zip(lib2.generators, lib.generators):
        assert g2.table == g1.table
