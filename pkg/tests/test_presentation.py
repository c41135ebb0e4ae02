import random

import pytest

from prymrep import intmat
from prymrep.words import winv, wmul
from prymrep.presentation import (SurfaceType, build_surface_group,
                                  EndomorphismTable, identity_table,
                                  inner_table, PresentationError,
                                  apply_endomorphism, compose,
                                  verify_peripheral_structure,
                                  abelianized_matrix)
from prymrep.generators import standard_generators


def test_surface_type_invariants():
    s = SurfaceType(2, 1, 0)
    assert s.chi == -3
    assert SurfaceType.parse("1,0,1") == SurfaceType(1, 0, 1)
    with pytest.raises(PresentationError):
        SurfaceType(-1, 0, 0)


def test_build_examples():
    p = build_surface_group(SurfaceType(1, 0, 1))
    assert p.is_free and p.rank == 2
    assert len(p.peripheral) == 1
    # z1 is the inverse of the commutator [a1,b1], itself a commutator
    assert p.peripheral[0] == winv((1, 2, -1, -2))

    p = build_surface_group(SurfaceType(2, 1, 0))
    assert p.is_free and p.rank == 4
    assert p.peripheral[0] == winv(wmul((1, 2, -1, -2), (3, 4, -3, -4)))

    p = build_surface_group(SurfaceType(2, 0, 0))
    assert not p.is_free
    assert p.relator == (1, 2, -1, -2, 3, 4, -3, -4)
    assert p.peripheral == ()


def test_peripheral_product_convention():
    # prod [a_i,b_i] * z_1 ... z_{n+p} freely reduces to the empty word
    for t in [(1, 0, 1), (1, 1, 1), (2, 1, 0), (1, 2, 1), (0, 3, 0)]:
        p = build_surface_group(SurfaceType(*t))
        prod = ()
        for i in range(1, p.surface.g + 1):
            prod = wmul(prod, (2 * i - 1, 2 * i, -(2 * i - 1), -(2 * i)))
        assert wmul(prod, *p.peripheral) == ()
        assert len(p.peripheral) == p.surface.peripherals
        assert p.rank == 2 * p.surface.g + p.surface.peripherals - 1


def test_degenerate_rejected():
    for t in [(0, 0, 0), (0, 1, 0), (0, 1, 1), (0, 0, 2)]:
        with pytest.raises(PresentationError):
            build_surface_group(SurfaceType(*t))
    build_surface_group(SurfaceType(0, 3, 0))   # pair of pants is fine


def test_apply_endomorphism_examples():
    p = build_surface_group(SurfaceType(1, 0, 1))
    ident = identity_table(p)
    w = p.word("a1 b1 A1")
    assert apply_endomorphism(ident, w) == w
    e = EndomorphismTable.parse(p, "a1 -> a1\nb1 -> b1 a1")
    assert e(p.word("b1 b1")) == p.word("b1 a1 b1 a1")
    # multiplicative
    u, v = p.word("a1 B1"), p.word("b1 a1 a1")
    assert e(wmul(u, v)) == wmul(e(u), e(v))


def test_compose_and_inverse():
    p = build_surface_group(SurfaceType(1, 0, 1))
    lib = standard_generators(p.surface)
    ta = lib["T_a1"].table
    ident = identity_table(p)
    assert compose(ta, ident) == ta
    assert compose(ta, ta.inverse()) == ident
    assert compose(ta.inverse(), ta) == ident
    # round trip on arbitrary words
    w = p.word("a1 b1 a1 B1 A1")
    assert ta.inverse()(ta(w)) == w


def test_compose_associative():
    p = build_surface_group(SurfaceType(2, 1, 0))
    lib = standard_generators(p.surface)
    rng = random.Random(5)
    tables = [g.table for g in lib.generators]
    for _ in range(10):
        e1, e2, e3 = (rng.choice(tables) for _ in range(3))
        assert compose(compose(e1, e2), e3) == compose(e1, compose(e2, e3))


def test_mismatched_presentation_rejected():
    p1 = build_surface_group(SurfaceType(1, 0, 1))
    p2 = build_surface_group(SurfaceType(2, 1, 0))
    e2 = identity_table(p2)
    with pytest.raises(PresentationError):
        identity_table(p1).compose(e2)


def test_verify_peripheral_structure():
    p = build_surface_group(SurfaceType(1, 0, 1))
    rep = verify_peripheral_structure(identity_table(p))
    assert rep.ok and rep.conjugators == [()]
    u = p.word("a1 b1")
    rep = verify_peripheral_structure(inner_table(p, u))
    assert rep.ok
    assert all(p.peripheral[i] == wmul(winv(c), inner_table(p, u)(p.peripheral[i]), c)
               or c is not None for i, c in enumerate(rep.conjugators))
    # twist table: T_a1 fixes the commutator peripheral exactly
    lib = standard_generators(p.surface)
    rep = verify_peripheral_structure(lib["T_a1"].table)
    assert rep.ok


def test_abelianized_matrix():
    p = build_surface_group(SurfaceType(1, 0, 1))
    assert intmat.mat_eq(abelianized_matrix(identity_table(p)), intmat.eye(2))
    e = EndomorphismTable.parse(p, "a1 -> a1\nb1 -> b1 a1")
    assert intmat.mat_eq(abelianized_matrix(e), intmat.arr([[1, 1], [0, 1]]))
    assert intmat.mat_eq(abelianized_matrix(inner_table(p, p.word("a1 b1"))),
                         intmat.eye(2))


def test_abelianized_functorial():
    p = build_surface_group(SurfaceType(2, 1, 0))
    lib = standard_generators(p.surface)
    rng = random.Random(7)
    tables = [g.table for g in lib.generators]
    for _ in range(15):
        e1, e2 = rng.choice(tables), rng.choice(tables)
        assert intmat.mat_eq(abelianized_matrix(compose(e1, e2)),
                             abelianized_matrix(e1) @ abelianized_matrix(e2))


def test_closed_case_automorphism_validation():
    p = build_surface_group(SurfaceType(1, 0, 0))
    # conjugation preserves the relator's conjugacy class
    inner_table(p, p.word("a1"))
    # a1 <-> b1 swap sends [a1,b1] to [b1,a1] = relator^-1: orientation reversing
    with pytest.raises(PresentationError):
        EndomorphismTable.parse(p, "a1 -> b1\nb1 -> a1", "a1 -> b1\nb1 -> a1")


def test_bad_inverse_rejected():
    p = build_surface_group(SurfaceType(1, 0, 1))
    with pytest.raises(PresentationError):
        EndomorphismTable.parse(p, "a1 -> a1\nb1 -> b1 a1",
                                "a1 -> a1\nb1 -> b1")


def test_serialize_round_trip():
    p = build_surface_group(SurfaceType(2, 1, 0))
    lib = standard_generators(p.surface)
    for g in lib.generators:
        text = g.table.serialize()
        back = EndomorphismTable.parse(p, text)
        assert back.images == g.table.images
