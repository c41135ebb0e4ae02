import random

from prymrep.words import (free_reduce, wmul, winv, wconj, wpow, commutator,
                           cyclic_conjugator, cyclic_reduce, format_word,
                           parse_word, exponent_vector)


def rand_letters(rng, rank, n):
    return [rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(n)]


def test_free_reduce_examples():
    assert free_reduce([1, -1, 2]) == (2,)
    assert free_reduce([]) == ()
    assert free_reduce([1, 2, -2, -1]) == ()


def test_free_reduce_idempotent_and_nonincreasing():
    rng = random.Random(0)
    for _ in range(200):
        w = rand_letters(rng, 4, rng.randint(0, 30))
        r = free_reduce(w)
        assert free_reduce(r) == r
        assert len(r) <= len(w)


def test_group_identities():
    rng = random.Random(1)
    for _ in range(100):
        u = free_reduce(rand_letters(rng, 3, 8))
        v = free_reduce(rand_letters(rng, 3, 8))
        assert wmul(u, winv(u)) == ()
        assert winv(wmul(u, v)) == wmul(winv(v), winv(u))
        assert wpow(u, 3) == wmul(u, u, u)
        assert wconj((), u) == u


def test_commutator():
    assert commutator((1,), (2,)) == (1, 2, -1, -2)


def test_cyclic_conjugator():
    rng = random.Random(2)
    for _ in range(100):
        z = free_reduce(rand_letters(rng, 3, 10))
        c = free_reduce(rand_letters(rng, 3, 6))
        w = wconj(c, z)
        found = cyclic_conjugator(w, z)
        assert found is not None
        assert wconj(found, z) == w
    # non-conjugate pairs
    assert cyclic_conjugator((1,), (2,)) is None
    assert cyclic_conjugator((1, 1), (1,)) is None


def test_cyclic_reduce():
    core, u = cyclic_reduce((1, 2, 3, -2, -1))
    assert core == (3,) and u == (1, 2)


def test_text_round_trip():
    names = ["a1", "b1", "z1"]
    rng = random.Random(3)
    for _ in range(50):
        w = free_reduce(rand_letters(rng, 3, 12))
        assert parse_word(format_word(w, names), names) == w
    assert format_word((), names) == "1"
    assert parse_word("1", names) == ()
    assert parse_word("a1 b1 A1 B1", names) == (1, 2, -1, -2)
    assert parse_word("Z1", names) == (-3,)


def test_exponent_vector():
    assert exponent_vector((1, 2, -1, -2), 3) == [0, 0, 0]
    assert exponent_vector((1, 1, -2), 2) == [2, -1]
