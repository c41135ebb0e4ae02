"""Free-group word calculus on signed generator indices.

A word is a tuple of nonzero ints: ``k`` means generator ``k`` (1-based),
``-k`` its inverse.  All functions return freely reduced words; reduction is
eager so equality of words is equality of group elements (in a free group).
"""

from __future__ import annotations

Word = tuple  # tuple[int, ...], freely reduced


def free_reduce(letters) -> Word:
    """Freely reduce a letter sequence.  Idempotent, length-nonincreasing."""
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a generator index")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def wmul(*words) -> Word:
    """Product of words, freely reduced."""
    out: list[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def winv(w) -> Word:
    return tuple(-x for x in reversed(w))


def wconj(u, w) -> Word:
    """u w u^-1."""
    return wmul(u, w, winv(u))


def wpow(w, k: int) -> Word:
    if k < 0:
        return wpow(winv(w), -k)
    out: Word = ()
    for _ in range(k):
        out = wmul(out, w)
    return out


def commutator(u, v) -> Word:
    """[u, v] = u v u^-1 v^-1."""
    return wmul(u, v, winv(u), winv(v))


def max_index(w) -> int:
    return max((abs(x) for x in w), default=0)


def exponent_vector(w, rank: int) -> list[int]:
    """Image of w in the free abelianization Z^rank."""
    v = [0] * rank
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


def cyclic_reduce(w):
    """Return (core, u) with w = u core u^-1 and core cyclically reduced."""
    u: list[int] = []
    w = tuple(w)
    while len(w) >= 2 and w[0] == -w[-1]:
        u.append(w[0])
        w = w[1:-1]
    return w, tuple(u)


def cyclic_conjugator(w, z):
    """A word c with w = c z c^-1, or None if w, z are not conjugate.

    Both inputs must be freely reduced; comparison is by cyclic rotation of
    the cyclically reduced cores.
    """
    wc, uw = cyclic_reduce(w)
    zc, uz = cyclic_reduce(z)
    if len(wc) != len(zc):
        return None
    n = len(zc)
    if n == 0:
        return () if w == z else None
    for k in range(n):
        if wc == zc[k:] + zc[:k]:
            # wc = r^-1 zc r with r = zc[:k]
            c = wmul(uw, winv(zc[:k]), winv(uz))
            return c
    return None


# --- text form: "a1 b1 A1 B1", capital initial = inverse -------------------

def format_word(w, names) -> str:
    """Render w using generator names; inverse = capitalized first letter."""
    if not w:
        return "1"
    toks = []
    for x in w:
        nm = names[abs(x) - 1]
        toks.append(nm if x > 0 else nm[0].upper() + nm[1:])
    return " ".join(toks)


def parse_word(text: str, names) -> Word:
    """Parse the text form back into a word.  "1" or "" is the identity."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    lookup = {nm: i + 1 for i, nm in enumerate(names)}
    letters = []
    for tok in text.split():
        if tok in lookup:
            letters.append(lookup[tok])
            continue
        low = tok[0].lower() + tok[1:]
        if tok[0].isupper() and low in lookup:
            letters.append(-lookup[low])
            continue
        raise ValueError(f"unknown generator token {tok!r}")
    return free_reduce(letters)
