"""Words in the free group F_2g and in the closed surface group F_2g / <<delta>>.

A word is a tuple of nonzero ints.  Generator ``2i-1`` is a_i and ``2i`` is
b_i; a negative entry is the inverse letter.  All functions returning words
return them freely reduced.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable, Optional, Sequence

Word = tuple

EMPTY: Word = ()


def free_reduce(letters: Iterable[int]) -> Word:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def reduce(letters: Iterable[int], mode: str = "free") -> Word:
    if mode == "free":
        return free_reduce(letters)
    if mode == "cyclic":
        return cyclic_reduce(tuple(letters))
    raise ValueError(f"unknown reduction mode {mode!r}")


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def mul(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def power(w: Sequence[int], n: int) -> Word:
    if n < 0:
        return power(inverse(w), -n)
    return free_reduce(tuple(w) * n)


def conjugate(u: Sequence[int], w: Sequence[int]) -> Word:
    """u w u^-1."""
    return mul(u, w, inverse(u))


def boundary_word(genus: int) -> Word:
    """delta = [a1,b1] ... [ag,bg] with [a,b] = a b a^-1 b^-1."""
    out = []
    for i in range(1, genus + 1):
        a, b = 2 * i - 1, 2 * i
        out += [a, b, -a, -b]
    return tuple(out)


def letter_name(x: int) -> str:
    i = (abs(x) + 1) // 2
    base = "a" if abs(x) % 2 == 1 else "b"
    return (base if x > 0 else base.upper()) + str(i)


def format_word(w: Sequence[int]) -> str:
    return " ".join(letter_name(x) for x in w) if w else "1"


def parse_word(text: str, genus: Optional[int] = None) -> Word:
    """Parse ``a1 b1 A1 B1`` (uppercase = inverse). ``1`` or empty is the identity."""
    letters = []
    for tok in text.split():
        if tok in ("1", "e"):
            continue
        head, idx = tok[0], tok[1:]
        if head.lower() not in "ab" or not idx.isdigit() or int(idx) < 1:
            raise ValueError(f"bad letter {tok!r}")
        i = int(idx)
        if genus is not None and i > genus:
            raise ValueError(f"letter {tok!r} out of range for genus {genus}")
        gen = 2 * i - 1 if head.lower() == "a" else 2 * i
        letters.append(gen if head.islower() else -gen)
    return free_reduce(letters)


def abelianize(w: Sequence[int], genus: int) -> list[int]:
    v = [0] * (2 * genus)
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


# ---------------------------------------------------------------------------
# Dehn's algorithm for the surface group


@lru_cache(maxsize=None)
def _relator_tables(genus: int):
    """Pieces of cyclic rotations of delta^{+-1}.

    ``long`` maps every piece of length > 2g to the inverse of its complement
    (strictly shorter); ``half`` does the same for pieces of length exactly 2g.
    """
    if genus < 2:
        raise ValueError("surface group algorithms need genus >= 2")
    d = boundary_word(genus)
    n = len(d)
    rots = set()
    for r in (d, inverse(d)):
        for k in range(n):
            rots.add(r[k:] + r[:k])
    long_, half = {}, {}
    for r in rots:
        for ell in range(n // 2, n + 1):
            piece, rest = r[:ell], r[ell:]
            if ell == n // 2:
                half.setdefault(piece, set()).add(inverse(rest))
            else:
                long_[piece] = inverse(rest)
    half = {k: tuple(sorted(v)) for k, v in half.items()}
    return n, long_, half


def dehn_reduce(w: Sequence[int], genus: int) -> Word:
    """Greedy Dehn reduction: replace the leftmost longest relator piece
    longer than half a relator by the shorter complement, until none remain.

    The result is empty iff ``w`` is trivial in the surface group.
    """
    n, table, _ = _relator_tables(genus)
    half = n // 2
    w = free_reduce(w)
    while True:
        hit = None
        L = len(w)
        for i in range(L - half):
            for ell in range(min(n, L - i), half, -1):
                rep = table.get(w[i:i + ell])
                if rep is not None:
                    hit = (i, ell, rep)
                    break
            if hit:
                break
        if hit is None:
            return w
        i, ell, rep = hit
        w = mul(w[:i], rep, w[i + ell:])


def is_trivial(w: Sequence[int], genus: int) -> bool:
    return not dehn_reduce(w, genus)


def equal_in_surface_group(u: Sequence[int], v: Sequence[int], genus: int) -> bool:
    return is_trivial(mul(u, inverse(v)), genus)


def _cyclic_dehn(w: Sequence[int], genus: int) -> tuple[Word, Word]:
    """Return (v, c) with v = c w c^-1 in the surface group and v cyclically
    free- and Dehn-reduced (no long relator piece in any rotation)."""
    n, table, _ = _relator_tables(genus)
    v = dehn_reduce(w, genus)
    c: Word = EMPTY
    while True:
        while len(v) >= 2 and v[0] == -v[-1]:
            x = v[0]
            v = v[1:-1]
            c = mul((-x,), c)
        L = len(v)
        if L <= n // 2:
            return v, c
        changed = False
        for r in range(1, L):
            rot = v[r:] + v[:r]
            red = dehn_reduce(rot, genus)
            if len(red) < L:
                c = mul(inverse(v[:r]), c)
                v = red
                changed = True
                break
        if not changed:
            return v, c


def _min_rotation(v: Word) -> tuple[Word, int]:
    if not v:
        return v, 0
    best, best_r = v, 0
    for r in range(1, len(v)):
        rot = v[r:] + v[:r]
        if rot < best:
            best, best_r = rot, r
    return best, best_r


def _shortest_forms(w: Sequence[int], genus: int, cap: int = 4000) -> dict[Word, Word]:
    """Cyclically reduced forms of the conjugacy class of ``w`` reachable by
    half-relator swaps, keyed by minimal rotation, with conjugators c such
    that key = c w c^-1 in the surface group."""
    n, _, half_table = _relator_tables(genus)
    half = n // 2
    v, c = _cyclic_dehn(w, genus)
    while True:
        key, r = _min_rotation(v)
        forms = {key: mul(inverse(v[:r]), c)}
        queue = deque([key])
        shorter = None
        while queue and shorter is None and len(forms) < cap:
            u = queue.popleft()
            cu = forms[u]
            L = len(u)
            if L < half:
                break
            for r in range(L):
                rot = u[r:] + u[:r]
                base_c = mul(inverse(u[:r]), cu)
                for i in range(0, L - half + 1):
                    reps = half_table.get(rot[i:i + half])
                    if not reps:
                        continue
                    for rep in reps:
                        cand = mul(rot[:i], rep, rot[i + half:])
                        cand2, c2 = _cyclic_dehn(cand, genus)
                        c2 = mul(c2, base_c)
                        if len(cand2) < L:
                            shorter = (cand2, c2)
                            break
                        k2, r2 = _min_rotation(cand2)
                        if k2 not in forms:
                            forms[k2] = mul(inverse(cand2[:r2]), c2)
                            queue.append(k2)
                    if shorter:
                        break
                if shorter:
                    break
        if shorter is None:
            return forms
        v, c = shorter


def cyclic_normal_form(w: Sequence[int], genus: int) -> Word:
    """Canonical representative of the conjugacy class of ``w``."""
    return min(_shortest_forms(w, genus), key=lambda k: (len(k), k))


def curve_key(w: Sequence[int], genus: int) -> Word:
    """Canonical key of the unoriented free homotopy class of ``w``."""
    return min(cyclic_normal_form(w, genus), cyclic_normal_form(inverse(w), genus),
               key=lambda k: (len(k), k))


def conjugacy_witness(w1: Sequence[int], w2: Sequence[int], genus: int) -> Optional[Word]:
    """Return u with u w1 u^-1 = w2 in the surface group, or None."""
    forms1 = _shortest_forms(w1, genus)
    # a cyclically Dehn-reduced word can still shorten through half-relator
    # swaps, so w2 must be brought to a shortest form as well
    forms2 = _shortest_forms(w2, genus)
    k2 = min(forms2)
    c2 = forms2[k2]
    c1 = forms1.get(k2)
    if c1 is None:
        return None
    # k2 = c1 w1 c1^-1 = c2 w2 c2^-1
    u = dehn_reduce(mul(inverse(c2), c1), genus)
    if not equal_in_surface_group(conjugate(u, w1), w2, genus):
        raise AssertionError("conjugacy witness failed verification")
    return u


def are_conjugate(w1, w2, genus: int) -> bool:
    v1, _ = _cyclic_dehn(w1, genus)
    v2, _ = _cyclic_dehn(w2, genus)
    if len(v1) == len(v2) and _min_rotation(v1)[0] == _min_rotation(v2)[0]:
        return True
    return conjugacy_witness(w1, w2, genus) is not None


# ---------------------------------------------------------------------------
# Automorphisms of F_2g


class FreeAutomorphism:
    """Automorphism of F_2g given by generator images.

    ``images[i]`` is the image of generator ``i + 1``.  Inverse images must be
    supplied; they are checked on construction.
    """

    __slots__ = ("rank", "images", "inverse_images", "_hash")

    def __init__(self, images: Sequence[Sequence[int]], inverse_images: Sequence[Sequence[int]],
                 check: bool = True):
        self.rank = len(images)
        self.images = tuple(free_reduce(w) for w in images)
        self.inverse_images = tuple(free_reduce(w) for w in inverse_images)
        self._hash = None
        if check:
            for g in range(1, self.rank + 1):
                if _apply(self.inverse_images, _apply(self.images, (g,))) != (g,):
                    raise ValueError("inverse images do not invert the automorphism")
                if _apply(self.images, _apply(self.inverse_images, (g,))) != (g,):
                    raise ValueError("inverse images do not invert the automorphism")

    @classmethod
    def identity(cls, rank: int) -> "FreeAutomorphism":
        gens = [(g,) for g in range(1, rank + 1)]
        return cls(gens, gens, check=False)

    @classmethod
    def conjugation(cls, u: Sequence[int], rank: int) -> "FreeAutomorphism":
        """x -> u x u^-1."""
        ui = inverse(u)
        return cls([conjugate(u, (g,)) for g in range(1, rank + 1)],
                   [conjugate(ui, (g,)) for g in range(1, rank + 1)], check=False)

    def __call__(self, w: Sequence[int]) -> Word:
        return _apply(self.images, w)

    def inverse(self) -> "FreeAutomorphism":
        return FreeAutomorphism(self.inverse_images, self.images, check=False)

    def __matmul__(self, other: "FreeAutomorphism") -> "FreeAutomorphism":
        return aut_compose(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeAutomorphism) and self.images == other.images

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.images)
        return self._hash

    def max_length(self) -> int:
        return max(len(w) for w in self.images)

    def __repr__(self) -> str:
        body = ", ".join(f"{letter_name(g)}->{format_word(w)}"
                         for g, w in enumerate(self.images, start=1))
        return f"FreeAutomorphism({body})"


def _apply(images: Sequence[Word], w: Sequence[int]) -> Word:
    out: list[int] = []
    for x in w:
        img = images[x - 1] if x > 0 else inverse(images[-x - 1])
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


def aut_apply(phi: FreeAutomorphism, w: Sequence[int]) -> Word:
    return _apply(phi.images, w)


def aut_compose(phi: FreeAutomorphism, psi: FreeAutomorphism) -> FreeAutomorphism:
    """phi o psi: apply psi first."""
    if phi.rank != psi.rank:
        raise ValueError("rank mismatch")
    images = [_apply(phi.images, w) for w in psi.images]
    inv = [_apply(psi.inverse_images, w) for w in phi.inverse_images]
    return FreeAutomorphism(images, inv, check=False)


def aut_equal(phi: FreeAutomorphism, psi: FreeAutomorphism) -> bool:
    return phi.images == psi.images
