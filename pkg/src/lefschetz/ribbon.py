"""One-vertex ribbon graph model of the bounded surface Sigma_{g,1}.

The surface is a disc with 2g untwisted bands attached; the boundary circle
reads delta = [a1,b1]...[ag,bg].  A simple closed curve is drawn as a cyclic
sequence of band traversals joined by pairwise disjoint chords in the disc.
The action of a Dehn twist on pi_1 (based on the boundary, in a gap of the
disc boundary) is read off by inserting the curve at every crossing of a
generator path with the curve's chords.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

from .words import EMPTY, Word, boundary_word, free_reduce, inverse

# side of the band end: 'S' where a positive traversal starts, 'T' where it ends
_HANDLE_LAYOUT = (("a", "S"), ("b", "T"), ("a", "T"), ("b", "S"))


@lru_cache(maxsize=None)
def end_layout(genus: int) -> tuple[tuple[int, str], ...]:
    """Band ends in counterclockwise order around the disc."""
    ends = []
    for i in range(1, genus + 1):
        for kind, side in _HANDLE_LAYOUT:
            ends.append((2 * i - 1 if kind == "a" else 2 * i, side))
    return tuple(ends)


def boundary_walk(genus: int) -> Word:
    """Read the surface boundary counterclockwise from the basepoint gap."""
    ends = end_layout(genus)
    where = {e: k for k, e in enumerate(ends)}
    out = []
    k = 0
    for _ in range(len(ends)):
        gen, side = ends[k]
        out.append(gen if side == "S" else -gen)
        partner = where[(gen, "T" if side == "S" else "S")]
        k = (partner + 1) % len(ends)
    return tuple(out)


class _Chords:
    """Angles of slots on the disc boundary for a given strand assignment."""

    def __init__(self, genus: int, counts: dict[int, int]):
        self.ends = end_layout(genus)
        self.where = {e: k for k, e in enumerate(self.ends)}
        self.n_ends = len(self.ends)
        self.counts = counts

    def angle(self, gen: int, side: str, height: float) -> float:
        k = self.where[(gen, side)]
        m = self.counts.get(gen, 0)
        span = 2 * math.pi / self.n_ends
        # heights run counterclockwise at S, clockwise at T (untwisted band)
        frac = (height + 1.0) / (m + 2.0)
        if side == "T":
            frac = 1.0 - frac
        return span * (k + 0.15 + 0.7 * frac)


def _crosses(p, q, r, s) -> bool:
    def inside(x, a, b):
        a, b, x = a % (2 * math.pi), b % (2 * math.pi), x % (2 * math.pi)
        if a < b:
            return a < x < b
        return x > a or x < b
    return inside(r, p, q) != inside(s, p, q)


def _point(theta):
    return (math.cos(theta), math.sin(theta))


def _segment_hit(P, Q, U, V):
    """Parameter along PQ of the crossing with UV and the crossing sign."""
    dx, dy = Q[0] - P[0], Q[1] - P[1]
    ex, ey = V[0] - U[0], V[1] - U[1]
    den = dx * ey - dy * ex
    t = ((U[0] - P[0]) * ey - (U[1] - P[1]) * ex) / den
    return t, (1 if den > 0 else -1)


class RibbonCurve:
    """A simple closed curve realized by chords in the ribbon model."""

    def __init__(self, letters: Sequence[int], genus: int):
        self.genus = genus
        self.letters = tuple(letters)
        if not self.letters:
            raise ValueError("empty curve")
        n = len(self.letters)
        if free_reduce(self.letters + self.letters[:1])[:n] != self.letters or \
                self.letters[0] == -self.letters[-1]:
            raise ValueError("curve word must be cyclically reduced")
        occ: dict[int, list[int]] = {}
        for j, x in enumerate(self.letters):
            occ.setdefault(abs(x), []).append(j)
        self.counts = {g: len(v) for g, v in occ.items()}
        self.geom = _Chords(genus, self.counts)
        self.heights = self._find_heights(occ)
        if self.heights is None:
            raise ValueError(f"no embedded realization for curve {self.letters}")
        self.chords = [self._chord(j) for j in range(n)]

    def _slot(self, j: int, exit_: bool) -> float:
        x = self.letters[j]
        gen = abs(x)
        if exit_:
            side = "T" if x > 0 else "S"
        else:
            side = "S" if x > 0 else "T"
        return self.geom.angle(gen, side, self.heights[j])

    def _chord(self, j: int):
        n = len(self.letters)
        return self._slot(j, True), self._slot((j + 1) % n, False)

    def _find_heights(self, occ):
        gens = sorted(occ)
        perms = [list(itertools.permutations(range(len(occ[g])))) for g in gens]
        n = len(self.letters)
        for choice in itertools.product(*perms):
            heights = [0] * n
            for g, perm in zip(gens, choice):
                for j, h in zip(occ[g], perm):
                    heights[j] = h
            self.heights = heights
            chords = [self._chord(j) for j in range(n)]
            ok = all(not _crosses(*chords[i], *chords[k])
                     for i in range(n) for k in range(i + 1, n))
            if ok:
                return heights
        return None

    def loop_from(self, j: int, forward: bool) -> Word:
        """The curve read from a point on chord j, going forward or backward."""
        n = len(self.letters)
        fwd = tuple(self.letters[(j + 1 + k) % n] for k in range(n))
        return fwd if forward else inverse(fwd)

    def twist_images(self, sign: int = 1, core_height: float = -1.0) -> list[Word]:
        """Images of the 2g generators under the twist (turning left for sign=+1)."""
        images = []
        base = 0.0
        for gen in range(1, 2 * self.genus + 1):
            s_ang = self.geom.angle(gen, "S", core_height)
            t_ang = self.geom.angle(gen, "T", core_height)
            first = self._insertions(base, s_ang, sign)
            second = self._insertions(t_ang, base, sign)
            images.append(free_reduce(first + (gen,) + second))
        return images

    def _insertions(self, a: float, b: float, sign: int) -> tuple:
        P, Q = _point(a), _point(b)
        hits = []
        for j, (u, v) in enumerate(self.chords):
            if not _crosses(a, b, u, v):
                continue
            t, s = _segment_hit(P, Q, _point(u), _point(v))
            # turning left means following the curve when it runs right-to-left
            hits.append((t, self.loop_from(j, forward=(s * sign > 0))))
        hits.sort()
        out = []
        for _, w in hits:
            out.extend(w)
        return tuple(out)


def twist_images(letters: Sequence[int], genus: int, sign: int = 1) -> list[Word]:
    return RibbonCurve(letters, genus).twist_images(sign)
