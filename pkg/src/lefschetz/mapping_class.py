"""Mapping classes of Sigma_{g,1} as delta-fixing automorphisms of F_2g.

Standard curves
    c1 = a1, c_{2i} = b_i, c_{2i+1} = b_i a_i^-1 b_i^-1 a_{i+1} (i < g),
    c_{2g+1} = a_g, and separating s_j = [a1,b1]...[a_j,b_j], j <= g/2.

Twist automorphisms are computed from the ribbon model (see ``ribbon``) and
are validated by the test-suite against delta-fixing, transvections, braid
and commutation relations, and the chain relations.  A positive twist turns
right; with this choice every positive relation of the standard chain has
a nonnegative boundary-twist power.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from . import words as W
from .ribbon import RibbonCurve
from .words import FreeAutomorphism, Word


def standard_curve_ids(genus: int) -> list[str]:
    return [f"c{i}" for i in range(1, 2 * genus + 2)] + [f"s{j}" for j in range(1, genus // 2 + 1)]


@lru_cache(maxsize=None)
def standard_curve_word(curve_id: str, genus: int) -> Word:
    if genus < 2:
        raise ValueError("fibre genus must be at least two")
    m = re.fullmatch(r"([cs])(\d+)", curve_id)
    if not m:
        raise ValueError(f"unknown curve id {curve_id!r}")
    kind, i = m.group(1), int(m.group(2))
    if kind == "c":
        if i < 1 or i > 2 * genus + 1:
            raise ValueError(f"unknown curve id {curve_id!r} for genus {genus}")
        if i == 1:
            return (1,)
        if i == 2 * genus + 1:
            return (2 * genus - 1,)
        h = i // 2
        if i % 2 == 0:
            return (2 * h,)
        a, b, a_next = 2 * h - 1, 2 * h, 2 * h + 1
        return (b, -a, -b, a_next)
    if i < 1 or i > genus // 2:
        raise ValueError(f"unknown curve id {curve_id!r} for genus {genus}")
    return W.boundary_word(i)


@lru_cache(maxsize=None)
def _twist_aut(curve_id: str, genus: int) -> FreeAutomorphism:
    rc = RibbonCurve(standard_curve_word(curve_id, genus), genus)
    # turning right is the positive twist
    return FreeAutomorphism(rc.twist_images(-1), rc.twist_images(1))


@dataclass(frozen=True)
class MappingClass:
    """Element of Gamma_{g,1}; ``word`` records the twist word it came from."""

    genus: int
    aut: FreeAutomorphism
    word: tuple = ()

    def __post_init__(self):
        d = W.boundary_word(self.genus)
        if self.aut(d) != d:
            raise ValueError("automorphism does not fix the boundary word")

    def __matmul__(self, other: "MappingClass") -> "MappingClass":
        return MappingClass(self.genus, self.aut @ other.aut, self.word + other.word)

    def inverse(self) -> "MappingClass":
        return MappingClass(self.genus, self.aut.inverse(),
                            tuple((c, -s) for c, s in reversed(self.word)))

    def __call__(self, w: Sequence[int]) -> Word:
        return self.aut(w)

    def __eq__(self, other) -> bool:
        return isinstance(other, MappingClass) and self.aut == other.aut

    def __hash__(self) -> int:
        return hash(self.aut)

    @classmethod
    def identity(cls, genus: int) -> "MappingClass":
        return cls(genus, FreeAutomorphism.identity(2 * genus))

    @classmethod
    def boundary_twist(cls, genus: int, k: int = 1) -> "MappingClass":
        return cls(genus, FreeAutomorphism.conjugation(W.power(W.boundary_word(genus), k), 2 * genus))


@lru_cache(maxsize=4096)
def standard_twist(curve_id: str, sign: int, genus: int) -> MappingClass:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    aut = _twist_aut(curve_id, genus)
    return MappingClass(genus, aut if sign > 0 else aut.inverse(), ((curve_id, sign),))


def compose(ms: Iterable[MappingClass], genus: int) -> MappingClass:
    """Left-to-right product m1 o m2 o ... (the last one acts first)."""
    out = MappingClass.identity(genus)
    for m in ms:
        out = out @ m
    return out


# twist-word syntax: t3 = positive twist about c3, T3 its inverse, s1 / S1 separating
_TWIST_TOKEN = re.compile(r"([tTsS])(\d+)")


def parse_twist_word(text: str) -> tuple:
    out = []
    for tok in text.split():
        m = _TWIST_TOKEN.fullmatch(tok)
        if not m:
            raise ValueError(f"bad twist token {tok!r}")
        head, i = m.group(1), m.group(2)
        cid = ("c" if head in "tT" else "s") + i
        out.append((cid, 1 if head.islower() else -1))
    return tuple(out)


def format_twist_word(word: Sequence) -> str:
    toks = []
    for cid, s in word:
        head = "t" if cid[0] == "c" else "s"
        toks.append((head if s > 0 else head.upper()) + cid[1:])
    return " ".join(toks)


def twist_word_class(word: Sequence, genus: int) -> MappingClass:
    return compose((standard_twist(c, s, genus) for c, s in word), genus)


@dataclass(frozen=True)
class CurveSpec:
    """The curve w(c_base), w a word in standard twists."""

    base: str
    conjugator: tuple = ()

    def mapping_class(self, genus: int) -> MappingClass:
        return twist_word_class(self.conjugator, genus)

    def word(self, genus: int) -> Word:
        """A cyclically reduced word in the free homotopy class."""
        return W.cyclic_reduce(self.mapping_class(genus)(standard_curve_word(self.base, genus)))

    def key(self, genus: int) -> Word:
        """Canonical key of the unoriented isotopy class."""
        return _curve_key_cached(self.word(genus), genus)

    def homology(self, genus: int) -> np.ndarray:
        return np.array(W.abelianize(self.word(genus), genus), dtype=np.int64)

    def is_separating(self, genus: int) -> bool:
        return not self.homology(genus).any()

    def apply(self, word: Sequence) -> "CurveSpec":
        """h(self) for h given by a twist word."""
        return CurveSpec(self.base, tuple(word) + self.conjugator)

    def __str__(self) -> str:
        if not self.conjugator:
            return self.base
        return f"({format_twist_word(self.conjugator)}) {self.base}"


@lru_cache(maxsize=65536)
def _curve_key_cached(word: Word, genus: int) -> Word:
    return W.curve_key(word, genus)


def twist_about(c: CurveSpec, sign: int, genus: int) -> MappingClass:
    """t_{w(c)}^sign = w t_c^sign w^-1."""
    w = c.mapping_class(genus)
    t = standard_twist(c.base, sign, genus)
    if not c.conjugator:
        return t
    return w @ t @ w.inverse()


# ---------------------------------------------------------------------------
# homology


def intersection_form(genus: int) -> np.ndarray:
    J = np.zeros((2 * genus, 2 * genus), dtype=np.int64)
    for i in range(genus):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = -1
    return J


def homology_action(m: MappingClass) -> np.ndarray:
    """Matrix of m_* on H_1 in the basis a1, b1, ..., ag, bg (columns are images)."""
    n = 2 * m.genus
    M = np.zeros((n, n), dtype=np.int64)
    for g, img in enumerate(m.aut.images):
        M[:, g] = W.abelianize(img, m.genus)
    return M


def transvection(c: np.ndarray, genus: int) -> np.ndarray:
    """x -> x + <x, c> c."""
    J = intersection_form(genus)
    n = 2 * genus
    return np.eye(n, dtype=np.int64) + np.outer(c, c @ J.T)


def is_symplectic(M: np.ndarray, genus: int) -> bool:
    J = intersection_form(genus)
    return bool(np.array_equal(M.T @ J @ M, J))


# ---------------------------------------------------------------------------
# boundary twist power and triviality in the closed group


def boundary_twist_power(ms: Sequence[MappingClass], genus: Optional[int] = None) -> Optional[int]:
    """k with m1 o ... o mn = conjugation by delta^k, or None."""
    if genus is None:
        if not ms:
            raise ValueError("genus required for an empty list")
        genus = ms[0].genus
    comp = compose(ms, genus).aut
    return aut_boundary_power(comp, genus, bound=len(ms))


def aut_boundary_power(aut: FreeAutomorphism, genus: int, bound: int) -> Optional[int]:
    d = W.boundary_word(genus)
    # conjugation by delta^k sends a1 to delta^k a1 delta^-k; compare on a1 first
    target = aut.images[0]
    for k in list(range(0, bound + 1)) + list(range(-1, -bound - 1, -1)):
        dk = W.power(d, k)
        if W.conjugate(dk, (1,)) != target:
            continue
        if aut == FreeAutomorphism.conjugation(dk, 2 * genus):
            return k
    return None


def is_trivial_closed(m, genus: Optional[int] = None) -> tuple[bool, Optional[Word]]:
    """Decide whether m induces an inner automorphism of the closed surface group.

    Returns (True, u) with m(x) = u x u^-1 for every generator x, or (False, None).
    """
    aut = m.aut if isinstance(m, MappingClass) else m
    if genus is None:
        genus = m.genus
    return inner_witness(aut.images, genus)


def inner_witness(images: Sequence[Word], genus: int) -> tuple[bool, Optional[Word]]:
    n = 2 * genus
    u0 = W.conjugacy_witness((1,), images[0], genus)
    if u0 is None:
        return False, None
    # after conjugating by u0^-1, a1 is fixed; the remaining freedom is a1^j
    u0i = W.inverse(u0)
    imgs = [W.dehn_reduce(W.conjugate(u0i, w), genus) for w in images]
    target = imgs[1]
    bound = len(target) + 2
    for j in sorted(range(-bound, bound + 1), key=abs):
        aj = W.power((1,), j)
        if not W.equal_in_surface_group(W.conjugate(aj, (2,)), target, genus):
            continue
        u = W.mul(u0, aj)
        if all(W.equal_in_surface_group(W.conjugate(u, (g,)), images[g - 1], genus)
               for g in range(1, n + 1)):
            return True, W.dehn_reduce(u, genus)
        return False, None
    return False, None
