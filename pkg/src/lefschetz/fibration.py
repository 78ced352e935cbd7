"""Lefschetz fibrations as ordered lists of vanishing cycles.

The monodromy of a fibration with cycles (c_1, ..., c_n) is the composite
t_{c_1} o ... o t_{c_n} of positive Dehn twists.  Validity (triviality in the
closed mapping class group) is a reported property, never a precondition.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np

from . import words as W
from ._exact import nullspace, rank, signature
from .mapping_class import (
    CurveSpec,
    MappingClass,
    aut_boundary_power,
    homology_action,
    intersection_form,
    inner_witness,
    parse_twist_word,
    standard_curve_ids,
    standard_twist,
    twist_about,
)
from .words import FreeAutomorphism, Word
from . import hyperbolic as Hy


@dataclass(frozen=True)
class Fibration:
    genus: int
    cycles: tuple = ()

    def __post_init__(self):
        if self.genus < 2:
            raise ValueError("fibre genus must be at least two")
        object.__setattr__(self, "cycles", tuple(self.cycles))
        ids = set(standard_curve_ids(self.genus))
        for c in self.cycles:
            if c.base not in ids:
                raise ValueError(f"unknown curve id {c.base!r} for genus {self.genus}")
            for cid, _ in c.conjugator:
                if cid not in ids:
                    raise ValueError(f"unknown curve id {cid!r} for genus {self.genus}")

    @property
    def n(self) -> int:
        return len(self.cycles)

    @classmethod
    def from_ids(cls, genus: int, ids: Sequence[str]) -> "Fibration":
        return cls(genus, tuple(CurveSpec(c) for c in ids))

    def twists(self) -> list[MappingClass]:
        return [_twist(c, self.genus) for c in self.cycles]

    def homology_matrices(self) -> list[np.ndarray]:
        return [homology_action(t) for t in self.twists()]

    def composite(self) -> FreeAutomorphism:
        return _composite(self)

    def __add__(self, other: "Fibration") -> "Fibration":
        return fibre_sum(self, other)

    def __mul__(self, k: int) -> "Fibration":
        return Fibration(self.genus, self.cycles * k)


_twist_cache: dict = {}


def _twist(c: CurveSpec, genus: int) -> MappingClass:
    key = (c, genus)
    t = _twist_cache.get(key)
    if t is None:
        t = twist_about(c, 1, genus)
        if len(_twist_cache) > 20000:
            _twist_cache.clear()
        _twist_cache[key] = t
    return t


_composite_cache: dict = {}


def _composite(f: Fibration) -> FreeAutomorphism:
    out = _composite_cache.get(f)
    if out is None:
        out = FreeAutomorphism.identity(2 * f.genus)
        for t in f.twists():
            out = out @ t.aut
        if len(_composite_cache) > 2000:
            _composite_cache.clear()
        _composite_cache[f] = out
    return out


@dataclass
class Validation:
    trivial_closed: bool
    witness: Optional[Word]
    k_standard: Optional[int]


def validate(f: Fibration) -> Validation:
    comp = f.composite()
    ok, u = inner_witness(comp.images, f.genus)
    k = aut_boundary_power(comp, f.genus, bound=f.n) if ok else None
    return Validation(ok, u, k)


def is_valid(f: Fibration) -> bool:
    return validate(f).trivial_closed


def euler_char(f: Fibration) -> int:
    return 4 - 4 * f.genus + f.n


def meyer_cocycle(A: np.ndarray, B: np.ndarray, genus: int) -> int:
    """Meyer's signature cocycle tau(A, B) on Sp(2g, Z)."""
    n = 2 * genus
    I = np.eye(n, dtype=np.int64)
    Ainv = _symplectic_inverse(A, genus)
    K = np.hstack([Ainv - I, B - I])
    V = nullspace(K.tolist())
    if not V:
        return 0
    # orientation of the form fixed so positive relations have negative signature
    Jm = (-intersection_form(genus)).tolist()
    IB = (I - B).tolist()
    vecs = []
    for v in V:
        x, y = v[:n], v[n:]
        s = [a + b for a, b in zip(x, y)]
        t = [sum(IB[i][j] * y[j] for j in range(n)) for i in range(n)]
        vecs.append((s, t))
    S = [[sum(s1[i] * Jm[i][j] * t2[j] for i in range(n) for j in range(n) if Jm[i][j])
          for (_, t2) in vecs] for (s1, _) in vecs]
    # the form is symmetric on V; symmetrize against rounding of representation only
    S = [[(S[i][j] + S[j][i]) / 2 for j in range(len(S))] for i in range(len(S))]
    return signature(S)


def _symplectic_inverse(A: np.ndarray, genus: int) -> np.ndarray:
    J = intersection_form(genus)
    # A^T J A = J  =>  A^-1 = -J A^T J
    return -J @ A.T @ J


def signature_meyer(f: Fibration) -> int:
    mats = f.homology_matrices()
    P = np.eye(2 * f.genus, dtype=np.int64)
    total = 0
    n_sep = 0
    for c, M in zip(f.cycles, mats):
        if c.is_separating(f.genus):
            n_sep += 1
        total += meyer_cocycle(P, M, f.genus)
        P = P @ M
    return -total - n_sep


def invariant_cohomology_rank(f: Fibration) -> int:
    n = 2 * f.genus
    if not f.cycles:
        return n
    I = np.eye(n, dtype=np.int64)
    stacked = np.vstack([M - I for M in f.homology_matrices()])
    return n - rank(stacked)


# ---------------------------------------------------------------------------
# constructions


def _reduce_twist_word(word: Sequence) -> tuple:
    out: list = []
    for c, s in word:
        if out and out[-1] == (c, -s):
            out.pop()
        else:
            out.append((c, s))
    return tuple(out)


def _inverse_twist_word(word: Sequence) -> tuple:
    return tuple((c, -s) for c, s in reversed(word))


def apply_twist_word(word: Sequence, c: CurveSpec) -> CurveSpec:
    return CurveSpec(c.base, _reduce_twist_word(tuple(word) + c.conjugator))


def twist_image(c: CurveSpec, sign: int, d: CurveSpec) -> CurveSpec:
    """t_c^sign (d) as a CurveSpec."""
    w = c.conjugator + ((c.base, sign),) + _inverse_twist_word(c.conjugator)
    return apply_twist_word(w, d)


def fibre_sum(f1: Fibration, f2: Fibration, gluing: Sequence = ()) -> Fibration:
    if f1.genus != f2.genus:
        raise ValueError("fibre sum needs equal genus")
    glued = tuple(apply_twist_word(gluing, c) for c in f2.cycles) if gluing else f2.cycles
    return Fibration(f1.genus, f1.cycles + glued)


def hurwitz_move(f: Fibration, i: int, direction: str = "right") -> Fibration:
    """Elementary braid move at positions (i, i+1), 1-based."""
    if not 1 <= i < f.n:
        raise IndexError(f"Hurwitz index {i} out of range for {f.n} cycles")
    cyc = list(f.cycles)
    a, b = cyc[i - 1], cyc[i]
    if direction == "right":
        cyc[i - 1], cyc[i] = twist_image(a, 1, b), a
    elif direction == "left":
        cyc[i - 1], cyc[i] = b, twist_image(b, -1, a)
    else:
        raise ValueError("direction must be 'left' or 'right'")
    return Fibration(f.genus, tuple(cyc))


def same_isotopy_classes(f1: Fibration, f2: Fibration) -> bool:
    """Cycle lists agree position-by-position up to isotopy."""
    return f1.genus == f2.genus and f1.n == f2.n and all(
        a.key(f1.genus) == b.key(f1.genus) for a, b in zip(f1.cycles, f2.cycles))


def split_irreducibility_scan(f: Fibration) -> list[int]:
    """Split points j where cycles[:j] and cycles[j:] are both trivial in Gamma_g."""
    n = f.n
    if n < 2:
        return []
    I = np.eye(2 * f.genus, dtype=np.int64)
    twists = f.twists()
    prefix = FreeAutomorphism.identity(2 * f.genus)
    P = I.copy()
    hits = []
    for j in range(1, n):
        prefix = prefix @ twists[j - 1].aut
        P = P @ homology_action(twists[j - 1])
        if not np.array_equal(P, I):
            continue
        if not inner_witness(prefix.images, f.genus)[0]:
            continue
        suffix = FreeAutomorphism.identity(2 * f.genus)
        for t in twists[j:]:
            suffix = suffix @ t.aut
        if inner_witness(suffix.images, f.genus)[0]:
            hits.append(j)
    return hits


def multiset_key(f: Fibration) -> tuple:
    """Isotopy classes of the cycles with multiplicity, order forgotten."""
    return tuple(sorted(c.key(f.genus) for c in f.cycles))


def hurwitz_neighbours(f: Fibration) -> Iterator[Fibration]:
    for i in range(1, f.n):
        for d in ("right", "left"):
            yield hurwitz_move(f, i, d)


def random_hurwitz(f: Fibration, depth: int, rng) -> Fibration:
    for _ in range(depth):
        if f.n < 2:
            return f
        i = int(rng.integers(1, f.n))
        f = hurwitz_move(f, i, "right" if rng.random() < 0.5 else "left")
    return f


# ---------------------------------------------------------------------------
# invariant curves


def _conjugator_words(genus: int, length: int) -> Iterator[tuple]:
    letters = [(c, s) for c in standard_curve_ids(genus) for s in (1, -1)]
    for w in itertools.product(letters, repeat=length):
        if any(w[k] == (w[k + 1][0], -w[k + 1][1]) for k in range(length - 1)):
            continue
        yield w


def _fixed_by(t: MappingClass, word: Word, genus: int) -> bool:
    img = W.dehn_reduce(t(word), genus)
    r = Hy.realize(genus)
    la, lb = r.lengths([W.cyclic_reduce(img), W.cyclic_reduce(word)])
    if abs(la - lb) > 1e-6 * max(la, lb):  # isotopic curves have equal geodesic length
        return False
    return W.are_conjugate(img, word, genus) or W.are_conjugate(img, W.inverse(word), genus)


def invariant_multicurve_search(system, bound: int = 3, genus: Optional[int] = None) -> Optional[list]:
    """Search curves w(c_base), |w| <= bound, fixed up to isotopy by every
    twist of the system and not isotopic to a member of it.

    ``system`` is a Fibration or a raw list of CurveSpec.  A disjoint union of
    curves is preserved by a twist only if each component is fixed (a curve
    meeting the twisting curve is moved off itself), so single curves suffice.
    Returns ``[curve]`` or None.
    """
    if isinstance(system, Fibration):
        genus, curves = system.genus, list(system.cycles)
    else:
        curves = list(system)
        if genus is None:
            raise ValueError("genus required for a raw curve system")
    J = intersection_form(genus)
    supports = {}
    for c in curves:
        supports.setdefault(c.key(genus), c)
    twists = [_twist(c, genus) for c in supports.values()]
    homs = np.array([c.homology(genus) @ J for c in supports.values()])
    own = set(supports)
    seen = set()
    for L in range(bound + 1):
        for base in standard_curve_ids(genus):
            for w in _conjugator_words(genus, L):
                cand = CurveSpec(base, w)
                word = cand.word(genus)
                cheap = W._min_rotation(word)[0]
                if cheap in seen:
                    continue
                seen.add(cheap)
                # a curve fixed by t_c has zero algebraic intersection with c
                h = np.array(W.abelianize(word, genus))
                if homs.size and np.any(homs @ h):
                    continue
                if not all(_fixed_by(t, word, genus) for t in twists):
                    continue
                if W.curve_key(word, genus) in own:
                    continue
                return [cand]
    return None


# ---------------------------------------------------------------------------
# sections


def free_inner_witness(images: Sequence[Word], rank: int) -> Optional[Word]:
    """W with images[x] = W x W^-1 in the free group, or None."""
    img = images[0]
    L = len(img)
    if L % 2 == 0 or img[L // 2] != 1:
        return None
    U = img[: L // 2]
    if W.mul(U, (1,), W.inverse(U)) != img:
        return None
    rest = W.mul(W.inverse(U), images[1], U)
    j = 0
    while j < len(rest) and rest[j] == 1:
        j += 1
    if j == 0:
        while j < len(rest) and rest[j] == -1:
            j += 1
        j = -j
    w = W.mul(U, W.power((1,), j))
    if all(W.conjugate(w, (g,)) == images[g - 1] for g in range(1, rank + 1)):
        return w
    return None


@dataclass
class Crossing:
    curve: int  # index into the arrangement's curve list
    deck: Word  # free-group word of the lift's deck transformation
    sign: int  # +1 when the arc crosses the oriented lift from its left


def _face_centroid(arr, f: int) -> complex:
    return complex(np.mean([arr.points[v] for v, _ in arr.faces[f]]))


def transport_arc(arr, target_face: int, avoid_first: Optional[tuple] = None) -> tuple[list, list]:
    """Shortest dual-graph arc from the basepoint face (fewest crossings).

    With ``avoid_first`` set to a crossing edge (face, face2, chord) the arc
    must cross at least one curve edge other than that one.  Returns the face
    sequence (with tile letters) and the crossings in order.
    """
    need_flag = avoid_first is not None
    start = (arr.base_face, not need_flag)
    dist = {start: 0}
    prev: dict = {start: None}
    dq = deque([start])
    goal = (target_face, True)
    while dq:
        state = dq.popleft()
        if state == goal:
            break
        f, flag = state
        for f2, letter in arr.side_moves.get(f, []):
            s2 = (f2, flag)
            if s2 not in dist or dist[s2] > dist[state]:
                dist[s2] = dist[state]
                prev[s2] = (state, ("side", letter))
                dq.appendleft(s2)
        for f2, ci in arr.chord_moves.get(f, []):
            edge = (f, f2, ci)
            s2 = (f2, flag or edge != avoid_first)
            if s2 not in dist or dist[s2] > dist[state] + 1:
                dist[s2] = dist[state] + 1
                prev[s2] = (state, ("chord", ci))
                dq.append(s2)
    if goal not in prev:
        raise ValueError("no transport arc to the requested face")
    steps = []
    s = goal
    while prev[s] is not None:
        p, move = prev[s]
        steps.append((p[0], s[0], move))
        s = p
    steps.reverse()
    tile: Word = ()
    crossings = []
    for f, f2, (kind, x) in steps:
        if kind == "side":
            tile = W.mul(tile, (x,))
            continue
        ch = arr.chords[x]
        d = ch.end - ch.start
        z = _face_centroid(arr, f) - ch.start
        sign = 1 if (d.real * z.imag - d.imag * z.real) > 0 else -1
        crossings.append(Crossing(ch.curve, W.conjugate(tile, ch.deck), sign))
    return steps, crossings


def region_pins(crossings: Sequence[Crossing], curve_index: Sequence[int]) -> list[Word]:
    """Deck element selecting, for each twist, the lift fixing the arc's far end."""
    pins = []
    for c in curve_index:
        seq = [x for x in crossings if x.curve == c]
        lam: Word = ()
        for x in seq:
            lam = W.mul(lam, W.power(x.deck, x.sign))
        pins.append(lam)
    return pins


def curve_indices(f: Fibration, arr) -> list[int]:
    keys = [W.curve_key(w, f.genus) for w in arr.curves]
    return [keys.index(W.curve_key(Hy._word_of(c, f.genus), f.genus)) for c in f.cycles]


def pinned_composite(f: Fibration, pins: Sequence[Word]) -> FreeAutomorphism:
    out = FreeAutomorphism.identity(2 * f.genus)
    for t, p in zip(f.twists(), pins):
        out = out @ (FreeAutomorphism.conjugation(p, 2 * f.genus) @ t.aut if p else t.aut)
    return out


def region_rotation(f: Fibration, arr, region, samples: int = 200) -> Hy.RotationEstimate:
    """Rotation number of the monodromy lifted to fix a point of ``region``."""
    _, cr = transport_arc(arr, region.faces[0])
    pins = region_pins(cr, curve_indices(f, arr))
    return Hy.rotation_number([(t.aut, p) for t, p in zip(f.twists(), pins)], f.genus, samples)


@dataclass
class SectionReport:
    region_id: int
    obstruction: Word  # u_D, Dehn-reduced
    has_section: bool
    self_intersection: Optional[int]
    second_arc_agrees: bool
    rotation_residual: Optional[float] = None


@dataclass
class SectionTable:
    reports: list
    R: int

    @property
    def half_bound(self) -> int:
        return -(-self.R // 2)

    @property
    def sections(self) -> list:
        return [r for r in self.reports if r.has_section]


ROTATION_RESIDUAL = 0.1


def _obstruction(f: Fibration, crossings, cidx) -> Word:
    comp = pinned_composite(f, region_pins(crossings, cidx))
    w = free_inner_witness(comp.images, 2 * f.genus)
    if w is None:
        ok, w = inner_witness(comp.images, f.genus)
        if not ok:
            raise ArithmeticError("transported monodromy is not inner")
    return W.dehn_reduce(w, f.genus)


def _same_obstruction(u: Word, v: Word, genus: int) -> bool:
    if not u or not v:
        return u == v
    return W.are_conjugate(u, v, genus)


def enumerate_sections(f: Fibration, samples: int = 200) -> SectionTable:
    """One report per complementary region of the vanishing cycles.

    The obstruction u_D is read off the monodromy transported to D along a
    shortest dual arc; a second arc (forced through a different first
    crossing) recomputes it.  Self-intersection is -k: at the basepoint
    region k is the exact boundary-twist power, elsewhere the rotation number
    of the lifted monodromy, accepted only with residual below 0.1.
    """
    v = validate(f)
    if not v.trivial_closed:
        raise ValueError("not a Lefschetz factorization: monodromy is nontrivial")
    if f.n == 0:
        return SectionTable([SectionReport(0, (), True, 0, True, 0.0)], 1)
    arr = Hy.arrangement(list(f.cycles), f.genus)
    cidx = curve_indices(f, arr)
    reports = []
    for reg in arr.regions:
        target = reg.faces[0]
        _, cr = transport_arc(arr, target)
        u = _obstruction(f, cr, cidx)
        steps, _ = transport_arc(arr, target)
        first = next(((a, b, m[1]) for a, b, m in steps if m[0] == "chord"), ("none",))
        try:
            _, cr2 = transport_arc(arr, target, avoid_first=first)
            agrees = _same_obstruction(u, _obstruction(f, cr2, cidx), f.genus)
        except ValueError:
            agrees = True  # no alternative arc exists
        has = not u
        k, resid = None, None
        if has:
            if reg.has_basepoint:
                k, resid = v.k_standard, 0.0
            else:
                est = region_rotation(f, arr, reg, samples)
                if est.residual < ROTATION_RESIDUAL:
                    k, resid = est.integer, est.residual
        reports.append(SectionReport(reg.id, u, has, None if k is None else -k, agrees, resid))
    return SectionTable(reports, arr.R)


# ---------------------------------------------------------------------------
# text format


class FibrationSyntaxError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def parse_fibration(text: str) -> Fibration:
    """Parse ``genus g`` followed by ``cycle [ (twist word) ] id`` lines; # starts a comment."""
    genus = None
    cycles = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "genus":
            if genus is not None:
                raise FibrationSyntaxError(ln, "genus given twice")
            try:
                genus = int(rest)
            except ValueError:
                raise FibrationSyntaxError(ln, f"bad genus {rest!r}") from None
            if genus < 2:
                raise FibrationSyntaxError(ln, "fibre genus must be at least two")
        elif head == "cycle":
            if genus is None:
                raise FibrationSyntaxError(ln, "cycle before genus")
            conj: tuple = ()
            if rest.startswith("("):
                close = rest.find(")")
                if close < 0:
                    raise FibrationSyntaxError(ln, "unbalanced parenthesis")
                try:
                    conj = parse_twist_word(rest[1:close])
                except ValueError as e:
                    raise FibrationSyntaxError(ln, str(e)) from None
                rest = rest[close + 1:].strip()
            ids = set(standard_curve_ids(genus))
            for cid in [rest] + [c for c, _ in conj]:
                if cid not in ids:
                    raise FibrationSyntaxError(ln, f"unknown curve id {cid!r}")
            cycles.append(CurveSpec(rest, conj))
        else:
            raise FibrationSyntaxError(ln, f"unknown keyword {head!r}")
    if genus is None:
        raise FibrationSyntaxError(0, "missing genus line")
    return Fibration(genus, tuple(cycles))


def format_fibration(f: Fibration) -> str:
    return "\n".join([f"genus {f.genus}"] + [f"cycle {c}" for c in f.cycles]) + "\n"
