"""Fenchel-Nielsen coordinates for genus 2 and the total geodesic length objective.

Pants decomposition: a1, the separating curve s1 = [a1, b1], and a2.  Each
one-holed torus is built with b perpendicular to a at zero twist; the second
torus is glued to the first by the SL2 conjugation taking its boundary
commutator to the inverse of the first one, followed by a shift along that
boundary's axis (the twist about s1).
"""

from __future__ import annotations

import math
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import hyperbolic as Hy
from . import words as W
from .fibration import Fibration, hurwitz_neighbours, multiset_key
from .mapping_class import CurveSpec
from .words import Word

GENUS = 2
PANTS_CURVES = ("c1", "s1", "c5")
LENGTH_WINDOW = (1e-4, 20.0)
GRAD_TOL = 1e-5
GRAD_STEP = 1e-4


@dataclass(frozen=True)
class FNCoords:
    lengths: tuple  # pants-curve lengths, ordered as PANTS_CURVES
    twists: tuple

    def __post_init__(self):
        if len(self.lengths) != 3 or len(self.twists) != 3:
            raise ValueError("genus-2 coordinates have three lengths and three twists")
        if min(self.lengths) <= 0:
            raise ValueError("pants-curve lengths must be positive")

    @classmethod
    def from_vector(cls, v) -> "FNCoords":
        v = [float(x) for x in v]
        return cls(tuple(v[:3]), tuple(v[3:]))

    def vector(self) -> np.ndarray:
        return np.array(self.lengths + self.twists, dtype=float)


def _torus(la: float, ls: float, tw: float) -> tuple[np.ndarray, np.ndarray]:
    A = np.diag([math.exp(la / 2), math.exp(-la / 2)])
    m = 2.0 * math.asinh(math.cosh(ls / 4) / math.sinh(la / 2))
    B0 = np.array([[math.cosh(m / 2), math.sinh(m / 2)], [math.sinh(m / 2), math.cosh(m / 2)]])
    T = np.diag([math.exp(tw / 2), math.exp(-tw / 2)])
    return A, B0 @ T


def _comm(A, B):
    return A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)


def _eigenbasis(M: np.ndarray) -> np.ndarray:
    """Columns: eigenvectors for the larger-modulus then smaller eigenvalue, det 1."""
    vals, vecs = np.linalg.eig(M)
    order = np.argsort(-np.abs(vals))
    P = np.real(vecs[:, order])
    d = np.linalg.det(P)
    if d < 0:
        P[:, 1] *= -1
        d = -d
    return P / math.sqrt(d)


def holonomy(x: FNCoords) -> Hy.FuchsianRealization:
    lo, hi = LENGTH_WINDOW
    if min(x.lengths) < lo or max(x.lengths) > hi:
        raise Hy.DegenerateGeometry("pants-curve length outside the supported window")
    l1, ls, l2 = x.lengths
    t1, ts, t2 = x.twists
    A1, B1 = _torus(l1, ls, t1)
    A2, B2 = _torus(l2, ls, t2)
    # Work in the frame where the boundary commutator K is diagonal: there the
    # gluing is the swap J and the s1 twist is a diagonal shift.  Building the
    # group directly in this frame avoids a gluing matrix with entries ~1e3.
    P = _eigenbasis(_comm(A1, B1))
    Q = _eigenbasis(_comm(A2, B2))
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    g = np.diag([math.exp(ts / 2), math.exp(-ts / 2)]) @ J @ np.linalg.inv(Q)
    gi = np.linalg.inv(g)
    Pi = np.linalg.inv(P)
    gens = np.array([Pi @ A1 @ P, Pi @ B1 @ P, g @ A2 @ gi, g @ B2 @ gi])
    # a diagonal conjugation (an isometry) balancing the off-diagonal entries
    s = (np.abs(gens[:, 1, 0]).sum() / np.abs(gens[:, 0, 1]).sum()) ** 0.25
    D, Di = np.diag([s, 1 / s]), np.diag([1 / s, s])
    gens = np.array([D @ x @ Di for x in gens])
    return Hy.FuchsianRealization(GENUS, gens, np.zeros(0))


def _core(w) -> Word:
    return W._cyclic_dehn(tuple(w), GENUS)[0]


def _curve_word(c) -> Word:
    if isinstance(c, str):
        c = CurveSpec(c)
    return c.word(GENUS) if hasattr(c, "word") else tuple(c)


class LengthObjective:
    """Sum of multiplicity times geodesic length, over distinct isotopy classes."""

    def __init__(self, curves: Sequence):
        counts: Counter = Counter()
        rep = {}
        for c in curves:
            w = _curve_word(c)
            k = W.curve_key(w, GENUS)
            counts[k] += 1
            rep.setdefault(k, _core(w))
        self.keys = list(counts)
        self.words = [rep[k] for k in self.keys]
        self.mult = np.array([counts[k] for k in self.keys], dtype=float)

    def __call__(self, v) -> float:
        x = FNCoords.from_vector(v)
        return float(self.mult @ holonomy(x).lengths(self.words))

    def gradient(self, v, h: float = GRAD_STEP) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        g = np.empty(len(v))
        for i in range(len(v)):
            e = np.zeros(len(v))
            e[i] = h
            g[i] = (self(v + e) - self(v - e)) / (2 * h)
        return g


def total_length(x: FNCoords, V: Sequence) -> float:
    return LengthObjective(V)(x.vector())


@dataclass
class LengthReport:
    value: float
    minimizer: FNCoords
    gradient_norm: float
    multiset: list  # (curve word, multiplicity)
    restarts: list  # best value reached from each seed


def _fills(curves) -> bool:
    words = [_curve_word(c) for c in curves]
    return Hy.arrangement(words, GENUS).fills


def _descend(obj: LengthObjective, v0: np.ndarray, sweeps: int = 3) -> np.ndarray:
    lo, hi = LENGTH_WINDOW
    v = v0.copy()
    for _ in range(sweeps):
        for i in (3, 4, 5, 0, 1, 2):  # twist lines first: convex there
            def line(t, i=i):
                u = v.copy()
                u[i] = t
                try:
                    return obj(u)
                except Hy.DegenerateGeometry:
                    return math.inf
            if i < 3:
                res = minimize_scalar(line, bounds=(max(lo, 0.2 * v[i]), min(hi, 3.0 * v[i])),
                                      method="bounded", options={"xatol": 1e-6})
            else:
                span = 2.0 * v[i - 3] + 1.0
                res = minimize_scalar(line, bounds=(v[i] - span, v[i] + span),
                                      method="bounded", options={"xatol": 1e-6})
            if res.fun <= line(v[i]):
                v[i] = res.x
    return v


def _polish(obj: LengthObjective, v0: np.ndarray) -> np.ndarray:
    lo, hi = LENGTH_WINDOW
    bounds = [(lo, hi)] * 3 + [(None, None)] * 3
    res = minimize(obj, v0, jac=lambda v: obj.gradient(v, 1e-6), method="L-BFGS-B",
                   bounds=bounds, options={"ftol": 1e-15, "gtol": 1e-9, "maxiter": 500})
    return res.x


def minimize_length(V: Sequence, seeds: int = 5, seed: int = 0, check_fill: bool = True,
                    start: Optional[FNCoords] = None, max_rounds: int = 6) -> LengthReport:
    """Minimize total geodesic length of the multiset V over genus-2 Teichmueller space.

    Each restart runs coordinate descent (twist lines, then length lines)
    and a bounded quasi-Newton polish; it stops once the central-difference
    gradient norm is below 1e-5.  The best restart is returned.
    """
    if check_fill and not _fills(V):
        raise ValueError("curve system does not fill: the length minimum is not attained")
    obj = LengthObjective(V)
    rng = np.random.default_rng(seed)
    starts = []
    if start is not None:
        starts.append(start.vector())
    while len(starts) < seeds:
        ls = rng.uniform(0.6, 2.5, 3)
        starts.append(np.concatenate([ls, rng.uniform(-0.5, 0.5, 3) * ls]))
    best = None
    values = []
    for v in starts:
        for _ in range(max_rounds):
            v = _polish(obj, _descend(obj, v, sweeps=2))
            gn = float(np.linalg.norm(obj.gradient(v)))
            if gn < GRAD_TOL:
                break
        val = obj(v)
        values.append(val)
        if best is None or val < best[0]:
            best = (val, v, gn)
    val, v, gn = best
    if gn >= GRAD_TOL:
        raise ArithmeticError(f"length minimization did not converge (gradient {gn:.2e})")
    ms = [(w, int(m)) for w, m in zip(obj.words, obj.mult)]
    return LengthReport(val, FNCoords.from_vector(v), gn, ms, values)


def twist_path(V: Sequence, x: FNCoords, index: int, span: float = 1.0, points: int = 21) -> np.ndarray:
    """Total length sampled along the twist line of pants curve ``index``."""
    obj = LengthObjective(V)
    out = []
    for t in np.linspace(-span, span, points):
        v = x.vector()
        v[3 + index] += t
        out.append(obj(v))
    return np.array(out)


# ---------------------------------------------------------------------------
# Hurwitz-orbit invariants


def hurwitz_orbit(f: Fibration, depth: int, max_nodes: Optional[int] = None) -> list[Fibration]:
    """Breadth-first Hurwitz orbit, one factorization per multiset of supports."""
    seen = {multiset_key(f)}
    out = [f]
    frontier = deque([(f, 0)])
    while frontier:
        g, d = frontier.popleft()
        if d == depth:
            continue
        for h in hurwitz_neighbours(g):
            if max_nodes is not None and len(out) >= max_nodes:
                return out
            k = multiset_key(h)
            if k in seen:
                continue
            seen.add(k)
            out.append(h)
            frontier.append((h, d + 1))
    return out


@dataclass
class OrbitResult:
    best: float
    orbit_visited: int
    depth: int
    argbest: Fibration
    minimizer: Optional[FNCoords] = None


_node_cache: dict = {}


def length_invariant(f: Fibration, depth: int, max_nodes: int = 24, seeds: int = 2,
                     seed: int = 0, threads: int = 1) -> OrbitResult:
    """Least total vanishing-cycle length over a bounded Hurwitz orbit (an upper bound)."""
    if f.genus != GENUS:
        raise ValueError("Fenchel-Nielsen coordinates are implemented for genus 2 only")
    nodes = hurwitz_orbit(f, depth, max_nodes)

    def evaluate(i_node):
        i, g = i_node
        key = (multiset_key(g), seeds, seed + i)
        if key not in _node_cache:
            try:
                rep = minimize_length(list(g.cycles), seeds=seeds, seed=seed + i)
                _node_cache[key] = (rep.value, rep.minimizer)
            except ValueError:  # not filling
                _node_cache[key] = (math.inf, None)
        return _node_cache[key]

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(evaluate, enumerate(nodes)))
    else:
        results = [evaluate(t) for t in enumerate(nodes)]
    i = min(range(len(nodes)), key=lambda j: (results[j][0], j))
    return OrbitResult(results[i][0], len(nodes), depth, nodes[i], results[i][1])


def total_intersections(f: Fibration, cache: Optional[dict] = None) -> int:
    cache = {} if cache is None else cache
    words = [_curve_word(c) for c in f.cycles]
    keys = [W.curve_key(w, f.genus) for w in words]
    total = 0
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            if keys[i] == keys[j]:
                continue
            k = (keys[i], keys[j]) if keys[i] < keys[j] else (keys[j], keys[i])
            if k not in cache:
                cache[k] = Hy.geometric_intersection(words[i], words[j], f.genus)
            total += cache[k]
    return total


def min_total_intersections(f: Fibration, depth: int, max_nodes: Optional[int] = 500) -> OrbitResult:
    nodes = hurwitz_orbit(f, depth, max_nodes)
    cache: dict = {}
    vals = [total_intersections(g, cache) for g in nodes]
    i = min(range(len(nodes)), key=lambda j: (vals[j], j))
    return OrbitResult(vals[i], len(nodes), depth, nodes[i])
