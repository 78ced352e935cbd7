"""Hot numeric kernels: products of 2x2 matrices along words, lengths, axis endpoints.

Two interchangeable backends share one signature per kernel.  The numba
backend is used when numba imports and ``LEFSCHETZ_DISABLE_NUMBA`` is unset
(or "0"); otherwise the vectorized numpy backend runs.  Words are passed
packed: a flat int64 array of signed generator indices plus an offsets array
of length N + 1.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

_DISABLED = os.environ.get("LEFSCHETZ_DISABLE_NUMBA", "0") not in ("", "0", "false", "False")

try:  # pragma: no cover - exercised through the backend flag
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def pack_words(words: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    lens = np.fromiter((len(w) for w in words), dtype=np.int64, count=len(words))
    offsets = np.zeros(len(words) + 1, dtype=np.int64)
    np.cumsum(lens, out=offsets[1:])
    flat = np.fromiter((x for w in words for x in w), dtype=np.int64, count=int(offsets[-1]))
    return flat, offsets


def generator_table(gens: np.ndarray) -> np.ndarray:
    """Stack (2g, 2, 2) SL2 matrices with their inverses: index 2g + i is gen i inverted."""
    gens = np.asarray(gens, dtype=np.float64)
    inv = np.empty_like(gens)
    inv[:, 0, 0] = gens[:, 1, 1]
    inv[:, 1, 1] = gens[:, 0, 0]
    inv[:, 0, 1] = -gens[:, 0, 1]
    inv[:, 1, 0] = -gens[:, 1, 0]
    return np.concatenate([gens, inv])


# ---------------------------------------------------------------------------
# numpy backend


def _np_products(table, flat, offsets):
    n = len(offsets) - 1
    rank = table.shape[0] // 2
    lens = np.diff(offsets)
    out = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
    logs = np.zeros(n)
    if n == 0:
        return out, logs
    idx = np.where(flat > 0, flat - 1, rank - flat - 1)
    maxlen = int(lens.max(initial=0))
    for pos in range(maxlen):
        live = np.nonzero(lens > pos)[0]
        m = table[idx[offsets[live] + pos]]
        out[live] = out[live] @ m
        s = np.abs(out[live]).max(axis=(1, 2))
        out[live] /= s[:, None, None]
        logs[live] += np.log(s)
    return out, logs


def _np_lengths(mats, logs):
    tr = np.abs(mats[:, 0, 0] + mats[:, 1, 1])
    with np.errstate(divide="ignore"):
        logt = np.log(tr) + logs
    big = logt > 15.0
    out = np.empty(len(tr))
    # 2 arccosh(t/2) = 2 log(t/2 + sqrt(t^2/4 - 1)); asymptotic form avoids overflow
    t = np.exp(np.minimum(logt, 15.0))
    out[~big] = 2.0 * np.arccosh(np.maximum(t[~big] / 2.0, 1.0))
    out[big] = 2.0 * logt[big]
    return out


def _np_endpoints(mats):
    """Attracting / repelling fixed points of hyperbolic matrices as disc angles."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))
    sgn = np.where(tr >= 0, 1.0, -1.0)
    lam_big = (tr + sgn * disc) / 2.0
    lam_small = (tr - sgn * disc) / 2.0
    return _eig_angle(a, b, c, d, lam_big), _eig_angle(a, b, c, d, lam_small)


def _eig_angle(a, b, c, d, lam):
    # eigenvector (x, y) of [[a, b], [c, d]]; boundary point x / y of the half-plane
    x1, y1 = b, lam - a
    x2, y2 = lam - d, c
    use1 = np.hypot(x1, y1) >= np.hypot(x2, y2)
    x = np.where(use1, x1, x2)
    y = np.where(use1, y1, y2)
    return _half_plane_to_angle(x, y)


def _half_plane_to_angle(x, y):
    # Cayley z -> (z - i)/(z + i) on the projective point [x : y] of R u {oo}
    re = x * x - y * y
    im = -2.0 * x * y
    return np.mod(np.arctan2(im, re), 2.0 * np.pi)


# ---------------------------------------------------------------------------
# numba backend

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_products(table, flat, offsets):  # pragma: no cover - compiled
        n = offsets.shape[0] - 1
        rank = table.shape[0] // 2
        out = np.empty((n, 2, 2))
        logs = np.zeros(n)
        for k in range(n):
            p00, p01, p10, p11 = 1.0, 0.0, 0.0, 1.0
            lg = 0.0
            for pos in range(offsets[k], offsets[k + 1]):
                x = flat[pos]
                j = x - 1 if x > 0 else rank - x - 1
                m00, m01 = table[j, 0, 0], table[j, 0, 1]
                m10, m11 = table[j, 1, 0], table[j, 1, 1]
                q00 = p00 * m00 + p01 * m10
                q01 = p00 * m01 + p01 * m11
                q10 = p10 * m00 + p11 * m10
                q11 = p10 * m01 + p11 * m11
                s = max(abs(q00), abs(q01), abs(q10), abs(q11))
                p00, p01, p10, p11 = q00 / s, q01 / s, q10 / s, q11 / s
                lg += np.log(s)
            out[k, 0, 0] = p00
            out[k, 0, 1] = p01
            out[k, 1, 0] = p10
            out[k, 1, 1] = p11
            logs[k] = lg
        return out, logs

    @njit(cache=True)
    def _nb_lengths(mats, logs):  # pragma: no cover - compiled
        n = mats.shape[0]
        out = np.empty(n)
        for k in range(n):
            tr = abs(mats[k, 0, 0] + mats[k, 1, 1])
            logt = np.log(tr) + logs[k] if tr > 0 else -np.inf
            if logt > 15.0:
                out[k] = 2.0 * logt
            else:
                t = np.exp(logt) / 2.0
                out[k] = 2.0 * np.arccosh(t if t > 1.0 else 1.0)
        return out

    @njit(cache=True)
    def _nb_angle(x, y):  # pragma: no cover - compiled
        a = np.arctan2(-2.0 * x * y, x * x - y * y)
        return a + 2.0 * np.pi if a < 0 else a

    @njit(cache=True)
    def _nb_endpoints(mats):  # pragma: no cover - compiled
        n = mats.shape[0]
        att = np.empty(n)
        rep = np.empty(n)
        for k in range(n):
            a, b, c, d = mats[k, 0, 0], mats[k, 0, 1], mats[k, 1, 0], mats[k, 1, 1]
            tr = a + d
            det = a * d - b * c
            disc = np.sqrt(max(tr * tr - 4.0 * det, 0.0))
            sgn = 1.0 if tr >= 0 else -1.0
            for which in range(2):
                lam = (tr + sgn * disc) / 2.0 if which == 0 else (tr - sgn * disc) / 2.0
                x1, y1 = b, lam - a
                x2, y2 = lam - d, c
                if x1 * x1 + y1 * y1 >= x2 * x2 + y2 * y2:
                    ang = _nb_angle(x1, y1)
                else:
                    ang = _nb_angle(x2, y2)
                if which == 0:
                    att[k] = ang
                else:
                    rep[k] = ang
        return att, rep


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def word_products(table, flat, offsets, use_numba=None):
    """Normalized products and log scale: true product = exp(log) * mats."""
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _nb_products(table, flat, offsets)
    return _np_products(table, flat, offsets)


def lengths_from_products(mats, logs, use_numba=None):
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _nb_lengths(mats, logs)
    return _np_lengths(mats, logs)


def endpoints_from_products(mats, use_numba=None):
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _nb_endpoints(mats)
    return _np_endpoints(mats)


def word_lengths(table, words, use_numba=None) -> np.ndarray:
    flat, off = pack_words(words)
    mats, logs = word_products(table, flat, off, use_numba)
    return lengths_from_products(mats, logs, use_numba)


def word_endpoints(table, words, use_numba=None) -> tuple[np.ndarray, np.ndarray]:
    flat, off = pack_words(words)
    mats, _ = word_products(table, flat, off, use_numba)
    return endpoints_from_products(mats, use_numba)
