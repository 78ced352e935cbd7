"""Compare the numba and numpy kernel backends on random word batches.

    python3 benchmarks/bench_kernels.py [--words N] [--max-len L] [--repeat R]

Set LEFSCHETZ_DISABLE_NUMBA=1 to see the library default switch to numpy; this
script times both backends explicitly regardless of the flag.
"""

import argparse
import time

import numpy as np

from lefschetz import _kernels as K
from lefschetz.hyperbolic import realize


def random_words(n, max_len, genus, rng):
    out = []
    for _ in range(n):
        L = int(rng.integers(1, max_len + 1))
        w = []
        while len(w) < L:
            x = int(rng.integers(1, 2 * genus + 1)) * (1 if rng.random() < 0.5 else -1)
            if w and w[-1] == -x:
                continue
            w.append(x)
        out.append(tuple(w))
    return out


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--words", type=int, default=20000)
    ap.add_argument("--max-len", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--genus", type=int, default=2)
    a = ap.parse_args()
    rng = np.random.default_rng(0)
    table = realize(a.genus).table
    flat, off = K.pack_words(random_words(a.words, a.max_len, a.genus, rng))
    print(f"{a.words} words, length <= {a.max_len}, genus {a.genus}; library default backend: {K.backend()}")
    if not K.HAVE_NUMBA:
        print("numba unavailable (or disabled): timing numpy only")
    backends = [False] + ([True] if K.HAVE_NUMBA else [])
    results = {}
    for use in backends:
        name = "numba" if use else "numpy"
        if use:  # compile outside the timed region
            m, lg = K.word_products(table, flat[:10], off[:2], True)
            K.lengths_from_products(m, lg, True)
            K.endpoints_from_products(m, True)
        mats, logs = K.word_products(table, flat, off, use)
        t_prod = best_of(lambda: K.word_products(table, flat, off, use), a.repeat)
        t_len = best_of(lambda: K.lengths_from_products(mats, logs, use), a.repeat)
        t_end = best_of(lambda: K.endpoints_from_products(mats, use), a.repeat)
        results[name] = (mats, logs)
        print(f"{name:>6}: products {t_prod * 1e3:8.2f} ms  lengths {t_len * 1e3:7.2f} ms  "
              f"endpoints {t_end * 1e3:7.2f} ms")
    if len(results) == 2:
        ln = K.lengths_from_products(*results["numpy"], False)
        lb = K.lengths_from_products(*results["numba"], True)
        print(f"max |length difference| between backends: {np.max(np.abs(ln - lb)):.2e}")


if __name__ == "__main__":
    main()
