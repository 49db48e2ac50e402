"""Throughput comparison of the compiled and pure-python scan kernels.

Builds a few synthetic dictionaries, streams the same text through both
kernels, and prints a table of MB/s plus the speedup ratio.  Run from the
repository root:

    python benchmarks/compare_kernels.py [--size-mib 8] [--seed 7]
"""

import argparse
import time

import numpy as np

from acsx import Dictionary, build_full_trie, encode_index, scan, ScanState
from acsx.kernel import compiled_available


def make_dictionary(rng, kind):
    if kind == "small_dense":
        sigma, d, lo, hi = 4, 50, 3, 12
    elif kind == "mixed":
        sigma, d, lo, hi = 16, 400, 2, 30
    else:  # long_patterns
        sigma, d, lo, hi = 4, 60, 80, 300
    pats, seen = [], set()
    while len(pats) < d:
        w = bytes(rng.integers(97, 97 + sigma, size=int(rng.integers(lo, hi)),
                               dtype=np.int64).astype(np.uint8))
        if w not in seen:
            seen.add(w)
            pats.append(w)
    return sigma, pats


def time_scan(index, text, kernel, repetitions):
    best = None
    occ = None
    for _ in range(repetitions):
        state = ScanState(index, kernel=kernel)
        t0 = time.perf_counter()
        n = scan(index, text, state=state)
        dt = time.perf_counter() - t0
        if occ is None:
            occ = n
        elif occ != n:
            raise AssertionError("kernel %s returned %d then %d matches"
                                 % (kernel, occ, n))
        best = dt if best is None else min(best, dt)
    return best, occ


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size-mib", type=float, default=8.0,
                    help="text size in MiB (default 8)")
    ap.add_argument("--t", type=int, default=8,
                    help="failure-link density stride (default 8)")
    ap.add_argument("--repetitions", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if not compiled_available():
        print("compiled kernel is NOT built; showing pure-python only")
    rng = np.random.default_rng(args.seed)
    n = int(args.size_mib * 1024 * 1024)
    mib = n / (1024 * 1024)

    print("%-14s %10s %12s %12s %9s %10s"
          % ("dictionary", "edges", "py MB/s", "c MB/s", "speedup", "matches"))
    for kind in ("small_dense", "mixed", "long_patterns"):
        sigma, pats = make_dictionary(rng, kind)
        index = encode_index(build_full_trie(Dictionary(pats)), t=args.t)
        text = bytes(rng.integers(97, 97 + sigma, size=n,
                                  dtype=np.int64).astype(np.uint8))
        t_py, occ_py = time_scan(index, text, "py", args.repetitions)
        row = [kind, index.m, mib / t_py]
        if compiled_available():
            t_c, occ_c = time_scan(index, text, "c", args.repetitions)
            if occ_c != occ_py:
                raise AssertionError("kernels disagree: %d vs %d"
                                     % (occ_c, occ_py))
            row += [mib / t_c, t_py / t_c, occ_py]
            print("%-14s %10d %12.2f %12.2f %8.1fx %10d" % tuple(row))
        else:
            print("%-14s %10d %12.2f %12s %9s %10d"
                  % (kind, index.m, mib / t_py, "-", "-", occ_py))


if __name__ == "__main__":
    main()
