"""Shared fixtures: the worked six-pattern dictionary and random builders."""

import numpy as np
import pytest

from acsx import Dictionary, build_full_trie, encode_index

# The running example: six patterns over {a, b} whose trie has 13 vertices.
EXAMPLE_PATTERNS = [b"aaba", b"aabb", b"aba", b"b", b"ba", b"bbbb"]

# Hand-derived numbering (sort by reversed root string):
# "" a aa ab aba abaa b ba baa bb bbaa bbb bbbb  ->  num 0..12
EXAMPLE_NUM_BY_PATH = {
    "": 0, "a": 1, "aa": 2, "ba": 3, "aba": 4, "aaba": 5,
    "b": 6, "ab": 7, "aab": 8, "bb": 9, "aabb": 10, "bbb": 11, "bbbb": 12,
}

# One-positions of the two letter columns of the edge bitvector, each of
# length 13 (parents in number order); derived by hand from the trie and
# cross-checked by the exhaustive transition oracle below.
EXAMPLE_A_COLUMN_ONES = [0, 1, 6, 7, 8]
EXAMPLE_B_COLUMN_ONES = [0, 1, 2, 6, 8, 9, 11]

# failure / report links in number space (brute-force suffix oracle)
EXAMPLE_FAILURE = {1: 0, 2: 1, 3: 1, 4: 3, 5: 4, 6: 0, 7: 6, 8: 7, 9: 6,
               10: 9, 11: 9, 12: 11}
EXAMPLE_REPORT = {1: 0, 2: 0, 3: 0, 4: 3, 5: 4, 6: 0, 7: 6, 8: 6, 9: 6,
              10: 6, 11: 6, 12: 6}
EXAMPLE_MARKED_NUMS = [3, 4, 5, 6, 10, 12]


@pytest.fixture(scope="session")
def example_trie():
    return build_full_trie(Dictionary(EXAMPLE_PATTERNS))


@pytest.fixture(scope="session")
def example_index(example_trie):
    return encode_index(example_trie, t=2)


def random_patterns(rng, sigma, max_d=12, max_len=10, base=97):
    """Distinct random byte patterns over an alphabet of size sigma."""
    pats, seen = [], set()
    for _ in range(int(rng.integers(1, max_d + 1))):
        ln = int(rng.integers(1, max_len + 1))
        w = bytes(rng.integers(base, base + sigma, size=ln).astype(np.uint8))
        if w not in seen:
            seen.add(w)
            pats.append(w)
    return pats


def brute_failure_by_num(trie):
    """num -> num of the longest proper suffix vertex, by direct search."""
    by_path = {}
    for v in range(trie.vertex_count):
        by_path[tuple(trie.path_labels(v))] = v
    out = {}
    for v in range(1, trie.vertex_count):
        path = tuple(trie.path_labels(v))
        for k in range(1, len(path) + 1):
            if path[k:] in by_path:
                out[int(trie.num[v])] = int(trie.num[by_path[path[k:]]])
                break
    return out


def brute_report_by_num(trie, fail_by_num):
    """num -> num of the longest marked proper suffix, walking failures."""
    marked = set(int(trie.num[v]) for v in trie.marked_ids)
    out = {}
    for v in range(1, trie.vertex_count):
        u = fail_by_num[int(trie.num[v])]
        while u != 0 and u not in marked:
            u = fail_by_num[u]
        out[int(trie.num[v])] = u
    return out
