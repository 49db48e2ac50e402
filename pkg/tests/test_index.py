"""Compressed index: transition vector, dense subset, trees, queries."""

import numpy as np
import pytest

from acsx import (Dictionary, build_full_trie, encode_index,
                  choose_dense_subset, SuccinctParentTree,
                  BlockedNextEncoding, MonolithicNextEncoding, PatternTable)
from acsx.index import decode_next_encoding, default_block_size

from conftest import (EXAMPLE_PATTERNS, EXAMPLE_A_COLUMN_ONES, EXAMPLE_B_COLUMN_ONES, EXAMPLE_FAILURE,
                      EXAMPLE_REPORT, EXAMPLE_MARKED_NUMS, random_patterns,
                      brute_failure_by_num, brute_report_by_num)


def example_edge_positions():
    cols = [(0, p) for p in EXAMPLE_A_COLUMN_ONES] + [(1, p) for p in EXAMPLE_B_COLUMN_ONES]
    return sorted(c * 13 + p for c, p in cols)


def test_example_edge_bitvector(example_index):
    got = example_index.next_enc.decode_positions().tolist()
    assert got == example_edge_positions()


def test_example_transitions_exhaustive(example_trie, example_index):
    # oracle: walk the explicit trie for every (vertex, letter)
    next_by_num = {}
    for v in range(example_trie.vertex_count):
        for c, w in example_trie.child_map(v).items():
            next_by_num[(int(example_trie.num[v]), c)] = int(example_trie.num[w])
    for v in range(13):
        for c in (0, 1):
            assert example_index.next(v, c) == next_by_num.get((v, c))
    assert example_index.next(6, 0) == 3
    assert example_index.next(1, 1) == 7
    assert example_index.parent_edge(7) == (1, 1)
    for (v, c), w in next_by_num.items():
        assert example_index.parent_edge(w) == (v, c)
    with pytest.raises(ValueError):
        example_index.parent_edge(0)


def test_example_marks_links(example_index):
    got_marked = [v for v in range(13) if example_index.is_marked(v)]
    assert got_marked == EXAMPLE_MARKED_NUMS
    for v in range(1, 13):
        assert example_index.report_parent(v) == EXAMPLE_REPORT[v]
    for v in range(13):
        if example_index.in_dense_subset(v) and v != 0:
            assert example_index.failure_parent(v) == EXAMPLE_FAILURE[v]


def test_next_out_of_range(example_index):
    with pytest.raises(IndexError):
        example_index.next(0, 5)
    with pytest.raises(IndexError):
        example_index.next(0, -1)
    with pytest.raises(IndexError):
        example_index.next(99, 0)


@pytest.mark.parametrize("monolithic", [False, True])
def test_encodings_vs_searchsorted_oracle(monolithic):
    rng = np.random.default_rng(421)
    for trial in range(25):
        m = int(rng.integers(1, 300))
        sigma = int(rng.integers(1, 7))
        n = sigma * (m + 1)
        if n <= m:
            continue
        positions = np.sort(rng.choice(n, size=m, replace=False)).astype(np.int64)
        if monolithic:
            enc = MonolithicNextEncoding.build(m, sigma, positions)
        else:
            enc = BlockedNextEncoding.build(m, sigma, positions,
                                            default_block_size(m, sigma))
        assert enc.decode_positions().tolist() == positions.tolist()
        probe = set(positions.tolist())
        for g in rng.integers(0, n, size=60).tolist() + positions[:5].tolist():
            want = (int(np.searchsorted(positions, g)) + 1
                    if g in probe else None)
            assert enc.partial_rank(g) == want
            assert enc.rank_all(g) == int(np.searchsorted(positions, g,
                                                          side="right"))
        for j in range(1, m + 1):
            assert enc.select(j) == int(positions[j - 1])
        blob = enc.to_bytes()
        back = decode_next_encoding(blob)
        assert type(back) is type(enc)
        assert back.decode_positions().tolist() == positions.tolist()


def test_blocked_payload_fits_binomial_budget():
    rng = np.random.default_rng(422)
    for trial in range(10):
        m = int(rng.integers(50, 2000))
        sigma = int(rng.integers(2, 5))
        n = sigma * (m + 1)
        positions = np.sort(rng.choice(n, size=m, replace=False)).astype(np.int64)
        enc = BlockedNextEncoding.build(m, sigma, positions,
                                        default_block_size(m, sigma))
        assert enc.payload_bits() <= (enc.block_binomial_bound()
                                      + enc.per_chunk_ceil_bits() + 1e-9)


def random_preorder_tree(rng, n):
    """A random parent vector that is a DFS preorder by construction."""
    parent = np.zeros(n, dtype=np.int64)
    stack = [0]
    for v in range(1, n):
        k = int(rng.integers(0, len(stack)))
        parent[v] = stack[k]
        del stack[k + 1:]
        stack.append(v)
    return parent


def test_parent_tree_random_shapes():
    rng = np.random.default_rng(423)
    shapes = [np.array([0]), np.array([0, 0]), np.array([0, 0, 1]),
              np.arange(-1, 199).clip(0),          # path
              np.zeros(200, dtype=np.int64)]       # star
    for trial in range(40):
        shapes.append(random_preorder_tree(rng, int(rng.integers(1, 400))))
    for parent in shapes:
        parent = np.asarray(parent, dtype=np.int64)
        parent[0] = 0
        tree = SuccinctParentTree.build(parent)
        for v in range(len(parent)):
            assert tree.parent(v) == int(parent[v])
        assert tree.decode_parents().tolist() == parent.tolist()
        blob = tree.to_bytes()
        back = SuccinctParentTree.from_bytes(blob)
        assert back.decode_parents().tolist() == parent.tolist()


def test_parent_tree_rejects_non_preorder():
    with pytest.raises(AssertionError):
        SuccinctParentTree.build(np.array([0, 2, 0], dtype=np.int64))


def test_choose_dense_subset_properties():
    rng = np.random.default_rng(424)
    for trial in range(60):
        n = int(rng.integers(1, 500))
        parent = random_preorder_tree(rng, n)
        depth = np.zeros(n, dtype=np.int64)
        for v in range(1, n):
            depth[v] = depth[parent[v]] + 1
        for t in (1, 2, 3, 4, 8, 16, 61):
            w = choose_dense_subset(depth, t)
            wset = set(w.tolist())
            assert 0 in wset
            assert len(wset) <= -((n) // -t)     # ceil(n / t), n = m + 1
            for v in range(n):
                u, steps = v, 0
                while u not in wset:
                    u = int(parent[u])
                    steps += 1
                assert steps < t
    with pytest.raises(ValueError):
        choose_dense_subset(np.zeros(3, dtype=np.int64), 0)


def test_end_to_end_links_vs_brute():
    rng = np.random.default_rng(425)
    for trial in range(30):
        pats = random_patterns(rng, int(rng.integers(2, 6)))
        trie = build_full_trie(Dictionary(pats))
        t = int(rng.integers(1, 9))
        index = encode_index(trie, t=t)
        fail = brute_failure_by_num(trie)
        rept = brute_report_by_num(trie, fail)
        marked = sorted(int(trie.num[v]) for v in trie.marked_ids)
        for v in range(index.m + 1):
            assert index.is_marked(v) == (v in marked)
            if v and index.in_dense_subset(v):
                assert index.failure_parent(v) == fail[v]
            if v:
                assert index.report_parent(v) == rept[v]
        nav = index.nav_cache()
        assert sorted(np.flatnonzero(nav.in_w).tolist()) == \
            sorted(set(index.fail_enc.membership.one_positions().tolist()))


def test_pattern_table_round_trip():
    rng = np.random.default_rng(426)
    for trial in range(20):
        d = int(rng.integers(1, 50))
        lengths = rng.integers(1, 300, size=d).astype(np.int64)
        if trial % 3 == 0:
            lengths[:] = lengths[0]          # exercise the uniform collapse
        dd = int(rng.integers(1, d + 1))
        counts = np.ones(dd, dtype=np.int64)
        for _ in range(d - dd):
            counts[int(rng.integers(0, dd))] += 1
        offsets = np.zeros(dd + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        ids = rng.permutation(d).astype(np.int64)
        table = PatternTable(lengths, offsets, ids)
        back = PatternTable.from_bytes(table.to_bytes())
        assert back.lengths.tolist() == lengths.tolist()
        assert back.offsets.tolist() == offsets.tolist()
        assert back.ids.tolist() == ids.tolist()
        for k in range(dd):
            assert back.ids_at(k) == table.ids_at(k)


def test_duplicate_patterns_report_all_ids():
    trie = build_full_trie(Dictionary([b"ab", b"ab", b"b"]))
    index = encode_index(trie, t=1)
    v = int(trie.num[trie.walk([0, 1])])
    r = index.mark_enc.partial_rank(v)
    assert sorted(index.pattern_table.ids_at(r - 1)) == [0, 1]


def test_wide_alphabet_index():
    pats = [(70000, 3, 5), (3, 5), (70000,), (5, 5)]
    trie = build_full_trie(Dictionary(pats))
    index = encode_index(trie, t=2, monolithic=True)
    assert index.sigma == 70001
    assert index.alphabet_map is None
    v = index.next(0, 70000)
    assert v is not None
    w = index.next(v, 3)
    x = index.next(w, 5)
    assert x is not None and index.is_marked(x)
    assert index.decode_patterns() == [tuple(p) for p in pats]


def test_decode_patterns_bytes(example_index):
    assert example_index.decode_patterns() == EXAMPLE_PATTERNS


def test_encode_index_validations(example_trie):
    with pytest.raises(ValueError):
        encode_index(example_trie, t=0)


def test_section_bits_all_positive(example_index):
    bits = example_index.section_bits()
    assert set(bits) == {"next", "next_payload", "mark", "fail_membership",
                         "fail_tree", "report_tree", "pattern_table"}
    assert all(v >= 0 for v in bits.values())
    assert example_index.total_section_bits() == sum(
        v for k, v in bits.items() if k != "next_payload")
