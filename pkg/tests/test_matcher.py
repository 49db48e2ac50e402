"""Streaming scanner: differential checks against reference and naive AC."""

import numpy as np
import pytest

from acsx import (Dictionary, build_full_trie, encode_index, scan,
                  scan_reference, ScanState)
from acsx.analysis import naive_ac_scan
from acsx.matcher import restore_window
from acsx import _scan_kernel_py as K

from conftest import EXAMPLE_PATTERNS, random_patterns


def collect(index, text, **kw):
    out = []
    n = scan(index, text,
             sink=lambda o: out.append((o.end_pos, o.pattern_id)), **kw)
    assert n == len(out)
    return sorted(out)


def collect_ref(index, text):
    out = []
    scan_reference(index, text,
                   sink=lambda o: out.append((o.end_pos, o.pattern_id)))
    return sorted(out)


def test_example_texts(example_index):
    want = naive_ac_scan(EXAMPLE_PATTERNS, b"bbbb")
    assert want == [(0, 3), (1, 3), (2, 3), (3, 3), (3, 5)]
    assert collect(example_index, b"bbbb") == want
    assert collect(example_index, b"") == []
    for text in (b"aabab", b"aababbbb", b"abababa", b"xyz", b"aabbxbbbb"):
        want = naive_ac_scan(EXAMPLE_PATTERNS, text)
        assert collect(example_index, text) == want
        assert collect_ref(example_index, text) == want


def test_start_positions(example_index):
    text = b"aababbbb"
    outs = []
    scan(example_index, text, sink=outs.append)
    assert outs
    for o in outs:
        pat = EXAMPLE_PATTERNS[o.pattern_id]
        assert bytes(text[o.start_pos:o.end_pos + 1]) == pat


def test_random_differential():
    rng = np.random.default_rng(99173)
    for trial in range(120):
        sigma = int(rng.integers(2, 7))
        pats = random_patterns(rng, sigma, max_d=13, max_len=9)
        ix = encode_index(build_full_trie(Dictionary(pats)),
                          t=int(rng.integers(1, 9)),
                          monolithic=bool(rng.random() < 0.25))
        n = int(rng.integers(0, 400))
        body = rng.integers(97, 97 + sigma, size=n).astype(np.uint8)
        body[rng.random(n) < 0.05] = 90      # 'Z', outside every pattern
        text = bytes(body)
        want = naive_ac_scan(pats, text)
        assert collect(ix, text) == want
        assert collect_ref(ix, text) == want
        if n > 3:
            cuts = sorted(rng.integers(0, n, size=3).tolist())
            pieces = [text[a:b] for a, b in zip([0] + cuts, cuts + [n])]
            assert collect(ix, pieces) == want


def test_deep_tries_with_climbs():
    rng = np.random.default_rng(7710)
    restores_seen = 0
    for trial in range(25):
        ln = int(rng.integers(60, 200))
        longpat = bytes(rng.integers(97, 99, size=ln).astype(np.uint8))
        pats = [longpat, b"a", b"ab", b"ba"]
        t = int(rng.integers(2, 40))
        ix = encode_index(build_full_trie(Dictionary(pats)), t=t)
        parts = []
        for _ in range(12):
            parts.append(longpat[:int(rng.integers(1, ln))])
            parts.append(bytes([int(rng.integers(97, 99))]))
        text = b"".join(parts)
        st = ScanState(ix, kernel="py")
        assert collect(ix, text, state=st) == naive_ac_scan(pats, text)
        assert collect_ref(ix, text) == naive_ac_scan(pats, text)
        assert st.parent_steps <= (t + 1) * len(text) + ix.m
        restores_seen += st.restore_count
    assert restores_seen > 0


def test_forced_restores_fallback_path():
    pats = [b"a" * 150, b"b"]
    ix = encode_index(build_full_trie(Dictionary(pats)), t=40)
    restores = 0
    for reps, tail in ((30, b""), (6, b"a" * 200)):
        text = (b"a" * 79 + b"b") * reps + tail
        st = ScanState(ix, kernel="py")
        assert collect(ix, text, state=st) == naive_ac_scan(pats, text)
        restores += st.restore_count
    assert restores > 0


def test_forced_restores_checkpoint_path():
    # stall far enough below the frontier that the saved checkpoint
    # vertex, not the frontier itself, seeds the window rebuild
    pats = [b"a" * 400, b"b"]
    ix = encode_index(build_full_trie(Dictionary(pats)), t=120)
    text = (b"a" * 380 + b"b") * 4
    st = ScanState(ix, kernel="py")
    assert collect(ix, text, state=st) == naive_ac_scan(pats, text)
    from_checkpoint = st.restore_count - int(st.st[K.FALLB])
    assert from_checkpoint > 0
    assert st.parent_steps <= 121 * len(text) + ix.m


def test_forced_restores_chunked():
    pats = [b"a" * 150, b"ab", b"ba", b"b" * 7]
    ix = encode_index(build_full_trie(Dictionary(pats)), t=40)
    text = (b"a" * 79 + b"bb") * 12
    st = ScanState(ix, kernel="py")
    got = collect(ix, [text[k:k + 1] for k in range(len(text))], state=st)
    assert got == naive_ac_scan(pats, text)
    assert st.restore_count > 0


def test_frontier_letter_survives_window_eviction():
    # regression: a climb spanning the whole ring used to evict the one
    # letter read at the frontier but not yet consumed, desyncing the
    # stream cursor by one position
    pats = [b"aaaaaaabb", b"a", b"ab", b"ba"]
    text = b"aaaaaaabbbaa"
    ix = encode_index(build_full_trie(Dictionary(pats)), t=25)
    want = naive_ac_scan(pats, text)
    assert collect(ix, text, kernel="py") == want
    for k in (1, 2, 3, 5):
        pieces = [text[j:j + k] for j in range(0, len(text), k)]
        assert collect(ix, pieces, kernel="py") == want


def test_stride_independence():
    rng = np.random.default_rng(8181)
    for trial in range(20):
        sigma = int(rng.integers(2, 5))
        pats = random_patterns(rng, sigma, max_d=9, max_len=7)
        ix1 = encode_index(build_full_trie(Dictionary(pats)), t=1)
        ix8 = encode_index(build_full_trie(Dictionary(pats)), t=8)
        text = bytes(rng.integers(97, 97 + sigma, size=300, dtype=np.uint8))
        assert collect(ix1, text) == collect(ix8, text)


def test_wide_alphabet_scan():
    pats = [(70000, 3, 5), (3, 5), (70000,), (5, 5)]
    ix = encode_index(build_full_trie(Dictionary(pats)), t=2,
                      monolithic=True)
    text = [70000, 3, 5, 5, 70000, 3, 5, 99999, 5, 5]
    assert collect(ix, [text]) == naive_ac_scan(pats, text)


def test_duplicate_patterns_scan(capsys):
    pats = [b"ab", b"ab", b"b"]
    ix = encode_index(build_full_trie(Dictionary(pats)), t=1)
    got = collect(ix, b"cab")
    assert got == naive_ac_scan(pats, b"cab") == [(2, 0), (2, 1), (2, 2)]


def test_feed_low_level_api(example_index):
    # feed() takes alphabet-mapped chunks and emits (end, marked ordinal);
    # ordinals translate to pattern ids through the pattern table
    text = b"aababbbbab"
    want = naive_ac_scan(EXAMPLE_PATTERNS, text)
    st = ScanState(example_index, kernel="py")
    table = example_index.pattern_table
    out = []

    def emit(end, ordinal):
        lo, hi = int(table.offsets[ordinal]), int(table.offsets[ordinal + 1])
        out.extend((end, int(pid)) for pid in table.ids[lo:hi])

    for lo, hi in ((0, 4), (4, 7), (7, len(text))):
        st.feed(example_index.map_text(text[lo:hi]), emit)
    assert sorted(out) == want


def test_restore_window_standalone(example_index):
    st = ScanState(example_index, kernel="py")
    with pytest.raises(ValueError):
        restore_window(st)


def test_scan_rejects_bad_kernel(example_index):
    with pytest.raises(ValueError):
        scan(example_index, b"ab", kernel="jit")
