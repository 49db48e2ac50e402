"""Compressed bitvector: queries vs a dense oracle, size contracts, bytes."""

import math

import numpy as np
import pytest

from acsx.succinct_bits import (CompressedBitvector, build_compressed,
                                build_from_ones, ceil_log2_comb)


def dense_oracle_checks(vec, bits):
    bits = np.asarray(bits, dtype=np.uint8)
    n = len(bits)
    ranks = np.concatenate([[0], np.cumsum(bits)])
    ones = np.flatnonzero(bits)
    assert vec.length == n
    assert vec.ones == len(ones)
    for i in range(n):
        assert vec.rank_all(i) == ranks[i + 1]
        want = int(ranks[i + 1]) if bits[i] else None
        assert vec.partial_rank(i) == want
        assert vec.get_bit(i) == int(bits[i])
    for j, pos in enumerate(ones, start=1):
        assert vec.select(j) == pos
    assert list(vec.one_positions()) == ones.tolist()
    assert np.array_equal(vec.decode(), bits)


def random_bits(rng, n, density):
    return (rng.random(n) < density).astype(np.uint8)


@pytest.mark.parametrize("mode", ["auto", "rrr", "golomb", "golomb_complement"])
def test_modes_agree_with_oracle(mode):
    rng = np.random.default_rng(401)
    for trial in range(12):
        n = int(rng.integers(1, 400))
        bits = random_bits(rng, n, float(rng.choice([0.02, 0.2, 0.5, 0.9])))
        vec = build_compressed(bits, mode=mode)
        dense_oracle_checks(vec, bits)


def test_edge_shapes():
    for bits in ([], [0], [1], [0] * 200, [1] * 200, [1] + [0] * 199,
                 [0] * 199 + [1]):
        vec = build_compressed(bits)
        dense_oracle_checks(vec, bits)


def test_build_from_ones_matches_build_compressed():
    rng = np.random.default_rng(402)
    for trial in range(10):
        n = int(rng.integers(1, 3000))
        bits = random_bits(rng, n, 0.1)
        a = build_compressed(bits)
        b = build_from_ones(n, np.flatnonzero(bits))
        assert a.to_bytes() == b.to_bytes()


def test_build_from_ones_validates():
    with pytest.raises(ValueError):
        build_from_ones(10, [3, 3])
    with pytest.raises(ValueError):
        build_from_ones(10, [10])
    with pytest.raises(ValueError):
        build_from_ones(10, [-1])


def test_bytes_round_trip():
    rng = np.random.default_rng(403)
    for mode in ("rrr", "golomb", "golomb_complement", "auto"):
        for trial in range(6):
            bits = random_bits(rng, int(rng.integers(0, 1500)), 0.3)
            vec = build_compressed(bits, mode=mode)
            blob = vec.to_bytes()
            back, used = CompressedBitvector.from_bytes(blob)
            assert used == len(blob)
            assert np.array_equal(back.decode(), bits)
            assert back.to_bytes() == blob


def test_rrr_size_contract():
    # size <= ceil(log2 C(n, ones)) + 7*chunks + 332 (documented overhead)
    rng = np.random.default_rng(404)
    for trial in range(8):
        n = int(rng.integers(64, 5000))
        bits = random_bits(rng, n, float(rng.choice([0.05, 0.3, 0.5])))
        vec = build_compressed(bits, mode="rrr")
        chunks = (n + 62) // 63
        budget = ceil_log2_comb(n, int(bits.sum())) + 7 * chunks + 332
        assert vec.size_in_bits() <= budget


def test_golomb_size_contract():
    rng = np.random.default_rng(405)
    for density in (0.01, 0.05):
        n = 20000
        bits = random_bits(rng, n, density)
        vec = build_compressed(bits, mode="golomb")
        coded = int(bits.sum())
        budget = ceil_log2_comb(n, coded) + 3 * coded + vec.directory_bits()
        assert vec.size_in_bits() <= budget


def test_auto_picks_no_worse_than_forced():
    rng = np.random.default_rng(406)
    for density in (0.005, 0.1, 0.5, 0.995):
        bits = random_bits(rng, 4000, density)
        auto = build_compressed(bits, mode="auto")
        forced = [build_compressed(bits, mode=m)
                  for m in ("rrr", "golomb", "golomb_complement")]
        assert auto.size_in_bits() <= min(f.size_in_bits() for f in forced)


def test_huge_sparse_universe():
    # far beyond the rrr chunk-index range: gap coding must carry it
    n = 7 * 10 ** 9
    positions = np.array([0, 5, 63, 10 ** 6, 3 * 10 ** 9, n - 1],
                         dtype=np.int64)
    vec = build_from_ones(n, positions)
    assert vec.length == n
    for j, p in enumerate(positions, start=1):
        assert vec.select(j) == p
        assert vec.partial_rank(p) == j
    assert vec.partial_rank(1) is None
    assert vec.rank_all(10 ** 6) == 4


def test_ceil_log2_comb_exact():
    assert ceil_log2_comb(10, 3) == math.ceil(math.log2(120))
    assert ceil_log2_comb(5, 0) == 0
    assert ceil_log2_comb(5, 5) == 0
    # stays correct where lgamma needs care
    assert ceil_log2_comb(63, 31) == math.ceil(math.log2(math.comb(63, 31)))
