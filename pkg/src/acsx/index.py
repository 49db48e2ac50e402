"""Succinct index over the pattern trie.

The whole automaton reduces to one conceptual bitvector B: the per-letter
child indicators, concatenated letter by letter, each of length m+1.  A set
bit at position c*(m+1) + u says "the vertex numbered u has a c-child", and
the rank of that bit is exactly the child's number.  Select inverts the map
and yields the parent and its edge letter.  Everything else is small change:
a marked-vertex bitvector, sparsified failure links over a t-dense subset,
the report tree, and the id/length table.

Two encodings of B are provided.  The blocked one chops each letter into
fixed blocks and codes each block with the chunked coder, so the payload is
bounded block-by-block by log C(block, ones) terms; the monolithic one codes
all of B as a single compressed vector, which is the right shape for very
wide alphabets.  Both answer the same queries and are cross-checked.
"""

import math
import struct

import numpy as np

from .succinct_bits import (CHUNK, CompressedBitvector, _WIDTH,
                            _encode_chunk_slab, _decode_chunk_slab,
                            _decode_chunk_word, _pack_fields, _read_field,
                            _read_fields_vec, _words_from_bytes,
                            build_from_ones)
from .trie_builder import is_dfs_preorder

_SLAB = 1 << 18


def default_block_size(m, sigma):
    """sigma * ceil(log2(m)^2), rounded up to whole chunks."""
    lg = math.log2(m) if m > 1 else 1.0
    b = sigma * max(1, math.ceil(lg * lg))
    return CHUNK * ((b + CHUNK - 1) // CHUNK)


class BlockedNextEncoding(object):
    """Per-letter, per-block chunked coding of the child-indicator vector.

    Serialized content is the chunk classes plus the offset payload; every
    rank/select directory (per-chunk cumulative ones and payload offsets,
    per-block prefixes, the unary block-count vector S) is rebuilt on load.
    """

    kind = "blocked"

    def __init__(self):
        self.m = 0
        self.sigma = 0
        self.b = 0
        self.blocks_per_letter = 0
        self.cls = np.zeros(0, dtype=np.uint8)
        self._pay = np.zeros(0, dtype=np.uint8)
        self._pay_bits = 0

    @classmethod
    def build(cls, m, sigma, positions, block_size=None):
        enc = cls()
        enc.m = int(m)
        enc.sigma = int(sigma)
        L = m + 1
        b = block_size if block_size else default_block_size(m, sigma)
        b = CHUNK * ((int(b) + CHUNK - 1) // CHUNK)
        enc.b = b
        enc.blocks_per_letter = (L + b - 1) // b
        enc._layout()
        positions = np.asarray(positions, dtype=np.int64)
        nch = enc.chunk_count
        classes = np.zeros(nch, dtype=np.uint8)
        all_off = np.zeros(nch, dtype=np.uint64)
        flat = np.sort(enc._position_to_chunk_bit(positions))
        for lo in range(0, nch, _SLAB):
            hi = min(nch, lo + _SLAB)
            a = np.searchsorted(flat, lo * 64, side="left")
            z = np.searchsorted(flat, hi * 64, side="left")
            mat = np.zeros((hi - lo) * 64, dtype=np.uint8)
            mat[flat[a:z] - lo * 64] = 1
            mat = mat.reshape(hi - lo, 64)[:, :CHUNK]
            c, o = _encode_chunk_slab(mat)
            classes[lo:hi] = c
            all_off[lo:hi] = o
        enc.cls = classes
        widths = _WIDTH[classes.astype(np.int64)]
        starts = np.zeros(nch, dtype=np.int64)
        if nch:
            np.cumsum(widths[:-1], out=starts[1:])
        enc._pay_bits = int(widths.sum())
        enc._pay = _pack_fields(enc._pay_bits, starts, widths,
                                all_off)
        enc._finish()
        return enc

    # -- geometry -----------------------------------------------------

    def _layout(self):
        L = self.m + 1
        bpl = self.blocks_per_letter
        full_chunks = self.b // CHUNK
        last_len = L - (bpl - 1) * self.b
        last_chunks = (last_len + CHUNK - 1) // CHUNK
        per_letter = (bpl - 1) * full_chunks + last_chunks
        self.block_len = np.full(bpl, self.b, dtype=np.int64)
        self.block_len[-1] = last_len
        self.block_chunks = np.full(bpl, full_chunks, dtype=np.int64)
        self.block_chunks[-1] = last_chunks
        self.chunks_per_letter = int(per_letter)
        self.chunk_count = int(per_letter * self.sigma)
        # first chunk of block i within a letter
        self.block_first_chunk = np.zeros(bpl + 1, dtype=np.int64)
        np.cumsum(self.block_chunks, out=self.block_first_chunk[1:])

    def _position_to_chunk_bit(self, positions):
        """Map B positions to chunk_index*64 + bit_in_chunk."""
        L = self.m + 1
        c = positions // L
        local = positions - c * L
        blk = local // self.b
        in_b = local - blk * self.b
        ch = (c * self.chunks_per_letter + self.block_first_chunk[blk]
              + in_b // CHUNK)
        return ch * 64 + (in_b % CHUNK)

    def _chunk_base_positions(self):
        """Global B position of bit 0 of every chunk."""
        L = self.m + 1
        bpl = self.blocks_per_letter
        per_block_first = np.repeat(np.arange(bpl) * self.b, self.block_chunks)
        in_block = np.concatenate([np.arange(int(k)) * CHUNK
                                   for k in self.block_chunks])
        letter_template = per_block_first + in_block
        out = (np.repeat(np.arange(self.sigma) * L, self.chunks_per_letter)
               + np.tile(letter_template, self.sigma))
        return out.astype(np.int64)

    def _finish(self):
        self._words = _words_from_bytes(self._pay)
        cls64 = self.cls.astype(np.int64)
        self.cum_ones = np.zeros(len(cls64) + 1, dtype=np.int64)
        np.cumsum(cls64, out=self.cum_ones[1:])
        widths = _WIDTH[cls64]
        self.cum_width = np.zeros(len(cls64) + 1, dtype=np.int64)
        np.cumsum(widths, out=self.cum_width[1:])
        nb = self.blocks_per_letter * self.sigma
        first = (np.repeat(np.arange(self.sigma) * self.chunks_per_letter, self.blocks_per_letter)
                 + np.tile(self.block_first_chunk[:-1], self.sigma))
        self.global_block_first_chunk = np.concatenate(
            [first, [self.chunk_count]]).astype(np.int64)
        self.block_rank_prefix = self.cum_ones[self.global_block_first_chunk]
        counts = np.diff(self.block_rank_prefix)
        ones_total = int(self.cum_ones[-1])
        s_ones = np.arange(ones_total, dtype=np.int64) + np.repeat(
            np.arange(nb, dtype=np.int64), counts)
        self.S = build_from_ones(ones_total + nb, s_ones, mode="auto")

    # -- queries over the conceptual vector B --------------------------

    @property
    def length(self):
        return (self.m + 1) * self.sigma

    @property
    def ones(self):
        return int(self.cum_ones[-1])

    def _locate_chunk(self, g):
        L = self.m + 1
        c = g // L
        local = g - c * L
        blk = local // self.b
        in_b = local - blk * self.b
        ch = int(c * self.chunks_per_letter + self.block_first_chunk[blk]
                 + in_b // CHUNK)
        return ch, int(in_b % CHUNK)

    def _chunk_word(self, ch):
        width = int(_WIDTH[self.cls[ch]])
        off = _read_field(self._words, int(self.cum_width[ch]), width)
        return _decode_chunk_word(off, int(self.cls[ch]))

    def partial_rank(self, g):
        if g < 0 or g >= self.length:
            raise IndexError("position %d outside B" % (g,))
        ch, pos = self._locate_chunk(g)
        word = self._chunk_word(ch)
        if not (word >> pos) & 1:
            return None
        below = word & ((1 << (pos + 1)) - 1)
        return int(self.cum_ones[ch]) + below.bit_count()

    def rank_all(self, g):
        if g < 0 or g >= self.length:
            raise IndexError("position %d outside B" % (g,))
        ch, pos = self._locate_chunk(g)
        word = self._chunk_word(ch)
        below = word & ((1 << (pos + 1)) - 1)
        return int(self.cum_ones[ch]) + below.bit_count()

    def select(self, j):
        """Global position of the j-th one of B, via the S superstructure."""
        if j < 1 or j > self.ones:
            raise ValueError("select ordinal %d out of range" % (j,))
        blk = self.S.select(j) - (j - 1)
        lo = int(self.global_block_first_chunk[blk])
        hi = int(self.global_block_first_chunk[blk + 1])
        ch = lo + int(np.searchsorted(self.cum_ones[lo + 1:hi + 1], j, side="left"))
        word = self._chunk_word(ch)
        need = j - int(self.cum_ones[ch])
        pos = 0
        while True:
            if (word >> pos) & 1:
                need -= 1
                if need == 0:
                    break
            pos += 1
        bases = self._chunk_base_cache()
        return int(bases[ch]) + pos

    def _chunk_base_cache(self):
        if not hasattr(self, "_bases"):
            self._bases = self._chunk_base_positions()
        return self._bases

    def decode_positions(self):
        """Sorted global positions of all ones of B."""
        nch = self.chunk_count
        widths = _WIDTH[self.cls.astype(np.int64)]
        bases = self._chunk_base_cache()
        out = []
        for lo in range(0, nch, _SLAB):
            hi = min(nch, lo + _SLAB)
            offs = _read_fields_vec(self._words, self.cum_width[lo:hi],
                                    widths[lo:hi])
            bits = _decode_chunk_slab(offs, self.cls[lo:hi])
            ch_i, bit_i = np.nonzero(bits)
            out.append(bases[lo + ch_i] + bit_i)
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)

    # -- accounting and serialization ----------------------------------

    def payload_bits(self):
        return self._pay_bits

    def per_chunk_ceil_bits(self):
        """One bit of ceil rounding allowance per chunk."""
        return self.chunk_count

    def block_binomial_bound(self):
        """Sum over (letter, block) of log2 C(padded block len, ones)."""
        counts = np.diff(self.block_rank_prefix)
        lens = np.tile(self.block_chunks * CHUNK, self.sigma)
        total = 0.0
        for n_i, b_i in zip(counts.tolist(), lens.tolist()):
            if n_i:
                total += (math.lgamma(b_i + 1) - math.lgamma(n_i + 1)
                          - math.lgamma(b_i - n_i + 1)) / math.log(2)
        return total

    _HDR = struct.Struct("<BxxxxxxxQQQQ")

    def to_bytes(self):
        nch = self.chunk_count
        cpack = _pack_fields(6 * nch, 6 * np.arange(nch, dtype=np.int64),
                             np.full(nch, 6, dtype=np.int64),
                             self.cls.astype(np.uint64))
        head = self._HDR.pack(1, self.m, self.sigma, self.b, self._pay_bits)
        return head + cpack.tobytes() + self._pay.tobytes()

    @classmethod
    def from_bytes(cls, buf):
        enc = cls()
        kind, enc.m, enc.sigma, enc.b, enc._pay_bits = cls._HDR.unpack_from(buf, 0)
        if kind != 1:
            raise ValueError("not a blocked encoding")
        L = enc.m + 1
        enc.blocks_per_letter = (L + enc.b - 1) // enc.b
        enc._layout()
        off = cls._HDR.size
        nch = enc.chunk_count
        clen = (6 * nch + 7) // 8
        cbuf = np.frombuffer(buf, dtype=np.uint8, count=clen, offset=off).copy()
        off += clen
        words = _words_from_bytes(cbuf)
        enc.cls = _read_fields_vec(words, 6 * np.arange(nch, dtype=np.int64),
                                   np.full(nch, 6, dtype=np.int64)).astype(np.uint8)
        plen = (enc._pay_bits + 7) // 8
        enc._pay = np.frombuffer(buf, dtype=np.uint8, count=plen, offset=off).copy()
        off += plen
        if off != len(buf):
            raise ValueError("trailing bytes in blocked encoding")
        enc._finish()
        return enc

    def size_in_bits(self):
        return 8 * len(self.to_bytes())


class MonolithicNextEncoding(object):
    """All of B as one compressed vector; the reference for the blocked form."""

    kind = "monolithic"

    def __init__(self, m, sigma, vec):
        self.m = int(m)
        self.sigma = int(sigma)
        self.b = 0
        self.vec = vec

    @classmethod
    def build(cls, m, sigma, positions, mode="auto"):
        vec = build_from_ones((m + 1) * sigma, positions, mode=mode)
        return cls(m, sigma, vec)

    @property
    def length(self):
        return (self.m + 1) * self.sigma

    @property
    def ones(self):
        return self.vec.ones

    def partial_rank(self, g):
        return self.vec.partial_rank(g)

    def rank_all(self, g):
        return self.vec.rank_all(g)

    def select(self, j):
        return self.vec.select(j)

    def decode_positions(self):
        return self.vec.one_positions()

    def payload_bits(self):
        return self.vec.payload_bits()

    _HDR = struct.Struct("<BxxxxxxxQQ")

    def to_bytes(self):
        return self._HDR.pack(2, self.m, self.sigma) + self.vec.to_bytes()

    @classmethod
    def from_bytes(cls, buf):
        kind, m, sigma = cls._HDR.unpack_from(buf, 0)
        if kind != 2:
            raise ValueError("not a monolithic encoding")
        vec, consumed = CompressedBitvector.from_bytes(buf, cls._HDR.size)
        if consumed != len(buf):
            raise ValueError("trailing bytes in monolithic encoding")
        return cls(m, sigma, vec)

    def size_in_bits(self):
        return 8 * len(self.to_bytes())


def decode_next_encoding(buf):
    if len(buf) < 1:
        raise ValueError("empty transition section")
    if buf[0] == 1:
        return BlockedNextEncoding.from_bytes(buf)
    if buf[0] == 2:
        return MonolithicNextEncoding.from_bytes(buf)
    raise ValueError("unknown transition encoding kind %d" % buf[0])


class SuccinctParentTree(object):
    """Parent queries on a tree whose vertex ids are a DFS preorder.

    Stored parts: a membership bitvector for internal vertices, the balanced
    parentheses of the internal subtree (2K bits), and a gap vector tying
    each vertex to the count of skeleton symbols preceding its own open
    paren.  A leaf's parent is the internal vertex whose paren span encloses
    that gap; an internal vertex's parent comes from the skeleton itself.
    """

    def __init__(self):
        self.n = 0
        self.K = 0
        self.skeleton = np.zeros(0, dtype=np.uint8)   # 0 = open, 1 = close
        self.imp = None
        self.gaps = None
        self._internal_nums = np.zeros(0, dtype=np.int64)
        self._internal_parent = np.zeros(0, dtype=np.int64)
        self._enclosing = np.zeros(1, dtype=np.int64)

    @classmethod
    def build(cls, parent):
        parent = np.asarray(parent, dtype=np.int64)
        t = cls()
        t.n = len(parent)
        if not is_dfs_preorder(parent):
            raise AssertionError("vertex ids are not a DFS preorder of the tree")
        internal = np.zeros(t.n, dtype=bool)
        if t.n > 1:
            internal[parent[1:]] = True
        t.K = int(internal.sum())
        inums = np.flatnonzero(internal).astype(np.int64)
        t._internal_nums = inums
        skel = np.zeros(2 * t.K, dtype=np.uint8)
        t._internal_parent = np.zeros(t.K, dtype=np.int64)
        enclosing = np.zeros(2 * t.K + 1, dtype=np.int64)
        stack = []
        w = 0
        enc_fill = 0
        for r, u in enumerate(inums.tolist()):
            p = int(parent[u])
            while stack and stack[-1] != p:
                stack.pop()
                skel[w] = 1
                w += 1
                enclosing[w] = stack[-1] if stack else 0
            t._internal_parent[r] = stack[-1] if stack else u
            stack.append(u)
            skel[w] = 0
            w += 1
            enclosing[w] = u
        while stack:
            stack.pop()
            skel[w] = 1
            w += 1
            enclosing[w] = stack[-1] if stack else 0
        t.skeleton = skel
        t._enclosing = enclosing
        # icnt[v]: internal vertices on the root path, inclusive
        icnt = np.zeros(t.n, dtype=np.int64)
        par_list = parent.tolist()
        int_list = internal.tolist()
        icnt_list = icnt.tolist()
        for v in range(t.n):
            icnt_list[v] = icnt_list[par_list[v]] + (1 if int_list[v] else 0)
        icnt = np.array(icnt_list, dtype=np.int64)
        # skeleton symbols between consecutive opens in the full traversal
        deltas = np.zeros(t.n, dtype=np.int64)
        if t.n > 1:
            nxt_par = parent[1:]
            deltas[:-1] = internal[:-1] + icnt[:-1] - icnt[nxt_par]
        s = np.zeros(t.n, dtype=np.int64)
        np.cumsum(deltas[:-1], out=s[1:])
        ones = np.arange(t.n, dtype=np.int64) + s
        t.gaps = build_from_ones(t.n + int(s[-1]) if t.n else 0, ones, mode="auto")
        t.imp = build_from_ones(t.n, inums, mode="auto")
        return t

    def _rebuild_walk(self):
        """Recompute decoded directories from the stored skeleton."""
        inums = self.imp.one_positions()
        self._internal_nums = inums
        self._internal_parent = np.zeros(self.K, dtype=np.int64)
        enclosing = np.zeros(2 * self.K + 1, dtype=np.int64)
        stack = []
        r = 0
        for w, sym in enumerate(self.skeleton.tolist()):
            if sym == 0:
                u = int(inums[r])
                self._internal_parent[r] = stack[-1] if stack else u
                stack.append(u)
                r += 1
                enclosing[w + 1] = u
            else:
                stack.pop()
                enclosing[w + 1] = stack[-1] if stack else 0
        self._enclosing = enclosing

    def parent(self, v):
        """Parent id of v; the root maps to itself."""
        if v < 0 or v >= self.n:
            raise IndexError("vertex %d out of range" % (v,))
        if v == 0:
            return 0
        r = self.imp.partial_rank(v)
        if r is not None:
            return int(self._internal_parent[r - 1])
        s = self.gaps.select(v + 1) - v
        return int(self._enclosing[s])

    def decode_parents(self):
        """The full parent array, via whole-vector decodes."""
        out = np.zeros(self.n, dtype=np.int64)
        if self.n == 0:
            return out
        s = self.gaps.one_positions() - np.arange(self.n, dtype=np.int64)
        out[:] = self._enclosing[s]
        if self.K:
            out[self._internal_nums] = self._internal_parent
        out[0] = 0
        return out

    _HDR = struct.Struct("<QQ")

    def to_bytes(self):
        skel_packed = np.packbits(self.skeleton, bitorder="little")
        return (self._HDR.pack(self.n, self.K) + skel_packed.tobytes()
                + self.imp.to_bytes() + self.gaps.to_bytes())

    @classmethod
    def from_bytes(cls, buf):
        t = cls()
        t.n, t.K = cls._HDR.unpack_from(buf, 0)
        off = cls._HDR.size
        sbytes = (2 * t.K + 7) // 8
        raw = np.frombuffer(buf, dtype=np.uint8, count=sbytes, offset=off)
        t.skeleton = np.unpackbits(raw, bitorder="little")[:2 * t.K]
        off += sbytes
        t.imp, off = CompressedBitvector.from_bytes(buf, off)
        t.gaps, off = CompressedBitvector.from_bytes(buf, off)
        if off != len(buf):
            raise ValueError("trailing bytes in parent tree")
        t._rebuild_walk()
        return t

    def size_in_bits(self):
        return 8 * len(self.to_bytes())

    def component_bits(self):
        return {
            "skeleton": 8 * ((2 * self.K + 7) // 8) + 8 * self._HDR.size,
            "membership": 8 * len(self.imp.to_bytes()),
            "gaps": 8 * len(self.gaps.to_bytes()),
        }


def choose_dense_subset(depth_by_num, t):
    """Numbers of W: the root plus the sparsest depth-residue class.

    Ties prefer residue 0 (which contains the root), keeping
    |W| <= ceil((m+1)/t).
    """
    if t < 1:
        raise ValueError("sparsification parameter t must be >= 1")
    counts = np.bincount(depth_by_num % t, minlength=t)
    j = 0 if counts[0] == counts.min() else int(np.argmin(counts))
    sel = np.flatnonzero(depth_by_num % t == j).astype(np.int64)
    if j != 0:
        sel = np.concatenate([[0], sel])
    return sel


class SparsifiedFailure(object):
    """Failure links stored only on W, through the transformed parent tree."""

    def __init__(self, t, membership, tree):
        self.t = t
        self.membership = membership
        self.tree = tree

    @classmethod
    def build(cls, t, fail_by_num, w_nums, n):
        important = np.zeros(n, dtype=bool)
        important[0] = True
        important[fail_by_num[w_nums[w_nums > 0]]] = True
        nearest = np.zeros(n, dtype=np.int64)
        transformed = np.zeros(n, dtype=np.int64)
        fail_list = fail_by_num.tolist()
        imp_list = important.tolist()
        near_list = nearest.tolist()
        trans_list = transformed.tolist()
        for v in range(1, n):
            f = fail_list[v]
            trans_list[v] = near_list[f]
            near_list[v] = v if imp_list[v] else near_list[f]
        transformed = np.array(trans_list, dtype=np.int64)
        if not is_dfs_preorder(transformed):
            raise AssertionError("transformed failure tree lost the "
                                 "preorder property; construction is broken")
        membership = build_from_ones(n, w_nums, mode="auto")
        tree = SuccinctParentTree.build(transformed)
        return cls(t, membership, tree)

    def contains(self, v):
        return self.membership.partial_rank(v) is not None

    def failure_parent(self, v):
        """num(failure(v)) for v in W (except the root), else None."""
        if v == 0 or not self.contains(v):
            return None
        return self.tree.parent(v)

    def to_bytes(self):
        a = self.membership.to_bytes()
        return struct.pack("<Q", len(a)) + a + self.tree.to_bytes()

    @classmethod
    def from_bytes(cls, buf, t):
        (alen,) = struct.unpack_from("<Q", buf, 0)
        membership, off = CompressedBitvector.from_bytes(buf, 8)
        if off != 8 + alen:
            raise ValueError("membership length mismatch")
        tree = SuccinctParentTree.from_bytes(buf[off:])
        return cls(t, membership, tree)

    def size_in_bits(self):
        return 8 * len(self.to_bytes())


class PatternTable(object):
    """Ordinal-indexed pattern ids and lengths.

    Ordinal k is the k-th marked vertex in number order; ids are original
    pattern indices (duplicates keep all their ids), lengths are indexed by
    id.
    """

    def __init__(self, lengths, offsets, ids):
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.ids = np.asarray(ids, dtype=np.int64)

    @property
    def d(self):
        return len(self.lengths)

    @property
    def d_distinct(self):
        return len(self.offsets) - 1

    def ids_at(self, ordinal):
        lo, hi = self.offsets[ordinal], self.offsets[ordinal + 1]
        return self.ids[lo:hi].tolist()

    def to_bytes(self):
        counts = np.diff(self.offsets)
        plural = not bool((counts == 1).all())
        same_len = self.d > 0 and bool((self.lengths == self.lengths[0]).all())
        out = bytearray()
        out += struct.pack("<QQB", self.d, self.d_distinct,
                           (1 if plural else 0) | (2 if same_len else 0))
        if same_len:
            out += _varint(int(self.lengths[0]))
        else:
            for ln in self.lengths.tolist():
                out += _varint(ln)
        if plural:
            for c in counts.tolist():
                out += _varint(c)
        width = max(1, (max(self.d - 1, 1)).bit_length())
        nid = len(self.ids)
        packed = _pack_fields(width * nid,
                              width * np.arange(nid, dtype=np.int64),
                              np.full(nid, width, dtype=np.int64),
                              self.ids.astype(np.uint64))
        out += packed.tobytes()
        return bytes(out)

    @classmethod
    def from_bytes(cls, buf):
        d, dd, flags = struct.unpack_from("<QQB", buf, 0)
        off = 17
        lengths = np.zeros(d, dtype=np.int64)
        if flags & 2:
            one, off = _read_varint(buf, off)
            lengths[:] = one
        else:
            for i in range(d):
                lengths[i], off = _read_varint(buf, off)
        counts = np.ones(dd, dtype=np.int64)
        if flags & 1:
            for i in range(dd):
                counts[i], off = _read_varint(buf, off)
        offsets = np.zeros(dd + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        width = max(1, (max(d - 1, 1)).bit_length())
        nid = int(offsets[-1])
        need = (width * nid + 7) // 8
        if len(buf) - off != need:
            raise ValueError("pattern table length mismatch")
        words = _words_from_bytes(
            np.frombuffer(buf, dtype=np.uint8, count=need, offset=off).copy())
        ids = _read_fields_vec(words, width * np.arange(nid, dtype=np.int64),
                               np.full(nid, width, dtype=np.int64)).astype(np.int64)
        return cls(lengths, offsets, ids)

    def size_in_bits(self):
        return 8 * len(self.to_bytes())


def _varint(x):
    out = bytearray()
    while True:
        b = x & 0x7F
        x >>= 7
        if x:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _read_varint(buf, off):
    x = 0
    shift = 0
    while True:
        b = buf[off]
        off += 1
        x |= (b & 0x7F) << shift
        if not b & 0x80:
            return x, off
        shift += 7


class CompressedIndex(object):
    """The assembled automaton with all navigation queries."""

    def __init__(self, m, sigma, t, next_enc, mark_enc, fail_enc, report_enc,
                 pattern_table, alphabet_map):
        self.m = m
        self.sigma = sigma
        self.t = t
        self.next_enc = next_enc
        self.mark_enc = mark_enc
        self.fail_enc = fail_enc
        self.report_enc = report_enc
        self.pattern_table = pattern_table
        self.alphabet_map = alphabet_map
        self._nav = None

    @property
    def d(self):
        return self.pattern_table.d

    # -- navigation -----------------------------------------------------

    def _check_vertex(self, v):
        if v < 0 or v > self.m:
            raise IndexError("vertex %d out of range [0, %d]" % (v, self.m))

    def next(self, v, c):
        """Child of v along letter c, or None."""
        self._check_vertex(v)
        if c < 0 or c >= self.sigma:
            raise IndexError("letter %d outside alphabet" % (c,))
        return self.next_enc.partial_rank(c * (self.m + 1) + v)

    def parent_edge(self, v):
        """(parent number, letter) of a non-root vertex."""
        self._check_vertex(v)
        if v == 0:
            raise ValueError("the root has no parent edge")
        x = self.next_enc.select(v)
        return x % (self.m + 1), x // (self.m + 1)

    def failure_parent(self, v):
        self._check_vertex(v)
        return self.fail_enc.failure_parent(v)

    def in_dense_subset(self, v):
        self._check_vertex(v)
        return self.fail_enc.contains(v)

    def report_parent(self, v):
        self._check_vertex(v)
        return self.report_enc.parent(v)

    def is_marked(self, v):
        self._check_vertex(v)
        return self.mark_enc.partial_rank(v) is not None

    def pattern_ids_at(self, v):
        r = self.mark_enc.partial_rank(v)
        if r is None:
            return []
        return self.pattern_table.ids_at(r - 1)

    def decode_patterns(self):
        """Reconstruct the pattern strings from the index alone, in id order.

        Byte-mapped indexes return bytes; wide-alphabet indexes return
        tuples of symbol numbers.
        """
        nav = self.nav_cache()
        out = [None] * self.pattern_table.d
        inv = None
        if self.alphabet_map is not None:
            inv = np.zeros(self.sigma, dtype=np.uint8)
            for byte, letter in enumerate(self.alphabet_map.tolist()):
                if letter >= 0:
                    inv[letter] = byte
        for ordinal, v in enumerate(self.mark_enc.one_positions().tolist()):
            letters = []
            u = v
            while u != 0:
                letters.append(int(nav.lab[u]))
                u = int(nav.par[u])
            letters.reverse()
            if inv is not None:
                word = bytes(int(inv[c]) for c in letters)
            else:
                word = tuple(letters)
            for pid in self.pattern_table.ids_at(ordinal):
                out[pid] = word
        return out

    def map_text(self, data):
        """Bytes to effective symbols; out-of-alphabet maps to sigma."""
        if self.alphabet_map is None:
            if isinstance(data, (bytes, bytearray, memoryview)):
                return np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int64)
            return np.asarray(data, dtype=np.int64)
        table = np.where(self.alphabet_map < 0, self.sigma,
                         self.alphabet_map).astype(np.int64)
        return table[np.frombuffer(bytes(data), dtype=np.uint8)]

    # -- kernels ----------------------------------------------------------

    def nav_cache(self):
        if self._nav is None:
            self._nav = NavCache(self)
        return self._nav

    # -- accounting -------------------------------------------------------

    def section_bits(self):
        return {
            "next": self.next_enc.size_in_bits(),
            "next_payload": self.next_enc.payload_bits(),
            "mark": 8 * len(self.mark_enc.to_bytes()),
            "fail_membership": 8 * len(self.fail_enc.membership.to_bytes()) + 64,
            "fail_tree": self.fail_enc.tree.size_in_bits(),
            "report_tree": self.report_enc.size_in_bits(),
            "pattern_table": self.pattern_table.size_in_bits(),
        }

    def total_section_bits(self):
        s = self.section_bits()
        return (s["next"] + s["mark"] + s["fail_membership"] + s["fail_tree"]
                + s["report_tree"] + s["pattern_table"])


class NavCache(object):
    """Flat arrays decoded from the encodings for the scan kernels.

    Built from the compressed structures (not the trie), so an index loaded
    from disk produces the identical cache.
    """

    def __init__(self, index):
        m = index.m
        L = m + 1
        positions = index.next_enc.decode_positions()
        if len(positions) != m:
            raise AssertionError("transition vector does not hold m ones")
        self.positions = positions
        self.par = np.zeros(L, dtype=np.int64)
        self.lab = np.zeros(L, dtype=np.int64)
        self.par[1:] = positions % L
        self.lab[1:] = positions // L
        self.par[0] = -1
        self.lab[0] = -1
        self.in_w = np.zeros(L, dtype=np.uint8)
        self.in_w[index.fail_enc.membership.one_positions()] = 1
        fp = index.fail_enc.tree.decode_parents()
        self.fail_par = np.where(self.in_w.astype(bool), fp, -1).astype(np.int64)
        self.fail_par[0] = 0
        self.rep_par = index.report_enc.decode_parents()
        self.mark_ord = np.full(L, -1, dtype=np.int64)
        mark_pos = index.mark_enc.one_positions()
        self.mark_ord[mark_pos] = np.arange(len(mark_pos))
        self.ptab_off = index.pattern_table.offsets
        self.ptab_ids = index.pattern_table.ids
        self.lengths = index.pattern_table.lengths
        self.sigma = index.sigma
        self.m = m
        # transition lookup: global position -> child number
        self.next_map = dict(zip(positions.tolist(), range(1, m + 1)))
        n = L * index.sigma
        self.dense = n <= (1 << 28)
        if self.dense:
            words = np.zeros((n + 63) // 64 + 1, dtype=np.uint64)
            np.bitwise_or.at(words, positions // 64,
                             np.uint64(1) << (positions % 64).astype(np.uint64))
            self.nav_bits = words
            cnt = np.zeros(len(words), dtype=np.int64)
            pc = np.bincount(positions // 64, minlength=len(words))
            np.cumsum(pc[:-1], out=cnt[1:])
            self.nav_rank = cnt
        else:
            self.nav_bits = np.zeros(0, dtype=np.uint64)
            self.nav_rank = np.zeros(0, dtype=np.int64)


def encode_index(trie, t=8, block_size_override=None, monolithic=False,
                 next_mode="auto"):
    """Build the CompressedIndex from a fully linked trie."""
    if t < 1:
        raise ValueError("sparsification parameter t must be >= 1")
    if trie.num is None or trie.failure is None or trie.report is None:
        raise ValueError("trie must carry numbering, failure and report links")
    dictionary = trie.dictionary
    if dictionary is None:
        raise ValueError("trie must carry its source dictionary")
    m = trie.m
    L = m + 1
    nv = trie.num_to_vertex
    num = trie.num
    par_v = trie.parent[nv]
    parent_num = np.where(par_v >= 0, num[np.maximum(par_v, 0)], 0)
    label_num = trie.label[nv]
    fail_num = num[trie.failure[nv]]
    report_num = num[trie.report[nv]]
    depth_num = trie.depth[nv]
    positions = label_num[1:] * L + parent_num[1:]
    if len(positions) > 1 and not (np.diff(positions) > 0).all():
        raise AssertionError("transition positions are not increasing; "
                             "the numbering is inconsistent")
    if monolithic:
        next_enc = MonolithicNextEncoding.build(m, trie.sigma, positions,
                                                mode=next_mode)
    else:
        next_enc = BlockedNextEncoding.build(m, trie.sigma, positions,
                                             block_size=block_size_override)
    marked_nums = np.sort(num[np.flatnonzero(trie.mark)]).astype(np.int64)
    mark_enc = build_from_ones(L, marked_nums, mode="auto")
    w_nums = choose_dense_subset(depth_num, t)
    fail_enc = SparsifiedFailure.build(t, fail_num, w_nums, L)
    report_enc = SuccinctParentTree.build(report_num)
    # ordinal order = increasing num of marked vertices
    lengths = np.zeros(dictionary.d, dtype=np.int64)
    lengths[:] = dictionary.lengths
    offsets = [0]
    ids = []
    for w in marked_nums.tolist():
        vid = sorted(trie.marked_ids[int(nv[w])])
        ids.extend(vid)
        offsets.append(len(ids))
    table = PatternTable(lengths, offsets, ids)
    amap = dictionary.alphabet_map if dictionary is not None else None
    return CompressedIndex(m, trie.sigma, t, next_enc, mark_enc, fail_enc,
                           report_enc, table, amap)
