"""Select and partial-rank primitives over immutable compressed bitvectors.

Two physical codings sit behind one query interface:

* "rrr": fixed 63-bit chunks stored as (class = popcount, offset =
  combinatorial rank within the class).  Class fields and the superblock
  cumulative tables are directory data; the concatenated offset fields are
  the payload.  Payload is at most ceil(log2 C(n, ones)) + #chunks bits.
* "golomb": Rice-coded gaps between consecutive one positions (optionally of
  the zero positions, for dense vectors), with sparse sampling of decoder
  states for select/rank.  Meant for very sparse or very long vectors where
  chunked coding cannot approach log2 C(n, ones).

Rank is inclusive of the queried position.  partial_rank returns None on a
zero bit.  select is 1-based and raises ValueError out of range.  Vectors are
immutable after construction and safe to share between readers.
"""

import math
import struct

import numpy as np

CHUNK = 63          # bits per combinatorially coded chunk
SUPER = 32          # chunks per superblock directory entry
GAP_SAMPLE = 2048   # coded elements per decoder-state sample in gap mode
_SLAB = 1 << 18     # chunks processed per vectorized pass

MODE_RRR = 0
MODE_GOLOMB = 1


def _build_comb():
    c = np.zeros((CHUNK + 1, CHUNK + 1), dtype=np.uint64)
    for n in range(CHUNK + 1):
        c[n, 0] = 1
        for k in range(1, n + 1):
            c[n, k] = c[n - 1, k - 1] + c[n - 1, k]
    return c


_COMB = _build_comb()
# ceil(log2 C(63, k)): offset field width per class
_WIDTH = np.array([(int(_COMB[CHUNK, k]) - 1).bit_length() for k in range(CHUNK + 1)],
                  dtype=np.int64)


def ceil_log2_comb(n, k):
    """Exact ceil(log2 C(n, k)) through integer arithmetic."""
    return (math.comb(n, k) - 1).bit_length() if k >= 0 and k <= n else 0


def _as_bit_array(bits):
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit input must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bit input must be 0/1 valued")
    return arr


def _words_from_bytes(buf):
    pad = (-len(buf)) % 8
    if pad:
        buf = np.concatenate([buf, np.zeros(pad, dtype=np.uint8)])
    return buf.view("<u8")


def _scatter_bits(buf, positions, values):
    # values must be 0/1 uint8; duplicate byte targets are fine via or-reduce
    np.bitwise_or.at(buf, (positions >> 3).astype(np.int64),
                     (values << (positions & 7).astype(np.uint8)).astype(np.uint8))


def _pack_fields(total_bits, starts, widths, values):
    """Pack little-endian bit fields (LSB of the value first) into bytes."""
    buf = np.zeros((int(total_bits) + 7) // 8, dtype=np.uint8)
    if len(starts) == 0:
        return buf
    wmax = int(widths.max())
    for j in range(wmax):
        sel = widths > j
        if not sel.any():
            break
        g = starts[sel] + j
        bit = ((values[sel] >> np.uint64(j)) & np.uint64(1)).astype(np.uint8)
        _scatter_bits(buf, g, bit)
    return buf


def _read_field(words, start, width):
    if width == 0:
        return 0
    k = int(start) >> 6
    s = int(start) & 63
    lo = int(words[k]) >> s
    if 64 - s < width and k + 1 < len(words):
        lo |= int(words[k + 1]) << (64 - s)
    return lo & ((1 << width) - 1)


def _read_fields_vec(words, starts, widths):
    """Gather many <=63-bit little-endian fields at once."""
    wpad = np.concatenate([words, np.zeros(2, dtype=np.uint64)])
    idx = (starts >> 6).astype(np.int64)
    sh = (starts & 63).astype(np.uint64)
    lo = wpad[idx] >> sh
    hi = np.where(sh == 0, np.uint64(0),
                  wpad[idx + 1] << (np.uint64(64) - sh & np.uint64(63)))
    mask = (np.uint64(1) << widths.astype(np.uint64)) - np.uint64(1)
    return (lo | hi) & mask


def _encode_chunk_slab(mat):
    """Combinatorial offsets for a (rows, 63) 0/1 matrix."""
    cls = mat.sum(axis=1, dtype=np.int64)
    csum = np.cumsum(mat, axis=1, dtype=np.int64)
    # ones remaining including the current position
    rem = cls[:, None] - csum + mat
    nn = (62 - np.arange(CHUNK))[None, :]
    add = np.where(mat.astype(bool), _COMB[nn, rem], np.uint64(0))
    return cls, add.sum(axis=1, dtype=np.uint64)


def _decode_chunk_slab(offsets, classes):
    """Inverse of _encode_chunk_slab."""
    rows = len(offsets)
    bits = np.zeros((rows, CHUNK), dtype=np.uint8)
    off = offsets.astype(np.uint64).copy()
    rem = classes.astype(np.int64).copy()
    for p in range(CHUNK):
        c0 = _COMB[62 - p, np.clip(rem, 0, CHUNK)]
        c0 = np.where(rem > 0, c0, np.uint64(0xFFFFFFFFFFFFFFFF))
        take = off >= c0
        bits[:, p] = take
        off -= np.where(take, c0, np.uint64(0))
        rem -= take
    return bits


def _decode_chunk_word(offset, cls):
    """One chunk as a 63-bit int, chunk position p at bit p."""
    word = 0
    rem = int(cls)
    off = int(offset)
    for p in range(CHUNK):
        if rem == 0:
            break
        c0 = int(_COMB[62 - p, rem])
        if off >= c0:
            word |= 1 << p
            off -= c0
            rem -= 1
    return word


def _best_rice_k(gaps, n, ones):
    """Divisor exponent minimizing the exact coded size."""
    if ones == 0:
        return 0
    mean = max(1.0, (n - ones) / ones + 1.0)
    center = max(0, round(math.log2(0.6931 * mean)))
    best_k, best_cost = 0, None
    for k in range(max(0, center - 3), center + 4):
        cost = int((gaps >> np.uint64(k)).sum()) + ones * (1 + k)
        if best_cost is None or cost < best_cost:
            best_k, best_cost = k, cost
    return best_k


class CompressedBitvector(object):
    """Immutable bitvector with select / partial_rank / rank_all.

    Size contract (documented_overhead_bits gives the same formulas):
      rrr mode:    size_in_bits <= ceil(log2 C(n, ones)) + 7*chunks + 332
                   (6 bits of class plus at most 1 bit of ceil waste per
                   chunk, at most 60 bits of zero-padding waste in the final
                   partial chunk, a 256-bit header, plus byte padding)
      golomb mode: size_in_bits <= ceil(log2 C(n, coded)) + 3*coded
                   + 128*samples + 272, where coded = ones, or zeros when
                   the complement flag is set (C is symmetric).
    """

    def __init__(self):
        self.length = 0
        self.ones = 0
        self.mode = MODE_RRR
        self.complement = 0
        self.rice_k = 0
        self._pay = np.zeros(0, dtype=np.uint8)
        self._pay_bits = 0
        self._words = np.zeros(0, dtype=np.uint64)
        self._cls = np.zeros(0, dtype=np.uint8)        # rrr
        self._sb_ones = np.zeros(1, dtype=np.uint64)   # rrr
        self._sb_bits = np.zeros(1, dtype=np.uint64)   # rrr
        self._samp_prev = np.zeros(0, dtype=np.int64)  # golomb
        self._samp_off = np.zeros(0, dtype=np.uint64)  # golomb

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def _from_rrr(cls, bits=None, n=None, positions=None):
        v = cls()
        if bits is not None:
            bits = _as_bit_array(bits)
            n = len(bits)
        if n > (1 << 31):
            raise ValueError("chunked mode limited to lengths below 2^31")
        v.length = int(n)
        v.mode = MODE_RRR
        nch = (v.length + CHUNK - 1) // CHUNK
        classes = np.zeros(nch, dtype=np.uint8)
        all_off = np.zeros(nch, dtype=np.uint64)
        for lo in range(0, nch, _SLAB):
            hi = min(nch, lo + _SLAB)
            if bits is not None:
                chunk_bits = np.zeros((hi - lo) * CHUNK, dtype=np.uint8)
                take = bits[lo * CHUNK:min(v.length, hi * CHUNK)]
                chunk_bits[:len(take)] = take
            else:
                chunk_bits = np.zeros((hi - lo) * CHUNK, dtype=np.uint8)
                sel = positions[(positions >= lo * CHUNK) & (positions < hi * CHUNK)]
                chunk_bits[(sel - lo * CHUNK).astype(np.int64)] = 1
            c, o = _encode_chunk_slab(chunk_bits.reshape(hi - lo, CHUNK))
            classes[lo:hi] = c
            all_off[lo:hi] = o
        widths = _WIDTH[classes.astype(np.int64)]
        starts = np.zeros(nch, dtype=np.int64)
        if nch:
            np.cumsum(widths[:-1], out=starts[1:])
        v._pay_bits = int(widths.sum())
        v._pay = _pack_fields(v._pay_bits, starts, widths, all_off)
        v._cls = classes
        v.ones = int(classes.sum(dtype=np.int64))
        v._finish_rrr()
        return v

    def _finish_rrr(self):
        self._words = _words_from_bytes(self._pay)
        nsb = (len(self._cls) + SUPER - 1) // SUPER + 1
        self._sb_ones = np.zeros(nsb, dtype=np.uint64)
        self._sb_bits = np.zeros(nsb, dtype=np.uint64)
        cls64 = self._cls.astype(np.int64)
        widths = _WIDTH[cls64]
        csum_ones = np.cumsum(cls64)
        csum_bits = np.cumsum(widths)
        for s in range(1, nsb):
            edge = min(s * SUPER, len(cls64))
            self._sb_ones[s] = csum_ones[edge - 1] if edge else 0
            self._sb_bits[s] = csum_bits[edge - 1] if edge else 0

    @classmethod
    def _from_golomb(cls, n, positions, complement):
        v = cls()
        v.length = int(n)
        v.mode = MODE_GOLOMB
        v.complement = int(bool(complement))
        positions = np.asarray(positions, dtype=np.int64)
        coded = len(positions)
        v.ones = (v.length - coded) if v.complement else coded
        if coded:
            prev = np.concatenate([np.full(1, -1, dtype=np.int64), positions[:-1]])
        else:
            prev = np.zeros(0, dtype=np.int64)
        gaps = (positions - prev - 1).astype(np.uint64)
        k = _best_rice_k(gaps, v.length, coded)
        v.rice_k = k
        q = (gaps >> np.uint64(k)).astype(np.int64)
        lens = q + 1 + k
        starts = np.zeros(coded, dtype=np.int64)
        if coded:
            np.cumsum(lens[:-1], out=starts[1:])
        v._pay_bits = int(lens.sum())
        buf = np.zeros((v._pay_bits + 7) // 8, dtype=np.uint8)
        if coded:
            term = starts + q
            _scatter_bits(buf, term, np.ones(coded, dtype=np.uint8))
            if k:
                rem = gaps & np.uint64((1 << k) - 1)
                for j in range(k):
                    bit = ((rem >> np.uint64(j)) & np.uint64(1)).astype(np.uint8)
                    _scatter_bits(buf, term + 1 + j, bit)
        v._pay = buf
        v._words = _words_from_bytes(buf)
        idx = np.arange(0, coded, GAP_SAMPLE, dtype=np.int64)
        v._samp_prev = prev[idx] if coded else np.zeros(0, dtype=np.int64)
        v._samp_off = starts[idx].astype(np.uint64) if coded else np.zeros(0, dtype=np.uint64)
        return v

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def _check_index(self, i):
        if i < 0 or i >= self.length:
            raise IndexError("bit index %d out of range [0, %d)" % (i, self.length))

    def partial_rank(self, i):
        """Inclusive ones count through i, or None when bit i is 0."""
        self._check_index(i)
        if self.mode == MODE_RRR:
            ones, bit = self._rrr_rank(i)
        else:
            ones, bit = self._gap_rank(i)
        return ones if bit else None

    def rank_all(self, i):
        """Inclusive ones count through i, defined on every position."""
        self._check_index(i)
        if self.mode == MODE_RRR:
            return self._rrr_rank(i)[0]
        return self._gap_rank(i)[0]

    def select(self, j):
        """Position of the j-th one, 1-based."""
        if j < 1 or j > self.ones:
            raise ValueError("select ordinal %d out of range [1, %d]" % (j, self.ones))
        if self.mode == MODE_RRR:
            return self._rrr_select(j)
        if not self.complement:
            return self._coded_select(j)
        return self._complement_select(j)

    def get_bit(self, i):
        self._check_index(i)
        if self.mode == MODE_RRR:
            return self._rrr_rank(i)[1]
        return self._gap_rank(i)[1]

    # rrr internals

    def _rrr_chunk(self, ch):
        sb = ch // SUPER
        bitoff = int(self._sb_bits[sb])
        ones = int(self._sb_ones[sb])
        for j in range(sb * SUPER, ch):
            c = int(self._cls[j])
            bitoff += int(_WIDTH[c])
            ones += c
        c = int(self._cls[ch])
        off = _read_field(self._words, bitoff, int(_WIDTH[c]))
        return ones, _decode_chunk_word(off, c)

    def _rrr_rank(self, i):
        ch = i // CHUNK
        ones, word = self._rrr_chunk(ch)
        pos = i - ch * CHUNK
        below = word & ((1 << (pos + 1)) - 1)
        return ones + below.bit_count(), (word >> pos) & 1

    def _rrr_select(self, j):
        sb = int(np.searchsorted(self._sb_ones, j, side="left")) - 1
        sb = min(sb, (len(self._cls) - 1) // SUPER)
        ones = int(self._sb_ones[sb])
        ch = sb * SUPER
        while ones + int(self._cls[ch]) < j:
            ones += int(self._cls[ch])
            ch += 1
        _, word = self._rrr_chunk(ch)
        need = j - ones
        pos = 0
        while True:
            if (word >> pos) & 1:
                need -= 1
                if need == 0:
                    break
            pos += 1
        return ch * CHUNK + pos

    # gap-coded internals; "coded" positions are the ones, or the zeros in
    # complement mode

    def _coded_walk(self, start_idx):
        """Generator-free sequential decoder state at sample start_idx."""
        return (int(self._samp_prev[start_idx]) if len(self._samp_prev) else -1,
                int(self._samp_off[start_idx]) if len(self._samp_off) else 0)

    def _decode_next(self, prev, off):
        # unary quotient: count zeros up to the terminating one
        q = 0
        words = self._words
        while True:
            w = int(words[off >> 6]) >> (off & 63)
            avail = 64 - (off & 63)
            if w == 0:
                q += avail
                off += avail
                continue
            z = (w & -w).bit_length() - 1
            q += z
            off += z + 1
            break
        r = _read_field(words, off, self.rice_k)
        off += self.rice_k
        gap = (q << self.rice_k) | r
        return prev + 1 + gap, off

    def _coded_count(self):
        return (self.length - self.ones) if self.complement else self.ones

    def _coded_rank_scan(self, i):
        """(#coded positions <= i, is position i coded)."""
        mc = self._coded_count()
        if mc == 0:
            return 0, 0
        # largest sample whose predecessor position is strictly below i, so
        # a walk from it visits position i if i is coded
        s = int(np.searchsorted(self._samp_prev, i, side="left")) - 1
        s = max(s, 0)
        prev, off = self._coded_walk(s)
        cnt = s * GAP_SAMPLE
        if prev > i:
            # all coded positions in this sample range start beyond i, and
            # sample 0 starts at prev -1, so earlier samples cover it
            return cnt, 0
        while cnt < mc:
            nxt, off = self._decode_next(prev, off)
            if nxt > i:
                return cnt, 0
            cnt += 1
            if nxt == i:
                return cnt, 1
            prev = nxt
        return cnt, 0

    def _coded_select(self, j):
        s = (j - 1) // GAP_SAMPLE
        prev, off = self._coded_walk(s)
        for _ in range(j - 1 - s * GAP_SAMPLE + 1):
            prev, off = self._decode_next(prev, off)
        return prev

    def _gap_rank(self, i):
        cnt, member = self._coded_rank_scan(i)
        if not self.complement:
            return cnt, member
        return (i + 1) - cnt, 0 if member else 1

    def _complement_select(self, j):
        z = self._coded_rank_scan(j - 1)[0]
        while True:
            p = j - 1 + z
            z2, member = self._coded_rank_scan(p)
            if z2 == z:
                if member:
                    # p itself is coded (a zero); the j-th one is earlier
                    z -= 1
                    continue
                return p
            z = z2

    # ------------------------------------------------------------------
    # whole-vector decode
    # ------------------------------------------------------------------

    def decode(self):
        """The original bit sequence as a uint8 array."""
        if self.mode == MODE_RRR:
            return self._decode_rrr()
        pos = self.coded_positions()
        bits = np.full(self.length, self.complement, dtype=np.uint8)
        bits[pos] = 1 - self.complement
        return bits

    def coded_positions(self):
        """Positions of ones (zeros in complement mode), gap mode only."""
        mc = self._coded_count()
        out = np.empty(mc, dtype=np.int64)
        prev, off = -1, 0
        for i in range(mc):
            prev, off = self._decode_next(prev, off)
            out[i] = prev
        return out

    def one_positions(self):
        if self.mode == MODE_GOLOMB and not self.complement:
            return self.coded_positions()
        return np.flatnonzero(self.decode()).astype(np.int64)

    def _decode_rrr(self):
        nch = len(self._cls)
        bits = np.empty(nch * CHUNK, dtype=np.uint8)
        widths = _WIDTH[self._cls.astype(np.int64)]
        starts = np.zeros(nch, dtype=np.int64)
        if nch:
            np.cumsum(widths[:-1], out=starts[1:])
        for lo in range(0, nch, _SLAB):
            hi = min(nch, lo + _SLAB)
            offs = _read_fields_vec(self._words, starts[lo:hi], widths[lo:hi])
            bits[lo * CHUNK:hi * CHUNK] = _decode_chunk_slab(
                offs, self._cls[lo:hi]).reshape(-1)
        return bits[:self.length]

    # ------------------------------------------------------------------
    # size accounting and serialization
    # ------------------------------------------------------------------

    _HDR = struct.Struct("<BBBxQQQL")

    def to_bytes(self):
        if self.mode == MODE_RRR:
            nch = len(self._cls)
            aux_bits = 6 * nch
            aux = _pack_fields(aux_bits,
                               6 * np.arange(nch, dtype=np.int64),
                               np.full(nch, 6, dtype=np.int64),
                               self._cls.astype(np.uint64))
            nsamp = 0
        else:
            nsamp = len(self._samp_prev)
            aux = np.zeros(nsamp * 16, dtype=np.uint8)
            if nsamp:
                view = aux.view("<u8")
                view[0::2] = (self._samp_prev + 1).astype(np.uint64)
                view[1::2] = self._samp_off
        head = self._HDR.pack(self.mode, self.complement, self.rice_k,
                              self.length, self.ones, self._pay_bits, nsamp)
        return head + self._pay.tobytes() + aux.tobytes()

    @classmethod
    def from_bytes(cls, buf, offset=0):
        v = cls()
        (v.mode, v.complement, v.rice_k, v.length, v.ones,
         v._pay_bits, nsamp) = cls._HDR.unpack_from(buf, offset)
        offset += cls._HDR.size
        paylen = (v._pay_bits + 7) // 8
        v._pay = np.frombuffer(buf, dtype=np.uint8, count=paylen, offset=offset).copy()
        offset += paylen
        v._words = _words_from_bytes(v._pay)
        if v.mode == MODE_RRR:
            nch = (v.length + CHUNK - 1) // CHUNK
            auxlen = (6 * nch + 7) // 8
            aux = np.frombuffer(buf, dtype=np.uint8, count=auxlen, offset=offset)
            offset += auxlen
            words = _words_from_bytes(aux.copy())
            v._cls = _read_fields_vec(
                words, 6 * np.arange(nch, dtype=np.int64),
                np.full(nch, 6, dtype=np.int64)).astype(np.uint8)
            v._finish_rrr()
        else:
            aux = np.frombuffer(buf, dtype=np.uint8, count=nsamp * 16, offset=offset)
            offset += nsamp * 16
            if nsamp:
                view = aux.copy().view("<u8")
                v._samp_prev = view[0::2].astype(np.int64) - 1
                v._samp_off = view[1::2].copy()
        return v, offset

    def size_in_bits(self):
        """Exact serialized size, payload plus directories plus header."""
        return 8 * len(self.to_bytes())

    def payload_bits(self):
        return self._pay_bits

    def directory_bits(self):
        return self.size_in_bits() - self._pay_bits

    def documented_overhead_bits(self):
        """The per-mode directory/overhead budget named in the size contract."""
        if self.mode == MODE_RRR:
            nch = (self.length + CHUNK - 1) // CHUNK
            return 7 * nch + 332
        return 3 * self._coded_count() + 128 * len(self._samp_prev) + 272

    def __len__(self):
        return self.length


def build_compressed(bits, mode="auto"):
    """Build a CompressedBitvector from a 0/1 sequence.

    mode: "auto" picks the smaller exact encoding, "rrr", "golomb" or
    "golomb_complement" force a coding.
    """
    bits = _as_bit_array(bits)
    n = len(bits)
    if n == 0:
        return CompressedBitvector._from_rrr(bits=bits)
    ones_pos = np.flatnonzero(bits).astype(np.int64)
    return _build_from_positions(n, ones_pos, mode, bits)


def build_from_ones(n, positions, mode="auto"):
    """Build from the sorted positions of the one bits (no full bitmap)."""
    positions = np.asarray(positions, dtype=np.int64)
    if len(positions):
        if positions[0] < 0 or positions[-1] >= n:
            raise ValueError("one position out of range")
        if (np.diff(positions) <= 0).any():
            raise ValueError("one positions must be strictly increasing")
    if n == 0:
        return CompressedBitvector._from_rrr(bits=np.zeros(0, dtype=np.uint8))
    return _build_from_positions(n, positions, mode, None)


def _build_from_positions(n, ones_pos, mode, bits):
    if mode == "rrr":
        if bits is not None:
            return CompressedBitvector._from_rrr(bits=bits)
        return CompressedBitvector._from_rrr(n=n, positions=ones_pos)
    if mode == "golomb":
        return CompressedBitvector._from_golomb(n, ones_pos, complement=0)
    if mode == "golomb_complement":
        zeros = _zero_positions(n, ones_pos, bits)
        return CompressedBitvector._from_golomb(n, zeros, complement=1)
    if mode != "auto":
        raise ValueError("unknown mode %r" % (mode,))
    candidates = []
    if n <= (1 << 31):
        candidates.append(_estimate_rrr(n, ones_pos, bits))
    candidates.append(("golomb", _estimate_golomb(n, ones_pos)))
    # complement coding can only win when zeros are scarcer than ones
    if n <= (1 << 31) and (n - len(ones_pos)) <= 4 * len(ones_pos):
        zeros = _zero_positions(n, ones_pos, bits)
        candidates.append(("golomb_complement", _estimate_golomb(n, zeros)))
    best = min(candidates, key=lambda item: item[1])
    return _build_from_positions(n, ones_pos, best[0], bits)


def _zero_positions(n, ones_pos, bits):
    if bits is not None:
        return np.flatnonzero(bits == 0).astype(np.int64)
    mask = np.ones(n, dtype=bool)
    mask[ones_pos] = False
    return np.flatnonzero(mask).astype(np.int64)


def _estimate_rrr(n, ones_pos, bits):
    nch = (n + CHUNK - 1) // CHUNK
    cls = np.bincount((ones_pos // CHUNK).astype(np.int64), minlength=nch)
    pay = int(_WIDTH[cls].sum())
    return ("rrr", pay + 6 * nch)


def _estimate_golomb(n, positions):
    coded = len(positions)
    if coded == 0:
        return 0
    prev = np.concatenate([[-1], positions[:-1]])
    gaps = (positions - prev - 1).astype(np.uint64)
    k = _best_rice_k(gaps, n, coded)
    return int((gaps >> np.uint64(k)).sum()) + coded * (1 + k) \
        + 128 * len(range(0, coded, GAP_SAMPLE))
