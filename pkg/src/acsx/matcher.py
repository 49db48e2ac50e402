"""Streaming dictionary matching over the compressed index.

The scanner is the classic automaton loop with two twists required by the
compressed encodings: failure links exist only on the dense subset W, so a
mismatch first climbs trie parents to the nearest W member (recovering the
text letters it walks over), and the text itself is kept only in a ring
window of about 2*sqrt(m) letters, re-derivable from checkpoint vertices
whenever the scan backtracks out of the window.

Occurrences are emitted in nondecreasing end position.  A ScanState is
suspendable between text chunks, so texts never need to be fully resident.
"""

import collections
import math

import numpy as np

from . import _scan_kernel_py as K
from .kernel import select_kernel

Occurrence = collections.namedtuple("Occurrence",
                                    ["end_pos", "pattern_id", "start_pos"])

_CHUNK_BYTES = 1 << 16


class ScanState(object):
    """Suspendable scanner state over one text stream."""

    def __init__(self, index, kernel=None):
        self.index = index
        self.nav = index.nav_cache()
        m = index.m
        q = max(1, math.isqrt(m) + (0 if math.isqrt(m) ** 2 == m else 1))
        cap = 2 * q + 1
        self.st = np.zeros(K.ST_LEN, dtype=np.int64)
        self.st[K.Q] = q
        self.st[K.CAP] = cap
        self.st[K.SIGMA] = index.sigma
        self.st[K.LVERT] = m + 1
        self.st[K.DCHAIN] = index.pattern_table.d_distinct + 1
        self.st[K.PEND] = -1
        self.window = np.zeros(cap, dtype=np.int64)
        self.ckpt_j = np.full(q + 1, -1, dtype=np.int64)
        self.ckpt_v = np.zeros(q + 1, dtype=np.int64)
        self.ckpt_j[0] = 0
        out_cap = max(4096, index.pattern_table.d_distinct + 2)
        self.out_end = np.zeros(out_cap, dtype=np.int64)
        self.out_ord = np.zeros(out_cap, dtype=np.int64)
        self.kernel_name, self._run = select_kernel(self.nav, kernel)

    # counters
    @property
    def climb_steps(self):
        return int(self.st[K.CLIMB])

    @property
    def restore_count(self):
        return int(self.st[K.RESTN])

    @property
    def restore_steps(self):
        return int(self.st[K.RESTS])

    @property
    def parent_steps(self):
        return self.climb_steps + self.restore_steps

    @property
    def position(self):
        return int(self.st[K.I])

    @property
    def vertex(self):
        return int(self.st[K.V])

    def feed(self, mapped_chunk, emit):
        """Process one mapped chunk, calling emit(end_pos, ordinal)."""
        nav = self.nav
        mapped_chunk = np.ascontiguousarray(mapped_chunk, dtype=np.int64)
        ci = 0
        while True:
            ci, out_n, status = self._run(
                self.st, self.window, self.ckpt_j, self.ckpt_v,
                nav.par, nav.lab, nav.in_w, nav.fail_par, nav.rep_par,
                nav.mark_ord, nav.nav_bits, nav.nav_rank, nav.next_map,
                mapped_chunk, ci, self.out_end, self.out_ord)
            for idx in range(out_n):
                emit(int(self.out_end[idx]), int(self.out_ord[idx]))
            if status == K.NEED_TEXT:
                return


def restore_window(state, nav=None):
    """Refill state's window for the current position from a checkpoint.

    Requires the scan to be stopped exactly at an exhausted window
    (i == window right edge, i < frontier); the normal driver performs
    this inline, the standalone form exists for direct testing.
    """
    nav = nav or state.nav
    st = state.st
    i = int(st[K.I])
    imax = int(st[K.IMAX])
    q = int(st[K.Q])
    cap = int(st[K.CAP])
    if i != int(st[K.WHI]) or i >= imax:
        raise ValueError("window is not exhausted below the frontier")
    jc = ((i + q + q - 1) // q) * q
    slot = (jc // q) % (q + 1)
    if jc <= imax and state.ckpt_j[slot] == jc:
        j, u = jc, int(state.ckpt_v[slot])
    else:
        j, u = imax, int(st[K.VFRONT])
        st[K.FALLB] += 1
    k = j
    while k > i:
        if u == 0:
            raise AssertionError("restore walked past the root")
        state.window[(k - 1) % cap] = nav.lab[u]
        u = int(nav.par[u])
        k -= 1
        st[K.RESTS] += 1
    st[K.RESTN] += 1
    st[K.WLO] = i
    st[K.WHI] = j
    return j


def _iter_chunks(text):
    if isinstance(text, (bytes, bytearray, memoryview)):
        yield bytes(text)
        return
    if hasattr(text, "read"):
        while True:
            piece = text.read(_CHUNK_BYTES)
            if not piece:
                return
            yield piece
        return
    for piece in text:
        yield piece


def _emitter(index, sink):
    offsets = index.pattern_table.offsets
    ids = index.pattern_table.ids
    lengths = index.pattern_table.lengths
    counter = [0]

    def emit(end, ordinal):
        lo, hi = int(offsets[ordinal]), int(offsets[ordinal + 1])
        for pid in ids[lo:hi].tolist():
            counter[0] += 1
            if sink is not None:
                sink(Occurrence(end, pid, end - int(lengths[pid]) + 1))

    return emit, counter


def scan(index, text, sink=None, kernel=None, state=None):
    """Stream text through the automaton; returns the occurrence count.

    text may be bytes, a binary file-like object, or an iterable of byte
    chunks (for wide alphabets: arrays/sequences of symbol numbers).  sink,
    when given, receives Occurrence tuples in nondecreasing end position.
    """
    state = state or ScanState(index, kernel=kernel)
    emit, counter = _emitter(index, sink)
    for piece in _iter_chunks(text):
        mapped = index.map_text(piece)
        state.feed(mapped, emit)
    return counter[0]


def scan_reference(index, text, sink=None):
    """Same output as scan, with the text fully resident and no window.

    Kept as a separate plain implementation: it isolates window and
    checkpoint bugs when differential tests disagree.
    """
    chunks = [index.map_text(p) for p in _iter_chunks(text)]
    if chunks:
        T = np.concatenate(chunks)
    else:
        T = np.zeros(0, dtype=np.int64)
    emit, counter = _emitter(index, sink)
    nav = index.nav_cache()
    L = index.m + 1
    sigma = index.sigma
    nmap = nav.next_map
    in_w = nav.in_w
    par = nav.par
    fail_par = nav.fail_par
    rep_par = nav.rep_par
    mark_ord = nav.mark_ord
    n = len(T)
    v = 0
    i = 0
    imax = 0
    while True:
        if i > imax:
            imax = i
            u = v
            if mark_ord[u] >= 0:
                emit(i - 1, int(mark_ord[u]))
            u = int(rep_par[u])
            while u != 0:
                emit(i - 1, int(mark_ord[u]))
                u = int(rep_par[u])
        if i == n and i == imax:
            break
        c = int(T[i])
        if c >= sigma:
            v = 0
            i += 1
            continue
        w = nmap.get(c * L + v)
        if w is not None:
            v = w
            i += 1
            continue
        p = v
        while not in_w[p]:
            i -= 1
            p = int(par[p])
        if p == 0:
            v = 0
            i += 1
        else:
            v = int(fail_par[p])
    return counter[0]
