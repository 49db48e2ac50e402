"""Reference scanners, trie entropy, and space accounting.

This module holds everything the tests and the stats command need to judge
the index from the outside: two independent baseline scanners (a textbook
pointer automaton and a quadratic walker over the transition vector), the
empirical trie entropy in two independent implementations, the per-block
space bound chain, and the worst-case lower bound for any structure
answering these queries.
"""

import collections
import math

import numpy as np

from .index import BlockedNextEncoding
from .succinct_bits import CHUNK

LOG2E = math.log2(math.e)


# ---------------------------------------------------------------------------
# baseline scanners


def _symbols(seq):
    if isinstance(seq, (bytes, bytearray, memoryview)):
        return list(bytes(seq))
    return [int(x) for x in seq]


def naive_ac_scan(patterns, text):
    """Textbook pointer-based dictionary automaton; the ground truth.

    Builds its own goto/failure/output tables from scratch and returns the
    sorted list of (end position, pattern id) pairs.
    """
    goto = [{}]
    out = [[]]
    for pid, pat in enumerate(patterns):
        u = 0
        for ch in _symbols(pat):
            nxt = goto[u].get(ch)
            if nxt is None:
                goto.append({})
                out.append([])
                nxt = len(goto) - 1
                goto[u][ch] = nxt
            u = nxt
        out[u].append(pid)
    fail = [0] * len(goto)
    queue = collections.deque(goto[0].values())
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        queue.extend(goto[u].values())
    parent_of = {}
    for u in [0] + order:
        for ch, v in goto[u].items():
            parent_of[v] = (u, ch)
    for v in order:
        u, ch = parent_of[v]
        if u == 0:
            fail[v] = 0
        else:
            s = fail[u]
            while True:
                if ch in goto[s]:
                    fail[v] = goto[s][ch]
                    break
                if s == 0:
                    fail[v] = 0
                    break
                s = fail[s]
        out[v] = out[v] + out[fail[v]]
    hits = []
    s = 0
    for i, ch in enumerate(_symbols(text)):
        while True:
            if ch in goto[s]:
                s = goto[s][ch]
                break
            if s == 0:
                break
            s = fail[s]
        for pid in out[s]:
            hits.append((i, pid))
    hits.sort()
    return hits


def smp_scan(index, text):
    """Quadratic baseline: walk transitions from every start position.

    Touches only the transition encoding and the mark data; no failure or
    report links are consulted.
    """
    T = index.map_text(text if isinstance(text, (bytes, bytearray))
                       else list(text))
    n = len(T)
    hits = []
    for s in range(n):
        v = 0
        for i in range(s, n):
            c = int(T[i])
            if c >= index.sigma:
                break
            v = index.next(v, c)
            if v is None:
                break
            for pid in index.pattern_ids_at(v):
                hits.append((i, pid))
    hits.sort()
    return hits


# ---------------------------------------------------------------------------
# trie entropy


def _h0_from_counts(counts):
    n = sum(counts)
    if n == 0:
        return 0.0
    total = 0.0
    for c in counts:
        if c:
            total += c * math.log2(n / c)
    return total / n


def trie_entropy(trie, k):
    """k-th order empirical entropy of the trie, in bits per edge.

    Each edge label is attributed to the context formed by the last k
    letters of pad^k + str(parent), pad being the out-of-alphabet symbol
    sigma.  Contexts are tracked as base-(sigma+1) integers down the trie.
    """
    if k < 0:
        raise ValueError("context order must be >= 0")
    m = trie.m
    if m == 0:
        return 0.0
    parent = trie.parent
    label = trie.label
    base = trie.sigma + 1
    mod = base ** k
    n = trie.vertex_count
    code = [0] * n
    code[0] = mod - 1  # pad^k in base sigma+1 digits
    groups = collections.defaultdict(lambda: collections.defaultdict(int))
    for v in range(1, n):
        p = int(parent[v])
        c = int(label[v])
        groups[code[p]][c] += 1
        code[v] = (code[p] * base + c) % mod
    total = 0.0
    for ctx_counts in groups.values():
        counts = list(ctx_counts.values())
        total += sum(counts) * _h0_from_counts(counts)
    return total / m


def trie_entropy_materialized(trie, k):
    """Independent recomputation of trie_entropy via explicit context strings.

    Builds every context as an actual padded tuple from the root paths;
    quadratic in depth, used to cross-check the incremental version.
    """
    m = trie.m
    if m == 0:
        return 0.0
    pad = trie.sigma
    groups = collections.defaultdict(list)
    for v in range(1, trie.vertex_count):
        p = int(trie.parent[v])
        path = (pad,) * k + tuple(trie.path_labels(p))
        ctx = path[-k:] if k else ()
        groups[ctx].append(int(trie.label[v]))
    total = 0.0
    for letters in groups.values():
        counts = list(collections.Counter(letters).values())
        total += len(letters) * _h0_from_counts(counts)
    return total / m


def leaf_terminated_entropy(trie, k):
    """An alternative trie entropy: (H_k of the terminator-extended trie,
    scaled by (m + leaves)/(m + 1)), returned as (scaled, unscaled).

    The extended trie hangs an edge labeled sigma under every leaf, so its
    alphabet is [0..sigma] and its context padding symbol is sigma + 1.
    This quantity can exceed log2(sigma), which is exactly why it is only
    reported and never used in a bound.
    """
    m = trie.m
    parent = trie.parent
    label = trie.label
    n = trie.vertex_count
    has_child = np.zeros(n, dtype=bool)
    if n > 1:
        has_child[parent[1:]] = True
    leaves = int((~has_child).sum())
    base = trie.sigma + 2
    mod = base ** k
    code = [0] * n
    pad_ctx = 0
    for _ in range(k):
        pad_ctx = pad_ctx * base + (trie.sigma + 1)
    code[0] = pad_ctx % mod if k else 0
    groups = collections.defaultdict(lambda: collections.defaultdict(int))
    for v in range(1, n):
        p = int(parent[v])
        c = int(label[v])
        groups[code[p]][c] += 1
        code[v] = (code[p] * base + c) % mod
    for v in range(n):
        if not has_child[v]:
            groups[code[v]][trie.sigma] += 1
    edges = m + leaves
    total = 0.0
    for ctx_counts in groups.values():
        counts = list(ctx_counts.values())
        total += sum(counts) * _h0_from_counts(counts)
    unscaled = total / edges
    scaled = (m + leaves) / (m + 1) * unscaled
    return scaled, unscaled


# ---------------------------------------------------------------------------
# space accounting


def log2_comb(n, r):
    if r < 0 or r > n:
        return 0.0
    return (math.lgamma(n + 1) - math.lgamma(r + 1)
            - math.lgamma(n - r + 1)) / math.log(2)


def lower_bound_L(m, sigma):
    """Worst-case bits needed by any structure over m edges, sigma letters."""
    if m < 1 or sigma < 2:
        raise ValueError("need m >= 1 and sigma >= 2")
    n = sigma * (m + 1)
    return log2_comb(n, m) - math.log2(n + 1)


def boost_slack(k, sigma, b):
    """Slack of the k-th order chain beyond m*H_k + m*log2(e).

    2*sigma^(k+1)*b covers regrouping fixed blocks into context classes;
    the trailing constant covers the telescoped (b_i - n_i) terms, whose
    sum exceeds 1 by at most CHUNK because the final block of the grid is
    padded to whole chunks.
    """
    return 2.0 * float(sigma) ** (k + 1) * b + (CHUNK + 1) * LOG2E


class EntropyReport(object):
    def __init__(self, H, K, valid_upto, log_sigma, L_lower, m, sigma, d):
        self.H = H
        self.K = K
        self.valid_upto = valid_upto
        self.log_sigma = log_sigma
        self.L_lower = L_lower
        self.m = m
        self.sigma = sigma
        self.d = d

    def to_lines(self):
        lines = ["m=%d" % self.m, "sigma=%d" % self.sigma, "d=%d" % self.d,
                 "K=%d" % self.K, "valid_k_max=%d" % self.valid_upto,
                 "log_sigma=%.6f" % self.log_sigma,
                 "L_lower_bits=%.3f" % self.L_lower]
        for k in sorted(self.H):
            flag = "" if k <= self.valid_upto else " (beyond validity range)"
            lines.append("H_%d=%.9f%s" % (k, self.H[k], flag))
        return lines


def default_context_order(m, sigma, alpha=0.5):
    if sigma < 2 or m < 2:
        return 0
    return min(8, max(0, math.ceil(alpha * math.log(m, sigma))))


def entropy_report(trie, alpha=0.5, K=None):
    m = trie.m
    sigma = trie.sigma
    if K is None:
        K = default_context_order(m, sigma, alpha)
    H = {k: trie_entropy(trie, k) for k in range(K + 1)}
    if sigma >= 2 and m >= 2:
        valid = max(0, int(alpha * math.log(m, sigma) - 2))
    else:
        valid = 0
    L = lower_bound_L(m, sigma) if sigma >= 2 else float("nan")
    d = len(trie.marked_ids)
    return EntropyReport(H, K, valid, math.log2(max(sigma, 2)), L, m, sigma, d)


class SpaceReport(object):
    """Measured component sizes and the per-order bound chain."""

    def __init__(self, components, m, sigma, b, payload_bits,
                 block_binomial_bits, rounding_bits, chain):
        self.components = components
        self.m = m
        self.sigma = sigma
        self.b = b
        self.payload_bits = payload_bits
        self.block_binomial_bits = block_binomial_bits
        self.rounding_bits = rounding_bits
        self.chain = chain  # list of (k, H_k, bound_bits, holds)

    def component_total(self):
        return sum(self.components.values())

    def to_lines(self):
        lines = ["m=%d" % self.m, "sigma=%d" % self.sigma,
                 "block_size=%d" % self.b]
        for name in sorted(self.components):
            lines.append("bits_%s=%d" % (name, self.components[name]))
        lines.append("bits_total=%d" % self.component_total())
        lines.append("bits_per_edge=%.4f"
                     % (self.component_total() / max(1, self.m)))
        if self.chain:
            lines.append("next_payload_bits=%d" % self.payload_bits)
            lines.append("block_binomial_bits=%.3f" % self.block_binomial_bits)
            lines.append("rounding_bits=%d" % self.rounding_bits)
        for k, hk, bound, holds in self.chain:
            lines.append("H_%d=%.9f" % (k, hk))
            lines.append("bound_%d_bits=%.3f" % (k, bound))
            lines.append("bound_%d_holds=%s" % (k, "yes" if holds else "NO"))
        return lines


def entropy_bound_check(index, trie, alpha=0.5, K=None):
    """Verify the measured payload against the entropy chain for all orders.

    payload <= sum of per-block binomial logs + one rounding bit per chunk
            <= m*H_k + m*log2(e) + boost_slack(k) + rounding    for each k.
    """
    enc = index.next_enc
    if not isinstance(enc, BlockedNextEncoding):
        raise ValueError("the bound chain applies to the blocked encoding")
    m = index.m
    payload = enc.payload_bits()
    middle = enc.block_binomial_bound()
    rounding = enc.per_chunk_ceil_bits()
    if K is None:
        K = default_context_order(m, index.sigma, alpha)
    chain = []
    for k in range(K + 1):
        hk = trie_entropy(trie, k)
        bound = m * hk + m * LOG2E + boost_slack(k, index.sigma, enc.b)
        holds = (payload <= middle + rounding + 1e-6
                 and middle <= bound + 1e-6)
        chain.append((k, hk, bound + rounding, holds))
    comp = dict(index.section_bits())
    payload_bits = comp.pop("next_payload")
    comp["next_directories"] = comp["next"] - payload_bits
    comp["next_payload"] = payload_bits
    del comp["next"]
    return SpaceReport(comp, m, index.sigma, enc.b, payload, middle,
                       rounding, chain)


def space_report(index):
    """Component accounting without the entropy chain (any encoding kind)."""
    comp = dict(index.section_bits())
    payload_bits = comp.pop("next_payload")
    comp["next_directories"] = comp["next"] - payload_bits
    comp["next_payload"] = payload_bits
    del comp["next"]
    b = getattr(index.next_enc, "b", 0)
    return SpaceReport(comp, index.m, index.sigma, b, payload_bits,
                       float("nan"), 0, [])
