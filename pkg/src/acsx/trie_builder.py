"""Explicit pattern trie: reverse-prefix numbering, failure and report links.

The trie is the uncompressed intermediate every encoder consumes.  Vertices
are dense integers in insertion order; all per-vertex attributes live in
parallel arrays.  The numbering num orders vertices by their reversed
root-path strings, which is what lets one bitvector per letter answer both
child steps (rank) and parent steps (select) downstream.
"""

import numpy as np


class Dictionary(object):
    """A validated, immutable pattern set over an effective alphabet.

    patterns: the original inputs (bytes objects, or int sequences in wide
    mode).  mapped: per-pattern tuples of effective symbols in [0, sigma).
    alphabet_map: 256-entry byte -> symbol table (-1 for unused bytes), or
    None in wide mode where symbols are already dense integers.
    """

    def __init__(self, patterns):
        if len(patterns) == 0:
            raise ValueError("dictionary must contain at least one pattern")
        first = patterns[0]
        self.wide = not isinstance(first, (bytes, bytearray))
        self.patterns = [bytes(p) if not self.wide else tuple(int(x) for x in p)
                         for p in patterns]
        for p in self.patterns:
            if len(p) == 0:
                raise ValueError("empty patterns are not allowed")
        if self.wide:
            lo = min(min(p) for p in self.patterns)
            hi = max(max(p) for p in self.patterns)
            if lo < 0:
                raise ValueError("wide-mode symbols must be non-negative")
            self.alphabet_map = None
            self.sigma = hi + 1
            self.mapped = self.patterns
        else:
            used = sorted(set(b for p in self.patterns for b in p))
            self.alphabet_map = np.full(256, -1, dtype=np.int32)
            for i, b in enumerate(used):
                self.alphabet_map[b] = i
            self.sigma = len(used)
            self.mapped = [tuple(int(self.alphabet_map[b]) for b in p)
                           for p in self.patterns]
        self.lengths = [len(p) for p in self.patterns]
        self.d = len(self.patterns)

    def map_text(self, data):
        """Map a byte string into effective symbols; unknowns become sigma."""
        if self.alphabet_map is None:
            return np.asarray(data, dtype=np.int64)
        table = np.where(self.alphabet_map < 0, self.sigma,
                         self.alphabet_map).astype(np.int64)
        return table[np.frombuffer(bytes(data), dtype=np.uint8)]


class Trie(object):
    """Array-backed trie with numbering, failure and report links."""

    def __init__(self, sigma):
        self.sigma = sigma
        self.dictionary = None
        self.parent = [-1]
        self.label = [-1]
        self.depth = [0]
        self.children = {}
        self.marked_ids = {}
        self.num = None
        self.num_to_vertex = None
        self.failure = None
        self.report = None

    @property
    def vertex_count(self):
        return len(self.parent)

    @property
    def m(self):
        return len(self.parent) - 1

    @property
    def height(self):
        return max(self.depth)

    def child(self, u, c):
        return self.children.get(u * self.sigma + c)

    def child_map(self, u):
        """Letter -> child vertex for u (linear in u's degree would need an
        adjacency list; this scans the alphabet, fine at build time)."""
        out = {}
        for c in range(self.sigma):
            v = self.children.get(u * self.sigma + c)
            if v is not None:
                out[c] = v
        return out

    def walk(self, seq):
        """Vertex spelled by seq from the root, or None."""
        u = 0
        for c in seq:
            u = self.children.get(u * self.sigma + c)
            if u is None:
                return None
        return u

    def path_labels(self, v):
        """Labels from the root down to v (the spelled string)."""
        out = []
        while v != 0:
            out.append(self.label[v])
            v = self.parent[v]
        out.reverse()
        return out


def build_trie(dictionary):
    """Insert every pattern; duplicates share the marked vertex."""
    trie = Trie(dictionary.sigma)
    trie.dictionary = dictionary
    children = trie.children
    sigma = dictionary.sigma
    for pid, pat in enumerate(dictionary.mapped):
        u = 0
        for c in pat:
            key = u * sigma + c
            v = children.get(key)
            if v is None:
                v = len(trie.parent)
                trie.parent.append(u)
                trie.label.append(c)
                trie.depth.append(trie.depth[u] + 1)
                children[key] = v
            u = v
        trie.marked_ids.setdefault(u, []).append(pid)
    trie.parent = np.array(trie.parent, dtype=np.int64)
    trie.label = np.array(trie.label, dtype=np.int64)
    trie.depth = np.array(trie.depth, dtype=np.int64)
    trie.mark = np.zeros(trie.vertex_count, dtype=np.uint8)
    for v in trie.marked_ids:
        trie.mark[v] = 1
    return trie


def compute_reverse_prefix_numbering(trie, method="doubling"):
    """Assign num so num(u) < num(v) iff reversed(str(u)) < reversed(str(v)).

    "doubling" ranks upward label paths by prefix doubling over ancestor
    jumps; "sorted" materializes every reversed string and sorts (reference
    implementation for cross-checking at small scale).
    """
    if method == "sorted":
        num = _numbering_by_sort(trie)
    elif method == "doubling":
        num = _numbering_by_doubling(trie)
    else:
        raise ValueError("unknown numbering method %r" % (method,))
    count = np.bincount(num, minlength=trie.vertex_count)
    if count.max() != 1:
        raise AssertionError("reversed path strings are not distinct")
    trie.num = num
    trie.num_to_vertex = np.argsort(num).astype(np.int64)
    return trie


def _numbering_by_sort(trie):
    v_count = trie.vertex_count
    rev = [None] * v_count
    rev[0] = ()
    order = np.argsort(trie.depth, kind="stable")
    for v in order:
        v = int(v)
        if v == 0:
            continue
        rev[v] = (int(trie.label[v]),) + rev[int(trie.parent[v])]
    ranked = sorted(range(v_count), key=lambda v: rev[v])
    num = np.zeros(v_count, dtype=np.int64)
    for r, v in enumerate(ranked):
        num[v] = r
    return num


def _numbering_by_doubling(trie):
    v_count = trie.vertex_count
    # rank by the first upward label; root (empty string) sorts least
    rank = trie.label + 1
    anc = trie.parent.copy()
    anc[0] = -1
    step = 1
    while True:
        uniq = np.unique(rank)
        if len(uniq) == v_count:
            break
        if step > trie.height:
            raise AssertionError("numbering failed to separate all vertices")
        second = np.where(anc >= 0, rank[np.maximum(anc, 0)], -1)
        order = np.lexsort((second, rank))
        f = rank[order]
        s = second[order]
        bump = np.ones(v_count, dtype=np.int64)
        bump[0] = 0
        if v_count > 1:
            same = (f[1:] == f[:-1]) & (s[1:] == s[:-1])
            bump[1:] = ~same
        rank = np.empty(v_count, dtype=np.int64)
        rank[order] = np.cumsum(bump)
        anc = np.where(anc >= 0, anc[np.maximum(anc, 0)], -1)
        step *= 2
    return rank.astype(np.int64)


def compute_failure_links(trie):
    """Longest proper suffix spelled on a root path, set in BFS order."""
    v_count = trie.vertex_count
    failure = np.zeros(v_count, dtype=np.int64)
    children = trie.children
    sigma = trie.sigma
    order = np.argsort(trie.depth, kind="stable")
    for v in order:
        v = int(v)
        if v == 0:
            continue
        u = int(trie.parent[v])
        c = int(trie.label[v])
        if u == 0:
            failure[v] = 0
            continue
        f = int(failure[u])
        while True:
            w = children.get(f * sigma + c)
            if w is not None:
                failure[v] = w
                break
            if f == 0:
                failure[v] = 0
                break
            f = int(failure[f])
    trie.failure = failure
    return trie


def compute_report_links(trie):
    """report(v): nearest marked proper-suffix vertex, else root."""
    if trie.failure is None:
        raise ValueError("failure links must be computed first")
    v_count = trie.vertex_count
    report = np.zeros(v_count, dtype=np.int64)
    order = np.argsort(trie.depth, kind="stable")
    for v in order:
        v = int(v)
        if v == 0:
            continue
        f = int(trie.failure[v])
        report[v] = f if trie.mark[f] else report[f]
    trie.report = report
    return trie


def build_full_trie(dictionary, method="doubling"):
    """Trie with numbering, failure and report links, DFS property checked."""
    trie = build_trie(dictionary)
    compute_reverse_prefix_numbering(trie, method=method)
    compute_failure_links(trie)
    compute_report_links(trie)
    if not verify_dfs_property(trie):
        raise AssertionError("numbering is not a DFS preorder of the "
                             "failure tree; the construction is broken")
    return trie


def is_dfs_preorder(parent_in_num_space):
    """True iff identity numbering is a DFS preorder of the given tree.

    parent_in_num_space[i] is the parent of vertex numbered i (root = 0,
    parent_in_num_space[0] ignored), children visited in increasing number.
    """
    n = len(parent_in_num_space)
    kids = [[] for _ in range(n)]
    for v in range(1, n):
        p = int(parent_in_num_space[v])
        if p < 0 or p >= n:
            return False
        kids[p].append(v)
    stack = [0]
    seen = 0
    while stack:
        v = stack.pop()
        if v != seen:
            return False
        seen += 1
        stack.extend(reversed(kids[v]))
    return seen == n


def failure_parent_in_num_space(trie):
    """Failure tree reindexed by num: array f with f[num(v)] = num(failure(v))."""
    f = np.zeros(trie.vertex_count, dtype=np.int64)
    for v in range(1, trie.vertex_count):
        f[trie.num[v]] = trie.num[int(trie.failure[v])]
    return f


def verify_dfs_property(trie):
    """Assertable form of the preorder claim for the failure tree."""
    if trie.num is None or trie.failure is None:
        raise ValueError("numbering and failure links are required")
    return is_dfs_preorder(failure_parent_in_num_space(trie))
