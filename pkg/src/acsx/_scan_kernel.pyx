# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled scan kernel.

Mirrors _scan_kernel_py.run_scan over the same flat state vector, so a
suspended scan can swap kernels mid-text.  Transitions are resolved through
the dense transition bitmap (word test plus popcount rank) instead of the
python dict, which is where the speedup comes from.
"""

from libc.stdint cimport int64_t, uint64_t, uint8_t

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define acsx_popcount64(x) __builtin_popcountll(x)
    #else
    static int acsx_popcount64(unsigned long long x) {
        int n = 0;
        while (x) { x &= x - 1; n++; }
        return n;
    }
    #endif
    """
    int acsx_popcount64(unsigned long long x) nogil

# state vector slots, shared with the python kernel
cdef enum:
    V = 0
    I = 1
    IMAX = 2
    WLO = 3
    WHI = 4
    VFRONT = 5
    CLIMB = 6
    RESTN = 7
    RESTS = 8
    FALLB = 9
    Q = 10
    CAP = 11
    SIGMA = 12
    LVERT = 13
    DCHAIN = 14
    PEND = 15

NEED_TEXT = 0
OUT_FULL = 1


def run_scan(int64_t[::1] st, int64_t[::1] win,
             int64_t[::1] ckj, int64_t[::1] ckv,
             int64_t[::1] par, int64_t[::1] lab, uint8_t[::1] in_w,
             int64_t[::1] fail_par, int64_t[::1] rep_par,
             int64_t[::1] mark_ord,
             uint64_t[::1] nav_bits, int64_t[::1] nav_rank,
             object next_map,
             int64_t[::1] chunk, Py_ssize_t ci,
             int64_t[::1] out_end, int64_t[::1] out_ord):
    """Advance the scan; returns (chunk cursor, emitted pairs, status)."""
    cdef int64_t v = st[V], i = st[I], imax = st[IMAX]
    cdef int64_t w_lo = st[WLO], w_hi = st[WHI], vf = st[VFRONT]
    cdef int64_t q = st[Q], cap = st[CAP], sigma = st[SIGMA]
    cdef int64_t L = st[LVERT], chain_cap = st[DCHAIN], pend = st[PEND]
    cdef int64_t climbs = st[CLIMB], restn = st[RESTN], rests = st[RESTS]
    cdef int64_t fallb = st[FALLB]
    cdef Py_ssize_t n_chunk = chunk.shape[0]
    cdef Py_ssize_t out_cap = out_end.shape[0]
    cdef Py_ssize_t out_n = 0
    cdef int status = 0            # NEED_TEXT
    cdef int64_t u, c, g, w, p, j, jc, k, slot
    cdef uint64_t word

    with nogil:
        while True:
            if i > imax:
                if out_n + chain_cap > out_cap:
                    status = 1     # OUT_FULL
                    break
                imax = i
                vf = v
                pend = -1
                if i % q == 0:
                    slot = (i // q) % (q + 1)
                    ckj[slot] = i
                    ckv[slot] = v
                u = v
                if mark_ord[u] >= 0:
                    out_end[out_n] = i - 1
                    out_ord[out_n] = mark_ord[u]
                    out_n += 1
                u = rep_par[u]
                while u != 0:
                    out_end[out_n] = i - 1
                    out_ord[out_n] = mark_ord[u]
                    out_n += 1
                    u = rep_par[u]

            # obtain T[i]
            if i == w_hi:
                if i == imax:
                    if pend >= 0:
                        win[i % cap] = pend
                    else:
                        if ci == n_chunk:
                            break
                        pend = chunk[ci]
                        ci += 1
                        win[i % cap] = pend
                    w_hi += 1
                    if w_hi - w_lo > cap:
                        w_lo = w_hi - cap
                else:
                    # window exhausted below the frontier: restore T[i..j-1]
                    jc = ((i + q + q - 1) // q) * q
                    slot = (jc // q) % (q + 1)
                    if jc <= imax and ckj[slot] == jc:
                        j = jc
                        u = ckv[slot]
                    else:
                        j = imax
                        u = vf
                        fallb += 1
                    k = j
                    while k > i:
                        win[(k - 1) % cap] = lab[u]
                        u = par[u]
                        k -= 1
                        rests += 1
                    restn += 1
                    w_lo = i
                    w_hi = j
            c = win[i % cap]

            if c >= sigma:
                v = 0
                i += 1
                continue

            g = c * L + v
            word = nav_bits[g >> 6]
            if (word >> (g & 63)) & 1:
                v = nav_rank[g >> 6] + acsx_popcount64(
                    word & ((<uint64_t>2 << (g & 63)) - 1))
                i += 1
                continue

            # mismatch: climb to the nearest dense-subset ancestor
            p = v
            while not in_w[p]:
                i -= 1
                win[i % cap] = lab[p]
                if i < w_lo:
                    w_lo = i
                if w_hi > i + cap:
                    w_hi = i + cap
                p = par[p]
                climbs += 1
            if p == 0:
                v = 0
                i += 1
            else:
                v = fail_par[p]

    st[V] = v; st[I] = i; st[IMAX] = imax
    st[WLO] = w_lo; st[WHI] = w_hi; st[VFRONT] = vf; st[PEND] = pend
    st[CLIMB] = climbs; st[RESTN] = restn; st[RESTS] = rests
    st[FALLB] = fallb
    return ci, out_n, status
