"""Pure-python scan kernel.

The kernel advances the automaton over one mapped text chunk, writing
(end position, marked-vertex ordinal) pairs into preallocated buffers.
All state lives in plain int64 arrays so a suspended scan can resume with
either kernel.  This version also carries the safety assertions; the
compiled kernel mirrors the logic without them.
"""

# state vector layout (shared with the compiled kernel)
V = 0          # current vertex number
I = 1          # current text position
IMAX = 2       # reporting frontier
WLO = 3        # window left edge (inclusive)
WHI = 4        # window right edge (exclusive)
VFRONT = 5     # vertex first seen at the frontier
CLIMB = 6      # parent steps taken in mismatch climbs
RESTN = 7      # number of window restores
RESTS = 8      # parent steps taken in restores
FALLB = 9      # restores that fell back to the frontier checkpoint
Q = 10         # checkpoint stride, ceil(sqrt(m))
CAP = 11       # window capacity, 2q + 1
SIGMA = 12     # alphabet size; chunk values >= SIGMA are out-of-alphabet
LVERT = 13     # m + 1
DCHAIN = 14    # longest possible report chain (distinct marked vertices + 1)
PEND = 15      # unconsumed letter at the frontier, -1 if none

ST_LEN = 16

NEED_TEXT = 0
OUT_FULL = 1


def run_scan(st, win, ckj, ckv, par, lab, in_w, fail_par, rep_par, mark_ord,
             nav_bits, nav_rank, next_map, chunk, ci, out_end, out_ord):
    """Advance the scan; returns (chunk cursor, emitted pairs, status)."""
    v = int(st[V]); i = int(st[I]); imax = int(st[IMAX])
    w_lo = int(st[WLO]); w_hi = int(st[WHI]); vf = int(st[VFRONT])
    q = int(st[Q]); cap = int(st[CAP]); sigma = int(st[SIGMA])
    chain_cap = int(st[DCHAIN]); pend = int(st[PEND])
    n_chunk = len(chunk)
    out_cap = len(out_end)
    out_n = 0
    status = NEED_TEXT

    while True:
        if i > imax:
            if out_n + chain_cap > out_cap:
                status = OUT_FULL
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
            u = int(rep_par[u])
            while u != 0:
                assert mark_ord[u] >= 0, "report chain hit an unmarked vertex"
                out_end[out_n] = i - 1
                out_ord[out_n] = mark_ord[u]
                out_n += 1
                u = int(rep_par[u])

        # obtain T[i]
        if i == w_hi:
            if i == imax:
                if pend >= 0:
                    # the frontier letter was read earlier but evicted from
                    # the ring by a deep climb; it is not derivable from any
                    # checkpoint (never consumed), so it is kept aside
                    win[i % cap] = pend
                else:
                    if ci == n_chunk:
                        break
                    pend = int(chunk[ci])
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
                    u = int(ckv[slot])
                else:
                    j = imax
                    u = vf
                    st[FALLB] += 1
                assert i < j, "restore with nothing to restore"
                k = j
                while k > i:
                    assert u != 0, "restore walked past the root"
                    win[(k - 1) % cap] = lab[u]
                    u = int(par[u])
                    k -= 1
                    st[RESTS] += 1
                st[RESTN] += 1
                w_lo = i
                w_hi = j
        assert w_lo <= i < w_hi, "read position outside the window"
        c = int(win[i % cap])

        if c >= sigma:
            v = 0
            i += 1
            continue

        w = next_map.get(c * int(st[LVERT]) + v)
        if w is not None:
            v = w
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
            p = int(par[p])
            st[CLIMB] += 1
        if p == 0:
            v = 0
            i += 1
        else:
            v = int(fail_par[p])

    st[V] = v; st[I] = i; st[IMAX] = imax
    st[WLO] = w_lo; st[WHI] = w_hi; st[VFRONT] = vf; st[PEND] = pend
    return ci, out_n, status
