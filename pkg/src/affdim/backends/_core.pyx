# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core.

Statement-for-statement twin of ``pure.py``; compiled with
-ffp-contract=off so every intermediate rounds exactly like the
pure-Python backend and results are bit-identical.
"""

from libc.math cimport exp, fabs, log, sqrt
from libc.stdlib cimport free, malloc

NAME = "compiled"

cdef enum:
    K_PRESSURE_R = 0
    K_PRESSURE_S = 1
    K_SURR_R_SIGMA2 = 2
    K_SURR_R_DET = 3
    K_SURR_R_DIAG0 = 4
    K_SURR_R_DIAG1 = 5
    K_SURR_S_SIGMA2 = 6
    K_SURR_S_DET = 7
    K_SURR_S_DIAG0 = 8
    K_SURR_S_DIAG1 = 9
    K_NORM_MOMENT = 10

KIND_PRESSURE_R = K_PRESSURE_R
KIND_PRESSURE_S = K_PRESSURE_S
KIND_SURR_R_SIGMA2 = K_SURR_R_SIGMA2
KIND_SURR_R_DET = K_SURR_R_DET
KIND_SURR_R_DIAG0 = K_SURR_R_DIAG0
KIND_SURR_R_DIAG1 = K_SURR_R_DIAG1
KIND_SURR_S_SIGMA2 = K_SURR_S_SIGMA2
KIND_SURR_S_DET = K_SURR_S_DET
KIND_SURR_S_DIAG0 = K_SURR_S_DIAG0
KIND_SURR_S_DIAG1 = K_SURR_S_DIAG1
KIND_NORM_MOMENT = K_NORM_MOMENT

cdef double NEG_INF = float("-inf")
cdef double RENORM_LIMIT = 1e-60
cdef double RENORM_SCALE = 2.0 ** 200
cdef double RENORM_LOG = 200.0 * 0.6931471805599453
cdef double U53 = 1.0 / 9007199254740992.0

DEF MAX_MAPS = 64
DEF MAX_LVL = 33


cdef inline double _phi_log2(double ls1, double ls2, double ld,
                             double s) noexcept nogil:
    if s <= 1.0:
        return s * ls1
    if s < 2.0:
        return ls1 + (s - 1.0) * ls2
    return 0.5 * s * ld


cdef inline double _diag_minorant(double entry, double lsc, double ld,
                                  double s) noexcept nogil:
    cdef double le
    if entry <= 0.0:
        return NEG_INF
    le = log(entry) + lsc
    if s <= 1.0:
        return s * le
    return (2.0 - s) * le + (s - 1.0) * ld


cdef inline double _leaf_term(double e0, double e1, double e2, double e3,
                              double lsc, double lp, double ld,
                              double s, double omq, int kind) noexcept nogil:
    cdef double lg, m, adet, p2, hi, lo, s1, ls1, ls2
    if kind == K_SURR_R_DIAG0 or kind == K_SURR_S_DIAG0:
        lg = _diag_minorant(e0, lsc, ld, s)
        return omq * lg + lp if kind == K_SURR_R_DIAG0 else lg
    if kind == K_SURR_R_DIAG1 or kind == K_SURR_S_DIAG1:
        lg = _diag_minorant(e3, lsc, ld, s)
        return omq * lg + lp if kind == K_SURR_R_DIAG1 else lg
    if kind == K_SURR_R_DET:
        return omq * (0.5 * s * ld) + lp
    if kind == K_SURR_S_DET:
        return 0.5 * s * ld

    m = e0 * e0 + e1 * e1 + e2 * e2 + e3 * e3
    adet = e0 * e3 - e1 * e2
    if adet < 0.0:
        adet = -adet
    p2 = 2.0 * adet
    hi = m + p2
    lo = m - p2
    if lo < 0.0:
        lo = 0.0
    s1 = 0.5 * (sqrt(hi) + sqrt(lo))
    ls1 = log(s1) + lsc
    ls2 = ld - ls1

    if kind == K_PRESSURE_R:
        return omq * _phi_log2(ls1, ls2, ld, s) + lp
    if kind == K_PRESSURE_S:
        return _phi_log2(ls1, ls2, ld, s)
    if kind == K_SURR_R_SIGMA2:
        return omq * (s * ls2) + lp
    if kind == K_SURR_S_SIGMA2:
        return s * ls2
    return omq * (s * ls1) + lp


cdef inline double _log_norm2(double e0, double e1, double e2,
                              double e3) noexcept nogil:
    cdef double m, adet, p2, hi, lo, s1
    m = e0 * e0 + e1 * e1 + e2 * e2 + e3 * e3
    adet = e0 * e3 - e1 * e2
    if adet < 0.0:
        adet = -adet
    p2 = 2.0 * adet
    hi = m + p2
    lo = m - p2
    if lo < 0.0:
        lo = 0.0
    s1 = 0.5 * (sqrt(hi) + sqrt(lo))
    return log(s1)


cdef struct State:
    double e0, e1, e2, e3, lsc, lp, ld


cdef inline void _prefix_state(double* ma, double* qlp, double* ldets,
                               int prefix_len, long pidx, int n,
                               State* st) noexcept nogil:
    cdef double e0 = 1.0, e1 = 0.0, e2 = 0.0, e3 = 1.0
    cdef double lsc = 0.0, lp = 0.0, ld = 0.0
    cdef double a0, a1, a2, a3, x0, x1, x2, x3, am, t
    cdef long shift = 1
    cdef int i, letter
    for i in range(prefix_len):
        shift *= n
    for i in range(prefix_len):
        shift //= n
        letter = <int>((pidx // shift) % n)
        a0 = ma[4 * letter]
        a1 = ma[4 * letter + 1]
        a2 = ma[4 * letter + 2]
        a3 = ma[4 * letter + 3]
        x0 = e0 * a0 + e1 * a2
        x1 = e0 * a1 + e1 * a3
        x2 = e2 * a0 + e3 * a2
        x3 = e2 * a1 + e3 * a3
        am = fabs(x0)
        t = fabs(x1)
        if t > am:
            am = t
        t = fabs(x2)
        if t > am:
            am = t
        t = fabs(x3)
        if t > am:
            am = t
        if am < RENORM_LIMIT and am > 0.0:
            x0 *= RENORM_SCALE
            x1 *= RENORM_SCALE
            x2 *= RENORM_SCALE
            x3 *= RENORM_SCALE
            lsc -= RENORM_LOG
        e0 = x0
        e1 = x1
        e2 = x2
        e3 = x3
        lp += qlp[letter]
        ld += ldets[letter]
    st.e0 = e0
    st.e1 = e1
    st.e2 = e2
    st.e3 = e3
    st.lsc = lsc
    st.lp = lp
    st.ld = ld


def fold_partials(mats, qlp, ldets, int depth, int prefix_len, long lo,
                  long hi, int kind, double s, double omq):
    """Per-prefix (vmax, acc) log-sum-exp partials; see the pure twin."""
    cdef int n = len(mats)
    cdef int rem = depth - prefix_len
    cdef double ma[4 * MAX_MAPS]
    cdef double qlpa[MAX_MAPS]
    cdef double ldeta[MAX_MAPS]
    cdef double pe0[MAX_LVL]
    cdef double pe1[MAX_LVL]
    cdef double pe2[MAX_LVL]
    cdef double pe3[MAX_LVL]
    cdef double plsc[MAX_LVL]
    cdef double plp[MAX_LVL]
    cdef double pld[MAX_LVL]
    cdef int choice[MAX_LVL]
    cdef long pidx, count, j
    cdef int i, lvl, c
    cdef double vmax, acc, t
    cdef double a0, a1, a2, a3, x0, x1, x2, x3, am, tt, nlsc, nlp, nld
    cdef State st
    cdef double* res
    if n > MAX_MAPS or rem < 0 or rem + 1 > MAX_LVL:
        raise ValueError("kernel limits exceeded")
    for i in range(n):
        ma[4 * i] = mats[i][0]
        ma[4 * i + 1] = mats[i][1]
        ma[4 * i + 2] = mats[i][2]
        ma[4 * i + 3] = mats[i][3]
        qlpa[i] = qlp[i]
        ldeta[i] = ldets[i]
    count = hi - lo
    res = <double*>malloc(2 * count * sizeof(double))
    if res == NULL:
        raise MemoryError()
    try:
        with nogil:
            for pidx in range(lo, hi):
                _prefix_state(ma, qlpa, ldeta, prefix_len, pidx, n, &st)
                vmax = NEG_INF
                acc = 0.0
                pe0[0] = st.e0
                pe1[0] = st.e1
                pe2[0] = st.e2
                pe3[0] = st.e3
                plsc[0] = st.lsc
                plp[0] = st.lp
                pld[0] = st.ld
                for i in range(rem + 1):
                    choice[i] = 0
                lvl = 0
                while lvl >= 0:
                    if lvl == rem:
                        t = _leaf_term(pe0[lvl], pe1[lvl], pe2[lvl], pe3[lvl],
                                       plsc[lvl], plp[lvl], pld[lvl],
                                       s, omq, kind)
                        if t != NEG_INF:
                            if t > vmax:
                                acc = acc * exp(vmax - t) + 1.0
                                vmax = t
                            elif t == vmax:
                                acc += 1.0
                            else:
                                acc += exp(t - vmax)
                        lvl -= 1
                        continue
                    c = choice[lvl]
                    if c == n:
                        choice[lvl] = 0
                        lvl -= 1
                        continue
                    choice[lvl] = c + 1
                    a0 = ma[4 * c]
                    a1 = ma[4 * c + 1]
                    a2 = ma[4 * c + 2]
                    a3 = ma[4 * c + 3]
                    x0 = pe0[lvl] * a0 + pe1[lvl] * a2
                    x1 = pe0[lvl] * a1 + pe1[lvl] * a3
                    x2 = pe2[lvl] * a0 + pe3[lvl] * a2
                    x3 = pe2[lvl] * a1 + pe3[lvl] * a3
                    nlsc = plsc[lvl]
                    am = fabs(x0)
                    tt = fabs(x1)
                    if tt > am:
                        am = tt
                    tt = fabs(x2)
                    if tt > am:
                        am = tt
                    tt = fabs(x3)
                    if tt > am:
                        am = tt
                    if am < RENORM_LIMIT and am > 0.0:
                        x0 *= RENORM_SCALE
                        x1 *= RENORM_SCALE
                        x2 *= RENORM_SCALE
                        x3 *= RENORM_SCALE
                        nlsc -= RENORM_LOG
                    nlp = plp[lvl] + qlpa[c]
                    nld = pld[lvl] + ldeta[c]
                    lvl += 1
                    pe0[lvl] = x0
                    pe1[lvl] = x1
                    pe2[lvl] = x2
                    pe3[lvl] = x3
                    plsc[lvl] = nlsc
                    plp[lvl] = nlp
                    pld[lvl] = nld
                    choice[lvl] = 0
                res[2 * (pidx - lo)] = vmax
                res[2 * (pidx - lo) + 1] = acc
        return [(res[2 * j], res[2 * j + 1]) for j in range(count)]
    finally:
        free(res)


def min_norm_range(mats, ldets, int depth, int prefix_len, long lo, long hi,
                   double best_log, bint prune, double s2min_log,
                   double hdet_min_log):
    """Branch-and-bound minimum log norm over a prefix range; see pure twin."""
    cdef int n = len(mats)
    cdef int rem = depth - prefix_len
    cdef double ma[4 * MAX_MAPS]
    cdef double qlpa[MAX_MAPS]
    cdef double ldeta[MAX_MAPS]
    cdef double pe0[MAX_LVL]
    cdef double pe1[MAX_LVL]
    cdef double pe2[MAX_LVL]
    cdef double pe3[MAX_LVL]
    cdef double plsc[MAX_LVL]
    cdef double pld[MAX_LVL]
    cdef int choice[MAX_LVL]
    cdef int wit[MAX_LVL]
    cdef long wit_prefix = -1
    cdef bint improved = False
    cdef long pidx
    cdef int i, lvl, c, m_left
    cdef double ls1, b1, b2
    cdef double a0, a1, a2, a3, x0, x1, x2, x3, am, tt, nlsc, nld
    cdef State st
    if n > MAX_MAPS or rem < 0 or rem + 1 > MAX_LVL:
        raise ValueError("kernel limits exceeded")
    for i in range(n):
        ma[4 * i] = mats[i][0]
        ma[4 * i + 1] = mats[i][1]
        ma[4 * i + 2] = mats[i][2]
        ma[4 * i + 3] = mats[i][3]
        qlpa[i] = 0.0
        ldeta[i] = ldets[i]
    with nogil:
        for pidx in range(lo, hi):
            _prefix_state(ma, qlpa, ldeta, prefix_len, pidx, n, &st)
            pe0[0] = st.e0
            pe1[0] = st.e1
            pe2[0] = st.e2
            pe3[0] = st.e3
            plsc[0] = st.lsc
            pld[0] = st.ld
            for i in range(rem + 1):
                choice[i] = 0
            lvl = 0
            while lvl >= 0:
                if lvl == rem:
                    ls1 = _log_norm2(pe0[lvl], pe1[lvl], pe2[lvl], pe3[lvl]) \
                        + plsc[lvl]
                    if ls1 < best_log:
                        best_log = ls1
                        improved = True
                        wit_prefix = pidx
                        for i in range(rem):
                            wit[i] = choice[i] - 1
                    lvl -= 1
                    continue
                c = choice[lvl]
                if c == 0 and prune:
                    ls1 = _log_norm2(pe0[lvl], pe1[lvl], pe2[lvl], pe3[lvl]) \
                        + plsc[lvl]
                    m_left = rem - lvl
                    b1 = ls1 + m_left * s2min_log
                    b2 = 0.5 * pld[lvl] + m_left * hdet_min_log
                    if b2 > b1:
                        b1 = b2
                    if b1 >= best_log:
                        lvl -= 1
                        continue
                if c == n:
                    choice[lvl] = 0
                    lvl -= 1
                    continue
                choice[lvl] = c + 1
                a0 = ma[4 * c]
                a1 = ma[4 * c + 1]
                a2 = ma[4 * c + 2]
                a3 = ma[4 * c + 3]
                x0 = pe0[lvl] * a0 + pe1[lvl] * a2
                x1 = pe0[lvl] * a1 + pe1[lvl] * a3
                x2 = pe2[lvl] * a0 + pe3[lvl] * a2
                x3 = pe2[lvl] * a1 + pe3[lvl] * a3
                nlsc = plsc[lvl]
                am = fabs(x0)
                tt = fabs(x1)
                if tt > am:
                    am = tt
                tt = fabs(x2)
                if tt > am:
                    am = tt
                tt = fabs(x3)
                if tt > am:
                    am = tt
                if am < RENORM_LIMIT and am > 0.0:
                    x0 *= RENORM_SCALE
                    x1 *= RENORM_SCALE
                    x2 *= RENORM_SCALE
                    x3 *= RENORM_SCALE
                    nlsc -= RENORM_LOG
                nld = pld[lvl] + ldeta[c]
                lvl += 1
                pe0[lvl] = x0
                pe1[lvl] = x1
                pe2[lvl] = x2
                pe3[lvl] = x3
                plsc[lvl] = nlsc
                pld[lvl] = nld
                choice[lvl] = 0
    if not improved:
        return best_log, None
    witness = []
    shift = n ** prefix_len
    for i in range(prefix_len):
        shift //= n
        witness.append(int((wit_prefix // shift) % n))
    for i in range(rem):
        witness.append(wit[i])
    return best_log, witness


from array import array as _host_array


def chaos_game_d2(mats, trans, cump, unsigned long long seed, long burn_in,
                  long count):
    """splitmix64-driven random iteration; see the pure twin for the contract."""
    cdef int n = len(mats)
    cdef double ma[4 * MAX_MAPS]
    cdef double tr[2 * MAX_MAPS]
    cdef double cp[MAX_MAPS]
    cdef unsigned long long state = seed
    cdef unsigned long long z
    cdef double x0 = 0.0, x1 = 0.0, nx0, nx1, u
    cdef long step, total = burn_in + count
    cdef int i, sel
    cdef double* out
    if n > MAX_MAPS:
        raise ValueError("kernel limits exceeded")
    for i in range(n):
        ma[4 * i] = mats[i][0]
        ma[4 * i + 1] = mats[i][1]
        ma[4 * i + 2] = mats[i][2]
        ma[4 * i + 3] = mats[i][3]
        tr[2 * i] = trans[i][0]
        tr[2 * i + 1] = trans[i][1]
        cp[i] = cump[i]
    out = <double*>malloc(2 * count * sizeof(double))
    if out == NULL:
        raise MemoryError()
    try:
        with nogil:
            for step in range(total):
                state = state + 0x9E3779B97F4B7C15ULL
                z = state
                z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
                z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
                z = z ^ (z >> 31)
                u = <double>(z >> 11) * U53
                sel = 0
                while sel < n - 1 and u >= cp[sel]:
                    sel += 1
                nx0 = ma[4 * sel] * x0 + ma[4 * sel + 1] * x1 + tr[2 * sel]
                nx1 = ma[4 * sel + 2] * x0 + ma[4 * sel + 3] * x1 \
                    + tr[2 * sel + 1]
                x0 = nx0
                x1 = nx1
                if step >= burn_in:
                    out[2 * (step - burn_in)] = x0
                    out[2 * (step - burn_in) + 1] = x1
        result = _host_array("d")
        result.frombytes((<char*>out)[:2 * count * sizeof(double)])
        return result
    finally:
        free(out)
