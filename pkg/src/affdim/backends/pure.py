"""Pure-Python twin of the compiled kernel core.

Every arithmetic statement mirrors ``_core.pyx`` exactly: same operations,
same order, same renormalization rule.  Both backends therefore produce
bit-identical accumulators, and either can serve as the reference for the
other.  This module is the fallback selected at import time when the
compiled extension is unavailable.
"""

from __future__ import annotations

import math
from array import array

NAME = "pure"

# fold kinds (shared with the compiled core)
KIND_PRESSURE_R = 0   # phi^s(word)^(1-q) * prod p^q
KIND_PRESSURE_S = 1   # phi^s(word)
KIND_SURR_R_SIGMA2 = 2
KIND_SURR_R_DET = 3
KIND_SURR_R_DIAG0 = 4
KIND_SURR_R_DIAG1 = 5
KIND_SURR_S_SIGMA2 = 6
KIND_SURR_S_DET = 7
KIND_SURR_S_DIAG0 = 8
KIND_SURR_S_DIAG1 = 9
KIND_NORM_MOMENT = 10  # ||word||^(s(1-q)) * prod p^q

_NEG_INF = float("-inf")
_LN2 = 0.6931471805599453
_RENORM_LIMIT = 1e-60
_RENORM_SCALE = 2.0 ** 200
_RENORM_LOG = 200.0 * _LN2

# splitmix64 constants
_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4B7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U53 = 1.0 / 9007199254740992.0  # 2^-53


def _leaf_term(e0, e1, e2, e3, lsc, lp, ld, s, omq, kind):
    """Per-word log term from the scaled running product.

    lsc is the log of the scaling already factored out of the entries,
    lp the accumulated q*log(p) weight, ld the exact accumulated
    log|det| of the letters.
    """
    if kind == KIND_SURR_R_DIAG0 or kind == KIND_SURR_S_DIAG0:
        lg = _diag_minorant(e0, lsc, ld, s)
        return omq * lg + lp if kind == KIND_SURR_R_DIAG0 else lg
    if kind == KIND_SURR_R_DIAG1 or kind == KIND_SURR_S_DIAG1:
        lg = _diag_minorant(e3, lsc, ld, s)
        return omq * lg + lp if kind == KIND_SURR_R_DIAG1 else lg
    if kind == KIND_SURR_R_DET:
        return omq * (0.5 * s * ld) + lp
    if kind == KIND_SURR_S_DET:
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
    s1 = 0.5 * (math.sqrt(hi) + math.sqrt(lo))
    ls1 = math.log(s1) + lsc
    ls2 = ld - ls1

    if kind == KIND_PRESSURE_R:
        return omq * _phi_log2(ls1, ls2, ld, s) + lp
    if kind == KIND_PRESSURE_S:
        return _phi_log2(ls1, ls2, ld, s)
    if kind == KIND_SURR_R_SIGMA2:
        return omq * (s * ls2) + lp
    if kind == KIND_SURR_S_SIGMA2:
        return s * ls2
    # KIND_NORM_MOMENT
    return omq * (s * ls1) + lp


def _phi_log2(ls1, ls2, ld, s):
    """log phi^s for dimension 2 from log singular values / log|det|."""
    if s <= 1.0:
        return s * ls1
    if s < 2.0:
        return ls1 + (s - 1.0) * ls2
    return 0.5 * s * ld


def _diag_minorant(entry, lsc, ld, s):
    """Diagonal-entry minorant of phi^s; valid on nonnegative systems, s <= 2."""
    if entry <= 0.0:
        return _NEG_INF
    le = math.log(entry) + lsc
    if s <= 1.0:
        return s * le
    return (2.0 - s) * le + (s - 1.0) * ld


def _prefix_state(mats, qlp, ldets, prefix_len, pidx, n):
    """Left-fold the prefix letters of index pidx (most significant first)."""
    e0, e1, e2, e3 = 1.0, 0.0, 0.0, 1.0
    lsc = 0.0
    lp = 0.0
    ld = 0.0
    shift = n ** prefix_len
    for _ in range(prefix_len):
        shift //= n
        letter = (pidx // shift) % n
        a0, a1, a2, a3 = mats[letter]
        x0 = e0 * a0 + e1 * a2
        x1 = e0 * a1 + e1 * a3
        x2 = e2 * a0 + e3 * a2
        x3 = e2 * a1 + e3 * a3
        am = abs(x0)
        t = abs(x1)
        if t > am:
            am = t
        t = abs(x2)
        if t > am:
            am = t
        t = abs(x3)
        if t > am:
            am = t
        if am < _RENORM_LIMIT and am > 0.0:
            x0 *= _RENORM_SCALE
            x1 *= _RENORM_SCALE
            x2 *= _RENORM_SCALE
            x3 *= _RENORM_SCALE
            lsc -= _RENORM_LOG
        e0, e1, e2, e3 = x0, x1, x2, x3
        lp += qlp[letter]
        ld += ldets[letter]
    return e0, e1, e2, e3, lsc, lp, ld


def fold_partials(mats, qlp, ldets, depth, prefix_len, lo, hi,
                  kind, s, omq):
    """Per-prefix log-sum-exp partials (vmax, acc) over all words of the
    given depth whose prefix index lies in [lo, hi).

    acc is the sum of exp(t - vmax) over the subtree; the subtree is walked
    depth-first in lexicographic letter order with running-max rescaling, so
    the pair is a deterministic function of the prefix alone.
    """
    n = len(mats)
    rem = depth - prefix_len
    out = []
    for pidx in range(lo, hi):
        e0, e1, e2, e3, lsc, lp, ld = _prefix_state(
            mats, qlp, ldets, prefix_len, pidx, n)
        vmax = _NEG_INF
        acc = 0.0
        # DFS stacks, level l holds the product with l suffix letters
        pe0 = [0.0] * (rem + 1)
        pe1 = [0.0] * (rem + 1)
        pe2 = [0.0] * (rem + 1)
        pe3 = [0.0] * (rem + 1)
        plsc = [0.0] * (rem + 1)
        plp = [0.0] * (rem + 1)
        pld = [0.0] * (rem + 1)
        pe0[0], pe1[0], pe2[0], pe3[0] = e0, e1, e2, e3
        plsc[0], plp[0], pld[0] = lsc, lp, ld
        choice = [0] * (rem + 1)
        lvl = 0
        while lvl >= 0:
            if lvl == rem:
                t = _leaf_term(pe0[lvl], pe1[lvl], pe2[lvl], pe3[lvl],
                               plsc[lvl], plp[lvl], pld[lvl], s, omq, kind)
                if t != _NEG_INF:
                    if t > vmax:
                        acc = acc * math.exp(vmax - t) + 1.0
                        vmax = t
                    elif t == vmax:
                        acc += 1.0
                    else:
                        acc += math.exp(t - vmax)
                lvl -= 1
                continue
            c = choice[lvl]
            if c == n:
                choice[lvl] = 0
                lvl -= 1
                continue
            choice[lvl] = c + 1
            a0, a1, a2, a3 = mats[c]
            x0 = pe0[lvl] * a0 + pe1[lvl] * a2
            x1 = pe0[lvl] * a1 + pe1[lvl] * a3
            x2 = pe2[lvl] * a0 + pe3[lvl] * a2
            x3 = pe2[lvl] * a1 + pe3[lvl] * a3
            nlsc = plsc[lvl]
            am = abs(x0)
            t = abs(x1)
            if t > am:
                am = t
            t = abs(x2)
            if t > am:
                am = t
            t = abs(x3)
            if t > am:
                am = t
            if am < _RENORM_LIMIT and am > 0.0:
                x0 *= _RENORM_SCALE
                x1 *= _RENORM_SCALE
                x2 *= _RENORM_SCALE
                x3 *= _RENORM_SCALE
                nlsc -= _RENORM_LOG
            nlp = plp[lvl] + qlp[c]
            nld = pld[lvl] + ldets[c]
            lvl += 1
            pe0[lvl], pe1[lvl], pe2[lvl], pe3[lvl] = x0, x1, x2, x3
            plsc[lvl], plp[lvl], pld[lvl] = nlsc, nlp, nld
            choice[lvl] = 0
        out.append((vmax, acc))
    return out


def min_norm_range(mats, ldets, depth, prefix_len, lo, hi,
                   best_log, prune, s2min_log, hdet_min_log):
    """Branch-and-bound minimum log operator norm over words with prefix
    index in [lo, hi).

    Returns (best_log, witness) where witness is a 0-based letter list or
    None when no word in the range improved on best_log.  A subtree rooted
    at product P with m letters to go is skipped when
    max(log||P|| + m*s2min_log, log sqrt|det P| + m*hdet_min_log) >= best_log:
    neither completing bound can beat the incumbent.
    """
    n = len(mats)
    qlp = [0.0] * n  # unused weight channel
    rem = depth - prefix_len
    witness = None
    for pidx in range(lo, hi):
        e0, e1, e2, e3, lsc, lp, ld = _prefix_state(
            mats, qlp, ldets, prefix_len, pidx, n)
        pe0 = [0.0] * (rem + 1)
        pe1 = [0.0] * (rem + 1)
        pe2 = [0.0] * (rem + 1)
        pe3 = [0.0] * (rem + 1)
        plsc = [0.0] * (rem + 1)
        pld = [0.0] * (rem + 1)
        pe0[0], pe1[0], pe2[0], pe3[0] = e0, e1, e2, e3
        plsc[0], pld[0] = lsc, ld
        choice = [0] * (rem + 1)
        lvl = 0
        while lvl >= 0:
            if lvl == rem:
                ls1 = _log_norm2(pe0[lvl], pe1[lvl], pe2[lvl], pe3[lvl]) \
                    + plsc[lvl]
                if ls1 < best_log:
                    best_log = ls1
                    witness = _decode_prefix(pidx, prefix_len, n) + \
                        [choice[l] - 1 for l in range(rem)]
                lvl -= 1
                continue
            c = choice[lvl]
            if c == 0 and prune:
                # bound checked once, on first entry to the node
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
            a0, a1, a2, a3 = mats[c]
            x0 = pe0[lvl] * a0 + pe1[lvl] * a2
            x1 = pe0[lvl] * a1 + pe1[lvl] * a3
            x2 = pe2[lvl] * a0 + pe3[lvl] * a2
            x3 = pe2[lvl] * a1 + pe3[lvl] * a3
            nlsc = plsc[lvl]
            am = abs(x0)
            t = abs(x1)
            if t > am:
                am = t
            t = abs(x2)
            if t > am:
                am = t
            t = abs(x3)
            if t > am:
                am = t
            if am < _RENORM_LIMIT and am > 0.0:
                x0 *= _RENORM_SCALE
                x1 *= _RENORM_SCALE
                x2 *= _RENORM_SCALE
                x3 *= _RENORM_SCALE
                nlsc -= _RENORM_LOG
            nld = pld[lvl] + ldets[c]
            lvl += 1
            pe0[lvl], pe1[lvl], pe2[lvl], pe3[lvl] = x0, x1, x2, x3
            plsc[lvl], pld[lvl] = nlsc, nld
            choice[lvl] = 0
    return best_log, witness


def _log_norm2(e0, e1, e2, e3):
    m = e0 * e0 + e1 * e1 + e2 * e2 + e3 * e3
    adet = e0 * e3 - e1 * e2
    if adet < 0.0:
        adet = -adet
    p2 = 2.0 * adet
    hi = m + p2
    lo = m - p2
    if lo < 0.0:
        lo = 0.0
    s1 = 0.5 * (math.sqrt(hi) + math.sqrt(lo))
    return math.log(s1)


def _decode_prefix(pidx, prefix_len, n):
    letters = []
    shift = n ** prefix_len
    for _ in range(prefix_len):
        shift //= n
        letters.append((pidx // shift) % n)
    return letters


def chaos_game_d2(mats, trans, cump, seed, burn_in, count):
    """Random-iteration sampler for dimension 2.

    Drives x <- A_i x + v_i with i drawn through the splitmix64 generator:
    the 64-bit state advances by 0x9E3779B97F4B7C15 each step and is mixed by
    two shift-xor-multiply rounds; the top 53 bits select the map through the
    cumulative weights.  Integer arithmetic only, so the stream is bit-exact
    on every platform.
    """
    n = len(mats)
    state = seed & _MASK
    x0 = 0.0
    x1 = 0.0
    out = array("d")
    append = out.append
    total = burn_in + count
    for step in range(total):
        state = (state + _GAMMA) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        z = z ^ (z >> 31)
        u = (z >> 11) * _U53
        i = 0
        while i < n - 1 and u >= cump[i]:
            i += 1
        a0, a1, a2, a3 = mats[i]
        tx, ty = trans[i]
        nx0 = a0 * x0 + a1 * x1 + tx
        nx1 = a2 * x0 + a3 * x1 + ty
        x0 = nx0
        x1 = nx1
        if step >= burn_in:
            append(x0)
            append(x1)
    return out
