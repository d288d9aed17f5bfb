"""Deterministic enumeration over words of matrix products: generic folds,
branch-and-bound minimum-norm search, and the impurity-resistance checker.

Execution contract: for depths above the prefix length the word tree is
always partitioned into fixed-length prefixes whose partial accumulators are
combined along a fixed pairwise merge tree.  Worker counts only change which
thread computes a partial, never the result, so folds are bit-identical
across 1, 2, or 8 workers and across the two kernel backends.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import backends
from .systems import MatrixSystem

__all__ = [
    "FoldSpec",
    "fold_words",
    "min_norm",
    "MinNormResult",
    "resistance_check",
    "ResistanceReport",
    "BudgetExceededError",
    "default_budget",
    "default_workers",
]

MAX_DEPTH = 30
DEFAULT_BUDGET = 1 << 26
PREFIX_LEN = 8
_MAX_PARTIALS = 1 << 16
_NEG_INF = float("-inf")

_FOLD_KINDS = {
    "pressure_r": backends.pure.KIND_PRESSURE_R,
    "pressure_s": backends.pure.KIND_PRESSURE_S,
    "norm_moment": backends.pure.KIND_NORM_MOMENT,
}
_SURROGATE_KINDS = {
    ("r", "sigma2"): backends.pure.KIND_SURR_R_SIGMA2,
    ("r", "det"): backends.pure.KIND_SURR_R_DET,
    ("r", "diag0"): backends.pure.KIND_SURR_R_DIAG0,
    ("r", "diag1"): backends.pure.KIND_SURR_R_DIAG1,
    ("s", "sigma2"): backends.pure.KIND_SURR_S_SIGMA2,
    ("s", "det"): backends.pure.KIND_SURR_S_DET,
    ("s", "diag0"): backends.pure.KIND_SURR_S_DIAG0,
    ("s", "diag1"): backends.pure.KIND_SURR_S_DIAG1,
}


class BudgetExceededError(RuntimeError):
    """Raised instead of silently enumerating more words than allowed."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"enumeration needs {required} words but the budget is {budget}; "
            f"raise the budget (FDL_BUDGET or the budget argument) to proceed"
        )
        self.required = required
        self.budget = budget


def default_budget() -> int:
    """Word budget: FDL_BUDGET when set, otherwise 2^26."""
    env = os.environ.get("FDL_BUDGET", "").strip()
    if env:
        value = int(env)
        if value < 1:
            raise ValueError("FDL_BUDGET must be a positive integer")
        return value
    return DEFAULT_BUDGET


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class FoldSpec:
    """Configuration of a per-word statistic folded over all words.

    kind:
      count       number of words (no traversal needed)
      norm_moment log sum of ||word||^(s(1-q)) * prod p_i^q
      pressure_r  log sum of phi^s(word)^(1-q) * prod p_i^q
      pressure_s  log sum of phi^s(word)
      surrogate_r / surrogate_s
                  as pressure_r / pressure_s with phi^s replaced by the
                  named supermultiplicative minorant ('sigma2', 'det',
                  'diag0', 'diag1')

    Log-domain kinds accumulate per word in log space and merge partial
    (max, sum-of-exp) pairs; merging is associative and commutative in exact
    arithmetic and its execution order is fixed, so results are bit-stable.
    """

    kind: str
    s: float | None = None
    q: float | None = None
    probs: tuple[float, ...] | None = None
    minorant: str = "sigma2"

    def identity(self):
        """Identity element of the merge: an empty log-sum partial."""
        return (_NEG_INF, 0.0)

    @staticmethod
    def merge(p1, p2):
        """Combine two (max, sum-of-exp) partials."""
        return _merge_lse(p1, p2)


def _merge_lse(p1, p2):
    m1, a1 = p1
    m2, a2 = p2
    if a1 == 0.0:
        return p2
    if a2 == 0.0:
        return p1
    if m1 == m2:
        return (m1, a1 + a2)
    if m1 > m2:
        return (m1, a1 + a2 * math.exp(m2 - m1))
    return (m2, a2 + a1 * math.exp(m1 - m2))


def _merge_tree(parts):
    while len(parts) > 1:
        nxt = []
        for i in range(0, len(parts) - 1, 2):
            nxt.append(_merge_lse(parts[i], parts[i + 1]))
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _prefix_len_for(n_maps: int, depth: int) -> int:
    """Fixed partition rule; independent of worker count by design."""
    if depth <= PREFIX_LEN:
        return 0
    p = PREFIX_LEN
    while n_maps ** p > _MAX_PARTIALS:
        p -= 1
    return p


def _chunk_ranges(total: int, workers: int):
    workers = min(workers, total)
    return [(i * total // workers, (i + 1) * total // workers)
            for i in range(workers)]


def _check_depth_budget(system: MatrixSystem, depth: int, budget: int | None,
                        max_depth: int) -> int:
    if not 1 <= depth <= max_depth:
        raise ValueError(f"depth must lie in 1..{max_depth}")
    budget = default_budget() if budget is None else budget
    required = len(system) ** depth
    if required > budget:
        raise BudgetExceededError(required, budget)
    return budget


def _kernel_inputs(system: MatrixSystem, spec: FoldSpec):
    mats = system.flat2()
    n = len(system)
    if spec.kind in ("pressure_r", "norm_moment") or \
            (spec.kind == "surrogate_r"):
        if spec.q is None or spec.q <= 1.0:
            raise ValueError("q > 1 is required for weighted pressure folds")
        if spec.q > 64.0:
            raise ValueError("q above 64 is not accepted")
        if spec.probs is None or len(spec.probs) != n:
            raise ValueError("need one probability per map")
        qlp = [spec.q * math.log(w) for w in spec.probs]
        omq = 1.0 - spec.q
    else:
        qlp = [0.0] * n
        omq = 0.0
    if spec.s is None or spec.s <= 0.0:
        raise ValueError("s > 0 is required")
    ldets = [math.log(abs(m[0] * m[3] - m[1] * m[2])) for m in mats]
    return mats, qlp, ldets, omq


def _resolve_kind(spec: FoldSpec) -> int:
    if spec.kind in _FOLD_KINDS:
        return _FOLD_KINDS[spec.kind]
    if spec.kind == "surrogate_r":
        return _SURROGATE_KINDS[("r", spec.minorant)]
    if spec.kind == "surrogate_s":
        return _SURROGATE_KINDS[("s", spec.minorant)]
    raise ValueError(f"unknown fold kind {spec.kind!r}")


def fold_words(system: MatrixSystem, depth: int, spec: FoldSpec, *,
               workers: int | None = None, budget: int | None = None,
               max_depth: int = MAX_DEPTH, backend=None):
    """Fold spec over all len(system)^depth words of the given depth.

    Returns the log-domain accumulator for log-sum kinds, the exact count
    for 'count'.  Words are visited depth-first in lexicographic order with
    the running product maintained incrementally; the result is independent
    of the worker count.
    """
    if spec.kind == "count":
        _check_depth_budget(system, depth, budget, max_depth)
        return len(system) ** depth
    if system.dim != 2:
        raise ValueError("word folds are implemented for dimension 2")
    _check_depth_budget(system, depth, budget, max_depth)
    if spec.kind.startswith("surrogate") and spec.minorant.startswith("diag"):
        if not system.nonnegative:
            raise ValueError("diagonal-entry minorants need nonnegative maps")
        if spec.s > 2.0:
            raise ValueError("diagonal-entry minorants are valid for s <= 2")

    kern = backends.get_backend(None) if backend is None else backend
    mats, qlp, ldets, omq = _kernel_inputs(system, spec)
    kind = _resolve_kind(spec)
    n = len(system)
    plen = _prefix_len_for(n, depth)
    total = n ** plen
    workers = default_workers() if workers is None else max(1, workers)

    def run(rng):
        lo, hi = rng
        return kern.fold_partials(mats, qlp, ldets, depth, plen, lo, hi,
                                  kind, float(spec.s), omq)

    ranges = _chunk_ranges(total, workers)
    if len(ranges) <= 1:
        chunks = [run(ranges[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as ex:
            chunks = list(ex.map(run, ranges))
    parts = [p for chunk in chunks for p in chunk]
    vmax, acc = _merge_tree(parts)
    if acc == 0.0:
        return _NEG_INF
    return vmax + math.log(acc)


@dataclass(frozen=True)
class MinNormResult:
    value: float
    log_value: float
    witness: tuple[int, ...]  # 1-based letters


def min_norm(system: MatrixSystem, depth: int, initial_bound=None, *,
             prune: bool = True, workers: int | None = None,
             budget: int | None = None, max_depth: int = MAX_DEPTH,
             backend=None) -> MinNormResult:
    """Exact minimum of ||A_{i_1} ... A_{i_n}|| over words of length n.

    Branch and bound: a prefix P with m letters remaining is skipped when
    neither ||P|| * (min_i sigma_min(A_i))^m nor
    sqrt(|det P|) * (min_i sqrt|det A_i|)^m can undercut the incumbent
    (both are valid lower bounds for every completion of P).  initial_bound,
    when given, must be a value achieved by some known word of this depth,
    e.g. the squared best of half the depth.
    """
    if system.dim != 2:
        raise ValueError("min_norm is implemented for dimension 2")
    _check_depth_budget(system, depth, budget, max_depth)
    kern = backends.get_backend(None) if backend is None else backend
    mats = system.flat2()
    ldets = [math.log(abs(m[0] * m[3] - m[1] * m[2])) for m in mats]
    n = len(system)
    s2min_log = math.log(min(system.min_singular))
    hdet_min_log = 0.5 * min(ldets)
    plen = _prefix_len_for(n, depth)
    total = n ** plen
    workers = default_workers() if workers is None else max(1, workers)

    best0 = math.inf if initial_bound is None else math.log(initial_bound)
    # tiny slack so a word that exactly achieves the seed is still reported
    if initial_bound is not None:
        best0 = math.nextafter(best0, math.inf)

    ranges = _chunk_ranges(total, workers)

    def run(rng, start_best):
        lo, hi = rng
        return kern.min_norm_range(mats, ldets, depth, plen, lo, hi,
                                   start_best, prune, s2min_log,
                                   hdet_min_log)

    results = []
    if len(ranges) <= 1 or workers <= 1:
        best = best0
        for rng in ranges:
            b, w = run(rng, best)
            results.append((b, w))
            if b < best:
                best = b
    else:
        # parallel chunks share only the initial bound; staleness costs
        # pruning work, never correctness
        with ThreadPoolExecutor(max_workers=len(ranges)) as ex:
            results = list(ex.map(lambda r: run(r, best0), ranges))

    best = best0
    witness = None
    for b, w in results:
        if w is not None and b < best:
            best = b
            witness = w
    if witness is None:
        raise RuntimeError(
            "no word matched the search; the initial bound was below the "
            "true minimum"
        )
    return MinNormResult(
        value=math.exp(best),
        log_value=best,
        witness=tuple(i + 1 for i in witness),
    )


@dataclass(frozen=True)
class ResistanceEntry:
    depth: int
    admissible: int          # words with at most floor(eps*n) second letters
    min_normalized: float    # min ||word|| / lam^n over admissible words
    passes: bool             # min_normalized >= c
    argmin: tuple[int, ...]  # 1-based letters


@dataclass(frozen=True)
class ResistanceReport:
    """Finite-horizon check of (c, eps, lam)-resistance for a pair."""

    c: float
    eps: float
    lam: float
    entries: tuple[ResistanceEntry, ...]

    @property
    def all_pass(self) -> bool:
        return all(e.passes for e in self.entries)


def _admissible_count(n: int, kmax: int) -> int:
    return sum(math.comb(n, j) for j in range(kmax + 1))


def resistance_check(pair: MatrixSystem, c: float, eps: float, lam: float,
                     n_max: int, *, budget: int | None = None
                     ) -> ResistanceReport:
    """Per-depth minima over impurity-constrained words.

    For each n <= n_max enumerates only the words with at most floor(eps*n)
    letters equal to 2 and reports min ||word|| / lam^n together with the
    verdict against c.  The budget counts admissible words only.
    """
    if len(pair) != 2 or pair.dim != 2:
        raise ValueError("resistance is defined for pairs of 2x2 maps")
    if c <= 0.0 or lam <= 1.0 or not 0.0 < eps < 1.0:
        raise ValueError("need c > 0, eps in (0, 1), lam > 1")
    if n_max < 1 or n_max > MAX_DEPTH:
        raise ValueError(f"n_max must lie in 1..{MAX_DEPTH}")
    budget = default_budget() if budget is None else budget
    required = sum(_admissible_count(n, int(eps * n)) for n in range(1, n_max + 1))
    if required > budget:
        raise BudgetExceededError(required, budget)

    m0, m1 = pair.flat2()
    log_lam = math.log(lam)
    entries = []
    for n in range(1, n_max + 1):
        kmax = int(eps * n)
        best = math.inf
        arg = None
        # DFS over words with a cap on the number of second letters
        stack = [((1.0, 0.0, 0.0, 1.0), 0.0, 0, kmax, ())]
        while stack:
            prod, lsc, done, twos_left, letters = stack.pop()
            if done == n:
                v = backends.pure._log_norm2(*prod) + lsc
                if v < best:
                    best = v
                    arg = letters
                continue
            # push letter 2 first so letter 1 is explored first (LIFO)
            if twos_left > 0:
                p2, d2 = _mul_scaled(prod, m1)
                stack.append((p2, lsc + d2, done + 1, twos_left - 1,
                              letters + (2,)))
            p1, d1 = _mul_scaled(prod, m0)
            stack.append((p1, lsc + d1, done + 1, twos_left, letters + (1,)))
        norm_ratio = math.exp(best - n * log_lam)
        entries.append(ResistanceEntry(
            depth=n,
            admissible=_admissible_count(n, kmax),
            min_normalized=norm_ratio,
            passes=norm_ratio >= c,
            argmin=arg,
        ))
    return ResistanceReport(c=c, eps=eps, lam=lam, entries=tuple(entries))


def _mul_scaled(p, m):
    """2x2 product with the shared renormalization rule; returns (entries, dlog)."""
    x0 = p[0] * m[0] + p[1] * m[2]
    x1 = p[0] * m[1] + p[1] * m[3]
    x2 = p[2] * m[0] + p[3] * m[2]
    x3 = p[2] * m[1] + p[3] * m[3]
    am = max(abs(x0), abs(x1), abs(x2), abs(x3))
    if 0.0 < am < 1e-60:
        sc = 2.0 ** 200
        return (x0 * sc, x1 * sc, x2 * sc, x3 * sc), -200.0 * math.log(2.0)
    if am > 1e60:
        sc = 2.0 ** -200
        return (x0 * sc, x1 * sc, x2 * sc, x3 * sc), 200.0 * math.log(2.0)
    return (x0, x1, x2, x3), 0.0
