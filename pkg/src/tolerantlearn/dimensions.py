"""Combinatorial dimensions with shattering certificates.

Computes the tolerant Littlestone dimension, the sequential fat-shattering
dimension and the sequential Pollard pseudo-dimension of explicit finite
classes, each together with a mistake tree certifying the value.  All values
are exact; the computations are exponential in the number of rows, which is
inherent, so the memoized paths are capped at 64 rows (row subsets live in a
single machine-word bitmask).  Larger structured classes use the analytic
certificate constructors in `trees`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classes import HypothesisClass, RealFunctionClass
from .trees import (McNode, MistakeTree, RealNode, WITNESS_EPS,
                    check_mc_tree, check_real_tree)

MEMO_ROW_CAP = 64

# Ldim of the empty class; internal sentinel that keeps the recursion and the
# SOA argmax total.  Never reported.
EMPTY_LDIM = -1


@dataclass
class DimensionReport:
    """A dimension value, its certificate tree and the scale parameters."""

    value: int
    certificate: MistakeTree
    params: dict = field(default_factory=dict)
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.certificate.height != self.value:
            raise ValueError("certificate height must equal the dimension")


def _require_memoizable(num_rows: int, what: str):
    if num_rows > MEMO_ROW_CAP:
        raise ValueError(
            f"{what} uses subset-bitmask memoization and is capped at "
            f"{MEMO_ROW_CAP} rows (got {num_rows}); supply an analytic "
            "certificate instead")


# ---------------------------------------------------------------------------
# tolerant Littlestone dimension
# ---------------------------------------------------------------------------

def _present_labels(H: HypothesisClass, x: int, mask: int):
    return [k for k, m in H.col_masks()[x].items() if m & mask]


def ldim_value(H: HypothesisClass, tau: int, mask: Optional[int] = None) -> int:
    """Ldim_tau of the row subset `mask` (defaults to the whole class).

    Returns EMPTY_LDIM (-1) for the empty subset.  The recursion takes, over
    all instances x and label pairs with gap > tau whose restrictions are
    both nonempty, the best 1 + min of the two restricted values.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    _require_memoizable(H.num_rows, "ldim")
    if mask is None:
        mask = H.full_mask
    if mask == 0:
        return EMPTY_LDIM
    cache = H._ldim_cache
    key = (tau, mask)
    hit = cache.get(key)
    if hit is not None:
        return hit
    col_masks = H.col_masks()
    best = 0
    for x in range(H.domain_size):
        labels = sorted(_present_labels(H, x, mask))
        for i, k in enumerate(labels):
            for kp in labels[i + 1:]:
                if kp - k <= tau:
                    continue
                lo = ldim_value(H, tau, mask & col_masks[x][k])
                hi = ldim_value(H, tau, mask & col_masks[x][kp])
                cand = 1 + min(lo, hi)
                if cand > best:
                    best = cand
    cache[key] = best
    return best


def _build_ldim_cert(H: HypothesisClass, tau: int, mask: int, height: int):
    """First (x, k < k') in lexicographic order supporting the given height."""
    if height == 0:
        return None
    col_masks = H.col_masks()
    for x in range(H.domain_size):
        labels = sorted(_present_labels(H, x, mask))
        for i, k in enumerate(labels):
            for kp in labels[i + 1:]:
                if kp - k <= tau:
                    continue
                m_lo = mask & col_masks[x][k]
                m_hi = mask & col_masks[x][kp]
                if (ldim_value(H, tau, m_lo) >= height - 1
                        and ldim_value(H, tau, m_hi) >= height - 1):
                    return McNode(x, k, kp,
                                  _build_ldim_cert(H, tau, m_lo, height - 1),
                                  _build_ldim_cert(H, tau, m_hi, height - 1))
    raise AssertionError("no branching supports the computed dimension")


def ldim_tau(H: HypothesisClass, tau: int) -> DimensionReport:
    """Exact Ldim_tau with a certificate tree attached."""
    value = ldim_value(H, tau)
    root = _build_ldim_cert(H, tau, H.full_mask, value)
    tree = MistakeTree("multiclass", root, value)
    return DimensionReport(value, tree, params={"tau": tau})


def ldim_brute_force(H: HypothesisClass, tau: int, depth_cap: int) -> int:
    """Independent oracle: search candidate mistake trees from the definition.

    Enumerates trees top-down, keeping the set of hypotheses realizing the
    current path and demanding both leaf-extended paths stay realizable.  No
    memoization, no reuse of the recursion above.  Returns
    min(true Ldim_tau, depth_cap).
    """
    if tau < 0 or depth_cap < 0:
        raise ValueError("tau and depth_cap must be >= 0")
    table = H.table

    def exists(rows, depth):
        if depth == 0:
            return True
        for x in range(H.domain_size):
            col = [int(table[r, x]) for r in rows]
            labels = sorted(set(col))
            for i, k in enumerate(labels):
                for kp in labels[i + 1:]:
                    if kp - k <= tau:
                        continue
                    side_k = tuple(r for r, v in zip(rows, col) if v == k)
                    side_kp = tuple(r for r, v in zip(rows, col) if v == kp)
                    if exists(side_k, depth - 1) and exists(side_kp, depth - 1):
                        return True
        return False

    all_rows = tuple(range(H.num_rows))
    d = 0
    while d < depth_cap and exists(all_rows, d + 1):
        d += 1
    return d


# ---------------------------------------------------------------------------
# sequential fat-shattering dimension
# ---------------------------------------------------------------------------

def _fat_candidates(F: RealFunctionClass, gamma: float):
    """Per-column witness grid and the induced below/above row bitmasks.

    Candidates are the breakpoints {v - gamma/2, v + gamma/2} over the
    column's values; the row partition is piecewise constant between
    breakpoints, so this grid loses nothing.  Candidates whose two sides are
    not both inhabited are dropped outright.
    """
    half = gamma / 2.0
    grids = []
    for x in range(F.domain_size):
        vals = F.table[:, x]
        cands = sorted({float(v) - half for v in vals}
                       | {float(v) + half for v in vals})
        entries = []
        for s in cands:
            below = 0
            above = 0
            for r in range(F.num_rows):
                v = float(vals[r])
                if v <= s - half + WITNESS_EPS:
                    below |= 1 << r
                if v >= s + half - WITNESS_EPS:
                    above |= 1 << r
            if below and above:
                entries.append((s, below, above))
        grids.append(entries)
    return grids


def fat_gamma(F: RealFunctionClass, gamma: float) -> DimensionReport:
    """Exact sequential fat-shattering dimension at scale gamma."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    _require_memoizable(F.num_rows, "fat_gamma")
    grids = _fat_candidates(F, gamma)
    memo = {}

    def value(mask: int) -> int:
        if mask == 0:
            return EMPTY_LDIM
        hit = memo.get(mask)
        if hit is not None:
            return hit
        best = 0
        for x in range(F.domain_size):
            for _, below, above in grids[x]:
                lo = mask & below
                hi = mask & above
                if lo and hi:
                    cand = 1 + min(value(lo), value(hi))
                    if cand > best:
                        best = cand
        memo[mask] = best
        return best

    def build(mask: int, height: int):
        if height == 0:
            return None
        for x in range(F.domain_size):
            for s, below, above in grids[x]:
                lo = mask & below
                hi = mask & above
                if lo and hi and value(lo) >= height - 1 and value(hi) >= height - 1:
                    return RealNode(x, s, build(lo, height - 1),
                                    build(hi, height - 1))
        raise AssertionError("no witness supports the computed dimension")

    full = (1 << F.num_rows) - 1
    d = value(full)
    tree = MistakeTree("real", build(full, d), d)
    return DimensionReport(d, tree, params={"gamma": gamma})


# ---------------------------------------------------------------------------
# sequential Pollard pseudo-dimension
# ---------------------------------------------------------------------------

def _sign_witness_grid(F: RealFunctionClass):
    """Distinct column values plus one value strictly between each pair."""
    grids = []
    for x in range(F.domain_size):
        vals = sorted({float(v) for v in F.table[:, x]})
        grid = list(vals)
        for a, b in zip(vals, vals[1:]):
            mid = (a + b) / 2.0
            if a < mid < b:
                grid.append(mid)
        grids.append(sorted(grid))
    return grids


def pdim(F: RealFunctionClass) -> DimensionReport:
    """Pollard pseudo-dimension: Ldim of the sign class f -> sign(f(x) - s).

    sign(0) = +1.  Witnesses range over the per-column value grid, which
    realizes every sign pattern the class can produce.
    """
    _require_memoizable(F.num_rows, "pdim")
    grids = _sign_witness_grid(F)
    columns = [(x, s) for x in range(F.domain_size) for s in grids[x]]
    binary = np.empty((F.num_rows, len(columns)), dtype=np.int64)
    for j, (x, s) in enumerate(columns):
        binary[:, j] = np.where(F.table[:, x] >= s, 2, 1)
    Hb = HypothesisClass(2, binary)
    value = ldim_value(Hb, 0)
    mc_root = _build_ldim_cert(Hb, 0, Hb.full_mask, value)

    def translate(node):
        if node is None:
            return None
        x, s = columns[node.x]
        # label 1 = sign -1 (f < s) on the left, label 2 = sign +1 on the right
        return RealNode(x, s, translate(node.left), translate(node.right))

    tree = MistakeTree("real", translate(mc_root), value)
    return DimensionReport(value, tree, params={},
                           context={"sign_class": Hb, "columns": columns})


def check_sign_tree(F: RealFunctionClass, tree: MistakeTree):
    """Shattering checker for pdim certificates: f < s left, f >= s right."""
    if tree.kind != "real":
        return False, "not a real-valued tree"
    if tree.root is None:
        return True, "empty tree"

    def walk(node, rows: np.ndarray):
        col = F.table[rows, node.x]
        below = rows[col < node.witness]
        above = rows[col >= node.witness]
        for sub, child, side in ((below, node.left, -1), (above, node.right, +1)):
            if child is None:
                if sub.size == 0:
                    return f"path ending with ({node.x}, {side:+d}) unrealized"
            else:
                err = walk(child, sub)
                if err:
                    return err
        return None

    err = walk(tree.root, np.arange(F.num_rows))
    return (err is None), (err or "ok")


def verify_report(report: DimensionReport,
                  cls, *, kind: str) -> tuple:
    """Re-check a report's certificate against the definitional checkers."""
    if kind == "ldim":
        return check_mc_tree(cls, report.certificate, report.params["tau"])
    if kind == "fat":
        return check_real_tree(cls, report.certificate, report.params["gamma"])
    if kind == "pdim":
        return check_sign_tree(cls, report.certificate)
    raise ValueError(f"unknown report kind {kind!r}")


# ---------------------------------------------------------------------------
# tower / iterated-logarithm utilities
# ---------------------------------------------------------------------------

MAX_EXPONENT = 1023.0  # twr saturates once the next exponent exceeds 2^1023


def log_star(x: float) -> int:
    """Number of base-2 log applications taking x down to at most 1."""
    count = 0
    v = float(x)
    while v > 1.0:
        v = math.log2(v)
        count += 1
    return count


def twr(t: int, x: float):
    """Height-t tower 2^2^...^x.  Returns (value, saturated).

    Saturates (value = inf) as soon as an exponent exceeds 2^1023, the last
    tower stage representable as a double.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    v = float(x)
    for _ in range(t):
        if v > MAX_EXPONENT:
            return math.inf, True
        v = 2.0 ** v
    return v, False
