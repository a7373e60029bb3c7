"""Exact generators for the single-tree counterexamples, plus a randomized
search for further witnesses.

The large-N constructions are never materialized: their sums collapse to
per-level aggregates (binomial counts over the number of zero bits in a
path), evaluated exactly in rational arithmetic for integer exponents.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

from .trees import (
    EXACT,
    FLOAT,
    NodeAddress,
    ResourceError,
    Scalar,
    SparseFn,
    TreeDomain,
    _as_int,
)
from .hardy import hardy_up_table
from .lemmas import LemmaReport, verify_new23

_MAX_CEX_K = 8          # support of the p<2 instance grows like 2^(2k)
_MAX_SEARCH_DEPTH = 14
_MATERIALIZE_LEVELS = 12


@dataclass
class CexInstance:
    """A generated counterexample instance; f and g are materialized only
    when the tree is small enough to hold in memory."""

    name: str
    domain: TreeDomain
    params: dict
    f: Optional[SparseFn] = None
    g: Optional[SparseFn] = None


def _pow(v, e):
    ei = _as_int(e)
    if ei is not None and not isinstance(v, float):
        return v ** ei
    return float(v) ** float(e)


def _half_pow(i: int) -> Fraction:
    return Fraction(1, 2 ** i)


# ---------------------------------------------------------------------------
# The p < 2 counterexample: diagonal decay then single-path propagation.
# ---------------------------------------------------------------------------

def build_cex_p_less_2_functions(k: int) -> tuple[TreeDomain, SparseFn, SparseFn]:
    """g = 2^-i on all of generation i <= k, then 2^-k pushed to left children
    only; f = 2^-i on supp g."""
    levels = k + 2 ** k + 1
    d = TreeDomain(levels)
    g_entries: dict[NodeAddress, Fraction] = {}
    f_entries: dict[NodeAddress, Fraction] = {}
    frontier = [""]
    for i in range(k + 1):
        for path in frontier:
            node = NodeAddress(path)
            g_entries[node] = _half_pow(i)
            f_entries[node] = _half_pow(i)
        if i < k:
            frontier = [p + b for p in frontier for b in "01"]
    for path in frontier:  # generation-k nodes, value kept on left children
        for t in range(1, 2 ** k + 1):
            node = NodeAddress(path + "0" * t)
            g_entries[node] = _half_pow(k)
            f_entries[node] = _half_pow(k + t)
    return d, SparseFn.tree(f_entries), SparseFn.tree(g_entries)


def gen_cex_p_less_2(k: int, p: Scalar, seed: Optional[int] = None) -> tuple[CexInstance, LemmaReport]:
    if k < 2:
        raise ValueError("k must be at least 2")
    if not 1 < p < 2:
        raise ValueError("this construction targets 1 < p < 2")
    if k > _MAX_CEX_K:
        raise ResourceError(
            f"support size ~2^{2 * k} = {2 ** (2 * k)} exceeds the budget (k <= {_MAX_CEX_K})")
    d, f, g = build_cex_p_less_2_functions(k)
    table = hardy_up_table(f, g.support())
    sum_ifg_p = sum(_pow(table[n] * v, p) for n, v in g.items())
    sum_fp = sum(_pow(v, p) for _, v in f.items())
    delta = lam = 3
    rhs = _pow(delta, p - 1) * lam * sum_fp
    ig_table = hardy_up_table(g, g.support())
    report = LemmaReport(
        name="cex_p_less_2",
        params={"k": k, "p": p, "delta": delta, "lambda": lam},
        lhs=sum_ifg_p, rhs=rhs, holds=sum_ifg_p <= rhs,
        mode=FLOAT if _as_int(p) is None else EXACT, seed=seed,
        extra={
            "lower_bound": 2.0 ** ((2 - float(p)) * k),
            "sum_fp": sum_fp,
            "max_Ig": max(ig_table.values()),
        },
    )
    inst = CexInstance("cex_p_less_2", d, {"k": k, "p": p}, f=f, g=g)
    return inst, report


# ---------------------------------------------------------------------------
# The increasing-but-subadditive construction: halve left, keep right.
# ---------------------------------------------------------------------------

def doubling_g_fn(N: int) -> SparseFn:
    """The halve-left/keep-right g on all levels 0..N-1: value 2^-(zero bits)."""
    if N > _MATERIALIZE_LEVELS:
        raise ResourceError(f"refusing to materialize 2^{N}-1 nodes")
    entries = {}
    frontier = [""]
    for _ in range(N):
        for path in frontier:
            entries[NodeAddress(path)] = _half_pow(path.count("0"))
        frontier = [p + b for p in frontier for b in "01"]
    return SparseFn.tree(entries)


def leftmost_path_fn(N: int) -> SparseFn:
    """f = 1 on the leftmost root-to-leaf path."""
    return SparseFn.tree({NodeAddress("0" * i): Fraction(1) for i in range(N)})


def sum_gp_levels(N: int, p: Scalar) -> Scalar:
    """Sum over levels 0..N-1 of g^p via the per-level ratio (2^p+1)/2^p.

    Exact for integral p; equals 2^p(r^N - 1) with r the per-level ratio.
    """
    pi = _as_int(p)
    if pi is not None:
        r = Fraction(2 ** pi + 1, 2 ** pi)
        level = Fraction(1)
        total = Fraction(0)
    else:
        r = (2.0 ** float(p) + 1.0) / 2.0 ** float(p)
        level, total = 1.0, 0.0
    for _ in range(N):
        total += level
        level *= r
    return total


def sum_gp_binomial(N: int, p: Scalar) -> Scalar:
    """Independent form of the same sum: level i contributes
    sum_j C(i,j) 2^(-jp) over the number j of zero bits."""
    total = Fraction(0) if _as_int(p) is not None else 0.0
    for i in range(N):
        for j in range(i + 1):
            total += comb(i, j) * _pow(_half_pow(j), p)
    return total


def gen_cex_increasing(N: int, p: Scalar = 2, seed: Optional[int] = None) -> tuple[CexInstance, LemmaReport]:
    """The children-power-sum inequality at the root for the doubling g:
    lhs is the full-tree sum of g^p, rhs = N * g^(p-1)(root) = N."""
    if N < 1:
        raise ValueError("N must be positive")
    lhs = sum_gp_levels(N, p)
    lam = N
    rhs = lam  # g(root) = 1
    d = TreeDomain(N)
    g = doubling_g_fn(N) if N <= _MATERIALIZE_LEVELS else None
    report = LemmaReport(
        name="cex_increasing",
        params={"N": N, "p": p, "lambda": lam, "gamma": ""},
        lhs=lhs, rhs=rhs, holds=lhs <= rhs,
        witness=None if lhs <= rhs else NodeAddress(""),
        mode=EXACT if _as_int(p) is not None else FLOAT, seed=seed,
        extra={"closed_form_check": sum_gp_levels(N, p)},
    )
    inst = CexInstance("cex_increasing", d, {"N": N, "p": p}, g=g)
    return inst, report


def sum_ifg_p_direct(N: int, p: Scalar) -> Scalar:
    """Full-tree sum of (If g)^p for f = 1 on the leftmost path and the
    doubling g, aggregated over (level, leading-zero count).

    A node at level i with leading-zero count a < i contributes
    (a+1)^p 2^(-ap) (1 + 2^-p)^(i-a-1) in total over its zero-bit counts;
    the all-zero node contributes (i+1)^p 2^(-ip).
    """
    exact = _as_int(p) is not None
    total = Fraction(0) if exact else 0.0
    one_plus = Fraction(2 ** _as_int(p) + 1, 2 ** _as_int(p)) if exact \
        else 1.0 + 2.0 ** -float(p)
    for i in range(N):
        total += _pow(i + 1, p) * _pow(_half_pow(i), p)
        inner = Fraction(1) if exact else 1.0
        for a in range(i - 1, -1, -1):
            # inner = (1 + 2^-p)^(i-a-1), built from the deepest a upward
            total += _pow(a + 1, p) * _pow(_half_pow(a), p) * inner
            inner *= one_plus
    return total


def gen_cex_direct(N: int, p: Scalar = 2, seed: Optional[int] = None) -> tuple[CexInstance, LemmaReport]:
    """The direct violation with f = 1 on the leftmost path: compares the
    full-tree sum of (If g)^p with delta^(p-1) lambda sum f^p, delta = 2."""
    if N < 2:
        raise ValueError("N must be at least 2")
    lhs = sum_ifg_p_direct(N, p)
    delta, lam, sum_fp = 2, N, N
    rhs = _pow(delta, p - 1) * lam * sum_fp
    d = TreeDomain(N)
    small = N <= _MATERIALIZE_LEVELS
    report = LemmaReport(
        name="cex_direct",
        params={"N": N, "p": p, "delta": delta, "lambda": lam},
        lhs=lhs, rhs=rhs, holds=lhs <= rhs,
        mode=EXACT if _as_int(p) is not None else FLOAT, seed=seed,
        extra={
            "sum_fp": sum_fp,
            "sum_gp": sum_gp_levels(N, p),
            "delta_measured": 2 - _half_pow(N - 1),
        },
    )
    inst = CexInstance(
        "cex_direct", d, {"N": N, "p": p},
        f=leftmost_path_fn(N) if small else None,
        g=doubling_g_fn(N) if small else None,
    )
    return inst, report


# ---------------------------------------------------------------------------
# Audit of the p > 2 chain against the power-sum lemma.
# ---------------------------------------------------------------------------

@dataclass
class AuditStep:
    step: str
    lhs: Scalar
    rhs: Scalar
    ok: bool
    note: str = ""

    def to_dict(self) -> dict:
        from .lemmas import scalar_repr
        return {"step": self.step, "lhs": scalar_repr(self.lhs),
                "rhs": scalar_repr(self.rhs), "ok": self.ok, "note": self.note}


@dataclass
class VariantAudit:
    variant: str
    N: int
    p: Scalar
    total_ifp_g: Scalar          # L = sum over the tree of (If)^p g
    sup_iistar: Scalar           # ||II*g||_inf, attained on the boundary
    sum_fp: Scalar               # = N
    lemma_rhs: Scalar            # sup * sum f^p
    lemma_holds: bool
    boundary_argmax_ok: bool
    steps: list[AuditStep] = field(default_factory=list)

    @property
    def first_failed_step(self) -> Optional[str]:
        for s in self.steps:
            if not s.ok:
                return s.step
        return None

    def to_dict(self) -> dict:
        from .lemmas import scalar_repr
        return {
            "variant": self.variant, "N": self.N, "p": scalar_repr(self.p),
            "total_ifp_g": scalar_repr(self.total_ifp_g),
            "sup_iistar": scalar_repr(self.sup_iistar),
            "sum_fp": scalar_repr(self.sum_fp),
            "lemma_rhs": scalar_repr(self.lemma_rhs),
            "lemma_holds": self.lemma_holds,
            "boundary_argmax_ok": self.boundary_argmax_ok,
            "first_failed_step": self.first_failed_step,
            "steps": [s.to_dict() for s in self.steps],
        }


def _audit_variant(variant: str, N: int, p: Scalar) -> VariantAudit:
    exact = _as_int(p) is not None
    pi = _as_int(p)

    # path quantities, k = 1..N (u_1 = root, u_N = the left-most boundary node)
    if variant == "halving":
        g_path = [_half_pow(k) for k in range(1, N + 1)]
        istar = [Fraction(1, 2 ** (k - 1)) - _half_pow(N) for k in range(1, N + 1)]
        # off-path values vanish, so L is the path sum
        L = sum(_pow(k, p) * g_path[k - 1] for k in range(1, N + 1))
    elif variant == "ones":
        g_path = [Fraction(1)] * N
        istar = [Fraction(2 ** (N - k + 1) - 1) for k in range(1, N + 1)]
        # whole-tree sum: 2^(N-1-a) nodes have leading-zero count a
        L = sum(_pow(a + 1, p) * Fraction(2 ** (N - 1 - a)) for a in range(N))
    else:
        raise ValueError(f"unknown variant {variant!r}")

    iistar = []
    acc = Fraction(0)
    for v in istar:
        acc += v
        iistar.append(acc)
    sup = iistar[-1]
    # II* along the path is a running sum of non-negative I* values, so the
    # maximum sits at the boundary node u_N, where g is non-zero.
    boundary_ok = all(iistar[i] <= iistar[i + 1] for i in range(N - 1)) and g_path[-1] > 0

    if not exact:
        def f(x):
            try:
                return float(x)
            except OverflowError:
                return math.inf
        g_path = [f(x) for x in g_path]
        istar = [f(x) for x in istar]
        iistar = [f(x) for x in iistar]
        sup = f(sup)
        L = f(L)

    steps: list[AuditStep] = []

    S1 = sum(_pow(k, p) * g_path[k - 1] for k in range(2, N + 1))
    steps.append(AuditStep("series_lower_bound", L, S1, L >= S1,
                           "L >= sum_{k>=2} k^p g(u_k)"))

    dev = max(abs(g_path[k - 1] - (istar[k - 1] - istar[k - 2])) for k in range(2, N + 1))
    steps.append(AuditStep("g_telescope", dev, 0, dev == 0,
                           "printed identity g(u_k) = I*g(u_k) - I*g(u_{k-1})"))

    S2 = sum(istar[k - 1] * (_pow(k, p) - _pow(k - 1, p)) for k in range(2, N + 1))
    steps.append(AuditStep("abel_1", S1, S2, S1 == S2,
                           "printed Abel summation (equality claim)"))

    const = Fraction(pi, 2 ** (pi - 1)) if exact else float(p) / 2.0 ** (float(p) - 1.0)
    S3 = sum(istar[k - 1] * _pow(k, p - 1) for k in range(2, N + 1))
    steps.append(AuditStep("power_diff_bound", S2, const * S3, S2 >= const * S3,
                           "k^p - (k-1)^p >= (p/2^(p-1)) k^(p-1)"))

    dev2 = max(abs(istar[k - 1] - (iistar[k - 1] - iistar[k - 2])) for k in range(2, N + 1))
    steps.append(AuditStep("istar_telescope", dev2, 0, dev2 == 0,
                           "I*g(u_k) = II*g(u_k) - II*g(u_{k-1})"))

    star = iistar[N - 1] * _pow(N, p - 1) - iistar[0] - sum(
        iistar[k - 1] * (_pow(k + 1, p - 1) - _pow(k, p - 1)) for k in range(1, N))
    steps.append(AuditStep("abel_2_star", S3, star, S3 == star,
                           "the (*) expression"))

    tele = sum(_pow(k + 1, p - 1) - _pow(k, p - 1) for k in range(1, N))
    star_lb = sup * _pow(N, p - 1) - iistar[0] - sup * tele
    steps.append(AuditStep("star_bound", star, star_lb, star >= star_lb,
                           "(*) bounded below via ||II*g||_inf (m taken as 1)"))

    pow_sum = sum(_pow(k, p - 2) for k in range(1, N))
    deriv_rhs = ((pi - 1) if exact else (float(p) - 1.0)) * pow_sum
    steps.append(AuditStep("derivative_bound", tele, deriv_rhs, tele <= deriv_rhs,
                           "printed (k+1)^(p-1) - k^(p-1) <= (p-1) k^(p-2)"))

    integral_rhs = (_pow(N - 1, p - 1) - 1) / ((pi - 1) if exact else (float(p) - 1.0))
    steps.append(AuditStep("integral_bound", pow_sum, integral_rhs,
                           pow_sum <= integral_rhs,
                           "printed sum k^(p-2) <= ((N-1)^(p-1) - 1)/(p-1)"))

    final_rhs = const * sup * (_pow(N, p - 1) - _pow(N - 1, p - 1))
    steps.append(AuditStep("final_claim", L, final_rhs, L >= final_rhs,
                           "the chain's asserted lower bound on L"))

    lemma_rhs = sup * N
    return VariantAudit(
        variant=variant, N=N, p=p,
        total_ifp_g=L, sup_iistar=sup, sum_fp=N, lemma_rhs=lemma_rhs,
        lemma_holds=L <= lemma_rhs, boundary_argmax_ok=boundary_ok,
        steps=steps,
    )


def gen_cex_new23(N: int, p: Scalar, seed: Optional[int] = None) -> dict[str, VariantAudit]:
    """Audit both constructions (half-on-left-path g and g = 1) against the
    power-sum lemma, checking every printed chain step numerically."""
    if N < 3:
        raise ValueError("N must be at least 3")
    if p <= 2:
        raise ValueError("the audited chain targets p > 2")
    return {v: _audit_variant(v, N, p) for v in ("halving", "ones")}


# ---------------------------------------------------------------------------
# Randomized search for power-sum lemma violations.
# ---------------------------------------------------------------------------

def _prefixes(path: str) -> list[str]:
    return [path[:i] for i in range(len(path) + 1)]


def _random_increasing_paths(rng: random.Random, depth: int, cap: int) -> dict[str, float]:
    out: dict[str, float] = {}
    frontier = [("", rng.uniform(0.5, 1.0))]
    while frontier and len(out) < cap:
        path, value = frontier.pop(rng.randrange(len(frontier)))
        out[path] = value
        if len(path) < depth:
            for bit in "01":
                if rng.random() < 0.7:
                    frontier.append((path + bit, value * rng.random()))
    return out


def _random_f_paths(rng: random.Random, depth: int, g_paths: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for _ in range(rng.randint(1, 8)):
        if g_paths and rng.random() < 0.5:
            base = rng.choice(g_paths)
            extra = "".join(rng.choice("01") for _ in range(rng.randint(0, depth - len(base)))) \
                if len(base) < depth else ""
            path = base + extra
        else:
            path = "".join(rng.choice("01") for _ in range(rng.randint(0, depth)))
        out[path] = rng.uniform(0.05, 1.0)
    return out


def _fast_new23_ratio(gv: dict[str, float], fv: dict[str, float], p: float):
    """(lhs, rhs) of the power-sum inequality on plain path dicts."""
    if_memo: dict[str, float] = {"": fv.get("", 0.0)}
    for path in sorted(gv, key=len):
        if path in if_memo:
            continue
        for q in _prefixes(path):
            if q not in if_memo:
                if_memo[q] = if_memo[q[:-1]] + fv.get(q, 0.0)
    lhs = sum(if_memo[path] ** p * val for path, val in gv.items())

    inter = gv.keys() & fv.keys()
    if not inter:
        return lhs, 0.0
    need = {q for b in inter for q in _prefixes(b)}
    istar = dict.fromkeys(need, 0.0)
    for path, val in gv.items():
        for q in _prefixes(path):
            if q in istar:
                istar[q] += val
    sup = max(sum(istar[q] for q in _prefixes(b)) for b in inter)
    rhs = sup * sum(v ** p for v in fv.values())
    return lhs, rhs


def search_new23(p: Scalar, depth: int, budget: int, seed: int) -> LemmaReport:
    """Sample random increasing g and random f; return the instance with the
    largest lhs/rhs, re-evaluated through the full verifier."""
    if p < 1:
        raise ValueError("p must be at least 1")
    if depth > _MAX_SEARCH_DEPTH:
        raise ResourceError(f"search depth capped at {_MAX_SEARCH_DEPTH}")
    if budget < 1:
        raise ValueError("budget must be positive")
    pf = float(p)
    best_ratio, best_trial = -1.0, None
    for trial in range(budget):
        rng = random.Random(f"{seed}:{trial}")
        gv = _random_increasing_paths(rng, depth, cap=12)
        fv = _random_f_paths(rng, depth, list(gv))
        lhs, rhs = _fast_new23_ratio(gv, fv, pf)
        if rhs <= 0.0:
            continue
        ratio = lhs / rhs
        if ratio > best_ratio:
            best_ratio, best_trial = ratio, trial

    if best_trial is None:
        return LemmaReport(
            name="search_new23", params={"p": p, "depth": depth, "budget": budget},
            lhs=0.0, rhs=0.0, holds=True, mode=FLOAT, seed=seed, degenerate=True,
        )
    rng = random.Random(f"{seed}:{best_trial}")
    gv = _random_increasing_paths(rng, depth, cap=12)
    fv = _random_f_paths(rng, depth, list(gv))
    d = TreeDomain(depth + 1)
    g = SparseFn.tree({NodeAddress(k): v for k, v in gv.items()}, FLOAT)
    f = SparseFn.tree({NodeAddress(k): v for k, v in fv.items()}, FLOAT)
    report = verify_new23(f, g, float(p), d, seed=seed)
    report.name = "search_new23"
    report.params.update({"depth": depth, "budget": budget, "best_trial": best_trial,
                          "best_fast_ratio": best_ratio})
    return report
