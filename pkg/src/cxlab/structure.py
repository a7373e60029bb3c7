"""Structural predicates on tree functions and the special-form constructor.

A function is superadditive when every node dominates the sum over its
children (Definition of the children-sum inequality); "increasing" is
formalized as non-decreasing toward the root along every path.  Both
predicates only visit the support and parents of support: nodes whose
children are all zero satisfy the inequalities trivially.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .trees import (
    EXACT,
    NodeAddress,
    Scalar,
    SparseFn,
    TreeDomain,
    _as_int,
)

FLOAT_REL_TOL = 1e-9


@dataclass(frozen=True)
class ExponentPair:
    """An exponent p > 1 together with its Holder conjugate q = p/(p-1)."""

    p: Scalar

    def __post_init__(self):
        if self.p <= 1:
            raise ValueError(f"p must exceed 1, got {self.p}")

    @property
    def q(self) -> Scalar:
        p = self.p
        if isinstance(p, (int, Fraction)):
            return Fraction(p) / (Fraction(p) - 1)
        return p / (p - 1.0)


def _tol_for(g: SparseFn, scale: Scalar) -> Scalar:
    if g.mode == EXACT:
        return 0
    return FLOAT_REL_TOL * max(1.0, abs(float(scale)))


def is_superadditive(g: SparseFn, d: TreeDomain) -> tuple[bool, Optional[NodeAddress]]:
    """Check g(beta) >= sum over children of g; returns a witness on failure.

    Only parents of support nodes can violate the inequality, so one pass
    over the support suffices.
    """
    if g.kind != "tree":
        raise ValueError("is_superadditive expects a tree function")
    parents: set[NodeAddress] = set()
    for node in g.support():
        d.require(node)
        if node.depth > 0:
            parents.add(node.parent())
    for beta in sorted(parents, key=lambda n: (n.depth, n.path)):
        child_sum = g.get(beta.child(0)) + g.get(beta.child(1))
        if g.get(beta) < child_sum - _tol_for(g, child_sum):
            return False, beta
    return True, None


def is_increasing(g: SparseFn, d: TreeDomain) -> tuple[bool, Optional[NodeAddress]]:
    """Check g is non-decreasing toward the root; witness is the offending child."""
    if g.kind != "tree":
        raise ValueError("is_increasing expects a tree function")
    for node in sorted(g.support(), key=lambda n: (n.depth, n.path)):
        d.require(node)
        if node.depth == 0:
            continue
        v = g.get(node)
        if g.get(node.parent()) < v - _tol_for(g, v):
            return False, node
    return True, None


def special_form_g(m: SparseFn, beta: NodeAddress, pq: ExponentPair) -> SparseFn:
    """The special-form function g(gamma) = sum_{beta' >= beta} m(gamma x beta')^(q-1).

    m is a bi-tree function read as rectangle values; feeding it the
    rectangle-mass function of an atomic measure reproduces the measure
    construction whose power g^(p-1) is superadditive by Minkowski.
    """
    if m.kind != "bitree":
        raise ValueError("special_form_g expects a bi-tree function m")
    e = pq.q - 1
    e_int = _as_int(e)
    exact_ok = m.mode == EXACT and e_int is not None
    out: dict[NodeAddress, Scalar] = {}
    beta_path = beta.path
    for node, v in m.items():
        if beta_path.startswith(node.y.path):  # beta' = node.y contains beta
            term = v ** e_int if exact_ok else float(v) ** float(e)
            out[node.x] = out.get(node.x, 0) + term
    return SparseFn.tree(out, EXACT if exact_ok else "float")


def check_power_superadditive(
    g: SparseFn, d: TreeDomain, p: Scalar
) -> tuple[bool, Optional[NodeAddress]]:
    """Apply the superadditivity check to the pointwise power g^(p-1)."""
    if p <= 1:
        raise ValueError(f"p must exceed 1, got {p}")
    return is_superadditive(g.power(p - 1), d)
