import random
from fractions import Fraction

import pytest

from cxlab.trees import NodeAddress, ROOT, SparseFn, TreeDomain
from cxlab.structure import (
    ExponentPair,
    check_power_superadditive,
    is_increasing,
    is_superadditive,
    special_form_g,
)
from cxlab.counterexamples import build_cex_p_less_2_functions, doubling_g_fn
from cxlab.hardy import PointMeasure, rectangle_mass_fn
from cxlab.trees import BiNode
from cxlab import randgen


class TestExponentPair:
    def test_conjugate_identity(self):
        for p in (Fraction(3, 2), 2, 3, 1.5):
            pq = ExponentPair(p)
            assert float((pq.p - 1) * (pq.q - 1)) == pytest.approx(1.0)

    def test_p_must_exceed_one(self):
        with pytest.raises(ValueError):
            ExponentPair(1)


class TestSuperadditive:
    def test_hand_examples(self):
        d = TreeDomain(3)
        g = SparseFn.tree({ROOT: 1, NodeAddress("0"): Fraction(1, 2),
                           NodeAddress("1"): Fraction(1, 2)})
        assert is_superadditive(g, d) == (True, None)
        bad = SparseFn.tree({ROOT: 1, NodeAddress("0"): Fraction(3, 4),
                             NodeAddress("1"): Fraction(1, 2)})
        ok, witness = is_superadditive(bad, d)
        assert not ok and witness == ROOT

    def test_doubling_g_fails_at_root(self):
        # halve-left/keep-right: children sum to 3/2 of the parent everywhere
        N = 5
        g = doubling_g_fn(N)
        ok, witness = is_superadditive(g, TreeDomain(N))
        assert not ok
        assert witness == ROOT

    def test_doubling_g_is_increasing(self):
        N = 6
        assert is_increasing(doubling_g_fn(N), TreeDomain(N)) == (True, None)

    def test_deep_decay_instance_is_superadditive(self):
        d, f, g = build_cex_p_less_2_functions(3)
        assert is_superadditive(g, d) == (True, None)

    def test_random_generators_satisfy_their_predicate(self):
        d = TreeDomain(7)
        rng = random.Random(1)
        for _ in range(50):
            assert is_superadditive(randgen.random_superadditive(rng, d), d)[0]
            assert is_increasing(randgen.random_increasing(rng, d), d)[0]

    def test_increasing_witness(self):
        d = TreeDomain(3)
        g = SparseFn.tree({ROOT: 1, NodeAddress("01"): Fraction(2)})
        ok, witness = is_increasing(g, d)
        assert not ok and witness == NodeAddress("01")


class TestSpecialForm:
    def test_single_atom_exact(self):
        # one atom of mass 1/4 at (x=00, y=11); beta = 11, q - 1 = 1
        m = rectangle_mass_fn(
            PointMeasure.of([(BiNode(NodeAddress("00"), NodeAddress("11")),
                                      Fraction(1, 4))]))
        g = special_form_g(m, NodeAddress("11"), ExponentPair(2))
        # each x-ancestor collects the masses of rectangles with y containing beta
        assert g.get(NodeAddress("00")) == Fraction(3, 4)
        assert g.get(NodeAddress("0")) == Fraction(3, 4)
        assert g.get(ROOT) == Fraction(3, 4)
        assert g.get(NodeAddress("1")) == 0

    def test_minkowski_superadditivity_p2_exact(self):
        d = TreeDomain(6)
        rng = random.Random(21)
        for _ in range(300):
            m = randgen.random_special_form_measure(rng, 6, 6)
            beta = sorted((n.y for n in m.support()), key=str)[0]
            g = special_form_g(m, beta, ExponentPair(2))
            ok, witness = check_power_superadditive(g, d, 2)
            assert ok, f"violated at {witness}"

    def test_minkowski_superadditivity_p3_float(self):
        d = TreeDomain(5)
        rng = random.Random(22)
        pq = ExponentPair(3)
        for _ in range(100):
            m = randgen.random_special_form_measure(rng, 5, 5)
            beta = sorted((n.y for n in m.support()), key=str)[0]
            g = special_form_g(m, beta, pq)
            ok, witness = check_power_superadditive(g, d, 3)
            assert ok, f"violated at {witness}"

    def test_single_path_property(self):
        # with all atoms on one x-path the power inequality is an equality chain
        m = rectangle_mass_fn(PointMeasure.of([
            (BiNode(NodeAddress("000"), NodeAddress("1")), Fraction(1, 2)),
        ]))
        g = special_form_g(m, NodeAddress("1"), ExponentPair(2))
        d = TreeDomain(4)
        ok, _ = is_superadditive(g, d)
        assert ok
        # every node on the path has exactly one supported child
        for n in (ROOT, NodeAddress("0"), NodeAddress("00")):
            assert g.get(n) == g.get(n.child(0)) + g.get(n.child(1))

    def test_rejects_tree_function(self):
        with pytest.raises(ValueError):
            special_form_g(SparseFn.tree({ROOT: 1}), ROOT, ExponentPair(2))
