import random
from fractions import Fraction

import pytest

from cxlab.trees import NodeAddress, ResourceError, SparseFn, TreeDomain
from cxlab.hardy import eval_hardy_down, hardy_up_table
from cxlab.lemmas import verify_new23
from cxlab.counterexamples import (
    build_cex_p_less_2_functions,
    doubling_g_fn,
    gen_cex_direct,
    gen_cex_increasing,
    gen_cex_new23,
    gen_cex_p_less_2,
    leftmost_path_fn,
    search_new23,
    sum_gp_binomial,
    sum_gp_levels,
    sum_ifg_p_direct,
)


class TestClosedForms:
    @pytest.mark.parametrize("p", [2, 3])
    def test_level_recursion_equals_binomial_sum(self, p):
        for N in range(1, 26):
            assert sum_gp_levels(N, p) == sum_gp_binomial(N, p)

    def test_p2_closed_form_identity(self):
        for N in range(1, 26):
            assert sum_gp_levels(N, 2) == 4 * (Fraction(5, 4) ** N - 1)

    @pytest.mark.parametrize("N", [1, 3, 6, 8])
    def test_materialized_sum_gp(self, N):
        g = doubling_g_fn(N)
        assert sum(v * v for _, v in g.items()) == sum_gp_levels(N, 2)

    @pytest.mark.parametrize("N", [2, 4, 7])
    def test_materialized_sum_ifg_p(self, N):
        d = TreeDomain(N)
        g = doubling_g_fn(N)
        f = leftmost_path_fn(N)
        table = hardy_up_table(f, g.support())
        brute = sum((table[n] * v) ** 2 for n, v in g.items())
        assert sum_ifg_p_direct(N, 2) == brute


class TestCexIncreasing:
    def test_n20_report(self):
        _, report = gen_cex_increasing(20, 2)
        assert report.lhs == 4 * (Fraction(5, 4) ** 20 - 1)
        assert report.rhs == 20
        assert not report.holds
        assert report.ratio > 17

    def test_small_n_holds(self):
        _, report = gen_cex_increasing(1, 2)
        assert report.lhs == 1 and report.holds

    def test_large_n_not_materialized(self):
        inst, report = gen_cex_increasing(1000, 2)
        assert inst.g is None
        assert report.lhs == sum_gp_levels(1000, 2)


class TestCexDirect:
    def test_n40_exceeds_nine(self):
        _, report = gen_cex_direct(40, 2)
        assert report.rhs == 2 * 40 * 40
        assert float(report.ratio) > 9
        assert not report.holds

    def test_delta_measured(self):
        _, report = gen_cex_direct(10, 2)
        assert report.extra["delta_measured"] == 2 - Fraction(1, 2 ** 9)

    def test_materialized_delta(self):
        # I g on the leftmost path approaches 2 from below: sum 2^-i
        N = 10
        g = doubling_g_fn(N)
        f = leftmost_path_fn(N)
        table = hardy_up_table(g, f.support())
        assert max(table.values()) == 2 - Fraction(1, 2 ** (N - 1))


class TestCexPLess2:
    def test_support_layout(self):
        k = 3
        d, f, g = build_cex_p_less_2_functions(k)
        assert d.levels == k + 2 ** k + 1
        for i in range(k + 1):
            level = [n for n in g.support() if n.depth == i]
            assert len(level) == 2 ** i
            assert all(g.get(n) == Fraction(1, 2 ** i) for n in level)
        deep = [n for n in g.support() if n.depth > k]
        assert len(deep) == 2 ** k * 2 ** k
        assert all(g.get(n) == Fraction(1, 2 ** k) for n in deep)
        assert set(f.support()) == set(g.support())

    def test_boundary_ig(self):
        k = 4
        d, f, g = build_cex_p_less_2_functions(k)
        table = hardy_up_table(g, g.support())
        assert max(table.values()) == 3 - Fraction(1, 2 ** k)

    def test_lower_bound_exact(self):
        for k in (3, 4, 5):
            _, report = gen_cex_p_less_2(k, 1.5)
            assert float(report.lhs) >= 2.0 ** (0.5 * k)

    def test_resource_budget(self):
        with pytest.raises(ResourceError):
            gen_cex_p_less_2(9, 1.5)

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            gen_cex_p_less_2(3, 2)


class TestNew23Audit:
    def test_path_quantities_match_bruteforce(self):
        N, p = 6, 4
        audits = gen_cex_new23(N, p)

        # halving variant: g = 2^-k on the all-zeros path
        g = SparseFn.tree({NodeAddress("0" * (k - 1)): Fraction(1, 2 ** k)
                           for k in range(1, N + 1)})
        f = leftmost_path_fn(N)
        table = hardy_up_table(f, g.support())
        L = sum(table[n] ** p * v for n, v in g.items())
        assert audits["halving"].total_ifp_g == L
        u_last = NodeAddress("0" * (N - 1))
        brute_sup = sum(eval_hardy_down(g, a) for a in u_last.ancestors())
        assert audits["halving"].sup_iistar == brute_sup
        r = verify_new23(f, g, p, TreeDomain(N))
        assert r.rhs == audits["halving"].lemma_rhs
        assert r.holds == audits["halving"].lemma_holds

    def test_ones_variant_matches_bruteforce(self):
        N, p = 6, 4
        audits = gen_cex_new23(N, p)
        d = TreeDomain(N)
        g = SparseFn.tree({n: 1 for n in d.nodes()})
        f = leftmost_path_fn(N)
        table = hardy_up_table(f, g.support())
        L = sum(table[n] ** p * v for n, v in g.items())
        assert audits["ones"].total_ifp_g == L
        u_last = NodeAddress("0" * (N - 1))
        assert audits["ones"].sup_iistar == sum(
            eval_hardy_down(g, a) for a in u_last.ancestors())

    def test_deterministic_first_failure(self):
        a1 = gen_cex_new23(10, 4)
        a2 = gen_cex_new23(10, 4)
        for variant in ("halving", "ones"):
            assert a1[variant].to_dict() == a2[variant].to_dict()
            assert a1[variant].first_failed_step == "g_telescope"
            assert a1[variant].boundary_argmax_ok

    def test_exact_chain_steps_pass(self):
        # the algebraically exact steps must hold at every size
        for N in (5, 50):
            for audit in gen_cex_new23(N, 4).values():
                by_name = {s.step: s for s in audit.steps}
                for step in ("series_lower_bound", "power_diff_bound",
                             "istar_telescope", "abel_2_star", "star_bound"):
                    assert by_name[step].ok, (audit.variant, step)

    def test_rejects_small_p(self):
        with pytest.raises(ValueError):
            gen_cex_new23(10, 2)


class TestSearchNew23:
    def test_deterministic(self):
        r1 = search_new23(2, 6, 300, seed=5)
        r2 = search_new23(2, 6, 300, seed=5)
        assert r1.to_dict() == r2.to_dict()

    def test_p_at_most_two_never_violates(self):
        for p in (1.5, 2):
            r = search_new23(p, 8, 500, seed=3)
            assert r.holds
            assert r.ratio is None or float(r.ratio) <= 1 + 1e-9

    def test_p4_finds_violation(self):
        r = search_new23(4, 10, 2000, seed=7)
        assert float(r.ratio) > 1

    def test_best_matches_full_verifier(self):
        r = search_new23(4, 8, 500, seed=1)
        assert r.name == "search_new23"
        assert "best_trial" in r.params

    def test_depth_budget(self):
        with pytest.raises(ResourceError):
            search_new23(2, 15, 10, seed=0)
