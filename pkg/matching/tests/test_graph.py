import numpy as np
from django.test import SimpleTestCase

from matching.exceptions import InvalidGraphError
from matching.graph import (
    Matching,
    best_and_second,
    build_graph,
    check_eps_cs,
    density,
    matching_weight,
    reduced_cost,
    validate_matching,
)

from .utils import make_g0, make_single


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class BuildGraphTest(SimpleTestCase):
    def test_single_edge(self):
        graph = make_single()
        self.assertEqual(graph.m, 1)
        self.assertEqual(graph.max_abs_weight, 5)

    def test_g0(self):
        graph = make_g0()
        self.assertEqual(graph.m, 4)
        self.assertEqual(graph.max_abs_weight, 3)
        self.assertTrue(graph.is_balanced)

    def test_adjacency_sorted_by_right_vertex(self):
        graph = build_graph(1, 4, [(0, 3, 7), (0, 0, 1), (0, 2, -4)])
        neighbors, weights = graph.adjacency(0)
        self.assertEqual(neighbors.tolist(), [0, 2, 3])
        self.assertEqual(weights.tolist(), [1, -4, 7])
        self.assertEqual(graph.max_abs_weight, 7)

    def test_duplicate_edge_rejected(self):
        with self.assertRaisesMessage(InvalidGraphError, "Duplicate edge (0, 0)"):
            build_graph(2, 2, [(0, 0, 1), (0, 0, 2)])

    def test_out_of_range_rejected(self):
        with self.assertRaises(InvalidGraphError):
            build_graph(2, 2, [(0, 2, 1)])
        with self.assertRaises(InvalidGraphError):
            build_graph(2, 2, [(-1, 0, 1)])

    def test_empty_sides_rejected(self):
        with self.assertRaises(InvalidGraphError):
            build_graph(0, 1, [])

    def test_empty_neighbourhoods_allowed(self):
        graph = build_graph(3, 2, [(0, 0, 1)])
        self.assertEqual(graph.degree(1), 0)
        self.assertEqual(graph.right_adjacency[1], ([], []))

    def test_arrays_are_read_only(self):
        graph = make_g0()
        with self.assertRaises(ValueError):
            graph.weights[0] = 10

    def test_weight_lookup(self):
        graph = make_g0()
        self.assertEqual(graph.weight(1, 0), 2)
        self.assertFalse(graph.has_edge(0, 5))
        with self.assertRaisesMessage(InvalidGraphError, "not an edge"):
            build_graph(2, 2, [(0, 0, 1)]).weight(1, 1)

    def test_right_adjacency(self):
        graph = make_g0()
        self.assertEqual(graph.right_adjacency[0], ([0, 1], [1, 2]))
        self.assertEqual(graph.right_adjacency[1], ([0, 1], [3, 1]))

    def test_scaled(self):
        scaled = make_g0().scaled(3)
        self.assertEqual(scaled.weights.tolist(), [3, 9, 6, 3])
        self.assertEqual(scaled.max_abs_weight, 9)

    def test_scaled_overflow_rejected(self):
        graph = build_graph(2, 2, [(0, 0, 2**62), (0, 1, 1), (1, 0, 1), (1, 1, 2**62)])
        with self.assertRaisesMessage(InvalidGraphError, "overflows int64"):
            graph.scaled(3)

    def test_int64_minimum_weight(self):
        graph = build_graph(1, 1, [(0, 0, -2**63)])
        self.assertEqual(graph.max_abs_weight, 2**63)
        with self.assertRaises(InvalidGraphError):
            graph.scaled(2)


# ---------------------------------------------------------------------------
# Density, reduced costs, weights
# ---------------------------------------------------------------------------

class DensityTest(SimpleTestCase):
    def test_complete_graph(self):
        self.assertEqual(density(make_g0()), 1)

    def test_single_edge_of_four(self):
        self.assertEqual(float(density(build_graph(2, 2, [(1, 0, 4)]))), 0.25)


class ReducedCostTest(SimpleTestCase):
    def test_examples(self):
        graph = build_graph(1, 1, [(0, 0, 5)])
        self.assertEqual(reduced_cost(graph, np.array([0]), 0, 0), 5)
        self.assertEqual(reduced_cost(graph, np.array([5]), 0, 0), 0)
        other = build_graph(1, 1, [(0, 0, 1)])
        self.assertEqual(reduced_cost(other, np.array([-3]), 0, 0), 4)

    def test_non_edge_rejected(self):
        graph = build_graph(2, 2, [(0, 0, 1)])
        with self.assertRaises(InvalidGraphError):
            reduced_cost(graph, np.zeros(2, dtype=np.int64), 1, 1)


class MatchingWeightTest(SimpleTestCase):
    def test_examples(self):
        graph = make_g0()
        self.assertEqual(matching_weight(graph, Matching.empty(2, 2)), 0)
        self.assertEqual(matching_weight(graph, Matching.from_pairs(2, 2, [(0, 0), (1, 1)])), 2)
        self.assertEqual(matching_weight(graph, Matching.from_pairs(2, 2, [(0, 1), (1, 0)])), 5)


# ---------------------------------------------------------------------------
# ε-complementary slackness
# ---------------------------------------------------------------------------

class CheckEpsCSTest(SimpleTestCase):
    def setUp(self):
        self.graph = make_g0()
        self.crossed = Matching.from_pairs(2, 2, [(0, 1), (1, 0)])
        self.zero = np.zeros(2, dtype=np.int64)

    def test_single_edge_always_holds(self):
        single = make_single()
        matching = Matching.from_pairs(1, 1, [(0, 0)])
        for price in (-10, 0, 7):
            self.assertTrue(check_eps_cs(single, np.array([price]), matching, 0))

    def test_crossed_matching_fails_at_zero(self):
        self.assertFalse(check_eps_cs(self.graph, self.zero, self.crossed, 0))

    def test_crossed_matching_holds_at_two(self):
        self.assertTrue(check_eps_cs(self.graph, self.zero, self.crossed, 2))

    def test_empty_matching_vacuous(self):
        self.assertTrue(check_eps_cs(self.graph, self.zero, Matching.empty(2, 2), 0))

    def test_monotone_in_eps(self):
        for eps in range(0, 6):
            if check_eps_cs(self.graph, self.zero, self.crossed, eps):
                self.assertTrue(check_eps_cs(self.graph, self.zero, self.crossed, eps + 1))

    def test_uniform_price_shift(self):
        prices = np.array([4, -1], dtype=np.int64)
        for eps in range(0, 6):
            self.assertEqual(
                check_eps_cs(self.graph, prices, self.crossed, eps),
                check_eps_cs(self.graph, prices + 13, self.crossed, eps),
            )


class BestAndSecondTest(SimpleTestCase):
    def test_ties_go_to_lowest_index(self):
        graph = build_graph(1, 3, [(0, 0, 4), (0, 1, 2), (0, 2, 2)])
        v, arc, best, second = best_and_second(graph, np.zeros(3, dtype=np.int64), 0, 99)
        self.assertEqual((v, arc, best, second), (1, 1, 2, 2))

    def test_single_neighbour_uses_gap(self):
        graph = build_graph(1, 2, [(0, 1, 6)])
        v, _, best, second = best_and_second(graph, np.array([0, 2]), 0, 13)
        self.assertEqual((v, best, second), (1, 4, 17))


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------

class MatchingTest(SimpleTestCase):
    def test_assign_reports_displaced(self):
        matching = Matching.empty(2, 2)
        self.assertIsNone(matching.assign(0, 0))
        self.assertEqual(matching.assign(1, 0), 0)
        self.assertEqual(matching.size, 1)
        self.assertIsNone(matching.match_of_u[0])
        self.assertEqual(matching.match_of_v[0], 1)

    def test_assign_moves_left_vertex(self):
        matching = Matching.from_pairs(2, 2, [(0, 0)])
        matching.assign(0, 1)
        self.assertEqual(matching.pairs(), [(0, 1)])
        self.assertIsNone(matching.match_of_v[0])
        self.assertEqual(matching.size, 1)


class ValidateMatchingTest(SimpleTestCase):
    def setUp(self):
        self.graph = make_g0()

    def test_perfect_ok(self):
        matching = Matching.from_pairs(2, 2, [(0, 0), (1, 1)])
        self.assertIsNone(validate_matching(self.graph, matching, require_perfect=True))

    def test_uncovered_right_vertex(self):
        matching = Matching.from_pairs(2, 2, [(0, 0)])
        self.assertIsNone(validate_matching(self.graph, matching))
        self.assertIn("uncovered right vertex",
                      validate_matching(self.graph, matching, require_perfect=True))

    def test_not_an_edge(self):
        graph = build_graph(2, 2, [(0, 0, 1), (1, 1, 1)])
        matching = Matching.from_pairs(2, 2, [(0, 1)])
        self.assertIn("not an edge", validate_matching(graph, matching))

    def test_inconsistent_pair(self):
        matching = Matching(match_of_u=[0, None], match_of_v=[1, None], size=1)
        self.assertIn("inconsistent", validate_matching(self.graph, matching))
