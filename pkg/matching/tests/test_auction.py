from collections import deque

import numpy as np
from django.test import SimpleTestCase, override_settings

from matching.auction import (
    AuctionState,
    auction,
    bid,
    eps_scaling_auction,
    feasibility_precheck,
    run_auction_phases,
    single_neighbor_gap,
    solve_auction,
)
from matching.exceptions import (
    InfeasibleInstanceError,
    InvalidGraphError,
    InvalidParameterError,
    IterationLimitError,
    SolveTimeoutError,
)
from matching.graph import Matching, build_graph, check_eps_cs, matching_weight, validate_matching
from matching.oracle import brute_force_optimum
from matching.scaling import PRICE_LIMIT, WEIGHT_LIMIT, Deadline, check_price, coerce_alpha, scale_weights
from matching.tracing import ListTraceSink

from .utils import make_g0, make_single, random_feasible_instances


# ---------------------------------------------------------------------------
# Feasibility precheck
# ---------------------------------------------------------------------------

class FeasibilityPrecheckTest(SimpleTestCase):
    def test_complete_graph_feasible(self):
        self.assertTrue(feasibility_precheck(make_g0()))

    def test_isolated_right_vertex(self):
        self.assertFalse(feasibility_precheck(build_graph(2, 2, [(0, 0, 1), (1, 0, 1)])))

    def test_star(self):
        star = build_graph(1, 3, [(0, v, 1) for v in range(3)])
        self.assertFalse(feasibility_precheck(star))
        self.assertTrue(feasibility_precheck(build_graph(1, 1, [(0, 0, 1)])))

    def test_unbalanced_covering_exists(self):
        graph = build_graph(3, 2, [(0, 0, 1), (1, 0, 1), (2, 1, 1)])
        self.assertTrue(feasibility_precheck(graph))

    def test_hall_violation(self):
        graph = build_graph(3, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 1)])
        self.assertTrue(feasibility_precheck(graph))
        blocked = build_graph(3, 2, [(0, 0, 1), (0, 1, 1)])
        self.assertFalse(feasibility_precheck(blocked))

    def test_no_edges(self):
        self.assertFalse(feasibility_precheck(build_graph(2, 2, [])))


# ---------------------------------------------------------------------------
# bid
# ---------------------------------------------------------------------------

def _state(graph, eps=1, prices=None):
    prices = np.zeros(graph.s, dtype=np.int64) if prices is None else prices
    return AuctionState.start(graph, eps, prices, check_invariants=True)


class BidTest(SimpleTestCase):
    def test_gamma_and_price_update(self):
        state = _state(build_graph(1, 2, [(0, 0, 2), (0, 1, 5)]))
        event = bid(state, state.unassigned.popleft())
        self.assertEqual(event.gamma, 3)
        self.assertEqual(int(state.prices[0]), -4)
        self.assertEqual(state.matching.match_of_u[0], 0)
        self.assertIsNone(event.displaced_u)

    def test_tie_takes_lowest_index(self):
        state = _state(build_graph(1, 2, [(0, 0, 2), (0, 1, 2)]))
        event = bid(state, 0)
        self.assertEqual((event.best_v, event.gamma), (0, 0))
        self.assertEqual(int(state.prices[0]), -1)

    def test_displacement(self):
        graph = build_graph(2, 2, [(0, 0, 1), (0, 1, 5), (1, 0, 1), (1, 1, 100)])
        state = _state(graph)
        bid(state, state.unassigned.popleft())
        event = bid(state, state.unassigned.popleft())
        self.assertEqual(event.displaced_u, 0)
        self.assertEqual(list(state.unassigned), [0])
        self.assertIsNone(state.matching.match_of_u[0])
        self.assertIsNone(validate_matching(graph, state.matching))

    def test_single_neighbour_gap(self):
        graph = build_graph(1, 2, [(0, 1, 3)])
        state = _state(graph)
        event = bid(state, 0)
        self.assertEqual(event.gamma, single_neighbor_gap(graph))
        self.assertEqual(single_neighbor_gap(graph), 7)

    def test_no_neighbours(self):
        state = _state(build_graph(2, 2, [(0, 0, 1)]))
        with self.assertRaises(InfeasibleInstanceError):
            bid(state, 1)

    def test_trace_event_emitted(self):
        sink = ListTraceSink()
        state = AuctionState.start(make_g0(), 1, np.zeros(2, dtype=np.int64), trace_sink=sink)
        bid(state, 0)
        self.assertEqual(len(sink), 1)
        self.assertEqual(sink.events[0].selected_u, 0)


# ---------------------------------------------------------------------------
# auction (one phase)
# ---------------------------------------------------------------------------

class AuctionPhaseTest(SimpleTestCase):
    def test_forced_assignment(self):
        matching, _ = auction(make_single(), 3, np.zeros(1, dtype=np.int64))
        self.assertEqual(matching.pairs(), [(0, 0)])

    def test_g0_scaled(self):
        scaled = make_g0().scaled(3)
        matching, prices = auction(scaled, 1, np.zeros(2, dtype=np.int64), check_invariants=True)
        self.assertEqual(matching.size, 2)
        self.assertEqual(matching_weight(scaled, matching), 6)
        self.assertTrue(check_eps_cs(scaled, prices, matching, 1))

    def test_input_prices_untouched(self):
        prices = np.zeros(2, dtype=np.int64)
        auction(make_g0(), 1, prices)
        self.assertEqual(prices.tolist(), [0, 0])

    def test_eps_cs_on_random_phases(self):
        for graph in random_feasible_instances(20, max_n=7, balanced=True, seed=5):
            for eps in (1, 4, 50):
                matching, prices = auction(graph, eps, np.zeros(graph.s, dtype=np.int64),
                                           check_invariants=True)
                self.assertEqual(matching.size, graph.n)
                self.assertTrue(check_eps_cs(graph, prices, matching, eps))

    def test_uniform_price_shift(self):
        for graph in random_feasible_instances(10, max_n=6, balanced=True, seed=8):
            base = np.arange(graph.s, dtype=np.int64) * -3
            first, first_prices = auction(graph, 2, base)
            second, second_prices = auction(graph, 2, base + 1000)
            self.assertEqual(first.pairs(), second.pairs())
            self.assertTrue(np.array_equal(second_prices - first_prices,
                                           np.full(graph.s, 1000)))

    def test_rejects_unbalanced_and_bad_eps(self):
        with self.assertRaises(InvalidGraphError):
            auction(build_graph(2, 1, [(0, 0, 1)]), 1, np.zeros(1, dtype=np.int64))
        with self.assertRaises(InvalidParameterError):
            auction(make_g0(), 0, np.zeros(2, dtype=np.int64))

    def test_iteration_cap_on_infeasible(self):
        # Two persons share one object; no perfect matching.
        graph = build_graph(2, 2, [(0, 0, 1), (1, 0, 1)])
        with self.assertRaises(IterationLimitError):
            auction(graph, 1, np.zeros(2, dtype=np.int64))

    def test_expired_deadline(self):
        graph = build_graph(2, 2, [(0, 0, 1), (1, 0, 1)])
        deadline = Deadline(0.0)
        with self.assertRaises((SolveTimeoutError, IterationLimitError)):
            auction(graph, 1, np.zeros(2, dtype=np.int64), deadline=deadline)


# ---------------------------------------------------------------------------
# ε-scaling driver
# ---------------------------------------------------------------------------

@override_settings(MATCHING_CHECK_INVARIANTS=True)
class EpsScalingAuctionTest(SimpleTestCase):
    def test_g0(self):
        matching = eps_scaling_auction(make_g0(), 5)
        self.assertEqual(matching_weight(make_g0(), matching), 2)
        self.assertEqual(matching.pairs(), [(0, 0), (1, 1)])

    def test_single(self):
        self.assertEqual(matching_weight(make_single(), eps_scaling_auction(make_single())), 5)

    def test_infeasible_reported(self):
        with self.assertRaises(InfeasibleInstanceError):
            eps_scaling_auction(build_graph(2, 2, [(0, 0, 1), (1, 0, 1)]))

    def test_bad_alpha(self):
        with self.assertRaises(InvalidParameterError):
            eps_scaling_auction(make_g0(), 1)
        with self.assertRaises(InvalidParameterError):
            eps_scaling_auction(make_g0(), "abc")

    def test_rational_alpha(self):
        self.assertEqual(coerce_alpha("3/2").denominator, 2)
        matching = eps_scaling_auction(make_g0(), "3/2")
        self.assertEqual(matching_weight(make_g0(), matching), 2)

    def test_matches_oracle(self):
        for graph in random_feasible_instances(60, max_n=8, seed=13):
            optimum = brute_force_optimum(graph)
            matching = eps_scaling_auction(graph, 5)
            self.assertIsNone(validate_matching(graph, matching, require_perfect=True))
            self.assertEqual(matching_weight(graph, matching), optimum.weight)

    def test_pad_reduction_matches_oracle(self):
        for graph in random_feasible_instances(20, max_n=7, balanced=False, seed=17):
            matching = eps_scaling_auction(graph, 4, reduction="pad")
            self.assertEqual(matching_weight(graph, matching), brute_force_optimum(graph).weight)

    def test_negative_weights(self):
        graph = build_graph(2, 2, [(0, 0, -5), (0, 1, 2), (1, 0, 3), (1, 1, -1)])
        self.assertEqual(matching_weight(graph, eps_scaling_auction(graph)), -6)

    def test_phase_schedule_ends_at_one(self):
        run = solve_auction(make_g0(), 5)
        eps_values = [phase.eps for phase in run.stats.phases]
        self.assertEqual(eps_values[-1], 1)
        self.assertEqual(eps_values.count(1), 1)
        self.assertEqual(eps_values, sorted(eps_values, reverse=True))
        # W·(n+1) = 9, then 9 // 5 = 1.
        self.assertEqual(eps_values, [1])

    def test_without_scaling(self):
        for graph in random_feasible_instances(15, max_n=7, seed=19):
            run = solve_auction(graph, scaling=False)
            self.assertEqual(len(run.stats.phases), 1)
            self.assertEqual(run.stats.phases[0].eps, 1)
            self.assertEqual(matching_weight(graph, run.matching), brute_force_optimum(graph).weight)

    def test_initial_prices_do_not_change_optimum(self):
        rng = np.random.default_rng(3)
        for graph in random_feasible_instances(15, max_n=6, balanced=True, seed=23):
            prices = rng.integers(-500, 500, size=graph.s)
            matching = eps_scaling_auction(graph, initial_prices=prices)
            self.assertEqual(matching_weight(graph, matching), brute_force_optimum(graph).weight)

    def test_initial_prices_wrong_length(self):
        with self.assertRaises(InvalidParameterError):
            eps_scaling_auction(make_g0(), initial_prices=[0, 0, 0])

    def test_phase_sandwich(self):
        """w(M*) <= w(M) <= w(M*) + n·eps on the scaled domain after every phase."""
        for graph in random_feasible_instances(40, max_n=7, balanced=True, seed=29):
            scaled_optimum = brute_force_optimum(graph).weight * (graph.n + 1)
            scaled = graph.scaled(graph.n + 1)
            seen = []

            def observe(eps, matching, prices, scaled=scaled, seen=seen):
                weight = matching_weight(scaled, matching)
                seen.append((eps, weight, check_eps_cs(scaled, prices, matching, eps)))

            run_auction_phases(graph, coerce_alpha(3), phase_observer=observe)
            self.assertTrue(seen)
            for eps, weight, eps_cs in seen:
                self.assertTrue(eps_cs)
                self.assertGreaterEqual(weight, scaled_optimum)
                self.assertLessEqual(weight, scaled_optimum + graph.n * eps)

    def test_stats_count_bids(self):
        sink = ListTraceSink()
        run = solve_auction(make_g0(), 5, trace_sink=sink)
        self.assertEqual(run.stats.steps, len(sink))
        self.assertIsInstance(run.matching, Matching)


class StateInvariantTest(SimpleTestCase):
    def test_unassigned_exactly_the_unmatched(self):
        graph = next(random_feasible_instances(1, max_n=8, min_n=6, balanced=True, seed=31))
        state = AuctionState.start(graph.scaled(graph.n + 1), 5, np.zeros(graph.s, dtype=np.int64))
        while state.unassigned:
            previous = state.prices.copy()
            bid(state, state.unassigned.popleft())
            self.assertTrue((state.prices <= previous).all())
            queued = set(state.unassigned)
            for u in range(graph.n):
                self.assertEqual(u in queued, state.matching.match_of_u[u] is None)
        self.assertEqual(state.unassigned, deque())


# ---------------------------------------------------------------------------
# Integer headroom
# ---------------------------------------------------------------------------

def crossed_pair(x):
    return build_graph(2, 2, [(0, 0, x), (0, 1, 1), (1, 0, 1), (1, 1, x)])


class LargeWeightTest(SimpleTestCase):
    def test_weights_without_headroom_rejected(self):
        for x in ((2**64 + 2) // 3, 2**62):
            graph = crossed_pair(x)
            self.assertEqual(brute_force_optimum(graph).weight, 2)
            with self.assertRaises(InvalidGraphError):
                eps_scaling_auction(graph)
            with self.assertRaises(InvalidGraphError):
                eps_scaling_auction(graph, scaling=False)

    def test_large_weights_within_headroom(self):
        graph = build_graph(2, 2, [(u, v, w * 10**12) for u, v, w in make_g0().edges()])
        matching = eps_scaling_auction(graph, 5, check_invariants=True)
        self.assertEqual(matching_weight(graph, matching), 2 * 10**12)

    def test_scale_weights_limit(self):
        limit = WEIGHT_LIMIT // 3
        self.assertEqual(scale_weights(crossed_pair(limit)).max_abs_weight, 3 * limit)
        with self.assertRaisesMessage(InvalidGraphError, str(limit)):
            scale_weights(crossed_pair(limit + 1))

    def test_phase_weight_limit(self):
        graph = crossed_pair(WEIGHT_LIMIT + 1)
        with self.assertRaises(InvalidGraphError):
            auction(graph, 1, np.zeros(2, dtype=np.int64))

    def test_initial_prices_limit(self):
        with self.assertRaises(InvalidParameterError):
            auction(make_g0(), 1, np.array([PRICE_LIMIT + 1, 0], dtype=np.int64))
        with self.assertRaises(InvalidParameterError):
            eps_scaling_auction(make_g0(), initial_prices=[-PRICE_LIMIT - 1, 0])
        with self.assertRaises(InvalidParameterError):
            eps_scaling_auction(make_g0(), initial_prices=[2**70, 0])

    def test_check_price(self):
        self.assertEqual(check_price(PRICE_LIMIT, 0), PRICE_LIMIT)
        self.assertEqual(check_price(-PRICE_LIMIT, 0), -PRICE_LIMIT)
        with self.assertRaisesMessage(InvalidGraphError, "right vertex 3"):
            check_price(-PRICE_LIMIT - 1, 3)
