"""ε-scaling auction for the minimum-weight assignment problem.

Persons (left vertices) bid for objects (right vertices). A bid lowers the
object's price by the bidder's gap between second-best and best reduced
cost plus ε. Scaling runs the auction repeatedly with shrinking ε, carrying
prices from one phase to the next, and the last phase runs at ε = 1 on
weights multiplied by (n + 1), which is exact.
"""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .conf import invariants_enabled
from .exceptions import (
    InfeasibleInstanceError,
    InvalidGraphError,
    InvalidParameterError,
    InvariantViolationError,
    IterationLimitError,
)
from .graph import Matching, PriceVector, WeightedBipartiteGraph, best_and_second, check_eps_cs
from .reduction import solve_reduced
from .scaling import (
    Deadline,
    PhaseStats,
    SolverRun,
    SolveStats,
    check_headroom,
    check_price,
    coerce_alpha,
    epsilon_schedule,
    scale_weights,
)
from .tracing import TraceEvent, TraceSink, check_event

logger = logging.getLogger(__name__)

# Solver loops poll their deadline every this many steps.
DEADLINE_POLL = 1024


def feasibility_precheck(graph: WeightedBipartiteGraph) -> bool:
    """True iff some matching covers every right vertex."""
    if graph.s > graph.n or graph.m == 0:
        return False
    biadjacency = csr_matrix(
        (np.ones(graph.m, dtype=np.int8), graph.neighbors, graph.offsets),
        shape=(graph.n, graph.s),
    )
    # perm[v] is the row matched to column v, or -1.
    perm = maximum_bipartite_matching(biadjacency, perm_type="row")
    return int(np.count_nonzero(perm >= 0)) == graph.s


def single_neighbor_gap(graph: WeightedBipartiteGraph) -> int:
    """Decrement used as γ for a person with exactly one neighbour.

    ``graph`` is already scaled, so ``2 * max_abs_weight + 1`` is the
    2·(n+1)·W + 1 of the unscaled weights.
    """
    return 2 * graph.max_abs_weight + 1


def iteration_cap(graph: WeightedBipartiteGraph, eps: int, prices: PriceVector) -> int:
    spread = int(prices.max() - prices.min()) if prices.size else 0
    return 10 * graph.n * max(graph.m, 1) * (spread // eps + 2)


@dataclass
class AuctionState:
    """Everything one auction phase mutates."""

    graph: WeightedBipartiteGraph
    prices: PriceVector
    matching: Matching
    unassigned: deque
    eps: int
    trace_sink: TraceSink | None = None
    phase_index: int = 0
    check_invariants: bool = False
    gap: int = 0
    steps: int = field(default=0)

    @classmethod
    def start(cls, graph, eps, prices, **kwargs) -> "AuctionState":
        prices = np.array(prices, dtype=np.int64)
        check_headroom(graph, prices)
        return cls(
            graph=graph,
            prices=prices,
            matching=Matching.empty(graph.n, graph.s),
            unassigned=deque(range(graph.n)),
            eps=int(eps),
            gap=single_neighbor_gap(graph),
            **kwargs,
        )


def bid(state: AuctionState, u: int) -> TraceEvent:
    """Let unassigned person ``u`` bid for its best object."""
    graph = state.graph
    if graph.degree(u) == 0:
        raise InfeasibleInstanceError(f"Left vertex {u} has no neighbours; no perfect matching exists.")

    v, _, best, second = best_and_second(graph, state.prices, u, state.gap)
    gamma = second - best
    displaced = state.matching.assign(u, v)
    if displaced is not None:
        state.unassigned.append(displaced)

    old_price = int(state.prices[v])
    new_price = old_price - gamma - state.eps
    state.prices[v] = check_price(new_price, v)

    event = TraceEvent(state.phase_index, state.steps, u, v, best, second, gamma,
                       new_price, displaced)
    state.steps += 1
    if state.check_invariants:
        problem = check_event(event, old_price, state.eps)
        if problem:
            raise InvariantViolationError(f"auction bid: {problem}")
    if state.trace_sink is not None:
        state.trace_sink.emit(event)
    return event


def _run_phase(state: AuctionState, deadline: Deadline) -> AuctionState:
    cap = iteration_cap(state.graph, state.eps, state.prices)
    while state.unassigned:
        bid(state, state.unassigned.popleft())
        if state.steps > cap:
            raise IterationLimitError(
                f"Auction phase {state.phase_index} exceeded {cap} bids at eps={state.eps}; "
                "the instance is probably infeasible."
            )
        if state.steps % DEADLINE_POLL == 0:
            deadline.check()

    if state.check_invariants:
        if state.matching.size != state.graph.n:
            raise InvariantViolationError(
                f"auction phase {state.phase_index} ended with {state.matching.size} of "
                f"{state.graph.n} matched"
            )
        if not check_eps_cs(state.graph, state.prices, state.matching, state.eps):
            raise InvariantViolationError(
                f"auction phase {state.phase_index} violates eps-CS at eps={state.eps}"
            )
    return state


def auction(graph: WeightedBipartiteGraph, eps: int, prices: PriceVector, *,
            trace_sink: TraceSink | None = None, phase_index: int = 0,
            check_invariants: bool | None = None,
            deadline=None) -> tuple[Matching, PriceVector]:
    """One auction phase from an empty matching; returns a perfect matching
    and prices satisfying ε-CS. ``prices`` is not modified.
    """
    if not graph.is_balanced:
        raise InvalidGraphError(f"auction needs a balanced graph, got {graph!r}.")
    if eps < 1:
        raise InvalidParameterError(f"eps must be a positive integer, got {eps}.")
    prices = np.asarray(prices, dtype=np.int64)
    if prices.shape != (graph.s,):
        raise InvalidParameterError(f"Expected {graph.s} prices, got {prices.size}.")

    state = AuctionState.start(graph, eps, prices, trace_sink=trace_sink,
                               phase_index=phase_index,
                               check_invariants=invariants_enabled(check_invariants))
    _run_phase(state, Deadline.coerce(deadline))
    return state.matching, state.prices


def run_auction_phases(balanced: WeightedBipartiteGraph, alpha, *, scaling: bool = True,
                       initial_prices: PriceVector | None = None,
                       trace_sink: TraceSink | None = None,
                       check_invariants: bool | None = None,
                       deadline=None, phase_observer=None) -> SolverRun:
    """Run the ε schedule on a balanced graph.

    The returned prices live on the scaled domain (weights × (n + 1)).
    ``phase_observer(eps, matching, prices)`` is called after every phase.
    """
    started = time.perf_counter()
    check = invariants_enabled(check_invariants)
    deadline = Deadline.coerce(deadline)
    scaled = scale_weights(balanced)

    if initial_prices is None:
        prices = np.zeros(scaled.s, dtype=np.int64)
    else:
        try:
            prices = np.array(initial_prices, dtype=np.int64)
        except (TypeError, ValueError, OverflowError) as exc:
            raise InvalidParameterError("Initial prices must be 64-bit integers.") from exc
        if prices.shape != (scaled.s,):
            raise InvalidParameterError(f"Expected {scaled.s} initial prices, got {prices.size}.")

    schedule = epsilon_schedule(scaled.max_abs_weight, alpha) if scaling else iter([1])
    stats = SolveStats(algorithm="auction")
    matching = None
    for phase_index, eps in enumerate(schedule):
        logger.debug("Auction phase %d at eps=%d", phase_index, eps)
        state = AuctionState.start(scaled, eps, prices, trace_sink=trace_sink,
                                   phase_index=phase_index, check_invariants=check)
        _run_phase(state, deadline)
        if check and (state.prices > prices).any():
            raise InvariantViolationError(f"auction phase {phase_index} raised a price")
        matching, prices = state.matching, state.prices
        stats.phases.append(PhaseStats(eps=eps, steps=state.steps))
        if phase_observer is not None:
            phase_observer(eps, matching, prices)

    stats.seconds = time.perf_counter() - started
    logger.debug("Auction finished: %d phases, %d bids", len(stats.phases), stats.steps)
    return SolverRun(matching=matching, stats=stats, prices=prices)


def eps_scaling_auction(graph: WeightedBipartiteGraph, alpha=None, *,
                        reduction: str | None = None, scaling: bool = True,
                        initial_prices: PriceVector | None = None,
                        trace_sink: TraceSink | None = None,
                        check_invariants: bool | None = None,
                        deadline=None) -> Matching:
    """Minimum-weight matching covering every right vertex of ``graph``.

    Unbalanced graphs go through ``reduction`` first. Raises
    ``InfeasibleInstanceError`` when no covering matching exists.
    """
    return solve_auction(graph, alpha, reduction=reduction, scaling=scaling,
                         initial_prices=initial_prices, trace_sink=trace_sink,
                         check_invariants=check_invariants, deadline=deadline).matching


def solve_auction(graph: WeightedBipartiteGraph, alpha=None, *, reduction: str | None = None,
                  scaling: bool = True, initial_prices: PriceVector | None = None,
                  trace_sink: TraceSink | None = None, check_invariants: bool | None = None,
                  deadline=None) -> SolverRun:
    """``eps_scaling_auction`` keeping the statistics of the run."""
    alpha = coerce_alpha(alpha)
    if not feasibility_precheck(graph):
        raise InfeasibleInstanceError(f"No matching of {graph!r} covers every right vertex.")

    def runner(balanced):
        return run_auction_phases(balanced, alpha, scaling=scaling,
                                  initial_prices=initial_prices, trace_sink=trace_sink,
                                  check_invariants=check_invariants, deadline=deadline)

    run = solve_reduced(graph, reduction, runner)
    logger.info("Auction solved %r in %d phases, %d bids (%.3fs)", graph,
                len(run.stats.phases), run.stats.steps, run.stats.seconds)
    return run
