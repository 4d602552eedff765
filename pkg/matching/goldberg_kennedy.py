"""Goldberg & Kennedy cost-scaling push-relabel for the assignment problem.

The instance becomes a unit-capacity min-cost flow problem: arcs run from
every left vertex to its neighbours, each left vertex supplies one unit and
each right vertex demands one. ``refine`` turns the zero pseudoflow into an
ε-optimal flow by repeated ``double_push`` on active left vertices.

Vertices of the flow network are numbered ``0..n-1`` for the left side and
``n..2n-1`` for the right side (right vertex ``v`` is ``n + v``). Right
prices live in their own array indexed by ``v``; ``combined_prices`` glues
the two sides together when a price over both is needed.

The faithful solver keeps the flow and the left prices even though neither
changes what the solver does: a ``keep_redundant_state=False`` run drops
both and produces the same steps.
"""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .auction import DEADLINE_POLL, feasibility_precheck, iteration_cap, single_neighbor_gap
from .conf import invariants_enabled
from .exceptions import (
    InfeasibleInstanceError,
    InvalidGraphError,
    InvalidMatchingError,
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


# ---------------------------------------------------------------------------
# Flow network
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlowInstance:
    """Unit-capacity network over a balanced bipartite graph."""

    graph: WeightedBipartiteGraph
    capacity: np.ndarray
    supply: np.ndarray

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def tails(self) -> np.ndarray:
        return self.graph.arc_tails

    @property
    def heads(self) -> np.ndarray:
        return self.graph.n + self.graph.neighbors

    @property
    def weights(self) -> np.ndarray:
        return self.graph.weights


def to_flow_instance(graph: WeightedBipartiteGraph) -> FlowInstance:
    if not graph.is_balanced:
        raise InvalidGraphError(
            f"The flow network needs a balanced graph, got {graph!r}; apply a reduction first."
        )
    supply = np.concatenate((np.ones(graph.n, dtype=np.int64), -np.ones(graph.s, dtype=np.int64)))
    capacity = np.ones(graph.m, dtype=np.int64)
    supply.setflags(write=False)
    capacity.setflags(write=False)
    return FlowInstance(graph=graph, capacity=capacity, supply=supply)


@dataclass
class Pseudoflow:
    """Per-arc flow plus a cached excess per vertex."""

    flow: np.ndarray
    excess_cache: np.ndarray

    @classmethod
    def zero(cls, instance: FlowInstance) -> "Pseudoflow":
        return cls(flow=np.zeros(instance.graph.m, dtype=np.int64),
                   excess_cache=np.array(instance.supply, dtype=np.int64))

    def push(self, arc: int, tail: int, head: int) -> None:
        self.flow[arc] += 1
        self.excess_cache[tail] -= 1
        self.excess_cache[head] += 1

    def push_back(self, arc: int, tail: int, head: int) -> None:
        """Return the unit on ``arc`` from ``head`` to ``tail``."""
        self.flow[arc] -= 1
        self.excess_cache[head] -= 1
        self.excess_cache[tail] += 1

    def recompute_excess(self, instance: FlowInstance) -> np.ndarray:
        """Supply plus inflow minus outflow, from scratch."""
        size = instance.supply.size
        inflow = np.bincount(instance.heads, weights=self.flow, minlength=size)
        outflow = np.bincount(instance.tails, weights=self.flow, minlength=size)
        return instance.supply + inflow.astype(np.int64) - outflow.astype(np.int64)

    @property
    def is_flow(self) -> bool:
        return not (self.excess_cache > 0).any()


def excess(pseudoflow: Pseudoflow, x: int) -> int:
    """Excess of network vertex ``x``; positive means active."""
    return int(pseudoflow.excess_cache[x])


def pseudoflow_weight(instance: FlowInstance, pseudoflow: Pseudoflow) -> int:
    return int(np.dot(instance.weights, pseudoflow.flow))


@dataclass(frozen=True, eq=False)
class ResidualGraph:
    """Explicit residual arcs: forward where capacity remains, reversed where not."""

    tails: np.ndarray
    heads: np.ndarray
    weights: np.ndarray
    forward: np.ndarray

    @classmethod
    def build(cls, instance: FlowInstance, pseudoflow: Pseudoflow) -> "ResidualGraph":
        forward = (instance.capacity - pseudoflow.flow) > 0
        tails = np.where(forward, instance.tails, instance.heads)
        heads = np.where(forward, instance.heads, instance.tails)
        weights = np.where(forward, instance.weights, -instance.weights)
        return cls(tails=tails, heads=heads, weights=weights, forward=forward)


def combined_prices(left_prices: PriceVector, right_prices: PriceVector) -> PriceVector:
    return np.concatenate((left_prices, right_prices))


def check_eps_optimal(instance: FlowInstance, pseudoflow: Pseudoflow,
                      prices: PriceVector, eps: int) -> bool:
    """Forward residual arcs need reduced cost >= 0, reversed ones >= -eps.

    ``prices`` covers both sides (length 2n).
    """
    residual = ResidualGraph.build(instance, pseudoflow)
    prices = np.asarray(prices, dtype=np.int64)
    reduced = residual.weights + prices[residual.tails] - prices[residual.heads]
    bound = np.where(residual.forward, 0, -int(eps))
    return bool((reduced >= bound).all())


def flow_to_matching(instance: FlowInstance, pseudoflow: Pseudoflow, *, strict: bool = True) -> Matching:
    """Matching of the arcs carrying a unit of flow.

    With ``strict`` (the default) a pseudoflow that still has active
    vertices is rejected.
    """
    if strict and not pseudoflow.is_flow:
        active = int(np.argmax(pseudoflow.excess_cache > 0))
        raise InvalidMatchingError(f"Pseudoflow still has active vertex {active}; not a flow.")
    carrying = np.flatnonzero(pseudoflow.flow)
    pairs = zip(instance.tails[carrying].tolist(), instance.graph.neighbors[carrying].tolist())
    return Matching.from_pairs(instance.graph.n, instance.graph.s, pairs)


# ---------------------------------------------------------------------------
# Refine
# ---------------------------------------------------------------------------

@dataclass
class PushRelabelState:
    """One refine in progress. ``pseudoflow`` and ``left_prices`` are None
    in the lean variant."""

    instance: FlowInstance
    right_prices: PriceVector
    matching: Matching
    active: deque
    eps: int
    pseudoflow: Pseudoflow | None = None
    left_prices: PriceVector | None = None
    trace_sink: TraceSink | None = None
    phase_index: int = 0
    check_invariants: bool = False
    gap: int = 0
    steps: int = field(default=0)

    @property
    def graph(self) -> WeightedBipartiteGraph:
        return self.instance.graph

    @property
    def is_faithful(self) -> bool:
        return self.pseudoflow is not None


def initial_left_prices(graph: WeightedBipartiteGraph, right_prices: PriceVector) -> PriceVector:
    """p(u) = -min over u's arcs of w(uz) - p(z)."""
    if (np.diff(graph.offsets) == 0).any():
        u = int(np.argmax(np.diff(graph.offsets) == 0))
        raise InfeasibleInstanceError(f"Left vertex {u} has no outgoing arcs.")
    costs = graph.weights - right_prices[graph.neighbors]
    return -np.minimum.reduceat(costs, graph.offsets[:-1])


def _check_left_price(state: PushRelabelState, u: int, second: int) -> None:
    nbrs, weights = state.graph.adjacency(u)
    lowest = int((weights - state.right_prices[nbrs]).min())
    if nbrs.size == 1:
        lowest = min(lowest, second)
    if int(state.left_prices[u]) != -lowest:
        raise InvariantViolationError(
            f"double_push step {state.steps}: p(u{u})={int(state.left_prices[u])} "
            f"but -min reduced cost is {-lowest}"
        )


def double_push(state: PushRelabelState, u: int) -> TraceEvent:
    """Push u's unit to its best neighbour, displacing any occupant."""
    graph = state.graph
    if graph.degree(u) == 0:
        raise InfeasibleInstanceError(f"Left vertex {u} has no outgoing arcs; no perfect matching exists.")

    v, arc, best, second = best_and_second(graph, state.right_prices, u, state.gap)
    gamma = second - best
    old_price = int(state.right_prices[v])

    if state.is_faithful:
        n = graph.n
        flow = state.pseudoflow
        state.left_prices[u] = -second
        flow.push(arc, u, n + v)
        displaced = None
        if flow.excess_cache[n + v] > 0:
            displaced = state.matching.match_of_v[v]
            flow.push_back(graph.arc_index(displaced, v), displaced, n + v)
            state.active.append(displaced)
        previous = state.matching.assign(u, v)
        if previous != displaced:
            raise InvariantViolationError(
                f"double_push step {state.steps}: flow displaced {displaced}, matching {previous}"
            )
        new_price = int(state.left_prices[u]) + int(graph.weights[arc]) - state.eps
        if state.check_invariants and new_price != old_price - gamma - state.eps:
            raise InvariantViolationError(
                f"double_push step {state.steps}: p(u)+w-eps={new_price} but "
                f"p(v)-gamma-eps={old_price - gamma - state.eps}"
            )
    else:
        displaced = state.matching.assign(u, v)
        if displaced is not None:
            state.active.append(displaced)
        new_price = old_price - gamma - state.eps
    state.right_prices[v] = check_price(new_price, v)

    left_price = int(state.left_prices[u]) if state.is_faithful else None
    event = TraceEvent(state.phase_index, state.steps, u, v, best, second, gamma,
                       new_price, displaced, left_price)
    if state.check_invariants:
        problem = check_event(event, old_price, state.eps)
        if problem:
            raise InvariantViolationError(f"double_push: {problem}")
        if state.is_faithful:
            _check_left_price(state, u, second)
    state.steps += 1
    if state.trace_sink is not None:
        state.trace_sink.emit(event)
    return event


def start_refine(instance: FlowInstance, eps: int, right_prices: PriceVector, *,
                  keep_redundant_state: bool, **kwargs) -> PushRelabelState:
    graph = instance.graph
    right_prices = np.array(right_prices, dtype=np.int64)
    check_headroom(graph, right_prices)
    state = PushRelabelState(
        instance=instance,
        right_prices=right_prices,
        matching=Matching.empty(graph.n, graph.s),
        active=deque(range(graph.n)),
        eps=int(eps),
        gap=single_neighbor_gap(graph),
        **kwargs,
    )
    if keep_redundant_state:
        state.pseudoflow = Pseudoflow.zero(instance)
        state.left_prices = initial_left_prices(graph, right_prices)
    return state


def _verify_refine(state: PushRelabelState) -> None:
    graph = state.graph
    if state.matching.size != graph.n:
        raise InvariantViolationError(
            f"refine {state.phase_index} ended with {state.matching.size} of {graph.n} matched"
        )
    eps_cs = check_eps_cs(graph, state.right_prices, state.matching, state.eps)
    if not state.is_faithful:
        if not eps_cs:
            raise InvariantViolationError(f"refine {state.phase_index} violates eps-CS")
        return

    flow = state.pseudoflow
    recomputed = flow.recompute_excess(state.instance)
    if not np.array_equal(recomputed, flow.excess_cache) or int(recomputed.sum()) != 0:
        raise InvariantViolationError(f"refine {state.phase_index}: excess bookkeeping drifted")
    if not flow.is_flow:
        raise InvariantViolationError(f"refine {state.phase_index} ended with active vertices")
    prices = combined_prices(state.left_prices, state.right_prices)
    optimal = check_eps_optimal(state.instance, flow, prices, state.eps)
    if not optimal or optimal != eps_cs:
        raise InvariantViolationError(
            f"refine {state.phase_index}: eps-optimal={optimal}, eps-CS={eps_cs} at eps={state.eps}"
        )


def _run_refine(state: PushRelabelState, deadline: Deadline) -> PushRelabelState:
    cap = iteration_cap(state.graph, state.eps, state.right_prices)
    while state.active:
        double_push(state, state.active.popleft())
        if state.steps > cap:
            raise IterationLimitError(
                f"Refine {state.phase_index} exceeded {cap} double pushes at eps={state.eps}; "
                "the instance is probably infeasible."
            )
        if state.steps % DEADLINE_POLL == 0:
            deadline.check()
    if state.check_invariants:
        _verify_refine(state)
    return state


def refine(instance: FlowInstance, eps: int, prices: PriceVector, *,
           trace_sink: TraceSink | None = None, phase_index: int = 0,
           check_invariants: bool | None = None,
           deadline=None) -> tuple[Pseudoflow, PriceVector]:
    """Turn the zero pseudoflow into an ε-optimal flow.

    ``prices`` covers both sides; its left half is recomputed before the
    first push. Returns the flow and the new prices over both sides.
    """
    if eps < 1:
        raise InvalidParameterError(f"eps must be a positive integer, got {eps}.")
    n = instance.n
    prices = np.asarray(prices, dtype=np.int64)
    if prices.shape != (2 * n,):
        raise InvalidParameterError(f"Expected {2 * n} prices, got {prices.size}.")
    state = start_refine(instance, eps, prices[n:], keep_redundant_state=True,
                          trace_sink=trace_sink, phase_index=phase_index,
                          check_invariants=invariants_enabled(check_invariants))
    _run_refine(state, Deadline.coerce(deadline))
    return state.pseudoflow, combined_prices(state.left_prices, state.right_prices)


# ---------------------------------------------------------------------------
# Scaling driver
# ---------------------------------------------------------------------------

def run_gk_phases(balanced: WeightedBipartiteGraph, alpha, *, keep_redundant_state: bool = True,
                  trace_sink: TraceSink | None = None, check_invariants: bool | None = None,
                  deadline=None) -> SolverRun:
    """Run the ε schedule on a balanced graph; prices are on the scaled domain."""
    started = time.perf_counter()
    check = invariants_enabled(check_invariants)
    deadline = Deadline.coerce(deadline)
    instance = to_flow_instance(scale_weights(balanced))
    right_prices = np.zeros(instance.graph.s, dtype=np.int64)

    stats = SolveStats(algorithm="gk" if keep_redundant_state else "gk-lean")
    state = None
    for phase_index, eps in enumerate(epsilon_schedule(instance.graph.max_abs_weight, alpha)):
        logger.debug("Refine %d at eps=%d", phase_index, eps)
        state = start_refine(instance, eps, right_prices, keep_redundant_state=keep_redundant_state,
                              trace_sink=trace_sink, phase_index=phase_index,
                              check_invariants=check)
        _run_refine(state, deadline)
        right_prices = state.right_prices
        stats.phases.append(PhaseStats(eps=eps, steps=state.steps))

    if state.is_faithful:
        matching = flow_to_matching(instance, state.pseudoflow)
        prices = combined_prices(state.left_prices, state.right_prices)
    else:
        matching, prices = state.matching, state.right_prices
    stats.seconds = time.perf_counter() - started
    return SolverRun(matching=matching, stats=stats, prices=prices)


def solve_goldberg_kennedy(graph: WeightedBipartiteGraph, alpha=None, *,
                           keep_redundant_state: bool = True, reduction: str | None = None,
                           trace_sink: TraceSink | None = None,
                           check_invariants: bool | None = None, deadline=None) -> SolverRun:
    """``goldberg_kennedy`` keeping the statistics of the run."""
    alpha = coerce_alpha(alpha)
    if not feasibility_precheck(graph):
        raise InfeasibleInstanceError(f"No matching of {graph!r} covers every right vertex.")

    def runner(balanced):
        return run_gk_phases(balanced, alpha, keep_redundant_state=keep_redundant_state,
                             trace_sink=trace_sink, check_invariants=check_invariants,
                             deadline=deadline)

    run = solve_reduced(graph, reduction, runner)
    logger.info("%s solved %r in %d phases, %d double pushes (%.3fs)", run.stats.algorithm,
                graph, len(run.stats.phases), run.stats.steps, run.stats.seconds)
    return run


def goldberg_kennedy(graph: WeightedBipartiteGraph, alpha=None, *,
                     keep_redundant_state: bool = True, reduction: str | None = None,
                     trace_sink: TraceSink | None = None,
                     check_invariants: bool | None = None, deadline=None) -> Matching:
    """Minimum-weight matching covering every right vertex, via push-relabel."""
    return solve_goldberg_kennedy(graph, alpha, keep_redundant_state=keep_redundant_state,
                                  reduction=reduction, trace_sink=trace_sink,
                                  check_invariants=check_invariants, deadline=deadline).matching
