"""ε-scaling schedule shared by the auction and push-relabel solvers.

Weights are multiplied by (n + 1) so every ε in the schedule is an integer
and the last phase, ε = 1, stands for ε = 1/(n + 1) < 1/n on the original
weights.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .conf import matching_setting
from .exceptions import InvalidGraphError, InvalidParameterError, SolveTimeoutError


INT64_MAX = int(np.iinfo(np.int64).max)
# Bounds keeping w - p, the single-neighbour gap and the push-relabel left
# prices inside int64.
WEIGHT_LIMIT = INT64_MAX // 16
PRICE_LIMIT = INT64_MAX // 4


def scale_weights(balanced):
    """Multiply the weights by (n + 1), refusing instances that leave no int64 headroom."""
    factor = balanced.n + 1
    if balanced.max_abs_weight * factor > WEIGHT_LIMIT:
        raise InvalidGraphError(
            f"Weights up to {balanced.max_abs_weight} are too large to scale by {factor}; "
            f"the largest supported |w| is {WEIGHT_LIMIT // factor}."
        )
    return balanced.scaled(factor)


def check_price(value: int, v: int) -> int:
    """Return ``value`` if it is a safe price for right vertex ``v``."""
    if abs(value) > PRICE_LIMIT:
        raise InvalidGraphError(
            f"Price of right vertex {v} reached {value}; the weights are too large "
            "for exact integer prices."
        )
    return value


def check_headroom(graph, prices) -> None:
    """Refuse a phase whose weights or starting prices could overflow int64."""
    if graph.max_abs_weight > WEIGHT_LIMIT:
        raise InvalidGraphError(
            f"Weights up to {graph.max_abs_weight} exceed the supported {WEIGHT_LIMIT}."
        )
    if prices.size and int(np.abs(prices).max()) > PRICE_LIMIT:
        raise InvalidParameterError(f"Prices must stay within +/-{PRICE_LIMIT}.")


def coerce_alpha(alpha=None) -> Fraction:
    """Parse the scaling factor (int, float, str like '5' or '3/2')."""
    if alpha is None:
        alpha = matching_setting("MATCHING_DEFAULT_ALPHA")
    try:
        value = Fraction(str(alpha))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParameterError(f"Scaling factor {alpha!r} is not a number.") from exc
    if value <= 1:
        raise InvalidParameterError(f"Scaling factor must be greater than 1, got {alpha}.")
    return value


def epsilon_schedule(scaled_max_weight: int, alpha: Fraction) -> Iterator[int]:
    """Yield ε_1, ε_2, ..., ending with exactly one phase at ε = 1.

    ε_0 is the scaled maximum weight and ε_{k+1} = max(1, floor(ε_k / α)).
    """
    eps = int(scaled_max_weight)
    while True:
        eps = max(1, int(eps // alpha))
        yield eps
        if eps == 1:
            return


@dataclass
class PhaseStats:
    eps: int
    steps: int = 0


@dataclass
class SolveStats:
    """What a solver did: phases with their ε and step counts."""

    algorithm: str
    phases: list[PhaseStats] = field(default_factory=list)
    augmentations: int = 0
    seconds: float = 0.0

    @property
    def steps(self) -> int:
        return sum(phase.steps for phase in self.phases) + self.augmentations


class Deadline:
    """Cooperative time limit polled from solver loops."""

    def __init__(self, seconds: float | None):
        self.expires_at = None if seconds is None else time.monotonic() + seconds
        self.seconds = seconds

    def check(self) -> None:
        if self.expires_at is not None and time.monotonic() > self.expires_at:
            raise SolveTimeoutError(f"Solve exceeded its {self.seconds:g}s limit.")

    @classmethod
    def coerce(cls, deadline) -> "Deadline":
        if isinstance(deadline, Deadline):
            return deadline
        return cls(deadline)


@dataclass
class SolverRun:
    """A solver's matching on the graph it was run on, plus its statistics."""

    matching: object
    stats: SolveStats
    prices: object = None
