"""Benchmark grid: generate instances, time every solver, cross-check weights.

A run expands a ``BenchConfig`` into cells (one per combination of
parameters that applies), generates ``repetitions`` instances per cell and
times each enabled algorithm on each. Timing covers the solve only:
generation, the feasibility precheck and building the balanced graph for
the auction and push-relabel solvers happen before the clock starts.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from itertools import product, repeat
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError

from .auction import feasibility_precheck, run_auction_phases
from .conf import matching_setting
from .exceptions import InvalidParameterError, SolveTimeoutError, WeightMismatchError
from .generators import GenSpec, generate_instance
from .goldberg_kennedy import run_gk_phases
from .graph import matching_weight
from .hungarian import run_hungarian
from .reduction import prepare_balanced, project_matching
from .scaling import Deadline, coerce_alpha

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
S_RULES = ("log_n", "sqrt_n", "n")
SLICE_PARAMETERS = ("edge_model", "cost_model", "n", "s_rule", "density", "r_norm", "p_low")
LOG_BASE_NOTE = "# s_rule log_n means s = max(1, round(log2(n))), base-2 logarithm"

Unit = Annotated[float, Field(ge=0.0, le=1.0)]


class BenchConfig(BaseModel):
    """Benchmark grid description, read from a versioned JSON file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    schema_version: Literal[1] = SCHEMA_VERSION
    edge_models: list[Literal["erdos_renyi", "dispersed_degree"]] = Field(min_length=1)
    cost_models: list[Literal["uniform", "uniform_low_high", "low_or_high"]] = Field(min_length=1)
    n_values: list[PositiveInt] = Field(min_length=1)
    s_rules: list[Literal["log_n", "sqrt_n", "n"]] = Field(default=["n"], min_length=1)
    densities: list[Unit] = Field(min_length=1)
    r_norms: list[Unit] = Field(default=[0.5], min_length=1)
    p_lows: list[Unit] = Field(default=[0.5], min_length=1)
    repetitions: int = Field(default=10, ge=1)
    algorithms: list[Literal["auction", "gk", "gk-lean", "hungarian"]] = Field(
        default=["auction", "gk", "hungarian"], min_length=1
    )
    seed_base: int = Field(default=0, ge=0)
    time_limit: float | None = Field(default=None, gt=0)
    alpha: int | float | str | None = None
    reduction: Literal["double", "pad"] | None = None

    @classmethod
    def from_file(cls, path) -> "BenchConfig":
        path = Path(path)
        try:
            return cls.model_validate_json(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidParameterError(f"Cannot read bench config '{path}': {exc}") from exc
        except ValidationError as exc:
            raise InvalidParameterError(f"Invalid bench config '{path}':\n{exc}") from exc

    @property
    def effective_time_limit(self) -> float:
        if self.time_limit is not None:
            return self.time_limit
        return float(matching_setting("MATCHING_BENCH_TIME_LIMIT"))


def side_for_rule(rule: str, n: int) -> int:
    """Right-side size for an s rule."""
    if rule == "log_n":
        return max(1, round(math.log2(n)))
    if rule == "sqrt_n":
        return max(1, round(math.sqrt(n)))
    if rule == "n":
        return n
    raise InvalidParameterError(f"Unknown s rule {rule!r}; choose one of {S_RULES}.")


@dataclass(frozen=True)
class BenchCell:
    edge_model: str
    cost_model: str
    n: int
    s_rule: str
    s: int
    density: float
    r_norm: float | None
    p_low: float | None

    def key(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def seed(self, seed_base: int, repetition: int) -> int:
        """seed_base + stable hash of the cell + repetition index."""
        digest = hashlib.sha256(self.key().encode("ascii")).digest()
        return (seed_base + int.from_bytes(digest[:4], "big") + repetition) % 2**64

    def gen_spec(self, seed: int) -> GenSpec:
        return GenSpec(
            model=self.edge_model,
            n=self.n,
            s=self.s,
            d=self.density,
            r_norm=self.r_norm if self.r_norm is not None else 0.0,
            weight_model=self.cost_model,
            p_low=self.p_low if self.p_low is not None else 0.5,
            seed=seed,
        )


def expand_grid(config: BenchConfig) -> list[BenchCell]:
    """Every applicable parameter combination, in config order, without repeats.

    r_norm only applies to the dispersed-degree model, p_low only to the
    two split weight models.
    """
    cells: list[BenchCell] = []
    seen = set()
    for edge_model, cost_model, n, s_rule, density in product(
        config.edge_models, config.cost_models, config.n_values, config.s_rules, config.densities
    ):
        r_norms = config.r_norms if edge_model == "dispersed_degree" else [None]
        p_lows = config.p_lows if cost_model != "uniform" else [None]
        for r_norm, p_low in product(r_norms, p_lows):
            cell = BenchCell(edge_model, cost_model, n, s_rule, side_for_rule(s_rule, n),
                             density, r_norm, p_low)
            if cell not in seen:
                seen.add(cell)
                cells.append(cell)
    return cells


@dataclass
class BenchRow:
    edge_model: str
    cost_model: str
    n: int
    s_rule: str
    s: int
    density: float
    r_norm: float | None
    p_low: float | None
    repetition: int
    algorithm: str
    weight: int | None
    millis: float
    status: Literal["ok", "timeout", "infeasible"]


RESULT_COLUMNS = [f.name for f in fields(BenchRow)]


def _solve_timed(graph, prepared, algorithm: str, config: BenchConfig, alpha):
    """Return (weight, millis) for one solve; SolveTimeoutError passes through."""
    deadline = Deadline(config.effective_time_limit)
    started = time.perf_counter()
    if algorithm == "hungarian":
        matching = run_hungarian(graph, check_invariants=False, deadline=deadline).matching
    else:
        balanced, mapping = prepared
        if algorithm == "auction":
            run = run_auction_phases(balanced, alpha, check_invariants=False, deadline=deadline)
        else:
            run = run_gk_phases(balanced, alpha, keep_redundant_state=(algorithm == "gk"),
                                check_invariants=False, deadline=deadline)
        matching = project_matching(run.matching, mapping)
    millis = (time.perf_counter() - started) * 1000.0
    return matching_weight(graph, matching), millis


def run_instance(cell: BenchCell, repetition: int, config: BenchConfig) -> list[BenchRow]:
    """Generate one instance of ``cell`` and run every configured algorithm on it."""
    graph = generate_instance(cell.gen_spec(cell.seed(config.seed_base, repetition)))
    base = asdict(cell)

    if not feasibility_precheck(graph):
        logger.info("Cell %s repetition %d is infeasible", cell.key(), repetition)
        return [BenchRow(**base, repetition=repetition, algorithm=algorithm, weight=None,
                         millis=0.0, status="infeasible") for algorithm in config.algorithms]

    alpha = coerce_alpha(config.alpha)
    needs_balanced = any(algorithm != "hungarian" for algorithm in config.algorithms)
    prepared = prepare_balanced(graph, config.reduction) if needs_balanced else None

    rows = []
    for algorithm in config.algorithms:
        try:
            weight, millis = _solve_timed(graph, prepared, algorithm, config, alpha)
            status = "ok"
        except SolveTimeoutError:
            logger.warning("%s timed out on cell %s repetition %d", algorithm, cell.key(), repetition)
            weight, millis, status = None, config.effective_time_limit * 1000.0, "timeout"
        rows.append(BenchRow(**base, repetition=repetition, algorithm=algorithm,
                             weight=weight, millis=millis, status=status))

    weights = {row.algorithm: row.weight for row in rows if row.status == "ok"}
    if len(set(weights.values())) > 1:
        raise WeightMismatchError(
            f"Solvers disagree on cell {cell.key()} repetition {repetition}: {weights}"
        )
    return rows


def run_grid(config: BenchConfig, workers: int | None = None) -> list[BenchRow]:
    """Run every cell and repetition; sequential unless ``workers`` > 1."""
    cells = expand_grid(config)
    tasks = [(cell, rep) for cell in cells for rep in range(config.repetitions)]
    logger.info("Bench grid: %d cells, %d instances, algorithms %s",
                len(cells), len(tasks), ", ".join(config.algorithms))

    rows: list[BenchRow] = []
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            batches = executor.map(run_instance, *zip(*tasks), repeat(config))
            for batch in batches:
                rows.extend(batch)
    else:
        for index, (cell, rep) in enumerate(tasks, start=1):
            rows.extend(run_instance(cell, rep, config))
            if rep == config.repetitions - 1:
                logger.info("Finished cell %d/%d: %s", index // config.repetitions, len(cells),
                            cell.key())
    return rows


# ---------------------------------------------------------------------------
# Aggregation and output
# ---------------------------------------------------------------------------

@dataclass
class SliceSummary:
    parameter: str
    value: object
    algorithm: str
    count: int
    mean_millis: float
    min_millis: float
    max_millis: float


SUMMARY_COLUMNS = [f.name for f in fields(SliceSummary)]


def aggregate(rows: list[BenchRow]) -> list[SliceSummary]:
    """Mean/min/max solve time of finished solves, grouped by each parameter alone.

    Slices without a single finished solve are left out with a warning.
    """
    summaries = []
    for parameter in SLICE_PARAMETERS:
        groups: dict[tuple, list[float]] = defaultdict(list)
        for row in rows:
            value = getattr(row, parameter)
            if value is None:
                continue
            times = groups[(value, row.algorithm)]
            if row.status == "ok":
                times.append(row.millis)
        for (value, algorithm), times in groups.items():
            if not times:
                logger.warning("No finished %s solves with %s=%s; slice omitted",
                               algorithm, parameter, value)
                continue
            data = np.asarray(times, dtype=float)
            summaries.append(SliceSummary(parameter, value, algorithm, int(data.size),
                                          float(data.mean()), float(data.min()), float(data.max())))
    return summaries


def _csv_value(value):
    return "" if value is None else value


def write_results_csv(rows: list[BenchRow], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(LOG_BASE_NOTE + "\n")
        writer = csv.DictWriter(handle, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for row in rows:
            record = {key: _csv_value(value) for key, value in asdict(row).items()}
            record["millis"] = f"{row.millis:.3f}"
            writer.writerow(record)
    return path


def write_summary_csv(summaries: list[SliceSummary], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for summary in summaries:
            record = asdict(summary)
            for key in ("mean_millis", "min_millis", "max_millis"):
                record[key] = f"{record[key]:.3f}"
            writer.writerow(record)
    return path


def write_gnuplot(summaries: list[SliceSummary], directory) -> list[Path]:
    """One ``<parameter>.dat`` per parameter, one data block per algorithm.

    Blocks are separated by two blank lines so gnuplot's ``index`` selects
    an algorithm; columns are value, mean, min, max, count.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    by_parameter: dict[str, dict[str, list[SliceSummary]]] = defaultdict(lambda: defaultdict(list))
    for summary in summaries:
        by_parameter[summary.parameter][summary.algorithm].append(summary)

    written = []
    for parameter, per_algorithm in by_parameter.items():
        path = directory / f"{parameter}.dat"
        blocks = []
        for algorithm, items in per_algorithm.items():
            lines = [f"# {algorithm}: {parameter} mean_ms min_ms max_ms count"]
            for item in sorted(items, key=lambda entry: str(entry.value)):
                lines.append(f"{item.value} {item.mean_millis:.3f} {item.min_millis:.3f} "
                             f"{item.max_millis:.3f} {item.count}")
            blocks.append("\n".join(lines))
        path.write_text("\n\n\n".join(blocks) + "\n", encoding="utf-8")
        written.append(path)
    return written


def record_bench_rows(rows: list[BenchRow]) -> None:
    """Bulk-insert finished solves into ``SolveLog``; never raises."""
    try:
        # Lazy import keeps the harness usable without a database.
        from .models import SolveLog  # noqa: PLC0415

        SolveLog.objects.bulk_create([
            SolveLog(
                algorithm=row.algorithm,
                source="bench",
                instance_label=f"{row.edge_model}/{row.cost_model} n={row.n} s={row.s} "
                               f"d={row.density} rep={row.repetition}",
                n=row.n,
                s=row.s,
                weight=row.weight,
                latency_ms=int(row.millis),
                success=row.status == "ok",
                failure_reason="" if row.status == "ok" else row.status,
            )
            for row in rows
        ])
    except Exception:  # noqa: BLE001
        logger.debug("Could not record bench rows", exc_info=True)


@dataclass
class BenchReport:
    rows: list[BenchRow]
    summaries: list[SliceSummary]
    files: list[Path]


def run_bench(config: BenchConfig, out_dir, *, workers: int | None = None,
              gnuplot: bool = False) -> BenchReport:
    """Run the grid and write ``results.csv``, ``summary.csv`` (and .dat files)."""
    out_dir = Path(out_dir)
    rows = run_grid(config, workers=workers)
    summaries = aggregate(rows)
    files = [write_results_csv(rows, out_dir / "results.csv"),
             write_summary_csv(summaries, out_dir / "summary.csv")]
    if gnuplot:
        files.extend(write_gnuplot(summaries, out_dir / "gnuplot"))
    record_bench_rows(rows)
    logger.info("Bench wrote %d rows to %s", len(rows), out_dir)
    return BenchReport(rows=rows, summaries=summaries, files=files)
