import logging
from contextlib import nullcontext

from django.core.management.base import BaseCommand, CommandError

from matching.exceptions import InvalidParameterError, MatchingError
from matching.instances import read_instance
from matching.reduction import REDUCTIONS
from matching.solve import ALGORITHMS, log_solve, run_solver
from matching.tracing import TRACED_ALGORITHMS, FileTraceSink

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Solve an instance and print the matched pairs followed by the optimum weight."

    def add_arguments(self, parser):
        parser.add_argument("--algo", choices=ALGORITHMS, required=True)
        parser.add_argument("--alpha", default=None, help="Scaling factor > 1, e.g. 5 or 3/2")
        parser.add_argument("--reduction", choices=REDUCTIONS, default=None,
                            help="Balancing reduction for unbalanced input")
        parser.add_argument("--no-scaling", action="store_true",
                            help="Auction only: one phase at the final eps, no scaling")
        parser.add_argument("--in", dest="instance", required=True, help="Instance file")
        parser.add_argument("--trace", default=None, help="Write a step trace to this file")
        parser.add_argument("--check-invariants", action="store_true",
                            help="Assert solver invariants while solving")

    def handle(self, *args, **options):
        algorithm = options["algo"]
        try:
            if options["no_scaling"] and algorithm != "auction":
                raise InvalidParameterError("--no-scaling only applies to the auction solver.")
            if options["trace"] and algorithm not in TRACED_ALGORITHMS:
                raise InvalidParameterError(f"--trace is not available for {algorithm}.")
            graph = read_instance(options["instance"])
        except MatchingError as exc:
            raise CommandError(str(exc)) from exc

        sink = FileTraceSink(options["trace"]) if options["trace"] else nullcontext()
        try:
            with sink as trace_sink:
                result = run_solver(
                    graph,
                    algorithm,
                    alpha=options["alpha"],
                    reduction=options["reduction"],
                    scaling=not options["no_scaling"],
                    trace_sink=trace_sink,
                    check_invariants=options["check_invariants"] or None,
                )
        except MatchingError as exc:
            log_solve(algorithm, graph, label=options["instance"], failure=type(exc).__name__)
            raise CommandError(str(exc)) from exc
        except Exception as exc:
            logger.exception("%s crashed on %s", algorithm, options["instance"])
            log_solve(algorithm, graph, label=options["instance"], failure=type(exc).__name__)
            raise CommandError(f"{algorithm} failed unexpectedly: {exc}") from exc

        log_solve(algorithm, graph, label=options["instance"], result=result)
        self.stdout.write("\n".join(result.lines()))
