from django.core.management.base import BaseCommand, CommandError

from matching.exceptions import InfeasibleInstanceError, MatchingError
from matching.instances import read_instance
from matching.oracle import brute_force_optimum
from matching.solve import ALGORITHMS, log_solve, run_solver


class Command(BaseCommand):
    help = "Compare a solver's optimum weight with exhaustive enumeration on a small instance."

    def add_arguments(self, parser):
        parser.add_argument("--in", dest="instance", required=True, help="Instance file")
        parser.add_argument("--against", choices=ALGORITHMS, required=True)
        parser.add_argument("--alpha", default=None)

    def handle(self, *args, **options):
        algorithm = options["against"]
        try:
            graph = read_instance(options["instance"])
            optimum = brute_force_optimum(graph)
        except MatchingError as exc:
            raise CommandError(str(exc)) from exc

        try:
            result = run_solver(graph, algorithm, alpha=options["alpha"], check_invariants=True)
        except MatchingError as exc:
            if optimum is None and isinstance(exc, InfeasibleInstanceError):
                self.stdout.write(f"ok: {algorithm} and oracle agree the instance is infeasible")
                return
            log_solve(algorithm, graph, source="verify", label=options["instance"],
                      failure=type(exc).__name__)
            raise CommandError(f"{algorithm} failed: {exc}") from exc

        oracle_weight = optimum.weight if optimum is not None else None
        log_solve(algorithm, graph, source="verify", label=options["instance"], result=result,
                  oracle_weight=oracle_weight,
                  failure="" if result.weight == oracle_weight else "weight_mismatch")
        if optimum is None:
            raise CommandError(f"Oracle finds the instance infeasible but {algorithm} returned "
                               f"weight {result.weight}.")
        if result.weight != optimum.weight:
            raise CommandError(f"{algorithm} weight {result.weight} differs from oracle "
                               f"optimum {optimum.weight}.")
        self.stdout.write(f"ok: {algorithm} weight {result.weight} equals oracle optimum")
