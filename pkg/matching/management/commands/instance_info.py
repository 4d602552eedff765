from django.core.management.base import BaseCommand, CommandError

from matching.auction import feasibility_precheck
from matching.exceptions import MatchingError
from matching.graph import density
from matching.instances import read_instance


class Command(BaseCommand):
    help = "Print size, weight range, density and feasibility of an instance."

    def add_arguments(self, parser):
        parser.add_argument("--in", dest="instance", required=True, help="Instance file")

    def handle(self, *args, **options):
        try:
            graph = read_instance(options["instance"])
        except MatchingError as exc:
            raise CommandError(str(exc)) from exc

        rho = density(graph)
        lines = [
            f"n {graph.n}",
            f"s {graph.s}",
            f"m {graph.m}",
            f"max_abs_weight {graph.max_abs_weight}",
            f"density {rho} ({float(rho):.4f})",
            f"balanced {'yes' if graph.is_balanced else 'no'}",
            f"feasible {'yes' if feasibility_precheck(graph) else 'no'}",
        ]
        self.stdout.write("\n".join(lines))
