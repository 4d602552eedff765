from django.core.management.base import BaseCommand, CommandError
from pydantic import ValidationError

from matching.exceptions import MatchingError
from matching.generators import GenSpec, generate_instance
from matching.instances import write_instance

MODEL_ALIASES = {"er": "erdos_renyi", "dd": "dispersed_degree"}
WEIGHT_ALIASES = {"u": "uniform", "ulh": "uniform_low_high", "loh": "low_or_high"}


class Command(BaseCommand):
    help = "Generate a random weighted bipartite instance and write it in the instance text format."

    def add_arguments(self, parser):
        parser.add_argument("--model", choices=sorted(MODEL_ALIASES), required=True)
        parser.add_argument("--n", type=int, required=True, help="Left side size")
        parser.add_argument("--s", type=int, required=True, help="Right side size (s <= n)")
        parser.add_argument("--density", type=float, required=True)
        parser.add_argument("--rnorm", type=float, default=0.0,
                            help="Normalized dispersion radius (dispersed-degree only)")
        parser.add_argument("--weights", choices=sorted(WEIGHT_ALIASES), default="u")
        parser.add_argument("--plow", type=float, default=0.5,
                            help="Probability of the low weight part (ulh/loh only)")
        parser.add_argument("--seed", type=int, required=True)
        parser.add_argument("--out", required=True, help="Output instance file")

    def handle(self, *args, **options):
        try:
            spec = GenSpec(
                model=MODEL_ALIASES[options["model"]],
                n=options["n"],
                s=options["s"],
                d=options["density"],
                r_norm=options["rnorm"],
                weight_model=WEIGHT_ALIASES[options["weights"]],
                p_low=options["plow"],
                seed=options["seed"],
            )
        except ValidationError as exc:
            raise CommandError(f"Invalid generator parameters:\n{exc}") from exc

        try:
            graph = generate_instance(spec)
            write_instance(graph, options["out"])
        except MatchingError as exc:
            raise CommandError(str(exc)) from exc
        self.stdout.write(f"{graph.n} {graph.s} {graph.m} -> {options['out']}")
