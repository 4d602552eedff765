from django.core.management.base import BaseCommand, CommandError

from matching.exceptions import MatchingError
from matching.tracing import compare_traces, read_trace


class Command(BaseCommand):
    help = "Compare two step traces; prints the first divergence and fails if they differ."

    def add_arguments(self, parser):
        parser.add_argument("first")
        parser.add_argument("second")

    def handle(self, *args, **options):
        try:
            report = compare_traces(read_trace(options["first"]), read_trace(options["second"]))
        except (OSError, MatchingError) as exc:
            raise CommandError(str(exc)) from exc
        if report.is_empty:
            return
        self.stdout.write(report.describe())
        raise CommandError(f"Traces differ at event {report.divergence_index}.")
