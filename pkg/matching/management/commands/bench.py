from django.core.management.base import BaseCommand, CommandError

from matching.bench import BenchConfig, run_bench
from matching.exceptions import MatchingError


class Command(BaseCommand):
    help = "Run a benchmark grid and write per-solve and aggregated CSV files."

    def add_arguments(self, parser):
        parser.add_argument("--config", required=True, help="JSON bench configuration")
        parser.add_argument("--out", required=True, help="Output directory")
        parser.add_argument("--workers", type=int, default=None,
                            help="Run instances in this many processes (default: sequential)")
        parser.add_argument("--gnuplot", action="store_true",
                            help="Also write one gnuplot .dat file per parameter")

    def handle(self, *args, **options):
        try:
            config = BenchConfig.from_file(options["config"])
            report = run_bench(config, options["out"], workers=options["workers"],
                               gnuplot=options["gnuplot"])
        except MatchingError as exc:
            raise CommandError(str(exc)) from exc

        counts = {}
        for row in report.rows:
            counts[row.status] = counts.get(row.status, 0) + 1
        summary = ", ".join(f"{count} {status}" for status, count in sorted(counts.items()))
        self.stdout.write(self.style.SUCCESS(f"{len(report.rows)} solves ({summary})"))
        for path in report.files:
            self.stdout.write(str(path))
