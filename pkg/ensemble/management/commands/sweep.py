from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from scaling.fitting import FitError
from ensemble.sweep import sweep


class Command(BaseCommand):
    help = "Collate fit.json files into qext_vs_ceff.csv and fit q_ext = 1 - k / c_eff"

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='inputs', nargs='+', required=True,
                            help="Run directories or fit.json files, one per model")
        parser.add_argument('--out', default='qext_vs_ceff.csv')

    def handle(self, *args, **options):
        try:
            result = sweep(options['inputs'], Path(options['out']))
        except (FitError, FileNotFoundError, KeyError, ValueError) as e:
            raise CommandError(str(e))

        for label_a, label_b, difference, combined in result.same_spin_pairs:
            self.stdout.write(f"{label_a} vs {label_b}: |dq_ext| = {difference:.4f} (combined error {combined:.4f})")
        self.stdout.write(self.style.SUCCESS(result.summary()))
