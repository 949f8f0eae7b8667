import logging

from django.core.management.base import BaseCommand, CommandError

from entropy.table import LadderMismatchError
from entropy.tsallis import EntropyOverflowError
from sdrg.chain import DecimationError
from ensemble.config import ConfigurationError, RunConfig
from ensemble.runner import estimate_runtime, record_run, simulate

logger = logging.getLogger(__name__)


def parse_overrides(pairs):
    overrides = {}
    for pair in pairs or []:
        if '=' not in pair:
            raise CommandError(f"--set expects key=value, got '{pair}'")
        key, value = pair.split('=', 1)
        overrides[key.strip()] = value.strip()
    return overrides


class Command(BaseCommand):
    help = "Run a disorder ensemble through the decimation engine and write entropy.csv and meta.json"

    def add_arguments(self, parser):
        parser.add_argument('--config', help="key = value run file")
        parser.add_argument('--seed', type=int, help="Master seed")
        parser.add_argument('--workers', type=int, help="Size of the worker pool")
        parser.add_argument('--out', help="Output directory")
        parser.add_argument('--set', action='append', dest='overrides', metavar='KEY=VALUE',
                            help="Override any run-file key; repeatable")
        parser.add_argument('--resume', action='store_true', help="Continue from the checkpoint in --out")
        parser.add_argument('--dump-events', type=int, default=0, metavar='K',
                            help="Write event logs of the first K configurations")
        parser.add_argument('--no-estimate', action='store_true', help="Skip the pilot-chain runtime estimate")
        parser.add_argument('--no-progress', action='store_true', help="Hide the progress bar")

    def handle(self, *args, **options):
        overrides = parse_overrides(options['overrides'])
        for flag, key in (('seed', 'seed'), ('workers', 'workers'), ('out', 'out')):
            if options[flag] is not None:
                overrides[key] = options[flag]

        try:
            base = RunConfig.defaults()
            if options['config']:
                config = RunConfig.from_file(options['config'], overrides, base=base)
            else:
                config = RunConfig.from_mapping(overrides, base)
            config.validate()

            estimate = None
            if not options['no_estimate']:
                estimate = estimate_runtime(config)
                self.stdout.write(f"Estimated runtime: {estimate:.1f} s")

            summary = simulate(
                config,
                resume=options['resume'],
                progress=not options['no_progress'],
                dump_events=options['dump_events'],
                estimated_seconds=estimate,
            )
        except (ConfigurationError, LadderMismatchError) as e:
            raise CommandError(str(e))
        except EntropyOverflowError as e:
            raise CommandError(f"Aborted: {e}")
        except DecimationError as e:
            logger.error(f"Decimation failed: {e}", exc_info=True)
            raise CommandError(f"Decimation failed: {e}")

        record_run(summary, config)
        self.stdout.write(self.style.SUCCESS(
            f"{summary.configurations} configurations written to {summary.csv_path} "
            f"(trio fraction {summary.trio_fraction:.4f}, {summary.wall_time_seconds:.1f} s)"
        ))
