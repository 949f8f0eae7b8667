import logging
import math
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from entropy.table import read_entropy_csv
from scaling.analysis import analyze_table, record_fit, write_fit_json
from scaling.fitting import FitError
from ensemble.config import ConfigurationError, RunConfig
from ensemble.runner import read_meta

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Fit gamma(q) on an entropy.csv, solve for q_ext and write fit.json"

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='input', required=True, help="entropy.csv written by simulate")
        parser.add_argument('--out', help="fit.json path (default: next to the CSV)")
        parser.add_argument('--config', help="Run file; defaults to the config echoed in meta.json")
        parser.add_argument('--model', choices=['heisenberg', 'biquadratic'])
        parser.add_argument('--two-s', type=int, dest='two_s')
        parser.add_argument('--l-min', type=float, dest='l_min')
        parser.add_argument('--l-max', type=float, dest='l_max')
        parser.add_argument('--unweighted', action='store_true', help="Unweighted quadratic fit of gamma(q)")
        parser.add_argument('--dgamma-policy', choices=['median', 'max'], dest='dgamma_policy')

    def _config(self, options, meta):
        overrides = {}
        if options['model']:
            overrides['model'] = options['model']
        if options['two_s'] is not None:
            overrides['two_s'] = options['two_s']
        if options['l_min'] is not None:
            overrides['scaling.l_min'] = options['l_min']
        if options['l_max'] is not None:
            overrides['scaling.l_max'] = options['l_max']
        if options['unweighted']:
            overrides['scaling.weighted'] = False
        if options['dgamma_policy']:
            overrides['scaling.dgamma_policy'] = options['dgamma_policy']

        if options['config']:
            return RunConfig.from_file(options['config'], overrides), True
        if meta.get('config'):
            return RunConfig.from_mapping(overrides, RunConfig.from_mapping(meta['config'])), True
        return RunConfig.from_mapping(overrides), False

    def handle(self, *args, **options):
        csv_path = Path(options['input'])
        if not csv_path.exists():
            raise CommandError(f"{csv_path} does not exist")
        out_path = Path(options['out']) if options['out'] else csv_path.with_name('fit.json')
        meta = read_meta(csv_path.parent)

        try:
            config, knows_sites = self._config(options, meta)
            config.model_kind()
            frame = read_entropy_csv(csv_path)
            if knows_sites:
                window = config.fit_window()
            else:
                window = (config.l_min if config.l_min is not None else 8.0,
                          config.l_max if config.l_max is not None else math.inf)
            fit = analyze_table(
                frame,
                model=config.model,
                two_s=config.two_s,
                window=window,
                weighted=config.weighted,
                dgamma_policy=config.dgamma_policy,
                trio_fraction=meta.get('trio_fraction'),
            )
        except (ConfigurationError, FitError) as e:
            raise CommandError(str(e))
        except ValueError as e:
            raise CommandError(f"Invalid entropy table {csv_path}: {e}")

        write_fit_json(fit, out_path)
        record_fit(fit, out_path)
        self.stdout.write(fit.summary())
