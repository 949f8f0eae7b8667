"""
Ensemble driver behind `manage.py simulate`.

Configurations are processed in chunks of `checkpoint_every`; each chunk is
split into contiguous index ranges for the joblib pool and the returned
crossing counts are folded into the entropy table strictly in configuration
order. The accumulated table therefore does not depend on the worker count,
the chunk size, or on whether the run was resumed.
"""

import json
import logging
import math
import time
from dataclasses import dataclass, asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from blocks.crossings import CrossingTable
from disorder.sampling import sample_couplings
from entropy.table import EntropyTable
from sdrg.engine import run_configuration
from .config import ConfigurationError, RunConfig
from .workers import WorkerTask, run_batch, split_range

logger = logging.getLogger(__name__)

ENTROPY_CSV = 'entropy.csv'
META_JSON = 'meta.json'
CHECKPOINT_FILE = 'checkpoint.npz'
EVENTS_DIR = 'events'
PILOT_SITES = 4096


@dataclass
class SimulationSummary:
    out_dir: str
    csv_path: str
    meta_path: str
    configurations: int
    singlets: int
    trios: int
    wall_time_seconds: float
    estimated_seconds: Optional[float] = None
    resumed_from: int = 0

    @property
    def trio_fraction(self) -> float:
        total = self.singlets + self.trios
        return self.trios / total if total else 0.0


def estimate_runtime(config: RunConfig, pilot_sites: int = PILOT_SITES) -> float:
    """
    Seconds for the whole ensemble, extrapolated from one pilot chain as
    N log N per configuration spread over the workers.
    """
    n_pilot = min(config.sites, pilot_sites)
    n_pilot -= n_pilot % 2
    couplings = sample_couplings(config.disorder_spec(), n_pilot, 0)
    start = time.perf_counter()
    run_configuration(config.model_kind(), couplings, n_pilot, config.kappa_left, config.kappa_right)
    elapsed = time.perf_counter() - start

    scale = (config.sites * math.log(config.sites)) / (n_pilot * math.log(n_pilot))
    estimate = elapsed * scale * config.configurations / config.workers
    logger.info(f"Pilot chain of {n_pilot} sites took {elapsed:.3f}s; estimated runtime {estimate:.1f}s")
    return estimate


def _load_checkpoint(path: Path, config: RunConfig):
    with np.load(path, allow_pickle=False) as data:
        fingerprint = str(data['fingerprint'])
        if fingerprint != config.fingerprint():
            raise ConfigurationError(
                f"Checkpoint {path} was written with a different configuration; "
                f"remove it or rerun without --resume"
            )
        table = EntropyTable.from_state(data)
        return table, int(data['next_index']), int(data['singlets']), int(data['trios'])


def _save_checkpoint(path: Path, config: RunConfig, table: EntropyTable,
                     next_index: int, singlets: int, trios: int):
    tmp = path.with_name(path.stem + '.tmp.npz')
    np.savez(
        tmp,
        fingerprint=np.asarray(config.fingerprint()),
        next_index=np.asarray(next_index),
        singlets=np.asarray(singlets),
        trios=np.asarray(trios),
        **table.state(),
    )
    tmp.replace(path)
    logger.info(f"Checkpoint written at configuration {next_index}")


def simulate(config: RunConfig,
             resume: bool = False,
             progress: bool = True,
             dump_events: int = 0,
             estimated_seconds: Optional[float] = None) -> SimulationSummary:
    """
    Run the ensemble and write entropy.csv and meta.json under config.out_dir.

    Args:
        config: Validated run configuration
        resume: Continue from checkpoint.npz when present
        progress: Show a tqdm bar
        dump_events: Write event logs of the first `dump_events` configurations
        estimated_seconds: Runtime estimate to echo into meta.json
    """
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / CHECKPOINT_FILE
    event_dir = None
    if dump_events > 0:
        event_dir = out_dir / EVENTS_DIR
        event_dir.mkdir(exist_ok=True)

    model = config.model_kind()
    ladder = config.ladder()
    table = EntropyTable(config.resolved_q_values(), ladder.sizes, config.two_s)
    next_index, singlets, trios = 0, 0, 0

    if resume and checkpoint.exists():
        table, next_index, singlets, trios = _load_checkpoint(checkpoint, config)
        logger.info(f"Resuming at configuration {next_index} of {config.configurations}")
    elif resume:
        logger.warning(f"No checkpoint in {out_dir}; starting from configuration 0")
    resumed_from = next_index

    logger.info(
        f"Simulating {config.configurations} configurations of {model.label}, N={config.sites}, "
        f"{len(ladder.sizes)} block sizes, {len(table.q_values)} q values, {config.workers} workers"
    )
    anchors = ladder.anchors(config.anchors)
    started = time.perf_counter()

    with Parallel(n_jobs=config.workers, backend='loky') as parallel, \
            tqdm(total=config.configurations, initial=next_index, desc='configurations',
                 unit='config', disable=not progress) as bar:
        while next_index < config.configurations:
            chunk_stop = min(next_index + config.checkpoint_every, config.configurations)
            tasks = [
                WorkerTask(
                    model=model,
                    disorder=config.disorder_spec(),
                    ladder=ladder,
                    start=lo,
                    stop=hi,
                    n_anchors=config.anchors,
                    kappa_left=config.kappa_left,
                    kappa_right=config.kappa_right,
                    debug=config.debug_checks,
                    event_dir=str(event_dir) if event_dir else None,
                    dump_events_below=dump_events,
                )
                for lo, hi in split_range(next_index, chunk_stop, config.workers)
            ]
            for result in parallel(delayed(run_batch)(task) for task in tasks):
                for counts in result.counts:
                    table.accumulate(CrossingTable(sizes=ladder.sizes, counts=counts, anchors=anchors))
                singlets += int(result.singlets.sum())
                trios += int(result.trios.sum())

            bar.update(chunk_stop - next_index)
            next_index = chunk_stop
            _save_checkpoint(checkpoint, config, table, next_index, singlets, trios)

    wall_time = time.perf_counter() - started
    csv_path = table.write_csv(out_dir / ENTROPY_CSV)
    summary = SimulationSummary(
        out_dir=str(out_dir),
        csv_path=str(csv_path),
        meta_path=str(out_dir / META_JSON),
        configurations=table.count,
        singlets=singlets,
        trios=trios,
        wall_time_seconds=wall_time,
        estimated_seconds=estimated_seconds,
        resumed_from=resumed_from,
    )
    write_meta(summary, config, table)
    logger.info(
        f"Finished {table.count} configurations in {wall_time:.1f}s; trio fraction {summary.trio_fraction:.4f}"
    )
    return summary


def write_meta(summary: SimulationSummary, config: RunConfig, table: EntropyTable) -> Path:
    from rsp_project import __version__

    meta = {
        'config': config.as_dict(),
        'model_label': config.model_kind().label,
        'q_values': list(table.q_values),
        'block_sizes': list(table.sizes),
        'fit_window': list(config.fit_window()),
        'fingerprint': config.fingerprint(),
        'trio_fraction': summary.trio_fraction,
        'code_version': __version__,
        'finished_at': datetime.now(timezone.utc).isoformat(),
        **asdict(summary),
    }
    path = Path(summary.meta_path)
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(meta, handle, indent=2)
    return path


def read_meta(run_dir) -> dict:
    path = Path(run_dir) / META_JSON
    if not path.exists():
        return {}
    with open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)


def record_run(summary: SimulationSummary, config: RunConfig):
    """Store the run in the database; an unavailable database only warns."""
    from django.db import DatabaseError
    from .models import SimulationRun

    try:
        return SimulationRun.objects.create(
            model=config.model,
            two_s=config.two_s,
            sites=config.sites,
            configurations=summary.configurations,
            seed=config.seed,
            output_dir=summary.out_dir,
            trio_fraction=summary.trio_fraction,
            wall_time_seconds=summary.wall_time_seconds,
        )
    except DatabaseError as e:
        logger.warning(f"Could not record simulation run: {e}")
        return None
