import logging

from celery import shared_task

from common.exceptions import LabError
from common.models import RunStatusEnum

from .config import parse_config
from .models import ExperimentRun
from .reports import json_safe, write_report
from .runners import run


logger = logging.getLogger(__name__)


@shared_task
def run_experiment_task(run_id: int) -> str:
    """
    Runs the experiment recorded as ExperimentRun `run_id` and writes its CSV
    files. Numerical failures are recorded on the run; anything else is
    recorded and re-raised.
    """
    experiment_run = ExperimentRun.objects.get(pk=run_id)
    logger.info(f'Starting experiment run {run_id} ({experiment_run.name})...')
    experiment_run.mark(RunStatusEnum.RUNNING)

    try:
        config = parse_config(experiment_run.config)
        report = run(config)
        files = write_report(report, experiment_run.output_dir or None)
    except LabError as error:
        logger.error(f'Experiment run {run_id} failed: {error}')
        experiment_run.error = f'{type(error).__name__}: {error}'
        experiment_run.save(update_fields=['error', 'updated_at'])
        experiment_run.mark(RunStatusEnum.FAILED)
        return experiment_run.status
    except Exception as error:
        logger.exception(f'Experiment run {run_id} crashed')
        experiment_run.error = f'{type(error).__name__}: {error}'
        experiment_run.save(update_fields=['error', 'updated_at'])
        experiment_run.mark(RunStatusEnum.FAILED)
        raise

    experiment_run.output_files = files
    experiment_run.violation_count = report.violations
    experiment_run.summary = json_safe(report.summary)
    experiment_run.save(update_fields=['output_files', 'violation_count', 'summary', 'updated_at'])

    status = RunStatusEnum.VIOLATION if report.violations else RunStatusEnum.COMPLETED
    experiment_run.mark(status)
    logger.info(f'Experiment run {run_id} finished: {status.value}')
    return experiment_run.status
