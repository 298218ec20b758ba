from django.core.management.base import BaseCommand, CommandError

from common.exceptions import ConfigurationError
from common.models import RunStatusEnum
from experiments.config import apply_overrides, load_configs, parse_config
from experiments.constants import EXIT_ERROR, EXIT_VIOLATION, ExperimentKindEnum
from experiments.models import ExperimentRun
from experiments.tasks import run_experiment_task


SUITE = 'suite'


class Command(BaseCommand):
    help = (
        'Runs an experiment config (or a suite of configs) and writes its CSV '
        'reports. Exits with 1 on errors and 2 when an inequality is violated.'
    )

    def add_arguments(self, parser):
        parser.add_argument(
            'kind',
            choices=[k.value for k in ExperimentKindEnum] + [SUITE],
            help='experiment kind of the config, or "suite" for a list of configs',
        )
        parser.add_argument('--config', required=True, help='YAML config file')
        parser.add_argument('--out', help='output directory, overrides the config')
        parser.add_argument('--seed', type=int, help='seed of the randomized boundary data')
        parser.add_argument('--grid-h', type=float, dest='grid_h', help='grid spacing h')
        parser.add_argument(
            '--refine',
            type=int,
            help='halve h this many times and extrapolate',
        )

    def _parse(self, raw: dict, kind: str, options: dict):
        raw = apply_overrides(
            raw,
            seed=options['seed'],
            spacing=options['grid_h'],
            refine=options['refine'],
            output=options['out'],
        )
        return parse_config(raw, None if kind == SUITE else kind)

    def handle(self, *args, **options):
        kind = options['kind']
        try:
            raws = load_configs(options['config'])
        except ConfigurationError as error:
            raise CommandError(str(error), returncode=EXIT_ERROR)
        if kind != SUITE and len(raws) != 1:
            raise CommandError(
                f'{options["config"]} holds {len(raws)} configs; run it as a suite',
                returncode=EXIT_ERROR,
            )

        configs, errors = [], 0
        for index, raw in enumerate(raws):
            try:
                configs.append(self._parse(raw, kind, options))
            except ConfigurationError as error:
                if kind != SUITE:
                    raise CommandError(str(error), returncode=EXIT_ERROR)
                self.stderr.write(f'Skipping config {index}: {error}')
                errors += 1

        runs = [
            ExperimentRun.objects.create(
                kind=config.kind.name,
                name=config.name,
                config=config.raw,
                seed=config.seed,
                output_dir=config.output or '',
            )
            for config in configs
        ]

        # every run is dispatched before any result is awaited
        results = []
        for experiment_run in runs:
            try:
                results.append(run_experiment_task.delay(experiment_run.pk))
            except Exception as error:
                # eager execution re-raises crashes at dispatch
                if kind != SUITE:
                    raise CommandError(f'{experiment_run.name}: {error}', returncode=EXIT_ERROR)
                self.stderr.write(f'{experiment_run.name} crashed: {error}')
        for result in results:
            result.get(propagate=False)

        violations = 0
        for experiment_run in runs:
            experiment_run.refresh_from_db()
            status = RunStatusEnum[experiment_run.status]
            if status == RunStatusEnum.FAILED:
                errors += 1
                self.stderr.write(f'{experiment_run.name}: {experiment_run.error}')
                continue
            violations += experiment_run.violation_count
            self.stdout.write(
                f'{experiment_run.name}: {status.value}, '
                f'{experiment_run.violation_count} violations, '
                f'wrote {", ".join(experiment_run.output_files)}'
            )

        if errors:
            message = runs[0].error if kind != SUITE and runs else f'{errors} runs failed'
            raise CommandError(message, returncode=EXIT_ERROR)
        if violations:
            raise CommandError(f'{violations} inequality violations found', returncode=EXIT_VIOLATION)
        self.stdout.write(self.style.SUCCESS(f'Finished {len(runs)} runs'))
