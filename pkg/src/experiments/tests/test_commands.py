from io import StringIO
import math
import os
import tempfile

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from common.models import RunStatusEnum
from experiments.constants import EXIT_ERROR, EXIT_VIOLATION
from experiments.models import ExperimentRun


ORACLE = '''
experiment:
  kind: oracle
  name: oracle
sweep:
  pairs: [[3, 4]]
'''

ABP_VIOLATION = '''
experiment:
  kind: abp
  name: parabola
coefficients:
  dimension: 1
  g: -1
domain:
  shape: interval
  a: 0
  b: 1
sweep:
  abp_constant: 0.1
'''

EMPTY_RADII = '''
experiment:
  kind: harnack
coefficients:
  dimension: 1
sweep:
  radii: []
'''

CALIBRATION = '''
experiment:
  kind: calibration
  name: calibration
coefficients:
  dimension: 1
domain:
  boundary: random
grid:
  spacing: 0.1
sweep:
  radii: [2]
'''

SMALL_CHAIN = '''
experiment:
  kind: chain
  name: small
coefficients:
  dimension: 1
sweep:
  radii: [2]
'''


class LabCommandTestCase(TestCase):
    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.output = directory.name

    def _config(self, text):
        path = os.path.join(self.output, f'config_{len(os.listdir(self.output))}.yaml')
        with open(path, 'w') as stream:
            stream.write(text)
        return path

    def _call(self, kind, text, **options):
        stdout = StringIO()
        call_command(
            'lab',
            kind,
            config=self._config(text),
            out=self.output,
            stdout=stdout,
            stderr=StringIO(),
            **options,
        )
        return stdout.getvalue()

    def test_oracle_run(self):
        output = self._call('oracle', ORACLE)

        experiment_run = ExperimentRun.objects.get()
        self.assertEqual(experiment_run.status, RunStatusEnum.COMPLETED.name)
        self.assertEqual(experiment_run.output_files, ['oracle.csv', 'oracle_summary.csv'])
        self.assertEqual(experiment_run.summary['pairs'], 1)
        self.assertIn('Finished 1 runs', output)

        with open(os.path.join(self.output, 'oracle.csv')) as stream:
            header, row = stream.read().splitlines()
        self.assertEqual(header, 'b,c,D,D_minus,measured_decay_rate,A')
        self.assertIn(repr(3 + math.sqrt(13)), row.split(','))

    def test_seed_override_is_stored(self):
        self._call('oracle', ORACLE, seed=11)

        self.assertEqual(ExperimentRun.objects.get().seed, 11)

    def test_empty_radius_grid(self):
        with self.assertRaises(CommandError) as context:
            self._call('harnack', EMPTY_RADII)

        self.assertEqual(context.exception.returncode, EXIT_ERROR)
        self.assertIn('sweep.radii', str(context.exception))
        self.assertFalse(ExperimentRun.objects.exists())

    def test_violation_exit_code(self):
        with self.assertRaises(CommandError) as context:
            self._call('abp', ABP_VIOLATION)

        self.assertEqual(context.exception.returncode, EXIT_VIOLATION)
        experiment_run = ExperimentRun.objects.get()
        self.assertEqual(experiment_run.status, RunStatusEnum.VIOLATION.name)
        self.assertEqual(experiment_run.violation_count, 1)

    def test_kind_mismatch(self):
        with self.assertRaises(CommandError) as context:
            self._call('harnack', ORACLE)

        self.assertEqual(context.exception.returncode, EXIT_ERROR)

    def test_single_kind_rejects_a_suite_file(self):
        suite = '''
- experiment:
    kind: oracle
  sweep:
    pairs: [[0, 1]]
- experiment:
    kind: oracle
  sweep:
    pairs: [[1, 1]]
'''

        with self.assertRaises(CommandError) as context:
            self._call('oracle', suite)

        self.assertEqual(context.exception.returncode, EXIT_ERROR)

    def test_suite_skips_invalid_configs(self):
        suite = '''
- experiment:
    kind: oracle
    name: valid
  sweep:
    pairs: [[0, 1]]
- experiment:
    kind: harnack
  sweep:
    radii: []
'''

        with self.assertRaises(CommandError) as context:
            self._call('suite', suite)

        self.assertEqual(context.exception.returncode, EXIT_ERROR)
        experiment_run = ExperimentRun.objects.get()
        self.assertEqual(experiment_run.name, 'valid')
        self.assertEqual(experiment_run.status, RunStatusEnum.COMPLETED.name)

    def test_numerical_failure_is_recorded(self):
        with self.assertRaises(CommandError) as context:
            self._call('chain', SMALL_CHAIN)

        self.assertEqual(context.exception.returncode, EXIT_ERROR)
        experiment_run = ExperimentRun.objects.get()
        self.assertEqual(experiment_run.status, RunStatusEnum.FAILED.name)
        self.assertIn('DomainError', experiment_run.error)
        self.assertEqual(str(context.exception), experiment_run.error)

    def test_calibration_run(self):
        self._call('calibration', CALIBRATION)

        experiment_run = ExperimentRun.objects.get()
        self.assertEqual(experiment_run.kind, 'CALIBRATION')
        self.assertEqual(experiment_run.status, RunStatusEnum.COMPLETED.name)
        self.assertEqual(experiment_run.summary['training_size'], 9)
        self.assertEqual(experiment_run.summary['held_out_size'], 20)
        self.assertEqual(
            experiment_run.output_files, ['calibration.csv', 'calibration_summary.csv']
        )
