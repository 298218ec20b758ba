import math
import os
import tempfile

from django.test import SimpleTestCase
import numpy as np

from experiments.config import parse_config
from experiments.constants import ExperimentKindEnum
from experiments.reports import format_value, json_safe, render_table, table_file_name, write_report
from experiments.runners import ExperimentReport, Table, run


def random_harnack(seed):
    return parse_config(
        {
            'experiment': {'kind': 'harnack', 'name': 'random', 'seed': seed},
            'coefficients': {'dimension': 1, 'c': -1},
            'domain': {'boundary': 'random'},
            'grid': {'spacing': 0.05},
            'sweep': {'radii': [4, 8]},
        }
    )


class FormatValueTestCase(SimpleTestCase):
    def test_values(self):
        self.assertEqual(format_value(True), 'true')
        self.assertEqual(format_value(False), 'false')
        self.assertEqual(format_value(0.1), '0.1')
        self.assertEqual(format_value(1 / 3), repr(1 / 3))
        self.assertEqual(format_value(math.inf), 'inf')
        self.assertEqual(format_value(-math.inf), '-inf')
        self.assertEqual(format_value(math.nan), 'nan')
        self.assertEqual(format_value(np.float64(2.5)), '2.5')
        self.assertEqual(format_value(np.bool_(True)), 'true')
        self.assertEqual(format_value(None), '')
        self.assertEqual(format_value(7), '7')

    def test_json_safe(self):
        summary = json_safe({'rate': np.float64(1.5), 'ratio': math.inf, 'verdict': 'Holds'})

        self.assertEqual(summary, {'rate': 1.5, 'ratio': 'inf', 'verdict': 'Holds'})


class RenderTableTestCase(SimpleTestCase):
    def test_header_and_rows(self):
        text = render_table(['R', 'ratio', 'violated'], [{'R': 4.0, 'ratio': math.inf, 'violated': False}])

        self.assertEqual(text, 'R,ratio,violated\n4.0,inf,false\n')

    def test_missing_cells_are_empty(self):
        self.assertEqual(render_table(['a', 'b'], [{'a': 1}]), 'a,b\n1,\n')

    def test_file_names(self):
        self.assertEqual(table_file_name('cosh', Table('', [], [])), 'cosh.csv')
        self.assertEqual(table_file_name('cosh', Table('decay', [], [])), 'cosh_decay.csv')


class WriteReportTestCase(SimpleTestCase):
    def _output(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        return directory.name

    def _read(self, directory, name):
        with open(os.path.join(directory, name), 'rb') as stream:
            return stream.read()

    def test_tables_and_summary(self):
        report = ExperimentReport(
            ExperimentKindEnum.ORACLE,
            'oracle',
            [Table('', ['b', 'c'], [{'b': 0.0, 'c': 1.0}])],
            0,
            {'pairs': 1},
        )
        output = self._output()

        written = write_report(report, output)

        self.assertEqual(written, ['oracle.csv', 'oracle_summary.csv'])
        self.assertEqual(self._read(output, 'oracle.csv'), b'b,c\n0.0,1.0\n')
        self.assertEqual(self._read(output, 'oracle_summary.csv'), b'quantity,value\npairs,1\n')

    def test_rerun_overwrites(self):
        report = ExperimentReport(ExperimentKindEnum.ORACLE, 'oracle', [], 0, {'pairs': 1})
        output = self._output()

        write_report(report, output)
        written = write_report(report, output)

        self.assertEqual(written, ['oracle_summary.csv'])
        self.assertEqual(sorted(os.listdir(output)), ['oracle_summary.csv'])

    def test_same_seed_same_bytes(self):
        first, second = self._output(), self._output()

        write_report(run(random_harnack(3)), first)
        write_report(run(random_harnack(3)), second)

        for name in ('random.csv', 'random_summary.csv'):
            self.assertEqual(self._read(first, name), self._read(second, name))

    def test_seed_changes_the_output(self):
        first, second = self._output(), self._output()

        write_report(run(random_harnack(3)), first)
        write_report(run(random_harnack(4)), second)

        self.assertNotEqual(self._read(first, 'random.csv'), self._read(second, 'random.csv'))
