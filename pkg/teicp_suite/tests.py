import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.apps import apps
from django.core.management import call_command
from django.core.management.base import CommandError
from django.db import connections
from django.test import SimpleTestCase, override_settings

from pareto.experiments import RUN_COLUMNS, TRACE_COLUMNS
from pareto.problems import random_symmetric
from pareto.tensor import dump_tensor


def run_command(name, *args):
    """Run a management command, returning (exit code, stdout)."""
    out = StringIO()
    try:
        call_command(name, *args, stdout=out)
    except CommandError as exc:
        return exc.returncode, out.getvalue()
    return 0, out.getvalue()


def read_csv(path):
    with open(path, newline='') as handle:
        return list(csv.reader(handle))


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()


class SolveCommandTest(CommandTestCase):
    def test_single_solver_row_and_trace_file(self):
        path = self.tmp / 'solve.csv'
        code, out = run_command('solve', '--problem=ex2:n=5', '--solver=spg1', '--x0=1,1,1,1,1', f'--out={path}')

        self.assertEqual(code, 0)
        self.assertIn('SPG1', out)
        self.assertIn('0.8000', out)
        rows = read_csv(path)
        self.assertEqual(rows[0], TRACE_COLUMNS)
        self.assertTrue(all(row[1] == 'spg1' for row in rows[1:]))
        self.assertLessEqual(len(rows) - 1, 11)

    def test_kofidis_regalia_table_row(self):
        code, out = run_command('solve', '--problem=ex1', '--solver=spg1', '--x0=1,1,1', f'--out={self.tmp / "a.csv"}')
        self.assertEqual(code, 0)
        self.assertIn('0.3633', out)

    def test_json_output_mirrors_reports(self):
        path = self.tmp / 'solve.json'
        code, _ = run_command(
            'solve', '--problem=ex2:n=4', '--solver=spg1', '--solver=spg2', '--format=json', f'--out={path}',
        )
        self.assertEqual(code, 0)
        document = json.loads(path.read_text())
        self.assertEqual(document['problem'], 'ex2:n=4')
        self.assertEqual([r['solver'] for r in document['reports']], ['spg1', 'spg2'])
        self.assertNotIn('wall_time', document['reports'][0])
        self.assertEqual(len(document['reports'][0]['trace']), document['reports'][0]['iters'] + 1)

    def test_record_time_adds_wall_time(self):
        path = self.tmp / 'timed.json'
        run_command('solve', '--problem=ex2:n=3', '--solver=spg1', '--format=json', '--record-time', f'--out={path}')
        self.assertIn('wall_time', json.loads(path.read_text())['reports'][0])

    def test_unknown_solver_is_a_usage_error(self):
        code, _ = run_command('solve', '--problem=ex1', '--solver=newton', f'--out={self.tmp / "x.csv"}')
        self.assertEqual(code, 64)

    def test_unknown_problem_is_a_usage_error(self):
        code, _ = run_command('solve', '--problem=ex9', f'--out={self.tmp / "x.csv"}')
        self.assertEqual(code, 64)

    def test_wrong_x0_length_is_a_usage_error(self):
        code, _ = run_command('solve', '--problem=ex1', '--x0=1,1', f'--out={self.tmp / "x.csv"}')
        self.assertEqual(code, 64)

    def test_iteration_cap_exits_two(self):
        code, out = run_command(
            'solve', '--problem=ex1', '--solver=spa', '--max-iters=5', f'--out={self.tmp / "x.csv"}',
        )
        self.assertEqual(code, 2)
        self.assertIn('max_iters', out)

    def test_missing_tensor_file_exits_one(self):
        code, _ = run_command('solve', f'--problem=file:path={self.tmp / "missing.json"}', f'--out={self.tmp / "x.csv"}')
        self.assertEqual(code, 1)

    def test_tensor_file_problem(self):
        tensor = self.tmp / 'tensor.json'
        dump_tensor(random_symmetric(3, 4, 2), tensor)
        code, out = run_command(
            'solve', f'--problem=file:path={tensor}', '--solver=spg1', f'--out={self.tmp / "x.csv"}',
        )
        self.assertIn(code, (0, 2))
        self.assertIn('SPG1', out)

    def test_default_output_location(self):
        with override_settings(TEICP_OUTPUT_DIR=self.tmp / 'results'):
            code, out = run_command('solve', '--problem=ex2:n=3', '--solver=spg1')
        self.assertEqual(code, 0)
        self.assertTrue((self.tmp / 'results' / 'solve_ex2_n3.csv').exists())


class MultistartCommandTest(CommandTestCase):
    def test_per_run_csv(self):
        path = self.tmp / 'runs.csv'
        code, out = run_command(
            'multistart', '--problem=ex2:n=3', '--solver=spg1', '--solver=spp', '--runs=2', f'--out={path}',
        )
        self.assertEqual(code, 0)
        rows = read_csv(path)
        self.assertEqual(rows[0], RUN_COLUMNS)
        self.assertEqual(len(rows), 1 + 2 * 2)
        self.assertEqual([(row[0], row[1]) for row in rows[1:]], [('0', 'spg1'), ('0', 'spp'), ('1', 'spg1'), ('1', 'spp')])
        self.assertTrue(all(row[5] == '' for row in rows[1:]))
        self.assertIn('median its', out)

    def test_same_seed_gives_identical_files(self):
        first, second = self.tmp / 'first.csv', self.tmp / 'second.csv'
        for path in (first, second):
            run_command('multistart', '--problem=ex1', '--solver=spg1', '--runs=5', '--seed=3', f'--out={path}')
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_workers_do_not_change_output(self):
        serial, threaded = self.tmp / 'serial.json', self.tmp / 'threaded.json'
        args = ['--problem=ex1', '--solver=spg1', '--solver=sspa', '--runs=6', '--format=json']
        run_command('multistart', *args, f'--out={serial}')
        run_command('multistart', *args, '--workers=3', f'--out={threaded}')
        self.assertEqual(serial.read_bytes(), threaded.read_bytes())
        document = json.loads(serial.read_text())
        self.assertEqual(len(document['results']), 12)
        self.assertIn('histogram', document['summary']['spg1'])

    def test_single_run_is_rejected(self):
        code, _ = run_command('multistart', '--problem=ex1', '--runs=1', f'--out={self.tmp / "x.csv"}')
        self.assertEqual(code, 64)

    def test_record_time_fills_time_column(self):
        path = self.tmp / 'timed.csv'
        run_command('multistart', '--problem=ex2:n=3', '--solver=spg1', '--runs=2', '--record-time', f'--out={path}')
        self.assertTrue(all(float(row[5]) >= 0 for row in read_csv(path)[1:]))


class TraceCommandTest(CommandTestCase):
    def test_all_solvers_on_fraction_diagonal(self):
        path = self.tmp / 'trace.csv'
        code, out = run_command('trace', '--problem=ex2:n=5', '--x0=1,1,1,1,1', f'--out={path}')
        self.assertIn(code, (0, 2))

        rows = read_csv(path)
        self.assertEqual(rows[0], TRACE_COLUMNS)
        lengths = {}
        for row in rows[1:]:
            lengths[row[1]] = lengths.get(row[1], 0) + 1
        self.assertEqual(set(lengths), {'spg1', 'spg2', 'spp', 'spa', 'sspa'})

        spg1_lambdas = [float(row[2]) for row in rows[1:] if row[1] == 'spg1']
        self.assertTrue(all(b >= a - 1e-12 for a, b in zip(spg1_lambdas, spg1_lambdas[1:])))

    def test_json_traces(self):
        path = self.tmp / 'trace.json'
        code, _ = run_command('trace', '--problem=ex6', '--solver=spp', '--format=json', f'--out={path}')
        self.assertIn(code, (0, 2))
        document = json.loads(path.read_text())
        self.assertEqual(list(document['traces']), ['spp'])
        self.assertEqual(document['x0'], [0.1846, 0.8337, 0.1696, 0.9532, 0.7225])
        self.assertTrue(all(record['shift'] >= 0 for record in document['traces']['spp']))


class ProjectSettingsTest(SimpleTestCase):
    def test_runs_without_a_database(self):
        self.assertEqual(connections['default'].settings_dict['ENGINE'], 'django.db.backends.dummy')
        self.assertFalse(apps.is_installed('django.contrib.contenttypes'))
        call_command('check', stdout=StringIO())
