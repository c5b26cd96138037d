import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from polycat.models import AnalysisRun, MonadRecord


class CommandTestCase(TestCase):

    def call(self, name, *args, **options):
        out, err = StringIO(), StringIO()
        call_command(name, *args, stdout=out, stderr=err, **options)
        return out.getvalue(), err.getvalue()

    def call_failing(self, name, *args, **options):
        with self.assertRaises(CommandError) as ctx:
            self.call(name, *args, **options)
        return ctx.exception


class AnalyzeCommandTest(CommandTestCase):

    def test_monoids_write_both_certificates(self):
        with tempfile.TemporaryDirectory() as tmp:
            out, err = self.call('analyze', monad='builtin:mon', degree=1, xdeg=2, out=tmp)
            self.assertIn('sha256=', out)
            self.assertIn('tame (truncated): CERTIFIED', err)
            document = json.loads((Path(tmp) / 'tameness.json').read_text())
            self.assertEqual(document['verdict'], 'CERTIFIED')
            self.assertEqual(document['monad'], 'builtin:mon')
            self.assertTrue((Path(tmp) / 'quasitameness.json').exists())

    def test_runs_are_deterministic(self):
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            self.call('analyze', monad='builtin:mon', degree=1, xdeg=2, out=first)
            self.call('analyze', monad='builtin:mon', degree=1, xdeg=2, out=second)
            for name in ('tameness.json', 'quasitameness.json'):
                self.assertEqual((Path(first) / name).read_bytes(), (Path(second) / name).read_bytes())

    def test_commutative_monoids_refute_and_verify(self):
        with tempfile.TemporaryDirectory() as tmp:
            error = self.call_failing('analyze', kind='Com+1', degree=2, xdeg=2, out=tmp)
            self.assertEqual(error.returncode, 2)
            tameness = json.loads((Path(tmp) / 'tameness.json').read_text())
            self.assertEqual(tameness['verdict'], 'UNKNOWN')
            self.assertEqual(tameness['monad'], 'builtin:com')

            certificate = Path(tmp) / 'quasitameness.json'
            _, err = self.call('verify', str(certificate))
            self.assertIn('re-validated', err)

            document = json.loads(certificate.read_text())
            for component in document['components']:
                if component['verdict'] == 'REFUTED':
                    component['evidence']['invariant_factors'] = [3]
            certificate.write_text(json.dumps(document))
            self.assertEqual(self.call_failing('verify', str(certificate)).returncode, 1)

    def test_monad_is_required(self):
        self.assertEqual(self.call_failing('analyze').returncode, 1)

    def test_only_the_t_plus_one_classifier_is_certified(self):
        error = self.call_failing('analyze', monad='builtin:mon', kind='T_{f,g}', degree=1, xdeg=1)
        self.assertEqual(error.returncode, 1)
        self.assertIn('T+1', str(error))
        with tempfile.TemporaryDirectory() as tmp:
            self.call('analyze', monad='builtin:mon', kind='t+1', degree=1, xdeg=2, out=tmp)
            document = json.loads((Path(tmp) / 'tameness.json').read_text())
            self.assertEqual(document['classifier'], 'T+1')

    def test_bad_pipeline_is_an_error(self):
        error = self.call_failing('analyze', monad='plus(builtin:mon')
        self.assertEqual(error.returncode, 1)
        self.assertIn('column 17', str(error))


class RecordTest(CommandTestCase):

    def test_record_flag_archives_the_run(self):
        self.call('analyze', monad='builtin:mon', degree=1, xdeg=2, record=True)
        run = AnalysisRun.objects.get()
        self.assertEqual(run.command, 'analyze')
        self.assertEqual(run.exit_code, 0)
        self.assertIn('tameness.json', run.artifacts)
        self.assertFalse(run.is_refutation())

    def test_stored_definition_by_name(self):
        record = MonadRecord.objects.create(name='plain', text='builtin:mon')
        self.call('classifier', monad='plain', degree=1, xdeg=2, record=True)
        run = AnalysisRun.objects.get()
        self.assertEqual(run.monad, record)
        self.assertEqual(record.runs.count(), 1)


class ClassifierCommandTest(CommandTestCase):

    def test_summary_counts_objects(self):
        out, err = self.call('classifier', monad='builtin:mon', degree=1, xdeg=2)
        self.assertIn('9 objects', err)
        self.assertEqual(len(json.loads(out)['objects']), 9)

    def test_dot_output(self):
        out, _ = self.call('classifier', monad='builtin:mon', degree=1, xdeg=1, format='dot')
        self.assertTrue(out.startswith('digraph'))

    def test_commutative_kind_needs_no_monad(self):
        _, err = self.call('classifier', kind='Com+1', degree=2, xdeg=2)
        self.assertIn('9 objects', err)


class PushoutCommandTest(CommandTestCase):

    def test_named_monoid(self):
        out, err = self.call('pushout', monoid='z2', degree=2)
        self.assertIn('stages 2, 6, 14', err)
        self.assertIn('oracle: MATCH', err)
        self.assertEqual(json.loads(out)['sizes'], [2, 6, 14])

    def test_commutative(self):
        _, err = self.call('pushout', monoid='z2', degree=2, commutative=True)
        self.assertIn('stages 2, 4, 6', err)

    def test_unknown_monoid(self):
        self.assertEqual(self.call_failing('pushout', monoid='quaternions').returncode, 1)


class FreeAndDerivedCommandTest(CommandTestCase):

    def test_free_tfg_algebra(self):
        out, _ = self.call('free', monad='tfg(builtin:mon)', generators='*@K=k;*@L=l', arity=2)
        self.assertEqual(json.loads(out)['sizes'], {'*': 3, '*@K': 1, '*@L': 2})

    def test_free_rejects_bad_generators(self):
        self.assertEqual(self.call_failing('free', monad='builtin:mon', generators='oops').returncode, 1)

    def test_gr_writes_a_definition(self):
        out, _ = self.call('gr', monad='builtin:mon')
        self.assertIn('gr_of(MonToSOp(builtin:mon))', out)

    def test_plus_writes_a_definition(self):
        out, _ = self.call('plus', monad='builtin:mon')
        self.assertIn('plus(builtin:mon)', out)

    def test_verify_missing_file(self):
        self.assertEqual(self.call_failing('verify', '/nonexistent/certificate.json').returncode, 1)
