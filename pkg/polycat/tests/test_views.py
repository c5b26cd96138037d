from django.test import TestCase
from django.urls import reverse

from polycat.forms import RunConfigForm
from polycat.models import AnalysisRun, MonadRecord


def analysis(**overrides):
    data = {'monad': 'builtin:mon', 'kind': 'T+1', 'degree': 1, 'xdeg': 2, 'format': 'json'}
    data.update(overrides)
    return data


class MonadListTest(TestCase):

    def test_store_and_list(self):
        response = self.client.post(reverse('monad_list'), {'name': 'plain', 'text': 'builtin:mon'})
        self.assertEqual(response.status_code, 201)
        listing = self.client.get(reverse('monad_list')).json()['monads']
        self.assertEqual([(m['name'], m['runs']) for m in listing], [('plain', 0)])

    def test_unparsable_definition(self):
        response = self.client.post(reverse('monad_list'), {'name': 'broken', 'text': 'plus(builtin:mon'})
        self.assertEqual(response.status_code, 400)
        self.assertIn('text', response.json()['errors'])
        self.assertFalse(MonadRecord.objects.exists())


class AnalyzeViewTest(TestCase):

    def test_analysis_is_archived(self):
        response = self.client.post(reverse('analyze'), analysis())
        self.assertEqual(response.status_code, 201)
        data = response.json()
        self.assertIn('tame (truncated): CERTIFIED', data['summary'])

        runs = self.client.get(reverse('run_list')).json()['runs']
        self.assertEqual([run['id'] for run in runs], [data['id']])
        detail = self.client.get(reverse('run_detail', args=[data['id']])).json()
        self.assertIn('tameness.json', detail['artifacts'])

    def test_run_list_filters(self):
        self.client.post(reverse('analyze'), analysis())
        self.assertEqual(self.client.get(reverse('run_list'), {'exit_code': 2}).json()['runs'], [])
        self.assertEqual(len(self.client.get(reverse('run_list'), {'command': 'analyze'}).json()['runs']), 1)

    def test_form_errors(self):
        response = self.client.post(reverse('analyze'), analysis(xdeg=0))
        self.assertEqual(response.status_code, 400)
        self.assertFalse(AnalysisRun.objects.exists())

    def test_engine_errors(self):
        response = self.client.post(reverse('analyze'), analysis(monad='gr(builtin:gr_mon)'))
        self.assertEqual(response.status_code, 422)
        self.assertEqual(response.json()['exit_code'], 1)

    def test_get_is_not_allowed(self):
        self.assertEqual(self.client.get(reverse('analyze')).status_code, 405)

    def test_missing_run(self):
        self.assertEqual(self.client.get(reverse('run_detail', args=[999])).status_code, 404)


class RunConfigFormTest(TestCase):

    def test_xdeg_below_degree(self):
        form = RunConfigForm(analysis(degree=2, xdeg=1))
        self.assertFalse(form.is_valid())
        self.assertIn('xdeg must be at least the degree.', form.non_field_errors())

    def test_pipeline_is_parsed(self):
        self.assertFalse(RunConfigForm(analysis(monad='frobnicate(builtin:mon)')).is_valid())
        self.assertTrue(RunConfigForm(analysis()).is_valid())
