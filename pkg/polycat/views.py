import logging

from django.conf import settings
from django.http import JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.csrf import csrf_exempt
from django.views.decorators.http import require_GET, require_http_methods, require_POST

from . import runner
from .definitions import load_monad
from .exceptions import PolycatError
from .forms import MonadRecordForm, RunConfigForm
from .models import AnalysisRun, MonadRecord

logger = logging.getLogger(__name__)


def _run_summary(run):
    return {
        'id': run.id,
        'command': run.command,
        'monad': run.monad_spec,
        'kind': run.kind,
        'degree': run.max_degree,
        'xdeg': run.max_xdeg,
        'verdict': run.verdict,
        'exit_code': run.exit_code,
        'created_at': run.created_at.isoformat(),
    }


@require_GET
def run_list(request):
    """
    Archived runs, newest first; ?command= and ?exit_code= filter
    """
    runs = AnalysisRun.objects.all()
    command = request.GET.get('command')
    if command:
        runs = runs.filter(command=command)
    exit_code = request.GET.get('exit_code')
    if exit_code is not None and exit_code.isdigit():
        runs = runs.filter(exit_code=int(exit_code))
    return JsonResponse({'runs': [_run_summary(run) for run in runs[:100]]})


@require_GET
def run_detail(request, run_id):
    """
    One run with its summary lines and artifacts
    """
    run = get_object_or_404(AnalysisRun, id=run_id)
    data = _run_summary(run)
    data['summary'] = run.summary.splitlines()
    data['artifacts'] = run.artifacts
    return JsonResponse(data)


@csrf_exempt
@require_POST
def analyze_view(request):
    """
    Run tameness and quasi-tameness on a pipeline and archive the result.
    Form errors give 400, engine errors 422.
    """
    form = RunConfigForm(request.POST)
    if not form.is_valid():
        return JsonResponse({'errors': form.errors}, status=400)

    options = dict(form.cleaned_data)
    cfg = runner.RunConfig.from_options(options, settings.POLYCAT)
    try:
        _, monad = load_monad(options['monad'])
        result = runner.analyze(monad, cfg, options['kind'])
    except PolycatError as exc:
        logger.warning("web analysis failed", extra={'monad': options['monad'], 'detail': str(exc)})
        return JsonResponse({'error': str(exc), 'exit_code': runner.EXIT_ERROR}, status=422)

    record = MonadRecord.objects.filter(name=options['monad']).first()
    run = AnalysisRun.record('analyze', result, options['monad'], options['kind'], cfg, record)
    data = _run_summary(run)
    data['summary'] = list(result.summary)
    return JsonResponse(data, status=201)


@csrf_exempt
@require_http_methods(['GET', 'POST'])
def monad_list(request):
    """
    Stored definitions; POST name and text to add one
    """
    if request.method == 'POST':
        form = MonadRecordForm(request.POST)
        if not form.is_valid():
            return JsonResponse({'errors': form.errors}, status=400)
        record = form.save()
        return JsonResponse({'id': record.id, 'name': record.name}, status=201)

    records = MonadRecord.objects.all()
    return JsonResponse({'monads': [
        {'id': r.id, 'name': r.name, 'text': r.text, 'runs': r.runs.count()} for r in records
    ]})
