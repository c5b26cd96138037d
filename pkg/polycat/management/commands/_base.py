"""
Shared plumbing for the polycat management commands: the common flags,
writing artifacts, archiving runs and turning verdicts into exit codes.
"""

import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from polycat import runner
from polycat.definitions import load_monad
from polycat.exceptions import PolycatError
from polycat.models import AnalysisRun, MonadRecord
from polycat.serialization import write_artifact

logger = logging.getLogger('polycat.commands')

VERDICT_NAMES = {runner.EXIT_REFUTED: 'REFUTED', runner.EXIT_UNKNOWN: 'UNKNOWN'}


class PolycatCommand(BaseCommand):
    """
    Subclasses implement run(cfg, **options) returning a RunResult.
    Exit codes: 0 ok, 1 error, 2 refuted, 3 unknown or unstable.
    """
    needs_monad = True

    def add_arguments(self, parser):
        parser.add_argument('--monad', help='builtin:NAME, a pipeline such as plus(builtin:mon), '
                                            'a stored definition name, or a definition file')
        parser.add_argument('--degree', type=int, help='Bound on #K + #L')
        parser.add_argument('--xdeg', type=int, help='Bound on #X')
        parser.add_argument('--arity', type=int, help='Bound on operation arity')
        parser.add_argument('--valence', type=int, help='Bound on bouquet valence')
        parser.add_argument('--budget', type=int, help='Rewriting and Tietze step budget')
        parser.add_argument('--seed', type=int, help='Seed for random instances')
        parser.add_argument('--format', choices=runner.FORMATS, help='Artifact format')
        parser.add_argument('--out', help='Directory for artifacts; stdout when omitted')
        parser.add_argument('--record', action='store_true', help='Archive the run in the database')

    def load(self, spec):
        """Monad for --monad, looking up stored definitions first"""
        if not spec:
            raise CommandError('--monad is required', returncode=runner.EXIT_ERROR)
        stored = MonadRecord.objects.filter(name=spec).first()
        _, monad = load_monad(stored.text if stored else spec)
        return monad, stored

    def run(self, cfg, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        cfg = runner.RunConfig.from_options(options, settings.POLYCAT)
        try:
            result = self.run(cfg, **options)
        except PolycatError as exc:
            logger.error('command failed', extra={'command': self.command_name, 'error': type(exc).__name__,
                                                  'detail': str(exc)})
            raise CommandError(str(exc), returncode=runner.EXIT_ERROR) from exc

        self.emit(result, options.get('out'))
        if options.get('record') or settings.POLYCAT['RECORD_RUNS']:
            stored = MonadRecord.objects.filter(name=options.get('monad') or '').first()
            AnalysisRun.record(self.command_name, result, options.get('monad') or '',
                               options.get('kind') or '', cfg, stored)
        if result.exit_code != runner.EXIT_OK:
            raise CommandError(f"verdict {VERDICT_NAMES.get(result.exit_code, 'ERROR')}: "
                               f"{'; '.join(result.summary)}", returncode=result.exit_code)

    def emit(self, result, out):
        if out:
            for name, text in result.artifacts:
                digest = write_artifact(Path(out) / name, text)
                self.stdout.write(f"wrote {Path(out) / name} sha256={digest}")
        else:
            for _, text in result.artifacts:
                self.stdout.write(text, ending='')
        for line in result.summary:
            self.stderr.write(line)

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]
