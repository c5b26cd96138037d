from pathlib import Path

from polycat import runner
from polycat.exceptions import DefinitionError

from ._base import PolycatCommand


class Command(PolycatCommand):
    help = 'Re-validate the evidence of every REFUTED component in a certificate artifact'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('certificate', help='Path to a certificate JSON artifact')

    def run(self, cfg, **options):
        path = Path(options['certificate'])
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise DefinitionError(f'cannot read {path}: {exc.strerror}') from exc
        return runner.verify(text)
