from django.core.management.base import CommandError

from polycat import runner

from ._base import PolycatCommand


def parse_generators(text):
    """'*=x,y;r=a' -> {'*': ('x', 'y'), 'r': ('a',)}"""
    generators = {}
    for part in filter(None, text.split(';')):
        if '=' not in part:
            raise CommandError(f'generators must look like color=a,b; got {part!r}', returncode=runner.EXIT_ERROR)
        color, names = part.split('=', 1)
        generators[color.strip()] = tuple(n.strip() for n in names.split(',') if n.strip())
    return generators


class Command(PolycatCommand):
    help = 'Truncated free algebra on named generators'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--generators', default='*=x,y', help='Generators per color, e.g. "*=x,y;r=a"')

    def run(self, cfg, **options):
        monad, _ = self.load(options['monad'])
        return runner.free(monad, cfg, parse_generators(options['generators']))
