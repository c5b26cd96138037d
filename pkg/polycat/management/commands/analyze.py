from polycat import commutative, runner

from ._base import PolycatCommand


class Command(PolycatCommand):
    help = 'Tameness and quasi-tameness certificates for the T+1 classifier of a monad'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--kind', default='T+1',
                            help='T+1, or Com+1 / GrCom+1 for the commutative classifiers; other kinds go to classifier')

    def run(self, cfg, **options):
        kind = options['kind']
        if commutative.COM_ALIASES.get(kind.lower(), kind) in commutative.COM_KINDS:
            return runner.analyze(None, cfg, kind)
        monad, _ = self.load(options['monad'])
        return runner.analyze(monad, cfg, kind)
