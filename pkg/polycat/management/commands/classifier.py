from polycat import commutative, runner

from ._base import PolycatCommand


class Command(PolycatCommand):
    help = 'Dump a truncated classifier as JSON, DOT or a component table'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--kind', default='T+1',
                            help='T+1, T+2, T_f, T_g, T_{f,g}, Com+1, Com_{f,g}, GrCom+1 or GrCom_{f,g}')

    def run(self, cfg, **options):
        kind = options['kind']
        if commutative.COM_ALIASES.get(kind.lower(), kind) in commutative.COM_KINDS:
            return runner.classifier_dump(None, cfg, kind)
        monad, _ = self.load(options['monad'])
        return runner.classifier_dump(monad, cfg, kind)
