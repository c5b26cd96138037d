from polycat import runner

from ._base import PolycatCommand


class Command(PolycatCommand):
    help = 'Filtration stages of a free extension, checked against the direct colimit'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--instance', choices=['mon', 'gr_mon', 'nop'],
                            help='Monad of the random instance drawn from --seed')
        parser.add_argument('--monoid', help='Named monoid for a Mon instance: trivial, z2, z3, bool, left_zero')
        parser.add_argument('--k', help='Comma separated elements of K')
        parser.add_argument('--l', help='Comma separated elements of L (default l)')
        parser.add_argument('--f', help='f as k=l pairs')
        parser.add_argument('--g', help='g as k=x pairs')
        parser.add_argument('--commutative', action='store_true', help='Symmetric filtration for Com')

    def run(self, cfg, **options):
        return runner.pushout(cfg, options['instance'], options['monoid'], options['k'], options['l'],
                              options['f'], options['g'], options['commutative'])
