from polycat import runner

from ._base import PolycatCommand


class Command(PolycatCommand):
    help = 'Write the definition of Gr(T) for a monad, through its canonical morphism to symmetric operads'

    def run(self, cfg, **options):
        monad, _ = self.load(options['monad'])
        return runner.derived(monad, 'gr', cfg)
