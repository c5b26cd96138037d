from polycat import runner

from ._base import PolycatCommand


class Command(PolycatCommand):
    help = 'Write the definition of T+ for a monad'

    def run(self, cfg, **options):
        monad, _ = self.load(options['monad'])
        return runner.derived(monad, 'plus', cfg)
