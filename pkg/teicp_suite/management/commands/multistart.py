"""
Management command for seeded multistart statistics
"""
from pareto.experiments import run_multistart

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Run every solver from the same set of random starts and summarize iterations and eigenvalues'
    command_name = 'multistart'
    multistart = True

    def run(self, cfg):
        self.stdout.write(f"Problem {cfg.problem}: {cfg.runs} starts from seed {cfg.seed}")
        return run_multistart(cfg)
