"""
Management command running each requested solver once from a common start
"""
from pareto.experiments import run_solve

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Solve one TEiCP instance with one or more solvers and print a comparison table'
    command_name = 'solve'

    def run(self, cfg):
        self.stdout.write(f"Problem {cfg.problem}, solvers: {', '.join(cfg.solvers)}")
        return run_solve(cfg)
