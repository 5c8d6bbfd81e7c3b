"""
Management command exporting per-iteration traces for plotting
"""
from pareto.experiments import run_trace

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Write per-iteration lambda, merit, gradient norm, step, beta and shift for each solver'
    command_name = 'trace'

    def run(self, cfg):
        return run_trace(cfg)
