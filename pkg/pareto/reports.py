"""
Multistart Reports Module
Aggregates solver reports from many random starts into per-solver statistics
"""
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunResult:
    """One (start, solver) outcome of a multistart experiment"""
    run: int
    solver: str
    lam: float
    iters: int
    status: str
    wall_time: float
    terminated: bool


def lambda_bin(lam, width):
    """Label of the histogram bin holding lam, e.g. 0.36327 -> '0.363' at width 1e-3"""
    if not np.isfinite(lam):
        return 'nan'
    decimals = max(0, int(round(-np.log10(width))))
    value = np.round(lam / width) * width
    # Avoid '-0.000' labels
    if value == 0:
        value = 0.0
    return f"{value:.{decimals}f}"


class ReportsManager:
    """Collects multistart results and computes the summary tables"""

    def __init__(self, bin_width=None):
        self.bin_width = bin_width or getattr(settings, 'TEICP_HISTOGRAM_BIN', 1e-3)
        self.results = []

    def add(self, run, report):
        """
        Record one solver report

        Args:
            run: Index of the random start
            report: SolverReport produced from that start
        """
        self.results.append(RunResult(
            run=run,
            solver=report.solver,
            lam=report.pair.lam,
            iters=report.iters,
            status=report.status.value,
            wall_time=report.wall_time,
            terminated=report.terminated,
        ))

    def ordered(self):
        """Results sorted by run index, then solver in insertion order"""
        solver_order = {}
        for result in self.results:
            solver_order.setdefault(result.solver, len(solver_order))
        return sorted(self.results, key=lambda r: (r.run, solver_order[r.solver]))

    def by_solver(self):
        grouped = defaultdict(list)
        for result in self.ordered():
            grouped[result.solver].append(result)
        return grouped

    def histogram(self, solver):
        """
        Histogram of reached eigenvalues for one solver

        Returns:
            List of (bin label, count), most frequent first, ties by label
        """
        counts = Counter(
            lambda_bin(r.lam, self.bin_width) for r in self.results if r.solver == solver
        )
        return sorted(counts.items(), key=lambda item: (-item[1], item[0]))

    def generate_summary(self):
        """
        Per-solver median iteration count, mean wall time and eigenvalue histogram

        Median iterations are taken over runs that terminated; when none did
        they fall back to all runs.

        Returns:
            Dictionary keyed by solver id
        """
        summary = {}
        for solver, results in self.by_solver().items():
            finished = [r for r in results if r.terminated]
            pool = finished or results
            summary[solver] = {
                'runs': len(results),
                'terminated': len(finished),
                'converged': sum(1 for r in results if r.status == 'converged'),
                'median_iters': float(np.median([r.iters for r in pool])),
                'mean_time': float(np.mean([r.wall_time for r in results])),
                'histogram': dict(self.histogram(solver)),
            }
            logger.info(
                f"{solver}: {len(finished)}/{len(results)} terminated, "
                f"median iterations {summary[solver]['median_iters']:.2f}"
            )
        return summary

    def modes(self, solver, top=3):
        """The `top` most frequent eigenvalue bins for a solver"""
        return [label for label, _ in self.histogram(solver)[:top]]
