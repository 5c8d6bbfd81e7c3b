"""
Experiment drivers shared by the solve, multistart and trace commands.

Each driver builds the problem, runs the requested solvers and writes its
output file. Files contain no wall times unless record_time is set, so two
runs with the same options produce byte-identical output.
"""
import csv
import enum
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from django.conf import settings

from .exceptions import ExperimentConfigError, InvalidProblemError
from .problems import ProblemSpec, build, random_start
from .reports import ReportsManager
from .solvers import SOLVERS, SolverConfig, SolverStatus, solve

logger = logging.getLogger(__name__)

RUN_COLUMNS = ['run', 'solver', 'lambda', 'iters', 'status', 'time']
TRACE_COLUMNS = ['k', 'solver', 'lambda', 'merit', 'grad_norm', 'step', 'beta', 'shift']

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_USAGE = 64


class OutputFormat(str, enum.Enum):
    JSON = 'json'
    CSV = 'csv'


@dataclass
class ExperimentConfig:
    problem: ProblemSpec
    solvers: list
    runs: int = 100
    seed: int = 0
    x0: np.ndarray = None
    solver_config: SolverConfig = None
    output: Path = None
    fmt: OutputFormat = OutputFormat.CSV
    record_time: bool = False
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.problem, str):
            self.problem = ProblemSpec.parse(self.problem)
        try:
            self.fmt = OutputFormat(self.fmt)
        except ValueError:
            raise ExperimentConfigError(f"unknown output format {self.fmt!r}; use json or csv") from None
        if not self.solvers:
            raise ExperimentConfigError("at least one solver is required")
        unknown = [name for name in self.solvers if name not in SOLVERS]
        if unknown:
            raise InvalidProblemError(f"unknown solver(s) {', '.join(unknown)}; choose from {', '.join(SOLVERS)}")
        if self.runs < 1:
            raise ExperimentConfigError(f"runs must be >= 1, got {self.runs}")
        if self.x0 is not None and self.runs > 1:
            raise ExperimentConfigError("an explicit x0 cannot be combined with runs > 1")
        if self.workers < 1:
            raise ExperimentConfigError(f"workers must be >= 1, got {self.workers}")
        if self.x0 is not None:
            self.x0 = np.asarray(self.x0, dtype=float)
        if self.solver_config is None:
            self.solver_config = SolverConfig.from_settings()
        if self.output is not None:
            self.output = Path(self.output)

    def output_path(self, command):
        """--out when given, otherwise a file named after the command in TEICP_OUTPUT_DIR."""
        if self.output is not None:
            return self.output
        label = self.problem.id.value if self.problem.n is None else f"{self.problem.id.value}_n{self.problem.n}"
        base = Path(getattr(settings, 'TEICP_OUTPUT_DIR', 'results'))
        return base / f"{command}_{label}.{self.fmt.value}"


@dataclass
class ExperimentResult:
    reports: list
    exit_code: int
    lines: list
    output: Path
    summary: dict = field(default_factory=dict)


def exit_code(reports):
    """0 if every report converged, 1 on domain or line-search errors, 2 otherwise."""
    statuses = {report.status for report in reports}
    if statuses & {SolverStatus.DOMAIN_ERROR, SolverStatus.LINE_SEARCH_FAILURE}:
        return EXIT_ERROR
    if statuses - {SolverStatus.CONVERGED}:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def format_row(report):
    """One table row: algorithm, lambda, eigenvector, iterations, error, time."""
    vector = ', '.join(f"{v:.4f}" for v in report.pair.x)
    return (
        f"{report.solver.upper():<5} {report.pair.lam:>10.4f}  [{vector}]  "
        f"its={report.iters:<4d} err={report.residual.max_component:.2e}  "
        f"time={report.wall_time:.4f}s  {report.status.value}"
    )


def _start_vector(cfg, A):
    if cfg.x0 is None:
        return cfg.problem.default_start(A.dim)
    if cfg.x0.shape != (A.dim,):
        raise ExperimentConfigError(f"x0 has {cfg.x0.size} entries but the problem has dimension {A.dim}")
    return cfg.x0


def _prepare(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path, document):
    path = _prepare(path)
    with open(path, 'w') as handle:
        json.dump(document, handle, indent=2)
        handle.write('\n')
    logger.info(f"Wrote {path}")
    return path


def write_trace_csv(path, reports):
    path = _prepare(path)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(TRACE_COLUMNS)
        for report in reports:
            for rec in report.trace:
                writer.writerow([
                    rec.k, report.solver, rec.lam, rec.merit_value, rec.grad_norm, rec.step, rec.beta, rec.shift,
                ])
    logger.info(f"Wrote {path}")
    return path


def write_runs_csv(path, results, record_time=False):
    path = _prepare(path)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(RUN_COLUMNS)
        for result in results:
            writer.writerow([
                result.run, result.solver, result.lam, result.iters, result.status,
                result.wall_time if record_time else '',
            ])
    logger.info(f"Wrote {path}")
    return path


def run_solve(cfg):
    """Run every solver from one start and write the full reports."""
    A, B = build(cfg.problem)
    x0 = _start_vector(cfg, A)
    reports = [solve(name, A, B, x0, cfg.solver_config) for name in cfg.solvers]

    path = cfg.output_path('solve')
    if cfg.fmt is OutputFormat.JSON:
        write_json(path, {
            'problem': str(cfg.problem),
            'x0': [float(v) for v in x0],
            'config': cfg.solver_config.as_dict(),
            'reports': [report.as_dict(include_time=cfg.record_time) for report in reports],
        })
    else:
        write_trace_csv(path, reports)
    return ExperimentResult(reports, exit_code(reports), [format_row(r) for r in reports], path)


def run_trace(cfg):
    """Per-iteration traces of every solver from one start."""
    A, B = build(cfg.problem)
    x0 = _start_vector(cfg, A)
    reports = [solve(name, A, B, x0, cfg.solver_config) for name in cfg.solvers]

    path = cfg.output_path('trace')
    if cfg.fmt is OutputFormat.JSON:
        write_json(path, {
            'problem': str(cfg.problem),
            'x0': [float(v) for v in x0],
            'traces': {report.solver: [asdict(rec) for rec in report.trace] for report in reports},
        })
    else:
        write_trace_csv(path, reports)
    lines = [f"{report.solver}: {len(report.trace)} rows, final lambda {report.pair.lam:.4f}" for report in reports]
    return ExperimentResult(reports, exit_code(reports), lines, path)


def run_multistart(cfg):
    """Every solver from the same seeded random starts.

    Start r is random_start(n, seed + r). Results are ordered by run index
    whatever the worker count.
    """
    if cfg.runs < 2:
        raise ExperimentConfigError(f"multistart needs runs >= 2, got {cfg.runs}")
    A, B = build(cfg.problem)
    starts = [random_start(A.dim, cfg.seed + run) for run in range(cfg.runs)]

    def run_start(run):
        return [solve(name, A, B, starts[run], cfg.solver_config) for name in cfg.solvers]

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            batches = list(pool.map(run_start, range(cfg.runs)))
    else:
        batches = [run_start(run) for run in range(cfg.runs)]

    manager = ReportsManager()
    reports = []
    for run, batch in enumerate(batches):
        for report in batch:
            manager.add(run, report)
            reports.append(report)
    summary = manager.generate_summary()

    path = cfg.output_path('multistart')
    if cfg.fmt is OutputFormat.JSON:
        results = [asdict(result) for result in manager.ordered()]
        file_summary = {solver: dict(stats) for solver, stats in summary.items()}
        if not cfg.record_time:
            for result in results:
                del result['wall_time']
            for stats in file_summary.values():
                del stats['mean_time']
        write_json(path, {
            'problem': str(cfg.problem),
            'runs': cfg.runs,
            'seed': cfg.seed,
            'solvers': list(cfg.solvers),
            'summary': file_summary,
            'results': results,
        })
    else:
        write_runs_csv(path, manager.ordered(), cfg.record_time)

    lines = []
    for solver, stats in summary.items():
        modes = ', '.join(manager.modes(solver))
        lines.append(
            f"{solver.upper():<5} median its={stats['median_iters']:.2f}  mean time={stats['mean_time']:.4f}s  "
            f"terminated={stats['terminated']}/{stats['runs']}  lambda modes: {modes}"
        )

    code = EXIT_NOT_CONVERGED if any(r.status is SolverStatus.MAX_ITERS for r in reports) else EXIT_OK
    return ExperimentResult(reports, code, lines, path, summary)
