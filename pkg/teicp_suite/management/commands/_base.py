"""
Options and error handling shared by the solve, multistart and trace commands
"""
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from pareto.exceptions import ExperimentConfigError, InvalidProblemError, SolverConfigError, TEiCPError
from pareto.experiments import EXIT_ERROR, EXIT_USAGE, ExperimentConfig
from pareto.solvers import SOLVERS, SolverConfig

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ExperimentConfigError, InvalidProblemError, SolverConfigError)


def parse_vector(text):
    """'1,1,1' -> [1.0, 1.0, 1.0]"""
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ExperimentConfigError(f"--x0 expects a comma-separated list of numbers, got {text!r}") from None


class ExperimentCommand(BaseCommand):
    """Base class: subclasses set `command_name` and implement `run(cfg)`"""

    command_name = None
    multistart = False

    def add_arguments(self, parser):
        parser.add_argument(
            '--problem',
            required=True,
            help='Problem id: ex1 | ex2:n=5 | ex3 | ex4:n=5 | ex5:n=5 | ex6:n=5 | rand:n=4,m=4,seed=7 | file:path=PATH,b=z',
        )
        parser.add_argument(
            '--solver',
            action='append',
            dest='solvers',
            help=f"Solver to run, repeatable ({', '.join(SOLVERS)}); all of them by default",
        )
        if self.multistart:
            parser.add_argument('--runs', type=int, default=None, help='Number of random starts')
            parser.add_argument('--seed', type=int, default=None, help='Start r uses seed + r')
            parser.add_argument('--workers', type=int, default=None, help='Threads running starts in parallel')
        else:
            parser.add_argument('--x0', help='Comma-separated starting point (defaults to the published start)')
        parser.add_argument('--tol', type=float)
        parser.add_argument('--max-iters', type=int)
        parser.add_argument('--rho', type=float)
        parser.add_argument('--tau', type=float)
        parser.add_argument('--merit', choices=['rayleigh', 'log'])
        parser.add_argument('--backtrack', choices=['halving', 'quadratic'])
        parser.add_argument('--projection', choices=['sphere_plus', 'orthant'], help='Projection used by SPA/SSPA')
        parser.add_argument('--spa-scale', type=float, help='Stepsize multiplier for SPA')
        parser.add_argument(
            '--minimize',
            action='store_true',
            help='Descend instead of ascend (smallest-side Pareto eigenvalue for SPG1/SPG2)',
        )
        parser.add_argument(
            '--paper-literal-safeguards',
            action='store_true',
            help='Use ||g_k|| and 1/||g_k|| as the BB safeguards',
        )
        parser.add_argument('--out', help='Output file (defaults to a file in TEICP_OUTPUT_DIR)')
        parser.add_argument('--format', choices=['json', 'csv'], default='csv')
        parser.add_argument(
            '--record-time',
            action='store_true',
            help='Write wall times into the output file',
        )

    def build_config(self, options):
        solver_config = SolverConfig.from_settings(
            tol=options['tol'],
            max_iters=options['max_iters'],
            rho=options['rho'],
            tau=options['tau'],
            merit=options['merit'],
            backtrack=options['backtrack'],
            projection=options['projection'],
            spa_scale=options['spa_scale'],
            maximize=False if options['minimize'] else None,
            paper_literal_safeguards=True if options['paper_literal_safeguards'] else None,
        )
        common = {
            'problem': options['problem'],
            'solvers': options['solvers'] or list(SOLVERS),
            'solver_config': solver_config,
            'output': options['out'],
            'fmt': options['format'],
            'record_time': options['record_time'],
        }
        if self.multistart:
            runs = options['runs']
            seed = options['seed']
            workers = options['workers']
            return ExperimentConfig(
                runs=runs if runs is not None else getattr(settings, 'TEICP_MULTISTART_RUNS', 100),
                seed=seed if seed is not None else getattr(settings, 'TEICP_SEED', 0),
                workers=workers if workers is not None else getattr(settings, 'TEICP_WORKERS', 1),
                **common,
            )
        x0 = parse_vector(options['x0']) if options['x0'] else None
        return ExperimentConfig(runs=1, x0=x0, **common)

    def run(self, cfg):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            cfg = self.build_config(options)
            result = self.run(cfg)
        except USAGE_ERRORS as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)
        except (TEiCPError, OSError) as exc:
            logger.error(f"{self.command_name} failed: {exc}")
            raise CommandError(str(exc), returncode=EXIT_ERROR)

        for line in result.lines:
            self.stdout.write(line)
        self.stdout.write(self.style.SUCCESS(f"Wrote {result.output}"))

        if result.exit_code:
            raise CommandError(
                f"{self.command_name}: not every run converged (exit {result.exit_code})",
                returncode=result.exit_code,
            )
