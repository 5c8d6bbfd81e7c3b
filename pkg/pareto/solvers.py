"""
Iterative solvers for the symmetric TEiCP.

SPG1  spectral projected gradient with a monotone line search along
      d_k = P(x_k + beta_k g_k) - x_k (quadratic-interpolation backtracking)
SPG2  spectral projected gradient with a curvilinear search, re-projecting
      x_k + alpha g_k for every trial alpha (halving backtracking)
SPP   shifted projected power iteration on the Rayleigh quotient
SPA   scaling-and-projection with stepsize ||g_k||
SSPA  SPA driven by the shifted gradient grad f(x_k) + r_k m x_k, where f is the
      Rayleigh quotient whose Hessian sets r_k

Every solver returns a SolverReport; algorithmic outcomes (line-search
failure, domain errors inside an iteration, iteration cap) are statuses, not
exceptions. Input errors (mismatched operators, odd order, bad config) raise.
A stopping test only ends a run as CONVERGED once the pair certifies at
certify_tol; until then the solver keeps iterating.
"""
import enum
import logging
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.linalg
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from . import merit
from .exceptions import (
    AsymmetricMatrixError,
    DimensionMismatchError,
    SolverConfigError,
    TEiCPError,
)
from .merit import MeritKind
from .projection import ProjectionKind, b_normalize, project_orthant, project_sphere_plus, project_step
from .tensor import as_vector
from .verify import ResidualTriple, is_pareto_eigenpair, residual

logger = logging.getLogger(__name__)


class SolverStatus(str, enum.Enum):
    CONVERGED = 'converged'
    STAGNATED = 'stagnated'
    MAX_ITERS = 'max_iters'
    LINE_SEARCH_FAILURE = 'line_search_failure'
    DOMAIN_ERROR = 'domain_error'


class Backtrack(str, enum.Enum):
    HALVING = 'halving'
    QUADRATIC = 'quadratic'


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-6
    max_iters: int = 500
    rho: float = 1e-4
    tau: float = 0.05
    merit: MeritKind = MeritKind.RAYLEIGH
    beta_min: float = 1e-10
    beta_max: float = 1e10
    # None picks the solver's own default: quadratic for SPG1, halving for SPG2
    backtrack: Backtrack = None
    max_backtracks: int = 50
    certify_tol: float = 1e-4
    paper_literal_safeguards: bool = False
    spa_scale: float = 1.0
    projection: ProjectionKind = ProjectionKind.SPHERE_PLUS
    maximize: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'merit', MeritKind(self.merit))
        object.__setattr__(self, 'projection', ProjectionKind(self.projection))
        if self.backtrack is not None:
            object.__setattr__(self, 'backtrack', Backtrack(self.backtrack))
        if not self.tol > 0:
            raise SolverConfigError(f"tol must be positive, got {self.tol}")
        if not 0 < self.rho < 1:
            raise SolverConfigError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0 < self.beta_min <= self.beta_max:
            raise SolverConfigError(f"need 0 < beta_min <= beta_max, got [{self.beta_min}, {self.beta_max}]")
        if not self.tau > 0:
            raise SolverConfigError(f"tau must be positive, got {self.tau}")
        if self.max_iters < 0 or self.max_backtracks < 1:
            raise SolverConfigError("max_iters must be >= 0 and max_backtracks >= 1")
        if not self.spa_scale > 0:
            raise SolverConfigError(f"spa_scale must be positive, got {self.spa_scale}")

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from settings.TEICP_SOLVER_DEFAULTS, then explicit overrides."""
        try:
            defaults = dict(getattr(settings, 'TEICP_SOLVER_DEFAULTS', {}))
        except ImproperlyConfigured:
            defaults = {}
        defaults.update({key: val for key, val in overrides.items() if val is not None})
        return cls(**defaults)

    def with_overrides(self, **overrides):
        return replace(self, **{key: val for key, val in overrides.items() if val is not None})

    def as_dict(self):
        data = asdict(self)
        for key in ('merit', 'projection', 'backtrack'):
            if data[key] is not None:
                data[key] = data[key].value
        return data


@dataclass(frozen=True)
class EigenPair:
    lam: float
    x: np.ndarray


@dataclass(frozen=True)
class IterationRecord:
    """State after iteration k; step, beta and shift are those that produced x_k."""
    k: int
    lam: float
    merit_value: float
    grad_norm: float
    step: float = 0.0
    beta: float = 0.0
    shift: float = 0.0


@dataclass
class SolverReport:
    solver: str
    pair: EigenPair
    status: SolverStatus
    iters: int
    residual: ResidualTriple
    trace: list = field(default_factory=list)
    wall_time: float = 0.0
    message: str = ''

    @property
    def converged(self):
        return self.status is SolverStatus.CONVERGED

    @property
    def terminated(self):
        """A stopping test fired, certified or not."""
        return self.status in (SolverStatus.CONVERGED, SolverStatus.STAGNATED)

    def as_dict(self, include_time=True):
        data = {
            'solver': self.solver,
            'lambda': self.pair.lam,
            'x': [float(v) for v in self.pair.x],
            'status': self.status.value,
            'iters': self.iters,
            'residual': self.residual.as_dict(),
            'trace': [asdict(record) for record in self.trace],
            'message': self.message,
        }
        if include_time:
            data['wall_time'] = self.wall_time
        return data


def min_eig_sym(matrix):
    """Smallest eigenvalue of a symmetric matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise AsymmetricMatrixError(f"expected a square matrix, got shape {matrix.shape}")
    scale = max(1.0, np.linalg.norm(matrix))
    if np.max(np.abs(matrix - matrix.T)) > 1e-8 * scale:
        raise AsymmetricMatrixError("matrix is not symmetric to 1e-8")
    return float(scipy.linalg.eigvalsh(0.5 * (matrix + matrix.T))[0])


def adaptive_shift(hessian, tau, order):
    """r = max{0, (tau - lambda_min(H)) / m}."""
    return max(0.0, (tau - min_eig_sym(hessian)) / order)


def _safeguards(cfg, grad_norm):
    if cfg.paper_literal_safeguards and grad_norm:
        # beta_min = ||g||, beta_max = 1/||g||, ordered so the interval is valid
        return min(grad_norm, 1.0 / grad_norm), max(grad_norm, 1.0 / grad_norm)
    return cfg.beta_min, cfg.beta_max


def bb_step(s, y, cfg, grad_norm=None):
    """Safeguarded Barzilai-Borwein step <s,s>/<s,y>; beta_max when <s,y> <= 0."""
    lo, hi = _safeguards(cfg, grad_norm)
    b = float(np.dot(s, y))
    if b <= 0.0:
        return hi
    return max(lo, min(hi, float(np.dot(s, s)) / b))


def ascent_direction_check(x, beta, g):
    """d = P(x + beta g) - x with both sides of g.d >= ||d||^2 / beta."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    d = project_sphere_plus(x + beta * g) - x
    return d, float(g @ d), float(d @ d) / beta


def _check_operators(A, B):
    if A.order != B.order or A.dim != B.dim:
        raise DimensionMismatchError(
            f"A is order {A.order} dim {A.dim} but B is order {B.order} dim {B.dim}"
        )
    if A.order % 2:
        raise DimensionMismatchError(f"solvers require an even order, got m = {A.order}")


def _start(name, A, B, cfg):
    _check_operators(A, B)
    logger.info(f"Starting {name}: order={A.order}, dim={A.dim}, merit={cfg.merit.value}, tol={cfg.tol:g}")
    return time.perf_counter()


class _Oriented:
    """Merit evaluations signed so that every solver ascends."""

    def __init__(self, A, B, cfg):
        self.A = A
        self.B = B
        self.kind = cfg.merit
        self.sign = 1.0 if cfg.maximize else -1.0

    def evaluate(self, x):
        ev = merit.evaluate(self.A, self.B, x, self.kind)
        return merit.MeritEval(value=self.sign * ev.value, gradient=self.sign * ev.gradient, lam=ev.lam)

    def value(self, x):
        return self.sign * merit.value(self.A, self.B, x, self.kind)

    def raw(self, oriented_value):
        return self.sign * oriented_value


def _next_alpha(alpha, slope, delta_f, kind):
    """Shrink a rejected trial step."""
    if kind is Backtrack.HALVING:
        return 0.5 * alpha
    denom = 2.0 * (delta_f - alpha * slope)
    if denom >= 0.0:
        # Interpolation needs negative curvature along the path
        return 0.5 * alpha
    trial = -alpha ** 2 * slope / denom
    return min(0.9 * alpha, max(0.1 * alpha, trial))


def _stop_rule(A, B, cfg, step, lam_change, grad_norm, lam, x):
    """||x_{k+1} - x_k||, |lambda_{k+1} - lambda_k| or ||g|| below tol, and (lam, x) certifies."""
    if np.linalg.norm(step) > cfg.tol and abs(lam_change) > cfg.tol and grad_norm > cfg.tol:
        return False
    return is_pareto_eigenpair(A, B, lam, x, cfg.certify_tol)


def _failed_start(name, A, B, x, exc, started, cfg):
    nan = float('nan')
    trace = [IterationRecord(0, nan, nan, nan)]
    return _finish(name, A, B, nan, x, SolverStatus.DOMAIN_ERROR, trace, started, cfg, str(exc))


def _line_search_exhausted(A, B, lam, x, cfg, k):
    # No ascent step is left once the pair already certifies
    if is_pareto_eigenpair(A, B, lam, x, cfg.certify_tol):
        return SolverStatus.CONVERGED, ''
    return SolverStatus.LINE_SEARCH_FAILURE, f"no acceptable step after {cfg.max_backtracks} trials at iteration {k}"


def _finish(name, A, B, lam, x, status, trace, started, cfg, message=''):
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    unit = x / norm if norm > 0 else x
    res = residual(A, B, lam, unit)
    if status is SolverStatus.CONVERGED and not is_pareto_eigenpair(A, B, lam, unit, cfg.certify_tol):
        status = SolverStatus.STAGNATED
        message = message or f"stopping test met but residual {res.max_component:.3e} exceeds {cfg.certify_tol:g}"
    report = SolverReport(
        solver=name,
        pair=EigenPair(lam=float(lam), x=unit),
        status=status,
        iters=max(len(trace) - 1, 0),
        residual=res,
        trace=trace,
        wall_time=time.perf_counter() - started,
        message=message,
    )
    log = logger.warning if status in (SolverStatus.DOMAIN_ERROR, SolverStatus.LINE_SEARCH_FAILURE) else logger.info
    log(f"{name} finished: status={status.value}, iters={report.iters}, lambda={lam:.6f}, "
        f"residual={res.max_component:.3e}")
    return report


def spg1(A, B, x0, cfg=None):
    cfg = cfg or SolverConfig.from_settings()
    started = _start('spg1', A, B, cfg)
    backtrack = cfg.backtrack or Backtrack.QUADRATIC
    oriented = _Oriented(A, B, cfg)
    x = project_sphere_plus(as_vector(x0, A.dim))
    try:
        ev = oriented.evaluate(x)
    except TEiCPError as exc:
        return _failed_start('spg1', A, B, x, exc, started, cfg)

    grad_norm = float(np.linalg.norm(ev.gradient))
    beta = 1.0 / grad_norm if grad_norm > 0 else cfg.beta_max
    trace = [IterationRecord(0, ev.lam, oriented.raw(ev.value), grad_norm, beta=beta)]
    status, message = SolverStatus.MAX_ITERS, ''

    try:
        for k in range(cfg.max_iters):
            g = ev.gradient
            d = project_sphere_plus(x + beta * g) - x
            if np.linalg.norm(d) < cfg.tol or grad_norm <= cfg.tol:
                status = SolverStatus.CONVERGED
                break

            slope = float(g @ d)
            alpha = 1.0
            for _ in range(cfg.max_backtracks):
                trial = oriented.value(x + alpha * d)
                if trial >= ev.value + cfg.rho * alpha * slope:
                    break
                alpha = _next_alpha(alpha, slope, trial - ev.value, backtrack)
            else:
                status, message = _line_search_exhausted(A, B, ev.lam, x, cfg, k)
                break

            x_new = x + alpha * d
            x_new = x_new / np.linalg.norm(x_new)
            ev_new = oriented.evaluate(x_new)
            grad_norm = float(np.linalg.norm(ev_new.gradient))
            s = x_new - x
            # Curvature pair of the minimized objective -f
            beta = bb_step(s, g - ev_new.gradient, cfg, grad_norm)
            trace.append(IterationRecord(k + 1, ev_new.lam, oriented.raw(ev_new.value), grad_norm, alpha, beta))
            logger.debug(f"spg1 k={k + 1} lambda={ev_new.lam:.10f} alpha={alpha:.3e} beta={beta:.3e}")

            stop = _stop_rule(A, B, cfg, s, ev_new.lam - ev.lam, grad_norm, ev_new.lam, x_new)
            x, ev = x_new, ev_new
            if stop:
                status = SolverStatus.CONVERGED
                break
    except TEiCPError as exc:
        status, message = SolverStatus.DOMAIN_ERROR, str(exc)

    return _finish('spg1', A, B, ev.lam, x, status, trace, started, cfg, message)


def spg2(A, B, x0, cfg=None):
    cfg = cfg or SolverConfig.from_settings()
    started = _start('spg2', A, B, cfg)
    if cfg.backtrack is Backtrack.QUADRATIC:
        # A one-dimensional model does not fit the projected arc
        logger.debug("spg2 backtracks by halving along its curvilinear path")
    oriented = _Oriented(A, B, cfg)
    x = project_sphere_plus(as_vector(x0, A.dim))
    try:
        ev = oriented.evaluate(x)
    except TEiCPError as exc:
        return _failed_start('spg2', A, B, x, exc, started, cfg)

    grad_norm = float(np.linalg.norm(ev.gradient))
    beta = 1.0 / grad_norm if grad_norm > 0 else cfg.beta_max
    trace = [IterationRecord(0, ev.lam, oriented.raw(ev.value), grad_norm, beta=beta)]
    status, message = SolverStatus.MAX_ITERS, ''

    try:
        for k in range(cfg.max_iters):
            g = ev.gradient
            if np.linalg.norm(project_sphere_plus(x + beta * g) - x) < cfg.tol or grad_norm <= cfg.tol:
                status = SolverStatus.CONVERGED
                break

            alpha = beta
            for _ in range(cfg.max_backtracks):
                x_plus = project_sphere_plus(x + alpha * g)
                slope = float(g @ (x_plus - x))
                trial = oriented.value(x_plus)
                if trial >= ev.value + cfg.rho * alpha * slope:
                    break
                alpha *= 0.5
            else:
                status, message = _line_search_exhausted(A, B, ev.lam, x, cfg, k)
                break

            ev_new = oriented.evaluate(x_plus)
            grad_norm = float(np.linalg.norm(ev_new.gradient))
            s = x_plus - x
            beta = bb_step(s, g - ev_new.gradient, cfg, grad_norm)
            trace.append(IterationRecord(k + 1, ev_new.lam, oriented.raw(ev_new.value), grad_norm, alpha, beta))
            logger.debug(f"spg2 k={k + 1} lambda={ev_new.lam:.10f} alpha={alpha:.3e} beta={beta:.3e}")

            stop = _stop_rule(A, B, cfg, s, ev_new.lam - ev.lam, grad_norm, ev_new.lam, x_plus)
            x, ev = x_plus, ev_new
            if stop:
                status = SolverStatus.CONVERGED
                break
    except TEiCPError as exc:
        status, message = SolverStatus.DOMAIN_ERROR, str(exc)

    return _finish('spg2', A, B, ev.lam, x, status, trace, started, cfg, message)


def spp(A, B, x0, cfg=None):
    """Shifted projected power method on the Rayleigh quotient."""
    cfg = cfg or SolverConfig.from_settings()
    started = _start('spp', A, B, cfg)
    m = A.order
    x = project_sphere_plus(as_vector(x0, A.dim))
    try:
        lam = merit.rayleigh_value(A, B, x)
        g = merit.rayleigh_gradient(A, B, x)
    except TEiCPError as exc:
        return _failed_start('spp', A, B, x, exc, started, cfg)

    trace = [IterationRecord(0, lam, lam, float(np.linalg.norm(g)))]
    status, message = SolverStatus.MAX_ITERS, ''

    try:
        for k in range(cfg.max_iters):
            if np.linalg.norm(g) <= cfg.tol:
                status = SolverStatus.CONVERGED
                break
            shift = adaptive_shift(merit.rayleigh_hessian(A, B, x), cfg.tau, m)
            ascent = project_orthant(g + shift * m * x)
            ascent_norm = float(np.linalg.norm(ascent))
            if ascent_norm == 0.0:
                status = SolverStatus.DOMAIN_ERROR
                message = f"shifted gradient has no positive part at iteration {k}"
                break
            if ascent_norm <= cfg.tol:
                status = SolverStatus.CONVERGED
                break

            x_new = ascent / ascent_norm
            lam_new = merit.rayleigh_value(A, B, x_new)
            g = merit.rayleigh_gradient(A, B, x_new)
            grad_norm = float(np.linalg.norm(g))
            trace.append(IterationRecord(k + 1, lam_new, lam_new, grad_norm, 1.0 / ascent_norm, shift=shift))
            logger.debug(f"spp k={k + 1} lambda={lam_new:.10f} shift={shift:.3e}")

            stop = _stop_rule(A, B, cfg, x_new - x, lam_new - lam, grad_norm, lam_new, x_new)
            x, lam = x_new, lam_new
            if stop:
                status = SolverStatus.CONVERGED
                break
    except TEiCPError as exc:
        status, message = SolverStatus.DOMAIN_ERROR, str(exc)

    return _finish('spp', A, B, lam, x, status, trace, started, cfg, message)


def _residual_gradient(A, B, x):
    """(lambda, Ax^{m-1} - lambda Bx^{m-1}) with lambda the Rayleigh quotient."""
    lam = merit.rayleigh_value(A, B, x)
    return lam, A.contract_m_minus_1(x) - lam * B.contract_m_minus_1(x)


def spa(A, B, u0, cfg=None):
    """Scaling-and-projection; spa_scale > 1 amplifies the stepsize ||g_k||."""
    cfg = cfg or SolverConfig.from_settings()
    started = _start('spa', A, B, cfg)
    u0 = as_vector(u0, A.dim)
    try:
        x = b_normalize(project_sphere_plus(u0), B)
        lam, g = _residual_gradient(A, B, x)
    except TEiCPError as exc:
        return _failed_start('spa', A, B, u0, exc, started, cfg)

    grad_norm = float(np.linalg.norm(g))
    trace = [IterationRecord(0, lam, lam, grad_norm)]
    status, message = SolverStatus.MAX_ITERS, ''

    try:
        for k in range(cfg.max_iters):
            if grad_norm <= cfg.tol:
                status = SolverStatus.CONVERGED
                break
            alpha = cfg.spa_scale * grad_norm
            x_new = b_normalize(project_step(x + alpha * g, cfg.projection), B)
            lam_new, g = _residual_gradient(A, B, x_new)
            grad_norm = float(np.linalg.norm(g))
            trace.append(IterationRecord(k + 1, lam_new, lam_new, grad_norm, alpha))
            logger.debug(f"spa k={k + 1} lambda={lam_new:.10f} alpha={alpha:.3e}")

            stop = _stop_rule(A, B, cfg, x_new - x, lam_new - lam, grad_norm, lam_new, x_new)
            x, lam = x_new, lam_new
            if stop:
                status = SolverStatus.CONVERGED
                break
    except TEiCPError as exc:
        status, message = SolverStatus.DOMAIN_ERROR, str(exc)

    return _finish('spa', A, B, lam, x, status, trace, started, cfg, message)


def sspa(A, B, u0, cfg=None):
    """Shifted scaling-and-projection.

    The step follows grad f(x_k) + r_k m x_k with f the Rayleigh quotient, so
    the gradient and the shift r_k come from the same function. The residual
    y_k = Ax_k^{m-1} - lambda_k Bx_k^{m-1} only drives the stopping tests.
    """
    cfg = cfg or SolverConfig.from_settings()
    started = _start('sspa', A, B, cfg)
    m = A.order
    u0 = as_vector(u0, A.dim)
    try:
        x = b_normalize(project_sphere_plus(u0), B)
        lam, y = _residual_gradient(A, B, x)
    except TEiCPError as exc:
        return _failed_start('sspa', A, B, u0, exc, started, cfg)

    trace = [IterationRecord(0, lam, lam, float(np.linalg.norm(y)))]
    status, message = SolverStatus.MAX_ITERS, ''

    try:
        for k in range(cfg.max_iters):
            if np.linalg.norm(y) <= cfg.tol:
                status = SolverStatus.CONVERGED
                break
            shift = adaptive_shift(merit.rayleigh_hessian(A, B, x), cfg.tau, m)
            shifted = merit.rayleigh_gradient(A, B, x) + shift * m * x
            alpha = float(np.linalg.norm(shifted))
            x_new = b_normalize(project_step(x + alpha * shifted, cfg.projection), B)
            lam_new, y = _residual_gradient(A, B, x_new)
            grad_norm = float(np.linalg.norm(y))
            trace.append(IterationRecord(k + 1, lam_new, lam_new, grad_norm, alpha, shift=shift))
            logger.debug(f"sspa k={k + 1} lambda={lam_new:.10f} shift={shift:.3e}")

            stop = _stop_rule(A, B, cfg, x_new - x, lam_new - lam, grad_norm, lam_new, x_new)
            x, lam = x_new, lam_new
            if stop:
                status = SolverStatus.CONVERGED
                break
    except TEiCPError as exc:
        status, message = SolverStatus.DOMAIN_ERROR, str(exc)

    return _finish('sspa', A, B, lam, x, status, trace, started, cfg, message)


SOLVERS = {
    'spg1': spg1,
    'spg2': spg2,
    'spp': spp,
    'spa': spa,
    'sspa': sspa,
}


def solve(name, A, B, x0, cfg=None):
    """Run a solver by its identifier."""
    try:
        solver = SOLVERS[name]
    except KeyError:
        raise SolverConfigError(f"unknown solver {name!r}; choose from {', '.join(SOLVERS)}") from None
    return solver(A, B, x0, cfg)
