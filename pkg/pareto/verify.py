"""
Certification oracles for candidate Pareto eigenpairs.

residual() measures how far (lambda, x) is from solving
    0 <= x  _|_  (lambda B - A) x^{m-1} >= 0,
diagonal_pareto_spectrum() enumerates the complete Pareto spectrum of a
diagonal tensor by facial decomposition, and fd_gradient()/fd_jacobian()
are central-difference derivative oracles.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .tensor import DenseSymmetricTensor, IdentityKind, identity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualTriple:
    primal: float
    dual: float
    comp: float

    @property
    def max_component(self):
        return max(self.primal, self.dual, self.comp)

    def as_dict(self):
        return {'primal': self.primal, 'dual': self.dual, 'comp': self.comp}


@dataclass(frozen=True)
class ParetoCandidate:
    """One member of a diagonal tensor's Pareto spectrum (support is 0-based)."""
    lam: float
    support: tuple
    x: np.ndarray


def residual(A, B, lam, x):
    x = np.asarray(x, dtype=float)
    w = lam * B.contract_m_minus_1(x) - A.contract_m_minus_1(x)
    return ResidualTriple(
        primal=float(max(0.0, -np.min(x))),
        dual=float(max(0.0, -np.min(w))),
        comp=float(abs(x @ w)),
    )


def is_pareto_eigenpair(A, B, lam, x, tol):
    """Certify (lam, x) after scaling x to unit 2-norm."""
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        return False
    return residual(A, B, lam, x / norm).max_component <= tol


def _diagonal_tensor(diag, order):
    n = len(diag)
    entries = np.zeros((n,) * order)
    for i, a in enumerate(diag):
        entries[(i,) * order] = a
    return DenseSymmetricTensor(entries, check=False)


def _face_candidate(values, order, b_kind):
    """Closed-form eigenpair with strictly positive x on one face, or None."""
    k = len(values)
    if b_kind is IdentityKind.H or order == 2:
        # a_i x_i^{m-1} = lambda x_i^{m-1} forces a common value
        if np.all(values == values[0]):
            return float(values[0]), np.full(k, 1.0 / np.sqrt(k))
        return None

    # Z case: a_i x_i^{m-2} = lambda on the unit sphere
    if np.all(values == 0.0):
        return 0.0, np.full(k, 1.0 / np.sqrt(k))
    if np.all(values > 0.0):
        sign = 1.0
    elif np.all(values < 0.0):
        sign = -1.0
    else:
        return None
    if k == 1:
        return float(values[0]), np.ones(1)
    magnitudes = np.abs(values)
    p = order - 2
    lam = sign * np.sum(magnitudes ** (-2.0 / p)) ** (-p / 2.0)
    x = (lam / values) ** (1.0 / p)
    return float(lam), x / np.linalg.norm(x)


def diagonal_pareto_spectrum(diag, order, b_kind=IdentityKind.Z, tol=1e-10):
    """All Pareto eigenpairs of a diagonal tensor, ordered by support bitmask.

    Each nonempty support I yields at most one candidate from its closed form;
    the candidate is kept only if the residual check, which includes the
    off-support dual feasibility, passes at `tol`.
    """
    diag = np.asarray(diag, dtype=float)
    b_kind = IdentityKind(b_kind)
    n = diag.shape[0]
    A = _diagonal_tensor(diag, order)
    B = identity(b_kind, order, n)

    spectrum = []
    for mask in range(1, 2 ** n):
        support = tuple(i for i in range(n) if mask >> i & 1)
        face = _face_candidate(diag[list(support)], order, b_kind)
        if face is None:
            continue
        lam, x_face = face
        x = np.zeros(n)
        x[list(support)] = x_face
        if residual(A, B, lam, x).max_component <= tol:
            spectrum.append(ParetoCandidate(lam=lam, support=support, x=x))
        else:
            logger.debug(f"Dropping support {support}: dual feasibility fails at lambda={lam}")
    return spectrum


def spectrum_extremes(spectrum):
    """(smallest, largest) Pareto eigenvalue of an enumerated spectrum."""
    values = [c.lam for c in spectrum]
    return min(values), max(values)


def fd_gradient(fn, x, h=1e-6):
    """Central-difference gradient of a scalar field."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (fn(x + step) - fn(x - step)) / (2 * h)
    return grad


def fd_jacobian(fn, x, h=1e-5):
    """Central-difference Jacobian of a vector field; column i is d fn / d x_i."""
    x = np.asarray(x, dtype=float)
    columns = []
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        columns.append((np.asarray(fn(x + step)) - np.asarray(fn(x - step))) / (2 * h))
    return np.column_stack(columns)
