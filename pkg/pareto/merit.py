"""
Merit functions for the optimization reformulations of the symmetric TEiCP.

Rayleigh:     lambda(x) = Ax^m / Bx^m
Logarithmic:  f(x) = ln(Ax^m) - ln(Bx^m)

Both are degree-0 homogeneous, so their gradients are tangent to the sphere
whenever A and B satisfy Euler's identity x . Tx^{m-1} = Tx^m.
"""
import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import MeritDomainError, SingularDenominatorError

logger = logging.getLogger(__name__)


class MeritKind(str, enum.Enum):
    RAYLEIGH = 'rayleigh'
    LOGARITHMIC = 'log'


@dataclass(frozen=True)
class MeritEval:
    """One merit evaluation; `lam` is always the Rayleigh quotient."""
    value: float
    gradient: np.ndarray
    lam: float


def _denominator(B, x):
    bxm = B.contract_m(x)
    if bxm == 0.0:
        raise SingularDenominatorError("Bx^m vanishes at the evaluation point")
    return bxm


def _positive_pair(A, B, x):
    axm = A.contract_m(x)
    if not axm > 0.0:
        raise MeritDomainError('A', axm)
    bxm = B.contract_m(x)
    if not bxm > 0.0:
        raise MeritDomainError('B', bxm)
    return axm, bxm


def _sym_outer(u, v):
    """u v^T + v u^T."""
    outer = np.outer(u, v)
    return outer + outer.T


def rayleigh_value(A, B, x):
    return A.contract_m(x) / _denominator(B, x)


def rayleigh_gradient(A, B, x):
    """g(x) = (m / Bx^m) (Ax^{m-1} - lambda(x) Bx^{m-1})."""
    m = A.order
    bxm = _denominator(B, x)
    lam = A.contract_m(x) / bxm
    return (m / bxm) * (A.contract_m_minus_1(x) - lam * B.contract_m_minus_1(x))


def rayleigh_hessian(A, B, x):
    m = A.order
    bxm = _denominator(B, x)
    axm = A.contract_m(x)
    ax1 = A.contract_m_minus_1(x)
    bx1 = B.contract_m_minus_1(x)
    hessian = (
        m * (m - 1) * A.contract_m_minus_2(x) / bxm
        - (m * (m - 1) * axm * B.contract_m_minus_2(x) + m ** 2 * _sym_outer(ax1, bx1)) / bxm ** 2
        + m ** 2 * axm * _sym_outer(bx1, bx1) / bxm ** 3
    )
    return 0.5 * (hessian + hessian.T)


def log_value(A, B, x):
    axm, bxm = _positive_pair(A, B, x)
    return math.log(axm) - math.log(bxm)


def log_gradient(A, B, x):
    """g(x) = m Ax^{m-1} / Ax^m - m Bx^{m-1} / Bx^m."""
    m = A.order
    axm, bxm = _positive_pair(A, B, x)
    return m * A.contract_m_minus_1(x) / axm - m * B.contract_m_minus_1(x) / bxm


def log_hessian(A, B, x):
    m = A.order
    axm, bxm = _positive_pair(A, B, x)
    ax1 = A.contract_m_minus_1(x)
    bx1 = B.contract_m_minus_1(x)
    hessian = (
        m * (m - 1) * A.contract_m_minus_2(x) / axm
        - m * (m - 1) * B.contract_m_minus_2(x) / bxm
        + m ** 2 * np.outer(bx1, bx1) / bxm ** 2
        - m ** 2 * np.outer(ax1, ax1) / axm ** 2
    )
    return 0.5 * (hessian + hessian.T)


def evaluate(A, B, x, kind=MeritKind.RAYLEIGH):
    """Value and gradient of the selected merit plus the Rayleigh quotient."""
    kind = MeritKind(kind)
    if kind is MeritKind.RAYLEIGH:
        lam = rayleigh_value(A, B, x)
        return MeritEval(value=lam, gradient=rayleigh_gradient(A, B, x), lam=lam)
    value = log_value(A, B, x)
    return MeritEval(value=value, gradient=log_gradient(A, B, x), lam=rayleigh_value(A, B, x))


def value(A, B, x, kind=MeritKind.RAYLEIGH):
    if MeritKind(kind) is MeritKind.RAYLEIGH:
        return rayleigh_value(A, B, x)
    return log_value(A, B, x)


def hessian(A, B, x, kind=MeritKind.RAYLEIGH):
    if MeritKind(kind) is MeritKind.RAYLEIGH:
        return rayleigh_hessian(A, B, x)
    return log_hessian(A, B, x)
