"""
Projections onto the feasible sets of the solvers.

Omega = S^{n-1}_+ is the unit sphere intersected with the nonnegative orthant.
Its nearest-point map has two cases: threshold then normalize, or, when no
component is positive, the vertex e_i at the largest component.
"""
import enum
import logging

import numpy as np

from .exceptions import ScalingError

logger = logging.getLogger(__name__)


class ProjectionKind(str, enum.Enum):
    SPHERE_PLUS = 'sphere_plus'
    ORTHANT = 'orthant'


def project_sphere_plus(v):
    v = np.asarray(v, dtype=float)
    positive = np.maximum(v, 0.0)
    norm = np.linalg.norm(positive)
    if norm > 0.0:
        return positive / norm
    # np.argmax returns the smallest index on ties
    vertex = np.zeros_like(v)
    vertex[int(np.argmax(v))] = 1.0
    return vertex


def project_orthant(v):
    return np.maximum(np.asarray(v, dtype=float), 0.0)


def b_normalize(u, B):
    """u / (Bu^m)^{1/m}, so that the result y satisfies By^m = 1."""
    u = np.asarray(u, dtype=float)
    bum = B.contract_m(u)
    if not bum > 0.0:
        raise ScalingError(f"B-normalization needs Bu^m > 0, got {bum!r}")
    return u / bum ** (1.0 / B.order)


def project_step(v, kind=ProjectionKind.SPHERE_PLUS):
    """Projection used inside the scaling-and-projection methods."""
    if ProjectionKind(kind) is ProjectionKind.ORTHANT:
        return project_orthant(v)
    return project_sphere_plus(v)
