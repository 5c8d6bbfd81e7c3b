"""
Test problems: the six example tensors of the TEiCP literature, seeded random
symmetric tensors, and tensors loaded from JSON files.

Problems are addressed by short identifiers such as ``ex1``, ``ex2:n=5``,
``rand:n=4,m=4,seed=7`` or ``file:path=tensor.json,b=h``.
"""
import enum
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidProblemError
from .tensor import DenseSymmetricTensor, IdentityKind, from_index_classes, identity, load_tensor, symmetrize

logger = logging.getLogger(__name__)


class ProblemId(str, enum.Enum):
    EX1 = 'ex1'
    EX2 = 'ex2'
    EX3 = 'ex3'
    EX4 = 'ex4'
    EX5 = 'ex5'
    EX6 = 'ex6'
    RANDOM = 'rand'
    FILE = 'file'


# One value per index class of a symmetric 3-dimensional order-4 tensor
KOFIDIS_REGALIA_ENTRIES = {
    (1, 1, 1, 1): 0.2883, (1, 1, 1, 2): -0.0031, (1, 1, 1, 3): 0.1973,
    (1, 1, 2, 2): -0.2485, (1, 2, 2, 3): 0.1862, (1, 1, 3, 3): 0.3847,
    (1, 2, 2, 2): 0.2972, (1, 1, 2, 3): -0.2939, (1, 2, 3, 3): 0.0919,
    (1, 3, 3, 3): -0.3619, (2, 2, 2, 2): 0.1241, (2, 2, 2, 3): -0.3420,
    (2, 2, 3, 3): 0.2127, (2, 3, 3, 3): 0.2727, (3, 3, 3, 3): -0.3054,
}

# Literal positions, symmetrized by permutation averaging afterwards
NEARLY_DIAGONAL_ENTRIES = {
    (1, 1, 1, 1): 1.00397, (2, 2, 2, 2): 0.99397, (3, 3, 3, 3): 1.00207,
    (1, 2, 2, 2): 0.00401, (2, 1, 1, 1): 0.00788, (3, 1, 1, 1): 0.00001,
    (3, 2, 2, 2): 0.00005, (1, 3, 3, 3): 0.99603, (2, 3, 3, 3): 1.0040,
}

DEFAULT_STARTS = {
    ProblemId.EX3: [0.9015, 0.3183, 0.5970],
    ProblemId.EX4: [0.3319, 0.8397, 0.3717, 0.8282, 0.1765],
    ProblemId.EX5: [0.2291, 0.0922, 0.2409, 0.9025, 0.21734],
    ProblemId.EX6: [0.1846, 0.8337, 0.1696, 0.9532, 0.7225],
}

_FIXED_DIM = {ProblemId.EX1: 3, ProblemId.EX3: 3}
_H_PROBLEMS = {ProblemId.EX4, ProblemId.EX5, ProblemId.EX6}
_ALLOWED_KEYS = {
    ProblemId.EX1: {'b'},
    ProblemId.EX3: {'b'},
    ProblemId.EX2: {'n', 'b'},
    ProblemId.EX4: {'n', 'b'},
    ProblemId.EX5: {'n', 'b'},
    ProblemId.EX6: {'n', 'b'},
    ProblemId.RANDOM: {'n', 'm', 'seed', 'b'},
    ProblemId.FILE: {'path', 'b'},
}


@dataclass(frozen=True)
class ProblemSpec:
    id: ProblemId
    n: int = None
    m: int = 4
    seed: int = 0
    b_kind: IdentityKind = IdentityKind.Z
    path: str = None

    def __post_init__(self):
        object.__setattr__(self, 'id', ProblemId(self.id))
        object.__setattr__(self, 'b_kind', IdentityKind(self.b_kind))
        if self.id in _FIXED_DIM:
            if self.n not in (None, _FIXED_DIM[self.id]):
                raise InvalidProblemError(f"{self.id.value} is fixed at n = {_FIXED_DIM[self.id]}")
            object.__setattr__(self, 'n', _FIXED_DIM[self.id])
        elif self.id is ProblemId.FILE:
            if not self.path:
                raise InvalidProblemError("file problems need path=...")
        else:
            if self.n is None:
                object.__setattr__(self, 'n', 5 if self.id is not ProblemId.RANDOM else 4)
            if self.n < 1:
                raise InvalidProblemError(f"n must be >= 1, got {self.n}")
        if self.id is ProblemId.RANDOM and (self.m < 2 or self.m % 2):
            raise InvalidProblemError(f"random tensors need an even order m >= 2, got {self.m}")

    @classmethod
    def parse(cls, text):
        """Parse ``name[:key=value,...]``."""
        name, _, params = text.strip().partition(':')
        try:
            problem_id = ProblemId(name.lower())
        except ValueError:
            choices = ', '.join(p.value for p in ProblemId)
            raise InvalidProblemError(f"unknown problem {name!r}; choose from {choices}") from None

        options = {}
        for item in filter(None, params.split(',')):
            key, sep, val = item.partition('=')
            key = key.strip()
            if not sep or key not in _ALLOWED_KEYS[problem_id]:
                raise InvalidProblemError(f"unexpected parameter {item!r} for {problem_id.value}")
            options[key] = val.strip()

        kwargs = {'id': problem_id}
        try:
            for key in ('n', 'm', 'seed'):
                if key in options:
                    kwargs[key] = int(options[key])
            b_kind = options.get('b', 'h' if problem_id in _H_PROBLEMS else 'z')
            kwargs['b_kind'] = IdentityKind(b_kind.lower())
        except ValueError as exc:
            raise InvalidProblemError(f"bad parameter in {text!r}: {exc}") from exc
        if 'path' in options:
            kwargs['path'] = options['path']
        return cls(**kwargs)

    def __str__(self):
        if self.id is ProblemId.FILE:
            return f"file:path={self.path},b={self.b_kind.value}"
        if self.id is ProblemId.RANDOM:
            return f"rand:n={self.n},m={self.m},seed={self.seed}"
        if self.id in _FIXED_DIM:
            return self.id.value
        return f"{self.id.value}:n={self.n}"

    def default_start(self, dim=None):
        """Starting point used by the published experiments, ones otherwise."""
        start = DEFAULT_STARTS.get(self.id)
        if start is not None and len(start) == self.n:
            return np.array(start)
        return np.ones(dim or self.n)


def _one_based(values):
    return {tuple(i - 1 for i in idx): val for idx, val in values.items()}


def kofidis_regalia():
    return from_index_classes(4, 3, _one_based(KOFIDIS_REGALIA_ENTRIES))


def diagonal_fraction(n):
    """Diagonal tensor with a_iiii = (i - 1) / i."""
    entries = np.zeros((n,) * 4)
    for i in range(1, n + 1):
        entries[(i - 1,) * 4] = (i - 1) / i
    return DenseSymmetricTensor(entries, check=False)


def nearly_diagonal():
    array = np.zeros((3,) * 4)
    for idx, val in _one_based(NEARLY_DIAGONAL_ENTRIES).items():
        array[idx] = val
    return symmetrize(array)


def _index_grid(n):
    return np.indices((n,) * 4) + 1


def sine_sum(n):
    """a_ijkl = sin(i + j + k + l)."""
    return symmetrize(np.sin(_index_grid(n).sum(axis=0)))


def tangent_sum(n):
    """a_ijkl = tan(i) + tan(j) + tan(k) + tan(l)."""
    return symmetrize(np.tan(_index_grid(n)).sum(axis=0))


def alternating_harmonic_sum(n):
    """a_ijkl = sum over the four indices of (-1)^i / i."""
    grid = _index_grid(n)
    return symmetrize(((-1.0) ** grid / grid).sum(axis=0))


def random_symmetric(n, m, seed):
    """Uniform[-1, 1] entries averaged over index permutations."""
    if n < 1 or m < 2 or m % 2:
        raise InvalidProblemError(f"random tensors need n >= 1 and even m >= 2, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    return symmetrize(rng.uniform(-1.0, 1.0, size=(n,) * m))


def random_start(n, seed):
    """Uniform[0, 1] entries; not normalized."""
    if n < 1:
        raise InvalidProblemError(f"n must be >= 1, got {n}")
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=n)


_BUILDERS = {
    ProblemId.EX1: lambda spec: kofidis_regalia(),
    ProblemId.EX2: lambda spec: diagonal_fraction(spec.n),
    ProblemId.EX3: lambda spec: nearly_diagonal(),
    ProblemId.EX4: lambda spec: sine_sum(spec.n),
    ProblemId.EX5: lambda spec: tangent_sum(spec.n),
    ProblemId.EX6: lambda spec: alternating_harmonic_sum(spec.n),
    ProblemId.RANDOM: lambda spec: random_symmetric(spec.n, spec.m, spec.seed),
    ProblemId.FILE: lambda spec: load_tensor(spec.path),
}


def build(spec):
    """Return (A, B) for a ProblemSpec or its string form."""
    if isinstance(spec, str):
        spec = ProblemSpec.parse(spec)
    A = _BUILDERS[spec.id](spec)
    B = identity(spec.b_kind, A.order, A.dim)
    logger.debug(f"Built {spec}: order={A.order}, dim={A.dim}, B={B!r}")
    return A, B
