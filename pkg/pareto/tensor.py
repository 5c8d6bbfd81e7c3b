"""
Storage and contraction kernels for order-m, dimension-n real tensors.

Three operators share the TensorOperator interface: a dense symmetric tensor,
the H-identity I (diagonal delta tensor) and the Z-identity epsilon, which only
exists in operator form. Indices are 0-based here; the JSON format and the
problem fixtures use the 1-based indices of the literature and translate on
the way in.
"""
import enum
import itertools
import json
import logging
import math
from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np

from .exceptions import DimensionMismatchError, OperatorDomainError, SymmetryError, TensorFormatError

logger = logging.getLogger(__name__)

# Above this many entries symmetry is checked by sampling.
EXHAUSTIVE_SYMMETRY_LIMIT = 10 ** 6
SYMMETRY_SAMPLES = 100


def as_vector(x, dim):
    """Return x as a float vector of length dim or raise DimensionMismatchError."""
    vec = np.asarray(x, dtype=float)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise DimensionMismatchError(f"expected a vector of length {dim}, got shape {vec.shape}")
    return vec


class TensorOperator(ABC):
    """An order-m operator evaluated through Tx^m, Tx^{m-1} and Tx^{m-2}."""

    order: int
    dim: int

    @abstractmethod
    def contract_m(self, x):
        """Scalar Tx^m."""

    @abstractmethod
    def contract_m_minus_1(self, x):
        """Vector Tx^{m-1}."""

    @abstractmethod
    def contract_m_minus_2(self, x):
        """Symmetric matrix Tx^{m-2}."""

    def _vector(self, x):
        return as_vector(x, self.dim)


def _canonical_positions(order, dim):
    """Flat position of the sorted representative of every index tuple."""
    shape = (dim,) * order
    grid = np.indices(shape).reshape(order, -1)
    return np.ravel_multi_index(np.sort(grid, axis=0), shape).reshape(shape)


def _canonicalize(array):
    """Copy each sorted-index entry to every permutation of its index tuple."""
    positions = _canonical_positions(array.ndim, array.shape[0])
    return array.ravel()[positions]


def is_symmetric(array, rng=None):
    """Check invariance of a dense array under index permutations.

    Invariance under the adjacent transpositions generates the full symmetric
    group, so the exhaustive branch only needs m - 1 comparisons.
    """
    array = np.asarray(array)
    order = array.ndim
    if order < 2:
        return True
    if array.size <= EXHAUSTIVE_SYMMETRY_LIMIT:
        for axis in range(order - 1):
            axes = list(range(order))
            axes[axis], axes[axis + 1] = axes[axis + 1], axes[axis]
            if not np.array_equal(array, array.transpose(axes)):
                return False
        return True

    rng = rng if rng is not None else np.random.default_rng(0)
    dim = array.shape[0]
    for _ in range(SYMMETRY_SAMPLES):
        idx = tuple(rng.integers(0, dim, size=order))
        perm = tuple(np.array(idx)[rng.permutation(order)])
        if array[idx] != array[perm]:
            return False
    return True


class DenseSymmetricTensor(TensorOperator):
    """Order-m, dimension-n symmetric tensor stored as a full n^m array."""

    def __init__(self, entries, check=True):
        array = np.array(entries, dtype=float)
        if array.ndim < 2:
            raise DimensionMismatchError(f"tensor order must be >= 2, got {array.ndim}")
        if array.shape[0] < 1 or len(set(array.shape)) != 1:
            raise DimensionMismatchError(f"tensor must be cubical with dim >= 1, got shape {array.shape}")
        if check and not is_symmetric(array):
            raise SymmetryError("entries are not invariant under index permutations")
        array.setflags(write=False)
        self._entries = array

    @property
    def order(self):
        return self._entries.ndim

    @property
    def dim(self):
        return self._entries.shape[0]

    @property
    def entries(self):
        return self._entries

    def __getitem__(self, idx):
        return self._entries[idx]

    def __eq__(self, other):
        if not isinstance(other, DenseSymmetricTensor):
            return NotImplemented
        return self._entries.shape == other._entries.shape and np.array_equal(self._entries, other._entries)

    __hash__ = None

    def __repr__(self):
        return f"DenseSymmetricTensor(order={self.order}, dim={self.dim})"

    def _partial(self, x, times):
        out = self._entries
        for _ in range(times):
            out = out @ x
        return out

    def contract_m(self, x):
        x = self._vector(x)
        return float(x @ self._partial(x, self.order - 1))

    def contract_m_minus_1(self, x):
        x = self._vector(x)
        return np.asarray(self._partial(x, self.order - 1), dtype=float)

    def contract_m_minus_2(self, x):
        x = self._vector(x)
        matrix = self._partial(x, self.order - 2)
        return 0.5 * (matrix + matrix.T)


class HIdentity(TensorOperator):
    """Diagonal delta tensor: (Ix^{m-1})_i = x_i^{m-1}."""

    def __init__(self, order, dim):
        if order < 2 or dim < 1:
            raise DimensionMismatchError(f"invalid H-identity shape order={order}, dim={dim}")
        self.order = order
        self.dim = dim

    def __repr__(self):
        return f"HIdentity(order={self.order}, dim={self.dim})"

    def contract_m(self, x):
        x = self._vector(x)
        return float(np.sum(x ** self.order))

    def contract_m_minus_1(self, x):
        x = self._vector(x)
        return x ** (self.order - 1)

    def contract_m_minus_2(self, x):
        x = self._vector(x)
        return np.diag(x ** (self.order - 2))

    def materialize(self):
        """Explicit diagonal DenseSymmetricTensor with the same action."""
        entries = np.zeros((self.dim,) * self.order)
        for i in range(self.dim):
            entries[(i,) * self.order] = 1.0
        return DenseSymmetricTensor(entries, check=False)


class ZIdentity(TensorOperator):
    """Identity epsilon with epsilon x^{m-1} = ||x||^{m-2} x.

    The matrix form is defined through the Hessian relation
    m(m-1) epsilon x^{m-2} = Hess(||x||^m), which keeps the Rayleigh-quotient
    Hessian consistent.
    """

    def __init__(self, order, dim):
        if order < 2 or dim < 1:
            raise DimensionMismatchError(f"invalid Z-identity shape order={order}, dim={dim}")
        self.order = order
        self.dim = dim

    def __repr__(self):
        return f"ZIdentity(order={self.order}, dim={self.dim})"

    def contract_m(self, x):
        x = self._vector(x)
        return float(np.linalg.norm(x) ** self.order)

    def contract_m_minus_1(self, x):
        x = self._vector(x)
        return np.linalg.norm(x) ** (self.order - 2) * x

    def contract_m_minus_2(self, x):
        x = self._vector(x)
        m = self.order
        norm = np.linalg.norm(x)
        if norm == 0.0 and (m > 4 or m == 3):
            raise OperatorDomainError(f"Z-identity matrix form of order {m} is undefined at x = 0")
        eye = np.eye(self.dim)
        if m == 2:
            return eye
        matrix = norm ** (m - 2) * eye + (m - 2) * norm ** (m - 4) * np.outer(x, x)
        return matrix / (m - 1)


def contract_m(tensor, x):
    """Tx^m."""
    return tensor.contract_m(x)


def contract_m_minus_1(tensor, x):
    """Tx^{m-1}."""
    return tensor.contract_m_minus_1(x)


def contract_m_minus_2(tensor, x):
    """Tx^{m-2}."""
    return tensor.contract_m_minus_2(x)


def symmetrize(raw):
    """Average a dense tensor over all index permutations.

    Already-symmetric input is returned unchanged, so the map is idempotent
    bit for bit. Otherwise each index class receives one averaged value,
    copied to all of its positions.
    """
    if isinstance(raw, DenseSymmetricTensor):
        return raw
    array = np.array(raw, dtype=float)
    if array.ndim < 2 or len(set(array.shape)) != 1:
        raise DimensionMismatchError(f"cannot symmetrize an array of shape {array.shape}")
    if is_symmetric(array):
        return DenseSymmetricTensor(array, check=False)

    order = array.ndim
    total = np.zeros_like(array)
    for perm in itertools.permutations(range(order)):
        total += array.transpose(perm)
    averaged = total / math.factorial(order)
    return DenseSymmetricTensor(_canonicalize(averaged), check=False)


def from_index_classes(order, dim, values):
    """Build a symmetric tensor from one value per index multiset.

    `values` maps 0-based index tuples to entries; each value is copied, not
    averaged, to every permutation of its tuple.
    """
    array = np.zeros((dim,) * order)
    for idx, val in values.items():
        idx = tuple(sorted(idx))
        if len(idx) != order or min(idx) < 0 or max(idx) >= dim:
            raise DimensionMismatchError(f"index {idx} does not fit order={order}, dim={dim}")
        array[idx] = val
    return DenseSymmetricTensor(_canonicalize(array), check=False)


def principal_subtensor(tensor, support):
    """Principal sub-tensor A_J for a 0-based index set J, reindexed to [|J|]."""
    support = list(support)
    if not support:
        raise DimensionMismatchError("principal sub-tensor needs a nonempty index set")
    if len(set(support)) != len(support):
        raise DimensionMismatchError(f"duplicate indices in {support}")
    if min(support) < 0 or max(support) >= tensor.dim:
        raise DimensionMismatchError(f"index set {support} out of range for dim {tensor.dim}")
    block = tensor.entries[np.ix_(*([support] * tensor.order))]
    return DenseSymmetricTensor(block, check=False)


def load_tensor(source):
    """Read the JSON tensor format.

    {"order": m, "dim": n, "entries": [{"idx": [i_1, ...], "val": v}, ...]}
    with 1-based indices. "symmetrize": true averages over permutations,
    "replicate": true copies each value to its whole index class; otherwise
    the listed entries must already form a symmetric tensor.
    """
    try:
        if isinstance(source, (str, Path)):
            with open(source) as handle:
                document = json.load(handle)
        elif isinstance(source, dict):
            document = source
        else:
            document = json.load(source)
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"tensor document is not valid JSON: {exc}") from exc

    try:
        order = int(document['order'])
        dim = int(document['dim'])
        listed = document.get('entries', [])
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"tensor document needs integer 'order' and 'dim': {exc}") from exc
    if order < 2 or dim < 1:
        raise TensorFormatError(f"invalid tensor shape order={order}, dim={dim}")

    values = {}
    for item in listed:
        try:
            idx = tuple(int(i) - 1 for i in item['idx'])
            val = float(item['val'])
        except (KeyError, TypeError, ValueError) as exc:
            raise TensorFormatError(f"malformed entry {item!r}") from exc
        if len(idx) != order or min(idx) < 0 or max(idx) >= dim:
            raise TensorFormatError(f"entry index {item['idx']} out of range")
        values[idx] = val

    if document.get('replicate'):
        return from_index_classes(order, dim, values)

    array = np.zeros((dim,) * order)
    for idx, val in values.items():
        array[idx] = val
    if document.get('symmetrize'):
        return symmetrize(array)
    return DenseSymmetricTensor(array)


def dump_tensor(tensor, target=None):
    """Serialize one entry per nonzero index class in the "replicate" form."""
    entries = []
    for idx in itertools.combinations_with_replacement(range(tensor.dim), tensor.order):
        val = float(tensor.entries[idx])
        if val != 0.0:
            entries.append({'idx': [i + 1 for i in idx], 'val': val})
    document = {'order': tensor.order, 'dim': tensor.dim, 'replicate': True, 'entries': entries}
    if target is not None:
        with open(target, 'w') as handle:
            json.dump(document, handle, indent=2)
        logger.info(f"Wrote {len(entries)} tensor classes to {target}")
    return document


class IdentityKind(str, enum.Enum):
    """Which identity plays the role of B."""
    Z = 'z'
    H = 'h'


def identity(kind, order, dim):
    """Build the Z- or H-identity operator."""
    if IdentityKind(kind) is IdentityKind.H:
        return HIdentity(order, dim)
    return ZIdentity(order, dim)
