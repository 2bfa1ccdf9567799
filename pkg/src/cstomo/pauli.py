"""Pauli measurement settings and the linear sensing operator.

A measurement setting is a Pauli word, a string over {X, Y, Z} (identity
letters excluded).  Its d = 2^n eigenprojectors are rank-1 tensor products
of single-qubit eigenvectors with fixed phase conventions:

    Z -> |0>, |1>        X -> (|0> +- |1>)/sqrt(2)      Y -> (|0> +- i|1>)/sqrt(2)

Outcome index k encodes the eigenvalue sign pattern as bits (+ -> 0,
- -> 1), first qubit most significant.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from threading import Lock

import numpy as np

from .exceptions import DimensionMismatchError, InvalidArgumentError
from .states import HermitianMatrix

__all__ = [
    "PAULI_LETTERS",
    "validate_word",
    "SettingsPlan",
    "ProjectorSet",
    "eigenprojectors",
    "enumerate_settings",
    "born_probabilities",
    "apply_sensing",
    "apply_sensing_adjoint",
    "herm_to_vec",
    "vec_to_herm",
    "sensing_matrix",
]

PAULI_LETTERS = "XYZ"

_EIGVECS = {
    "Z": (np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)),
    "X": (
        np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
        np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
    ),
    "Y": (
        np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0),
        np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0),
    ),
}


def validate_word(word):
    """Check a Pauli word and return it; raise InvalidArgumentError if bad."""
    if not isinstance(word, str) or len(word) < 1:
        raise InvalidArgumentError(f"Pauli word must be a nonempty string, got {word!r}")
    bad = set(word) - set(PAULI_LETTERS)
    if bad:
        raise InvalidArgumentError(f"Pauli word {word!r} contains invalid letters {bad}")
    return word


@dataclass(frozen=True)
class ProjectorSet:
    """The d rank-1 eigenprojectors of one measurement setting."""

    word: str
    projectors: np.ndarray  # (d, d, d) complex, axis 0 = outcome index

    @property
    def dim(self):
        return self.projectors.shape[0]


@dataclass(frozen=True)
class SettingsPlan:
    """An ordered list of distinct settings with copies (shots) per setting."""

    words: tuple
    shots: tuple

    def __init__(self, words, shots):
        words = tuple(validate_word(w) for w in words)
        if len(set(words)) != len(words):
            raise InvalidArgumentError("settings plan contains duplicate words")
        if len(words) == 0:
            raise InvalidArgumentError("settings plan is empty")
        if np.isscalar(shots):
            shots = (shots,) * len(words)
        else:
            shots = tuple(shots)
        if len(shots) != len(words):
            raise InvalidArgumentError("shots list length disagrees with words")
        if any(s < 1 for s in shots):
            raise InvalidArgumentError("every shot count must be >= 1")
        if len(set(len(w) for w in words)) != 1:
            raise InvalidArgumentError("all words in a plan must have equal length")
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "shots", shots)

    @property
    def n_qubits(self):
        return len(self.words[0])

    @property
    def n_settings(self):
        return len(self.words)

    def to_json_dict(self):
        return {"words": list(self.words), "shots": list(self.shots)}

    @classmethod
    def from_json_dict(cls, payload):
        return cls(payload["words"], payload["shots"])


_cache_lock = Lock()


@lru_cache(maxsize=None)
def _projectors_for_word(word):
    n = len(word)
    d = 2 ** n
    projs = np.empty((d, d, d), dtype=complex)
    for k in range(d):
        vec = np.array([1.0], dtype=complex)
        for i, letter in enumerate(word):
            bit = (k >> (n - 1 - i)) & 1
            vec = np.kron(vec, _EIGVECS[letter][bit])
        projs[k] = np.outer(vec, vec.conj())
    projs.setflags(write=False)
    return projs


def eigenprojectors(word):
    """Projector set of one Pauli word; results are cached per word."""
    validate_word(word)
    with _cache_lock:
        projs = _projectors_for_word(word)
    return ProjectorSet(word=word, projectors=projs)


def enumerate_settings(n):
    """All 3^n Pauli words in lexicographic order over X < Y < Z."""
    if n < 1:
        raise InvalidArgumentError("qubit count must be >= 1")
    return ["".join(p) for p in itertools.product(sorted(PAULI_LETTERS), repeat=n)]


def _check_dims(dim, word):
    if 2 ** len(word) != dim:
        raise DimensionMismatchError(
            f"word {word!r} implies dimension {2 ** len(word)}, matrix has {dim}"
        )


def born_probabilities(rho, word):
    """Outcome probabilities p_k = tr(Pi_k rho), clipped and renormalized."""
    _check_dims(rho.dim, word)
    projs = eigenprojectors(word).projectors
    p = np.einsum("kij,ji->k", projs, rho.entries).real
    if p.min() < -1e-10:
        raise InvalidArgumentError(
            f"negative Born probability {p.min():.3e}; input is not a valid state"
        )
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise InvalidArgumentError(f"probabilities sum to {total}, expected 1")
    return p / total


# --- Vectorization over the real space of Hermitian matrices -----------------
#
# Orthonormal coordinates under the Frobenius inner product: the diagonal,
# then sqrt(2) * Re and sqrt(2) * Im of the upper triangle.  tr(A B) for
# Hermitian A, B equals the Euclidean dot product of their coordinates,
# which lets the whole sensing operator live as one dense real matrix.

_SQRT2 = np.sqrt(2.0)


def herm_to_vec(mat):
    d = mat.shape[0]
    iu = np.triu_indices(d, k=1)
    return np.concatenate(
        [mat.diagonal().real, _SQRT2 * mat[iu].real, _SQRT2 * mat[iu].imag]
    )


def vec_to_herm(vec, d):
    iu = np.triu_indices(d, k=1)
    n_off = iu[0].size
    mat = np.zeros((d, d), dtype=complex)
    np.fill_diagonal(mat, vec[:d])
    upper = (vec[d : d + n_off] + 1j * vec[d + n_off :]) / _SQRT2
    mat[iu] = upper
    mat[(iu[1], iu[0])] = upper.conj()
    return mat


@lru_cache(maxsize=None)
def _projector_vecs(word):
    """Rows: herm_to_vec of each projector of `word`; shape (d, d^2)."""
    projs = _projectors_for_word(word)
    rows = np.stack([herm_to_vec(p) for p in projs])
    rows.setflags(write=False)
    return rows


def sensing_matrix(plan):
    """Dense real matrix of the sensing operator, shape (m*d, d^2).

    Row j*d + k is N_j times the coordinates of Pi_k^(j), so that
    ``sensing_matrix(plan) @ herm_to_vec(rho)`` flattens A(rho) row-major.
    """
    with _cache_lock:
        blocks = [
            shots * _projector_vecs(word)
            for word, shots in zip(plan.words, plan.shots)
        ]
    return np.concatenate(blocks, axis=0)


def apply_sensing(rho, plan):
    """The operator A: entry (j, k) = N_j tr(Pi_k^(j) rho)."""
    _check_dims(rho.dim, plan.words[0])
    d = rho.dim
    out = sensing_matrix(plan) @ herm_to_vec(rho.entries)
    return out.reshape(plan.n_settings, d)


def apply_sensing_adjoint(data, plan):
    """Adjoint of A: sum_{j,k} data[j,k] N_j Pi_k^(j) as a HermitianMatrix."""
    d = 2 ** plan.n_qubits
    data = np.asarray(data, dtype=float)
    if data.shape != (plan.n_settings, d):
        raise DimensionMismatchError(
            f"data shape {data.shape} does not match plan ({plan.n_settings}, {d})"
        )
    vec = sensing_matrix(plan).T @ data.ravel()
    return HermitianMatrix(vec_to_herm(vec, d))
