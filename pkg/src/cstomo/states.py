"""Density matrices and figures of merit.

States are dense complex matrices at the scale of a few qubits (d = 2^n),
so everything runs through full eigendecompositions.  Basis convention:
computational basis ordered |0...00>, |0...01>, ..., |1...11> with the
first tensor factor as the most significant bit.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    InvalidStateError,
    NumericalError,
)
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "HermitianMatrix",
    "DensityMatrix",
    "ghz_state",
    "dephased_ghz",
    "maximally_mixed",
    "fidelity",
    "purity",
    "project_psd",
]


def _as_square_complex(entries):
    mat = np.asarray(entries, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {mat.shape}")
    return mat


@dataclass(frozen=True)
class HermitianMatrix:
    """A d x d Hermitian matrix with no trace or positivity requirement."""

    entries: np.ndarray
    tol: Tolerances = field(default=DEFAULT, repr=False, compare=False)

    def __post_init__(self):
        mat = _as_square_complex(self.entries)
        if np.abs(mat - mat.conj().T).max() > self.tol.hermiticity:
            raise InvalidStateError("matrix is not Hermitian within tolerance")
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """A Hermitian, PSD, unit-trace matrix describing a quantum state."""

    entries: np.ndarray
    tol: Tolerances = field(default=DEFAULT, repr=False, compare=False)

    def __post_init__(self):
        mat = _as_square_complex(self.entries)
        if np.abs(mat - mat.conj().T).max() > self.tol.hermiticity:
            raise InvalidStateError("matrix is not Hermitian within tolerance")
        eigvals = np.linalg.eigvalsh(mat)
        if eigvals.min() < -self.tol.psd:
            raise InvalidStateError(
                f"matrix is not PSD (min eigenvalue {eigvals.min():.3e})"
            )
        tr = mat.trace().real
        if abs(tr - 1.0) > self.tol.trace:
            raise InvalidStateError(f"trace {tr} deviates from 1 beyond tolerance")
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self):
        return self.entries.shape[0]

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_dict(), **kwargs)

    @classmethod
    def from_json_dict(cls, payload):
        dim = int(payload["dim"])
        mat = np.array(payload["re"], dtype=float) + 1j * np.array(payload["im"], dtype=float)
        if mat.shape != (dim, dim):
            raise InvalidArgumentError("serialized matrix shape disagrees with dim")
        return cls(mat)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))


def ghz_state(n):
    """Rank-1 projector onto (|0...0> + |1...1>)/sqrt(2) for n qubits."""
    if n < 1:
        raise InvalidArgumentError("qubit count must be >= 1")
    d = 2 ** n
    mat = np.zeros((d, d), dtype=complex)
    for i in (0, d - 1):
        for j in (0, d - 1):
            mat[i, j] = 0.5
    return DensityMatrix(mat)


def dephased_ghz(n, lam):
    """GHZ state with its coherence (corner) entries damped by (1 - lam)."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidArgumentError("dephasing strength must lie in [0, 1]")
    mat = np.array(ghz_state(n).entries)
    d = mat.shape[0]
    mat[0, d - 1] *= 1.0 - lam
    mat[d - 1, 0] *= 1.0 - lam
    return DensityMatrix(mat)


def maximally_mixed(n):
    """The state I/d on n qubits."""
    if n < 1:
        raise InvalidArgumentError("qubit count must be >= 1")
    d = 2 ** n
    return DensityMatrix(np.eye(d) / d)


def _psd_sqrt(mat, tol):
    vals, vecs = np.linalg.eigh(mat)
    if vals.min() < -tol.psd:
        raise InvalidStateError("matrix is not PSD; cannot take square root")
    vals = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * vals) @ vecs.conj().T


def fidelity(a, b, tol=DEFAULT):
    """Quantum fidelity tr sqrt(sqrt(a) b sqrt(a)), clipped into [0, 1]."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    sqrt_a = _psd_sqrt(a.entries, tol)
    inner = sqrt_a @ b.entries @ sqrt_a
    inner = (inner + inner.conj().T) / 2.0
    try:
        vals = np.linalg.eigvalsh(inner)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigendecomposition failed in fidelity") from exc
    value = np.sqrt(np.clip(vals, 0.0, None)).sum()
    if value > 1.0 + tol.fidelity_clip:
        raise NumericalError(f"fidelity {value} exceeds 1 beyond tolerance")
    return float(np.clip(value, 0.0, 1.0))


def purity(rho):
    """tr(rho^2); 1 for pure states, 1/d for the maximally mixed state."""
    return float(np.vdot(rho.entries, rho.entries).real)


def project_psd(h):
    """Nearest PSD matrix in Frobenius norm: clip negative eigenvalues."""
    try:
        vals, vecs = np.linalg.eigh(h.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigendecomposition failed in PSD projection") from exc
    vals = np.clip(vals, 0.0, None)
    return HermitianMatrix((vecs * vals) @ vecs.conj().T, tol=h.tol)
