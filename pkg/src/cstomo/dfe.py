"""Direct fidelity estimation from count data.

Estimates the overlap with a pure target state straight from Pauli-basis
counts: expansion coefficients xi_l = tr(rho O_l)/sqrt(d) are read off the
outcome frequencies of every setting that diagonalizes O_l, combined by
inverse-variance weighting, and the error bar follows from linear error
propagation through the multinomial covariance of the frequencies.
"""

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    InvalidArgumentError,
    MissingSettingError,
    UnsupportedError,
)
from .pauli import validate_word
from .states import ghz_state

__all__ = [
    "PauliCoefficients",
    "FidelityEstimate",
    "estimable_labels",
    "pauli_coefficients",
    "ghz_pauli_decomposition",
    "required_settings",
    "direct_fidelity",
]

_LABEL_LETTERS = "IXYZ"

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# floor for inverse-variance weights; exactly-known coefficients (variance 0,
# e.g. the identity label) otherwise divide by zero
_VAR_FLOOR = 1e-30


def _validate_label(label):
    if not isinstance(label, str) or len(label) < 1:
        raise InvalidArgumentError(f"Pauli label must be a nonempty string: {label!r}")
    bad = set(label) - set(_LABEL_LETTERS)
    if bad:
        raise InvalidArgumentError(f"label {label!r} contains invalid letters {bad}")
    return label


@dataclass(frozen=True)
class PauliCoefficients:
    """Map from full Pauli labels (over {I,X,Y,Z}) to real coefficients."""

    terms: dict

    def __post_init__(self):
        if not self.terms:
            raise InvalidArgumentError("coefficient map is empty")
        lengths = {len(_validate_label(l)) for l in self.terms}
        if len(lengths) != 1:
            raise InvalidArgumentError("labels have inconsistent lengths")
        n = lengths.pop()
        bound = 1.0 / np.sqrt(2.0 ** n) + 1e-9
        for label, xi in self.terms.items():
            if abs(xi) > bound:
                raise InvalidArgumentError(
                    f"coefficient {xi} for {label!r} exceeds the 1/sqrt(d) bound"
                )
        object.__setattr__(self, "terms", dict(self.terms))

    @property
    def n_qubits(self):
        return len(next(iter(self.terms)))


@dataclass(frozen=True)
class FidelityEstimate:
    f_squared: float
    f: float
    std_f_squared: float
    settings_used: tuple

    def to_json_dict(self):
        return {
            "f2": self.f_squared,
            "f": self.f,
            "std_f2": self.std_f_squared,
            "settings": list(self.settings_used),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_dict(), **kwargs)


def estimable_labels(word):
    """Labels diagonal in the eigenbasis of `word`: replace any subset by I."""
    validate_word(word)
    out = []
    for keep in itertools.product((False, True), repeat=len(word)):
        out.append("".join(c if k else "I" for c, k in zip(word, keep)))
    return out


def _covers(word, label):
    return all(l == "I" or l == w for w, l in zip(word, label))


def _label_signs(label, n):
    """Eigenvalue of O_label on each outcome index (bit pattern, MSB first)."""
    k = np.arange(2 ** n)
    signs = np.ones(2 ** n)
    for i, letter in enumerate(label):
        if letter != "I":
            bits = (k >> (n - 1 - i)) & 1
            signs *= 1.0 - 2.0 * bits
    return signs


def _record_estimate(counts, signs, sqrt_d):
    """Coefficient estimate and its plug-in variance from one record."""
    n_j = counts.sum()
    p_hat = counts / n_j
    mean = float(signs @ p_hat)
    var = max((1.0 - mean * mean) / n_j, 0.0)  # signs^2 == 1 entrywise
    return mean / sqrt_d, var / sqrt_d ** 2


def pauli_coefficients(data):
    """Inverse-variance-weighted coefficient estimates from all settings."""
    n = data.n_qubits
    sqrt_d = np.sqrt(2.0 ** n)
    sums = {}
    weight_totals = {}
    for word, counts in data.records:
        for label in estimable_labels(word):
            signs = _label_signs(label, n)
            est, var = _record_estimate(counts, signs, sqrt_d)
            w = 1.0 / max(var, _VAR_FLOOR)
            sums[label] = sums.get(label, 0.0) + w * est
            weight_totals[label] = weight_totals.get(label, 0.0) + w
    terms = {label: sums[label] / weight_totals[label] for label in sums}
    return PauliCoefficients(terms)


def ghz_pauli_decomposition(n=4):
    """Exact Pauli expansion coefficients of the four-qubit GHZ state.

    Computed by brute-force traces over all 256 labels rather than from a
    printed formula; note the six XXYY-permutation terms come out negative
    under the phase conventions used here.
    """
    if n != 4:
        raise UnsupportedError("the GHZ decomposition is implemented for n = 4 only")
    rho = ghz_state(n).entries
    sqrt_d = np.sqrt(2.0 ** n)
    terms = {}
    for letters in itertools.product(_LABEL_LETTERS, repeat=n):
        op = np.array([1.0], dtype=complex)
        for c in letters:
            op = np.kron(op, _PAULI_1Q[c])
        xi = float(np.trace(rho @ op).real) / sqrt_d
        if abs(xi) > 1e-12:
            terms["".join(letters)] = xi
    return PauliCoefficients(terms)


def required_settings(target_coeffs):
    """Minimal settings covering every nonzero non-identity target label.

    Greedy set cover over all 3^n Pauli words with lexicographic
    tie-breaking; exact for the GHZ target (verified by enumeration).
    """
    n = target_coeffs.n_qubits
    uncovered = {
        label
        for label, xi in target_coeffs.terms.items()
        if abs(xi) > 1e-12 and set(label) != {"I"}
    }
    chosen = []
    candidates = ["".join(p) for p in itertools.product("XYZ", repeat=n)]
    while uncovered:
        best_word, best_cover = None, set()
        for word in candidates:
            cover = {l for l in uncovered if _covers(word, l)}
            if len(cover) > len(best_cover):
                best_word, best_cover = word, cover
        if best_word is None:
            raise MissingSettingError(f"labels {sorted(uncovered)} cannot be covered")
        chosen.append(best_word)
        uncovered -= best_cover
    return chosen


def direct_fidelity(data, target_coeffs):
    """F^2 = sum_l xi_T^l xi_hat^l with multinomial error propagation."""
    n = data.n_qubits
    if target_coeffs.n_qubits != n:
        raise InvalidArgumentError("target and dataset qubit counts differ")
    sqrt_d = np.sqrt(2.0 ** n)
    d = 2 ** n

    target = {l: xi for l, xi in target_coeffs.terms.items() if abs(xi) > 1e-12}
    # per label: list of (record index, signs, estimate, weight)
    per_label = {}
    for label in target:
        entries = []
        for j, (word, counts) in enumerate(data.records):
            if not _covers(word, label):
                continue
            signs = _label_signs(label, n)
            est, var = _record_estimate(counts, signs, sqrt_d)
            entries.append((j, signs, est, 1.0 / max(var, _VAR_FLOOR)))
        if not entries:
            raise MissingSettingError(
                f"no measurement setting in the dataset estimates label {label!r}"
            )
        per_label[label] = entries

    f_squared = 0.0
    # coefficient vector of F^2 in the frequencies of each record
    coeff_vecs = {}
    used = set()
    for label, entries in per_label.items():
        total_w = sum(w for _, _, _, w in entries)
        xi_hat = sum(w * est for _, _, est, w in entries) / total_w
        f_squared += target[label] * xi_hat
        for j, signs, _, w in entries:
            frac = w / total_w
            vec = coeff_vecs.setdefault(j, np.zeros(d))
            vec += target[label] * frac * signs / sqrt_d
            used.add(j)

    variance = 0.0
    for j, vec in coeff_vecs.items():
        counts = data.records[j][1]
        n_j = counts.sum()
        p_hat = counts / n_j
        quad = float(p_hat @ vec ** 2 - (p_hat @ vec) ** 2)
        variance += max(quad, 0.0) / n_j

    settings = tuple(data.records[j][0] for j in sorted(used))
    return FidelityEstimate(
        f_squared=float(f_squared),
        f=float(np.sqrt(max(f_squared, 0.0))),
        std_f_squared=float(np.sqrt(variance)),
        settings_used=settings,
    )
