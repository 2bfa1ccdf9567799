"""Count-data simulation and dataset handling.

Datasets hold one count vector per measurement setting.  Sampled data are
integer multinomial draws; datasets may also carry exact expected counts
(real-valued) for noiseless oracle studies, in which case each row still
sums to the shot count of its setting.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, InvalidArgumentError, NotFoundError
from .pauli import SettingsPlan, born_probabilities, validate_word

__all__ = [
    "RandomSource",
    "Dataset",
    "sample_counts",
    "expected_counts",
    "draw_settings",
    "restrict_dataset",
    "split_folds",
]


@dataclass(frozen=True)
class RandomSource:
    """Reproducible RNG handle: (root_seed, stream_id) fixes every draw."""

    root_seed: int
    stream_id: int = 0

    def generator(self):
        return np.random.default_rng(
            np.random.SeedSequence(self.root_seed, spawn_key=(self.stream_id,))
        )

    def substream(self, index):
        """Derive an independent child stream; deterministic in `index`."""
        return RandomSource(self.root_seed, self.stream_id * 1_000_003 + index + 1)


@dataclass(frozen=True)
class Dataset:
    """Measured (or simulated) counts: one record per Pauli word."""

    n_qubits: int
    records: tuple  # of (word, counts ndarray)

    def __init__(self, n_qubits, records):
        if n_qubits < 1:
            raise InvalidArgumentError("n_qubits must be >= 1")
        d = 2 ** n_qubits
        clean = []
        seen = set()
        for word, counts in records:
            validate_word(word)
            if len(word) != n_qubits:
                raise InvalidArgumentError(f"word {word!r} has wrong length")
            if word in seen:
                raise InvalidArgumentError(f"duplicate word {word!r} in dataset")
            seen.add(word)
            counts = np.asarray(counts, dtype=float)
            if counts.shape != (d,):
                raise DimensionMismatchError(
                    f"counts for {word!r} have shape {counts.shape}, expected ({d},)"
                )
            if counts.min() < 0:
                raise InvalidArgumentError(f"negative count for word {word!r}")
            if counts.sum() < 1:
                raise InvalidArgumentError(f"counts for {word!r} sum to less than 1")
            counts.setflags(write=False)
            clean.append((word, counts))
        if not clean:
            raise InvalidArgumentError("dataset has no records")
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "records", tuple(clean))

    @property
    def dim(self):
        return 2 ** self.n_qubits

    @property
    def words(self):
        return [word for word, _ in self.records]

    @property
    def shots(self):
        return [float(counts.sum()) for _, counts in self.records]

    def counts_matrix(self):
        return np.stack([counts for _, counts in self.records])

    def plan(self):
        """SettingsPlan implied by the records (shots = per-row sums)."""
        shots = [counts.sum() for _, counts in self.records]
        int_shots = [int(round(s)) for s in shots]
        if not all(abs(s - i) < 1e-9 for s, i in zip(shots, int_shots)):
            # exact-expectation datasets can carry non-integer totals
            int_shots = shots
        return SettingsPlan(self.words, int_shots)

    def to_json_dict(self):
        recs = []
        for word, counts in self.records:
            if np.allclose(counts, np.round(counts)):
                values = [int(c) for c in np.round(counts)]
            else:
                values = counts.tolist()
            recs.append({"word": word, "counts": values})
        return {"n_qubits": self.n_qubits, "records": recs}

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_dict(), **kwargs)

    @classmethod
    def from_json_dict(cls, payload):
        return cls(
            int(payload["n_qubits"]),
            [(rec["word"], rec["counts"]) for rec in payload["records"]],
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))

    def to_csv(self):
        """One row per (word, outcome_index, count)."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["word", "outcome_index", "count"])
        for word, counts in self.records:
            for k, c in enumerate(counts):
                writer.writerow([word, k, int(c) if float(c).is_integer() else c])
        return buf.getvalue()


def expected_counts(rho, plan):
    """Noiseless dataset: exact expected counts N_j p_{j,k} per setting."""
    records = []
    for word, shots in zip(plan.words, plan.shots):
        records.append((word, shots * born_probabilities(rho, word)))
    return Dataset(plan.n_qubits, records)


def sample_counts(rho, plan, rng):
    """Draw one dataset: counts ~ Multinomial(N_j, p_j) per setting."""
    if 2 ** plan.n_qubits != rho.dim:
        raise DimensionMismatchError(
            f"plan is for {plan.n_qubits} qubits, state has dim {rho.dim}"
        )
    gen = rng.generator()
    records = []
    for word, shots in zip(plan.words, plan.shots):
        p = born_probabilities(rho, word)
        records.append((word, gen.multinomial(int(shots), p)))
    return Dataset(plan.n_qubits, records)


def draw_settings(all_words, m, rng):
    """Uniform m-subset of the words, without replacement, order randomized."""
    if not 1 <= m <= len(all_words):
        raise InvalidArgumentError(
            f"m = {m} is out of range for {len(all_words)} available words"
        )
    gen = rng.generator()
    idx = gen.permutation(len(all_words))[:m]
    return [all_words[i] for i in idx]


def restrict_dataset(data, words):
    """Filter and reorder the records to the requested words."""
    by_word = dict(data.records)
    missing = [w for w in words if w not in by_word]
    if missing:
        raise NotFoundError(f"words not present in dataset: {missing}")
    return Dataset(data.n_qubits, [(w, by_word[w]) for w in words])


def split_folds(data, folds, rng):
    """Random partition of the records into `folds` near-equal datasets."""
    m = len(data.records)
    if folds < 2:
        raise InvalidArgumentError("fold count must be >= 2")
    if folds > m:
        raise InvalidArgumentError(f"cannot split {m} records into {folds} folds")
    gen = rng.generator()
    order = gen.permutation(m)
    # balanced sizes: the first (m % folds) folds get one extra record
    base, extra = divmod(m, folds)
    out = []
    start = 0
    for q in range(folds):
        size = base + (1 if q < extra else 0)
        idx = sorted(order[start : start + size])
        out.append(Dataset(data.n_qubits, [data.records[i] for i in idx]))
        start += size
    return out
