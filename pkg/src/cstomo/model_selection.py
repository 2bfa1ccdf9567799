"""Choosing the data-fit parameter epsilon.

Two complementary routes: a plug-in estimate from the multinomial noise
variance of the counts, and fivefold cross-validation over a grid of
epsilon values expressed as multipliers of that estimate.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset, draw_settings, restrict_dataset, split_folds
from .exceptions import InvalidArgumentError
from .pauli import apply_sensing, SettingsPlan, born_probabilities
from .solver import DEFAULT_CONFIG, reconstruct

__all__ = [
    "epsilon_hat",
    "expected_noise",
    "prediction_error",
    "cross_validate",
    "CrossValCell",
    "CrossValReport",
]


def epsilon_hat(data):
    """Plug-in noise-power estimate: sum_jk y_jk (1 - y_jk / N_j).

    Additive over records, hence it scales linearly with the number of
    measurement settings for homogeneous data.
    """
    total = 0.0
    for _, counts in data.records:
        n_j = counts.sum()
        total += float(np.sum(counts * (1.0 - counts / n_j)))
    return total


def expected_noise(rho, plan):
    """Exact expected noise power sum_jk N_j p_jk (1 - p_jk)."""
    total = 0.0
    for word, shots in zip(plan.words, plan.shots):
        p = born_probabilities(rho, word)
        total += float(shots * np.sum(p * (1.0 - p)))
    return total


def _concat(datasets):
    records = []
    for ds in datasets:
        records.extend(ds.records)
    return Dataset(datasets[0].n_qubits, records)


def _test_norm(test):
    return float(np.linalg.norm(test.counts_matrix().ravel()))


def _fold_error(train, test, epsilon_train, config):
    """Prediction error plus whether the training problem was infeasible."""
    result = reconstruct(train, epsilon_train, config)
    if result.status == "infeasible":
        return _test_norm(test), True
    predicted = apply_sensing(result.estimate, SettingsPlan(test.words, test.shots))
    err = float(np.linalg.norm(predicted - test.counts_matrix()))
    return err, False


def prediction_error(train, test, epsilon_train, config=None):
    """||A_test(rho_hat) - Y_test||_2 for the train-fold reconstruction.

    Falls back to ||Y_test||_2 when the training problem is infeasible.
    """
    if train.n_qubits != test.n_qubits:
        raise InvalidArgumentError("train and test datasets differ in qubit count")
    if set(train.words) & set(test.words):
        raise InvalidArgumentError("train and test datasets share words")
    err, _ = _fold_error(train, test, epsilon_train, config or DEFAULT_CONFIG)
    return err


@dataclass(frozen=True)
class CrossValCell:
    m: int
    epsilon_multiplier: float
    mean_error: float
    std_error: float
    infeasible_fraction: float
    error: str = None  # set when the cell failed outright


@dataclass(frozen=True)
class CrossValReport:
    grid: tuple
    folds: int
    repetitions: int

    def cell(self, m, multiplier):
        for c in self.grid:
            if c.m == m and c.epsilon_multiplier == multiplier:
                return c
        raise KeyError((m, multiplier))

    def to_json_dict(self):
        return {
            "folds": self.folds,
            "repetitions": self.repetitions,
            "grid": [
                {
                    "m": c.m,
                    "epsilon_multiplier": c.epsilon_multiplier,
                    "mean_error": c.mean_error,
                    "std_error": c.std_error,
                    "infeasible_fraction": c.infeasible_fraction,
                    **({"error": c.error} if c.error else {}),
                }
                for c in self.grid
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_dict(), **kwargs)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            ["m", "epsilon_multiplier", "mean_error", "std_error", "infeasible_fraction"]
        )
        for c in self.grid:
            writer.writerow(
                [c.m, c.epsilon_multiplier, c.mean_error, c.std_error, c.infeasible_fraction]
            )
        return buf.getvalue()


def cross_validate(
    data,
    m_values=(10, 15, 20, 40, 60, 80),
    epsilon_multipliers=(0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0),
    folds=5,
    repetitions=50,
    rng=None,
    config=None,
):
    """Fivefold cross-validated prediction error over an (m, epsilon) grid.

    For each repetition, m settings are drawn without replacement and split
    into folds; every multiplier is then scored on the same draw with
    epsilon = multiplier * epsilon_hat(training records).
    """
    if rng is None:
        raise InvalidArgumentError("an explicit RandomSource is required")
    if repetitions < 1:
        raise InvalidArgumentError("repetitions must be >= 1")
    config = config or DEFAULT_CONFIG

    cells = []
    for mi, m in enumerate(m_values):
        errors = {mult: [] for mult in epsilon_multipliers}
        infeasible = {mult: 0 for mult in epsilon_multipliers}
        trials = {mult: 0 for mult in epsilon_multipliers}
        failure = {mult: None for mult in epsilon_multipliers}
        for rep in range(repetitions):
            sub_rng = rng.substream(mi * repetitions + rep)
            words = draw_settings(data.words, m, sub_rng)
            subset = restrict_dataset(data, words)
            parts = split_folds(subset, folds, sub_rng.substream(0))
            for q in range(folds):
                train = _concat([parts[i] for i in range(folds) if i != q])
                test = parts[q]
                eps_train = epsilon_hat(train)
                for mult in epsilon_multipliers:
                    try:
                        err, infeas = _fold_error(train, test, mult * eps_train, config)
                    except Exception as exc:  # record and keep the grid complete
                        failure[mult] = failure[mult] or f"{type(exc).__name__}: {exc}"
                        continue
                    errors[mult].append(err)
                    trials[mult] += 1
                    if infeas:
                        infeasible[mult] += 1
        for mult in epsilon_multipliers:
            vals = np.array(errors[mult])
            if vals.size:
                cells.append(
                    CrossValCell(
                        m=m,
                        epsilon_multiplier=mult,
                        mean_error=float(vals.mean()),
                        std_error=float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
                        infeasible_fraction=infeasible[mult] / trials[mult],
                        error=failure[mult],
                    )
                )
            else:
                cells.append(
                    CrossValCell(
                        m=m,
                        epsilon_multiplier=mult,
                        mean_error=0.0,
                        std_error=0.0,
                        infeasible_fraction=0.0,
                        error=failure[mult] or "no successful evaluations",
                    )
                )
    return CrossValReport(grid=tuple(cells), folds=folds, repetitions=repetitions)
