"""Batch experiment drivers: bootstrap, setting sweeps, and grid studies.

All drivers consume an explicit RandomSource and derive one substream per
(cell, repetition), so results are bit-reproducible and independent of
scheduling when a thread pool is used.
"""

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import draw_settings, restrict_dataset, sample_counts
from .exceptions import InvalidArgumentError, TomographyError
from .model_selection import epsilon_hat
from .pauli import SettingsPlan
from .solver import DEFAULT_CONFIG, reconstruct
from .states import fidelity

__all__ = [
    "BootstrapReport",
    "SweepCell",
    "SweepReport",
    "bootstrap_fidelity",
    "sweep_settings",
    "sweep_grid",
    "default_threads",
]


def default_threads():
    """Thread-pool size: CS_TOMO_THREADS if set, else 1."""
    value = os.environ.get("CS_TOMO_THREADS")
    return max(1, int(value)) if value else 1


def _map_tasks(fn, tasks, threads):
    if threads <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


@dataclass(frozen=True)
class BootstrapReport:
    repetitions: int
    fidelity_mean: float
    fidelity_std: float
    target_label: str

    def to_json_dict(self):
        return {
            "repetitions": self.repetitions,
            "fidelity_mean": self.fidelity_mean,
            "fidelity_std": self.fidelity_std,
            "target_label": self.target_label,
        }


@dataclass(frozen=True)
class SweepCell:
    m: int
    epsilon_multiplier: float
    fidelity_mean: float
    fidelity_std: float
    infeasible_fraction: float
    error: str = None


@dataclass(frozen=True)
class SweepReport:
    cells: tuple
    reference_fidelity: float

    def cell(self, m, multiplier=1.0):
        for c in self.cells:
            if c.m == m and c.epsilon_multiplier == multiplier:
                return c
        raise KeyError((m, multiplier))

    def to_json_dict(self):
        return {
            "reference_fidelity": self.reference_fidelity,
            "cells": [
                {
                    "m": c.m,
                    "epsilon_multiplier": c.epsilon_multiplier,
                    "fidelity_mean": c.fidelity_mean,
                    "fidelity_std": c.fidelity_std,
                    "infeasible_fraction": c.infeasible_fraction,
                    **({"error": c.error} if c.error else {}),
                }
                for c in self.cells
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_dict(), **kwargs)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            ["m", "epsilon_multiplier", "fidelity_mean", "fidelity_std", "infeasible_fraction"]
        )
        for c in self.cells:
            writer.writerow(
                [c.m, c.epsilon_multiplier, c.fidelity_mean, c.fidelity_std, c.infeasible_fraction]
            )
        return buf.getvalue()


def bootstrap_fidelity(
    estimate,
    plan,
    target,
    epsilon_rule=None,
    repetitions=100,
    rng=None,
    config=None,
    target_label="target",
    threads=1,
):
    """Parametric bootstrap: resimulate from `estimate`, re-reconstruct,
    and report mean and empirical std of the fidelity versus `target`.

    Infeasible reconstructions score fidelity 0 and stay in the average.
    """
    if repetitions < 2:
        raise InvalidArgumentError("bootstrap needs at least 2 repetitions")
    if rng is None:
        raise InvalidArgumentError("an explicit RandomSource is required")
    config = config or DEFAULT_CONFIG
    epsilon_rule = epsilon_rule or epsilon_hat

    def one(rep):
        sub = rng.substream(rep)
        try:
            ds = sample_counts(estimate, plan, sub)
            result = reconstruct(ds, epsilon_rule(ds), config)
            if result.status == "infeasible":
                return 0.0
            return fidelity(result.estimate, target)
        except TomographyError as exc:
            raise TomographyError(f"bootstrap repetition {rep} failed: {exc}") from exc

    values = np.array(_map_tasks(one, range(repetitions), threads))
    return BootstrapReport(
        repetitions=repetitions,
        fidelity_mean=float(values.mean()),
        fidelity_std=float(values.std(ddof=1)),
        target_label=target_label,
    )


def sweep_settings(
    data, m_values, draws_per_m, target, rng, config=None, threads=1
):
    """Fidelity versus number of measurement settings, on measured data.

    For each m, draws random m-subsets of the recorded settings,
    reconstructs at the subset's own epsilon_hat, and scores the fidelity
    against `target`.  Draws are sorted before solving, so the full-set
    sweep reproduces the reference reconstruction bit for bit.
    """
    if not all(1 <= m <= len(data.records) for m in m_values):
        raise InvalidArgumentError("every m must lie in [1, record count]")
    if draws_per_m < 1:
        raise InvalidArgumentError("draws_per_m must be >= 1")
    config = config or DEFAULT_CONFIG

    ref_result = reconstruct(data, epsilon_hat(data), config)
    if ref_result.status == "infeasible":
        raise InvalidArgumentError("reference reconstruction is infeasible")
    reference_fidelity = fidelity(ref_result.estimate, target)

    def one(task):
        mi, m, draw = task
        sub = rng.substream(mi * draws_per_m + draw)
        words = sorted(draw_settings(data.words, m, sub))
        subset = restrict_dataset(data, words)
        result = reconstruct(subset, epsilon_hat(subset), config)
        if result.status == "infeasible":
            return 0.0, True
        return fidelity(result.estimate, target), False

    cells = []
    for mi, m in enumerate(m_values):
        tasks = [(mi, m, draw) for draw in range(draws_per_m)]
        try:
            outcomes = _map_tasks(one, tasks, threads)
        except TomographyError as exc:
            cells.append(
                SweepCell(m, 1.0, 0.0, 0.0, 0.0, error=f"{type(exc).__name__}: {exc}")
            )
            continue
        fids = np.array([f for f, _ in outcomes])
        infeas = sum(1 for _, i in outcomes if i)
        cells.append(
            SweepCell(
                m=m,
                epsilon_multiplier=1.0,
                fidelity_mean=float(fids.mean()),
                fidelity_std=float(fids.std(ddof=1)) if fids.size > 1 else 0.0,
                infeasible_fraction=infeas / len(outcomes),
            )
        )
    return SweepReport(cells=tuple(cells), reference_fidelity=reference_fidelity)


def sweep_grid(
    generator,
    plan_full,
    m_values,
    epsilon_multipliers,
    repetitions=100,
    rng=None,
    config=None,
    threads=1,
):
    """Fidelity over an (m, epsilon-multiplier) grid with fresh data per cell.

    Every repetition simulates a dataset from `generator` on m randomly
    drawn settings and reconstructs at multiplier * epsilon_hat; infeasible
    problems score fidelity 0.
    """
    if repetitions < 1:
        raise InvalidArgumentError("repetitions must be >= 1")
    if rng is None:
        raise InvalidArgumentError("an explicit RandomSource is required")
    config = config or DEFAULT_CONFIG

    ref_ds = sample_counts(generator, plan_full, rng.substream(0))
    ref_result = reconstruct(ref_ds, epsilon_hat(ref_ds), config)
    reference_fidelity = (
        0.0
        if ref_result.status == "infeasible"
        else fidelity(ref_result.estimate, generator)
    )

    shots_by_word = dict(zip(plan_full.words, plan_full.shots))

    def one(task):
        index, m, mult = task
        sub = rng.substream(index + 1)
        words = sorted(draw_settings(list(plan_full.words), m, sub))
        plan = SettingsPlan(words, [shots_by_word[w] for w in words])
        ds = sample_counts(generator, plan, sub.substream(0))
        result = reconstruct(ds, mult * epsilon_hat(ds), config)
        if result.status == "infeasible":
            return 0.0, True
        return fidelity(result.estimate, generator), False

    cells = []
    cell_index = 0
    for m in m_values:
        for mult in epsilon_multipliers:
            tasks = [
                (cell_index * repetitions + rep, m, mult)
                for rep in range(repetitions)
            ]
            cell_index += 1
            try:
                outcomes = _map_tasks(one, tasks, threads)
            except TomographyError as exc:
                cells.append(
                    SweepCell(m, mult, 0.0, 0.0, 0.0, error=f"{type(exc).__name__}: {exc}")
                )
                continue
            fids = np.array([f for f, _ in outcomes])
            infeas = sum(1 for _, i in outcomes if i)
            cells.append(
                SweepCell(
                    m=m,
                    epsilon_multiplier=mult,
                    fidelity_mean=float(fids.mean()),
                    fidelity_std=float(fids.std(ddof=1)) if fids.size > 1 else 0.0,
                    infeasible_fraction=infeas / len(outcomes),
                )
            )
    return SweepReport(cells=tuple(cells), reference_fidelity=reference_fidelity)
