"""Monte Carlo measurement runs and frequency-vs-prediction comparison.

Trials are split into fixed-size shards; shard k draws from its own PCG64
generator spawned from the master seed, and shard results are concatenated
in shard order. Output therefore depends only on (config, behavior), never
on how many workers executed the shards.

Per-shard draw order is fixed: left settings, right settings, then outcome
uniforms (one per trial in quantum mode; one per trial and setting, in
canonical setting order, in realist mode).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .qstate import JOINT_OUTCOMES, Behavior, JointOutcome, SettingPair

MODELS = ("quantum", "realist")
Z_LIMIT = 5.0  # per-cell score bound used by the pass verdict

# 1 - 1e-6 quantiles of the chi-square distribution by degrees of freedom,
# frozen from scipy.stats.chi2.ppf(1 - 1e-6, df) and cross-checked in tests.
CHI2_LIMIT_1E6: dict[int, float] = {
    1: 23.92812697687947,
    2: 27.631021115871036,
    3: 30.66484970615427,
    4: 33.37684158165888,
    5: 35.88818687961042,
    6: 38.25833637714585,
    7: 40.52183123411472,
    8: 42.70091392647789,
    9: 44.81093787062026,
    10: 46.86304684671568,
    11: 48.86564276313385,
    12: 50.82525213880362,
    13: 52.74706811413117,
    14: 54.63530552996598,
    15: 56.49344249969959,
    16: 58.32439001431418,
}


# ===========================================================================
# configuration and results
# ===========================================================================

@dataclass(frozen=True)
class ExperimentConfig:
    """Run parameters; setting_law gives P(first label) per side."""

    trials: int
    seed: int
    model: str = "realist"
    setting_law: tuple[float, float] = (0.5, 0.5)
    shard_size: int = 1 << 16

    def __post_init__(self) -> None:
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        law = tuple(float(p) for p in self.setting_law)
        if len(law) != 2 or any(not 0.0 <= p <= 1.0 for p in law):
            raise ValueError(f"setting_law must be two probabilities, got {self.setting_law!r}")
        object.__setattr__(self, "setting_law", law)
        if not isinstance(self.shard_size, int) or self.shard_size < 1:
            raise ValueError(f"shard_size must be a positive integer, got {self.shard_size!r}")


class TrialRecord(NamedTuple):
    """One measurement: global trial index, chosen setting, revealed outcome."""

    index: int
    setting: SettingPair
    outcome: JointOutcome


@dataclass(frozen=True, eq=False)
class FrequencyTable:
    """Integer outcome counts per setting; missing cells count as zero."""

    counts: Mapping[SettingPair, Mapping[JointOutcome, int]]

    def __post_init__(self) -> None:
        clean: dict[SettingPair, dict[JointOutcome, int]] = {}
        for setting in sorted(self.counts, key=lambda s: (s.left, s.right)):
            row = self.counts[setting]
            out_row = {}
            for cell in JOINT_OUTCOMES:
                n = row.get(cell, 0)
                if not isinstance(n, (int, np.integer)) or n < 0:
                    raise ValueError(
                        f"count for {SettingPair(*setting).key}:{cell.value} must be a "
                        f"nonnegative integer, got {n!r}")
                out_row[cell] = int(n)
            clean[SettingPair(*setting)] = out_row
        object.__setattr__(self, "counts", clean)

    @property
    def settings(self) -> tuple[SettingPair, ...]:
        return tuple(self.counts)

    @property
    def trials(self) -> int:
        return sum(sum(row.values()) for row in self.counts.values())

    def setting_total(self, setting: SettingPair) -> int:
        setting = SettingPair(*setting)
        return sum(self.counts.get(setting, {}).values()) if setting in self.counts else 0

    def count(self, setting: SettingPair, cell: JointOutcome) -> int:
        return self.counts.get(SettingPair(*setting), {}).get(cell, 0)

    def frequency(self, setting: SettingPair, cell: JointOutcome) -> float:
        total = self.setting_total(setting)
        return self.count(setting, cell) / total if total else 0.0

    def merge(self, other: FrequencyTable) -> FrequencyTable:
        merged: dict[SettingPair, dict[JointOutcome, int]] = {}
        for table in (self.counts, other.counts):
            for setting, row in table.items():
                dst = merged.setdefault(setting, {c: 0 for c in JOINT_OUTCOMES})
                for cell, n in row.items():
                    dst[cell] += n
        return FrequencyTable(merged)


# ===========================================================================
# running trials
# ===========================================================================

def _row_boundaries(behavior: Behavior) -> np.ndarray:
    """Cumulative row boundaries, one row per canonical setting.

    Rows are renormalized so the last boundary is exactly 1.0; structural
    zeros keep zero width, so they can never be hit by a uniform draw.
    """
    rows = []
    for setting in behavior.settings:
        row = behavior.table[setting]
        cum = np.cumsum([row[c] for c in JOINT_OUTCOMES])
        cum = cum / cum[-1]
        cum[-1] = 1.0
        rows.append(cum)
    return np.asarray(rows)


def _run_shard(shard_index: int, start: int, size: int,
               seed_seq: np.random.SeedSequence, config: ExperimentConfig,
               settings: tuple[SettingPair, ...], boundaries: np.ndarray,
               collect: bool) -> tuple[np.ndarray, list[TrialRecord]]:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    left_idx = (rng.random(size) >= config.setting_law[0]).astype(np.int64)
    right_idx = (rng.random(size) >= config.setting_law[1]).astype(np.int64)
    setting_idx = 2 * left_idx + right_idx

    if config.model == "quantum":
        u = rng.random(size)
        outcome_idx = np.empty(size, dtype=np.int64)
        for k in range(4):
            mask = setting_idx == k
            outcome_idx[mask] = np.searchsorted(boundaries[k], u[mask], side="right")
    else:  # realist: a full assignment per trial, reveal the chosen setting
        u_all = rng.random((size, 4))
        per_setting = np.column_stack([
            np.searchsorted(boundaries[k], u_all[:, k], side="right")
            for k in range(4)
        ])
        outcome_idx = per_setting[np.arange(size), setting_idx]

    counts = np.bincount(setting_idx * 4 + outcome_idx, minlength=16)
    records: list[TrialRecord] = []
    if collect:
        for i in range(size):
            records.append(TrialRecord(
                start + i,
                settings[setting_idx[i]],
                JOINT_OUTCOMES[outcome_idx[i]],
            ))
    return counts, records


def run_experiment(config: ExperimentConfig, behavior: Behavior, *,
                   workers: int = 1, collect_trials: bool = False,
                   ) -> tuple[FrequencyTable, list[TrialRecord] | None]:
    """Run seeded trials against a behavior's rows.

    Each trial picks a setting per the setting law, then either draws the
    joint outcome from that setting's row (quantum) or draws a fresh full
    assignment and reveals the chosen setting (realist). Returns the counts
    and, when collect_trials is set, the per-trial log.
    """
    if len(behavior.left_labels) != 2 or len(behavior.right_labels) != 2 \
            or not behavior.is_full_grid():
        raise ValueError("experiment needs a behavior over a full 2x2 setting grid")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers!r}")

    settings = behavior.settings
    boundaries = _row_boundaries(behavior)
    n_shards = math.ceil(config.trials / config.shard_size)
    seeds = np.random.SeedSequence(config.seed).spawn(n_shards)
    jobs = []
    for k in range(n_shards):
        start = k * config.shard_size
        size = min(config.shard_size, config.trials - start)
        jobs.append((k, start, size, seeds[k], config, settings, boundaries,
                     collect_trials))

    if workers == 1:
        results = [_run_shard(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_shard(*job), jobs))

    total = np.zeros(16, dtype=np.int64)
    records: list[TrialRecord] = []
    for counts, recs in results:  # shard order, so worker count is invisible
        total += counts
        records.extend(recs)

    table = {settings[k]: {c: int(total[4 * k + c.index]) for c in JOINT_OUTCOMES}
             for k in range(4)}
    return FrequencyTable(table), (records if collect_trials else None)


# ===========================================================================
# frequency-vs-prediction comparison
# ===========================================================================

@dataclass(frozen=True)
class CellComparison:
    """One cell's expected probability against its observed frequency."""

    setting: SettingPair
    cell: JointOutcome
    expected: float
    count: int
    frequency: float
    z: float | None  # None for structural cells (p = 0 or p = 1)
    ok: bool


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    cells: tuple[CellComparison, ...]
    chi_square: float
    dof: int
    chi_square_limit: float
    max_abs_z: float
    empty_settings: tuple[SettingPair, ...]
    passed: bool

    def to_jsonable(self) -> dict:
        return {
            "passed": self.passed,
            "max_abs_z": self.max_abs_z,
            "z_limit": Z_LIMIT,
            "chi_square": self.chi_square,
            "dof": self.dof,
            "chi_square_limit": self.chi_square_limit,
            "empty_settings": [s.key for s in self.empty_settings],
            "cells": [
                {
                    "setting": c.setting.key,
                    "outcome": c.cell.value,
                    "expected": c.expected,
                    "count": c.count,
                    "frequency": c.frequency,
                    "z": c.z,
                    "ok": c.ok,
                }
                for c in self.cells
            ],
        }


def compare_tables(freq: FrequencyTable, behavior: Behavior) -> ComparisonReport:
    """Judge observed counts against a behavior's rows.

    Pass requires every regular cell's |z| at most Z_LIMIT, zero counts on
    every structural-zero cell (those can never occur, so one hit fails the
    run outright), and a total chi-square below the 1-1e-6 quantile for the
    summed degrees of freedom. Settings with no trials are excluded from all
    three checks and flagged.
    """
    extra = set(freq.settings) - set(behavior.settings)
    if extra:
        raise ValueError(
            f"counts mention settings absent from the behavior: "
            f"{sorted(s.key for s in extra)}")

    cells: list[CellComparison] = []
    empty: list[SettingPair] = []
    chi_square = 0.0
    dof = 0
    max_abs_z = 0.0
    all_ok = True

    for setting in behavior.settings:
        total = freq.setting_total(setting)
        if total == 0:
            empty.append(setting)
            continue
        row = behavior.table[setting]
        dof += sum(1 for c in JOINT_OUTCOMES if row[c] > 0.0) - 1
        for cell in JOINT_OUTCOMES:
            p = row[cell]
            n = freq.count(setting, cell)
            f = n / total
            if p <= 0.0:
                z = None
                ok = n == 0
            elif p >= 1.0:
                z = None
                ok = n == total
            else:
                z = (f - p) * math.sqrt(total) / math.sqrt(p * (1.0 - p))
                max_abs_z = max(max_abs_z, abs(z))
                ok = abs(z) <= Z_LIMIT
            if p > 0.0:
                chi_square += (n - total * p) ** 2 / (total * p)
            all_ok = all_ok and ok
            cells.append(CellComparison(setting, cell, p, n, f, z, ok))

    if dof > 0:
        try:
            limit = CHI2_LIMIT_1E6[dof]
        except KeyError:
            raise ValueError(f"no chi-square limit frozen for dof {dof}") from None
    else:
        limit = 0.0
    all_ok = all_ok and chi_square <= limit

    return ComparisonReport(
        cells=tuple(cells),
        chi_square=chi_square,
        dof=dof,
        chi_square_limit=limit,
        max_abs_z=max_abs_z,
        empty_settings=tuple(empty),
        passed=all_ok,
    )
