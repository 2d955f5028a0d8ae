"""Measurement-as-reveal reading of a two-qubit state.

Every setting pair carries a definite pre-existing joint outcome; measuring
a pair only uncovers the outcome already assigned to it. Assignments are
drawn independently per setting with Born weights, so single-run statistics
reproduce the quantum rows by construction. Whether one assignment can be
explained by per-side response functions is a separate, checkable question.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .qstate import (
    JOINT_OUTCOMES,
    Behavior,
    BasisChange,
    JointOutcome,
    Outcome,
    ProductState,
    SettingPair,
    TwoQubitState,
    born_table,
    rebase_state_to,
)

CANDIDATE_TOL = 1e-9  # probability match tolerance when comparing candidate sets


# ===========================================================================
# pre-existing outcome candidates
# ===========================================================================

@dataclass(frozen=True)
class PreexistingCandidate:
    """A joint outcome the state could be carrying, with its Born weight."""

    state: ProductState
    probability: float


def enumerate_preexisting(state: TwoQubitState) -> list[PreexistingCandidate]:
    """Candidate pre-existing outcomes in the state's own basis pair.

    Cells whose Born probability is a structural zero are excluded: those
    outcomes can never be revealed, so nothing pre-exists there.
    """
    table = born_table(state)
    out = []
    for cell in JOINT_OUTCOMES:
        p = table[cell]
        if p > 0.0:
            out.append(PreexistingCandidate(
                ProductState(state.left_basis, state.right_basis, cell.left, cell.right),
                p,
            ))
    return out


def distinguish_states(first: TwoQubitState, second: TwoQubitState,
                       settings: Sequence[SettingPair],
                       changes: Iterable[BasisChange]) -> dict[SettingPair, bool]:
    """Per setting pair: do the two states offer identical candidate sets?

    Candidate sets count as identical when the same cells appear with
    probabilities matching within CANDIDATE_TOL. The returned map holds True
    where the states are indistinguishable by revealed outcomes.
    """
    pool = list(changes)
    report: dict[SettingPair, bool] = {}
    for setting in settings:
        setting = SettingPair(*setting)
        tables = []
        for st in (first, second):
            rebased = rebase_state_to(st, setting, pool)
            tables.append({c.state.joint: c.probability
                           for c in enumerate_preexisting(rebased)})
        a, b = tables
        same = set(a) == set(b) and all(abs(a[k] - b[k]) <= CANDIDATE_TOL for k in a)
        report[setting] = same
    return report


# ===========================================================================
# context assignments
# ===========================================================================

@dataclass(frozen=True, eq=False)
class ContextAssignment:
    """One definite joint outcome per setting pair, fixed before measurement."""

    per_setting: Mapping[SettingPair, JointOutcome]

    def __post_init__(self) -> None:
        if not self.per_setting:
            raise ValueError("assignment needs at least one setting")
        clean = {}
        for setting in sorted(self.per_setting, key=lambda s: (s.left, s.right)):
            clean[SettingPair(*setting)] = self.per_setting[setting]
        object.__setattr__(self, "per_setting", clean)

    def __hash__(self) -> int:
        return hash(tuple(self.per_setting.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ContextAssignment):
            return NotImplemented
        return dict(self.per_setting) == dict(other.per_setting)

    def to_jsonable(self) -> dict[str, str]:
        """Setting keys to outcome names, e.g. {"11": "RG", ...}."""
        return {s.key: o.value for s, o in self.per_setting.items()}

    @classmethod
    def from_jsonable(cls, data: Mapping[str, str]) -> ContextAssignment:
        per_setting = {}
        for key, name in data.items():
            if not isinstance(key, str) or len(key) != 2:
                raise ValueError(f"bad setting key {key!r}, expected two basis labels")
            try:
                outcome = JointOutcome(name)
            except ValueError:
                raise ValueError(f"bad outcome {name!r} for setting {key!r}") from None
            per_setting[SettingPair(key[0], key[1])] = outcome
        return cls(per_setting)


def sample_context(behavior: Behavior, rng: np.random.Generator) -> ContextAssignment:
    """Draw one pre-existing outcome per setting, independently, Born-weighted.

    Settings are visited in canonical order with one uniform draw each, so a
    seeded generator yields a reproducible assignment stream.
    """
    per_setting: dict[SettingPair, JointOutcome] = {}
    for setting, row in behavior.table.items():
        u = rng.random()
        acc = 0.0
        chosen = None
        for cell in JOINT_OUTCOMES:
            p = row[cell]
            if p <= 0.0:
                continue  # structural zero: never assigned
            acc += p
            if u < acc:
                chosen = cell
                break
        if chosen is None:  # u fell into the row-sum float slack
            chosen = next(c for c in reversed(JOINT_OUTCOMES) if row[c] > 0.0)
        per_setting[setting] = chosen
    return ContextAssignment(per_setting)


def reveal(assignment: ContextAssignment, chosen: SettingPair) -> JointOutcome:
    """Uncover the outcome already assigned to the chosen setting."""
    chosen = SettingPair(*chosen)
    try:
        return assignment.per_setting[chosen]
    except KeyError:
        raise ValueError(f"assignment has no setting {chosen}") from None


def is_noncontextual(assignment: ContextAssignment) -> bool:
    """True when the assignment factors through per-side response functions.

    Equivalently: the left letter depends only on the left label and the
    right letter only on the right label, across the assignment's settings.
    """
    left_fn: dict[str, Outcome] = {}
    right_fn: dict[str, Outcome] = {}
    for setting, outcome in assignment.per_setting.items():
        if left_fn.setdefault(setting.left, outcome.left) != outcome.left:
            return False
        if right_fn.setdefault(setting.right, outcome.right) != outcome.right:
            return False
    return True
