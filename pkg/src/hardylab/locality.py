"""Brute-force locality checks for 2-setting, 2-outcome joint behaviors.

A behavior is Bell-local when it is a convex mixture of the 16 deterministic
per-side strategies. Membership is decided by linear programming; a negative
verdict always comes with a separating witness certificate whose value on
the input exceeds its maximum over all deterministic strategies.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import linprog

from .qstate import (
    JOINT_OUTCOMES,
    OUTCOMES,
    Behavior,
    JointOutcome,
    Outcome,
    SettingPair,
)
from .realist import ContextAssignment, is_noncontextual

FEAS_TOL = 1e-9     # max reconstruction mismatch still counted as membership
WITNESS_TOL = 1e-9  # minimum violation margin for an infeasibility certificate

HARDY_SETTINGS = (
    SettingPair("1", "1"),
    SettingPair("1", "2"),
    SettingPair("2", "1"),
    SettingPair("2", "2"),
)


# ===========================================================================
# deterministic strategies
# ===========================================================================

@dataclass(frozen=True)
class DeterministicStrategy:
    """Fixed per-side responses: one outcome per local setting choice."""

    left: tuple[Outcome, Outcome]
    right: tuple[Outcome, Outcome]

    @property
    def index(self) -> int:
        """Canonical position: left bits major, R before G."""
        l1, l2 = self.left
        r1, r2 = self.right
        return 8 * l1.index + 4 * l2.index + 2 * r1.index + r2.index

    def joint(self, left_choice: int, right_choice: int) -> JointOutcome:
        """Joint outcome when each side picks its first (0) or second (1) label."""
        return JointOutcome.from_outcomes(self.left[left_choice], self.right[right_choice])


def deterministic_strategies() -> tuple[DeterministicStrategy, ...]:
    """All 16 strategies in canonical order."""
    return tuple(
        DeterministicStrategy((l1, l2), (r1, r2))
        for l1, l2, r1, r2 in product(OUTCOMES, repeat=4)
    )


def strategy_behavior(strategy: DeterministicStrategy,
                      left_labels: tuple[str, str] = ("1", "2"),
                      right_labels: tuple[str, str] = ("1", "2")) -> Behavior:
    """The 0/1 behavior a strategy produces over a 2x2 setting grid."""
    table = {}
    for i, lab_l in enumerate(left_labels):
        for j, lab_r in enumerate(right_labels):
            hit = strategy.joint(i, j)
            table[SettingPair(lab_l, lab_r)] = {
                c: (1.0 if c is hit else 0.0) for c in JOINT_OUTCOMES}
    return Behavior(table)


# ===========================================================================
# witness functional
# ===========================================================================

def hardy_witness(behavior: Behavior) -> float:
    """P(GG|2,2) - P(GG|1,2) - P(GG|2,1) - P(RR|1,1).

    At most 0 on every Bell-local behavior; positive values certify
    nonlocality. Requires the four detector settings to be present.
    """
    s11, s12, s21, s22 = HARDY_SETTINGS
    return (behavior.prob(s22, JointOutcome.GG)
            - behavior.prob(s12, JointOutcome.GG)
            - behavior.prob(s21, JointOutcome.GG)
            - behavior.prob(s11, JointOutcome.RR))


# ===========================================================================
# polytope membership
# ===========================================================================

@dataclass(frozen=True, eq=False)
class WitnessCertificate:
    """Linear functional separating a behavior from the local polytope."""

    coefficients: dict[tuple[SettingPair, JointOutcome], float]
    value: float
    deterministic_max: float

    @property
    def margin(self) -> float:
        return self.value - self.deterministic_max

    def to_jsonable(self) -> dict:
        return {
            "coefficients": {f"{s.key}:{c.value}": v
                             for (s, c), v in self.coefficients.items()},
            "value": self.value,
            "deterministic_max": self.deterministic_max,
            "margin": self.margin,
        }


@dataclass(frozen=True, eq=False)
class MembershipResult:
    """LP verdict: either mixing weights or a separating witness."""

    verdict: str  # "feasible" | "infeasible"
    residual: float
    weights: tuple[float, ...] | None = None
    witness: WitnessCertificate | None = None

    def to_jsonable(self) -> dict:
        return {
            "verdict": self.verdict,
            "residual": self.residual,
            "weights": list(self.weights) if self.weights is not None else None,
            "witness": self.witness.to_jsonable() if self.witness is not None else None,
        }


def _grid_cells(behavior: Behavior) -> list[tuple[SettingPair, JointOutcome]]:
    if len(behavior.left_labels) != 2 or len(behavior.right_labels) != 2 \
            or not behavior.is_full_grid():
        raise ValueError("locality checks need a behavior over a full 2x2 setting grid")
    return [(s, c) for s in behavior.settings for c in JOINT_OUTCOMES]


def _vertex_matrix(behavior: Behavior) -> np.ndarray:
    """Column s holds strategy s's behavior, flattened in canonical cell order."""
    left_labels = behavior.left_labels
    right_labels = behavior.right_labels
    v = np.zeros((16, 16))
    for s, strat in enumerate(deterministic_strategies()):
        for i in range(2):
            for j in range(2):
                hit = strat.joint(i, j)
                v[4 * (2 * i + j) + hit.index, s] = 1.0
    # canonical setting order is sorted labels, matching (i, j) enumeration
    assert tuple(SettingPair(l, r) for l in left_labels for r in right_labels) \
        == behavior.settings
    return v


def _behavior_vector(behavior: Behavior) -> np.ndarray:
    return np.array([behavior.table[s][c]
                     for s in behavior.settings for c in JOINT_OUTCOMES])


def _hardy_fallback(behavior: Behavior, b: np.ndarray,
                    vertices: np.ndarray,
                    cells: list[tuple[SettingPair, JointOutcome]],
                    ) -> WitnessCertificate | None:
    if set(behavior.settings) != set(HARDY_SETTINGS):
        return None
    coeff = {
        (SettingPair("2", "2"), JointOutcome.GG): 1.0,
        (SettingPair("1", "2"), JointOutcome.GG): -1.0,
        (SettingPair("2", "1"), JointOutcome.GG): -1.0,
        (SettingPair("1", "1"), JointOutcome.RR): -1.0,
    }
    f = np.array([coeff.get(cell, 0.0) for cell in cells])
    value = float(f @ b)
    det_max = float(np.max(vertices.T @ f))
    if value - det_max < WITNESS_TOL:
        return None
    return WitnessCertificate({k: v for k, v in coeff.items()}, value, det_max)


def local_membership(behavior: Behavior) -> MembershipResult:
    """Decide whether a behavior mixes from deterministic strategies.

    First LP: minimize the largest cell mismatch over weight vectors on the
    16 strategies. A residual within FEAS_TOL means membership, and the
    weights are returned. Otherwise a second LP finds the maximum-margin
    separating functional with coefficients in [-1, 1]; the fixed detector
    witness is kept as a fallback certificate should the solver fail.
    """
    cells = _grid_cells(behavior)
    b = _behavior_vector(behavior)
    vertices = _vertex_matrix(behavior)

    # min eps  s.t.  |V w - b| <= eps per cell,  w >= 0,  sum w = 1
    c = np.zeros(17)
    c[16] = 1.0
    neg = -np.ones((16, 1))
    a_ub = np.block([[vertices, neg], [-vertices, neg]])
    b_ub = np.concatenate([b, -b])
    a_eq = np.concatenate([np.ones(16), [0.0]]).reshape(1, -1)
    fit = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * 17, method="highs")
    if not fit.success:
        raise RuntimeError(f"membership LP did not solve: {fit.message}")
    weights = np.clip(fit.x[:16], 0.0, None)
    weights /= weights.sum()
    residual = float(np.max(np.abs(vertices @ weights - b)))

    if residual <= FEAS_TOL:
        return MembershipResult("feasible", residual, weights=tuple(weights))

    # max  f.b - t  s.t.  f.V_s <= t per strategy,  -1 <= f <= 1
    c2 = np.concatenate([-b, [1.0]])
    a_ub2 = np.hstack([vertices.T, -np.ones((16, 1))])
    sep = linprog(c2, A_ub=a_ub2, b_ub=np.zeros(16),
                  bounds=[(-1, 1)] * 16 + [(None, None)], method="highs")
    witness = None
    if sep.success:
        f = sep.x[:16]
        value = float(f @ b)
        det_max = float(np.max(vertices.T @ f))
        if value - det_max >= WITNESS_TOL:
            witness = WitnessCertificate(
                {cell: float(coef) for cell, coef in zip(cells, f)
                 if abs(coef) > 1e-12},
                value, det_max)
    if witness is None:
        witness = _hardy_fallback(behavior, b, vertices, cells)
    if witness is None:
        raise RuntimeError(
            f"behavior sits {residual:.3e} outside the local polytope but no "
            f"certificate reached the {WITNESS_TOL} margin")
    return MembershipResult("infeasible", residual, witness=witness)


# ===========================================================================
# noncontextual mass
# ===========================================================================

def noncontextual_fraction(behavior: Behavior) -> float:
    """Probability that independent per-setting sampling lands factorizable.

    Sums the product probabilities of all 256 complete assignments for which
    is_noncontextual holds; equals the chance that one run of the
    measurement-as-reveal model admits per-side response functions.
    """
    cells = _grid_cells(behavior)  # validates the grid
    del cells
    settings = behavior.settings
    rows = [behavior.table[s] for s in settings]
    total = 0.0
    for combo in product(JOINT_OUTCOMES, repeat=4):
        assignment = ContextAssignment(dict(zip(settings, combo)))
        if is_noncontextual(assignment):
            p = 1.0
            for row, cell in zip(rows, combo):
                p *= row[cell]
            total += p
    return total
