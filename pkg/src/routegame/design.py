"""The planner's problem: pick the signal distribution minimizing spillover.

For low incident priors (``p <= p_bar``) withholding information already
keeps route 2 below the threshold and the spillover is zero.  Above that
prior the optimum always reveals the nominal state truthfully and the
incident-signal probability depends on which of three informed-fraction
regimes applies: full disclosure below ``lambda_low``, partial disclosure
scaled to the informed fraction between the thresholds, and a saturated
structure independent of the fraction above ``lambda_high``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional

from .equilibrium import (
    EquilibriumOutcome,
    average_spillover,
    mean_slope,
    solve_equilibrium,
)
from .model import (
    EPS,
    DomainError,
    InformationStructure,
    NetworkScenario,
    require_valid,
)


class RegimeError(ValueError):
    """A threshold was requested outside the regime where it is defined."""


class Regime(Enum):
    NO_PERSUASION = "no_persuasion"
    FULL_DISCLOSURE = "full_disclosure"
    PARTIAL_DISCLOSURE = "partial_disclosure"
    SATURATED_DISCLOSURE = "saturated_disclosure"


@dataclass(frozen=True)
class Thresholds:
    """Regime boundaries; the lambda thresholds exist only above ``p_bar``."""

    p_bar: float
    lambda_low: Optional[float]
    lambda_high: Optional[float]


@dataclass(frozen=True)
class DesignSolution:
    regime: Regime
    pi_star: InformationStructure
    outcome: EquilibriumOutcome
    loss: float
    thresholds: Thresholds

    def to_record(self) -> dict[str, object]:
        """Flatten to the stable serialization record."""
        return {
            "regime": self.regime.value,
            "pi_a_a": self.pi_star.pi_a_given_a,
            "pi_n_n": self.pi_star.pi_n_given_n,
            "f2_n": self.outcome.f2_given_n,
            "f2_a": self.outcome.f2_given_a,
            "loss": self.loss,
            "p_bar": self.thresholds.p_bar,
            "lambda_low": self.thresholds.lambda_low,
            "lambda_high": self.thresholds.lambda_high,
            "pr_a": self.outcome.beliefs.pr_a,
            "cost_pop1": self.outcome.cost_pop1,
            "cost_pop2": self.outcome.cost_pop2,
            "cost_avg": self.outcome.cost_avg,
        }


def p_bar(s: NetworkScenario) -> float:
    """Incident-prior threshold below which no information is optimal.

    This is the prior at which the uninformed equilibrium flow on route 2
    equals the spillover threshold; the admissible tau range keeps it in
    [0, 1].
    """
    if s.tau >= s.demand:
        raise DomainError(f"tau={s.tau!r} must be below demand={s.demand!r}")
    inner = s.cost_spread / (s.demand - s.tau) - s.alpha2 - s.alpha1_n
    return inner / (s.alpha1_a - s.alpha1_n)


def _no_persuasion(s: NetworkScenario, pb: float) -> bool:
    # Ties classify as the no-persuasion regime.
    return s.p <= pb + EPS


def lambda_thresholds(s: NetworkScenario) -> tuple[float, float]:
    """Informed-fraction regime boundaries ``(lambda_low, lambda_high)``.

    Defined only when the prior exceeds ``p_bar``; within that regime the
    thresholds satisfy ``0 < lambda_low < lambda_high < 1``.
    """
    require_valid(s)
    pb = p_bar(s)
    if _no_persuasion(s, pb):
        raise RegimeError(
            f"lambda thresholds are undefined for p={s.p!r} <= p_bar={pb:.12g}"
        )
    lam_low = _lambda_low(s)
    lam_high = _lambda_high(s)
    if not (-EPS < lam_low < lam_high < 1.0 + EPS):
        raise ArithmeticError(
            f"threshold ordering violated: lambda_low={lam_low!r}, lambda_high={lam_high!r}"
        )
    return lam_low, lam_high


def _lambda_low(s: NetworkScenario) -> float:
    prior_d = mean_slope(s.p, s) + s.alpha2
    incident_d = s.alpha1_a + s.alpha2
    return ((s.demand - s.tau) * prior_d - s.cost_spread) / (s.demand * s.p * incident_d)


def _lambda_high(s: NetworkScenario) -> float:
    incident_d = s.alpha1_a + s.alpha2
    return 1.0 - s.cost_spread / (incident_d * s.demand) - s.tau / s.demand


# --- closed forms per regime -------------------------------------------------


def _full_disclosure_loss(s: NetworkScenario, lam: float) -> float:
    prior_d = mean_slope(s.p, s) + s.alpha2
    base = s.demand - s.tau - s.cost_spread / prior_d
    slope_gap = s.alpha1_a - s.alpha1_n
    return base - s.p * (1.0 - s.p) * slope_gap * lam * s.demand / prior_d


def _partial_pi_a_given_a(s: NetworkScenario, lam: float) -> float:
    prior_d = mean_slope(s.p, s) + s.alpha2
    incident_d = s.alpha1_a + s.alpha2
    return ((s.demand - s.tau) * prior_d - s.cost_spread) / (
        lam * s.demand * incident_d * s.p
    )


def _saturated_pi_a_given_a(s: NetworkScenario) -> float:
    prior_d = mean_slope(s.p, s) + s.alpha2
    incident_d = s.alpha1_a + s.alpha2
    return ((s.demand - s.tau) * prior_d - s.cost_spread) / (
        ((s.demand - s.tau) * incident_d - s.cost_spread) * s.p
    )


def _partial_loss(s: NetworkScenario) -> float:
    """Constant spillover attained in both partial-disclosure regimes."""
    prior_d = mean_slope(s.p, s) + s.alpha2
    incident_d = s.alpha1_a + s.alpha2
    return ((s.demand - s.tau) * prior_d - s.cost_spread) / incident_d


def _clip_probability(value: float) -> float:
    if not -EPS <= value <= 1.0 + EPS:
        raise ArithmeticError(f"derived signal probability outside [0, 1]: {value!r}")
    return min(max(value, 0.0), 1.0)


def optimal_design(s: NetworkScenario) -> DesignSolution:
    """Solve the planner's problem in closed form.

    The returned solution carries the equilibrium induced by the optimal
    structure at the scenario's informed fraction; the closed-form loss is
    cross-checked against the spillover recomputed from those flows.
    """
    require_valid(s)
    pb = p_bar(s)

    if _no_persuasion(s, pb):
        regime = Regime.NO_PERSUASION
        pi_star = InformationStructure.no_information()
        loss = 0.0
        thresholds = Thresholds(p_bar=pb, lambda_low=None, lambda_high=None)
    else:
        lam_low, lam_high = lambda_thresholds(s)
        thresholds = Thresholds(p_bar=pb, lambda_low=lam_low, lambda_high=lam_high)
        lam = s.lambda_
        if lam < lam_low:
            regime = Regime.FULL_DISCLOSURE
            pi_star = InformationStructure.full_revelation()
            loss = _full_disclosure_loss(s, lam)
        elif lam < lam_high:
            regime = Regime.PARTIAL_DISCLOSURE
            pi_star = InformationStructure(_clip_probability(_partial_pi_a_given_a(s, lam)), 1.0)
            loss = _partial_loss(s)
        else:
            regime = Regime.SATURATED_DISCLOSURE
            pi_star = InformationStructure(_clip_probability(_saturated_pi_a_given_a(s)), 1.0)
            loss = _partial_loss(s)

    outcome = solve_equilibrium(s, pi_star)
    realized = average_spillover(s, outcome)
    if abs(realized - loss) > 1e-9:
        raise ArithmeticError(
            f"closed-form loss {loss!r} disagrees with realized spillover {realized!r}"
        )
    return DesignSolution(
        regime=regime, pi_star=pi_star, outcome=outcome, loss=loss, thresholds=thresholds
    )


def loss_curve(
    s: NetworkScenario, lambdas: Iterable[float]
) -> list[tuple[float, float, Regime]]:
    """Optimal loss and regime for each informed fraction, in input order."""
    require_valid(s)
    out = []
    for lam in lambdas:
        sol = optimal_design(replace(s, lambda_=lam))
        out.append((lam, sol.loss, sol.regime))
    return out
