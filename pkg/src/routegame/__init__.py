"""Solvers for a two-route congestion game with an uncertain incident state.

The library computes equilibrium route flows for any feasible signal
distribution sent to a fraction of travelers, solves the planner's
spillover-minimizing signal design in closed form, and ships independent
brute-force engines that verify both against nothing but the equilibrium
conditions.
"""

from .design import (
    DesignSolution,
    Regime,
    RegimeError,
    Thresholds,
    lambda_thresholds,
    loss_curve,
    optimal_design,
    p_bar,
)
from .equilibrium import (
    BeliefSystem,
    Branch,
    EquilibriumOutcome,
    InfeasibleStrategyError,
    StrategyProfile,
    VerificationReport,
    average_spillover,
    mean_slope,
    partition_value,
    population_costs,
    posterior_beliefs,
    recover_strategies,
    solve_equilibrium,
    verify_wardrop,
)
from .model import (
    EPS,
    CostFunction,
    DomainError,
    InformationStructure,
    InvalidScenarioError,
    NetworkScenario,
    ScenarioParseError,
    ValidationReport,
    format_scenario,
    load_scenario,
    parse_scenario,
    route_cost,
    spillover_loss,
    tau_bounds,
    validate_scenario,
)
from .oracle import (
    ConvergenceError,
    GridSpec,
    best_response_equilibrium,
    grid_search_design,
)

__version__ = "0.1.0"

__all__ = [
    "EPS",
    "BeliefSystem",
    "Branch",
    "ConvergenceError",
    "CostFunction",
    "DesignSolution",
    "DomainError",
    "EquilibriumOutcome",
    "GridSpec",
    "InfeasibleStrategyError",
    "InformationStructure",
    "InvalidScenarioError",
    "NetworkScenario",
    "Regime",
    "RegimeError",
    "ScenarioParseError",
    "StrategyProfile",
    "Thresholds",
    "ValidationReport",
    "VerificationReport",
    "average_spillover",
    "best_response_equilibrium",
    "format_scenario",
    "grid_search_design",
    "lambda_thresholds",
    "load_scenario",
    "loss_curve",
    "mean_slope",
    "optimal_design",
    "p_bar",
    "parse_scenario",
    "partition_value",
    "population_costs",
    "posterior_beliefs",
    "recover_strategies",
    "route_cost",
    "solve_equilibrium",
    "spillover_loss",
    "tau_bounds",
    "validate_scenario",
    "verify_wardrop",
]
