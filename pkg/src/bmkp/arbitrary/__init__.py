"""Approximation for arbitrary capacities through a configuration LP."""

from .assignment import AlpSolution, check_alp, column_totals, config_to_assignment, fractional_knapsacks, transport
from .config_lp import (ConfigLpInfeasible, ConfigLpSolution, build_lp, check_config_lp, solve_config_lp,
                        witness_solution)
from .configs import ConfigLimitExceeded, Configuration, config_of, enumerate_configs, in_class
from .integral import check_expensive, round_cheap, round_expensive
from .pipeline import (ArbitraryReport, GuessTooHigh, PipelineInvariantError, bound_factor, pin_items,
                       pin_threshold, run_arbitrary, upper_bound)
from .rounding import (RoundedInstance, RoundedItem, RoundingPreconditionError, capacity_index,
                       max_weight_index, profit_index, round_instance, to_original, weight_index)
from .shifting import Constants, DonorShortage, ShiftPlan, constants, dichotomy, donor_set, shift_and_compensate

__all__ = [n for n in dir() if not n.startswith("_")]
