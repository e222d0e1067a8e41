"""Bottleneck multiple knapsack: exact oracle, approximation pipelines and tools."""

from .arbitrary import run_arbitrary
from .exact_oracle import solve_exact
from .identical import run_identical
from .instance_io import gen_random, read_instance, write_instance
from .model import ARBITRARY, IDENTICAL, Assignment, Instance, Item, evaluate, validate

__version__ = "0.1.0"

__all__ = [
    "ARBITRARY", "IDENTICAL", "Assignment", "Instance", "Item", "evaluate", "gen_random",
    "read_instance", "run_arbitrary", "run_identical", "solve_exact", "validate", "write_instance",
]
