"""Certified Ramsey number upper bounds via the plain flag algebra method."""

from .model import (
    ColoredGraph,
    PlainGraph,
    RamseyProblem,
    contains_mono_copy,
    is_admissible,
    is_blowup_consistent,
    parse_problem,
    quotient_density_bound,
)

__all__ = [
    "ColoredGraph",
    "PlainGraph",
    "RamseyProblem",
    "contains_mono_copy",
    "is_admissible",
    "is_blowup_consistent",
    "parse_problem",
    "quotient_density_bound",
]

__version__ = "0.1.0"
