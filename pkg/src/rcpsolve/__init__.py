"""String constraint solving by regular constraint propagation."""

from .frontend import load, parse
from .ordering import order_report
from .search import Budgets, PriorityWeights, SolveResult, solve

__version__ = "0.1.0"

__all__ = ["Budgets", "PriorityWeights", "SolveResult", "load", "order_report", "parse", "solve"]
