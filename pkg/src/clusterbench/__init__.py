"""Graph-sum representations of Mayer and virial coefficients."""
from .errors import BudgetError, GraphError, IngestionError
from .graphs import Edge, MarkedGraph, canonical_form
from .trees import RootedLabeledTree, penrose_rule
from .blc import BasicLinearCombination

__all__ = ["BudgetError", "GraphError", "IngestionError", "Edge", "MarkedGraph",
           "canonical_form", "RootedLabeledTree", "penrose_rule", "BasicLinearCombination"]
__version__ = "0.1.0"
