class GraphError(ValueError):
    """Malformed graph, tree or record data."""


class BudgetError(ValueError):
    """Requested size is outside what the desk-scale algorithms support."""


class IngestionError(GraphError):
    """Externally supplied frame-sum data violates its structural contract."""
