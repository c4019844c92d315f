from .catalog import ENTRIES, CatalogError, CatalogPair, catalog, num
from .expr import (BinOp, Call, Coord, CoordinateRangeError, ExprError,
                   ExprSyntaxError, FieldExpr, Num, Pow,
                   UnknownIdentifierError, eval_field, evaluate, parse_expr,
                   to_text)
from .metric import (FieldError, MetricField, NotPositiveDefiniteError,
                     OneFormField, beta_norm_squared)
from .scenario import Scenario, ScenarioError, sample_points

__all__ = [
    "BinOp", "Call", "CatalogError", "CatalogPair", "Coord",
    "CoordinateRangeError", "ENTRIES", "ExprError", "ExprSyntaxError",
    "FieldError", "FieldExpr", "MetricField", "NotPositiveDefiniteError",
    "Num", "OneFormField", "Pow", "Scenario", "ScenarioError",
    "UnknownIdentifierError", "beta_norm_squared", "catalog", "eval_field",
    "evaluate", "num", "parse_expr", "sample_points", "to_text",
]
