from .builtins import REGISTRY as BUILTINS, UnknownBuiltinError, make_builtin
from .calculus import covariance, delta, delta_dot_nabla, integrate, l2_norm, mean, partial
from .functions import (
    BuiltinFunction,
    GaussFunction,
    HermiteExpansion,
    MissingDerivativeError,
    as_points,
    combine,
    compose_scalar,
    gradient_norm,
    hermite_eval,
    has_derivative,
    hermite_table,
    multi_factorial,
    product,
)
from .quadrature import GaussQuadrature, compress, gauss_hermite, monte_carlo, parse_quadrature
from .schema import SchemaError, function_from_json, function_to_json

H = HermiteExpansion.basis

__all__ = [
    "BUILTINS",
    "BuiltinFunction",
    "GaussFunction",
    "GaussQuadrature",
    "H",
    "HermiteExpansion",
    "MissingDerivativeError",
    "SchemaError",
    "UnknownBuiltinError",
    "as_points",
    "combine",
    "compose_scalar",
    "compress",
    "covariance",
    "delta",
    "delta_dot_nabla",
    "function_from_json",
    "function_to_json",
    "gauss_hermite",
    "gradient_norm",
    "has_derivative",
    "hermite_eval",
    "hermite_table",
    "integrate",
    "l2_norm",
    "make_builtin",
    "mean",
    "monte_carlo",
    "multi_factorial",
    "parse_quadrature",
    "partial",
    "product",
]
