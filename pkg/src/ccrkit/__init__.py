"""Canonical transformations of free bosonic fields in the Wick/Q-space picture."""

__version__ = "0.1.0"

from .fock import HVector, field_apply, sigma  # noqa: E402
from .lambda_map import LambdaMap, curl_check, standard_form, validate_ccr  # noqa: E402
from .wick import MultiIndex, WickPolynomial, inner_product, norm_squared, wick_product  # noqa: E402

__all__ = ["HVector", "LambdaMap", "MultiIndex", "WickPolynomial", "curl_check",
           "field_apply", "inner_product", "norm_squared", "sigma", "standard_form",
           "validate_ccr", "wick_product", "__version__"]
