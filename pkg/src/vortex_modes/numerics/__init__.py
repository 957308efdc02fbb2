"""Quadrature, root finding and truncated series used across the package."""
from .quadrature import QuadratureSpec, adaptive_quad, semiinfinite_quad
from .roots import RootResult, brent_root
from .series import SeriesAtPoint, series_add, series_eval, series_multiply

__all__ = [
    "QuadratureSpec", "adaptive_quad", "semiinfinite_quad",
    "RootResult", "brent_root",
    "SeriesAtPoint", "series_add", "series_eval", "series_multiply",
]
