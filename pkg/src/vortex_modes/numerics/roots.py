"""Bracketed scalar root finding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import BracketError, ConvergenceError


@dataclass(frozen=True)
class RootResult:
    root: float
    f_root: float
    iterations: int
    f_lo: float
    f_hi: float


def brent_root(f, bracket, tol=1e-12, maxiter=200, values=None):
    """Brent's method on ``bracket = (lo, hi)``; returns a ``RootResult``.

    ``values`` may carry already computed (f(lo), f(hi)) to save two calls
    when f is expensive.  The sign change is checked before iterating.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketError(f"empty bracket ({lo}, {hi})")
    f_lo, f_hi = values if values is not None else (f(lo), f(hi))
    if f_lo == 0.0:
        return RootResult(lo, 0.0, 0, f_lo, f_hi)
    if f_hi == 0.0:
        return RootResult(hi, 0.0, 0, f_lo, f_hi)
    if f_lo * f_hi > 0:
        raise BracketError(f"no sign change on ({lo}, {hi}): f = {f_lo:.6g}, {f_hi:.6g}")
    cache = {}

    def g(x):
        if x == lo:
            return f_lo
        if x == hi:
            return f_hi
        v = f(x)
        cache[x] = v
        return v

    try:
        root, info = brentq(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=maxiter, full_output=True)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    if not info.converged:
        raise ConvergenceError(f"brent did not converge in {maxiter} iterations")
    f_root = cache[root] if root in cache else f(root)
    return RootResult(float(root), float(f_root), int(info.iterations), f_lo, f_hi)
