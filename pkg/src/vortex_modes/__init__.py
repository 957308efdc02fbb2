"""Rotating eigenmodes of the linearised 2D Euler equation around a plateau vortex."""
__version__ = "0.1.0"

from .profiles import LAMBDA0, SideCoefficient, VortexProfile, lambda_bracket  # noqa: E402
from .eigensolver import EigenResult, lambda1_leading, solve_lambda  # noqa: E402
from .mode_assembly import ModeField, assemble_mode, verify_integral_equations  # noqa: E402

__all__ = ["LAMBDA0", "SideCoefficient", "VortexProfile", "lambda_bracket", "EigenResult",
           "lambda1_leading", "solve_lambda", "ModeField", "assemble_mode",
           "verify_integral_equations", "__version__"]
