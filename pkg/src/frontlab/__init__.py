"""Singularities, singular curvature and Gauss-Bonnet identities of wave fronts."""
from .bundle import Role
from .catalog import build, listing
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "Role", "build", "listing", "__version__"]
