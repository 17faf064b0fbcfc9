"""Giant atoms chirally coupled to a one-dimensional waveguide."""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
