"""Explicit blow-up solutions of the axisymmetric Navier-Stokes equations with
super-critical forcing, and numerical checks of their properties."""

from .field import BlowupConfig, make_config
from .profile import BumpSpec, Profile, build_profile

__all__ = ["BlowupConfig", "BumpSpec", "Profile", "build_profile", "make_config"]
__version__ = "0.1.0"
