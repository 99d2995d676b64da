"""Twisted conjugacy classes of finite Coxeter groups and displacement
spectra of building automorphisms, in exact arithmetic."""

from .coxeter import CoxeterSystem, DiagramAutomorphism, GroupElement, TypeSpec, build_system, parse_type
from .radical import RadicalNumber
from .twisted import TwistedClass, cap_certificate, classify_bicapped, downward_closure, dual_class, enumerate_class

__version__ = "0.1.0"
