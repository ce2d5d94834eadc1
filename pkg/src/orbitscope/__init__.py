"""Orbit structure, Levi forms and Stein invariant domains for complexified rank-one
symmetric spaces of SO0(n,1) and SU(n,1)."""
from .lie_core import Family, GroupSpec
from .models import ModelPoint, SliceId, representative_point, slice_point
from .orbits import DomainId, classify_point, domain_contains, invariant_f, orbit_diagram
from .levi import algebraic_levi_signature, nilpotent_site, numeric_levi_signature
from .stein import verify_stein_table

__version__ = "0.1.0"

__all__ = [
    "Family", "GroupSpec", "ModelPoint", "SliceId", "representative_point", "slice_point",
    "DomainId", "classify_point", "domain_contains", "invariant_f", "orbit_diagram",
    "algebraic_levi_signature", "nilpotent_site", "numeric_levi_signature",
    "verify_stein_table",
]
