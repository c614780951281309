"""Assembled translation surfaces over finitely generated matrix groups.

Group arithmetic and ends live in :mod:`psvsurf.group`; marks, gluings and
the assembled surface in :mod:`psvsurf.marks`, :mod:`psvsurf.registry` and
:mod:`psvsurf.builder`; flat geometry in :mod:`psvsurf.tracer` and
:mod:`psvsurf.cones`; validators and censuses in :mod:`psvsurf.checks`.
"""

from .builder import (
    AssembledSurface,
    DecoratedSpec,
    PlacementParams,
    assemble,
    build_buffer,
    build_decorated,
    place_negative_marks,
)
from .checks import (
    SurfaceEndsCensus,
    check_separation,
    genus_witness,
    singularity_marker_check,
    surface_ends_census,
    validate_gluings,
    veech_constraint_check,
    veech_relabel_check,
)
from .cones import ConeReport, angle_at, saddle_connections_from
from .group import (
    ROT90,
    CayleyBall,
    EndsEstimate,
    GenSet,
    GroupElement,
    Mat2,
    assert_no_contracting,
    ends_estimate,
    enumerate_ball,
    is_contracting,
    validate_generating_set,
)
from .marks import Family, Kind, MarkRef, SheetId, locate_mark, mark, mark_endpoints
from .registry import GluingRegistry, glued_partner
from .tracer import GeodesicPath, SurfacePoint, cross_slit, trace_geodesic

__all__ = [name for name in dir() if not name.startswith("_")]
