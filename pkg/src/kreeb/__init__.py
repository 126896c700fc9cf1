"""Exact K-stability, Reeb-field minimization and link topology for Fano cone singularities
of complexity at most one."""

from .catalog import brieskorn_pham_catalog, build_xk
from .geometry import Cone, TailedPolyhedron, dual_cone, triangulate, truncated_dual_volume
from .pdivisor import (
    PolyhedralDivisor,
    admissible_points,
    canonical_data,
    degeneration_cone,
    degree,
    is_isolated,
    is_log_terminal,
    is_proper,
)
from .stability import kstability_test, reeb_minimize, vol_counting_oracle, vol_pdiv
from .topology import abelianization, class_group, link_report, pi1_presentation, tietze_trivial

__all__ = [
    "Cone",
    "PolyhedralDivisor",
    "TailedPolyhedron",
    "abelianization",
    "admissible_points",
    "brieskorn_pham_catalog",
    "build_xk",
    "canonical_data",
    "class_group",
    "degeneration_cone",
    "degree",
    "dual_cone",
    "is_isolated",
    "is_log_terminal",
    "is_proper",
    "kstability_test",
    "link_report",
    "pi1_presentation",
    "reeb_minimize",
    "tietze_trivial",
    "triangulate",
    "truncated_dual_volume",
    "vol_counting_oracle",
    "vol_pdiv",
]
