"""Oscillation analysis for bimolecular mass-action reaction networks.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from crnosc._core import (  # noqa: F401
    BistabilityReport,
    CanonicalFrame,
    LimitCycleReport,
    MassActionSystem,
    ModelInstance,
    ReactionNetwork,
    SectionSpec,
    StabilityReport,
    bistability_probe,
    builtin_model,
    builtin_network,
    builtin_source,
    canonical_transform,
    center_manifold_quadratic,
    classify_equilibrium,
    closed_form_L1,
    closed_form_equilibrium,
    closed_form_frame,
    default_section,
    deficiency,
    detailed_balance_check,
    find_equilibrium,
    find_limit_cycle,
    focal_value_at,
    focal_value_with_frame,
    hopf_locus_eval,
    hopf_root_count,
    hopf_scan,
    integrate,
    parse_network,
    permanence_probe,
    refine_cycle_newton,
    render_network,
    stoichiometric_matrix,
    structural_report,
    w_params_from_pqr,
    whh_locus_roots,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
