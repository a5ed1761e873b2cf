"""G-valued Stokes data, isomonodromy flows and braid actions on G*."""

from .liealg import (
    CartanElement,
    ChevalleyBasis,
    Root,
    RootDatum,
    ad_inverse_offdiag,
    big_cell_factorize,
    build_root_system,
    invariant_form,
    positive_system_from_regular,
    root_space_decompose,
    unipotent_exp,
    unipotent_log,
    weyl_reflection,
)
from .formal import ConnectionGerm, FormalType, GaugeSeries, apply_gauge_series, formal_normalize
from .stokes_geometry import (
    AntiStokesDiagram,
    SectorChoice,
    StokesData,
    anti_stokes,
    direction_weyl_chamber,
    factors_to_multipliers,
    half_periods,
    multipliers_to_factors,
    xi_component,
)
from .stokes_numeric import (
    MatchingPlan,
    NuResult,
    canonical_solution,
    dagger_involution,
    direct_monodromy,
    monodromy_map_nu,
    spectral_mismatch,
)
from .gstar import (
    GStarPoint,
    TitsElement,
    braid_word_apply,
    dkp_generator,
    gamma_action,
    gstar_from_stokes,
    holonomy_generator,
    stokes_from_gstar,
    tits_generator,
)
from .isomonodromy import (
    TregPath,
    brieskorn_path,
    hamiltonian,
    imd_vector_field,
    integrate_flow,
    varpi_eval,
)
from .dmt import (
    DMTForm,
    RepData,
    build_dmt_form,
    classical_quantum_compare,
    dmt_flatness_check,
    dmt_holonomy,
)
from .verify import RunConfig, verify_theorem_holonomy

__version__ = "0.1.0"
