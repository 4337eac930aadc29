"""Tilings of fractal blow-ups built from similitude iterated function systems."""
from .algebra import (
    PartnerDetection,
    PartnerSet,
    RigidityReport,
    SearchBounds,
    amalgamate,
    amalgamate_inverse,
    annular_decomposition,
    detect_partners,
    intersection_dichotomy,
    rigidity_check,
    shift,
    strong_rigidity_check,
    symmetry_search,
    tiles_intersection,
    unshift,
)
from .errors import (
    BlowupError,
    ConfigError,
    InconsistencyError,
    InvalidWordError,
    LevelCapError,
    NotInDomainError,
    PreconditionError,
)
from .geometry import IfsSpec, Similitude, attractor
from .io import PRESETS, load_spec, read_tiles, save_spec, spec_from_dict, spec_to_dict, write_tiles
from .render import RenderStyle, render_svg
from .symbolic import (
    AbsoluteAddress,
    EventuallyPeriodic,
    PowerVector,
    cylinder_partition_check,
    e_minus,
    e_weight,
    labelled_addresses,
    normalize_address,
    omega_level,
    omega_step,
)
from .tiling import (
    Tile,
    Tiling,
    canonical_tiling,
    nesting_check,
    patch,
    pi_prefix,
    pi_sequence,
    prototile_census,
)
from .verify import (
    injectivity_precondition,
    nonoverlap_check,
    pairwise_distinctness,
    quasiperiodicity_probe,
    self_similarity_check,
    tiling_distance,
)


__all__ = [
    "AbsoluteAddress",
    "amalgamate",
    "amalgamate_inverse",
    "annular_decomposition",
    "attractor",
    "BlowupError",
    "canonical_tiling",
    "ConfigError",
    "cylinder_partition_check",
    "detect_partners",
    "e_minus",
    "e_weight",
    "EventuallyPeriodic",
    "IfsSpec",
    "InconsistencyError",
    "injectivity_precondition",
    "intersection_dichotomy",
    "InvalidWordError",
    "labelled_addresses",
    "LevelCapError",
    "load_spec",
    "nesting_check",
    "nonoverlap_check",
    "normalize_address",
    "NotInDomainError",
    "omega_level",
    "omega_step",
    "pairwise_distinctness",
    "PartnerDetection",
    "PartnerSet",
    "patch",
    "pi_prefix",
    "pi_sequence",
    "PowerVector",
    "PreconditionError",
    "PRESETS",
    "prototile_census",
    "quasiperiodicity_probe",
    "read_tiles",
    "render_svg",
    "RenderStyle",
    "rigidity_check",
    "RigidityReport",
    "save_spec",
    "SearchBounds",
    "self_similarity_check",
    "shift",
    "Similitude",
    "spec_from_dict",
    "spec_to_dict",
    "strong_rigidity_check",
    "symmetry_search",
    "Tile",
    "tiles_intersection",
    "Tiling",
    "tiling_distance",
    "unshift",
    "write_tiles",
]
