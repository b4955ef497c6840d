"""gslab: manipulation censuses, influences, and canonical paths for voting rules."""

from .errors import DomainError, GslabError, ProfileCapExceeded, TheoremViolation
from .influence import (
    BoundaryEdge,
    BoundaryPairWitness,
    InfluenceKind,
    TwoManipOutcome,
    boundary_edges,
    find_large_boundary_pair,
    influence,
    influence_pair,
    influence_pair_refined,
    influence_single,
    influence_total,
    variance_indicator,
)
from .manipulation import (
    ManipulationCensus,
    ManipulationWitness,
    all_r_manipulation_points,
    bound_thm13,
    bound_thm16,
    census,
    census_to_json,
    find_manipulation,
    gs_witness,
    is_manipulation_pair,
    is_r_manipulation_point,
    oracle_r_manipulation_point,
    plurality_scaling_experiment,
)
from .paths import (
    GroupAction,
    InverseImageCensus,
    Path,
    PathMap,
    closeness_ok,
    dump_path,
    extract_2manip_from_refined_boundary,
    extract_3manip_from_triple,
    extract_manipulation_refined,
    extract_manipulation_v1,
    inverse_image_census,
    junction_counts,
    order_preserving_path,
    profile_path_v1,
    refined_coord_path_block,
    refined_coord_path_generic,
    refined_profile_path,
    shipped_path_maps,
    sim_canon_path,
    sort_path,
    triple_locality_ok,
    verify_invariance,
)
from .rankings import (
    DEFAULT_PROFILE_CAP,
    Profile,
    Ranking,
    adj,
    apply_adjacent,
    bubble_path,
    compose,
    decode,
    decode_profile,
    encode,
    encode_profile,
    enumerate_profiles,
    enumerate_rankings,
    format_profile,
    format_ranking,
    parse_profile,
    parse_ranking,
    prefers,
    rank_of,
)
from .scf import (
    SocialChoiceFn,
    borda_voter1_tiebreak,
    constant,
    dictator_top,
    dist,
    dist_to_const,
    dist_to_dict,
    dist_to_nonmanip,
    is_neutral,
    plurality_leftmost,
    random_tabular,
    restrict,
    tabular,
)

__version__ = "0.1.0"
