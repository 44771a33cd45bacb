"""Recurrent sets of lines for planar self-similar attractors.

Build a candidate recurrent set from an L2 density scan and a word-counting
slice test, search for a small perturbation of the system under which the
candidate recurs, and certify numerically that projections of the perturbed
attractor contain intervals.
"""

from .config import RunConfig, config_from_json_dict, load_config
from .errors import BudgetExceeded, ConfigError
from .ifs import (
    IfsSpec,
    OscReport,
    Similarity,
    Square,
    check_osc_unit_square,
    compose,
    compose_word,
    cylinder_square,
    epsilon_distance,
    ifs_from_json_dict,
    invert_map,
    load_ifs,
    make_ifs,
    map_square,
    similarity_dimension,
    stopping_words,
    word_ratio,
)
from .lines import (
    Interval,
    Line,
    canonical_angle,
    line_from_two_points,
    line_square_intersects,
    normal,
    project_point,
    project_square,
    renormalize,
    renormalize_arrays,
    renormalize_map,
    renormalize_params,
    renormalize_via_points,
    renormalize_word,
)
from .measure import (
    DirectionSet,
    ProjectedHistogram,
    WordClassification,
    bad_word_cap,
    build_E,
    classify_good_words,
    l2_norm_estimate,
    measured_c9,
    projected_histogram,
    select_c5,
    stopping_cylinders,
    union_projection_length,
)
from .recurrence import (
    GridGeometry,
    GridMembership,
    IntervalCertificate,
    RecurrenceReport,
    RecurrentCandidate,
    SliceBuilder,
    SliceParams,
    SliceSet,
    SurvivalReport,
    attractor_points,
    build_candidate,
    build_slice,
    certify_line,
    certify_projection_interval,
    check_recurrence,
    two_letter_words,
)
from .search import (
    CoverageTester,
    OmegaAssignment,
    Perturbation,
    SearchOutcome,
    build_perturbed_ifs,
    closeness_report,
    draw_assignment,
    estimate_success_prob,
    perturb_map,
    search_omega0,
)
from .systems import BUILTIN, cantor_dust, four_corner, get_builtin, sierpinski

__all__ = [name for name in dir() if not name.startswith("_")]
