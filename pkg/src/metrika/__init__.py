"""metrika: a workbench for continuous first-order logic over bounded
metric structures — exact formula evaluation on finite presentations,
Urysohn-style one-point extensions, existentially-closed synthesis,
random-space sampling, and approximate back-and-forth comparison."""

from .errors import (
    ArityMismatchError,
    ConstantOutOfRangeError,
    ExtensionViolatesAxiomsError,
    FormulaSyntaxError,
    FreeVariableInConditionError,
    IndexOutOfPrefixError,
    LengthMismatchError,
    MetrikaError,
    NotAPrefixError,
    NotPrenexUnsupportedError,
    PartialInfeasibleError,
    PointsOutOfPrefixError,
    PreconditionViolatedError,
    QuotientIllDefinedError,
    RejectionBudgetExceededError,
    SchemaMismatchError,
    SeedViolatesTheoryError,
    SizeMismatchError,
    UnboundVariableError,
    UnknownRelationError,
)
from .logic import (
    Condition,
    Formula,
    HierarchyClass,
    Signature,
    graph_signature,
    metric_signature,
    parse_condition,
    parse_formula,
    quantifier_class,
)
from .structures import (
    PresentedStructure,
    ValidationReport,
    empty_structure,
    extend_point,
    extend_with_distances,
    from_distance_matrix,
    load,
    metric_quotient,
    metric_rows,
    save,
    validate,
)
from .evaluation import (
    ConditionCheck,
    ValueInterval,
    check_condition,
    evaluate,
    evaluate_prefix_bounds,
)
from .polish import (
    BasicOpen,
    BorelPi2,
    Code,
    basic_open_membership,
    encode,
    encoded_distance,
    index_enumeration,
    pi2_depth_membership,
)
from .urysohn import (
    DistanceConfiguration,
    admissible_bounds,
    all_configurations,
    axiom_instance,
    config_error,
    delta_for,
    extension_property_report,
    katetov_witness,
    restrict,
)
from .synth import (
    TheorySpec,
    ec_close,
    ec_witness_check,
    empty_metric_spec,
    graph_seed,
    graph_spec,
    graph_tasks,
    is_prefix,
    metric_seed,
)
from .sampling import (
    MeasureSpec,
    genericity_frequency,
    invariance_audit,
    sample_one_point,
    sample_space,
)
from .compare import back_and_forth, distortion

__version__ = "0.1.0"
