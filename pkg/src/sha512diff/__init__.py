"""Step-reduced SHA-512 differential workbench."""

from .core import (
    MAX_STEPS,
    STANDARD_IV,
    Digest,
    MessageBlock,
    RegisterState,
    StepRangeError,
    compress,
    digest_message,
    expand_schedule,
    step,
)
from .difftrace import (
    DifferencePattern,
    DifferentialTrace,
    StepRecord,
    apply_difference,
    compute_difference,
    first_divergence,
    run_pair,
    schedule_difference,
)
from .search import (
    CollisionCandidate,
    SearchConfig,
    SearchConfigError,
    SearchStats,
    estimate_throughput,
    project_wall_time,
    run_search,
    verify_candidate,
)
from .vectors import (
    BlockParseError,
    BuiltinVector,
    PathConstants,
    builtin,
    check_constants,
    parse_block,
    serialize_block,
)

__version__ = "0.1.0"
