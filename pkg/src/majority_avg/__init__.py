"""Average-case comparison counts of deterministic majority algorithms."""

__version__ = "0.1.0"

from .counters import (  # noqa: E402
    ALGORITHMS,
    AlgorithmResult,
    ComparisonTally,
    run_fischer_salzberg,
    run_mjrty,
    run_tournament,
)
from .errors import DomainError, ResourceLimitError  # noqa: E402
from .streams import (  # noqa: E402
    ColourStream,
    brute_force_majority,
    derive_trial_seed,
    enumerate_streams,
    generate_stream,
)

__all__ = [
    "ALGORITHMS",
    "AlgorithmResult",
    "ColourStream",
    "ComparisonTally",
    "DomainError",
    "ResourceLimitError",
    "brute_force_majority",
    "derive_trial_seed",
    "enumerate_streams",
    "generate_stream",
    "run_fischer_salzberg",
    "run_mjrty",
    "run_tournament",
]
