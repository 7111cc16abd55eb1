"""Exact inference for two-layer noisy/leaky OR diagnostic networks.

The package has two independent scoring routes: :mod:`quickscore.engine`
runs the fast signed subset scan (exponential only in the number of
positive findings), and :mod:`quickscore.oracle` brute-forces the same
probabilities over all 2**n disease instances so the engine can be
checked against something obviously correct.  :mod:`quickscore.model`
defines the shared semantics, :mod:`quickscore.corpus` the file formats
and the seeded synthetic generator, and :mod:`quickscore.cli` the ``qs``
command-line workbench.
"""

from .corpus import (
    GeneratorConfig,
    generate,
    read_case,
    read_kb,
    read_result,
    result_document,
    write_case,
    write_kb,
    write_result,
)
from .engine import (
    DEFAULT_POSITIVE_CAP,
    InferenceResult,
    Session,
    negative_marginal,
    score,
)
from .errors import (
    CapExceeded,
    DuplicateFinding,
    InfeasibleEvidence,
    InvalidConfig,
    ParseError,
    QuickscoreError,
    ValidationError,
)
from .model import (
    Disease,
    DiseaseInstance,
    Edge,
    Evidence,
    Finding,
    Network,
    ValidationReport,
    finding_absent_given_instance,
    fold_leak_as_virtual_disease,
    validate,
)
from .oracle import (
    DEFAULT_INSTANCE_CAP,
    OracleResult,
    oracle_joint,
    oracle_posteriors,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "DEFAULT_INSTANCE_CAP",
    "DEFAULT_POSITIVE_CAP",
    "Disease",
    "DiseaseInstance",
    "DuplicateFinding",
    "Edge",
    "Evidence",
    "Finding",
    "GeneratorConfig",
    "InfeasibleEvidence",
    "InferenceResult",
    "InvalidConfig",
    "Network",
    "OracleResult",
    "ParseError",
    "QuickscoreError",
    "Session",
    "ValidationError",
    "ValidationReport",
    "finding_absent_given_instance",
    "fold_leak_as_virtual_disease",
    "generate",
    "negative_marginal",
    "oracle_joint",
    "oracle_posteriors",
    "read_case",
    "read_kb",
    "read_result",
    "result_document",
    "score",
    "validate",
    "write_case",
    "write_kb",
    "write_result",
    "__version__",
]
