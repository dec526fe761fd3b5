"""Noise-adapted random access coding on one qubit.

Simulates the prepare-and-measure protocol in which two classical bits are
encoded into one polarization qubit, sent through an amplitude damping
channel bracketed by post-selected stochastic filters, and read out by a
dichotomic measurement.  Provides the dimension-witness evaluation, the
critical-noise solver, Monte Carlo instrument-error bands and ingestion of
experimental coincidence counts, plus the ``qracsim`` command-line tool.
"""

__version__ = "0.1.0"

from ._kernels import kernel_backend
from .analysis import (
    BandRecord,
    CoincidenceRecord,
    ErrorModelConfig,
    IngestResult,
    SweepRecord,
    asp_closed_form,
    critical_gamma,
    evaluate_point,
    ingest_counts,
    monte_carlo_band,
    optimal_filter,
    sweep,
    witness_closed_form,
)
from .channels import (
    FilterOperation,
    FilterOutcome,
    KrausChannel,
    adc,
    apply_channel,
    apply_filter,
    channel_distance,
    gamma_to_theta1,
    make_filter_a,
    make_filter_b,
    sagnac_channel,
    sagnac_from_interferometer,
    theta1_to_gamma,
)
from .errors import (
    DomainError,
    ExcessiveDiscardsError,
    FilterAnnihilatesStateError,
    MissingEntryError,
    NoSignChangeError,
    QracError,
)
from .protocol import (
    ClassicalBound,
    DichotomicMeasurement,
    ProbabilityTable,
    ScenarioConfig,
    asp_direct,
    asp_from_witness,
    canonical_measurements,
    canonical_states,
    classical_bruteforce,
    conditional_probability,
    evaluate_scenario,
    hwp_measurement,
    hwp_preparation,
    witness,
)
from .qcore import (
    bloch_to_density,
    density_from_ket,
    density_to_bloch,
    hermitian_eigensystem,
    purity,
    validate_density_matrix,
)

__all__ = [
    "__version__",
    "kernel_backend",
    # analysis
    "BandRecord",
    "CoincidenceRecord",
    "ErrorModelConfig",
    "IngestResult",
    "SweepRecord",
    "asp_closed_form",
    "critical_gamma",
    "evaluate_point",
    "ingest_counts",
    "monte_carlo_band",
    "optimal_filter",
    "sweep",
    "witness_closed_form",
    # channels
    "FilterOperation",
    "FilterOutcome",
    "KrausChannel",
    "adc",
    "apply_channel",
    "apply_filter",
    "channel_distance",
    "gamma_to_theta1",
    "make_filter_a",
    "make_filter_b",
    "sagnac_channel",
    "sagnac_from_interferometer",
    "theta1_to_gamma",
    # errors
    "DomainError",
    "ExcessiveDiscardsError",
    "FilterAnnihilatesStateError",
    "MissingEntryError",
    "NoSignChangeError",
    "QracError",
    # protocol
    "ClassicalBound",
    "DichotomicMeasurement",
    "ProbabilityTable",
    "ScenarioConfig",
    "asp_direct",
    "asp_from_witness",
    "canonical_measurements",
    "canonical_states",
    "classical_bruteforce",
    "conditional_probability",
    "evaluate_scenario",
    "hwp_measurement",
    "hwp_preparation",
    "witness",
    # qcore
    "bloch_to_density",
    "density_from_ket",
    "density_to_bloch",
    "hermitian_eigensystem",
    "purity",
    "validate_density_matrix",
]
