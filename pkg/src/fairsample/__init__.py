"""Fair-sampling analysis of degenerate Ising ground states under
transverse-field and Grover mixer QAOA."""

__version__ = "0.1.0"

from .angles import AngleSchedule, OptimizerConfig, SweepResult, optimize_angles, sweep_p
from .ensemble import (
    EnsembleReport,
    load_report,
    merge_reports,
    pick_showcase,
    run_ensemble,
    save_report,
)
from .fairness import (
    RunRecord,
    StepRecord,
    approximation_ratio,
    build_run_record,
    classify_fair,
    normalized_entropy,
)
from .ising import (
    IsingModel,
    Spectrum,
    decode_sk,
    degeneracy_census,
    encode_sk,
    energy,
    load_model,
    spectrum,
)
from .statevector import (
    MIXER_GROVER,
    MIXER_X,
    apply_grover_mixer,
    apply_phase_separator,
    apply_x_mixer,
    expectation,
    ground_state_probabilities,
    phase_table,
    prepare_plus_state,
    run_qaoa,
)

__all__ = [
    "AngleSchedule",
    "EnsembleReport",
    "IsingModel",
    "MIXER_GROVER",
    "MIXER_X",
    "OptimizerConfig",
    "RunRecord",
    "Spectrum",
    "StepRecord",
    "SweepResult",
    "approximation_ratio",
    "apply_grover_mixer",
    "apply_phase_separator",
    "apply_x_mixer",
    "build_run_record",
    "classify_fair",
    "decode_sk",
    "degeneracy_census",
    "encode_sk",
    "energy",
    "expectation",
    "ground_state_probabilities",
    "load_model",
    "load_report",
    "merge_reports",
    "normalized_entropy",
    "optimize_angles",
    "phase_table",
    "pick_showcase",
    "prepare_plus_state",
    "run_ensemble",
    "run_qaoa",
    "save_report",
    "spectrum",
    "sweep_p",
]
