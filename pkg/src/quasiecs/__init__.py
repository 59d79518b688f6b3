"""Truncated-Fock-space simulator of a heralded entanglement pipeline:
quasi entangled coherent states from a waveguide trimer, lossy distribution,
single-photon-catalysis purification, and photon-number-herald teleportation."""

from .fock import (
    DensityOperator,
    PureState,
    TruncationLeakageError,
    TruncationMismatchError,
    TruncationSpec,
    ZeroProbabilityError,
    embed,
    fidelity,
    fock_project,
    fock_state,
    normalize,
    partial_trace,
    purity,
    restrict,
    tensor_product,
    vacuum_state,
)
from .linear_optics import (
    LossSpec,
    ModeUnitary,
    TrimerConfig,
    apply_loss_ancilla,
    apply_loss_kraus,
    apply_mode_unitary,
    beamsplitter_unitary,
    fock_lift,
    trimer_unitary,
)
from .protocol import (
    ACCEPTED_HERALDS,
    ClosedFormCoefficients,
    GenerationConfig,
    HeraldBranch,
    HeraldOutcome,
    PurificationConfig,
    TeleportResult,
    average_cat_fidelity,
    catalysis_operator,
    closed_form_rho_lossy,
    closed_form_rho_sub,
    coherent_teleportation,
    distribute,
    generate_quasi_ecs,
    purify,
    teleport,
    tmsvs_baseline,
)
from .states import (
    CatSpec,
    ECSSpec,
    SqueezingSpec,
    coherent_amplitudes,
    make_cat,
    make_coherent,
    make_ecs,
    make_tmsvs,
    six_cat_states,
)
from .sweep import (
    AxisSpec,
    PRESETS,
    ResultRow,
    SweepConfig,
    SweepTable,
    emit_csv,
    run_preset,
    run_sweep,
)

__version__ = "0.1.0"
