"""Local maps on entangled qubit pairs: no-signalling checks, cloning
fidelities and classification of maps as linear, trace preserving,
positive or completely positive."""

from .classify import (
    ChoiMatrix,
    MapClassification,
    Region,
    choi_matrix,
    classify_map,
    random_channel,
    random_transfer_map,
    test_linearity,
    test_positivity,
    test_trace_preservation,
)
from .cloning import (
    OPTIMAL_FIDELITY_1_TO_2,
    FidelityReport,
    average_fidelity,
    single_clone_fidelity,
)
from .exceptions import ContractError, DomainError, NoSignalError, SizeError, StructureError
from .maps import (
    BlochAffineCloneMap,
    BlochNonlinearCloneMap,
    CloneFunction,
    KrausMap,
    LocalMap,
    PureBranchMap,
    TransferMap,
    absolute,
    apply_to_density,
    apply_to_ensemble,
    clone_marginal,
    kraus_to_transfer,
    orthogonal_pure,
    power,
    square,
    to_transfer,
)
from .matcore import herm_eig, partial_trace, tensor_product, trace_distance, trace_norm
from .signalling import (
    SignallingExperiment,
    SignallingReport,
    Verdict,
    bob_average_state,
    conditional_probs,
    decode_mutual_info,
    helstrom_success,
    no_signalling_distance,
    run_experiment,
    scan_bases,
)
from .states import (
    BipartiteState,
    ConditionalEnsemble,
    DensityMatrix,
    bloch_to_density,
    density_to_bloch,
    measure_alice,
    partially_entangled,
    singlet,
)

__version__ = "0.1.0"
