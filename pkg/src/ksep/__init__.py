"""Detection of k-nonseparability in multipartite qudit states."""

from .criterion import (
    DEFAULT_TOLERANCE,
    CriterionResult,
    MeasurementPlan,
    analytic_threshold,
    apply_block_swap,
    evaluate_all_k,
    evaluate_criterion,
    evaluate_criterion_oracle,
    measurement_plan,
    numeric_threshold,
)
from .fcs import (
    FcsSpec,
    build_fcs_state,
    chain_separability_report,
    fcs_spec_from_dict,
    fcs_spec_to_dict,
    fixed_point_residual,
    load_fcs_spec,
    save_fcs_spec,
)
from .optimizer import (
    LocalUnitaryParams,
    OptimizationReport,
    build_unitary,
    optimize_phi,
)
from .partitions import Partition, count_partitions, enumerate_partitions
from .states import (
    DensityMatrix,
    ProductState,
    StateFamilyPoint,
    ValidationError,
    apply_local_unitaries,
    basis_product_state,
    computational_pair,
    density_matrix_from_dict,
    density_matrix_to_dict,
    family_state,
    ghz_state,
    ghz_w_qubit_family,
    ghz_xi_qutrit_family,
    isotropic_ghz_family,
    load_density_matrix,
    load_product_state,
    make_density_matrix,
    pack_index,
    product_state_from_dict,
    product_state_to_dict,
    projector,
    save_density_matrix,
    save_product_state,
    unpack_index,
    w_state,
    xi_state,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOLERANCE",
    "CriterionResult",
    "DensityMatrix",
    "FcsSpec",
    "LocalUnitaryParams",
    "MeasurementPlan",
    "OptimizationReport",
    "Partition",
    "ProductState",
    "StateFamilyPoint",
    "ValidationError",
    "analytic_threshold",
    "apply_block_swap",
    "apply_local_unitaries",
    "basis_product_state",
    "build_fcs_state",
    "build_unitary",
    "chain_separability_report",
    "computational_pair",
    "count_partitions",
    "density_matrix_from_dict",
    "density_matrix_to_dict",
    "enumerate_partitions",
    "evaluate_all_k",
    "evaluate_criterion",
    "evaluate_criterion_oracle",
    "family_state",
    "fcs_spec_from_dict",
    "fcs_spec_to_dict",
    "fixed_point_residual",
    "ghz_state",
    "ghz_w_qubit_family",
    "ghz_xi_qutrit_family",
    "isotropic_ghz_family",
    "load_density_matrix",
    "load_fcs_spec",
    "load_product_state",
    "make_density_matrix",
    "measurement_plan",
    "numeric_threshold",
    "optimize_phi",
    "pack_index",
    "product_state_from_dict",
    "product_state_to_dict",
    "projector",
    "save_density_matrix",
    "save_fcs_spec",
    "save_product_state",
    "unpack_index",
    "w_state",
    "xi_state",
]
