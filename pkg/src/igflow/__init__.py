"""igflow: thermodynamic Hamilton flows, information-geometry gradient flows,
and the closed-form identities connecting them.

Equilibrium equations of state are encoded as vielbein systems
``e_i^mu(q) p_mu = r_i``; the induced metric turns them into a unit-speed
Hamilton flow in a mock time ``tau``, while the entropy-gradient flow runs in
the information-geometry parameter ``t`` with ``dtau = E dt`` and
``t = ln T``.  The discrete counterpart drives probability vectors toward a
target along the Kullback-Leibler gradient flow, whose closed-form solution
is canonical-ensemble relaxation under ``beta = e^{-t}``.
"""

from .backend import NUMBA_ENABLED, backend_name
from .discrete import (
    DiscreteEnsemble,
    FlowEndpoints,
    average_energy,
    canonical_distribution,
    canonical_flow_residual,
    closed_form_q,
    flow_log_normalizer,
    gompertz,
    gompertz_residual,
    integrate_discrete_flow,
    kl_divergence,
    kl_flow_rhs,
    log_partition_function,
    partition_function,
    unnormalized_flow,
)
from .errors import (
    ConfigError,
    DomainError,
    IgflowError,
    IntegrationError,
    UnsupportedModelError,
)
from .geometry import (
    DiagonalScale,
    MetricAt,
    VielbeinField,
    arc_length,
    eikonal_residual,
    metric_at,
    metric_from_vielbein,
    ruppeiner_metric,
)
from .gradient import (
    beta_of_t,
    eta_flow_rhs,
    integrate_gradient_flow,
    reparametrize,
    t_of_beta,
    temperature_of_t,
    theta_flow_rhs,
)
from .hamilton import (
    HamiltonSystem,
    action,
    characteristic_W,
    energy_of_charges,
    generating_G,
    hamilton_rhs,
    hamiltonian,
    integrate_hamilton,
)
from .integrate import IntegratorConfig, integrate
from .models import (
    VielbeinModel,
    closed_form_state,
    custom_model,
    ideal_gas,
    legendre_gap,
    load_model,
    log_affine,
    mathieu_forward,
    mathieu_inverse,
    model_from_config,
    on_shell_momenta,
    one_form_pairing_defect,
    planck_potential,
    planck_potential_theta,
    pressure_drift,
    vdw_gas,
)
from .state import PhaseState, Trajectory
from .verify import VerificationReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "backend_name",
    "ConfigError",
    "DomainError",
    "IgflowError",
    "IntegrationError",
    "UnsupportedModelError",
    "DiagonalScale",
    "MetricAt",
    "VielbeinField",
    "arc_length",
    "eikonal_residual",
    "metric_at",
    "metric_from_vielbein",
    "ruppeiner_metric",
    "PhaseState",
    "Trajectory",
    "VielbeinModel",
    "ideal_gas",
    "vdw_gas",
    "log_affine",
    "custom_model",
    "model_from_config",
    "load_model",
    "on_shell_momenta",
    "closed_form_state",
    "mathieu_forward",
    "mathieu_inverse",
    "one_form_pairing_defect",
    "planck_potential",
    "planck_potential_theta",
    "legendre_gap",
    "pressure_drift",
    "HamiltonSystem",
    "hamiltonian",
    "hamilton_rhs",
    "integrate_hamilton",
    "characteristic_W",
    "action",
    "generating_G",
    "energy_of_charges",
    "theta_flow_rhs",
    "eta_flow_rhs",
    "integrate_gradient_flow",
    "reparametrize",
    "temperature_of_t",
    "t_of_beta",
    "beta_of_t",
    "DiscreteEnsemble",
    "FlowEndpoints",
    "partition_function",
    "log_partition_function",
    "canonical_distribution",
    "average_energy",
    "kl_divergence",
    "kl_flow_rhs",
    "closed_form_q",
    "unnormalized_flow",
    "flow_log_normalizer",
    "integrate_discrete_flow",
    "canonical_flow_residual",
    "gompertz",
    "gompertz_residual",
    "IntegratorConfig",
    "integrate",
    "VerificationReport",
    "run_suite",
]
