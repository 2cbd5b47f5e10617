"""Hamiltonian dynamics for ``H = sqrt(g^{mu nu} p_mu p_nu)``.

The flow integrated here uses the conserved constant ``E`` in the
denominators,

    dq^mu/dtau =  g^{mu nu} p_nu / E
    dp_mu/dtau = -(1 / 2E) (d g^{nu rho} / d q^mu) p_nu p_rho,

which is the Hamiltonian vector field of ``H^2 / (2E)``.  It conserves ``H``
exactly in exact arithmetic and coincides with the flow of ``H`` on shell,
where ``H = E``.  Metric derivatives are analytic for the built-in families
and central differences for user-supplied vielbeins.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels, models
from .errors import ConfigError, DomainError, IntegrationError
from .integrate import IntegratorConfig, integrate, output_times, resolve_steps
from .state import PhaseState, Trajectory


@dataclass(frozen=True)
class HamiltonSystem:
    """A model together with its conserved energy ``E = sqrt(eta^{ij} r_i r_j)``."""

    model: models.VielbeinModel
    E: float

    def __post_init__(self):
        if not self.E > 0.0:
            raise ConfigError(f"system energy must be positive, got {self.E}")

    @classmethod
    def from_model(cls, model: models.VielbeinModel) -> "HamiltonSystem":
        return cls(model=model, E=model.energy)

    def initial_state(self, q) -> PhaseState:
        return self.model.state(q)


def hamiltonian(system: HamiltonSystem, state: PhaseState) -> float:
    """``sqrt(g^{mu nu}(q) p_mu p_nu)``; equals ``system.E`` on shell."""
    g_inv = system.model.metric_at(state.q).g_inv
    quad = float(state.p @ g_inv @ state.p)
    if quad <= 0.0:
        raise DomainError(f"non-positive quadratic form {quad} (off-manifold state)")
    return math.sqrt(quad)


def hamilton_rhs(system: HamiltonSystem, state: PhaseState):
    """Right-hand side ``(dq/dtau, dp/dtau)`` at one phase state."""
    model = system.model
    q = np.asarray(state.q, dtype=float)
    p = np.asarray(state.p, dtype=float)
    g_inv = model.metric_at(q).g_inv
    dq = g_inv @ p / system.E
    derivs = model.metric_inv_derivs(q)
    dp = -0.5 / system.E * np.einsum("mnr,n,r->m", derivs, p, p)
    return dq, dp


def _config_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha1(canon.encode()).hexdigest()[:12]


def _validate_span(span) -> tuple[float, float]:
    t0, t1 = float(span[0]), float(span[1])
    if not (math.isfinite(t0) and math.isfinite(t1)):
        raise ConfigError(f"span must be finite, got {span}")
    if t1 < t0:
        raise ConfigError("trajectory spans must be nondecreasing; integrate() handles reversals")
    return t0, t1


def integrate_hamilton(
    system: HamiltonSystem,
    state0: PhaseState,
    tau_span,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate the Hamilton flow and sample it as a tau-trajectory.

    Uses the compiled kernels for the built-in families under fixed-step RK4
    and the generic integrator otherwise.  Each sample carries the eikonal
    defect ``g^{mu nu} p_mu p_nu - E^2``.  Off-shell initial states are
    allowed but flagged (the closed-form identities hold on shell only).
    """
    cfg = cfg or IntegratorConfig()
    model = system.model
    t0, t1 = _validate_span(tau_span)
    model.check_admissible(state0.q)
    on_shell = models.is_on_shell(model, state0)
    if not on_shell:
        warnings.warn(
            "initial state is off shell; conserved-quantity identities are not asserted",
            RuntimeWarning,
            stacklevel=2,
        )
    step, out = resolve_steps(cfg, (t0, t1), default_step=1e-3 * system.E)
    y0 = state0.as_vector()
    n = model.dim

    if cfg.method == "rk4" and model.kind in models._BUILTIN_KINDS:
        times = output_times(t0, t1, out)
        if model.kind == "vdw":
            params = np.array(
                [system.E, model.params["a"], model.params["b"], model.eta.alpha2, model.eta.beta2]
            )
            ys = kernels.run_rk4(kernels.HAM_VDW, y0, params, t0, t1, step, times)
        else:
            params = np.concatenate([[system.E], model.eta.values])
            ys = kernels.run_rk4(kernels.HAM_DIAG, y0, params, t0, t1, step, times)
    else:
        def rhs(_t, y):
            g_inv = model.metric_at(y[:n]).g_inv
            derivs = model.metric_inv_derivs(y[:n])
            p = y[n:]
            return np.concatenate(
                [g_inv @ p / system.E, -0.5 / system.E * np.einsum("mnr,n,r->m", derivs, p, p)]
            )

        run_cfg = dataclasses.replace(cfg, step=step if cfg.method == "rk4" else cfg.step,
                                      output_step=out)
        sampled = integrate(rhs, y0, (t0, t1), run_cfg)
        times = np.array([s[0] for s in sampled])
        ys = np.array([s[1] for s in sampled])

    qs = ys[:, :n]
    ps = ys[:, n:]
    bad = ~models.admissible_mask(model, qs)
    if np.any(bad):
        first = int(np.argmax(bad))
        raise IntegrationError(
            f"flow left the admissible domain at parameter {times[first]:.6g}",
            last_param=float(times[first - 1]) if first else t0,
            last_state=ys[first - 1] if first else y0,
        )
    residuals = models.inverse_metric_quad_along(model, qs, ps) - system.E**2
    meta = {
        "model": model.name,
        "E": system.E,
        "on_shell": on_shell,
        "config_hash": _config_hash(
            {
                "kind": "hamilton",
                "model": model.name,
                "q0": state0.q.tolist(),
                "p0": state0.p.tolist(),
                "span": [t0, t1],
                "method": cfg.method,
                "step": step,
                "output_step": out,
            }
        ),
    }
    return Trajectory("tau", times, qs, ps, eikonal_residuals=residuals, metadata=meta)


def energy_of_charges(model: models.VielbeinModel, P) -> float:
    """``E(P) = sqrt(eta^{ij} P_i P_j)`` with the model's scale tensor."""
    P = np.asarray(P, dtype=float)
    return float(np.sqrt(np.sum(P * P * model.eta.upper)))


def characteristic_W(model: models.VielbeinModel, q, P=None) -> float:
    """Closed-form characteristic function of the built-in families."""
    return models.characteristic_w(model, q, P)


def action(model: models.VielbeinModel, q, P, tau: float) -> float:
    """``S = W(q, P) - E(P) tau`` for the built-in families."""
    return characteristic_W(model, q, P) - energy_of_charges(model, P) * float(tau)


def generating_G(model: models.VielbeinModel, q, tau: float, q0, tau0: float, P=None) -> float:
    """Two-point generating function ``S(q, tau) - S(q0, tau0)``.

    Along an on-shell flow it vanishes identically and is stationary in the
    conserved charges (``dG/dP_i = 0``).
    """
    P = model.charges if P is None else np.asarray(P, dtype=float)
    return action(model, q, P, tau) - action(model, q0, P, tau0)
