"""Gradient flows in the information-geometry parametrization.

In theta-coordinates the flow is linear, ``d theta / dt = -theta``.  Mapped
to the extensive coordinates of a model it becomes

    dq^mu / dt = g^{mu nu}(q) ds/dq^nu,

driving the state up the entropy.  For every built-in model this flow is the
Hamilton flow under the time dilation ``dtau = E dt``, and the flow
parameter is the logarithm of temperature: ``T(t) = T(0) e^t`` and
``t = -ln(beta)`` for the coldness ``beta = 1/(k_B T)``.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import kernels, models
from .errors import ConfigError, DomainError, IntegrationError
from .hamilton import _config_hash, _validate_span
from .integrate import IntegratorConfig, integrate, output_times, resolve_steps
from .state import Trajectory


def theta_flow_rhs(theta) -> np.ndarray:
    """Linear flow ``d theta / dt = -theta`` in the affine coordinates."""
    return -np.asarray(theta, dtype=float)


def eta_flow_rhs(model: models.VielbeinModel, q) -> np.ndarray:
    """``g^{mu nu}(q) ds/dq^nu`` with the model's metric and entropy gradient."""
    q = model.check_admissible(q)
    return model.metric_at(q).g_inv @ model.entropy_gradient(q)


def integrate_gradient_flow(
    model: models.VielbeinModel,
    q0,
    t_span,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate the entropy-gradient flow; samples carry on-shell momenta."""
    cfg = cfg or IntegratorConfig()
    t0, t1 = _validate_span(t_span)
    q0 = model.check_admissible(q0)
    step, out = resolve_steps(cfg, (t0, t1), default_step=1e-3)

    if cfg.method == "rk4" and model.kind in models._BUILTIN_KINDS:
        times = output_times(t0, t1, out)
        if model.kind == "vdw":
            params = np.array(
                [
                    model.params["a"],
                    model.params["b"],
                    model.eta.alpha2,
                    model.eta.beta2,
                    model.charges[0],
                    model.charges[1],
                ]
            )
            qs = kernels.run_rk4(kernels.GRAD_VDW, q0, params, t0, t1, step, times)
        else:
            params = np.concatenate([model.charges, model.eta.values])
            qs = kernels.run_rk4(kernels.GRAD_DIAG, q0, params, t0, t1, step, times)
    else:
        def rhs(_t, q):
            return model.metric_at(q).g_inv @ model.entropy_gradient(q)

        run_cfg = dataclasses.replace(cfg, step=step if cfg.method == "rk4" else cfg.step,
                                      output_step=out)
        sampled = integrate(rhs, q0, (t0, t1), run_cfg)
        times = np.array([s[0] for s in sampled])
        qs = np.array([s[1] for s in sampled])

    bad = ~models.admissible_mask(model, qs)
    if np.any(bad):
        first = int(np.argmax(bad))
        raise IntegrationError(
            f"flow left the admissible domain at parameter {times[first]:.6g}",
            last_param=float(times[first - 1]) if first else t0,
            last_state=qs[first - 1] if first else q0,
        )
    ps = models.on_shell_momenta_along(model, qs)
    meta = {
        "model": model.name,
        "E": model.energy,
        "config_hash": _config_hash(
            {
                "kind": "gradient",
                "model": model.name,
                "q0": np.asarray(q0).tolist(),
                "span": [t0, t1],
                "method": cfg.method,
                "step": step,
                "output_step": out,
            }
        ),
    }
    return Trajectory("t", times, qs, ps, metadata=meta)


def reparametrize(traj: Trajectory, energy: float) -> Trajectory:
    """Dilate the flow parameter by the conserved energy: ``tau = E t``.

    A t-trajectory becomes a tau-trajectory with parameters scaled by ``E``
    and vice versa; the samples themselves are unchanged.  Valid for models
    whose ``E`` is constant along the flow (all built-in families).
    """
    if not energy > 0.0:
        raise ConfigError(f"energy must be positive, got {energy}")
    if traj.parameter_kind == "t":
        return traj.with_parameter(traj.params * energy, "tau")
    return traj.with_parameter(traj.params / energy, "t")


def temperature_of_t(T0: float, t: float) -> float:
    """Temperature along the flow: ``T(t) = T0 e^t``."""
    if not T0 > 0.0:
        raise DomainError(f"temperature must be positive, got {T0}")
    return T0 * math.exp(t)


def t_of_beta(beta: float) -> float:
    """Flow parameter of a coldness value: ``t = -ln(beta)``.

    The integration constant in ``beta = e^{-t} + C`` is fixed at zero, so
    ``beta = 1`` maps to ``t = 0``.
    """
    if not beta > 0.0:
        raise DomainError(f"coldness must be positive, got {beta}")
    return -math.log(beta)


def beta_of_t(t: float) -> float:
    """Inverse of :func:`t_of_beta`: ``beta = e^{-t}``."""
    return math.exp(-t)
