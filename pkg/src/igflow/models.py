"""Concrete equation-of-state models and their closed-form machinery.

Three built-in families share one structure: an invertible vielbein field
``e_i^mu(q)`` turning the equations of state into ``e(q) . p = r`` with
conserved charges ``r``, a positive diagonal scale ``eta``, and an entropy
that equals the characteristic function ``W`` measured from a reference
state.

* ``ideal``      -- vielbein ``diag(u, v)``, charges ``(f k_B / 2, k_B)``,
  entropy ``P_u ln(u/u0) + P_v ln(v/v0)``.
* ``vdw``        -- van der Waals gas: vielbein rows ``(u + a/v, 0)`` and
  ``(a (v-b)/v^2, v-b)``, same charges, entropy in the shifted variables
  ``u + a/v`` and ``v - b``.
* ``log_affine`` -- m coordinates with ``W = sum_i P_i ln q_i``, metric
  ``g_ii = P_i / q_i^2``; the ideal gas is its 2-d instance and the unit
  vector ``P = (1, .., 1)`` recovers the Boumuki-Noda potential
  ``-sum ln eta_i``.

Scale factors may be given numerically or as the symbolic tokens ``"Pu"`` /
``"Pv"``, which resolve to the charges at construction; that choice makes
the pressure (ideal) or ``P + a/v^2`` (van der Waals) constant along the
Hamilton flow.

Models are immutable after construction; every operation here is a pure
function of its inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedModelError
from .geometry import DiagonalScale, MetricAt, VielbeinField, metric_from_vielbein
from .state import PhaseState

_BUILTIN_KINDS = ("ideal", "vdw", "log_affine")
#: kinds whose vielbein is diag(q) (shared closed forms and kernels)
_DIAG_KINDS = ("ideal", "log_affine")


@dataclass(frozen=True)
class VielbeinModel:
    """An equation-of-state system ``e_i^mu(q) p_mu = r_i``.

    Fields follow the construction above; ``entropy_fn`` and
    ``admissible_fn`` are only set for custom models (built-in families use
    their closed forms).
    """

    name: str
    kind: str
    dim: int
    vielbein: VielbeinField
    eta: DiagonalScale
    charges: np.ndarray
    reference_state: np.ndarray
    params: Mapping = field(default_factory=dict)
    entropy_fn: Callable[[np.ndarray], float] | None = None
    admissible_fn: Callable[[np.ndarray], bool] | None = None

    def __post_init__(self):
        charges = np.array(self.charges, dtype=float)
        ref = np.array(self.reference_state, dtype=float)
        if charges.shape != (self.dim,) or ref.shape != (self.dim,):
            raise ConfigError("charges and reference state must have the model dimension")
        if self.eta.dim != self.dim or self.vielbein.dim != self.dim:
            raise ConfigError("vielbein/scale dimensions do not match the model")
        charges.setflags(write=False)
        ref.setflags(write=False)
        object.__setattr__(self, "charges", charges)
        object.__setattr__(self, "reference_state", ref)
        if not self.admissible(ref):
            raise ConfigError(f"reference state {ref.tolist()} is not admissible")

    # -- domain ---------------------------------------------------------

    def admissible(self, q) -> bool:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dim,) or not np.all(np.isfinite(q)):
            return False
        if self.kind in _DIAG_KINDS:
            return bool(np.all(q > 0.0))
        if self.kind == "vdw":
            a, b = self.params["a"], self.params["b"]
            return q[1] > b and q[0] + a / q[1] > 0.0
        if self.admissible_fn is not None:
            return bool(self.admissible_fn(q))
        return True

    def check_admissible(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if not self.admissible(q):
            raise DomainError(f"state q={q.tolist()} is outside the {self.name} domain")
        return q

    # -- geometry -------------------------------------------------------

    def vielbein_at(self, q) -> np.ndarray:
        return self.vielbein.at(self.check_admissible(q))

    def metric_at(self, q) -> MetricAt:
        q = self.check_admissible(q)
        return metric_from_vielbein(self.vielbein.at(q), self.eta, q=q)

    @property
    def energy(self) -> float:
        """Conserved Hamiltonian value ``sqrt(eta^{ij} r_i r_j)``."""
        return float(np.sqrt(np.sum(self.charges**2 * self.eta.upper)))

    def metric_inv_derivs(self, q) -> np.ndarray:
        """``D[m, n, r] = d g^{nr} / d q^m``: analytic for built-ins, central
        differences (relative step 1e-6) otherwise."""
        q = self.check_admissible(q)
        n = self.dim
        out = np.zeros((n, n, n))
        if self.kind in _DIAG_KINDS:
            for i in range(n):
                out[i, i, i] = 2.0 * q[i] / self.eta.values[i]
            return out
        if self.kind == "vdw":
            a, b = self.params["a"], self.params["b"]
            a2, b2 = self.eta.alpha2, self.eta.beta2
            u, v = q
            big_a = u + a / v
            big_b = v - b
            out[0, 0, 0] = 2.0 * big_a / a2
            out[1, 0, 0] = -2.0 * a * big_a / (a2 * v * v) + (a * a / b2) * (
                2.0 * big_b / v**4 - 4.0 * big_b**2 / v**5
            )
            out[1, 0, 1] = out[1, 1, 0] = 2.0 * a * b * big_b / (b2 * v**3)
            out[1, 1, 1] = 2.0 * big_b / b2
            return out
        for m in range(n):
            h = 1e-6 * max(1.0, abs(q[m]))
            qp = q.copy()
            qm = q.copy()
            qp[m] += h
            qm[m] -= h
            out[m] = (self.metric_at(qp).g_inv - self.metric_at(qm).g_inv) / (2.0 * h)
        return out

    # -- thermodynamics --------------------------------------------------

    def entropy(self, q) -> float:
        """Entropy relative to the reference state (zero there)."""
        q = self.check_admissible(q)
        if self.kind in _BUILTIN_KINDS:
            return characteristic_w(self, q) - characteristic_w(self, self.reference_state)
        if self.entropy_fn is None:
            raise UnsupportedModelError(f"model {self.name!r} has no entropy function")
        return float(self.entropy_fn(q))

    def entropy_gradient(self, q) -> np.ndarray:
        q = self.check_admissible(q)
        if self.kind in _DIAG_KINDS:
            return self.charges / q
        if self.kind == "vdw":
            a, b = self.params["a"], self.params["b"]
            pu, pv = self.charges
            u, v = q
            big_a = u + a / v
            big_b = v - b
            return np.array([pu / big_a, -a * pu / (big_a * v * v) + pv / big_b])
        grad = np.empty(self.dim)
        for i in range(self.dim):
            h = 1e-6 * max(1.0, abs(q[i]))
            qp = q.copy()
            qm = q.copy()
            qp[i] += h
            qm[i] -= h
            grad[i] = (self.entropy(qp) - self.entropy(qm)) / (2.0 * h)
        return grad

    def state(self, q) -> PhaseState:
        """On-shell phase state at ``q`` (momenta from the equations of state)."""
        return PhaseState(q=np.asarray(q, dtype=float), p=on_shell_momenta(self, q))


# ---------------------------------------------------------------------------
# factories


def _resolve_scale(value, charges: np.ndarray, which: str) -> float:
    if isinstance(value, str):
        token = value.strip()
        if token == "Pu":
            return float(charges[0])
        if token == "Pv":
            return float(charges[1])
        raise ConfigError(f"{which}: unknown scale token {value!r} (expected 'Pu' or 'Pv')")
    value = float(value)
    if value <= 0.0:
        raise ConfigError(f"{which} must be positive, got {value}")
    return value


def _check_gas_params(f: float, k_b: float, a: float = 0.0, b: float = 0.0):
    if not f >= 1.0:
        raise ConfigError(f"degrees of freedom f must be >= 1, got {f}")
    if not k_b > 0.0:
        raise ConfigError(f"k_B must be positive, got {k_b}")
    if a < 0.0 or b < 0.0:
        raise ConfigError(f"van der Waals constants must be nonnegative, got a={a}, b={b}")


def ideal_gas(f=3.0, k_B=1.0, alpha2="Pu", beta2="Pv", reference_state=(1.0, 1.0)) -> VielbeinModel:
    """Ideal gas: equipartition ``u = (f/2) k_B T`` and state equation ``P v = k_B T``.

    Charges are ``(f k_B / 2, k_B)``; the default symbolic scales resolve to
    them, which selects the constant-pressure flow.
    """
    _check_gas_params(f, k_B)
    charges = np.array([0.5 * f * k_B, k_B])
    eta = DiagonalScale.pair(
        _resolve_scale(alpha2, charges, "alpha2"), _resolve_scale(beta2, charges, "beta2")
    )
    vielbein = VielbeinField(dim=2, matrix_fn=lambda q: np.diag(q), name="ideal")
    return VielbeinModel(
        name="ideal",
        kind="ideal",
        dim=2,
        vielbein=vielbein,
        eta=eta,
        charges=charges,
        reference_state=reference_state,
        params={"f": float(f), "k_B": float(k_B)},
    )


def vdw_gas(
    f=3.0, k_B=1.0, a=0.0, b=0.0, alpha2="Pu", beta2="Pv", reference_state=(1.0, 1.0)
) -> VielbeinModel:
    """Van der Waals gas ``(P + a/v^2)(v - b) = k_B T`` with ``u + a/v = (f/2) k_B T``.

    Reduces to :func:`ideal_gas` when ``a = b = 0``.  Admissible states have
    ``v > b`` and ``u + a/v > 0``.
    """
    _check_gas_params(f, k_B, a, b)
    charges = np.array([0.5 * f * k_B, k_B])
    eta = DiagonalScale.pair(
        _resolve_scale(alpha2, charges, "alpha2"), _resolve_scale(beta2, charges, "beta2")
    )
    a = float(a)
    b = float(b)

    def matrix_fn(q):
        u, v = q
        return np.array([[u + a / v, 0.0], [(a / (v * v)) * (v - b), v - b]])

    return VielbeinModel(
        name="vdw",
        kind="vdw",
        dim=2,
        vielbein=VielbeinField(dim=2, matrix_fn=matrix_fn, name="vdw"),
        eta=eta,
        charges=charges,
        reference_state=reference_state,
        params={"f": float(f), "k_B": float(k_B), "a": a, "b": b},
    )


def log_affine(P, reference_state=None) -> VielbeinModel:
    """m-dimensional family with characteristic function ``sum_i P_i ln q_i``.

    Momenta are ``p_i = P_i / q_i``, the metric is ``g_ii = P_i / q_i^2``,
    and the conserved energy is ``sqrt(sum_i P_i)``.  ``P = (1, ..., 1)``
    gives the Boumuki-Noda dually-flat potential.
    """
    charges = np.array(P, dtype=float)
    if charges.ndim != 1 or charges.size < 1:
        raise ConfigError("P must be a nonempty vector")
    if not np.all(np.isfinite(charges)) or np.any(charges <= 0.0):
        raise ConfigError(f"P entries must be positive, got {charges.tolist()}")
    m = charges.size
    if reference_state is None:
        reference_state = np.ones(m)
    return VielbeinModel(
        name="log_affine",
        kind="log_affine",
        dim=m,
        vielbein=VielbeinField(dim=m, matrix_fn=lambda q: np.diag(q), name="log_affine"),
        eta=DiagonalScale(charges.copy()),
        charges=charges,
        reference_state=reference_state,
        params={},
    )


def custom_model(
    name,
    dim,
    vielbein,
    eta,
    charges,
    entropy=None,
    reference_state=None,
    admissible=None,
) -> VielbeinModel:
    """Wrap a user-supplied vielbein field as a model.

    Closed forms are unknown for such models: flows integrate the Hamilton
    equations directly with finite-difference metric derivatives, and the
    characteristic-function operations raise
    :class:`~igflow.errors.UnsupportedModelError`.
    """
    if not isinstance(vielbein, VielbeinField):
        vielbein = VielbeinField(dim=dim, matrix_fn=vielbein, name=name)
    if not isinstance(eta, DiagonalScale):
        eta = DiagonalScale(np.asarray(eta, dtype=float))
    if reference_state is None:
        reference_state = np.ones(dim)
    return VielbeinModel(
        name=name,
        kind="custom",
        dim=dim,
        vielbein=vielbein,
        eta=eta,
        charges=np.asarray(charges, dtype=float),
        reference_state=reference_state,
        entropy_fn=entropy,
        admissible_fn=admissible,
    )


# ---------------------------------------------------------------------------
# operations


def on_shell_momenta(model: VielbeinModel, q) -> np.ndarray:
    """Momenta from the equations of state: solve ``e(q) . p = r``."""
    q = model.check_admissible(q)
    e = model.vielbein.at(q)
    return np.linalg.solve(e, model.charges)


def is_on_shell(model: VielbeinModel, state: PhaseState, rtol: float = 1e-8) -> bool:
    e = model.vielbein.at(np.asarray(state.q, dtype=float))
    defect = e @ state.p - model.charges
    return bool(np.max(np.abs(defect)) <= rtol * max(1.0, float(np.max(np.abs(model.charges)))))


def characteristic_w(model: VielbeinModel, q, P=None) -> float:
    """Characteristic function ``W`` of the built-in families.

    ``sum_i P_i ln q_i`` for the diagonal families and
    ``P_u ln(u + a/v) + P_v ln(v - b)`` for the van der Waals gas; the
    constant of integration is zero.  ``P`` defaults to the model charges.
    """
    q = model.check_admissible(q)
    P = model.charges if P is None else np.asarray(P, dtype=float)
    if model.kind in _DIAG_KINDS:
        return float(np.dot(P, np.log(q)))
    if model.kind == "vdw":
        a, b = model.params["a"], model.params["b"]
        return float(P[0] * np.log(q[0] + a / q[1]) + P[1] * np.log(q[1] - b))
    raise UnsupportedModelError(f"no closed-form characteristic function for {model.name!r}")


def closed_form_state(model: VielbeinModel, q0, tau: float, tau0: float = 0.0) -> np.ndarray:
    """Coordinates after flowing for ``tau - tau0`` along the Hamilton flow.

    Diagonal families: ``q_i = q0_i exp(r_i (tau - tau0) / (s_i E))``.  Van
    der Waals: ``v`` first via ``v = b + (v0 - b) exp(P_v dtau / (beta2 E))``,
    then ``u = -a/v + (u0 + a/v0) exp(P_u dtau / (alpha2 E))``.
    """
    q0 = model.check_admissible(q0)
    dtau = float(tau) - float(tau0)
    energy = model.energy
    if model.kind in _DIAG_KINDS:
        return q0 * np.exp(model.charges * dtau / (model.eta.values * energy))
    if model.kind == "vdw":
        a, b = model.params["a"], model.params["b"]
        pu, pv = model.charges
        u0, v0 = q0
        v = b + (v0 - b) * np.exp(pv * dtau / (model.eta.beta2 * energy))
        u = -a / v + (u0 + a / v0) * np.exp(pu * dtau / (model.eta.alpha2 * energy))
        return np.array([u, v])
    raise UnsupportedModelError(f"no closed-form trajectory for {model.name!r}")


def mathieu_forward(a: float, b: float, state: PhaseState) -> PhaseState:
    """Canonical map taking the van der Waals gas onto the ideal gas.

    ``u~ = u + a/v``, ``v~ = v - b``, ``1/T~ = 1/T`` and
    ``P~/T~ = P/T + (a/v^2)(1/T)``; it preserves the one-form ``p . dq``.
    """
    u, v = state.q
    if not v > b:
        raise DomainError(f"forward map needs v > b, got v={v}, b={b}")
    pu, pv = state.p
    return PhaseState(
        q=np.array([u + a / v, v - b]), p=np.array([pu, pv + (a / (v * v)) * pu])
    )


def mathieu_inverse(a: float, b: float, state: PhaseState) -> PhaseState:
    ut, vt = state.q
    if not vt > 0.0:
        raise DomainError(f"inverse map needs v~ > 0, got {vt}")
    v = vt + b
    u = ut - a / v
    put, pvt = state.p
    return PhaseState(q=np.array([u, v]), p=np.array([put, pvt - (a / (v * v)) * put]))


def one_form_pairing_defect(a: float, b: float, state: PhaseState, displacement) -> float:
    """``|p . d - p~ . (J d)|`` with the Jacobian ``J`` of the forward map
    taken by central differences; zero for a canonical one-form-preserving
    map up to the finite-difference truncation."""
    d = np.asarray(displacement, dtype=float)
    if d.shape != (2,):
        raise ConfigError("displacement must be a 2-vector")
    scale = 1e-6 / max(1.0, float(np.max(np.abs(d))))
    q = state.q

    def forward_q(qq):
        u, v = qq
        if not v > b:
            raise DomainError(f"forward map needs v > b, got v={v}")
        return np.array([u + a / v, v - b])

    jd = (forward_q(q + scale * d) - forward_q(q - scale * d)) / (2.0 * scale)
    tilde = mathieu_forward(a, b, state)
    return float(abs(np.dot(state.p, d) - np.dot(tilde.p, jd)))


def planck_potential(model: VielbeinModel, state: PhaseState) -> float:
    """Total Legendre transform of the entropy: ``s(q) - p . q``.

    For the ideal gas this is ``s - u/T - P v/T``; under the correspondence
    ``theta = -p``, ``eta = q`` it is the theta-potential dual to the
    negentropy.
    """
    return model.entropy(state.q) - float(np.dot(state.p, state.q))


def planck_potential_theta(model: VielbeinModel, theta) -> float:
    """Theta-potential as a function of ``theta = -p`` alone (diagonal families).

    Inverts ``theta_i = -r_i / q_i`` and evaluates
    ``sum_i r_i ln(q_i / q0_i) - sum_i r_i``.
    """
    if model.kind not in _DIAG_KINDS:
        raise UnsupportedModelError(
            f"theta-potential inversion needs a diagonal family, not {model.name!r}"
        )
    theta = np.asarray(theta, dtype=float)
    if np.any(theta >= 0.0):
        raise DomainError(f"theta coordinates must be negative, got {theta.tolist()}")
    q = -model.charges / theta
    return float(
        np.dot(model.charges, np.log(q / model.reference_state)) - np.sum(model.charges)
    )


def legendre_gap(model: VielbeinModel, state: PhaseState) -> float:
    """Defect of ``Psi(theta) + Psi*(eta) - theta . eta`` at one state.

    ``Psi`` is evaluated through the theta-only inversion and ``Psi* = -s``,
    so the gap measures the duality rather than restating a definition.
    """
    theta = -np.asarray(state.p, dtype=float)
    psi = planck_potential_theta(model, theta)
    psi_star = -model.entropy(state.q)
    return float(psi + psi_star - np.dot(theta, state.q))


def pressure_drift(model: VielbeinModel, state: PhaseState) -> float:
    """Drift rate along the Hamilton flow of ``P`` (ideal) or ``P + a/v^2`` (vdw).

    Equals ``(P_eff / E)(P_u / alpha2 - P_v / beta2)``; identically zero for
    the constant-pressure scale choice ``alpha2 = P_u``, ``beta2 = P_v``.
    """
    if model.kind not in ("ideal", "vdw"):
        raise UnsupportedModelError(f"pressure drift is defined for gas models, not {model.name!r}")
    pu_over_a2 = model.charges[0] / model.eta.alpha2
    pv_over_b2 = model.charges[1] / model.eta.beta2
    pressure = float(state.p[1] / state.p[0])
    if model.kind == "vdw":
        a = model.params["a"]
        v = float(state.q[1])
        pressure += a / (v * v)
    return (pressure / model.energy) * (pu_over_a2 - pv_over_b2)


def on_shell_momenta_along(model: VielbeinModel, qs: np.ndarray) -> np.ndarray:
    """On-shell momenta for every row of a sampled coordinate array."""
    qs = np.asarray(qs, dtype=float)
    if model.kind in _DIAG_KINDS:
        return model.charges[None, :] / qs
    if model.kind == "vdw":
        a, b = model.params["a"], model.params["b"]
        pu, pv = model.charges
        u = qs[:, 0]
        v = qs[:, 1]
        big_a = u + a / v
        big_b = v - b
        return np.column_stack([pu / big_a, -a * pu / (big_a * v * v) + pv / big_b])
    return np.array([on_shell_momenta(model, q) for q in qs])


def inverse_metric_quad_along(model: VielbeinModel, qs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """``g^{mu nu} p_mu p_nu`` for every sample row (vectorized for built-ins)."""
    qs = np.asarray(qs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if model.kind in _DIAG_KINDS:
        return np.sum(qs * qs * ps * ps / model.eta.values[None, :], axis=1)
    if model.kind == "vdw":
        a, b = model.params["a"], model.params["b"]
        a2, b2 = model.eta.alpha2, model.eta.beta2
        u = qs[:, 0]
        v = qs[:, 1]
        pu = ps[:, 0]
        pv = ps[:, 1]
        big_a = u + a / v
        big_b = v - b
        guu = big_a * big_a / a2 + a * a * big_b * big_b / (b2 * v**4)
        guv = a * big_b * big_b / (b2 * v * v)
        gvv = big_b * big_b / b2
        return guu * pu * pu + 2.0 * guv * pu * pv + gvv * pv * pv
    return np.array([float(p @ model.metric_at(q).g_inv @ p) for q, p in zip(qs, ps)])


def admissible_mask(model: VielbeinModel, qs: np.ndarray) -> np.ndarray:
    """Boolean admissibility of every sample row."""
    qs = np.asarray(qs, dtype=float)
    finite = np.all(np.isfinite(qs), axis=1)
    if model.kind in _DIAG_KINDS:
        return finite & np.all(qs > 0.0, axis=1)
    if model.kind == "vdw":
        a, b = model.params["a"], model.params["b"]
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (qs[:, 1] > b) & (qs[:, 0] + a / qs[:, 1] > 0.0)
        return finite & ok
    return np.array([model.admissible(q) for q in qs])


# ---------------------------------------------------------------------------
# configuration files

_CONFIG_KEYS = {
    "ideal": {"model", "f", "k_B", "alpha2", "beta2", "reference_state"},
    "vdw": {"model", "f", "k_B", "a", "b", "alpha2", "beta2", "reference_state"},
    "log_affine": {"model", "P", "reference_state"},
}


def model_from_config(cfg: Mapping) -> VielbeinModel:
    """Build a model from a configuration mapping.

    Schema: ``{"model": "ideal"|"vdw"|"log_affine", "f", "k_B", "a", "b",
    "alpha2", "beta2", "P", "reference_state"}`` with per-model applicable
    keys; unknown keys are rejected.
    """
    if not isinstance(cfg, Mapping):
        raise ConfigError("model configuration must be a JSON object")
    kind = cfg.get("model")
    if kind not in _CONFIG_KEYS:
        raise ConfigError(
            f"config 'model' must be one of {sorted(_CONFIG_KEYS)}, got {kind!r}"
        )
    unknown = set(cfg) - _CONFIG_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown config keys for model {kind!r}: {sorted(unknown)}")
    try:
        if kind == "ideal":
            return ideal_gas(
                f=cfg.get("f", 3.0),
                k_B=cfg.get("k_B", 1.0),
                alpha2=cfg.get("alpha2", "Pu"),
                beta2=cfg.get("beta2", "Pv"),
                reference_state=cfg.get("reference_state", (1.0, 1.0)),
            )
        if kind == "vdw":
            return vdw_gas(
                f=cfg.get("f", 3.0),
                k_B=cfg.get("k_B", 1.0),
                a=cfg.get("a", 0.0),
                b=cfg.get("b", 0.0),
                alpha2=cfg.get("alpha2", "Pu"),
                beta2=cfg.get("beta2", "Pv"),
                reference_state=cfg.get("reference_state", (1.0, 1.0)),
            )
        P = cfg.get("P")
        if P is None:
            raise ConfigError("log_affine config requires 'P'")
        return log_affine(P, reference_state=cfg.get("reference_state"))
    except (TypeError,) as exc:
        raise ConfigError(f"malformed model configuration: {exc}") from exc


def load_model(path) -> VielbeinModel:
    """Read a model configuration JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read model config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in model config {path}: {exc}") from exc
    return model_from_config(cfg)
