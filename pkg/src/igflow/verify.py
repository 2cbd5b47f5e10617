"""Named invariant checks with measured residuals against tolerances.

Every identity the library claims is re-measured here numerically: metric
consistency, on-shell eikonal defects, closed-form trajectory agreement, the
``dtau = E dt`` equivalence of gradient and Hamilton flows, canonical-map
conjugacy, and the discrete-ensemble flow identities.  ``run_suite`` returns
a deterministic report (fixed seed) whose pass flags are exactly
``residual <= tolerance``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import discrete as dsc
from . import gradient as grad
from . import hamilton as ham
from . import models
from .errors import ConfigError
from .geometry import arc_length, eikonal_residual, ruppeiner_metric
from .integrate import IntegratorConfig

_SUITES = ("all", "geometry", "flows", "discrete")

DEFAULT_TOLERANCES = {
    "geometry.arc_length_additivity": 1e-12,
    "geometry.arc_length_equals_tau": 1e-4,
    "geometry.eikonal_on_shell": 1e-10,
    "geometry.frame_rescaling_invariance": 1e-10,
    "geometry.metric_product_identity": 1e-10,
    "geometry.ruppeiner_matches_vielbein": 1e-5,
    "flows.beta_reproduces_trajectory": 1e-8,
    "flows.charge_conservation": 1e-8,
    "flows.closed_form_ideal": 1e-8,
    "flows.closed_form_vdw": 1e-7,
    "flows.dW_equals_E_dtau": 1e-8,
    "flows.energy_conservation": 1e-8,
    "flows.entropy_growth": 0.0,
    "flows.entropy_vs_t": 1e-6,
    "flows.entropy_vs_tau": 1e-6,
    "flows.generating_function_stationary": 1e-8,
    "flows.gradient_matches_hamilton": 1e-6,
    "flows.legendre_duality": 1e-10,
    "flows.mathieu_conjugacy": 1e-6,
    "flows.mathieu_one_form": 1e-8,
    "flows.momentum_from_W": 1e-8,
    "flows.null_lagrangian": 1e-10,
    "flows.planck_identity": 1e-10,
    "flows.pressure_constant_ideal": 1e-6,
    "flows.pressure_constant_vdw": 1e-6,
    "flows.pressure_drift_rate": 1e-4,
    "flows.temperature_dictionary": 1e-8,
    "flows.theta_linearity": 1e-7,
    "flows.unit_speed": 1e-8,
    "discrete.association_double_exponential": 1e-10,
    "discrete.canonical_flow_residual": 1e-10,
    "discrete.energy_matches_dlnZ": 1e-6,
    "discrete.flow_matches_closed_form": 1e-6,
    "discrete.gompertz_pointwise": 1e-12,
    "discrete.gompertz_rule_fd": 1e-8,
    "discrete.kl_monotone": 0.0,
    "discrete.normalization": 1e-10,
    "discrete.potential_identity": 1e-10,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool


@dataclass
class VerificationReport:
    checks: list[CheckResult]
    config: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return len(self.checks)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def all_passed(self) -> bool:
        return self.passed == self.total

    def to_json_dict(self) -> dict:
        return {
            "checks": [
                {
                    "name": c.name,
                    "anchor": c.anchor,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "pass": c.passed,
                }
                for c in self.checks
            ],
            "summary": {"passed": self.passed, "total": self.total},
            "config": self.config,
        }


@dataclass
class _Context:
    model: models.VielbeinModel
    system: ham.HamiltonSystem
    seed: int
    ideal: models.VielbeinModel
    vdw: models.VielbeinModel
    log2: models.VielbeinModel
    cache: dict = field(default_factory=dict)

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def cached(self, key, build):
        if key not in self.cache:
            self.cache[key] = build()
        return self.cache[key]

    # shared trajectories -------------------------------------------------

    def ideal_traj(self):
        return self.cached(
            "ideal_traj",
            lambda: ham.integrate_hamilton(
                ham.HamiltonSystem.from_model(self.ideal),
                self.ideal.state([1.0, 1.0]),
                (0.0, 2.0),
                IntegratorConfig(step=1e-3, output_step=2e-2),
            ),
        )

    def vdw_traj(self):
        return self.cached(
            "vdw_traj",
            lambda: ham.integrate_hamilton(
                ham.HamiltonSystem.from_model(self.vdw),
                self.vdw.state([2.0, 1.0]),
                (0.0, 1.0),
                IntegratorConfig(step=1e-3, output_step=1e-2),
            ),
        )

    def ideal_grad(self):
        return self.cached(
            "ideal_grad",
            lambda: grad.integrate_gradient_flow(
                self.ideal,
                [1.5, 1.0],
                (0.0, 3.0),
                IntegratorConfig(step=1e-3, output_step=3e-2),
            ),
        )

    def discrete_runs(self):
        def build():
            rng = self.rng(300)
            runs = []
            for _ in range(10):
                n = int(rng.integers(2, 9))
                q0 = _random_distribution(rng, n)
                q2 = _random_distribution(rng, n)
                ends = dsc.FlowEndpoints(q0=q0, q2=q2)
                samples = dsc.integrate_discrete_flow(
                    ends, (0.0, 5.0), IntegratorConfig(step=1e-3, output_step=5e-2)
                )
                runs.append((ends, samples))
            return runs

        return self.cached("discrete_runs", build)


def _random_distribution(rng, n):
    q = 0.05 + rng.random(n)
    return q / q.sum()


def _random_gas_states(model, rng, count, lo=0.6, hi=3.0):
    qs = []
    b = model.params.get("b", 0.0) if model.kind == "vdw" else 0.0
    while len(qs) < count:
        q = rng.uniform(lo, hi, size=model.dim)
        if model.kind == "vdw":
            q[1] += b
        if model.admissible(q):
            qs.append(q)
    return qs


def _builtin_set(ctx: _Context):
    out = [ctx.ideal, ctx.vdw, ctx.log2]
    if ctx.model.kind in models._BUILTIN_KINDS and ctx.model not in out:
        out.insert(0, ctx.model)
    return out


# ---------------------------------------------------------------------------
# geometry checks


def _check_metric_product(ctx):
    worst = 0.0
    rng = ctx.rng(1)
    for model in _builtin_set(ctx) + ([ctx.model] if ctx.model.kind == "custom" else []):
        eye = np.eye(model.dim)
        for q in _random_gas_states(model, rng, 20):
            m = model.metric_at(q)
            worst = max(worst, float(np.max(np.abs(m.g @ m.g_inv - eye))))
    return worst


def _check_ruppeiner(ctx):
    rng = ctx.rng(2)
    worst = 0.0
    for q in _random_gas_states(ctx.ideal, rng, 20):
        hess = ruppeiner_metric(ctx.ideal.entropy, q)
        worst = max(worst, float(np.max(np.abs(hess - ctx.ideal.metric_at(q).g))))
    return worst


def _check_eikonal_on_shell(ctx):
    rng = ctx.rng(3)
    worst = 0.0
    for model in _builtin_set(ctx):
        energy = model.energy
        for q in _random_gas_states(model, rng, 10):
            p = models.on_shell_momenta(model, q)
            worst = max(worst, abs(eikonal_residual(model.metric_at(q), p, energy)))
    return worst


def _check_frame_rescaling(ctx):
    rng = ctx.rng(4)
    worst = 0.0
    for base in (ctx.ideal, ctx.vdw):
        c = rng.uniform(0.5, 2.0, size=base.dim)
        scaled = models.custom_model(
            name=base.name + "-rescaled",
            dim=base.dim,
            vielbein=lambda q, base=base, c=c: c[:, None] * base.vielbein.at(q),
            eta=base.eta.values * c**2,
            charges=base.charges * c,
            admissible=base.admissible,
        )
        for q in _random_gas_states(base, rng, 10):
            p = models.on_shell_momenta(base, q) * 1.1  # deliberately off shell
            r1 = eikonal_residual(base.metric_at(q), p, base.energy)
            r2 = eikonal_residual(scaled.metric_at(q), p, scaled.energy)
            worst = max(worst, abs(r1 - r2))
    return worst


def _check_arc_length(ctx):
    traj = ctx.cached(
        "ideal_arc_traj",
        lambda: ham.integrate_hamilton(
            ham.HamiltonSystem.from_model(ctx.ideal),
            ctx.ideal.state([1.0, 1.0]),
            (0.0, 1.0),
            IntegratorConfig(step=1e-3, output_step=1e-2),
        ),
    )
    length = arc_length(traj, ctx.ideal.metric_at)
    return abs(length - 1.0)


def _check_arc_additivity(ctx):
    traj = ctx.ideal_traj()
    mid = len(traj) // 2
    whole = arc_length(traj, ctx.ideal.metric_at)
    split = arc_length(traj.restrict(0, mid + 1), ctx.ideal.metric_at) + arc_length(
        traj.restrict(mid, len(traj)), ctx.ideal.metric_at
    )
    return abs(whole - split)


# ---------------------------------------------------------------------------
# flow checks


def _check_closed_form_ideal(ctx):
    traj = ctx.ideal_traj()
    worst = 0.0
    for k in (len(traj) // 2, len(traj) - 1):
        expect = models.closed_form_state(ctx.ideal, traj.qs[0], traj.params[k])
        worst = max(worst, float(np.max(np.abs(traj.qs[k] - expect) / np.abs(expect))))
    return worst


def _check_energy_conservation(ctx):
    worst = 0.0
    for traj, model in ((ctx.ideal_traj(), ctx.ideal), (ctx.vdw_traj(), ctx.vdw)):
        energy = traj.metadata["E"]
        h_vals = np.sqrt(traj.eikonal_residuals + energy**2)
        worst = max(worst, float(np.max(np.abs(h_vals - energy) / energy)))
    return worst


def _check_closed_form_vdw(ctx):
    traj = ctx.vdw_traj()
    worst = 0.0
    for k in range(1, len(traj)):
        expect = models.closed_form_state(ctx.vdw, traj.qs[0], traj.params[k])
        worst = max(worst, float(np.max(np.abs(traj.qs[k] - expect) / np.abs(expect))))
    return worst


def _equivalence_residual(model, system, t_end=3.0):
    """Sup-norm mismatch between the reparametrized gradient flow and the
    Hamilton flow.  The gradient trajectory is dilated by the model's own
    conserved energy, so a system whose cached ``E`` no longer matches the
    model (a corrupted-metric fixture) fails here."""
    q0 = {"ideal": [1.0, 1.0], "vdw": [2.0, 1.0]}.get(model.kind, model.reference_state)
    gtraj = grad.integrate_gradient_flow(
        model, q0, (0.0, t_end), IntegratorConfig(step=1e-3, output_step=t_end / 100.0)
    )
    htraj = ham.integrate_hamilton(
        system,
        model.state(q0),
        (0.0, t_end * system.E),
        IntegratorConfig(step=1e-3 * system.E, output_step=t_end * system.E / 100.0),
    )
    re = grad.reparametrize(gtraj, model.energy)
    if len(re) != len(htraj):
        return math.inf
    if float(np.max(np.abs(re.params - htraj.params))) > 1e-6 * max(1.0, system.E * t_end):
        return math.inf
    return float(np.max(np.abs(re.qs - htraj.qs) / np.maximum(np.abs(htraj.qs), 1e-30)))


def _same_model(a, b):
    return (
        a.kind == b.kind
        and a.eta.values.shape == b.eta.values.shape
        and np.array_equal(a.eta.values, b.eta.values)
        and np.array_equal(a.charges, b.charges)
    )


def _check_gradient_matches_hamilton(ctx):
    worst = 0.0
    skip_user = ctx.model.kind == "custom" and ctx.model.entropy_fn is None
    if not skip_user:
        worst = _equivalence_residual(
            ctx.model, ctx.system, t_end=1.0 if ctx.model.kind == "custom" else 3.0
        )
    for model in (ctx.ideal, ctx.vdw, ctx.log2):
        if _same_model(model, ctx.model):
            continue
        worst = max(worst, _equivalence_residual(model, ham.HamiltonSystem.from_model(model)))
    return worst


def _check_pressure_constant_ideal(ctx):
    traj = ctx.ideal_traj()
    pressure = traj.ps[:, 1] / traj.ps[:, 0]
    return float(np.max(np.abs(pressure - pressure[0]) / abs(pressure[0])))


def _check_pressure_constant_vdw(ctx):
    traj = ctx.vdw_traj()
    a = ctx.vdw.params["a"]
    peff = traj.ps[:, 1] / traj.ps[:, 0] + a / traj.qs[:, 1] ** 2
    return float(np.max(np.abs(peff - peff[0]) / abs(peff[0])))


def _check_pressure_drift_rate(ctx):
    model = models.ideal_gas(f=3.0, k_B=1.0, alpha2=1.0, beta2=1.0)
    traj = ham.integrate_hamilton(
        ham.HamiltonSystem.from_model(model),
        model.state([1.5, 1.0]),
        (0.0, 1.0),
        IntegratorConfig(step=1e-4, output_step=1e-3),
    )
    pressure = traj.ps[:, 1] / traj.ps[:, 0]
    worst = 0.0
    for k in range(1, len(traj) - 1):
        fd = (pressure[k + 1] - pressure[k - 1]) / (traj.params[k + 1] - traj.params[k - 1])
        rate = models.pressure_drift(model, traj.state(k))
        worst = max(worst, abs(fd - rate) / abs(rate))
    return worst


def _check_mathieu_conjugacy(ctx):
    traj = ctx.vdw_traj()
    a, b = ctx.vdw.params["a"], ctx.vdw.params["b"]
    q0t = models.mathieu_forward(a, b, traj.first_state).q
    worst = 0.0
    for k in range(len(traj)):
        tilde = models.mathieu_forward(a, b, traj.state(k))
        expect_q = models.closed_form_state(ctx.ideal, q0t, traj.params[k])
        expect_p = models.on_shell_momenta(ctx.ideal, expect_q)
        worst = max(worst, float(np.max(np.abs(tilde.q - expect_q) / np.abs(expect_q))))
        worst = max(worst, float(np.max(np.abs(tilde.p - expect_p) / np.abs(expect_p))))
    return worst


def _check_mathieu_one_form(ctx):
    traj = ctx.vdw_traj()
    a, b = ctx.vdw.params["a"], ctx.vdw.params["b"]
    worst = 0.0
    for k in range(0, len(traj), 5):
        state = traj.state(k)
        for d in (np.array([1.0, 1.0]), np.array([1.0, -0.5])):
            worst = max(worst, models.one_form_pairing_defect(a, b, state, d))
    return worst


def _speed_values(model, traj):
    energy = traj.metadata["E"]
    vals = []
    for k in range(len(traj)):
        m = model.metric_at(traj.qs[k])
        dq = m.g_inv @ traj.ps[k] / energy
        vals.append(float(dq @ m.g @ dq))
    return np.array(vals)


def _check_unit_speed(ctx):
    worst = 0.0
    for traj, model in ((ctx.ideal_traj(), ctx.ideal), (ctx.vdw_traj(), ctx.vdw)):
        worst = max(worst, float(np.max(np.abs(_speed_values(model, traj) - 1.0))))
    return worst


def _check_null_lagrangian(ctx):
    worst = 0.0
    for traj, model in ((ctx.ideal_traj(), ctx.ideal), (ctx.vdw_traj(), ctx.vdw)):
        energy = traj.metadata["E"]
        for k in range(len(traj)):
            m = model.metric_at(traj.qs[k])
            p = traj.ps[k]
            dq = m.g_inv @ p / energy
            h = math.sqrt(float(p @ m.g_inv @ p))
            worst = max(worst, abs(float(np.dot(p, dq)) - h))
    return worst


def _check_entropy_vs_tau(ctx):
    traj = ctx.ideal_traj()
    energy = traj.metadata["E"]
    s0 = ctx.ideal.entropy(traj.qs[0])
    worst = 0.0
    for k in range(len(traj)):
        ds = ctx.ideal.entropy(traj.qs[k]) - s0
        worst = max(worst, abs(ds - energy * (traj.params[k] - traj.params[0])))
    return worst


def _check_entropy_vs_t(ctx):
    traj = ctx.ideal_grad()
    energy = traj.metadata["E"]
    s0 = ctx.ideal.entropy(traj.qs[0])
    worst = 0.0
    for k in range(len(traj)):
        ds = ctx.ideal.entropy(traj.qs[k]) - s0
        worst = max(worst, abs(ds - energy**2 * (traj.params[k] - traj.params[0])))
    return worst


def _check_entropy_growth(ctx):
    worst = 0.0
    for model, q0 in ((ctx.ideal, [1.0, 1.0]), (ctx.vdw, [2.0, 1.0]), (ctx.log2, [1.0, 1.0])):
        traj = grad.integrate_gradient_flow(
            model, q0, (0.0, 2.0), IntegratorConfig(step=1e-3, output_step=2e-2)
        )
        s_vals = np.array([model.entropy(q) for q in traj.qs])
        worst = max(worst, float(max(0.0, -np.min(np.diff(s_vals)))))
    return worst


def _check_charge_conservation(ctx):
    worst = 0.0
    trajs = [(ctx.ideal_traj(), ctx.ideal), (ctx.vdw_traj(), ctx.vdw)]
    log_traj = ctx.cached(
        "log2_traj",
        lambda: ham.integrate_hamilton(
            ham.HamiltonSystem.from_model(ctx.log2),
            ctx.log2.state([1.0, 1.0]),
            (0.0, 2.0),
            IntegratorConfig(step=1e-3, output_step=2e-2),
        ),
    )
    trajs.append((log_traj, ctx.log2))
    for traj, model in trajs:
        scale = max(1.0, float(np.max(np.abs(model.charges))))
        for k in range(len(traj)):
            defect = model.vielbein.at(traj.qs[k]) @ traj.ps[k] - model.charges
            worst = max(worst, float(np.max(np.abs(defect))) / scale)
    return worst


def _check_dw_along_flow(ctx):
    worst = 0.0
    for traj, model in ((ctx.ideal_traj(), ctx.ideal), (ctx.vdw_traj(), ctx.vdw)):
        energy = traj.metadata["E"]
        w0 = models.characteristic_w(model, traj.qs[0])
        for k in range(len(traj)):
            dw = models.characteristic_w(model, traj.qs[k]) - w0
            worst = max(worst, abs(dw - energy * (traj.params[k] - traj.params[0])))
    return worst


def _check_momentum_from_w(ctx):
    worst = 0.0
    for traj, model in ((ctx.ideal_traj(), ctx.ideal), (ctx.vdw_traj(), ctx.vdw)):
        for k in range(0, len(traj), 10):
            q = traj.qs[k]
            for i in range(model.dim):
                h = 1e-6 * max(1.0, abs(q[i]))
                qp = q.copy()
                qm = q.copy()
                qp[i] += h
                qm[i] -= h
                fd = (models.characteristic_w(model, qp) - models.characteristic_w(model, qm)) / (
                    2.0 * h
                )
                worst = max(worst, abs(fd - traj.ps[k][i]))
    return worst


def _check_generating_stationary(ctx):
    model = models.ideal_gas(f=3.0, k_B=1.0, alpha2=1.5, beta2=1.0)
    q0 = np.array([1.0, 1.0])
    worst = 0.0
    for tau in (0.5, 1.0, 2.0):
        q = models.closed_form_state(model, q0, tau)
        for i in range(2):
            h = 1e-6 * model.charges[i]
            pp = model.charges.copy()
            pm = model.charges.copy()
            pp[i] += h
            pm[i] -= h
            fd = (
                ham.generating_G(model, q, tau, q0, 0.0, P=pp)
                - ham.generating_G(model, q, tau, q0, 0.0, P=pm)
            ) / (2.0 * h)
            worst = max(worst, abs(fd))
    return worst


def _check_legendre(ctx):
    rng = ctx.rng(5)
    worst = 0.0
    for model in (ctx.ideal, ctx.log2):
        for q in _random_gas_states(model, rng, 10):
            worst = max(worst, abs(models.legendre_gap(model, model.state(q))))
    return worst


def _check_planck_identity(ctx):
    rng = ctx.rng(6)
    worst = 0.0
    for q in _random_gas_states(ctx.ideal, rng, 10):
        state = ctx.ideal.state(q)
        xi = models.planck_potential(ctx.ideal, state)
        worst = max(
            worst, abs(xi + float(np.dot(state.p, state.q)) - ctx.ideal.entropy(q))
        )
    return worst


def _check_theta_linearity(ctx):
    worst = 0.0
    runs = [(ctx.ideal, [1.0, 1.0], None), (ctx.log2, [1.0, 1.0], None), (ctx.vdw, [2.0, 1.0], "tilde")]
    for model, q0, mode in runs:
        traj = grad.integrate_gradient_flow(
            model, q0, (0.0, 3.0), IntegratorConfig(step=1e-3, output_step=3e-2)
        )
        if mode == "tilde":
            a, b = model.params["a"], model.params["b"]
            thetas = np.array(
                [-models.mathieu_forward(a, b, traj.state(k)).p for k in range(len(traj))]
            )
        else:
            thetas = -traj.ps
        expect = thetas[0][None, :] * np.exp(-traj.params)[:, None]
        worst = max(worst, float(np.max(np.abs(thetas - expect) / np.abs(expect))))
    return worst


def _check_temperature_dictionary(ctx):
    traj = ctx.ideal_grad()
    temps = 1.0 / traj.ps[:, 0]
    resid = np.log(temps) - np.log(temps[0]) - (traj.params - traj.params[0])
    return float(np.max(np.abs(resid)))


def _check_beta_reproduces_trajectory(ctx):
    traj = ctx.ideal_grad()
    pu, pv = ctx.ideal.charges
    t0_temp = 1.0 / traj.ps[0, 0]
    p0 = traj.ps[0, 1] / traj.ps[0, 0]
    worst = 0.0
    for k in range(len(traj)):
        beta = grad.beta_of_t(traj.params[k]) / t0_temp
        u_pred = pu / beta
        v_pred = pv / (beta * p0)
        worst = max(worst, abs(u_pred - traj.qs[k, 0]) / abs(traj.qs[k, 0]))
        worst = max(worst, abs(v_pred - traj.qs[k, 1]) / abs(traj.qs[k, 1]))
    return worst


# ---------------------------------------------------------------------------
# discrete checks


def _check_discrete_closed_form(ctx):
    worst = 0.0
    for ends, samples in ctx.discrete_runs():
        for t, q in samples:
            expect = dsc.closed_form_q(t, ends)
            worst = max(worst, float(np.max(np.abs(q - expect))))
    return worst


def _check_kl_monotone(ctx):
    worst = 0.0
    for ends, samples in ctx.discrete_runs():
        divs = np.array([dsc.kl_divergence(q, ends.q2) for _, q in samples])
        worst = max(worst, float(max(0.0, np.max(np.diff(divs)))))
    return worst


def _check_normalization(ctx):
    worst = 0.0
    for _, samples in ctx.discrete_runs():
        for _, q in samples:
            worst = max(worst, abs(float(np.sum(q)) - 1.0))
    return worst


def _check_association(ctx):
    rng = ctx.rng(7)
    t_grid = np.concatenate([np.linspace(0.0, 6.0, 25), [10.0, 20.0, 40.0]])
    worst = 0.0
    for _ in range(5):
        n = int(rng.integers(2, 7))
        levels = np.sort(rng.uniform(0.0, 3.0, size=n))
        levels += np.arange(n) * 1e-3  # keep strictly increasing
        ends = dsc.FlowEndpoints(
            q0=dsc.canonical_distribution(levels, 1.0), q2=np.full(n, 1.0 / n)
        )
        for t in t_grid:
            p = dsc.canonical_distribution(levels, math.exp(-t))
            worst = max(worst, float(np.max(np.abs(p - dsc.closed_form_q(t, ends)))))
    return worst


def _check_canonical_flow_residual(ctx):
    rng = ctx.rng(8)
    worst = 0.0
    for _ in range(3):
        n = int(rng.integers(2, 7))
        levels = np.sort(rng.uniform(0.0, 3.0, size=n)) + np.arange(n) * 1e-3
        for t in np.linspace(-1.0, 5.0, 13):
            worst = max(worst, float(np.max(np.abs(dsc.canonical_flow_residual(levels, t)))))
    return worst


def _gompertz_setup():
    ends = dsc.FlowEndpoints(q0=[0.2, 0.8], q2=[0.5, 0.5])
    ks = ends.q2
    cs = np.log(ends.q0 / ends.q2)
    return ends, ks, cs


def _check_gompertz_pointwise(ctx):
    ends, ks, cs = _gompertz_setup()
    worst = 0.0
    for t in np.linspace(0.0, 8.0, 33):
        big_q = dsc.unnormalized_flow(t, ends)
        renorm = dsc.closed_form_q(t, ends) * math.exp(dsc.flow_log_normalizer(t, ends))
        for i in range(2):
            worst = max(worst, abs(big_q[i] - float(dsc.gompertz(t, ks[i], cs[i]))))
            worst = max(worst, abs(big_q[i] - renorm[i]))
    return worst


def _check_gompertz_rule_fd(ctx):
    ends, _, _ = _gompertz_setup()
    delta = 1e-5
    worst = 0.0
    for t in np.linspace(0.0, 8.0, 33):
        qp = dsc.unnormalized_flow(t + delta, ends)
        qm = dsc.unnormalized_flow(t - delta, ends)
        q = dsc.unnormalized_flow(t, ends)
        resid = (qp - qm) / (2.0 * delta) + q * np.log(q / ends.q2)
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


def _check_potential_identity(ctx):
    rng = ctx.rng(9)
    worst = 0.0
    for _ in range(5):
        n = int(rng.integers(2, 7))
        levels = np.sort(rng.uniform(0.0, 3.0, size=n)) + np.arange(n) * 1e-3
        for beta in (0.0, 0.5, 1.0, 3.0, 10.0):
            p = dsc.canonical_distribution(levels, beta)
            lhs = float(np.dot(p, np.log(p)))
            rhs = -beta * dsc.average_energy(levels, beta) - dsc.log_partition_function(
                levels, beta
            )
            worst = max(worst, abs(lhs - rhs))
    return worst


def _check_energy_matches_dlnz(ctx):
    rng = ctx.rng(10)
    delta = 1e-4
    worst = 0.0
    for _ in range(5):
        n = int(rng.integers(2, 7))
        levels = np.sort(rng.uniform(0.0, 3.0, size=n)) + np.arange(n) * 1e-3
        for beta in (0.1, 0.5, 1.0, 2.0):
            fd = (
                dsc.log_partition_function(levels, beta + delta)
                - dsc.log_partition_function(levels, beta - delta)
            ) / (2.0 * delta)
            worst = max(worst, abs(dsc.average_energy(levels, beta) + fd))
    return worst


# ---------------------------------------------------------------------------
# registry

_CHECKS = [
    ("geometry.arc_length_additivity", "geometry", "arc(0,T) = arc(0,m) + arc(m,T)", _check_arc_additivity),
    ("geometry.arc_length_equals_tau", "geometry", "sum sqrt(dq.g.dq) = elapsed tau", _check_arc_length),
    ("geometry.eikonal_on_shell", "geometry", "g^{uv} p_u p_v = E^2 on shell", _check_eikonal_on_shell),
    ("geometry.frame_rescaling_invariance", "geometry", "residual invariant under e->c.e, r->c.r, eta->eta/c^2", _check_frame_rescaling),
    ("geometry.metric_product_identity", "geometry", "g . g_inv = identity", _check_metric_product),
    ("geometry.ruppeiner_matches_vielbein", "geometry", "Hessian(-s) = vielbein metric (constant-pressure scales)", _check_ruppeiner),
    ("flows.beta_reproduces_trajectory", "flows", "q(t) from beta = exp(-t) via the state equations", _check_beta_reproduces_trajectory),
    ("flows.charge_conservation", "flows", "e_i^mu(q) p_mu = r_i along the flow", _check_charge_conservation),
    ("flows.closed_form_ideal", "flows", "u = u0 exp(P_u dtau/(alpha^2 E)), v likewise", _check_closed_form_ideal),
    ("flows.closed_form_vdw", "flows", "v = b + (v0-b) exp(P_v dtau/(beta^2 E)); u = -a/v + (u0+a/v0) exp(P_u dtau/(alpha^2 E))", _check_closed_form_vdw),
    ("flows.dW_equals_E_dtau", "flows", "dW = E dtau along the flow", _check_dw_along_flow),
    ("flows.energy_conservation", "flows", "|H - E| / E along the flow", _check_energy_conservation),
    ("flows.entropy_growth", "flows", "ds/dt > 0 along gradient flows", _check_entropy_growth),
    ("flows.entropy_vs_t", "flows", "ds = E^2 dt (constant-pressure ideal gas)", _check_entropy_vs_t),
    ("flows.entropy_vs_tau", "flows", "ds = E dtau", _check_entropy_vs_tau),
    ("flows.generating_function_stationary", "flows", "dG/dP_i = 0 along the flow", _check_generating_stationary),
    ("flows.gradient_matches_hamilton", "flows", "dtau = E dt", _check_gradient_matches_hamilton),
    ("flows.legendre_duality", "flows", "Psi(theta) + Psi*(eta) - theta.eta = 0", _check_legendre),
    ("flows.mathieu_conjugacy", "flows", "transformed vdw flow = ideal closed form", _check_mathieu_conjugacy),
    ("flows.mathieu_one_form", "flows", "p.dq = p~.dq~", _check_mathieu_one_form),
    ("flows.momentum_from_W", "flows", "p_mu = dW/dq^mu", _check_momentum_from_w),
    ("flows.null_lagrangian", "flows", "p.dq/dtau - H = 0", _check_null_lagrangian),
    ("flows.planck_identity", "flows", "Xi = s - p.q", _check_planck_identity),
    ("flows.pressure_constant_ideal", "flows", "P constant when alpha^2=P_u, beta^2=P_v", _check_pressure_constant_ideal),
    ("flows.pressure_constant_vdw", "flows", "P + a/v^2 constant when alpha^2=P_u, beta^2=P_v", _check_pressure_constant_vdw),
    ("flows.pressure_drift_rate", "flows", "dP/dtau = (P/E)(P_u/alpha^2 - P_v/beta^2)", _check_pressure_drift_rate),
    ("flows.temperature_dictionary", "flows", "dt = d ln T", _check_temperature_dictionary),
    ("flows.theta_linearity", "flows", "theta(t) = theta(0) exp(-t)", _check_theta_linearity),
    ("flows.unit_speed", "flows", "g_{uv} (dq/dtau)^u (dq/dtau)^v = 1", _check_unit_speed),
    ("discrete.association_double_exponential", "discrete", "p_i(exp(-t)) = closed-form flow toward uniform", _check_association),
    ("discrete.canonical_flow_residual", "discrete", "d/dt ln(p_i/p0) = -(ln(p_i/p0) - sum p ln(p/p0))", _check_canonical_flow_residual),
    ("discrete.energy_matches_dlnZ", "discrete", "U = -d ln Z / d beta", _check_energy_matches_dlnz),
    ("discrete.flow_matches_closed_form", "discrete", "RK4 flow = exp(e^{-t} ln q0 + (1-e^{-t}) ln q2 - Psi)", _check_discrete_closed_form),
    ("discrete.gompertz_pointwise", "discrete", "Q(t) = K exp(c e^{-t}), K=q2, c=ln(q0/q2)", _check_gompertz_pointwise),
    ("discrete.gompertz_rule_fd", "discrete", "Q' = -Q ln(Q/q2)", _check_gompertz_rule_fd),
    ("discrete.kl_monotone", "discrete", "D(q(t)||q2) nonincreasing", _check_kl_monotone),
    ("discrete.normalization", "discrete", "sum_i q_i(t) = 1", _check_normalization),
    ("discrete.potential_identity", "discrete", "sum p ln p = -beta U - ln Z", _check_potential_identity),
]


def run_suite(
    suite: str = "all",
    model: models.VielbeinModel | None = None,
    tolerances: dict | None = None,
    seed: int = 0,
    system: ham.HamiltonSystem | None = None,
) -> VerificationReport:
    """Run a verification suite and assemble a deterministic report.

    ``model`` substitutes the subject of the model-parametric checks (the
    canonical ideal gas by default).  ``system`` optionally overrides the
    Hamilton system used for that model, which lets tests exercise
    deliberately inconsistent fixtures.  ``tolerances`` overrides defaults
    by check name; unknown names are rejected.
    """
    if suite not in _SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {_SUITES}")
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")
        for k, v in tolerances.items():
            tol[k] = float(v)
    model = model or models.ideal_gas()
    system = system or ham.HamiltonSystem.from_model(model)
    if system.model is not model:
        raise ConfigError("system override must wrap the same model under test")
    ctx = _Context(
        model=model,
        system=system,
        seed=seed,
        ideal=models.ideal_gas(),
        vdw=models.vdw_gas(a=0.5, b=0.1),
        log2=models.log_affine([1.0, 1.0]),
    )
    results = []
    for name, group, anchor, func in _CHECKS:
        if suite != "all" and group != suite:
            continue
        residual = float(func(ctx))
        results.append(
            CheckResult(
                name=name,
                anchor=anchor,
                residual=residual,
                tolerance=tol[name],
                passed=bool(residual <= tol[name]),
            )
        )
    results.sort(key=lambda c: c.name)
    return VerificationReport(
        checks=results,
        config={"suite": suite, "model": model.name, "seed": seed},
    )
