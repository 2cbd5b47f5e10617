import math

import numpy as np
import pytest

import igflow as ig
from igflow.errors import ConfigError, DomainError


class TestThetaFlow:
    def test_fixed_point_at_origin(self):
        assert np.allclose(ig.theta_flow_rhs([0.0, 0.0]), [0.0, 0.0])

    def test_negation(self):
        assert np.allclose(ig.theta_flow_rhs([-1.5, -1.0]), [1.5, 1.0])

    def test_exact_exponential_solution(self):
        theta0 = np.array([-2.0, -4.0])
        out = ig.integrate(
            lambda t, y: ig.theta_flow_rhs(y),
            theta0,
            (0.0, math.log(2.0)),
            ig.IntegratorConfig(step=1e-3, output_step=1.0),
        )
        assert np.allclose(out[-1][1], [-1.0, -2.0], atol=1e-9)


class TestEtaFlowRhs:
    def test_ideal_constant_pressure(self, ideal):
        assert np.allclose(ig.eta_flow_rhs(ideal, [2.0, 3.0]), [2.0, 3.0], rtol=1e-13)

    def test_vdw_volume_component(self, vdw):
        # oracle: matrix product g^{v mu} ds/dq^mu evaluated directly
        q = np.array([2.0, 1.0])
        oracle = vdw.metric_at(q).g_inv @ vdw.entropy_gradient(q)
        rhs = ig.eta_flow_rhs(vdw, q)
        assert np.allclose(rhs, oracle, rtol=1e-14)
        assert rhs[1] == pytest.approx(0.9, rel=1e-13)

    def test_vdw_zero_constants_reduces_to_ideal(self, ideal):
        v0 = ig.vdw_gas(a=0.0, b=0.0)
        for q in ([1.0, 1.0], [2.0, 0.7]):
            assert np.allclose(ig.eta_flow_rhs(v0, q), ig.eta_flow_rhs(ideal, q), rtol=1e-12)

    def test_log_affine_no_interior_fixed_point(self, log2):
        for u in np.linspace(0.2, 3.0, 7):
            for v in np.linspace(0.2, 3.0, 7):
                assert np.linalg.norm(ig.eta_flow_rhs(log2, [u, v])) > 0.0

    def test_domain_guard(self, vdw):
        with pytest.raises(DomainError):
            ig.eta_flow_rhs(vdw, [1.0, 0.05])


class TestIntegrateGradientFlow:
    def test_zero_span(self, ideal):
        traj = ig.integrate_gradient_flow(ideal, [1.0, 1.0], (0.0, 0.0))
        assert len(traj) == 1 and traj.parameter_kind == "t"

    def test_ideal_exact_exponential(self, ideal):
        traj = ig.integrate_gradient_flow(
            ideal, [1.0, 1.0], (0.0, math.log(2.0)),
            ig.IntegratorConfig(step=1e-3, output_step=1.0),
        )
        assert np.max(np.abs(traj.qs[-1] - 2.0)) <= 1e-8

    def test_vdw_matches_closed_form_via_reparametrization(self, vdw):
        energy = vdw.energy
        traj = ig.integrate_gradient_flow(
            vdw, [2.0, 1.0], (0.0, 1.0), ig.IntegratorConfig(step=1e-3, output_step=0.1)
        )
        for k in range(len(traj)):
            expect = ig.closed_form_state(vdw, [2.0, 1.0], energy * traj.params[k])
            assert np.max(np.abs(traj.qs[k] - expect) / expect) <= 1e-7

    def test_samples_are_on_shell(self, vdw):
        traj = ig.integrate_gradient_flow(
            vdw, [2.0, 1.0], (0.0, 1.0), ig.IntegratorConfig(step=1e-3, output_step=0.2)
        )
        for k in range(len(traj)):
            defect = vdw.vielbein.at(traj.qs[k]) @ traj.ps[k] - vdw.charges
            assert np.max(np.abs(defect)) <= 1e-12

    def test_entropy_increases(self, log2):
        traj = ig.integrate_gradient_flow(
            log2, [0.5, 2.0], (0.0, 2.0), ig.IntegratorConfig(step=1e-3, output_step=0.05)
        )
        s_vals = np.array([log2.entropy(q) for q in traj.qs])
        assert np.all(np.diff(s_vals) > 0.0)

    def test_entropy_rate_constant_pressure(self, ideal):
        traj = ig.integrate_gradient_flow(
            ideal, [1.0, 1.0], (0.0, 2.0), ig.IntegratorConfig(step=1e-3, output_step=0.02)
        )
        ds = np.array([ideal.entropy(q) for q in traj.qs])
        expect = ideal.energy**2 * (traj.params - traj.params[0])
        assert np.max(np.abs(ds - expect)) <= 1e-6


class TestReparametrize:
    def test_unit_energy_identity(self, ideal):
        traj = ig.integrate_gradient_flow(ideal, [1.0, 1.0], (0.0, 1.0))
        out = ig.reparametrize(traj, 1.0)
        assert out.parameter_kind == "tau"
        assert np.array_equal(out.params, traj.params)

    def test_round_trip(self, ideal):
        traj = ig.integrate_gradient_flow(ideal, [1.0, 1.0], (0.0, 1.0))
        back = ig.reparametrize(ig.reparametrize(traj, ideal.energy), ideal.energy)
        assert back.parameter_kind == "t"
        assert np.allclose(back.params, traj.params, rtol=1e-14, atol=0.0)
        assert np.array_equal(back.qs, traj.qs)

    @pytest.mark.parametrize("kind", ["ideal", "vdw", "log_affine"])
    def test_matches_hamilton_flow(self, kind, ideal, vdw, log2):
        model = {"ideal": ideal, "vdw": vdw, "log_affine": log2}[kind]
        q0 = [2.0, 1.0] if kind == "vdw" else [1.0, 1.0]
        energy = model.energy
        gtraj = ig.integrate_gradient_flow(
            model, q0, (0.0, 1.0), ig.IntegratorConfig(step=1e-3, output_step=1e-2)
        )
        htraj = ig.integrate_hamilton(
            ig.HamiltonSystem.from_model(model),
            model.state(q0),
            (0.0, energy),
            ig.IntegratorConfig(step=1e-3 * energy, output_step=1e-2 * energy),
        )
        re = ig.reparametrize(gtraj, energy)
        assert len(re) == len(htraj)
        assert np.max(np.abs(re.params - htraj.params)) <= 1e-9 * max(1.0, energy)
        assert np.max(np.abs(re.qs - htraj.qs) / np.abs(htraj.qs)) <= 1e-7

    def test_invalid_energy(self, ideal):
        traj = ig.integrate_gradient_flow(ideal, [1.0, 1.0], (0.0, 0.5))
        with pytest.raises(ConfigError):
            ig.reparametrize(traj, 0.0)


class TestTemperatureDictionary:
    def test_identity_at_zero(self):
        assert ig.temperature_of_t(2.5, 0.0) == 2.5

    def test_log_map(self):
        assert ig.t_of_beta(1.0) == 0.0
        assert ig.t_of_beta(math.exp(-1.0)) == pytest.approx(1.0, rel=1e-14)
        assert ig.beta_of_t(ig.t_of_beta(0.37)) == pytest.approx(0.37, rel=1e-14)

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            ig.temperature_of_t(0.0, 1.0)
        with pytest.raises(DomainError):
            ig.t_of_beta(-1.0)

    def test_temperature_tracks_flow(self, ideal):
        # on-shell temperature u(t)/P_u rises like e^t along the flow
        traj = ig.integrate_gradient_flow(
            ideal, [1.5, 1.0], (0.0, 2.0), ig.IntegratorConfig(step=1e-3, output_step=0.05)
        )
        temps = 1.0 / traj.ps[:, 0]
        for k in range(len(traj)):
            expect = ig.temperature_of_t(temps[0], traj.params[k])
            assert temps[k] == pytest.approx(expect, rel=1e-8)

    def test_theta_coordinates_decay(self, ideal):
        traj = ig.integrate_gradient_flow(
            ideal, [1.0, 1.0], (0.0, 3.0), ig.IntegratorConfig(step=1e-3, output_step=0.1)
        )
        theta = -traj.ps
        expect = theta[0][None, :] * np.exp(-traj.params)[:, None]
        assert np.max(np.abs(theta - expect) / np.abs(expect)) <= 1e-7
