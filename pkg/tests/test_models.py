import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import igflow as ig
from igflow.errors import ConfigError, DomainError, UnsupportedModelError


class TestIdealGas:
    def test_monatomic_charges(self):
        m = ig.ideal_gas(f=3.0, k_B=1.0)
        assert np.allclose(m.charges, [1.5, 1.0])

    def test_constant_pressure_energy(self):
        m = ig.ideal_gas(f=3.0, k_B=1.0, alpha2="Pu", beta2="Pv")
        assert m.energy == pytest.approx(math.sqrt(2.5), rel=1e-15)
        assert m.energy == pytest.approx(1.581139, abs=1e-6)

    def test_generic_scale_energy(self):
        m = ig.ideal_gas(alpha2=1.0, beta2=1.0)
        assert m.energy == pytest.approx(math.sqrt(1.5**2 + 1.0**2), rel=1e-15)

    def test_entropy_example(self):
        # oracle: independent log arithmetic, 1.5 ln 2 + 1 ln 1
        m = ig.ideal_gas(reference_state=(1.0, 1.0))
        assert m.entropy([2.0, 1.0]) == pytest.approx(1.5 * math.log(2.0), rel=1e-14)
        assert m.entropy([2.0, 1.0]) == pytest.approx(1.0397207708399179, rel=1e-12)
        assert m.entropy(m.reference_state) == 0.0

    def test_bad_parameters(self):
        with pytest.raises(ConfigError):
            ig.ideal_gas(f=0.5)
        with pytest.raises(ConfigError):
            ig.ideal_gas(k_B=0.0)
        with pytest.raises(ConfigError):
            ig.ideal_gas(alpha2=-1.0)
        with pytest.raises(ConfigError):
            ig.ideal_gas(alpha2="Px")


class TestVdwGas:
    def test_zero_constants_reduce_to_ideal(self, ideal):
        v = ig.vdw_gas(a=0.0, b=0.0)
        for q in ([1.0, 1.0], [2.0, 1.0], [0.7, 3.0]):
            q = np.array(q)
            assert np.allclose(v.vielbein.at(q), ideal.vielbein.at(q), atol=1e-15)
            assert v.entropy(q) == pytest.approx(ideal.entropy(q), abs=1e-14)
            assert np.allclose(v.metric_at(q).g, ideal.metric_at(q).g, atol=1e-13)

    def test_vielbein_example(self, vdw):
        e = vdw.vielbein.at(np.array([2.0, 1.0]))
        assert np.allclose(e, [[2.5, 0.0], [0.45, 0.9]], atol=1e-15)

    def test_entropy_example(self, vdw):
        # oracle: 1.5 ln(2.5/1.5) + ln(0.9/0.9)
        assert vdw.entropy([2.0, 1.0]) == pytest.approx(1.5 * math.log(5.0 / 3.0), rel=1e-14)
        assert vdw.entropy([2.0, 1.0]) == pytest.approx(0.7662384356489858, rel=1e-12)

    def test_domain_guard(self, vdw):
        with pytest.raises(DomainError):
            vdw.check_admissible([2.0, 0.1])
        with pytest.raises(DomainError):
            vdw.check_admissible([-3.0, 0.2])  # u + a/v < 0

    def test_charges_equal_ideal(self, vdw, ideal):
        assert np.allclose(vdw.charges, ideal.charges)


class TestLogAffine:
    def test_boumuki_noda_unit_charges(self):
        m = ig.log_affine([1.0, 1.0, 1.0])
        rng = np.random.default_rng(0)
        for _ in range(5):
            q = rng.uniform(0.3, 4.0, size=3)
            # eta-potential is -sum ln(eta_i) and eta_i = -1/theta^i
            psi_star = -m.entropy(q)
            assert psi_star == pytest.approx(-float(np.sum(np.log(q))), rel=1e-12)
            theta = -ig.on_shell_momenta(m, q)
            assert np.allclose(-1.0 / theta, q, rtol=1e-14)

    def test_single_coordinate(self):
        m = ig.log_affine([4.0])
        assert m.energy == pytest.approx(2.0, rel=1e-15)
        assert ig.on_shell_momenta(m, [2.0])[0] == pytest.approx(2.0, rel=1e-15)

    def test_matches_ideal_dynamics(self, ideal):
        m = ig.log_affine([1.5, 1.0])
        assert m.energy == pytest.approx(ideal.energy, rel=1e-15)
        for q in ([1.0, 1.0], [2.0, 0.5]):
            assert np.allclose(
                ig.closed_form_state(m, q, 0.7), ig.closed_form_state(ideal, q, 0.7), rtol=1e-14
            )
        sys_m = ig.HamiltonSystem.from_model(m)
        sys_i = ig.HamiltonSystem.from_model(ideal)
        cfg = ig.IntegratorConfig(step=1e-3, output_step=0.1)
        tm = ig.integrate_hamilton(sys_m, m.state([1.0, 1.0]), (0.0, 1.0), cfg)
        ti = ig.integrate_hamilton(sys_i, ideal.state([1.0, 1.0]), (0.0, 1.0), cfg)
        assert np.allclose(tm.qs, ti.qs, rtol=1e-12)

    def test_bad_charges(self):
        with pytest.raises(ConfigError):
            ig.log_affine([1.0, -1.0])
        with pytest.raises(ConfigError):
            ig.log_affine([])


class TestOnShellMomenta:
    def test_ideal_examples(self, ideal):
        assert np.allclose(ig.on_shell_momenta(ideal, [1.5, 1.0]), [1.0, 1.0], atol=1e-15)
        assert np.allclose(ig.on_shell_momenta(ideal, [3.0, 2.0]), [0.5, 0.5], atol=1e-15)

    def test_vdw_example(self, vdw):
        # oracle: verify e p = r after solving the state equations by hand
        p = ig.on_shell_momenta(vdw, [2.0, 1.0])
        assert p[0] == pytest.approx(0.6, rel=1e-14)
        assert p[1] == pytest.approx(1.0 / 0.9 - 0.5 * 0.6, rel=1e-14)
        e = vdw.vielbein.at(np.array([2.0, 1.0]))
        assert np.max(np.abs(e @ p - vdw.charges)) <= 1e-12

    @given(u=st.floats(0.3, 5.0), v=st.floats(0.4, 5.0))
    @settings(max_examples=60, deadline=None)
    def test_charge_identity_property(self, u, v):
        model = ig.vdw_gas(a=0.5, b=0.1)
        q = np.array([u, v + 0.1])
        p = ig.on_shell_momenta(model, q)
        defect = model.vielbein.at(q) @ p - model.charges
        assert np.max(np.abs(defect)) <= 1e-12 * max(1.0, np.max(np.abs(model.charges)))

    def test_singular_raises(self, identity_model):
        singular = ig.custom_model(
            name="bad", dim=2, vielbein=lambda q: np.zeros((2, 2)), eta=[1.0, 1.0], charges=[1.0, 1.0]
        )
        with pytest.raises(DomainError):
            ig.on_shell_momenta(singular, [1.0, 1.0])


class TestClosedFormState:
    def test_zero_elapsed(self, ideal, vdw):
        for m in (ideal, vdw):
            assert np.allclose(ig.closed_form_state(m, [2.0, 1.0], 0.0), [2.0, 1.0], atol=1e-15)

    def test_ideal_hits_e_point(self, ideal):
        energy = ideal.energy
        got = ig.closed_form_state(ideal, [1.0, 1.0], energy)
        assert np.allclose(got, [math.e, math.e], rtol=1e-14)
        # oracle: RK4 of du/dtau = u/E, dv/dtau = v/E
        samples = ig.integrate(
            lambda t, y: y / energy,
            [1.0, 1.0],
            (0.0, energy),
            ig.IntegratorConfig(step=1e-3, output_step=energy),
        )
        assert np.allclose(samples[-1][1], got, rtol=1e-10)

    def test_vdw_volume_doubling(self, vdw):
        energy = vdw.energy
        tau = energy * math.log(2.0)
        got = ig.closed_form_state(vdw, [2.0, 1.0], tau)
        assert got[1] == pytest.approx(1.9, rel=1e-14)
        # oracle: RK4 of dv/dtau = (v - b)/E
        samples = ig.integrate(
            lambda t, y: np.array([(y[0] - 0.1) / energy]),
            [1.0],
            (0.0, tau),
            ig.IntegratorConfig(step=1e-3, output_step=tau),
        )
        assert samples[-1][1][0] == pytest.approx(got[1], rel=1e-10)

    def test_custom_unsupported(self, identity_model):
        with pytest.raises(UnsupportedModelError):
            ig.closed_form_state(identity_model, [1.0, 1.0], 1.0)


class TestMathieu:
    def test_identity_at_zero_constants(self, ideal):
        state = ideal.state([2.0, 1.0])
        out = ig.mathieu_forward(0.0, 0.0, state)
        assert np.allclose(out.q, state.q) and np.allclose(out.p, state.p)

    def test_forward_example(self, vdw):
        out = ig.mathieu_forward(0.5, 0.1, vdw.state([2.0, 1.0]))
        assert np.allclose(out.q, [2.5, 0.9], atol=1e-15)

    @given(
        u=st.floats(0.5, 4.0),
        v=st.floats(0.3, 4.0),
        pu=st.floats(0.1, 2.0),
        pv=st.floats(0.1, 2.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_property(self, u, v, pu, pv):
        a, b = 0.5, 0.1
        state = ig.PhaseState(q=[u, v + b], p=[pu, pv])
        back = ig.mathieu_inverse(a, b, ig.mathieu_forward(a, b, state))
        assert np.max(np.abs(back.q - state.q)) <= 1e-12
        assert np.max(np.abs(back.p - state.p)) <= 1e-12

    def test_one_form_pairing(self, vdw):
        # oracle: finite-difference evaluation of both pairings
        rng = np.random.default_rng(5)
        for _ in range(10):
            q = np.array([rng.uniform(0.5, 3.0), rng.uniform(0.3, 3.0)])
            state = vdw.state(q)
            d = rng.uniform(-1.0, 1.0, size=2)
            assert ig.one_form_pairing_defect(0.5, 0.1, state, d) <= 1e-8

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            ig.mathieu_forward(0.5, 0.1, ig.PhaseState(q=[1.0, 0.05], p=[1.0, 1.0]))
        with pytest.raises(DomainError):
            ig.mathieu_inverse(0.5, 0.1, ig.PhaseState(q=[1.0, -0.2], p=[1.0, 1.0]))


class TestPlanckPotential:
    def test_reference_state_value(self, ideal):
        state = ideal.state([1.0, 1.0])
        assert ig.planck_potential(ideal, state) == pytest.approx(-2.5, rel=1e-14)

    def test_definition_rearranged(self, ideal):
        rng = np.random.default_rng(7)
        for _ in range(10):
            q = rng.uniform(0.5, 3.0, size=2)
            state = ideal.state(q)
            xi = ig.planck_potential(ideal, state)
            assert xi + float(np.dot(state.p, state.q)) - ideal.entropy(q) == pytest.approx(
                0.0, abs=1e-12
            )

    def test_vdw_limit(self, ideal):
        v = ig.vdw_gas(a=0.0, b=0.0)
        state_v = v.state([2.0, 1.5])
        state_i = ideal.state([2.0, 1.5])
        assert ig.planck_potential(v, state_v) == pytest.approx(
            ig.planck_potential(ideal, state_i), rel=1e-14
        )

    def test_legendre_duality(self, ideal, log2):
        rng = np.random.default_rng(9)
        for model in (ideal, log2):
            for _ in range(10):
                q = rng.uniform(0.5, 3.0, size=model.dim)
                assert abs(ig.legendre_gap(model, model.state(q))) <= 1e-10


class TestPressureDrift:
    def test_constant_pressure_choice_is_zero(self, ideal, vdw):
        assert ig.pressure_drift(ideal, ideal.state([2.0, 1.0])) == 0.0
        assert ig.pressure_drift(vdw, vdw.state([2.0, 1.0])) == 0.0

    def test_unit_scale_rate(self, ideal_unit_scales):
        state = ideal_unit_scales.state([1.5, 1.0])  # pressure is exactly 1 here
        energy = ideal_unit_scales.energy
        assert ig.pressure_drift(ideal_unit_scales, state) == pytest.approx(
            0.5 / energy, rel=1e-14
        )

    def test_rate_matches_trajectory_fd(self, ideal_unit_scales):
        # oracle: finite differences of P along an integrated flow
        model = ideal_unit_scales
        system = ig.HamiltonSystem.from_model(model)
        traj = ig.integrate_hamilton(
            system, model.state([1.5, 1.0]), (0.0, 0.5),
            ig.IntegratorConfig(step=1e-4, output_step=1e-3),
        )
        pressure = traj.ps[:, 1] / traj.ps[:, 0]
        k = len(traj) // 2
        fd = (pressure[k + 1] - pressure[k - 1]) / (traj.params[k + 1] - traj.params[k - 1])
        rate = ig.pressure_drift(model, traj.state(k))
        assert fd == pytest.approx(rate, rel=1e-6)

    def test_vdw_effective_pressure_constant(self, vdw):
        system = ig.HamiltonSystem.from_model(vdw)
        traj = ig.integrate_hamilton(
            system, vdw.state([2.0, 1.0]), (0.0, 1.0),
            ig.IntegratorConfig(step=1e-3, output_step=1e-2),
        )
        peff = traj.ps[:, 1] / traj.ps[:, 0] + 0.5 / traj.qs[:, 1] ** 2
        assert np.max(np.abs(np.diff(peff) / np.diff(traj.params))) <= 1e-6

    def test_unsupported_model(self, log2):
        with pytest.raises(UnsupportedModelError):
            ig.pressure_drift(log2, log2.state([1.0, 1.0]))


class TestModelConfig:
    def test_ideal_round_trip(self, write_config):
        path = write_config(
            {"model": "ideal", "f": 3, "k_B": 1, "alpha2": "Pu", "beta2": "Pv"}
        )
        m = ig.load_model(path)
        assert m.kind == "ideal" and m.energy == pytest.approx(math.sqrt(2.5))

    def test_vdw_round_trip(self, write_config):
        path = write_config(
            {"model": "vdw", "f": 3, "k_B": 1, "a": 0.5, "b": 0.1, "alpha2": "Pu", "beta2": "Pv"}
        )
        m = ig.load_model(path)
        assert m.kind == "vdw" and m.params["a"] == 0.5

    def test_log_affine_round_trip(self, write_config):
        m = ig.load_model(write_config({"model": "log_affine", "P": [1.0, 2.0, 3.0]}))
        assert m.dim == 3 and m.energy == pytest.approx(math.sqrt(6.0))

    def test_unknown_keys_rejected(self, write_config):
        path = write_config({"model": "ideal", "f": 3, "gamma": 1.4})
        with pytest.raises(ConfigError, match="gamma"):
            ig.load_model(path)

    def test_log_affine_needs_charges(self):
        with pytest.raises(ConfigError):
            ig.model_from_config({"model": "log_affine"})

    def test_unknown_model_kind(self):
        with pytest.raises(ConfigError):
            ig.model_from_config({"model": "bose"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ig.load_model(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            ig.load_model(path)


class TestPhaseState:
    def test_immutability(self, ideal):
        state = ideal.state([1.0, 1.0])
        with pytest.raises(ValueError):
            state.q[0] = 5.0

    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            ig.PhaseState(q=[1.0, 2.0], p=[1.0])

    def test_vector_round_trip(self):
        state = ig.PhaseState(q=[1.0, 2.0], p=[3.0, 4.0])
        again = ig.PhaseState.from_vector(state.as_vector())
        assert np.allclose(again.q, state.q) and np.allclose(again.p, state.p)
