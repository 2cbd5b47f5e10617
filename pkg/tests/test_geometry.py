import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import igflow as ig
from igflow.errors import ConfigError, DomainError


def euclid_metric(_q):
    return ig.MetricAt(g=np.eye(2), g_inv=np.eye(2))


class TestMetricFromVielbein:
    def test_ideal_gas_example(self):
        # oracle: direct product eta^{ij} e_i^mu e_j^nu by hand
        e = np.diag([2.0, 1.0])
        eta = ig.DiagonalScale.pair(1.5, 1.0)
        oracle = e.T @ np.diag(1.0 / eta.values) @ e
        m = ig.metric_from_vielbein(e, eta)
        assert np.allclose(m.g_inv, oracle, atol=1e-14)
        assert m.g_inv[0, 0] == pytest.approx(8.0 / 3.0, abs=1e-14)
        assert m.g_inv[1, 1] == pytest.approx(1.0, abs=1e-14)
        assert m.g_inv[0, 1] == 0.0 and m.g_inv[1, 0] == 0.0
        assert np.allclose(m.g @ m.g_inv, np.eye(2), atol=1e-12)

    def test_identity_case(self):
        m = ig.metric_from_vielbein(np.eye(3), ig.DiagonalScale(np.ones(3)))
        assert np.allclose(m.g, np.eye(3), atol=1e-15)
        assert np.allclose(m.g_inv, np.eye(3), atol=1e-15)

    def test_vdw_off_diagonal(self, vdw):
        e = vdw.vielbein.at(np.array([2.0, 1.0]))
        eta = ig.DiagonalScale.pair(1.0, 1.0)
        oracle = e.T @ np.diag(1.0 / eta.values) @ e
        m = ig.metric_from_vielbein(e, eta)
        assert np.allclose(m.g_inv, oracle, atol=1e-13)
        # a (v-b)^2 / (beta^2 v^2) at u=2, v=1, a=0.5, b=0.1
        assert m.g_inv[0, 1] == pytest.approx(0.405, abs=1e-14)

    def test_singular_vielbein_names_state(self):
        field = ig.VielbeinField(dim=2, matrix_fn=lambda q: np.diag([q[0], 0.0]))
        with pytest.raises(DomainError, match=r"singular.*\[1\.0, 1\.0\]"):
            ig.metric_at(field, ig.DiagonalScale.pair(1.0, 1.0), np.array([1.0, 1.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            ig.metric_from_vielbein(np.eye(2), ig.DiagonalScale(np.ones(3)))

    @given(
        u=st.floats(0.3, 5.0),
        v=st.floats(0.3, 5.0),
        a2=st.floats(0.25, 4.0),
        b2=st.floats(0.25, 4.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_product_identity_property(self, u, v, a2, b2):
        m = ig.metric_from_vielbein(np.diag([u, v]), ig.DiagonalScale.pair(a2, b2))
        assert np.max(np.abs(m.g @ m.g_inv - np.eye(2))) <= 1e-10


class TestEikonalResidual:
    def test_pythagorean(self):
        assert ig.eikonal_residual(np.eye(2), [3.0, 4.0], 5.0) == pytest.approx(0.0, abs=1e-12)

    def test_plain_arithmetic(self):
        assert ig.eikonal_residual(np.eye(2), [1.0, 0.0], 2.0) == pytest.approx(-3.0, abs=1e-14)

    def test_on_shell_ideal(self, ideal):
        # oracle: u^2/alpha^2 (P_u/u)^2 = P_u^2/alpha^2 cancels symbolically
        energy = math.sqrt(ideal.charges[0] + ideal.charges[1])
        for q in ([1.0, 1.0], [2.0, 3.0], [0.5, 7.0]):
            p = ig.on_shell_momenta(ideal, q)
            res = ig.eikonal_residual(ideal.metric_at(q), p, energy)
            assert abs(res) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            ig.eikonal_residual(np.eye(2), [1.0, 2.0, 3.0], 1.0)

    def test_frame_rescaling_invariance(self, ideal):
        rng = np.random.default_rng(11)
        c = rng.uniform(0.5, 2.0, size=2)
        scaled = ig.custom_model(
            name="rescaled",
            dim=2,
            vielbein=lambda q: c[:, None] * np.diag(q),
            eta=ideal.eta.values * c**2,
            charges=ideal.charges * c,
        )
        assert scaled.energy == pytest.approx(ideal.energy, rel=1e-14)
        for _ in range(10):
            q = rng.uniform(0.5, 3.0, size=2)
            p = ig.on_shell_momenta(ideal, q) * 1.3  # off shell on purpose
            r1 = ig.eikonal_residual(ideal.metric_at(q), p, ideal.energy)
            r2 = ig.eikonal_residual(scaled.metric_at(q), p, scaled.energy)
            assert abs(r1 - r2) <= 1e-12


class TestRuppeinerMetric:
    def test_ideal_gas_hessian(self, ideal):
        # oracle: Hessian of -(P_u ln u + P_v ln v) is diag(P_u/u^2, P_v/v^2)
        hess = ig.ruppeiner_metric(ideal.entropy, np.array([2.0, 1.0]))
        assert hess[0, 0] == pytest.approx(0.375, abs=1e-7)
        assert hess[1, 1] == pytest.approx(1.0, abs=1e-7)
        assert abs(hess[0, 1]) <= 1e-9

    def test_zero_entropy(self):
        hess = ig.ruppeiner_metric(lambda q: 0.0, np.array([1.0, 2.0]))
        assert np.allclose(hess, 0.0)

    def test_vdw_mixed_partial_symmetric(self, vdw):
        q = np.array([2.0, 1.0])
        hess = ig.ruppeiner_metric(vdw.entropy, q)
        assert hess[0, 1] == hess[1, 0]
        # analytic mixed partial of -s: -a P_u / (A^2 v^2) with A = u + a/v
        expect = -0.5 * 1.5 / (2.5**2 * 1.0**2)
        assert hess[0, 1] == pytest.approx(expect, abs=1e-6)

    def test_matches_vielbein_metric_constant_pressure(self, ideal):
        rng = np.random.default_rng(3)
        h = 1e-4
        for _ in range(20):
            q = rng.uniform(0.6, 3.0, size=2)
            hess = ig.ruppeiner_metric(ideal.entropy, q, h=h * np.maximum(1.0, np.abs(q)))
            tol = 10.0 * (h * max(1.0, np.max(np.abs(q)))) ** 2
            assert np.max(np.abs(hess - ideal.metric_at(q).g)) <= tol

    def test_boundary_guard(self, vdw):
        with pytest.raises(DomainError):
            ig.ruppeiner_metric(vdw.entropy, np.array([2.0, 0.1 + 1e-5]))


class TestArcLength:
    def test_single_sample_is_zero(self):
        traj = ig.Trajectory("tau", [0.0], [[1.0, 1.0]], [[1.0, 1.0]])
        assert ig.arc_length(traj, euclid_metric) == 0.0

    def test_euclidean_straight_segment(self):
        n = 200
        s = np.linspace(0.0, 1.0, n)
        qs = np.column_stack([3.0 * s, 4.0 * s])
        traj = ig.Trajectory("t", s, qs, np.zeros_like(qs))
        assert ig.arc_length(traj, euclid_metric) == pytest.approx(5.0, abs=1e-6)

    def test_equals_elapsed_tau(self, ideal):
        system = ig.HamiltonSystem.from_model(ideal)
        traj = ig.integrate_hamilton(
            system,
            ideal.state([1.0, 1.0]),
            (0.0, 1.0),
            ig.IntegratorConfig(step=1e-3, output_step=1e-2),
        )
        assert ig.arc_length(traj, ideal.metric_at) == pytest.approx(1.0, abs=1e-4)

    def test_additive_and_refining(self, ideal):
        system = ig.HamiltonSystem.from_model(ideal)

        def run(out):
            return ig.integrate_hamilton(
                system,
                ideal.state([1.0, 1.0]),
                (0.0, 1.0),
                ig.IntegratorConfig(step=1e-3, output_step=out),
            )

        traj = run(1e-2)
        mid = len(traj) // 2
        whole = ig.arc_length(traj, ideal.metric_at)
        parts = ig.arc_length(traj.restrict(0, mid + 1), ideal.metric_at) + ig.arc_length(
            traj.restrict(mid, len(traj)), ideal.metric_at
        )
        assert abs(whole - parts) <= 1e-12

        coarse = abs(ig.arc_length(run(4e-2), ideal.metric_at) - 1.0)
        fine = abs(ig.arc_length(run(1e-2), ideal.metric_at) - 1.0)
        assert fine < coarse / 3.0  # second-order refinement

    def test_metric_failure_propagates(self, vdw):
        qs = np.array([[2.0, 1.0], [2.0, -0.9]])  # segment midpoint has v < b
        traj = ig.Trajectory("tau", [0.0, 1.0], qs, np.zeros_like(qs))
        with pytest.raises(DomainError):
            ig.arc_length(traj, vdw.metric_at)


class TestValidation:
    def test_diagonal_scale_positive(self):
        with pytest.raises(ConfigError):
            ig.DiagonalScale(np.array([1.0, -2.0]))
        with pytest.raises(ConfigError):
            ig.DiagonalScale.pair(0.0, 1.0)

    def test_diagonal_scale_inverse_exact(self):
        eta = ig.DiagonalScale(np.array([0.5, 4.0, 1.25]))
        assert np.all(eta.values * eta.upper == 1.0)

    def test_vielbein_roundtrip_identity(self, vdw):
        q = np.array([2.0, 1.0])
        e = vdw.vielbein.at(q)
        assert np.max(np.abs(e @ vdw.vielbein.inverse_at(q) - np.eye(2))) <= 1e-12

    def test_metric_rejects_asymmetric(self):
        g = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(DomainError):
            ig.MetricAt(g=g, g_inv=np.linalg.inv(g))

    def test_metric_rejects_indefinite(self):
        g = np.diag([1.0, -1.0])
        with pytest.raises(DomainError):
            ig.MetricAt(g=g, g_inv=np.linalg.inv(g))
