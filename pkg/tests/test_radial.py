import math

import numpy as np
import pytest

from choqlab.errors import ZeroField
from choqlab.radial import (
    RadialField,
    StatePair,
    ball_volume,
    derivative_matrix,
    dilate,
    field_from_csv,
    field_to_csv,
    grad_norm_sq,
    kinetic_form,
    l2_norm,
    make_grid,
    mass,
    normalize_mass,
)

GAUSSIAN_MASS_3D = (math.pi / 2.0) ** 1.5          # int exp(-2 r^2) over R^3
GAUSSIAN_KINETIC_3D = 3.0 * (math.pi / 2.0) ** 1.5


@pytest.fixture(scope="module")
def grid12():
    return make_grid(N=3, R=12.0, M=1024)


@pytest.fixture(scope="module")
def gaussian(grid12):
    return RadialField(grid12, np.exp(-grid12.nodes**2))


class TestGrid:
    def test_nodes_increasing_weights_positive(self, grid12):
        assert np.all(np.diff(grid12.nodes) > 0)
        assert np.all(grid12.weights > 0)
        assert grid12.nodes[0] > 0 and grid12.nodes[-1] <= 12.0

    @pytest.mark.parametrize("N,R", [(3, 12.0), (4, 16.0), (3, 1.0)])
    def test_total_weight_is_ball_volume(self, N, R):
        g = make_grid(N=N, R=R, M=512)
        assert np.sum(g.weights) == pytest.approx(ball_volume(N, R), rel=1e-8)

    @pytest.mark.parametrize("k", [0, 1, 2, 5, 11, 20])
    def test_moment_exactness(self, grid12, k):
        # composite GL16 integrates r^(k+N-1) exactly for k <= 29 at N=3
        exact = (
            2.0 * math.pi ** 1.5 / math.gamma(1.5) * 12.0 ** (k + 3) / (k + 3)
        )
        got = float(np.dot(grid12.weights, grid12.nodes**k))
        assert got == pytest.approx(exact, rel=1e-10)

    def test_grading_places_breaks_at_rational_radii(self):
        g = make_grid(N=3, R=16.0, M=1024)
        # default grading 2 with 64 panels puts an edge exactly at r=1
        assert g.panel_edges[16] == pytest.approx(1.0, abs=0)


class TestNorms:
    def test_zero_and_constant(self, grid12):
        z = RadialField(grid12, np.zeros(1024))
        assert l2_norm(z) == 0.0
        one = RadialField(grid12, np.ones(1024))
        assert l2_norm(one) == pytest.approx(
            math.sqrt(ball_volume(3, 12.0)), rel=1e-10
        )

    def test_gaussian_mass(self, gaussian):
        assert mass(gaussian) == pytest.approx(GAUSSIAN_MASS_3D, rel=1e-10)

    def test_constant_has_zero_gradient(self, grid12):
        c = RadialField(grid12, np.full(1024, 2.5))
        assert grad_norm_sq(c) == pytest.approx(0.0, abs=1e-18)

    def test_linear_field_kinetic(self):
        g = make_grid(N=3, R=1.0, M=2048)
        f = RadialField(g, g.nodes.copy())
        assert grad_norm_sq(f) == pytest.approx(4 * math.pi / 3, rel=1e-4)

    def test_gaussian_kinetic(self, gaussian):
        assert grad_norm_sq(gaussian) == pytest.approx(
            GAUSSIAN_KINETIC_3D, rel=1e-3
        )

    def test_kinetic_form_matches_direct(self, gaussian):
        G = kinetic_form(gaussian.grid)
        quad = float(gaussian.values @ (G @ gaussian.values))
        assert quad == pytest.approx(grad_norm_sq(gaussian), rel=1e-10)

    def test_derivative_exact_on_cubics(self, grid12):
        D = derivative_matrix(grid12)
        r = grid12.nodes
        # even-extension stencils reproduce even polynomials exactly;
        # interior/one-sided stencils reproduce all cubics
        got = D @ (r**2)
        assert np.allclose(got, 2 * r, rtol=1e-9, atol=1e-9 * grid12.R)


class TestNormalize:
    def test_projection_and_idempotence(self, grid12):
        rng = np.random.default_rng(7)
        u = RadialField(grid12, np.exp(-grid12.nodes**2) * 3.0)
        v = RadialField(grid12, rng.uniform(0.1, 1.0, 1024) * np.exp(-grid12.nodes))
        st = normalize_mass(StatePair(u=u, v=v, rho1=1.0, rho2=0.7))
        assert l2_norm(st.u) == pytest.approx(1.0, rel=1e-12)
        assert l2_norm(st.v) == pytest.approx(0.7, rel=1e-12)
        again = normalize_mass(st)
        # idempotent to machine precision: the second factor is 1 + O(ulp)
        assert np.allclose(again.u.values, st.u.values, rtol=1e-14, atol=0)

    def test_scaling_out_a_factor(self, grid12, gaussian):
        rho = l2_norm(gaussian)
        st = StatePair(
            u=RadialField(grid12, 2.0 * gaussian.values),
            v=gaussian,
            rho1=rho,
            rho2=rho,
        )
        out = normalize_mass(st)
        assert np.allclose(out.u.values, gaussian.values, rtol=1e-14)

    def test_zero_field_rejected(self, grid12, gaussian):
        z = RadialField(grid12, np.zeros(1024))
        with pytest.raises(ZeroField):
            normalize_mass(StatePair(u=z, v=gaussian, rho1=1.0, rho2=1.0))


class TestDilate:
    def test_identity(self, gaussian):
        out = dilate(gaussian, 1.0)
        assert np.array_equal(out.values, gaussian.values)

    @pytest.mark.parametrize("t", [0.5, 0.8, 1.3, 2.0])
    def test_mass_invariance(self, gaussian, t):
        assert mass(dilate(gaussian, t)) == pytest.approx(
            mass(gaussian), rel=1e-6
        )

    def test_kinetic_scaling(self, gaussian):
        t = 1.5
        assert grad_norm_sq(dilate(gaussian, t)) == pytest.approx(
            t**2 * grad_norm_sq(gaussian), rel=1e-4
        )

    def test_composition(self, gaussian):
        a, b = 1.3, 0.6
        once = dilate(gaussian, a * b)
        twice = dilate(dilate(gaussian, a), b)
        err = l2_norm(
            RadialField(gaussian.grid, once.values - twice.values)
        )
        assert err / l2_norm(once) < 1e-5

    def test_rejects_nonpositive(self, gaussian):
        with pytest.raises(ValueError):
            dilate(gaussian, 0.0)


class TestSerialization:
    def test_roundtrip(self, gaussian):
        text = field_to_csv(gaussian)
        back = field_from_csv(text)
        assert back.grid.same_as(gaussian.grid)
        assert np.allclose(back.values, gaussian.values, rtol=1e-15)

    def test_decay_flag(self, grid12, gaussian):
        assert gaussian.decays
        assert not RadialField(grid12, np.ones(1024)).decays
