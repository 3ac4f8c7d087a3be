import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singlering.errors import ConvergenceError, DomainError, NoGapError, ValidationError
from singlering.measures import cauchy, from_atoms, moment, point_mass, symmetric_pair, symmetrize
from singlering.subordination import (
    Side,
    density_on_grid,
    h_map,
    infdiv_boundary_nu,
    infdiv_phi,
    infdiv_subordination,
    solve,
    support_gap,
)


def arcsine_cauchy(z):
    return 1.0 / (np.sqrt(z - 2) * np.sqrt(z + 2))


def extrapolate_to_zero(ys, values):
    """Quadratic fit in y**2 evaluated at y = 0."""
    coeffs = np.polyfit(np.asarray(ys) ** 2, np.asarray(values), len(ys) - 1)
    return coeffs[-1]


@st.composite
def measures(draw):
    k = draw(st.integers(1, 5))
    locs = draw(st.lists(st.floats(-3, 3), min_size=k, max_size=k))
    ws = draw(st.lists(st.floats(0.05, 1), min_size=k, max_size=k))
    return from_atoms(locs, ws)


class TestSolve:
    def test_bernoulli_pair(self, bern):
        sol = solve(bern, bern, 3j)
        y = np.roots([1, -np.sqrt(13), 1]).max()  # y/(y^2+1) = 1/sqrt(13)
        assert sol.omega1 == pytest.approx(1j * y, abs=1e-10)
        assert sol.omega2 == pytest.approx(1j * y, abs=1e-10)
        assert sol.omega1.imag == pytest.approx(3.30278, abs=1e-5)
        assert sol.g_value == pytest.approx(-1j / np.sqrt(13), abs=1e-12)
        assert sol.g_value.imag == pytest.approx(-0.277350, abs=1e-6)

    def test_point_mass_at_zero(self, bern2):
        z = 0.3 + 0.7j
        sol = solve(bern2, point_mass(0.0), z)
        assert sol.omega1 == z
        assert sol.g_value == pytest.approx(cauchy(bern2, z))

    def test_point_mass_translation_both_sides(self, bern2):
        z, c = -0.4 + 0.2j, 1.5
        sol = solve(bern2, point_mass(c), z)
        assert sol.omega1 == pytest.approx(z - c)
        assert sol.g_value == pytest.approx(cauchy(bern2, z - c))
        mirrored = solve(point_mass(c), bern2, z)
        assert mirrored.omega2 == pytest.approx(z - c)
        assert mirrored.g_value == pytest.approx(sol.g_value)

    def test_gap_pair_self_consistency(self, bern, bern2):
        z = 5j
        sol = solve(bern2, bern, z)
        assert sol.residual < 1e-10
        assert abs(sol.omega1 + sol.omega2 - z - 1 / sol.g_value) < 1e-9

    def test_matches_arcsine(self, bern):
        for z in (0.5 + 0.01j, -1.9 + 0.001j, 3 + 2j):
            assert solve(bern, bern, z).g_value == pytest.approx(arcsine_cauchy(z), abs=1e-10)

    def test_rejects_real_z(self, bern):
        with pytest.raises(ValidationError):
            solve(bern, bern, 0.5)

    def test_reports_non_convergence(self, bern):
        with pytest.raises(ConvergenceError):
            solve(bern, symmetric_pair(0.7), 0.3 + 1e-6j, max_iter=3)

    def test_commutes(self, bern2):
        mu = from_atoms([-1, 0.5, 2], [0.2, 0.5, 0.3])
        a = solve(mu, bern2, 0.4 + 0.3j)
        b = solve(bern2, mu, 0.4 + 0.3j)
        assert a.g_value == pytest.approx(b.g_value, abs=1e-11)
        assert a.omega1 == pytest.approx(b.omega2, abs=1e-9)

    @given(measures(), measures(), st.floats(-4, 4), st.floats(0.1, 5))
    def test_invariants(self, mu1, mu2, x, y):
        z = complex(x, y)
        sol = solve(mu1, mu2, z)
        assert sol.omega1.imag >= y - 1e-12 and sol.omega2.imag >= y - 1e-12
        assert abs(cauchy(mu1, sol.omega1) - cauchy(mu2, sol.omega2)) < 1e-10
        assert abs(sol.omega1 + sol.omega2 - z - sol.f_value) < 1e-9

    @given(st.floats(0.01, 3))
    def test_imaginary_axis_symmetry(self, y):
        mu1 = symmetrize(from_atoms([0.5, 1.7], [0.3, 0.7]))
        mu2 = symmetrize(from_atoms([1, 2], [0.4, 0.6]))
        sol = solve(mu1, mu2, 1j * y)
        assert abs(sol.omega1.real) < 1e-10 and abs(sol.omega2.real) < 1e-10


class TestSmallScaleLimits:
    """Behaviour of the subordination functions along ``iy`` as ``y -> 0`` in a gap."""

    ys = (1e-2, 1e-3, 1e-4)

    def test_omega1_slope(self, bern, bern2):
        vals = [(solve(bern2, bern, 1j * y).omega1 / (1j * y)).real for y in self.ys]
        limit = extrapolate_to_zero(self.ys, vals)
        product = moment(bern, 2) * moment(bern2, -2)
        assert limit == pytest.approx(1 / (1 - product), rel=1e-2)

    def test_omega2_blow_up(self, bern, bern2):
        vals = [(-1j * y * solve(bern2, bern, 1j * y).omega2).real for y in self.ys]
        limit = extrapolate_to_zero(self.ys, vals)
        assert limit == pytest.approx(1 / moment(bern2, -2) - moment(bern, 2), rel=1e-2)


class TestHMap:
    def test_point_mass_other(self, bern2):
        assert h_map("H1", bern2, point_mass(0.0), 0.3 + 0.1j) == pytest.approx(0.3 + 0.1j)

    def test_equality_case_vanishes(self, bern):
        assert abs(h_map(Side.H1, bern, bern, 0.1)) < 1e-12

    def test_gap_pair_value(self, bern, bern2):
        h = h_map("H1", bern2, bern, 0.1)
        assert h.imag == 0
        assert h.real > 0.1 * (1 - 0.25) * 0.9

    def test_sides_mirror(self, bern, bern2):
        assert h_map("H2", bern, bern2, 0.05) == pytest.approx(h_map("H1", bern2, bern, 0.05))

    def test_domain(self, bern):
        with pytest.raises(DomainError):
            h_map("H1", bern, symmetric_pair(3.0), 0.9)

    def test_cubic_error_bound(self, bern, bern2):
        cert = support_gap(bern2, bern, "H1")
        slope = 1 - cert.moment_product
        rng = np.random.default_rng(0)
        r = cert.gamma / 2 * np.sqrt(rng.uniform(size=100))
        zs = r * np.exp(2j * np.pi * rng.uniform(size=100))
        # K |z|^3 drops below double-precision resolution near the origin
        floor = 8 * np.finfo(float).eps
        for z in zs:
            assert abs(h_map("H1", bern2, bern, z) - slope * z) <= cert.K * abs(z) ** 3 + floor

    def test_inverts_subordination_on_gap(self, bern, bern2):
        cert = support_gap(bern2, bern, "H1")
        for x in np.linspace(-cert.gamma / 2, cert.gamma / 2, 9):
            h = h_map("H1", bern2, bern, x)
            g = solve(bern2, bern, complex(h.real, 1e-8)).g_value
            assert abs(g - cauchy(bern2, x)) < 1e-8


class TestSupportGap:
    def test_gap_pair(self, bern, bern2):
        cert = support_gap(bern2, bern, "H1")
        assert cert.side is Side.H1
        assert cert.epsilon > 0 and cert.gamma > 0
        assert cert.moment_product == pytest.approx(0.25)
        assert cert.eta == 2.0
        assert cert.K == pytest.approx(2 * 1 / 16 + 8 * (1 + 1) / 64)
        assert cert.epsilon == pytest.approx(h_map("H1", bern2, bern, cert.gamma / 4).real)
        xs, dens = density_on_grid(bern2, bern, (-cert.epsilon, cert.epsilon), 21, 1e-8)
        assert dens.max() < 1e-6

    def test_equality_pair_has_no_certificate(self, bern):
        with pytest.raises(NoGapError):
            support_gap(bern, bern, "H1")

    def test_atom_at_origin(self, bern):
        with pytest.raises(NoGapError):
            support_gap(from_atoms([-1, 0, 1], [0.25, 0.5, 0.25]), bern, "H1")

    def test_side_h2_mirrors(self, bern, bern2):
        a = support_gap(bern2, bern, "H1")
        b = support_gap(bern, bern2, "H2")
        assert a.epsilon == pytest.approx(b.epsilon, rel=1e-12)

    def test_example_outer_point(self, figure1):
        z = -1.5 + 1.5j
        mu1 = symmetrize(figure1.aprime_law.abs_law(z))
        mu2 = symmetrize(figure1.sigma_law)
        assert 1 / moment(mu1, -2) == pytest.approx(6.46, abs=5e-3)
        cert = support_gap(mu1, mu2, "H1")
        assert cert.epsilon > 0


class TestDensity:
    def test_arcsine(self, bern):
        xs, dens = density_on_grid(bern, bern, (-1.99, 1.99), 100, 1e-4)
        np.testing.assert_allclose(dens, 1 / (np.pi * np.sqrt(4 - xs**2)), atol=1e-3)

    def test_point_mass_smoothing(self, bern2):
        eta = 0.05
        xs, dens = density_on_grid(bern2, point_mass(0.0), (-3, 3), 31, eta)
        np.testing.assert_allclose(dens, -cauchy(bern2, xs + 1j * eta).imag / np.pi, rtol=1e-12)

    def test_certified_gap(self, bern, bern2):
        # the smoothed density inside the gap is about eta * m_-2 / pi
        xs, dens = density_on_grid(bern2, bern, (-0.2, 0.2), 50, 1e-6)
        assert dens.max() < 1e-6

    def test_eta_positive(self, bern):
        with pytest.raises(ValidationError):
            density_on_grid(bern, bern, (-1, 1), 5, 0.0)


class TestInfinitelyDivisible:
    def test_zero_sigma(self, bern2):
        zero = from_atoms([], [], normalize=False)
        assert infdiv_phi(bern2, zero, 0.37) == 0.37
        assert infdiv_boundary_nu(bern2, zero, 1.0) == 0.0

    def test_phi_semicircle(self, bern2):
        sc = point_mass(0.0)
        assert infdiv_phi(bern2, sc, 0.5) == pytest.approx(0.5 - 1 / 7.5, abs=1e-14)
        assert infdiv_phi(bern2, sc, 0.5) == pytest.approx(0.366667, abs=1e-6)
        assert infdiv_phi(bern2, sc, -0.5) == pytest.approx(-0.366667, abs=1e-6)

    def test_phi_domain(self, bern):
        with pytest.raises(DomainError):
            infdiv_phi(bern, symmetric_pair(5.0), 0.5)

    def test_sigma_must_be_symmetric(self, bern2):
        with pytest.raises(ValidationError):
            infdiv_phi(bern2, from_atoms([1.0], [1.0], normalize=False), 0.5)

    @pytest.mark.parametrize("x", [0.2, 0.5, -0.4])
    def test_phi_is_left_inverse(self, bern2, x):
        sc = point_mass(0.0)
        phi = infdiv_phi(bern2, sc, x)
        _, g = infdiv_subordination(bern2, sc, complex(phi, 1e-11))
        assert abs(1 / g - 1 / cauchy(bern2, x)) < 1e-8

    def test_subordination_semicircle_alone(self):
        # delta_0 [+] semicircle is the semicircle law
        z = 0.3 + 0.8j
        _, g = infdiv_subordination(point_mass(0.0), point_mass(0.0), z)
        assert g == pytest.approx((z - np.sqrt(z - 2) * np.sqrt(z + 2)) / 2, abs=1e-12)

    def test_nu_vanishes_inside_gap(self, bern2):
        assert infdiv_boundary_nu(bern2, point_mass(0.0), 0.0) == 0.0

    def test_nu_at_atom(self, bern2):
        # integral = (1/y^2 + 1/(16 + y^2)) / 2 at x = 2
        expected = np.sqrt((-30 + np.sqrt(1028)) / 4)
        assert infdiv_boundary_nu(bern2, point_mass(0.0), 2.0) == pytest.approx(expected, abs=1e-9)

    def test_nu_matches_scaled_sigma(self, bern2):
        # doubling sigma doubles the integral, so the boundary rises
        lo = infdiv_boundary_nu(bern2, point_mass(0.0), 1.0)
        hi = infdiv_boundary_nu(bern2, from_atoms([0.0], [2.0], normalize=False), 1.0)
        assert hi > lo >= 0
