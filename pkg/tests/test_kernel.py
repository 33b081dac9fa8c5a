import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REFERENCE, type_one
from oracles import krein_determinant
from stark_resonance.errors import InvalidParameters, PoleError
from stark_resonance.kernel import (
    ModelParams,
    d_function,
    full_kernel,
    k0,
    kmatrix,
    m_matrix,
)

positions = st.floats(-6.0, 10.0)
fields = st.floats(0.05, 0.5)
energies = st.builds(complex, st.floats(-4.0, 1.0), st.floats(-0.5, 0.5))


def with_field(F):
    return type_one(F)


class TestModelParams:
    def test_derived_quantities(self):
        p = ModelParams.from_separation(-2.8, -2.0, 5.0, 0.17, x1=1.0)
        assert p.a == 5.0 and p.x2 == 6.0
        assert list(p.alphas) == [-2.8, -2.0]
        assert p.with_field(0.2).F == 0.2

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(alpha1=-2.0, alpha2=-2.8, x1=0, x2=5, F=0.1),
            dict(alpha1=-2.8, alpha2=0.5, x1=0, x2=5, F=0.1),
            dict(alpha1=-2.8, alpha2=-2.0, x1=5, x2=0, F=0.1),
            dict(alpha1=-2.8, alpha2=-2.0, x1=0, x2=5, F=0.0),
            dict(alpha1=float("nan"), alpha2=-2.0, x1=0, x2=5, F=0.1),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameters):
            ModelParams(**kwargs)

    def test_equal_wells_allowed(self):
        assert ModelParams(-2.0, -2.0, 0.0, 5.0, 0.1).alpha1 == -2.0


class TestFreeKernel:
    @given(positions, positions, energies, fields)
    def test_symmetric(self, x, y, z, F):
        p = with_field(F)
        assert k0(x, y, z, p) == k0(y, x, z, p)

    @settings(max_examples=30)
    @given(st.floats(-2.0, 7.0), energies, fields)
    def test_derivative_jump(self, y, z, F):
        # one-sided second-order stencils; the jump is -1 from Wronskian(Ai, Bi) = 1/pi
        p = with_field(F)
        eps = 1e-4
        K = lambda x: k0(x, y, z, p)
        right = (-3 * K(y) + 4 * K(y + eps) - K(y + 2 * eps)) / (2 * eps)
        left = (3 * K(y) - 4 * K(y - eps) + K(y - 2 * eps)) / (2 * eps)
        assert abs(right - left + 1) < 1e-6

    @pytest.mark.parametrize("x,y", [(-1.0, 0.5), (3.0, 0.0), (6.0, 2.0)])
    def test_differential_equation_away_from_diagonal(self, x, y):
        p = with_field(0.17)
        z = -1.9 - 0.01j
        K = lambda u: k0(u, y, z, p)
        residuals = []
        for h in (2e-3, 1e-3):
            second = (K(x + h) - 2 * K(x) + K(x - h)) / h ** 2
            residuals.append(abs(-second - (p.F * x + z) * K(x)) / abs(K(x)))
        assert residuals[0] < 1e-5
        assert residuals[1] < residuals[0] / 3

    def test_vectorised(self):
        p = with_field(0.17)
        x = np.linspace(-1, 6, 7)
        vals = k0(x, 2.0, -1.9 - 0.01j, p)
        assert vals.shape == (7,)
        assert np.allclose(vals, [k0(v, 2.0, -1.9 - 0.01j, p) for v in x])

    def test_outgoing_and_incoming_are_reflections(self):
        p = with_field(0.17)
        z = -1.9 + 0.3j
        assert k0(1.0, 4.0, z.conjugate(), p, "-") == pytest.approx(k0(1.0, 4.0, z, p).conjugate(), rel=1e-14)


class TestInteractionMatrices:
    def test_kmatrix_example(self, params):
        k = kmatrix(params, -1.96 - 1e-4j)
        assert np.all(np.isfinite(k)) and np.all(k != 0)
        assert k[0, 1] == k[1, 0]

    @given(energies, fields)
    def test_kmatrix_matches_k0(self, z, F):
        p = with_field(F)
        k = kmatrix(p, z)
        for j, xj in enumerate(p.positions):
            for l, xl in enumerate(p.positions):
                assert k[j, l] == pytest.approx(k0(xj, xl, z, p), rel=1e-13)

    @given(energies, fields)
    def test_d_is_a_determinant(self, z, F):
        p = with_field(F)
        k = kmatrix(p, z)
        tilde = np.diag(1 / p.alphas) + k
        assert d_function(p, z) == pytest.approx(np.linalg.det(tilde), rel=1e-10, abs=1e-12)

    @given(energies, fields)
    def test_m_is_the_adjugate(self, z, F):
        p = with_field(F)
        m = m_matrix(p, z)
        tilde = np.diag(1 / p.alphas) + kmatrix(p, z)
        scale = np.abs(tilde).max() * np.abs(m).max()
        assert np.allclose(tilde @ m, d_function(p, z) * np.eye(2), rtol=0, atol=1e-13 * scale)
        assert m[0, 1] == m[1, 0]

    @given(energies, fields)
    def test_schwarz_reflection(self, z, F):
        p = with_field(F)
        assert d_function(p, z.conjugate(), "-") == pytest.approx(d_function(p, z).conjugate(), rel=1e-13)
        assert np.allclose(m_matrix(p, z.conjugate(), "-"), m_matrix(p, z).conjugate(), rtol=1e-13)

    @pytest.mark.parametrize("z", [-1.9 - 0.01j, -0.5 + 0.3j, -3.2 - 0.2j])
    def test_d_against_mpmath(self, params, z):
        ref = complex(krein_determinant(-2.8, -2.0, 0.0, 5.0, 0.17, z))
        assert d_function(params, z) == pytest.approx(ref, rel=1e-12)

    def test_d_tends_to_inverse_product_along_imaginary_ray(self, params):
        # the k entries decay like |z|^(-1/2) far above the real axis
        limit = 1 / (params.alpha1 * params.alpha2)
        gaps = [abs(d_function(params, 1j * t) / limit - 1) for t in (1e1, 1e2, 1e3, 1e4)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.05
        ratios = [a / b for a, b in zip(gaps, gaps[1:])]
        assert np.allclose(ratios, np.sqrt(10), rtol=0.1)

    @pytest.mark.parametrize("F", [0.17, 0.21])
    def test_m_finite_at_resonances(self, F):
        p = with_field(F)
        for key in ("E1", "E2"):
            assert np.all(np.isfinite(m_matrix(p, REFERENCE[F][key])))

    def test_d_vanishes_at_reference_resonance(self, params):
        assert abs(d_function(params, REFERENCE[0.17]["E1"])) < 1e-12


class TestFullKernel:
    @given(positions, positions, energies)
    def test_symmetric(self, x, y, z):
        p = with_field(0.17)
        assert full_kernel(x, y, p, z) == pytest.approx(full_kernel(y, x, p, z), rel=1e-11, abs=1e-14)

    @pytest.mark.parametrize("n", [0, 1])
    def test_delta_jump_condition(self, params, n):
        # -psi'' + alpha delta psi: the derivative jumps by alpha_n K(x_n, y)
        xn = params.positions[n]
        alpha = params.alphas[n]
        y, z = 2.2, -1.7 - 0.05j
        eps = 1e-4
        K = lambda x: full_kernel(x, y, params, z)
        right = (-3 * K(xn) + 4 * K(xn + eps) - K(xn + 2 * eps)) / (2 * eps)
        left = (3 * K(xn) - 4 * K(xn - eps) + K(xn - 2 * eps)) / (2 * eps)
        assert right - left == pytest.approx(alpha * K(xn), rel=1e-6)

    def test_strong_coupling_limit(self):
        # alpha -> -inf: diag(1/alpha) drops out and the correction uses k^-1;
        # both points sit between the (now impenetrable) deltas
        strong = ModelParams(-1e9, -1e9, 0.0, 5.0, 0.17)
        z, x, y = -1.7 - 0.05j, 1.2, 3.1
        k = kmatrix(strong, z)
        left = np.array([k0(x, xn, z, strong) for xn in strong.positions])
        right = np.array([k0(xm, y, z, strong) for xm in strong.positions])
        expected = k0(x, y, z, strong) - left @ np.linalg.inv(k) @ right
        assert abs(expected) > 1e-3
        assert full_kernel(x, y, strong, z) == pytest.approx(expected, rel=1e-6)

    def test_pole_order(self, params):
        E = REFERENCE[0.17]["E2"]
        radii = np.array([1e-5, 1e-6, 1e-7])
        size = []
        for r in radii:
            vals = [abs(full_kernel(0.0, 0.0, params, E + r * cmath.exp(1j * t))) for t in np.linspace(0, 6, 7)]
            size.append(np.mean(vals))
        slope = np.polyfit(np.log(radii), np.log(size), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.01)

    def test_pole_error(self, params):
        with pytest.raises(PoleError):
            full_kernel(0.0, 0.0, params, REFERENCE[0.17]["E1"])
