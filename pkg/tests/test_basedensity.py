import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad, trapezoid
from scipy.optimize import brentq

from qchar.basedensity import (
    cf_eval,
    density_deriv,
    density_eval,
    epsilon_max,
    estimate_C3,
    interval_mass,
    make_base,
    scale,
    tail_span,
)
from qchar.construct import default_c3_grid
from qchar.errors import CoarseGridError, DerivativeOrderError, GridMassError
from qchar.grid import GridSpec


def mp_density(f, x):
    """Closed form in mpmath, for derivative oracles independent of the spectral path."""
    def g(u):
        return (mpmath.sinc(u / 2)) ** f.power
    return lambda y: mpmath.mpf(f.norm_constant) * (g(y) + g(y - f.shift)) / 2


class TestConstruction:
    def test_fejer_integral_power4(self):
        # quadrature oracle for the single component: 4*pi/3
        val = mpmath.quad(lambda x: mpmath.sinc(x / 2) ** 4, mpmath.linspace(-2000, 2000, 801))
        tail = 2 * 16 / (3 * 2000**3) * 1.5  # crude bound on the cut-off, far below tolerance
        assert float(val) == pytest.approx(4 * math.pi / 3, abs=tail + 1e-9)
        assert make_base(4, 1.0).norm_constant == pytest.approx(3 / (4 * math.pi), rel=1e-12)

    def test_norm_constant_power8(self, base):
        # B_8(0) = 151/315
        assert base.norm_constant == pytest.approx(315 / (151 * 2 * math.pi), rel=1e-12)

    @pytest.mark.parametrize("power", [4, 6, 8, 10])
    def test_unit_mass(self, power):
        f = make_base(power, 1.0)
        assert interval_mass(f, -4000, 4000) == pytest.approx(1.0, abs=1e-9)
        # band-limited, so the trapezoid rule is exact up to the cut-off tails
        x = np.linspace(-2000, 2000, 80001)
        assert trapezoid(density_eval(f, x), x) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("args", [(4, 2 * math.pi), (8, 4 * math.pi), (5, 1.0), (2, 1.0), (8, 0.0), (8, -1.0)])
    def test_rejects_bad_parameters(self, args):
        with pytest.raises(ValueError):
            make_base(*args)

    def test_positive_at_component_zeros(self, base):
        assert density_eval(base, 2 * math.pi) > 0
        k = np.arange(-10, 11)
        assert np.all(density_eval(base, 2 * math.pi * k) > 0)
        assert np.all(density_eval(base, 2 * math.pi * k + base.shift) > 0)

    def test_positive_on_random_points(self, base, rng):
        x = rng.uniform(-200, 200, 100_000)
        assert np.all(density_eval(base, x) > 0)

    def test_value_at_origin(self, base):
        g = (math.sin(-0.5) / -0.5) ** 8
        assert density_eval(base, 0.0) == pytest.approx(base.norm_constant * (1 + g) / 2, rel=1e-15)

    def test_asymmetric(self, base):
        assert density_eval(base, 1.3) != pytest.approx(density_eval(base, -1.3))

    def test_taylor_branch_is_continuous(self, base):
        x = np.array([1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)])
        v = density_eval(base, x)
        assert abs(v[0] - v[1]) < 1e-12


class TestCharacteristicFunction:
    def test_normalised(self, base):
        assert cf_eval(base, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_matches_quadrature(self, base):
        for t in (0.3, 1.7, 3.2):
            re = quad(lambda x: math.cos(t * x) * density_eval(base, x), -np.inf, np.inf, limit=800)[0]
            im = quad(lambda x: math.sin(t * x) * density_eval(base, x), -np.inf, np.inf, limit=800)[0]
            assert abs(cf_eval(base, t) - complex(re, im)) < 1e-6

    def test_vanishes_beyond_band(self, base, rng):
        t = rng.uniform(base.band_limit, 3 * base.band_limit, 100) * rng.choice([-1, 1], 100)
        assert np.all(np.abs(cf_eval(base, t)) < 1e-8)
        assert cf_eval(base, base.band_limit + 1) == 0

    def test_beyond_band_by_quadrature(self, base):
        # the Fourier integral itself, sampled densely, nearly vanishes past B
        x = np.linspace(-3000, 3000, 600_001)
        fx = density_eval(base, x)
        t = base.band_limit + 1
        val = trapezoid(np.exp(1j * t * x) * fx, x)
        assert abs(val) < 1e-8

    def test_hermitian(self, base):
        assert cf_eval(base, -0.7) == pytest.approx(np.conj(cf_eval(base, 0.7)), abs=1e-15)

    def test_parseval(self, base):
        t = np.linspace(-base.band_limit, base.band_limit, 20001)
        lhs = trapezoid(np.abs(cf_eval(base, t)) ** 2, t) / (2 * math.pi)
        x = np.linspace(-300, 300, 120001)
        rhs = trapezoid(density_eval(base, x) ** 2, x)
        assert lhs == pytest.approx(rhs, abs=1e-6)


class TestDerivatives:
    def test_order_zero_is_density(self, base, rng):
        x = rng.uniform(-30, 30, 50)
        np.testing.assert_allclose(density_deriv(base, 0, x), density_eval(base, x), atol=1e-9)

    def test_first_derivative_finite_difference(self, base):
        h = 1e-5
        fd = (density_eval(base, 0.3 + h) - density_eval(base, 0.3 - h)) / (2 * h)
        assert density_deriv(base, 1, 0.3) == pytest.approx(fd, rel=1e-6)

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
    def test_against_mpmath(self, base, m):
        g = mp_density(base, None)
        for x in (-4.1, 0.3, 2.0, 7.5):
            exact = float(mpmath.diff(g, x, m))
            assert density_deriv(base, m, x) == pytest.approx(exact, rel=1e-8, abs=1e-14)

    def test_first_derivative_integrates_to_zero(self, base):
        x = np.linspace(-400, 400, 16001)
        assert abs(trapezoid(density_deriv(base, 1, x), x)) < 1e-8

    def test_order_cap(self, base):
        with pytest.raises(DerivativeOrderError):
            density_deriv(base, base.m_max + 1, 0.0)

    def test_far_tail_accuracy(self, base):
        g = mp_density(base, None)
        for x in (60.0, 150.0, -400.0):
            exact = float(mpmath.diff(g, x, 1))
            assert abs(density_deriv(base, 1, x) - exact) < 1e-14

    def test_vector_shape(self, base):
        assert density_deriv(base, 2, np.zeros((3, 4))).shape == (3, 4)


class TestScaling:
    def test_unit_mass(self, base):
        p = scale(base, 0.3)
        x = np.linspace(-3000, 3000, 400001)
        assert trapezoid(p.pdf(x), x) == pytest.approx(1.0, abs=1e-7)

    def test_cf_identity(self, base, rng):
        p = scale(base, 0.37)
        t = rng.uniform(-2, 2, 50)
        np.testing.assert_allclose(p.cf(t), cf_eval(base, t / 0.37), atol=1e-10)

    def test_support_shrinks(self, base):
        p = scale(base, 0.1)
        t = np.linspace(0.1 * base.band_limit + 1e-9, 5, 100)
        assert np.all(p.cf(t) == 0)
        assert abs(p.cf(0.1 * base.band_limit * 0.99)) > 0

    def test_chain_rule(self, base):
        p = scale(base, 0.5)
        assert p.deriv(1, 1.0) == pytest.approx(0.25 * density_deriv(base, 1, 0.5), rel=1e-14)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_out_of_range(self, base, eps):
        with pytest.raises(ValueError):
            scale(base, eps)


@pytest.fixture(scope="module")
def grid(base):
    return default_c3_grid(base)


class TestC3:
    def test_order_one_is_grid_max(self, base, grid):
        c3 = estimate_C3(base, 1, grid)
        x = grid.points(0)
        oracle = np.max(np.abs(density_deriv(base, 1, x)) / density_eval(base, x))
        assert c3.value == pytest.approx(max(1.0, oracle), rel=1e-12)
        assert math.isfinite(c3.value) and c3.value >= 1

    def test_monotone_in_order(self, base, grid):
        assert estimate_C3(base, 8, grid).value >= estimate_C3(base, 4, grid).value

    def test_bound_flags(self, base, grid):
        assert all(estimate_C3(base, 12, grid).bound_held)

    @pytest.mark.parametrize("eps", [0.05, 0.3])
    def test_scaled_bound(self, base, grid, eps):
        M = 10
        c3 = estimate_C3(base, M, grid).value
        p = scale(base, eps)
        x = grid.points(0) / eps
        table = p.derivative_table(M, x)
        px = p.pdf(x)
        for m in range(1, M + 1):
            assert np.all(np.abs(table[m]) <= (eps * c3) ** m * px * (1 + 1e-9))

    def test_coarse_grid(self, base):
        with pytest.raises(CoarseGridError):
            estimate_C3(base, 2, GridSpec.uniform(-60, 60, 16, 1))

    def test_short_grid(self, base):
        with pytest.raises(GridMassError):
            estimate_C3(base, 2, GridSpec.uniform(-5, 5, 512, 1))

    def test_serialises(self, base, grid):
        d = estimate_C3(base, 3, grid).to_dict()
        assert d["max_order"] == 3 and len(d["per_order"]) == 3


class TestEpsilonMax:
    @staticmethod
    def bisect(s, a, d, c3):
        return brentq(lambda e: math.expm1(e * e * s * a * c3**d) - 1, 1e-9, 1.0, xtol=1e-15)

    @pytest.mark.parametrize("args,expected", [((1, 1, 2, 2), 0.41628), ((2, 1, 2, 2), 0.29436)])
    def test_examples(self, args, expected):
        assert epsilon_max(*args) == pytest.approx(expected, abs=1e-5)
        assert epsilon_max(*args) == pytest.approx(self.bisect(*args), rel=1e-12)

    def test_infinite_constant(self):
        assert epsilon_max(1, 1, 2, math.inf) == 0.0
        assert epsilon_max(1, 1, 2, 1e200) < 1e-100

    def test_linear_minimum_degree(self):
        assert epsilon_max(1, 1, 1, 2, min_degree=1) == pytest.approx(math.log(2) / 2)


def test_tail_span_brackets_mass(base):
    y = tail_span(base, 1e-7)
    assert 1 - interval_mass(base, -y, y) <= 1e-7
    assert 1 - interval_mass(base, -0.9 * y, 0.9 * y) > 1e-7
