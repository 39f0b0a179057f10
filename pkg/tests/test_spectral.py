import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scipy.integrate import trapezoid

import qchar.spectral as spectral
from qchar.basedensity import scale
from qchar.construct import build_density, default_grid
from qchar.grid import GridSpec
from qchar.poly import MultiPoly, conj_reflect, parse_poly, random_sparse_poly
from qchar.spectral import (
    TargetCF,
    cf_property_check,
    forward_check,
    forward_transform,
    hermitian_residual,
    invert_cf,
    invert_slice,
    target_cf_eval,
)

from conftest import poly


@pytest.fixture(scope="module")
def p05(base):
    return scale(base, 0.5)


class TestTargetCF:
    def test_origin(self, p05):
        assert target_cf_eval(TargetCF(poly("t1*t2 + i*t1^2*t2"), p05), [0.0, 0.0]) == 1

    def test_outside_box(self, p05):
        T = TargetCF(poly("t1^3*t2^3"), p05)
        b = p05.band_limit
        assert T(b * 1.01, 0.3) == 0
        assert T(0.2, -b - 1e-9) == 0
        # large enough that exp(q) would overflow were it evaluated
        with np.errstate(over="raise"):
            assert T(1e3, 1e3) == 0

    def test_slice_is_marginal_cf(self, p05):
        T = TargetCF(poly("t1*t2"), p05)
        t = np.linspace(-3, 3, 41)
        np.testing.assert_allclose(T(np.zeros_like(t), t), p05.cf(t), atol=1e-15)
        np.testing.assert_allclose(T(t, np.zeros_like(t)), p05.cf(t), atol=1e-15)

    def test_product_form(self, p05, rng):
        q = poly("i*t1^2*t2 - 0.3*t1*t2")
        t1, t2 = rng.uniform(-2, 2, (2, 30))
        expected = np.exp(1j * t1**2 * t2 - 0.3 * t1 * t2) * p05.cf(t1) * p05.cf(t2)
        np.testing.assert_allclose(TargetCF(q, p05)(t1, t2), expected, atol=1e-15)

    def test_support_box(self, p05):
        assert TargetCF(poly("t1*t2*t3", 3), p05).support_box == ((-2.0, 2.0),) * 3

    def test_coordinate_count(self, p05):
        with pytest.raises(ValueError):
            target_cf_eval(TargetCF(poly("t1*t2"), p05), [0.0])


class TestInversion:
    def test_product_density(self, base):
        p = scale(base, 0.2)
        grid = default_grid(p, 2, count=128)
        r = invert_cf(TargetCF(MultiPoly.zero(2), p), grid)
        prod = np.multiply.outer(p.pdf(grid.points(0)), p.pdf(grid.points(1)))
        assert np.max(np.abs(r.values - prod)) <= 1e-8
        assert np.max(np.abs(r.values.imag)) <= 1e-15

    @pytest.mark.parametrize("c", [-1.0, 0.5, 2.25])
    def test_modulation_is_shift(self, p05, c):
        grid = default_grid(p05, 1, count=2048)
        x = grid.points(0)
        r = invert_cf(TargetCF(parse_poly(f"{c}i*t1", 1), p05), grid)
        assert np.max(np.abs(r.values - p05.pdf(x - c))) <= 1e-8

    def test_gaussian_factor_is_convolution(self, p05):
        x = np.linspace(-25, 25, 51)
        r = invert_slice(TargetCF(parse_poly("-0.5*t1^2", 1), p05), 0, x)
        y = np.linspace(-120, 120, 240001)
        py = p05.pdf(y)
        oracle = [trapezoid(py * np.exp(-0.5 * (xi - y) ** 2), y) / math.sqrt(2 * math.pi) for xi in x]
        assert np.max(np.abs(r - np.array(oracle))) <= 1e-6

    def test_slice_matches_grid_inversion_1d(self, p05):
        grid = default_grid(p05, 1, count=256)
        T = TargetCF(parse_poly("i*t1^3 - t1^2", 1), p05)
        np.testing.assert_allclose(invert_slice(T, 0, grid.points(0)), invert_cf(T, grid).values,
                                   atol=1e-16)

    def test_marginal_by_slice(self, base):
        p = scale(base, 0.03)
        T = TargetCF(poly("t1*t2"), p)
        x = np.linspace(-300, 300, 61)
        np.testing.assert_allclose(invert_slice(T, 1, x).real, p.pdf(x), atol=1e-15)

    def test_linearity(self, p05, monkeypatch):
        grid = GridSpec.uniform(-20, 20, 32, 2)
        T1, T2 = TargetCF(poly("t1*t2"), p05), TargetCF(poly("i*t1^2*t2"), p05)
        r1, r2 = invert_cf(T1, grid).values, invert_cf(T2, grid).values
        original = spectral.target_cf_eval
        monkeypatch.setattr(spectral, "target_cf_eval",
                            lambda T, t: original(T1, t) + original(T2, t))
        r12 = invert_cf(T1, grid).values
        assert np.max(np.abs(r12 - (r1 + r2))) <= 1e-10

    def test_far_grid_is_resolved(self, p05):
        # beyond the default rule's reach the node count grows with |x|
        x = np.array([-300.0, 250.0])
        r = invert_slice(TargetCF(MultiPoly.zero(1), p05), 0, x)
        np.testing.assert_allclose(r.real, p05.pdf(x), atol=1e-15)

    def test_grid_dimension_mismatch(self, p05):
        with pytest.raises(ValueError):
            invert_cf(TargetCF(poly("t1*t2"), p05), GridSpec.uniform(-1, 1, 16, 1))


class TestHermitian:
    def test_admissible(self, p05, rng):
        pts = rng.uniform(-2, 2, (200, 2))
        assert hermitian_residual(TargetCF(poly("t1*t2 + i*t1^2*t2"), p05), pts) <= 1e-12

    def test_parity_violation(self, p05, rng):
        pts = rng.uniform(-2, 2, (200, 2))
        assert hermitian_residual(TargetCF(poly("i*t1*t2"), p05), pts) >= 1e-2

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_iff_reflection_invariant(self, p05, seed):
        rng = np.random.default_rng(seed)
        q = random_sparse_poly(rng)
        pts = rng.uniform(-2, 2, (256, 2))
        small = hermitian_residual(TargetCF(q, p05), pts) <= 1e-12
        assert small == (conj_reflect(q) == q)


class TestForward:
    def test_product_density(self, base, rng):
        p = scale(base, 0.2)
        grid = default_grid(p, 2, count=256)
        T = TargetCF(MultiPoly.zero(2), p)
        r = invert_cf(T, grid)
        r = type(r)(grid, r.values.real, "density")
        samples = rng.uniform(-p.band_limit, p.band_limit, (20, 2))
        assert forward_check(r, T, samples) <= 1e-6

    def test_outside_box_nearly_vanishes(self, base):
        p = scale(base, 0.025)
        grid = default_grid(p, 2, count=512)
        r, _ = build_density(poly("t1*t2"), p, grid)
        ft = forward_transform(r, [[0.5, 0.5], [0.11, -0.3]])
        assert np.all(np.abs(ft) <= 1e-5)


class TestPropertyCheck:
    def test_certified_bilinear(self, base):
        rep = cf_property_check(TargetCF(poly("t1*t2"), scale(base, 0.025)))
        assert rep.verdict and all(rep.checks.values())
        assert rep.phi0 == 1 and rep.max_abs <= 1 + 1e-9

    def test_parity_violation(self, p05):
        rep = cf_property_check(TargetCF(poly("i*t1*t2"), p05))
        assert not rep.checks["hermitian"] and rep.hermitian_residual >= 1e-2

    def test_unbounded_for_large_even_coefficient(self, p05):
        rep = cf_property_check(TargetCF(poly("5*t1^2*t2^2"), p05))
        assert not rep.checks["bounded"] and rep.max_abs > 1

    def test_gram_detects_indefinite_target(self, p05):
        rep = cf_property_check(TargetCF(poly("5*t1^2*t2^2"), p05), m=48)
        assert rep.min_gram_eig < -1e-8

    def test_seeded(self, p05):
        T = TargetCF(poly("t1*t2"), p05)
        assert cf_property_check(T, seed=3) == cf_property_check(T, seed=3)

    def test_serialises(self, p05):
        d = cf_property_check(TargetCF(poly("t1*t2"), p05)).to_dict()
        assert set(d) == {"phi0", "hermitian_residual", "max_abs", "min_gram_eig", "checks",
                          "seed", "verdict"}
        assert d["phi0"] == {"re": 1.0, "im": 0.0}

    def test_gram_size(self, p05):
        with pytest.raises(ValueError):
            cf_property_check(TargetCF(poly("t1*t2"), p05), m=1)
