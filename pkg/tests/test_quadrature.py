import math

import numpy as np
import pytest

from peekstat.quadrature import adaptive_simpson, composite_simpson_vec, golden_section_min


class TestAdaptiveSimpson:
    def test_polynomial(self):
        assert adaptive_simpson(lambda x: x * x, 0.0, 1.0, tol=1e-12) == pytest.approx(
            1.0 / 3.0, abs=1e-12
        )

    def test_sine(self):
        assert adaptive_simpson(math.sin, 0.0, math.pi, tol=1e-11) == pytest.approx(
            2.0, abs=1e-10
        )

    def test_decaying_exponential(self):
        # integral of e^-v over [0, 60] is 1 - e^-60
        val = adaptive_simpson(lambda v: math.exp(-v), 0.0, 60.0, tol=1e-12)
        assert val == pytest.approx(1.0, abs=1e-11)

    def test_tolerance_scaling(self):
        f = lambda x: math.exp(-x) * math.sin(3 * x)
        exact = 0.3 - math.exp(-2.0) * (math.sin(6.0) * 0.1 + math.cos(6.0) * 0.3)
        for tol in (1e-6, 1e-9, 1e-12):
            assert abs(adaptive_simpson(f, 0.0, 2.0, tol=tol) - exact) <= 10 * tol

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            adaptive_simpson(lambda x: x, 1.0, 1.0)
        with pytest.raises(ValueError):
            adaptive_simpson(lambda x: x, 2.0, 1.0)


class TestGoldenSection:
    def test_parabola(self):
        x, v = golden_section_min(lambda x: (x - 2.0) ** 2, 0.0, 5.0)
        assert x == pytest.approx(2.0, abs=1e-9)
        assert v == pytest.approx(0.0, abs=1e-15)

    def test_boundary_minimum(self):
        x, v = golden_section_min(lambda x: x, 1.0, 3.0)
        assert x == pytest.approx(1.0, abs=1e-6)
        assert v == pytest.approx(1.0, abs=1e-6)


class TestCompositeSimpsonVec:
    def test_polynomial_exact(self):
        # Simpson is exact on cubics
        val = composite_simpson_vec(lambda x: x**3, 0.0, 2.0, 8)
        assert val == pytest.approx(4.0, abs=1e-13)

    def test_matches_adaptive(self):
        f = lambda x: np.exp(-x) * np.log1p(x)
        ref = adaptive_simpson(lambda x: math.exp(-x) * math.log1p(x), 0.0, 10.0, tol=1e-12)
        assert composite_simpson_vec(f, 0.0, 10.0, 4096) == pytest.approx(ref, abs=1e-11)

    def test_leading_axes_broadcast(self):
        scales = np.array([1.0, 2.0, 3.0])[:, None]
        out = composite_simpson_vec(lambda x: scales * x, 0.0, 1.0, 16)
        assert out.shape == (3,)
        np.testing.assert_allclose(out, [0.5, 1.0, 1.5], atol=1e-14)

    def test_odd_panel_count_rejected(self):
        with pytest.raises(ValueError):
            composite_simpson_vec(lambda x: x, 0.0, 1.0, 7)
