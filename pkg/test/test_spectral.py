"""
Grid transforms, norms, nonlinearities and the CGLF file format.
Run with:  pytest test/test_spectral.py -v
"""

import itertools
import math
import struct

import numpy as np
import pytest

from cglhub import Nonlinearity
from cglhub.core.exceptions import BlowUpError, GridError
from cglhub.spectral import (VOLUME_FACTOR, GridSpec, SpectralField, apply_laplacian, inner, l2_norm,
                             nonlinear_term, nonlinearity_eval, project, random_field, read_field,
                             read_series, sobolev_norm, spatial_average, transform, write_field,
                             write_series)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def retained_random(grid, seed=0):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return SpectralField(grid, c * grid.retained_mask)


# ===========================================================================
# 1. GRID
# ===========================================================================

class TestGrid:
    @pytest.mark.parametrize("M", [2, 5, 7, 6.5])
    def test_invalid_size(self, M):
        with pytest.raises(GridError):
            GridSpec(M)

    def test_cutoffs(self):
        g = GridSpec(16)
        assert g.cutoff == 7
        assert g.dealias_cutoff == 5
        assert int(g.retained_mask.sum()) == 15 ** 3
        assert int(g.dealias_mask.sum()) == 11 ** 3

    def test_low_mask(self):
        g = GridSpec(8)
        assert int(g.low_mask(0).sum()) == 1
        assert int(g.low_mask(1).sum()) == 7
        assert int(g.low_mask(2).sum()) == 19

    def test_index_rejects_nyquist(self):
        g = GridSpec(8)
        assert g.index((-1, 0, 3)) == (7, 0, 3)
        with pytest.raises(GridError):
            g.index((4, 0, 0))


# ===========================================================================
# 2. TRANSFORMS AND NORMS
# ===========================================================================

class TestTransforms:
    def test_roundtrip(self):
        g = GridSpec(8)
        f = retained_random(g)
        back = transform(transform(f, "to_physical"), "to_spectral", g)
        assert back.allclose(f, rtol=0, atol=1e-12)

    def test_single_mode_is_plane_wave(self):
        g = GridSpec(8)
        x1, x2, x3 = g.points
        samples = SpectralField.delta(g, (1, -2, 0)).to_physical()
        expected = np.exp(1j * (x1 - 2 * x2 + 0 * x3)) * np.ones(g.shape)
        np.testing.assert_allclose(samples, expected, atol=1e-12)

    def test_constant(self):
        g = GridSpec(4)
        f = SpectralField.constant(g, 0.5 - 2j)
        np.testing.assert_allclose(f.to_physical(), np.full(g.shape, 0.5 - 2j), atol=1e-14)
        assert spatial_average(f) == 0.5 - 2j

    def test_unknown_direction(self):
        g = GridSpec(4)
        with pytest.raises(ValueError):
            transform(SpectralField.zeros(g), "sideways")
        with pytest.raises(GridError):
            transform(np.zeros(g.shape), "to_spectral")

    def test_l2_norm_matches_physical_integral(self):
        g = GridSpec(8)
        f = retained_random(g, seed=3)
        samples = f.to_physical()
        cell = (2 * math.pi / g.M) ** 3
        assert f.norm() == pytest.approx(math.sqrt(cell * np.sum(np.abs(samples) ** 2)), rel=1e-12)
        assert SpectralField.constant(g, 1.0).norm() == pytest.approx(VOLUME_FACTOR)

    def test_sobolev(self):
        g = GridSpec(8)
        assert sobolev_norm(SpectralField.constant(g, 1.0), 2) == pytest.approx(VOLUME_FACTOR)
        assert sobolev_norm(SpectralField.delta(g, (1, 0, 0)), 2) == pytest.approx(2 * VOLUME_FACTOR)
        with pytest.raises(ValueError):
            sobolev_norm(SpectralField.zeros(g), -1)

    def test_laplacian(self):
        g = GridSpec(8)
        out = apply_laplacian(SpectralField.delta(g, (1, 2, 0), 3.0), factor=1 + 1j)
        assert out[(1, 2, 0)] == pytest.approx(-5 * 3.0 * (1 + 1j))

    def test_project(self):
        g = GridSpec(8)
        f = retained_random(g, seed=1)
        p = project(f, [(0, 0, 0), (1, 0, 0)])
        assert np.count_nonzero(p.coeffs) == 2
        assert p[(1, 0, 0)] == f[(1, 0, 0)]

    def test_inner_and_l2(self):
        g = GridSpec(4)
        f = SpectralField.delta(g, (1, 0, 0), 2.0)
        assert inner(f, f) == 4.0
        assert l2_norm(np.stack([f.coeffs, 2 * f.coeffs])).tolist() == pytest.approx(
            [2 * VOLUME_FACTOR, 4 * VOLUME_FACTOR])

    def test_random_field(self):
        g = GridSpec(8)
        f = random_field(g, np.random.default_rng(0), amplitude=0.7)
        assert np.sqrt(np.sum(np.abs(f.coeffs) ** 2)) == pytest.approx(0.7)
        assert not np.any(f.coeffs[~g.dealias_mask])
        again = random_field(g, np.random.default_rng(0), amplitude=0.7)
        assert np.array_equal(f.coeffs, again.coeffs)

    def test_fields_are_immutable(self):
        f = SpectralField.zeros(GridSpec(4))
        with pytest.raises(ValueError):
            f.coeffs[0, 0, 0] = 1.0

    def test_grid_mismatch(self):
        with pytest.raises(GridError):
            SpectralField.zeros(GridSpec(4)) + SpectralField.zeros(GridSpec(6))


# ===========================================================================
# 3. NONLINEARITIES
# ===========================================================================

class TestNonlinearity:
    def test_registry(self):
        assert {"cubic_cgl", "linear", "zero", "pointwise"} <= set(Nonlinearity.available())
        f = Nonlinearity.create("cubic_cgl", beta=2.0)
        assert f.config.beta == 2.0
        with pytest.raises(ValueError):
            Nonlinearity.create("quintic")

    def test_pointwise_needs_callable(self):
        with pytest.raises(ValueError):
            Nonlinearity.create("pointwise")

    def test_cubic_on_constant(self):
        g = GridSpec(4)
        f = Nonlinearity.create("cubic_cgl", beta=0.5, delta=1.0)
        c = 0.5 + 0.25j
        out = nonlinearity_eval(SpectralField.constant(g, c), f)
        expected = (1 + 0.5j) * c - (1 + 1j) * c * abs(c) ** 2
        assert out[(0, 0, 0)] == pytest.approx(expected, abs=1e-14)
        assert np.count_nonzero(np.abs(out.coeffs) > 1e-14) == 1

    def test_linear_and_zero(self):
        g = GridSpec(4)
        u = retained_random(g)
        lin = Nonlinearity.create("linear", coeff=-2 + 1j)
        out = nonlinear_term(g, lin, u.coeffs)
        np.testing.assert_allclose(out, (-2 + 1j) * u.coeffs * g.dealias_mask, atol=1e-12)
        assert not np.any(nonlinear_term(g, Nonlinearity.create("zero"), u.coeffs))

    def test_dealias_truncation(self):
        g = GridSpec(8)
        u = SpectralField.delta(g, (2, 0, 0)) + SpectralField.delta(g, (0, 2, 1))
        out = nonlinearity_eval(u, Nonlinearity.create("cubic_cgl"))
        assert not np.any(out.coeffs[~g.dealias_mask])

    def test_cubic_on_plane_wave(self):
        g = GridSpec(8)
        f = Nonlinearity.create("cubic_cgl", beta=0.5, delta=1.0)
        out = nonlinearity_eval(SpectralField.delta(g, (1, 0, 0)), f)
        # |e^{ix1}|^2 e^{ix1} = e^{ix1}
        assert out[(1, 0, 0)] == pytest.approx((1 + 0.5j) - (1 + 1j), abs=1e-13)
        assert np.count_nonzero(np.abs(out.coeffs) > 1e-13) == 1

    def test_cubic_matches_triple_convolution(self):
        g = GridSpec(8)
        rng = np.random.default_rng(5)
        band = [(a, b, c) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1)]
        amp = {k: complex(*rng.standard_normal(2)) for k in band}
        coeffs = np.zeros(g.shape, complex)
        for k, v in amp.items():
            coeffs[g.index(k)] = v

        expected = coeffs.copy()
        for p, q, r in itertools.product(band, repeat=3):
            k = tuple(pi - qi + ri for pi, qi, ri in zip(p, q, r))
            if max(abs(c) for c in k) <= g.dealias_cutoff:
                expected[g.index(k)] -= amp[p] * np.conj(amp[q]) * amp[r]

        out = nonlinear_term(g, Nonlinearity.create("cubic_cgl", beta=0.0, delta=0.0), coeffs)
        np.testing.assert_allclose(out, expected, atol=1e-11)

    def test_non_finite_input(self):
        g = GridSpec(4)
        bad = SpectralField.constant(g, complex(np.nan, 0))
        with pytest.raises(BlowUpError):
            nonlinearity_eval(bad, Nonlinearity.create("cubic_cgl"))

    def test_cubic_derivatives_match_finite_differences(self):
        cubic = Nonlinearity.create("cubic_cgl", beta=0.3, delta=-0.7)
        numeric = Nonlinearity.create("pointwise", func=cubic.evaluate)
        psi = np.random.default_rng(2).standard_normal(10) + 1j * np.random.default_rng(3).standard_normal(10)
        np.testing.assert_allclose(numeric.d_psi(psi), cubic.d_psi(psi), atol=1e-7)
        np.testing.assert_allclose(numeric.d_psibar(psi), cubic.d_psibar(psi), atol=1e-7)

    def test_defocusing_flag(self):
        cubic = Nonlinearity.create("cubic_cgl", delta=1.0)
        assert cubic.is_defocusing(1.0)
        assert not cubic.is_defocusing(-1.0)


# ===========================================================================
# 4. CGLF FILES
# ===========================================================================

class TestCGLF:
    def test_field_roundtrip(self, tmp_path):
        g = GridSpec(8)
        f = retained_random(g)
        path = write_field(tmp_path / "f.cglf", f)
        back = read_field(path)
        assert back.grid == g
        assert back.allclose(f, rtol=0, atol=1e-6)

    def test_header_layout(self, tmp_path):
        g = GridSpec(4)
        path = write_field(tmp_path / "f.cglf", SpectralField.constant(g, 1.0))
        raw = path.read_bytes()
        assert struct.unpack("<4sIIQ", raw[:20]) == (b"CGLF", 1, 4, 64)
        assert len(raw) == 20 + 64 * 8
        # lexicographic order puts k = (0, 0, 0) at flat index 2*16 + 2*4 + 2
        coeffs = np.frombuffer(raw[20:], dtype="<c8")
        assert coeffs[2 * 16 + 2 * 4 + 2] == 1.0

    def test_series_roundtrip(self, tmp_path):
        g = GridSpec(4)
        states = np.stack([retained_random(g, s).coeffs for s in range(3)])
        path = write_series(tmp_path / "s.cglf", g, [0.0, 0.5, 1.0], states)
        grid, times, back = read_series(path)
        assert grid == g
        assert times.tolist() == [0.0, 0.5, 1.0]
        np.testing.assert_allclose(back, states, atol=1e-6)

    def test_version_mismatch(self, tmp_path):
        g = GridSpec(4)
        path = write_series(tmp_path / "s.cglf", g, [0.0], np.zeros((1,) + g.shape))
        with pytest.raises(GridError):
            read_field(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.cglf"
        path.write_bytes(b"NOPE" + bytes(40))
        with pytest.raises(GridError):
            read_field(path)
