"""
Projector distortion statistics and the sampled inertial form.
Run with:  pytest test/test_mane.py -v
"""

import numpy as np
import pytest

from cglhub import Nonlinearity
from cglhub.core.exceptions import InertialFormError
from cglhub.dynamics import AttractorSample, CGLParams
from cglhub.mane import build_inertial_form, distortion_stats, inertial_form_rhs, lift, track_error
from cglhub.spectral import GridSpec, SpectralField, random_field


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def linear_params(M=4, coeff=-0.3 + 0.1j):
    return CGLParams(omega=1.0, f_spec=Nonlinearity.create("linear", coeff=coeff), grid=GridSpec(M), dt=0.05)


def make_sample(params, points):
    n = len(points)
    return AttractorSample(params=params, points=np.stack(points), times=np.zeros(n),
                           point_seeds=np.arange(n), burn_in=0.0)


def random_sample(params, n=10, seed=0):
    rng = np.random.default_rng(seed)
    return make_sample(params, [random_field(params.grid, rng).coeffs for _ in range(n)])


# ===========================================================================
# 1. DISTORTION
# ===========================================================================

class TestDistortion:
    def test_low_mode_difference_is_undistorted(self):
        g = GridSpec(4)
        pts = np.stack([SpectralField.zeros(g).coeffs, SpectralField.delta(g, (0, 0, 0)).coeffs])
        stats = distortion_stats(pts, 1, grid=g)
        assert stats.min_ratio == pytest.approx(1.0)
        assert stats.max_ratio == pytest.approx(1.0)
        assert stats.l2_median_ratio == pytest.approx(1.0)
        assert stats.injective_flag

    def test_high_mode_difference_is_invisible(self):
        g = GridSpec(4)
        pts = np.stack([SpectralField.zeros(g).coeffs, SpectralField.delta(g, (1, 1, 0)).coeffs])
        stats = distortion_stats(pts, 1, grid=g)
        assert stats.max_ratio == 0.0
        assert not stats.injective_flag

    def test_ratios_grow_with_N(self):
        sample = random_sample(linear_params())
        low, high = distortion_stats(sample, 0), distortion_stats(sample, 3)
        assert low.median_ratio <= high.median_ratio
        assert high.min_ratio == pytest.approx(1.0)

    def test_pair_subsampling(self):
        sample = random_sample(linear_params(), n=6)
        assert distortion_stats(sample, 1).pair_count == 15
        s1 = distortion_stats(sample, 1, max_pairs=4, seed=2)
        s2 = distortion_stats(sample, 1, max_pairs=4, seed=2, workers=2)
        assert s1.pair_count == 4
        assert s1 == s2

    def test_degenerate_pairs_counted(self):
        g = GridSpec(4)
        one = SpectralField.delta(g, (1, 0, 0)).coeffs
        pts = np.stack([one, one, 2 * one])
        stats = distortion_stats(pts, 1, grid=g)
        assert stats.degenerate_pairs == 1
        assert stats.pair_count == 2

    def test_invalid(self):
        g = GridSpec(4)
        with pytest.raises(ValueError):
            distortion_stats(np.zeros((3,) + g.shape), 1)
        with pytest.raises(ValueError):
            distortion_stats(np.zeros((1,) + g.shape), 1, grid=g)
        with pytest.raises(ValueError):
            distortion_stats(np.zeros((2,) + g.shape), 1, grid=g)

    def test_to_dict(self):
        stats = distortion_stats(random_sample(linear_params(), n=4), 1)
        d = stats.to_dict()
        assert d["N"] == 1
        assert d["pair_count"] == 6


# ===========================================================================
# 2. INERTIAL FORM
# ===========================================================================

class TestInertialForm:
    def test_basis(self):
        params = linear_params()
        form = build_inertial_form(random_sample(params), 1)
        assert form.dimension == 7
        assert form.basis[0] == (-1, 0, 0)
        assert form.injective

    def test_lift_reproduces_sample_points(self):
        params = linear_params()
        sample = random_sample(params)
        form = build_inertial_form(sample, 1)
        out = lift(form.coords[3], form)
        np.testing.assert_allclose(out.field.coeffs, sample.points[3], atol=1e-12)
        assert not out.extrapolated
        assert out.nn_distance == 0.0

    def test_lift_wrong_dimension(self):
        form = build_inertial_form(random_sample(linear_params()), 1)
        with pytest.raises(ValueError):
            lift(np.zeros(3), form)

    def test_rhs_for_linear_f(self):
        coeff = -0.3 + 0.1j
        params = linear_params(coeff=coeff)
        form = build_inertial_form(random_sample(params), 1)
        c = form.coords[0]
        rhs, extrapolated = inertial_form_rhs(c, form, params)
        lam = np.array([sum(x * x for x in k) for k in form.basis])
        np.testing.assert_allclose(rhs, (-(1 + 1j) * lam + coeff) * c, atol=1e-12)
        assert not extrapolated

    def test_tracks_full_equation_for_linear_f(self):
        params = linear_params()
        form = build_inertial_form(random_sample(params), 1)
        report = track_error(form, params, 0.5, start=2)
        assert len(report.times) == 11
        assert report.max_error < 1e-12
        assert report.to_dict()["steps"] == 10

    def test_lift_converges_on_graph_as_sample_grows(self):
        params = linear_params()
        g = params.grid
        low = SpectralField.delta(g, (1, 0, 0)).coeffs
        high = SpectralField.delta(g, (1, 1, 0)).coeffs
        query = 1.0 / 3.0
        errors = []
        for n in (9, 17, 33, 65):
            s = np.linspace(-1.0, 1.0, n)
            form = build_inertial_form(make_sample(params, [x * low + x ** 2 * high for x in s]), 1)
            assert form.injective
            out = lift(form.project(query * low), form)
            errors.append(abs(out.field[(1, 1, 0)] - query ** 2))
        assert all(b < a for a, b in zip(errors, errors[1:]))
        assert errors[-1] < 0.05 * errors[0]

    def test_one_step_consistency_for_cubic_f(self):
        f = Nonlinearity.create("cubic_cgl", beta=0.5, delta=1.0)
        params = CGLParams(omega=1.0, f_spec=f, grid=GridSpec(4), dt=0.02, integrator="etd1")
        form = build_inertial_form(random_sample(params, seed=4), 1)
        report = track_error(form, params, params.dt, start=5)
        assert len(report.times) == 2
        assert report.final_error < 1e-12

    def test_tracks_cubic_f_on_plane_wave_manifold(self):
        f = Nonlinearity.create("cubic_cgl", beta=0.5, delta=1.0)
        params = CGLParams(omega=1.0, f_spec=f, grid=GridSpec(4), dt=0.05)
        wave = SpectralField.delta(params.grid, (1, 0, 0)).coeffs
        amps = [complex(x, y) for x in np.linspace(-0.8, 0.8, 9) for y in np.linspace(-0.8, 0.8, 9)]
        form = build_inertial_form(make_sample(params, [A * wave for A in amps]), 1)
        report = track_error(form, params, 0.23, start=70)
        np.testing.assert_allclose(report.times, [0.0, 0.05, 0.1, 0.15, 0.2, 0.23])
        assert report.max_error < 1e-12

    def test_partial_final_step(self):
        params = linear_params()
        form = build_inertial_form(random_sample(params), 1)
        report = track_error(form, params, 0.12, start=1)
        assert report.times[-1] == pytest.approx(0.12)
        assert report.to_dict()["steps"] == 3
        assert report.max_error < 1e-12

    def test_non_injective_lift_refused(self):
        params = linear_params()
        g = params.grid
        base = SpectralField.constant(g, 0.2).coeffs
        high = SpectralField.delta(g, (1, 1, 0)).coeffs
        form = build_inertial_form(make_sample(params, [base + s * high for s in (0.0, 0.5, 1.0)]), 1)
        assert not form.injective
        with pytest.raises(InertialFormError):
            lift(form.coords[0], form)
        assert lift(form.coords[0], form, allow_non_injective=True).field.grid == g

    def test_track_arguments(self):
        params = linear_params()
        form = build_inertial_form(random_sample(params), 1)
        with pytest.raises(ValueError):
            track_error(form, params, -1.0)
        with pytest.raises(ValueError):
            track_error(form, params, 1.0, start=50)
