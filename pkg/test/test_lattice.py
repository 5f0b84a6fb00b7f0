"""
Lattice shells, separation search and coupling certificates.
Run with:  pytest test/test_lattice.py -v
"""

import itertools
import math

import numpy as np
import pytest

from cglhub.core.exceptions import LatticeError, SupportError
from cglhub.lattice import (ModeBand, WaveVector, certify_range, coupling_matrix, eigenvalue,
                            enumerate_shell, load_phi_hat, min_pair_separation, mode_band,
                            schur_bound, search_separated_N)
from cglhub.spectral import GridSpec


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def naive_shell(N, L):
    r = math.isqrt(N + L)
    out = [k for k in itertools.product(range(-r, r + 1), repeat=3)
           if N - L <= k[0] ** 2 + k[1] ** 2 + k[2] ** 2 <= N + L]
    return sorted(out)


def random_phi(rng, radius=2, count=6):
    phi = {}
    for _ in range(count):
        k = tuple(int(c) for c in rng.integers(-radius, radius + 1, size=3))
        phi[k] = complex(rng.standard_normal(), rng.standard_normal())
    return phi


# ===========================================================================
# 1. EIGENVALUES AND ENUMERATION
# ===========================================================================

class TestEnumeration:
    def test_eigenvalue(self):
        assert eigenvalue((1, 2, 2)) == 9
        assert WaveVector(0, -3, 4).eigenvalue == 25

    def test_unit_shell_lexicographic(self):
        assert enumerate_shell(1, 0) == (
            (-1, 0, 0), (0, -1, 0), (0, 0, -1), (0, 0, 1), (0, 1, 0), (1, 0, 0),
        )

    def test_corner_shell(self):
        shell = enumerate_shell(3, 0)
        assert len(shell) == 8
        assert all(abs(c) == 1 for k in shell for c in k)

    def test_empty_shell(self):
        # 7 is not a sum of three squares
        assert enumerate_shell(7, 0) == ()

    @pytest.mark.parametrize("N,L", [(1, 0), (5, 1), (10, 2), (26, 2), (50, 1), (100, 2)])
    def test_matches_naive_oracle(self, N, L):
        assert [tuple(k) for k in enumerate_shell(N, L)] == naive_shell(N, L)

    @pytest.mark.parametrize("N,L", [(2, 2), (3, 5), (4, -1)])
    def test_invalid_band_raises(self, N, L):
        with pytest.raises(LatticeError):
            enumerate_shell(N, L)


# ===========================================================================
# 2. SEPARATION
# ===========================================================================

class TestSeparation:
    def test_unit_shell_separation(self):
        assert min_pair_separation(enumerate_shell(1, 0)) == pytest.approx(math.sqrt(2))

    def test_fewer_than_two_points(self):
        assert min_pair_separation([]) == math.inf
        assert min_pair_separation([(1, 0, 0)]) == math.inf
        assert min_pair_separation([(1, 0, 0), (1, 0, 0)]) == math.inf

    def test_search(self):
        # N=3 (corners, gap 2), N=4 (axis points, gap 2 sqrt 2), N=7 (empty)
        assert search_separated_N(0, 1.5, 1, 7) == [3, 4, 7]

    def test_loose_separation_keeps_every_N(self):
        # distinct lattice points are at least 1 apart
        assert search_separated_N(1, 0.5, 2, 20) == list(range(2, 21))

    def test_search_threaded_matches_serial(self):
        assert search_separated_N(1, 1.5, 2, 40, workers=3) == search_separated_N(1, 1.5, 2, 40)

    def test_search_rejects_bad_range(self):
        with pytest.raises(LatticeError):
            search_separated_N(2, 1.0, 2, 10)
        with pytest.raises(LatticeError):
            search_separated_N(0, 1.0, 5, 4)


# ===========================================================================
# 3. MODE BANDS
# ===========================================================================

class TestModeBand:
    def test_partition_counts(self):
        band = mode_band(5, 2, GridSpec(8))
        assert band.cutoff == 3
        assert len(band.low) == 1 + 6 + 12
        assert len(band.intermediate) == 8 + 6 + 24 + 24
        assert len(band.low) + len(band.intermediate) + len(band.high) == 7 ** 3
        assert band.theta == 5.5
        assert (band.lower, band.upper) == (3, 7)

    def test_classify(self):
        band = mode_band(5, 2, 3)
        assert band.classify([0, 3, 7, 8]).tolist() == [0, 1, 1, 2]

    def test_invalid(self):
        with pytest.raises(LatticeError):
            mode_band(2, 2, 3)
        with pytest.raises(LatticeError):
            ModeBand(N=5, L=1, cutoff=1, low=(WaveVector(0, 0, 0),), intermediate=(WaveVector(0, 0, 0),),
                     high=())


# ===========================================================================
# 4. CERTIFICATES
# ===========================================================================

class TestCertificate:
    @pytest.mark.parametrize("N,L", [(5, 1), (9, 1), (14, 2), (26, 1)])
    def test_schur_dominates_operator_norm(self, N, L):
        rng = np.random.default_rng(N)
        for _ in range(20):
            phi = random_phi(rng)
            A = coupling_matrix(phi, N, L)
            cert = schur_bound(phi, N, L)
            assert np.linalg.norm(A, 2) <= cert.eps_bound * (1 + 1e-12) + 1e-14

    def test_coupling_entries(self):
        phi = {(1, -1, 0): 2.0 + 1j}
        A = coupling_matrix(phi, 1, 0)
        pts = enumerate_shell(1, 0)
        i, j = pts.index((1, 0, 0)), pts.index((0, 1, 0))
        assert A[i, j] == 2.0 + 1j
        assert np.all(np.diag(A) == 0)

    def test_no_phi_gives_zero(self):
        cert = schur_bound(None, 3, 0, rho=1.5)
        assert cert.eps_bound == 0.0
        assert cert.population == 8
        assert cert.min_separation == pytest.approx(2.0)
        assert cert.separated

    def test_support_beyond_truncation(self):
        with pytest.raises(SupportError):
            schur_bound({(20, 0, 0): 1.0}, 5, 1)

    def test_certify_range(self):
        certs = certify_range(0, 1.5, 1, 7)
        assert [c.N for c in certs] == [3, 4, 7]
        empty = certs[-1].to_dict()
        assert empty["population"] == 0
        assert empty["min_separation"] is None
        assert set(empty) == {"N", "L", "rho", "population", "min_separation", "eps_bound"}

    def test_load_phi_hat(self, tmp_path):
        path = tmp_path / "phi.txt"
        path.write_text("# k1 k2 k3 re im\n1 0 0 0.5 0\n-1 0 0 0.5 0\n1 0 0 0 1\n")
        phi = load_phi_hat(path)
        assert phi == {(1, 0, 0): 0.5 + 1j, (-1, 0, 0): 0.5 + 0j}

    def test_load_phi_hat_bad_columns(self, tmp_path):
        path = tmp_path / "phi.txt"
        path.write_text("1 0 0 0.5\n")
        with pytest.raises(ValueError):
            load_phi_hat(path)
