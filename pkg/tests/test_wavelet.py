import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wesma.wavelet import (FILTERS, WaveletError, dilated_circular_convolve, get_filter,
                           max_level, read_decomposition_csv, uwt_forward, uwt_inverse,
                           write_decomposition_csv)

R2 = 1 / math.sqrt(2)


def brute_convolve(x, taps, dilation):
    n = len(x)
    return np.array([sum(taps[k] * x[(i - dilation * k) % n] for k in range(len(taps)))
                     for i in range(n)])


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestFilters:
    @pytest.mark.parametrize("name", sorted(FILTERS))
    def test_quadrature_mirror(self, name):
        f = get_filter(name)
        L = len(f)
        for k in range(L):
            assert f.dec_high[k] == (-1) ** k * f.dec_low[L - 1 - k]

    @pytest.mark.parametrize("name", sorted(FILTERS))
    def test_orthonormal_lowpass(self, name):
        h = get_filter(name).dec_low
        assert h.sum() == pytest.approx(math.sqrt(2), abs=1e-15)
        assert (h ** 2).sum() == pytest.approx(1.0, abs=1e-15)

    def test_haar_taps(self):
        np.testing.assert_array_equal(get_filter("haar").dec_low, [R2, R2])

    def test_db2_vanishing_moments(self):
        g = get_filter("db2").dec_high
        k = np.arange(4)
        assert abs(g.sum()) < 1e-15
        assert abs((k * g).sum()) < 1e-14

    @pytest.mark.parametrize("name", sorted(FILTERS))
    def test_single_level_round_trip(self, name):
        x = np.random.default_rng(3).normal(size=32)
        dec = uwt_forward(x, name, 1)
        assert np.max(np.abs(uwt_inverse(dec) - x)) < 1e-10

    def test_filters_are_read_only(self):
        with pytest.raises(ValueError):
            get_filter("haar").dec_low[0] = 0.0

    def test_unknown(self):
        with pytest.raises(WaveletError):
            get_filter("sym8")


class TestConvolve:
    def test_impulse_places_taps_at_dilated_positions(self, backend):
        x = np.zeros(8)
        x[0] = 1.0
        y = dilated_circular_convolve(x, [2.0, 3.0], 2)
        np.testing.assert_array_equal(y, [2, 0, 3, 0, 0, 0, 0, 0])

    @pytest.mark.parametrize("dilation", [1, 2, 4])
    def test_highpass_annihilates_constants(self, backend, dilation):
        y = dilated_circular_convolve(np.full(16, 3.7), get_filter("haar").dec_high, dilation)
        assert np.all(y == 0.0)

    def test_hand_example(self, backend):
        y = dilated_circular_convolve([1, 2, 3, 4], [R2, R2], 1)
        expected = [(1 + 4) * R2, (2 + 1) * R2, (3 + 2) * R2, (4 + 3) * R2]
        np.testing.assert_allclose(y, expected, atol=1e-15)
        np.testing.assert_allclose(y, [3.5355, 2.1213, 3.5355, 4.9497], atol=1e-4)

    @pytest.mark.parametrize("n,dilation,L", [(7, 1, 3), (16, 4, 4), (33, 8, 2), (100, 32, 4)])
    def test_matches_brute_force(self, backend, n, dilation, L):
        rng = np.random.default_rng(n)
        x, taps = rng.normal(size=n), rng.normal(size=L)
        np.testing.assert_allclose(dilated_circular_convolve(x, taps, dilation),
                                   brute_convolve(x, taps, dilation), atol=1e-12)

    def test_dilation_too_large(self):
        with pytest.raises(WaveletError, match="dilation exceeds signal length"):
            dilated_circular_convolve(np.ones(8), [1, 1, 1, 1], 4)

    def test_dilation_not_power_of_two(self):
        with pytest.raises(WaveletError):
            dilated_circular_convolve(np.ones(8), [1, 1], 3)

    def test_rejects_nan(self):
        with pytest.raises(WaveletError):
            dilated_circular_convolve([1.0, float("nan")], [1.0], 1)


class TestForwardInverse:
    def test_constant_haar(self):
        dec = uwt_forward([1, 1, 1, 1], "haar", 1)
        np.testing.assert_array_equal(dec.details[0], [0, 0, 0, 0])
        np.testing.assert_allclose(dec.approx, [math.sqrt(2)] * 4, atol=1e-15)
        np.testing.assert_allclose(uwt_inverse(dec), [1, 1, 1, 1], atol=1e-10)

    def test_all_zero_subbands(self):
        dec = uwt_forward(np.zeros(16), "db2", 2)
        assert np.all(uwt_inverse(dec) == 0)

    def test_subband_lengths(self):
        dec = uwt_forward(np.arange(64.0), "db2", 3)
        assert dec.levels == 3
        assert all(len(b) == 64 for b in dec.subbands())
        assert dec.n_values() == 4 * 64

    def test_db2_random_round_trip(self):
        x = np.random.default_rng(1).normal(size=64)
        assert np.max(np.abs(uwt_inverse(uwt_forward(x, "db2", 3)) - x)) < 1e-8

    def test_too_many_levels(self):
        with pytest.raises(WaveletError, match="insufficient length for J levels"):
            uwt_forward(np.ones(8), "haar", 4)

    def test_malformed(self):
        dec = uwt_forward(np.ones(8), "haar", 2)
        bad = type(dec)((dec.details[0][:4], dec.details[1]), dec.approx, "haar")
        with pytest.raises(WaveletError, match="malformed decomposition"):
            uwt_inverse(bad)

    def test_filter_mismatch(self):
        with pytest.raises(WaveletError):
            uwt_inverse(uwt_forward(np.ones(8), "haar", 1), "db2")

    @pytest.mark.parametrize("n,name,expected", [(16, "haar", 4), (16, "db2", 3),
                                                 (100, "db2", 6), (1024, "db2", 9),
                                                 (1024, "haar", 10), (2, "haar", 1)])
    def test_max_level(self, n, name, expected):
        assert max_level(n, name) == expected

    def test_csv_round_trip(self, tmp_path):
        dec = uwt_forward(np.random.default_rng(0).normal(size=16), "db2", 2)
        path = tmp_path / "dec.csv"
        write_decomposition_csv(path, dec)
        assert path.read_text().splitlines()[0] == "level,index,value"
        back = read_decomposition_csv(path, "db2")
        for a, b in zip(back.subbands(), dec.subbands()):
            np.testing.assert_array_equal(a, b)


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, st.sampled_from([8, 16, 24, 64]), elements=finite),
           st.sampled_from(sorted(FILTERS)), st.data())
    def test_perfect_reconstruction(self, x, name, data):
        J = data.draw(st.integers(1, max_level(len(x), name)))
        err = np.max(np.abs(uwt_inverse(uwt_forward(x, name, J)) - x))
        assert err < 1e-8 * max(1.0, np.max(np.abs(x)))

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, 32, elements=finite), st.integers(0, 31),
           st.sampled_from(sorted(FILTERS)))
    def test_shift_equivariance(self, x, s, name):
        a = uwt_forward(np.roll(x, s), name, 3)
        b = uwt_forward(x, name, 3)
        for sa, sb in zip(a.subbands(), b.subbands()):
            np.testing.assert_allclose(sa, np.roll(sb, s), atol=1e-10 * max(1, np.abs(x).max()))

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, 16, elements=finite), arrays(np.float64, 16, elements=finite),
           finite, finite)
    def test_linearity(self, x, y, alpha, beta):
        lhs = uwt_forward(alpha * x + beta * y, "db2", 2)
        rx, ry = uwt_forward(x, "db2", 2), uwt_forward(y, "db2", 2)
        scale = max(1.0, abs(alpha) * np.abs(x).max() + abs(beta) * np.abs(y).max())
        for a, bx, by in zip(lhs.subbands(), rx.subbands(), ry.subbands()):
            np.testing.assert_allclose(a, alpha * bx + beta * by, atol=1e-10 * scale)

    @pytest.mark.parametrize("name,tol", [("haar", 0.0), ("db2", 1e-12)])
    def test_constant_details_vanish(self, name, tol):
        dec = uwt_forward(np.full(64, -2.5), name, 4)
        for d in dec.details:
            assert np.max(np.abs(d)) <= tol

    def test_scaling_doubles(self):
        x = np.random.default_rng(2).normal(size=32)
        a, b = uwt_forward(2 * x, "haar", 3), uwt_forward(x, "haar", 3)
        for sa, sb in zip(a.subbands(), b.subbands()):
            np.testing.assert_allclose(sa, 2 * sb, atol=1e-12)
