import numpy as np
import pytest

from wesma import _backend, _pykernels

pytestmark = pytest.mark.skipif("cython" not in _backend.available_backends(),
                                reason="compiled kernels not built")


def _compiled():
    from wesma import _kernels
    return _kernels


def test_default_prefers_compiled():
    assert _backend.available_backends()[0] == "cython"


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.use_backend("fortran")


@pytest.mark.parametrize("dilation", [1, 2, 8])
def test_convolve_agrees(dilation):
    x = np.random.default_rng(0).normal(size=64)
    taps = np.array([0.1, -0.4, 0.7, 0.2])
    np.testing.assert_allclose(_compiled().dilated_convolve(x, taps, dilation),
                               _pykernels.dilated_convolve(x, taps, dilation), atol=1e-14)


def test_cbow_epoch_agrees():
    rng = np.random.default_rng(1)
    V, d = 20, 6
    tokens = rng.integers(0, V, size=60).astype(np.int64)
    offsets = np.array([0, 10, 11, 35, 60], dtype=np.int64)
    n_pairs = 10 + 24 + 25
    negs = rng.integers(0, V, size=(n_pairs, 3)).astype(np.int64)
    w0 = rng.normal(0, 0.1, size=(V, d))
    results = []
    for mod in (_compiled(), _pykernels):
        w_in, w_out = w0.copy(), np.zeros((V, d))
        loss, count = mod.cbow_epoch(w_in, w_out, tokens, offsets, 2, negs, 0.05)
        results.append((loss, count, w_in, w_out))
    (l1, c1, i1, o1), (l2, c2, i2, o2) = results
    assert c1 == c2 == n_pairs
    assert l1 == pytest.approx(l2, rel=1e-12)
    np.testing.assert_allclose(i1, i2, atol=1e-12)
    np.testing.assert_allclose(o1, o2, atol=1e-12)


def test_gauss_agrees():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(25, 25))
    B = rng.normal(size=(25, 3))
    outs = []
    for mod in (_compiled(), _pykernels):
        M, Z = A.copy(), B.copy()
        assert mod.gauss_eliminate(M, Z, 1e-12) == -1
        outs.append(Z)
    np.testing.assert_allclose(outs[0], outs[1], atol=1e-10)
    np.testing.assert_allclose(outs[0], np.linalg.solve(A, B), atol=1e-10)


def test_gauss_singular_column_reported():
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    for mod in (_compiled(), _pykernels):
        assert mod.gauss_eliminate(A.copy(), np.ones((2, 1)), 1e-12) == 1
