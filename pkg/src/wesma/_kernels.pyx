# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures mirror :mod:`wesma._pykernels`."""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log1p

cnp.import_array()


def dilated_convolve(const double[::1] x, const double[::1] taps, Py_ssize_t dilation):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t L = taps.shape[0]
    cdef Py_ssize_t k, i, shift
    cdef double t
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] y = out
    for k in range(L):
        t = taps[k]
        shift = (dilation * k) % n
        # y[i] += t * x[i - shift], split to avoid a modulo per sample
        for i in range(shift, n):
            y[i] += t * x[i - shift]
        for i in range(shift):
            y[i] += t * x[n - shift + i]
    return out


cdef inline double _softplus(double z) nogil:
    # log(1 + exp(z)) without overflow
    if z > 0:
        return z + log1p(exp(-z))
    return log1p(exp(z))


cdef inline double _sigmoid(double z) nogil:
    cdef double e
    if z >= 0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


def cbow_epoch(double[:, ::1] w_in, double[:, ::1] w_out,
               const cnp.int64_t[::1] tokens, const cnp.int64_t[::1] offsets,
               Py_ssize_t window, const cnp.int64_t[:, ::1] negatives, double lr):
    cdef Py_ssize_t d = w_in.shape[1]
    cdef Py_ssize_t k = negatives.shape[1]
    cdef Py_ssize_t n_docs = offsets.shape[0] - 1
    cdef Py_ssize_t doc, start, end, i, j, c, lo, hi, n_ctx, t, pair = 0
    cdef double loss = 0.0, f, g, inv
    h_arr = np.empty(d, dtype=np.float64)
    gh_arr = np.empty(d, dtype=np.float64)
    g_arr = np.empty(k + 1, dtype=np.float64)
    tg_arr = np.empty(k + 1, dtype=np.int64)
    cdef double[::1] h = h_arr
    cdef double[::1] grad_h = gh_arr
    cdef double[::1] gs = g_arr
    cdef cnp.int64_t[::1] targets = tg_arr

    for doc in range(n_docs):
        start = offsets[doc]
        end = offsets[doc + 1]
        if end - start < 2:
            continue
        for i in range(start, end):
            lo = i - window if i - window > start else start
            hi = i + window + 1 if i + window + 1 < end else end
            n_ctx = hi - lo - 1
            inv = 1.0 / n_ctx
            for j in range(d):
                h[j] = 0.0
                grad_h[j] = 0.0
            for c in range(lo, hi):
                if c == i:
                    continue
                for j in range(d):
                    h[j] += w_in[tokens[c], j]
            for j in range(d):
                h[j] *= inv

            targets[0] = tokens[i]
            for t in range(k):
                targets[t + 1] = negatives[pair, t]
            # gradients use the pre-update output rows
            for t in range(k + 1):
                f = 0.0
                for j in range(d):
                    f += h[j] * w_out[targets[t], j]
                if t == 0:
                    loss += _softplus(-f)
                    g = _sigmoid(f) - 1.0
                else:
                    loss += _softplus(f)
                    g = _sigmoid(f)
                gs[t] = g
                for j in range(d):
                    grad_h[j] += g * w_out[targets[t], j]
            for t in range(k + 1):
                g = lr * gs[t]
                for j in range(d):
                    w_out[targets[t], j] -= g * h[j]
            for c in range(lo, hi):
                if c == i:
                    continue
                for j in range(d):
                    w_in[tokens[c], j] -= lr * inv * grad_h[j]
            pair += 1
    return loss, pair


def gauss_eliminate(double[:, ::1] M, double[:, ::1] Z, double tol):
    """In-place solve of M X = Z (partial pivoting); X is left in Z.

    Returns -1 on success, else the column whose pivot fell below ``tol``.
    """
    cdef Py_ssize_t n = M.shape[0]
    cdef Py_ssize_t r = Z.shape[1]
    cdef Py_ssize_t col, row, piv, j
    cdef double best, f, tmp, p
    for col in range(n):
        piv = col
        best = abs(M[col, col])
        for row in range(col + 1, n):
            if abs(M[row, col]) > best:
                best = abs(M[row, col])
                piv = row
        if best <= tol:
            return col
        if piv != col:
            for j in range(n):
                tmp = M[col, j]; M[col, j] = M[piv, j]; M[piv, j] = tmp
            for j in range(r):
                tmp = Z[col, j]; Z[col, j] = Z[piv, j]; Z[piv, j] = tmp
        p = M[col, col]
        for row in range(col + 1, n):
            f = M[row, col] / p
            if f == 0.0:
                continue
            M[row, col] = 0.0
            for j in range(col + 1, n):
                M[row, j] -= f * M[col, j]
            for j in range(r):
                Z[row, j] -= f * Z[col, j]
    for row in range(n - 1, -1, -1):
        for col in range(row + 1, n):
            f = M[row, col]
            if f == 0.0:
                continue
            for j in range(r):
                Z[row, j] -= f * Z[col, j]
        p = M[row, row]
        for j in range(r):
            Z[row, j] /= p
    return -1
