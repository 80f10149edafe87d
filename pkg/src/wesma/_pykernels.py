"""Pure-Python/numpy implementations of the inner loops.

Used when the compiled extension is unavailable. Results agree with
:mod:`wesma._kernels` to rounding error, not bit-for-bit.
"""
import numpy as np


def dilated_convolve(x, taps, dilation):
    n = x.shape[0]
    y = np.zeros(n, dtype=np.float64)
    for k, t in enumerate(taps):
        y += t * np.roll(x, dilation * k)
    return y


def _softplus(z):
    return np.logaddexp(0.0, z)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def cbow_epoch(w_in, w_out, tokens, offsets, window, negatives, lr):
    k = negatives.shape[1]
    labels = np.zeros(k + 1)
    labels[0] = 1.0
    targets = np.empty(k + 1, dtype=np.int64)
    loss = 0.0
    pair = 0
    for doc in range(len(offsets) - 1):
        start, end = int(offsets[doc]), int(offsets[doc + 1])
        if end - start < 2:
            continue
        for i in range(start, end):
            lo = max(start, i - window)
            hi = min(end, i + window + 1)
            ctx = np.concatenate((tokens[lo:i], tokens[i + 1:hi]))
            h = w_in[ctx].mean(axis=0)
            targets[0] = tokens[i]
            targets[1:] = negatives[pair]
            rows = w_out[targets]
            f = rows @ h
            loss += float(_softplus(-f[0]) + _softplus(f[1:]).sum())
            g = _sigmoid(f) - labels
            grad_h = g @ rows
            np.add.at(w_out, targets, -lr * np.outer(g, h))
            np.add.at(w_in, ctx, -(lr / len(ctx)) * grad_h)
            pair += 1
    return loss, pair


def gauss_eliminate(M, Z, tol):
    n = M.shape[0]
    for col in range(n):
        piv = col + int(np.argmax(np.abs(M[col:, col])))
        if abs(M[piv, col]) <= tol:
            return col
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
            Z[[col, piv]] = Z[[piv, col]]
        f = M[col + 1:, col] / M[col, col]
        M[col + 1:, col:] -= np.outer(f, M[col, col:])
        Z[col + 1:] -= np.outer(f, Z[col])
    for row in range(n - 1, -1, -1):
        Z[row] = (Z[row] - M[row, row + 1:] @ Z[row + 1:]) / M[row, row]
    return -1
