"""Undecimated (a trous) wavelet transform on periodic 1-D signals.

Each level filters the previous approximation with taps dilated by
``2**(j-1)`` instead of downsampling, so every subband keeps the input
length ``N``. Boundaries are circular, which makes the transform exactly
shift-equivariant and its inverse exact for orthogonal filters.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _backend
from .io import DataFormatError, fmt_float, write_atomic


class WaveletError(ValueError):
    pass


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WaveletFilter:
    """Orthogonal analysis/synthesis filter quadruple."""

    name: str
    dec_low: np.ndarray
    dec_high: np.ndarray
    rec_low: np.ndarray
    rec_high: np.ndarray

    @classmethod
    def from_lowpass(cls, name, lowpass):
        h = np.asarray(lowpass, dtype=np.float64)
        L = len(h)
        g = np.array([(-1) ** k * h[L - 1 - k] for k in range(L)])
        return cls(name, _frozen(h), _frozen(g), _frozen(h[::-1]), _frozen(g[::-1]))

    def __len__(self):
        return len(self.dec_low)


_S3 = math.sqrt(3.0)
_LOWPASS = {
    "haar": [1 / math.sqrt(2.0)] * 2,
    "db2": [(1 + _S3) / (4 * math.sqrt(2.0)), (3 + _S3) / (4 * math.sqrt(2.0)),
            (3 - _S3) / (4 * math.sqrt(2.0)), (1 - _S3) / (4 * math.sqrt(2.0))],
}
FILTERS = {name: WaveletFilter.from_lowpass(name, h) for name, h in _LOWPASS.items()}


def get_filter(name):
    try:
        return FILTERS[name]
    except KeyError:
        raise WaveletError(f"unknown wavelet {name!r}; supported: {sorted(FILTERS)}") from None


@dataclass(frozen=True)
class UwtDecomposition:
    details: tuple
    approx: np.ndarray
    filter_name: str
    boundary: str = "periodic"

    @property
    def levels(self):
        return len(self.details)

    @property
    def n(self):
        return len(self.approx)

    def subbands(self):
        """Details d_1..d_J followed by the approximation."""
        return list(self.details) + [self.approx]

    def n_values(self):
        return sum(len(b) for b in self.subbands())


def as_signal(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise WaveletError("signal must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(x)):
        raise WaveletError("signal contains non-finite samples")
    return x


def dilated_circular_convolve(x, taps, dilation):
    """``y[n] = sum_k taps[k] * x[(n - dilation*k) mod N]``."""
    x = as_signal(x)
    taps = np.ascontiguousarray(taps, dtype=np.float64)
    dilation = int(dilation)
    if dilation < 1 or dilation & (dilation - 1):
        raise WaveletError("dilation must be a positive power of two")
    if dilation * (len(taps) - 1) >= len(x):
        raise WaveletError("dilation exceeds signal length")
    return _backend.dilated_convolve(x, taps, dilation)


def _resolve(wavelet):
    return wavelet if isinstance(wavelet, WaveletFilter) else get_filter(wavelet)


def max_level(n, wavelet):
    """Deepest J with ``2**J <= n`` whose dilated taps still fit in ``n``."""
    L = len(_resolve(wavelet))
    J = 0
    while 2 ** (J + 1) <= n and 2 ** J * (L - 1) < n:
        J += 1
    return J


def uwt_forward(x, wavelet, levels):
    filt = _resolve(wavelet)
    a = as_signal(x)
    levels = int(levels)
    if levels < 1:
        raise WaveletError("levels must be >= 1")
    if levels > max_level(len(a), filt):
        raise WaveletError("insufficient length for J levels")
    details = []
    for j in range(levels):
        dil = 2 ** j
        details.append(dilated_circular_convolve(a, filt.dec_high, dil))
        a = dilated_circular_convolve(a, filt.dec_low, dil)
    return UwtDecomposition(tuple(details), a, filt.name)


def uwt_inverse(dec, wavelet=None):
    """Invert :func:`uwt_forward`.

    Each level averages the two adjoint (time-reversed) branches; the
    reversed taps are realigned by rolling back ``dilation*(L-1)``.
    """
    filt = _resolve(wavelet if wavelet is not None else dec.filter_name)
    if filt.name != dec.filter_name:
        raise WaveletError(f"filter {filt.name!r} does not match decomposition {dec.filter_name!r}")
    n = len(dec.approx)
    if dec.levels < 1 or any(len(d) != n for d in dec.details):
        raise WaveletError("malformed decomposition")
    L = len(filt)
    a = as_signal(dec.approx)
    for j in range(dec.levels - 1, -1, -1):
        dil = 2 ** j
        s = (dilated_circular_convolve(a, filt.rec_low, dil)
             + dilated_circular_convolve(as_signal(dec.details[j]), filt.rec_high, dil))
        a = 0.5 * np.roll(s, -dil * (L - 1))
    return a


def write_decomposition_csv(path, dec):
    lines = ["level,index,value"]
    for j, d in enumerate(dec.details, 1):
        lines.extend(f"{j},{i},{fmt_float(v)}" for i, v in enumerate(d))
    lines.extend(f"approx,{i},{fmt_float(v)}" for i, v in enumerate(dec.approx))
    write_atomic(path, "\n".join(lines) + "\n")


def read_decomposition_csv(path, filter_name):
    bands = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "level,index,value":
            raise DataFormatError(f"{path}: expected header 'level,index,value'")
        for lineno, line in enumerate(fh, 2):
            if not line.strip():
                continue
            try:
                level, idx, val = line.strip().split(",")
                bands.setdefault(level, {})[int(idx)] = float(val)
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: malformed row") from None
    if "approx" not in bands:
        raise DataFormatError(f"{path}: missing approx band")

    def dense(band):
        return np.array([band[i] for i in range(len(band))], dtype=np.float64)

    try:
        approx = dense(bands.pop("approx"))
        details = tuple(dense(bands[str(j)]) for j in range(1, len(bands) + 1))
    except KeyError:
        raise DataFormatError(f"{path}: non-contiguous levels or indices") from None
    return UwtDecomposition(details, approx, filter_name)
