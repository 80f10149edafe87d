"""Bridge from token streams to the wavelet domain and back to features.

A document becomes ``m`` 1-D signals by projecting each token's
embedding onto fixed random unit directions. The undecimated transform
of those signals yields per-subband log-energies, which are standardized
and appended to the document representation.
"""
from dataclasses import dataclass

import numpy as np

from .wavelet import uwt_forward


class FusionError(ValueError):
    pass


def projection_directions(d, m, seed):
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((m, d))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def token_signal(tokens, E, m=2, target_length=64, seed=0):
    """``(m, target_length)`` array; row r is ``e_{token_t} . u_r`` over t.

    Shorter documents are extended periodically, longer ones truncated.
    Tokens missing from ``E`` are skipped.
    """
    if target_length < 4 or target_length & (target_length - 1):
        raise FusionError("target_length must be a power of two >= 4")
    index = {t: i for i, t in enumerate(E.tokens)}
    ids = [index[t] for t in tokens if t in index]
    if not ids:
        raise FusionError("no signal")
    U = projection_directions(E.d, m, seed)
    raw = U @ E.input_vectors[ids].T
    return raw[:, np.arange(target_length) % len(ids)]


def subband_energy_features(dec):
    """``ln(1 + mean(c^2))`` for d_1..d_J then the approximation."""
    return np.array([np.log1p(np.mean(np.square(b))) for b in dec.subbands()])


def document_subband_features(tokens, E, m=2, target_length=64, levels=3,
                              wavelet="haar", seed=0):
    """Concatenated subband energies of all ``m`` projection signals."""
    sig = token_signal(tokens, E, m, target_length, seed)
    return np.concatenate([subband_energy_features(uwt_forward(s, wavelet, levels)) for s in sig])


@dataclass(frozen=True)
class FeatureScaler:
    """Train-split standardization; zero-variance features are dropped."""

    mean: np.ndarray
    std: np.ndarray
    keep: np.ndarray

    @classmethod
    def fit(cls, F):
        F = np.atleast_2d(np.asarray(F, dtype=np.float64))
        mean, std = F.mean(axis=0), F.std(axis=0)
        return cls(mean, std, std > 0)

    def apply(self, F):
        F = np.asarray(F, dtype=np.float64)
        return ((F - self.mean) / np.where(self.keep, self.std, 1.0))[..., self.keep]

    @property
    def n_out(self):
        return int(self.keep.sum())

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, obj):
        std = np.array(obj["std"], dtype=np.float64)
        return cls(np.array(obj["mean"], dtype=np.float64), std, std > 0)


def fuse(representation, subband_features, scaler=None):
    """Append (standardized) subband features to a representation.

    Works on single vectors or row-per-example batches.
    """
    rep = np.asarray(representation, dtype=np.float64)
    sub = np.asarray(subband_features, dtype=np.float64)
    if sub.size == 0:
        return rep
    if scaler is not None:
        sub = scaler.apply(sub)
    if not (np.all(np.isfinite(rep)) and np.all(np.isfinite(sub))):
        raise FusionError("fusion inputs must be finite")
    return np.concatenate((rep, sub), axis=-1)
