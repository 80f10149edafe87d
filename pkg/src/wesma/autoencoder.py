"""Word Embedded Semantic Marginal Autoencoder (WESMA).

Each layer is a linear denoiser whose expected squared reconstruction
loss, averaged over infinitely many feature-dropout corruptions, has a
closed form. Corruption is per-feature: words semantically close to a
set of seed terms (by embedding cosine) are dropped more often.

Data matrices are column-per-example: ``X`` has shape ``(D, n)``.
"""
from dataclasses import dataclass, field
import json

import numpy as np

from . import _backend
from .embed import cosine_similarity
from .io import dumps, write_atomic

REPR_MODES = ("concat", "last")


class WesmaError(ValueError):
    pass


class RegularizationRequired(ArithmeticError):
    """The layer system is singular and needs ``lambda > 0``."""


@dataclass(frozen=True)
class CorruptionProfile:
    """Keep probabilities for D features plus a trailing bias slot fixed at 1."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64)
        if q.ndim != 1 or q.size < 2:
            raise WesmaError("profile needs at least one feature and the bias slot")
        if not (np.all(q > 0) and np.all(q <= 1)):
            raise WesmaError("keep probabilities must lie in (0, 1]")
        if q[-1] != 1.0:
            raise WesmaError("bias slot keep probability must be 1")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def D(self):
        return self.q.size - 1

    @classmethod
    def uniform(cls, D, p):
        return cls(np.append(np.full(D, 1.0 - p), 1.0))

    def extended(self, extra_q):
        """Append features (before the bias slot)."""
        return CorruptionProfile(np.concatenate((self.q[:-1], np.atleast_1d(extra_q), [1.0])))


@dataclass(frozen=True)
class SemanticNoiseConfig:
    seed_terms: tuple = ()
    base_p0: float = 0.3
    boost: float = 0.0
    p_max: float = 0.9

    def __post_init__(self):
        if not 0 < self.base_p0 < 1 or not 0 < self.p_max < 1:
            raise WesmaError("base_p0 and p_max must lie in (0, 1)")
        if self.base_p0 > self.p_max:
            raise WesmaError("base_p0 must not exceed p_max")
        if self.boost < 0:
            raise WesmaError("boost must be >= 0")


def semantic_corruption_profile(vocab, E, cfg):
    """Raise dropout on words close to the seed terms.

    ``p_i = min(p_max, p0 * (1 + boost * s_i))`` where ``s_i`` is the
    largest positive cosine between word i and any seed term.
    """
    index = {t: i for i, t in enumerate(E.tokens)}
    missing = [t for t in cfg.seed_terms if t not in vocab or t not in index]
    if missing:
        raise WesmaError(f"seed term out of vocabulary: {missing[0]!r}")
    seeds = [E.input_vectors[index[t]] for t in cfg.seed_terms]
    s = np.zeros(len(vocab))
    for i, tok in enumerate(vocab.tokens):
        e = E.input_vectors[index[tok]] if tok in index else None
        if e is None or not np.any(e):
            continue
        for u in seeds:
            if np.any(u):
                s[i] = max(s[i], cosine_similarity(e, u))
    p = np.minimum(cfg.p_max, cfg.base_p0 * (1.0 + cfg.boost * s))
    return CorruptionProfile(np.append(1.0 - p, 1.0))


def augment(X):
    """Append a constant-one bias row (or entry for a single vector)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        return np.append(X, 1.0)
    return np.vstack((X, np.ones((1, X.shape[1]))))


def _profile_q(q, D):
    q = q.q if isinstance(q, CorruptionProfile) else np.asarray(q, dtype=np.float64)
    if q.shape != (D + 1,):
        raise WesmaError(f"dimension mismatch: profile has {q.size} slots, data needs {D + 1}")
    return q


def marginalized_moments(X, q):
    """Expected scatter matrices under dropout with keep probabilities ``q``.

    Returns ``(P, Q)``: ``P`` is E[x x~^T] restricted to the D target rows,
    ``Q`` is E[x~ x~^T] over the bias-augmented input.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    D = X.shape[0]
    if X.shape[1] < 1:
        raise WesmaError("need at least one example")
    q = _profile_q(q, D)
    Xa = augment(X)
    S = Xa @ Xa.T
    Q = S * np.outer(q, q)
    np.fill_diagonal(Q, np.diag(S) * q)
    P = S[:D, :] * q[None, :]
    return P, Q


def gauss_solve(A, B):
    """Solve ``A Z = B`` by Gaussian elimination with partial pivoting."""
    M = np.array(A, dtype=np.float64, order="C")
    Z = np.array(B, dtype=np.float64, order="C")
    squeeze = Z.ndim == 1
    if squeeze:
        Z = Z[:, None].copy()
    n = M.shape[0]
    tol = n * np.finfo(float).eps * max(np.abs(M).max(), 1e-300)
    if _backend.gauss_eliminate(M, Z, tol) >= 0:
        raise RegularizationRequired("regularization required")
    return Z[:, 0] if squeeze else Z


@dataclass(frozen=True)
class MdaLayer:
    W: np.ndarray
    lam: float

    @property
    def D(self):
        return self.W.shape[0]


def fit_mda_layer(X, q, lam=1e-3):
    """Closed-form marginalized denoising layer: ``W (Q + lam I) = P``."""
    if lam < 0:
        raise WesmaError("lambda must be >= 0")
    P, Q = marginalized_moments(X, q)
    A = Q + lam * np.eye(Q.shape[0])
    # A is symmetric, so W^T solves A W^T = P^T.
    W = gauss_solve(A.T, P.T).T
    resid = np.linalg.norm(W @ A - P)
    if not np.all(np.isfinite(W)) or resid > 1e-6 * max(np.linalg.norm(P), 1e-300):
        if lam == 0:
            raise RegularizationRequired("regularization required")
        raise ArithmeticError(f"layer solve residual {resid:.3g} exceeds tolerance")
    W.setflags(write=False)
    return MdaLayer(W, float(lam))


@dataclass(frozen=True)
class WesmaModel:
    layers: tuple
    profile: CorruptionProfile
    repr_mode: str = "concat"
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.layers:
            raise WesmaError("model needs at least one layer")
        if self.repr_mode not in REPR_MODES:
            raise WesmaError(f"repr_mode must be one of {REPR_MODES}")
        if any(layer.D != self.D for layer in self.layers):
            raise WesmaError("all layers must share dimension D")

    @property
    def D(self):
        return self.layers[0].D


def stack_fit(X, q, n_layers=1, lam=1e-3, repr_mode="concat"):
    if n_layers < 1:
        raise WesmaError("need at least one layer")
    profile = q if isinstance(q, CorruptionProfile) else CorruptionProfile(q)
    h = np.atleast_2d(np.asarray(X, dtype=np.float64))
    layers = []
    for _ in range(n_layers):
        layer = fit_mda_layer(h, profile, lam)
        layers.append(layer)
        h = np.tanh(layer.W @ augment(h))
    return WesmaModel(tuple(layers), profile, repr_mode)


def _check_dim(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != model.D:
        raise WesmaError(f"dimension mismatch: model expects {model.D}, got {X.shape[0]}")
    return X


def hidden_states(model, X):
    X = _check_dim(model, X)
    out, h = [], X
    for layer in model.layers:
        h = np.tanh(layer.W @ augment(h))
        out.append(h)
    return out


def transform(model, X):
    """Representation of one example ``(D,)`` or a batch ``(D, n)``."""
    X = _check_dim(model, X)
    hs = hidden_states(model, X)
    if model.repr_mode == "last":
        return hs[-1]
    return np.concatenate([X] + hs, axis=0)


def reconstruction_error(model, X):
    """Anomaly score: mean squared error of the first layer's linear reconstruction."""
    X = _check_dim(model, X)
    R = model.layers[0].W @ augment(X) - X
    return np.mean(R * R, axis=0) if X.ndim == 2 else float(np.mean(R * R))


def model_to_dict(model):
    return {
        "config": {"repr_mode": model.repr_mode, "n_layers": len(model.layers),
                   "D": model.D, "nonlinearity": "tanh"},
        "profile": model.profile.q.tolist(),
        "layers": [{"lambda": layer.lam, "shape": list(layer.W.shape),
                    "weights": layer.W.ravel().tolist()} for layer in model.layers],
        "metadata": model.metadata,
    }


def model_from_dict(obj):
    layers = []
    for spec in obj["layers"]:
        W = np.array(spec["weights"], dtype=np.float64).reshape(spec["shape"])
        W.setflags(write=False)
        layers.append(MdaLayer(W, float(spec["lambda"])))
    return WesmaModel(tuple(layers), CorruptionProfile(obj["profile"]),
                      obj["config"]["repr_mode"], obj.get("metadata", {}))


def save_model(path, model):
    write_atomic(path, dumps(model_to_dict(model)) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
