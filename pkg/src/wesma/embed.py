"""CBOW word embeddings trained with negative sampling."""
from dataclasses import dataclass, field
import math

import numpy as np

from . import _backend
from .io import DataFormatError, fmt_float, write_atomic


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class CbowConfig:
    dim: int = 32
    window: int = 2
    negatives: int = 5
    learning_rate: float = 0.05
    epochs: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise EmbeddingError("dim must be >= 2")
        for name in ("window", "negatives", "epochs"):
            if getattr(self, name) < 1:
                raise EmbeddingError(f"{name} must be positive")
        if not self.learning_rate > 0:
            raise EmbeddingError("learning_rate must be positive")


@dataclass
class EmbeddingMatrix:
    tokens: tuple
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    loss_history: list = field(default_factory=list)

    @property
    def V(self):
        return self.input_vectors.shape[0]

    @property
    def d(self):
        return self.input_vectors.shape[1]

    def vector(self, token):
        return self.input_vectors[self.tokens.index(token)]


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def cbow_loss_and_grad(w_in, w_out, context, center, negatives):
    """Loss of one (context, center, negatives) example and its gradients.

    Returns ``(loss, grad_in, grad_out)`` with gradients shaped like the
    full matrices. Kept separate from the training kernels so it can be
    checked against finite differences independently.
    """
    context = np.asarray(context)
    h = w_in[context].mean(axis=0)
    targets = np.concatenate(([center], negatives)).astype(np.int64)
    sign = np.ones(len(targets))
    sign[1:] = -1.0
    f = w_out[targets] @ h
    loss = float(np.logaddexp(0.0, -sign * f).sum())
    g = _sigmoid(f) - (sign > 0)
    grad_out = np.zeros_like(w_out)
    np.add.at(grad_out, targets, np.outer(g, h))
    grad_h = g @ w_out[targets]
    grad_in = np.zeros_like(w_in)
    np.add.at(grad_in, context, np.tile(grad_h / len(context), (len(context), 1)))
    return loss, grad_in, grad_out


def unigram_table(corpus_ids, V, power=0.75):
    counts = np.zeros(V)
    for doc in corpus_ids:
        np.add.at(counts, doc, 1.0)
    p = counts ** power
    return p / p.sum()


def train_cbow(corpus, vocab, cfg=None):
    """Train CBOW with negative sampling by plain SGD.

    ``corpus`` is a list of token lists (all tokens must be in ``vocab``).
    Every position whose document has another token gets a context.
    Negatives come from unigram^0.75 and are drawn per epoch up front, so
    both kernel backends consume the identical random stream.
    """
    cfg = cfg or CbowConfig()
    V = len(vocab)
    if V == 0:
        raise EmbeddingError("vocabulary is empty")
    try:
        ids = [np.array([vocab.token_to_index[t] for t in doc], dtype=np.int64) for doc in corpus]
    except KeyError as exc:
        raise EmbeddingError(f"token {exc.args[0]!r} is not in the vocabulary") from None
    n_pairs = sum(len(d) for d in ids if len(d) >= 2)
    if n_pairs == 0:
        raise EmbeddingError("no training pairs")
    tokens = np.concatenate(ids) if ids else np.zeros(0, dtype=np.int64)
    offsets = np.zeros(len(ids) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(d) for d in ids])
    probs = unigram_table(ids, V)

    rng = np.random.default_rng(cfg.seed)
    w_in = np.ascontiguousarray(rng.uniform(-0.5 / cfg.dim, 0.5 / cfg.dim, size=(V, cfg.dim)))
    w_out = np.zeros((V, cfg.dim))
    history = []
    for _ in range(cfg.epochs):
        negatives = np.ascontiguousarray(rng.choice(V, size=(n_pairs, cfg.negatives), p=probs))
        loss, count = _backend.cbow_epoch(w_in, w_out, tokens, offsets, cfg.window,
                                          negatives, cfg.learning_rate)
        history.append(loss / count)
    return EmbeddingMatrix(tuple(vocab.tokens), w_in, w_out, history)


def cosine_similarity(u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise EmbeddingError("undefined similarity")
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


def nearest_neighbors(E, i, k):
    """Top-k words by cosine to word ``i``; ties go to the lower index."""
    if k <= 0:
        return []
    if k >= E.V:
        raise EmbeddingError("k must be smaller than the vocabulary size")
    sims = [(j, cosine_similarity(E.input_vectors[i], E.input_vectors[j]))
            for j in range(E.V) if j != i]
    sims.sort(key=lambda p: (-p[1], p[0]))
    return sims[:k]


def write_embeddings_csv(path, E):
    lines = ["token," + ",".join(f"v{j}" for j in range(E.d))]
    for tok, row in zip(E.tokens, E.input_vectors):
        lines.append(tok + "," + ",".join(fmt_float(v) for v in row))
    write_atomic(path, "\n".join(lines) + "\n")


def read_embeddings_csv(path):
    """Load input vectors; output vectors are not persisted and come back as zeros."""
    tokens, rows = [], []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if not header or header[0] != "token":
            raise DataFormatError(f"{path}: expected header starting with 'token'")
        d = len(header) - 1
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != d + 1:
                raise DataFormatError(f"{path}:{lineno}: expected {d + 1} fields")
            try:
                rows.append([float(v) for v in parts[1:]])
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-numeric value") from None
            tokens.append(parts[0])
    w = np.array(rows, dtype=np.float64).reshape(len(rows), d)
    return EmbeddingMatrix(tuple(tokens), w, np.zeros_like(w))
