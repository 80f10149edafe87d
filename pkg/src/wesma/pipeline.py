"""End-to-end threat scoring: text -> features -> WESMA -> scores -> metrics.

Each stage is a plain function so the CLI can run them one at a time
with files in between, and tests can run them in memory.
"""
from dataclasses import dataclass, replace
import math

import numpy as np

from .autoencoder import (CorruptionProfile, SemanticNoiseConfig, reconstruction_error,
                          semantic_corruption_profile, stack_fit)
from .embed import CbowConfig, train_cbow
from .evalkit import (EvalError, confusion, curve_points, grid_search, metrics, roc_auc,
                      select_threshold, split_dataset)
from .fusion import FeatureScaler, FusionError, document_subband_features, fuse
from .textprep import build_vocabulary, load_profile, preprocess, vectorize_corpus


def load_profiles(langs, paths=None):
    paths = paths or {}
    return {lang: load_profile(paths.get(lang, lang)) for lang in sorted(set(langs))}


def preprocess_docs(docs, profiles):
    return [preprocess(d.text, profiles[d.lang]) for d in docs]


def binary_labels(docs):
    return np.array([d.label == "threat" for d in docs], dtype=bool)


@dataclass(frozen=True)
class Prepared:
    tokens: list
    split: object
    vocab: object


def prepare(docs, cfg):
    profiles = load_profiles([d.lang for d in docs], cfg.textprep.profiles)
    tokens = preprocess_docs(docs, profiles)
    split = split_dataset(len(docs), tuple(cfg.eval.ratios), cfg.seed)
    vocab = build_vocabulary([tokens[i] for i in split.train], cfg.textprep.min_count)
    return Prepared(tokens, split, vocab)


def train_embeddings(prep, cfg):
    corpus = [[t for t in prep.tokens[i] if t in prep.vocab] for i in prep.split.train]
    c = cfg.cbow
    return train_cbow(corpus, prep.vocab, CbowConfig(c.dim, c.window, c.negatives,
                                                     c.learning_rate, c.epochs, cfg.seed))


def subband_matrix(tokens, E, w, seed):
    """Row per document; documents with no embedded token get zeros."""
    width = w.projections * (w.signal_levels + 1)
    rows = []
    for toks in tokens:
        try:
            rows.append(document_subband_features(toks, E, w.projections, w.signal_length,
                                                  w.signal_levels, w.signal_wavelet, seed))
        except FusionError:
            rows.append(np.zeros(width))
    return np.array(rows).reshape(len(tokens), width)


def detector_features(tokens, vocab, E, w, seed, scaler, weighting="tfidf"):
    """Rows of [doc vector | scaled standardized subband energies]."""
    X = vectorize_corpus(tokens, vocab, weighting)
    F = subband_matrix(tokens, E, w, seed)
    return fuse(X, w.subband_scale * scaler.apply(F)) if scaler.n_out else X


def fit_detector(X_fit, vocab, E, w):
    """Fit WESMA on row-per-example features ``X_fit``."""
    profile = semantic_corruption_profile(
        vocab, E, SemanticNoiseConfig(tuple(w.seed_terms), w.base_p0, w.boost, w.p_max))
    extra = X_fit.shape[1] - len(vocab)
    if extra:
        profile = profile.extended(np.full(extra, 1.0 - w.base_p0))
    return stack_fit(X_fit.T, profile, w.layers, w.lam, w.repr_mode)


def train_detector(prep, labels, E, cfg):
    """Grid-search WESMA settings on validation AUC, then fit the winner.

    Returns ``(model, grid_result)``; the model's metadata carries the
    feature scaler and chosen settings so scoring can be replayed.
    """
    split = prep.split
    fit_idx = [i for i in split.train if cfg.wesma.fit_on == "all" or not labels[i]]
    if not fit_idx:
        raise EvalError("no training documents to fit on")
    F_train = subband_matrix([prep.tokens[i] for i in split.train], E, cfg.wesma, cfg.seed)
    scaler = FeatureScaler.fit(F_train)
    val = list(split.val)

    cache = {}

    def features(w):
        if w.subband_scale not in cache:
            cache[w.subband_scale] = detector_features(prep.tokens, prep.vocab, E, w, cfg.seed,
                                                       scaler, cfg.textprep.weighting)
        return cache[w.subband_scale]

    def evaluate(params):
        w = replace(cfg.wesma, **params)
        X = features(w)
        model = fit_detector(X[fit_idx], prep.vocab, E, w)
        return roc_auc(reconstruction_error(model, X[val].T), labels[val])

    grid = None
    best = {}
    if cfg.eval.grid:
        grid = grid_search(dict(cfg.eval.grid), evaluate)
        if grid.best_params is None:
            raise EvalError("grid search: every cell failed")
        best = grid.best_params
    w = replace(cfg.wesma, **best)
    model = fit_detector(features(w)[fit_idx], prep.vocab, E, w)
    meta = {"scaler": scaler.to_dict(), "chosen": {k: best.get(k, getattr(w, k))
                                                   for k in ("lam", "base_p0", "boost",
                                                             "subband_scale")},
            "vocab_size": len(prep.vocab), "seed": cfg.seed}
    return replace(model, metadata=meta), grid


def score_documents(model, tokens, vocab, E, cfg):
    chosen = model.metadata.get("chosen", {})
    w = replace(cfg.wesma, **chosen)
    scaler = FeatureScaler.from_dict(model.metadata["scaler"])
    X = detector_features(tokens, vocab, E, w, model.metadata.get("seed", cfg.seed), scaler,
                          cfg.textprep.weighting)
    return reconstruction_error(model, X.T)


def evaluate_scores(scores, labels, split):
    """Validation-selected threshold, test metrics, and test curves."""
    scores = np.asarray(scores)
    val, test = list(split.val), list(split.test)
    threshold = select_threshold(scores[val], labels[val])
    auc = roc_auc(scores[test], labels[test])
    report = metrics(confusion(scores[test], labels[test], threshold), auc)
    return {
        "threshold": threshold,
        "val_auc": roc_auc(scores[val], labels[val]),
        "test": report,
        "roc": curve_points(scores[test], labels[test], "roc"),
        "pr": curve_points(scores[test], labels[test], "pr"),
    }


def run_detection(docs, cfg):
    """All text stages in memory. Returns a dict of intermediate results."""
    labels = binary_labels(docs)
    prep = prepare(docs, cfg)
    E = train_embeddings(prep, cfg)
    model, grid = train_detector(prep, labels, E, cfg)
    scores = score_documents(model, prep.tokens, prep.vocab, E, cfg)
    result = evaluate_scores(scores, labels, prep.split)
    result.update(prepared=prep, embeddings=E, model=model, grid=grid, scores=scores,
                  labels=labels)
    return result


def threshold_repr(t):
    return t if math.isfinite(t) else ("inf" if t > 0 else "-inf")
