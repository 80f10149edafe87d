"""Multilingual text preprocessing.

Pipeline order is fixed: normalize -> tokenize -> remove_stopwords ->
stem -> vectorize. Language behaviour lives in JSON profiles (see
``profiles/``), so every language goes through the same code path.
"""
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
import json
import math
import re
import unicodedata
from pathlib import Path

import numpy as np

from .io import DataFormatError, write_atomic

LABELS = ("legit", "threat")
_TAG = re.compile(r"<[^>]*>")
_SPACE = re.compile(r"\s+")


class TextPrepError(ValueError):
    pass


@dataclass(frozen=True)
class RawDocument:
    id: str
    lang: str
    text: str
    label: str | None = None

    def __post_init__(self):
        if not self.id:
            raise TextPrepError("document id must be nonempty")
        if not self.lang:
            raise TextPrepError(f"document {self.id}: lang must be nonempty")
        if self.label is not None and self.label not in LABELS:
            raise TextPrepError(f"document {self.id}: label must be one of {LABELS}")

    def to_json(self):
        obj = {"id": self.id, "lang": self.lang, "text": self.text}
        if self.label is not None:
            obj["label"] = self.label
        return json.dumps(obj, ensure_ascii=False, sort_keys=False)


def write_corpus(path, docs):
    write_atomic(path, "".join(d.to_json() + "\n" for d in docs))


def read_corpus(path):
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                extra = set(obj) - {"id", "lang", "text", "label"}
                if extra:
                    raise TextPrepError(f"unexpected keys {sorted(extra)}")
                docs.append(RawDocument(obj["id"], obj["lang"], obj["text"], obj.get("label")))
            except (json.JSONDecodeError, KeyError, TypeError, TextPrepError) as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
    return docs


@dataclass(frozen=True)
class LanguageProfile:
    lang: str
    stopwords: frozenset = frozenset()
    suffix_rules: tuple = ()

    def __post_init__(self):
        for suffix, min_len in self.suffix_rules:
            if not suffix or min_len < 1:
                raise TextPrepError(f"bad suffix rule ({suffix!r}, {min_len})")

    @classmethod
    def from_dict(cls, obj):
        return cls(obj["lang"], frozenset(obj.get("stopwords", ())),
                   tuple((s, int(m)) for s, m in obj.get("suffix_rules", ())))


def load_profile(lang_or_path):
    """Load a bundled profile by language tag, or a profile JSON file."""
    p = Path(lang_or_path)
    if p.suffix == ".json":
        text = p.read_text(encoding="utf-8")
    else:
        try:
            text = (resources.files("wesma") / "profiles" / f"{lang_or_path}.json").read_text(
                encoding="utf-8")
        except FileNotFoundError:
            raise TextPrepError(f"no bundled profile for language {lang_or_path!r}") from None
    return LanguageProfile.from_dict(json.loads(text))


def normalize(text):
    """Strip tags, NFC, lowercase, drop control characters, squeeze spaces."""
    prev = None
    while prev != text:
        prev, text = text, _TAG.sub(" ", text)
    text = unicodedata.normalize("NFC", text).lower()
    text = "".join(" " if ch.isspace() else ch for ch in text
                   if ch.isspace() or unicodedata.category(ch) != "Cc")
    return unicodedata.normalize("NFC", _SPACE.sub(" ", text).strip())


def _is_word_char(ch):
    return unicodedata.category(ch)[0] in "LMN"


def tokenize(text, profile=None):
    """Maximal runs of letters, marks and digits.

    Combining marks stay attached to their base so Indic syllables are
    not split; runs without any letter or digit are dropped.
    """
    tokens, cur = [], []
    for ch in text + " ":
        if _is_word_char(ch):
            cur.append(ch)
        elif cur:
            tok = "".join(cur)
            if any(unicodedata.category(c)[0] in "LN" for c in tok):
                tokens.append(tok)
            cur = []
    return tokens


def remove_stopwords(tokens, profile):
    return [t for t in tokens if t not in profile.stopwords]


def stem(token, profile):
    best = None
    for suffix, min_len in profile.suffix_rules:
        if token.endswith(suffix) and len(token) - len(suffix) >= min_len:
            if best is None or len(suffix) > len(best):
                best = suffix
    return token[: -len(best)] if best else token


def preprocess(text, profile):
    tokens = remove_stopwords(tokenize(normalize(text), profile), profile)
    return [stem(t, profile) for t in tokens]


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple
    doc_freq: tuple
    n_docs: int
    token_to_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "token_to_index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.token_to_index

    def index(self, token):
        return self.token_to_index[token]

    def to_dict(self):
        return {"n_docs": self.n_docs, "tokens": list(self.tokens), "doc_freq": list(self.doc_freq)}

    @classmethod
    def from_dict(cls, obj):
        return cls(tuple(obj["tokens"]), tuple(int(v) for v in obj["doc_freq"]), int(obj["n_docs"]))


def build_vocabulary(corpus, min_count=1):
    """Keep tokens in at least ``min_count`` documents.

    Indexed by descending total frequency, ties broken lexicographically.
    """
    if min_count < 1:
        raise TextPrepError("min_count must be >= 1")
    total, df = Counter(), Counter()
    for doc in corpus:
        total.update(doc)
        df.update(set(doc))
    kept = sorted((t for t in df if df[t] >= min_count), key=lambda t: (-total[t], t))
    if not kept:
        raise TextPrepError("vocabulary empty")
    return Vocabulary(tuple(kept), tuple(df[t] for t in kept), len(corpus))


def idf(vocab):
    """Smoothed idf: ln((1+N)/(1+df)) + 1."""
    df = np.asarray(vocab.doc_freq, dtype=np.float64)
    return np.log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0


@dataclass(frozen=True)
class DocVector:
    """Sparse document vector: ``entries`` maps index -> weight."""

    entries: dict
    dimension: int

    def to_dense(self):
        x = np.zeros(self.dimension)
        for i, w in self.entries.items():
            x[i] = w
        return x

    def norm(self):
        return math.sqrt(sum(w * w for w in self.entries.values()))


def vectorize(tokens, vocab, weighting="count", idf_weights=None):
    """Count or tf-idf (L2-normalized) vector; OOV tokens are dropped."""
    counts = Counter(vocab.token_to_index[t] for t in tokens if t in vocab.token_to_index)
    entries = {i: float(c) for i, c in sorted(counts.items())}
    if weighting == "tfidf":
        w = idf(vocab) if idf_weights is None else idf_weights
        entries = {i: c * w[i] for i, c in entries.items()}
        norm = math.sqrt(sum(v * v for v in entries.values()))
        if norm > 0:
            entries = {i: v / norm for i, v in entries.items()}
    elif weighting != "count":
        raise TextPrepError(f"unknown weighting {weighting!r}")
    return DocVector(entries, len(vocab))


def vectorize_corpus(corpus, vocab, weighting="tfidf"):
    """Dense (n_docs, V) matrix, one row per token stream."""
    w = idf(vocab)
    out = np.zeros((len(corpus), len(vocab)))
    for r, toks in enumerate(corpus):
        for i, v in vectorize(toks, vocab, weighting, w).entries.items():
            out[r, i] = v
    return out
