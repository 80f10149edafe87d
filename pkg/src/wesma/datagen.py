"""Seeded synthetic data: shrinkage test signals and multilingual corpora."""
from dataclasses import dataclass, field
import math

import numpy as np

from .textprep import RawDocument

SIGNAL_KINDS = ("blocks", "bumps", "doppler", "sine")

_POS = np.array([0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81])
_BLOCK_H = np.array([4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])
_BUMP_H = np.array([4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
_BUMP_W = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])


class DatagenError(ValueError):
    pass


def gen_signal(kind, n, seed=0):
    """Donoho-Johnstone test signal (or a 5-cycle sine), peak-normalized.

    The signals are closed-form; ``seed`` is accepted so every generator
    shares one calling convention, and does not change the output.
    """
    if n < 8:
        raise DatagenError("N must be >= 8")
    t = np.arange(n) / n
    if kind == "blocks":
        x = (_BLOCK_H * (t[:, None] >= _POS)).sum(axis=1)
    elif kind == "bumps":
        x = (_BUMP_H * (1 + np.abs((t[:, None] - _POS) / _BUMP_W)) ** -4).sum(axis=1)
    elif kind == "doppler":
        x = np.sqrt(t * (1 - t)) * np.sin(2 * np.pi * 1.05 / (t + 0.05))
    elif kind == "sine":
        x = np.sin(2 * np.pi * 5 * t)
    else:
        raise DatagenError(f"unknown signal kind {kind!r}")
    return x / np.max(np.abs(x))


@dataclass(frozen=True)
class NoiseSpec:
    """``target_snr_db=None`` means no noise at all."""

    target_snr_db: float | None
    seed: int = 0

    def __post_init__(self):
        if self.target_snr_db is not None and not math.isfinite(self.target_snr_db):
            raise DatagenError("target SNR must be finite (use None for a clean signal)")


def awgn_sigma(x, target_snr_db):
    power = float(np.mean(np.asarray(x, dtype=np.float64) ** 2))
    return math.sqrt(power / 10 ** (target_snr_db / 10))


def add_awgn(x, spec):
    x = np.asarray(x, dtype=np.float64)
    if not np.any(x):
        raise DatagenError("cannot calibrate noise on an all-zero signal")
    if spec.target_snr_db is None:
        return x.copy(), 0.0
    sigma = awgn_sigma(x, spec.target_snr_db)
    rng = np.random.default_rng(spec.seed)
    return x + sigma * rng.standard_normal(x.shape[0]), sigma


# Consonant / vowel inventories per script. Words are consonant+vowel
# syllables so they look like the script without pretending to be real words.
_SCRIPTS = {
    "latin": ("bcdfghjklmnprstvz", ["a", "e", "i", "o", "u"]),
    "latin_fr": ("bcdfghjlmnprstv", ["a", "e", "i", "o", "u", "é", "è", "au", "ou"]),
    "devanagari": ("".join(chr(c) for c in range(0x0915, 0x093A)),
                   ["", "ा", "ि", "ी", "ु", "ू", "े", "ै",
                    "ो", "ौ"]),
    "tamil": ("கஙசஞடணதநபமயரலவழளறன",
              ["", "ா", "ி", "ீ", "ு", "ூ", "ெ", "ே",
               "ை", "ொ", "ோ"]),
}
LANG_SCRIPT = {"en": "latin", "fr": "latin_fr", "hi": "devanagari", "ta": "tamil"}
ZIPF_EXPONENT = 1.0
STOPWORD_RATE = 0.15


@dataclass(frozen=True)
class CorpusSpec:
    languages: tuple = (("en", 300, 200), ("hi", 300, 200), ("ta", 300, 200), ("fr", 300, 200))
    doc_length: int = 30
    typo_rate: float = 0.05
    threat_rate: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not self.languages:
            raise DatagenError("at least one language is required")
        for lang, vocab_size, doc_count in self.languages:
            if lang not in LANG_SCRIPT:
                raise DatagenError(f"no script known for language {lang!r}")
            if vocab_size < 4 or doc_count < 0:
                raise DatagenError(f"{lang}: vocab_size must be >= 4 and doc_count >= 0")
        if self.doc_length < 1:
            raise DatagenError("doc_length must be positive")
        for name in ("typo_rate", "threat_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise DatagenError(f"{name} must lie in [0, 1]")


def _make_vocabulary(script, size, rng, avoid):
    consonants, vowels = _SCRIPTS[script]
    words, seen = [], set(avoid)
    while len(words) < size:
        n_syl = int(rng.integers(2, 5))
        w = "".join(consonants[rng.integers(len(consonants))] + vowels[rng.integers(len(vowels))]
                    for _ in range(n_syl))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def _typo(word, alphabet, rng):
    chars = list(word)
    kind = int(rng.integers(3))
    if kind == 0 and len(chars) >= 2:
        i = int(rng.integers(len(chars) - 1))
        chars[i], chars[i + 1] = chars[i + 1], chars[i]
    elif kind == 1 and len(chars) >= 2:
        del chars[int(rng.integers(len(chars)))]
    else:
        chars[int(rng.integers(len(chars)))] = alphabet[int(rng.integers(len(alphabet)))]
    return "".join(chars)


def gen_corpus(spec):
    """Labelled multilingual corpus with typos and shifted-vocabulary threats.

    Legit documents draw words from a Zipf law over the language's
    vocabulary. Threat documents use the same law over a ranking rotated
    by half the vocabulary, so their frequent words are legit-rare ones.
    Each document has its own generator seeded by (seed, language, index).
    """
    from .textprep import load_profile

    docs = []
    for li, (lang, vocab_size, doc_count) in enumerate(spec.languages):
        script = LANG_SCRIPT[lang]
        stop = sorted(load_profile(lang).stopwords)
        words = _make_vocabulary(script, vocab_size, np.random.default_rng([spec.seed, li]), stop)
        consonants, vowels = _SCRIPTS[script]
        alphabet = sorted(set(consonants) | set("".join(vowels)))
        ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
        zipf = ranks ** -ZIPF_EXPONENT
        zipf /= zipf.sum()
        shift = vocab_size // 2
        for di in range(doc_count):
            rng = np.random.default_rng([spec.seed, li, di + 1])
            label = "threat" if rng.random() < spec.threat_rate else "legit"
            length = max(3, int(rng.poisson(spec.doc_length)))
            draws = rng.choice(vocab_size, size=length, p=zipf)
            if label == "threat":
                draws = (draws + shift) % vocab_size
            out = []
            for r in draws:
                if stop and rng.random() < STOPWORD_RATE:
                    out.append(stop[int(rng.integers(len(stop)))])
                w = words[int(r)]
                if rng.random() < spec.typo_rate:
                    w = _typo(w, alphabet, rng)
                out.append(w)
            if script.startswith("latin"):
                out[0] = out[0].capitalize()
            text = " ".join(out) + "."
            if rng.random() < 0.2:
                text = f"<p>{text}</p>"
            docs.append(RawDocument(f"{lang}-{di:05d}", lang, text, label))
    return docs
