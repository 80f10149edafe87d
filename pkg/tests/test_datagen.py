import math

import numpy as np
import pytest

from wesma.datagen import (CorpusSpec, DatagenError, NoiseSpec, SIGNAL_KINDS, add_awgn,
                           awgn_sigma, gen_corpus, gen_signal)
from wesma.denoise import snr_db
from wesma.textprep import LABELS, normalize, tokenize, write_corpus
from wesma.wavelet import uwt_forward


class TestSignals:
    @pytest.mark.parametrize("kind", SIGNAL_KINDS)
    def test_peak_normalized_and_deterministic(self, kind):
        x = gen_signal(kind, 512, seed=4)
        assert np.max(np.abs(x)) == pytest.approx(1.0, abs=1e-15)
        assert np.all(np.isfinite(x))
        np.testing.assert_array_equal(x, gen_signal(kind, 512, seed=4))

    def test_blocks_piecewise_constant(self):
        x = gen_signal("blocks", 1024)
        d1 = uwt_forward(x, "haar", 1).details[0]
        jumps = np.flatnonzero(np.diff(x)) + 1
        allowed = set(jumps.tolist()) | {0}
        assert set(np.flatnonzero(np.abs(d1) > 1e-12).tolist()) <= allowed

    def test_errors(self):
        with pytest.raises(DatagenError):
            gen_signal("chirp", 64)
        with pytest.raises(DatagenError):
            gen_signal("sine", 4)


class TestNoise:
    def test_sigma_formula(self):
        unit = np.where(np.arange(64) % 2, 1.0, -1.0)
        assert awgn_sigma(unit, 20) == pytest.approx(0.1)
        assert awgn_sigma(unit, 10.5) == pytest.approx(0.2985, abs=1e-4)

    def test_clean(self):
        x = gen_signal("sine", 64)
        y, s = add_awgn(x, NoiseSpec(None, 0))
        np.testing.assert_array_equal(x, y)
        assert s == 0

    def test_realized_snr_concentrates(self):
        x = gen_signal("blocks", 2048)
        for seed in range(20):
            y, _ = add_awgn(x, NoiseSpec(10.5, seed))
            assert abs(snr_db(x, y) - 10.5) <= 1.0

    def test_errors(self):
        with pytest.raises(DatagenError):
            add_awgn(np.zeros(8), NoiseSpec(10, 0))
        with pytest.raises(DatagenError):
            NoiseSpec(math.inf)


SMALL = CorpusSpec(languages=(("en", 40, 30), ("hi", 40, 30), ("ta", 40, 30), ("fr", 40, 30)),
                   doc_length=12, typo_rate=0.0, threat_rate=0.2, seed=9)


class TestCorpus:
    def test_no_typos_means_in_vocabulary(self):
        from wesma import datagen
        docs = gen_corpus(SMALL)
        for li, (lang, size, _) in enumerate(SMALL.languages):
            from wesma.textprep import load_profile
            stop = sorted(load_profile(lang).stopwords)
            vocab = set(datagen._make_vocabulary(datagen.LANG_SCRIPT[lang], size,
                                                 np.random.default_rng([SMALL.seed, li]), stop))
            for d in docs:
                if d.lang == lang:
                    assert set(tokenize(normalize(d.text))) <= vocab | set(stop)

    def test_threat_rate_zero(self):
        spec = CorpusSpec(languages=(("en", 20, 50),), threat_rate=0.0, seed=1)
        assert all(d.label == "legit" for d in gen_corpus(spec))

    def test_label_proportions(self):
        spec = CorpusSpec(languages=(("en", 50, 400), ("fr", 50, 400)), doc_length=5,
                          threat_rate=0.1, seed=3)
        docs = gen_corpus(spec)
        k = sum(d.label == "threat" for d in docs)
        n = len(docs)
        assert abs(k - 0.1 * n) <= 3 * math.sqrt(n * 0.1 * 0.9)
        assert {d.label for d in docs} <= set(LABELS)

    def test_byte_identical(self, tmp_path):
        write_corpus(tmp_path / "a.jsonl", gen_corpus(SMALL))
        write_corpus(tmp_path / "b.jsonl", gen_corpus(SMALL))
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_scripts(self):
        docs = gen_corpus(SMALL)
        hi = next(d for d in docs if d.lang == "hi")
        ta = next(d for d in docs if d.lang == "ta")
        assert any(0x0900 <= ord(c) <= 0x097F for c in hi.text)
        assert any(0x0B80 <= ord(c) <= 0x0BFF for c in ta.text)

    def test_typos_change_tokens(self):
        spec = CorpusSpec(languages=(("en", 40, 50),), typo_rate=1.0, threat_rate=0.0, seed=2)
        clean = CorpusSpec(languages=(("en", 40, 50),), typo_rate=0.0, threat_rate=0.0, seed=2)
        assert gen_corpus(spec) != gen_corpus(clean)

    @pytest.mark.parametrize("kw", [{"languages": ()}, {"typo_rate": 1.5},
                                    {"languages": (("xx", 10, 10),)}])
    def test_validation(self, kw):
        with pytest.raises(DatagenError):
            CorpusSpec(**kw)
