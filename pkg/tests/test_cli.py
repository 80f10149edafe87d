import json

import numpy as np
import pytest

from wesma import io
from wesma.cli import main

SMALL = {
    "seed": 3,
    "datagen": {"languages": [["en", 40, 60], ["hi", 40, 60], ["ta", 40, 60], ["fr", 40, 60]],
                "doc_length": 15, "threat_rate": 0.1, "signal_length": 256,
                "signal_kinds": ["blocks", "sine"]},
    "cbow": {"dim": 8, "epochs": 2},
    "wesma": {"signal_length": 16, "signal_levels": 2},
    "eval": {"grid": {"lam": [0.1, 1.0]}},
}


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(SMALL))
    return str(p)


def _run(*argv):
    return main(list(argv))


def test_full_pipeline_stages(tmp_path, cfg_path, capsys):
    out = str(tmp_path / "o")
    for cmd in ("gen-data", "prep", "train-embeddings", "train-wesma", "score", "evaluate",
                "eval-denoise", "report"):
        assert _run(cmd, "--config", cfg_path, "--out", out) == 0, cmd
    printed = capsys.readouterr().out.strip().splitlines()
    assert len(printed) == 8
    o = tmp_path / "o"
    for name in ("corpus.jsonl", "tokens.jsonl", "split.json", "vocab.json", "embeddings.csv",
                 "model.json", "grid.csv", "scores.csv", "metrics.json", "roc.csv", "pr.csv",
                 "denoise/denoise_table.csv", "denoise/denoise_table.json",
                 "report/roc.svg", "report/pr.svg", "report/embedding_loss.svg"):
        assert (o / name).is_file(), name
    m = json.loads((o / "metrics.json").read_text())
    assert 0 <= m["test"]["auc"] <= 1
    assert (o / "roc.csv").read_text().startswith("x,y,threshold\n")
    assert (o / "report/roc.svg").read_text().lstrip().startswith("<svg")
    table = (o / "denoise/denoise_table.csv").read_text().splitlines()
    assert table[0] == "source,initial_snr_db,improved_snr_db,improvement_db"
    assert any(r.startswith("lang:") for r in table[1:])


def test_out_env_override(tmp_path, cfg_path, monkeypatch):
    monkeypatch.setenv("WESMA_OUT", str(tmp_path / "env"))
    assert _run("gen-data", "--config", cfg_path) == 0
    assert (tmp_path / "env" / "corpus.jsonl").is_file()
    assert _run("gen-data", "--config", cfg_path, "--out", str(tmp_path / "flag")) == 0
    assert (tmp_path / "flag" / "corpus.jsonl").is_file()


def test_seed_flag_changes_corpus(tmp_path, cfg_path):
    _run("gen-data", "--config", cfg_path, "--out", str(tmp_path / "a"))
    _run("gen-data", "--config", cfg_path, "--out", str(tmp_path / "b"), "--seed", "99")
    assert ((tmp_path / "a/corpus.jsonl").read_bytes()
            != (tmp_path / "b/corpus.jsonl").read_bytes())


def test_decompose_and_denoise(tmp_path):
    sig = tmp_path / "s.csv"
    x = np.sin(np.arange(64) / 3.0) + np.random.default_rng(0).normal(0, 0.1, 64)
    io.write_signal_csv(sig, x)
    out = str(tmp_path / "o")
    assert _run("decompose", "--input", str(sig), "--levels", "3", "--out", out) == 0
    lines = (tmp_path / "o/decomposition/s.csv").read_text().splitlines()
    assert lines[0] == "level,index,value" and len(lines) == 1 + 4 * 64
    dest = tmp_path / "d.csv"
    assert _run("denoise", "--input", str(sig), "--threshold", "0", "--output", str(dest),
                "--out", out) == 0
    np.testing.assert_allclose(io.read_signal_csv(dest), x, atol=1e-8)
    assert _run("denoise", "--input", str(sig), "--reference", str(sig), "--out", out,
                "--rule", "hard", "--filter", "db2") == 0


def test_exit_codes(tmp_path, cfg_path, capsys):
    out = str(tmp_path / "o")
    assert _run("prep", "--config", cfg_path, "--out", out) == 2
    assert "required input missing" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"nonsense": 1}')
    assert _run("gen-data", "--config", str(bad), "--out", out) == 1
    bad.write_text('{"wesma": {"lam": "big"}}')
    assert _run("gen-data", "--config", str(bad), "--out", out) == 1
    with pytest.raises(SystemExit) as exc:
        _run("frobnicate")
    assert exc.value.code == 1
    garbage = tmp_path / "g.csv"
    garbage.write_text("1\nabc\n")
    assert _run("denoise", "--input", str(garbage), "--out", out) == 2
    short = tmp_path / "short.csv"
    io.write_signal_csv(short, np.ones(8))
    assert _run("decompose", "--input", str(short), "--levels", "6", "--out", out) == 2


def test_numeric_exit_code(tmp_path):
    cfg = dict(SMALL, eval={"grid": {"lam": [0.0]}})
    cfg["datagen"] = dict(SMALL["datagen"], languages=[["en", 40, 30]])
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    out = str(tmp_path / "o")
    for cmd in ("gen-data", "prep", "train-embeddings"):
        assert _run(cmd, "--config", str(p), "--out", out) == 0
    assert _run("train-wesma", "--config", str(p), "--out", out) == 3


def test_help(capsys):
    with pytest.raises(SystemExit) as exc:
        _run("--help")
    assert exc.value.code == 0
    assert "denoise" in capsys.readouterr().out
