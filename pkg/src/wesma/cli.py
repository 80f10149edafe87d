"""Command-line interface.

Every subcommand takes ``--config``, ``--seed`` and ``--out``. Outputs go
under the output directory; ``WESMA_OUT`` overrides the configured
directory when ``--out`` is not given (the only environment variable
read). Exit codes: 0 ok, 1 usage/config, 2 data/format, 3 numeric.
"""
import argparse
import json
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import io
from .autoencoder import RegularizationRequired, WesmaError, load_model, save_model
from .config import ConfigError, load_config
from .datagen import CorpusSpec, DatagenError, NoiseSpec, add_awgn, gen_signal
from .datagen import gen_corpus
from .denoise import DenoiseConfig, DenoiseError, denoise
from .embed import EmbeddingError, read_embeddings_csv, write_embeddings_csv
from .evalkit import EvalError, Split
from .fusion import FusionError, token_signal
from .pipeline import (Prepared, binary_labels, evaluate_scores, prepare, score_documents,
                       train_detector, train_embeddings)
from .report import line_plot_svg
from .textprep import TextPrepError, Vocabulary, read_corpus, write_corpus
from .wavelet import WaveletError, uwt_forward, write_decomposition_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
OUT_ENV = "WESMA_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _thr(t):
    return t if math.isfinite(t) else ("inf" if t > 0 else "-inf")


def _need(path):
    if not path.is_file():
        raise FileNotFoundError(f"required input missing: {path} (run the earlier stage first)")
    return path


# ---------------------------------------------------------------- artifacts

def _read_tokens(path):
    ids, langs, labels, tokens = [], [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            try:
                obj = json.loads(line)
                ids.append(obj["id"])
                langs.append(obj["lang"])
                labels.append(obj.get("label"))
                tokens.append(list(obj["tokens"]))
            except (json.JSONDecodeError, KeyError) as exc:
                raise io.DataFormatError(f"{path}:{lineno}: {exc}") from None
    return ids, langs, labels, tokens


def _load_prepared(out):
    ids, langs, labels, tokens = _read_tokens(_need(out / "tokens.jsonl"))
    sp = json.loads(_need(out / "split.json").read_text(encoding="utf-8"))
    split = Split(tuple(sp["train"]), tuple(sp["val"]), tuple(sp["test"]), sp["seed"],
                  tuple(sp["ratios"]))
    vocab = Vocabulary.from_dict(json.loads(_need(out / "vocab.json").read_text(encoding="utf-8")))
    return ids, langs, labels, Prepared(tokens, split, vocab)


def _label_array(labels):
    return np.array([lab == "threat" for lab in labels], dtype=bool)


# ---------------------------------------------------------------- commands

def cmd_gen_data(cfg, out, args):
    d = cfg.datagen
    spec = CorpusSpec(tuple(tuple(x) for x in d.languages), d.doc_length, d.typo_rate,
                      d.threat_rate, cfg.seed)
    docs = gen_corpus(spec)
    write_corpus(out / "corpus.jsonl", docs)
    for k, kind in enumerate(d.signal_kinds):
        clean = gen_signal(kind, d.signal_length, cfg.seed)
        noisy, _ = add_awgn(clean, NoiseSpec(d.signal_snr_db, cfg.seed + k))
        io.write_signal_csv(out / "signals" / f"{kind}_clean.csv", clean)
        io.write_signal_csv(out / "signals" / f"{kind}_noisy.csv", noisy)
    n_threat = sum(doc.label == "threat" for doc in docs)
    return (f"gen-data: {len(docs)} documents ({n_threat} threat), "
            f"{len(d.signal_kinds)} signals -> {out}")


def _denoise_cfg(cfg, args):
    d = cfg.denoise
    return DenoiseConfig(
        filter_name=args.filter or d.filter_name,
        levels=args.levels or d.levels,
        rule=args.rule or d.rule,
        sigma=args.sigma if args.sigma is not None else d.sigma,
        threshold=args.threshold if args.threshold is not None else d.threshold,
    )


def cmd_decompose(cfg, out, args):
    x = io.read_signal_csv(args.input)
    filt = args.filter or cfg.denoise.filter_name
    levels = args.levels or cfg.denoise.levels
    dec = uwt_forward(x, filt, levels)
    dest = Path(args.output) if args.output else out / "decomposition" / f"{Path(args.input).stem}.csv"
    write_decomposition_csv(dest, dec)
    return f"decompose: N={dec.n} J={dec.levels} {filt} -> {dest}"


def cmd_denoise(cfg, out, args):
    x = io.read_signal_csv(args.input)
    ref = io.read_signal_csv(args.reference) if args.reference else None
    if ref is not None and len(ref) != len(x):
        raise io.DataFormatError("reference and input lengths differ")
    dcfg = _denoise_cfg(cfg, args)
    y, report = denoise(x, dcfg, reference=ref)
    stem = Path(args.input).stem
    dest = Path(args.output) if args.output else out / "denoised" / f"{stem}.csv"
    io.write_signal_csv(dest, y)
    io.write_json(dest.with_suffix(".report.json"), report.to_dict())
    if ref is not None:
        io.write_csv(dest.with_suffix(".triples.csv"), ["clean", "noisy", "denoised"],
                     zip(ref, x, y))
    gain = report.improvement_db
    extra = f", improvement {gain:.2f} dB" if gain is not None else ""
    return f"denoise: sigma={report.sigma_used:.4g} t={report.threshold_used:.4g}{extra} -> {dest}"


def _language_signals(out, cfg):
    """One projection signal per language from its concatenated documents."""
    tok_path, emb_path = out / "tokens.jsonl", out / "embeddings.csv"
    if not (tok_path.is_file() and emb_path.is_file()):
        return []
    _, langs, _, tokens = _read_tokens(tok_path)
    E = read_embeddings_csv(emb_path)
    n = cfg.datagen.signal_length
    rows = []
    for lang in sorted(set(langs)):
        stream = [t for lg, toks in zip(langs, tokens) if lg == lang for t in toks][:n]
        try:
            rows.append((f"lang:{lang}", token_signal(stream, E, 1, n, cfg.seed)[0]))
        except FusionError:
            continue
    return rows


def cmd_eval_denoise(cfg, out, args):
    d = cfg.datagen
    dcfg = _denoise_cfg(cfg, args)
    sources = [(f"signal:{kind}", gen_signal(kind, d.signal_length, cfg.seed))
               for kind in d.signal_kinds]
    sources += _language_signals(out, cfg)
    rows, table = [], []
    for k, (name, clean) in enumerate(sources):
        noisy, sigma = add_awgn(clean, NoiseSpec(d.signal_snr_db, cfg.seed + k))
        y, rep = denoise(noisy, dcfg, reference=clean)
        rows.append([name, rep.input_snr_db, rep.output_snr_db, rep.improvement_db])
        table.append({"source": name, **rep.to_dict()})
        if k == 0:
            io.write_csv(out / "denoise" / f"{name.split(':')[1]}_triples.csv",
                         ["clean", "noisy", "denoised"], zip(clean, noisy, y))
    io.write_csv(out / "denoise" / "denoise_table.csv",
                 ["source", "initial_snr_db", "improved_snr_db", "improvement_db"], rows)
    io.write_json(out / "denoise" / "denoise_table.json", table)
    gains = [r[3] for r in rows if r[3] is not None]
    return (f"eval-denoise: {len(rows)} sources, mean improvement "
            f"{float(np.mean(gains)):.2f} dB -> {out / 'denoise'}")


def cmd_prep(cfg, out, args):
    docs = read_corpus(_need(out / "corpus.jsonl"))
    prep = prepare(docs, cfg)
    lines = [json.dumps({"id": doc.id, "lang": doc.lang, "label": doc.label, "tokens": toks},
                        ensure_ascii=False) for doc, toks in zip(docs, prep.tokens)]
    io.write_atomic(out / "tokens.jsonl", "\n".join(lines) + "\n")
    io.write_json(out / "split.json", prep.split.to_dict())
    io.write_json(out / "vocab.json", prep.vocab.to_dict())
    s = prep.split
    return (f"prep: {len(docs)} docs, V={len(prep.vocab)}, "
            f"split {len(s.train)}/{len(s.val)}/{len(s.test)}")


def cmd_train_embeddings(cfg, out, args):
    _, _, _, prep = _load_prepared(out)
    E = train_embeddings(prep, cfg)
    write_embeddings_csv(out / "embeddings.csv", E)
    io.write_csv(out / "embedding_loss.csv", ["epoch", "mean_loss"],
                 [(i + 1, float(v)) for i, v in enumerate(E.loss_history)])
    return (f"train-embeddings: V={E.V} d={E.d}, loss {E.loss_history[0]:.4f} -> "
            f"{E.loss_history[-1]:.4f}")


def cmd_train_wesma(cfg, out, args):
    _, _, labels, prep = _load_prepared(out)
    E = read_embeddings_csv(_need(out / "embeddings.csv"))
    model, grid = train_detector(prep, _label_array(labels), E, cfg)
    save_model(out / "model.json", model)
    if grid is not None:
        names = list(cfg.eval.grid)
        io.write_csv(out / "grid.csv", names + ["objective"], grid.rows(names))
    return f"train-wesma: D={model.D} layers={len(model.layers)} chosen={model.metadata['chosen']}"


def cmd_score(cfg, out, args):
    ids, langs, labels, prep = _load_prepared(out)
    E = read_embeddings_csv(_need(out / "embeddings.csv"))
    model = load_model(_need(out / "model.json"))
    scores = score_documents(model, prep.tokens, prep.vocab, E, cfg)
    part = {}
    for name in ("train", "val", "test"):
        for i in getattr(prep.split, name):
            part[i] = name
    io.write_csv(out / "scores.csv", ["id", "lang", "split", "label", "score"],
                 [(ids[i], langs[i], part[i], labels[i] or "", float(scores[i]))
                  for i in range(len(ids))])
    return f"score: {len(ids)} documents -> {out / 'scores.csv'}"


def _read_scores(path):
    rows = path.read_text(encoding="utf-8").splitlines()
    if not rows or rows[0] != "id,lang,split,label,score":
        raise io.DataFormatError(f"{path}: unexpected header")
    ids, labels, scores, part = [], [], [], []
    for line in rows[1:]:
        i, _, s, lab, sc = line.split(",")
        ids.append(i)
        part.append(s)
        labels.append(lab)
        scores.append(float(sc))
    return ids, labels, np.array(scores), part


def cmd_evaluate(cfg, out, args):
    _, labels, scores, part = _read_scores(_need(out / "scores.csv"))
    split = Split(*(tuple(i for i, p in enumerate(part) if p == name)
                    for name in ("train", "val", "test")), cfg.seed, tuple(cfg.eval.ratios))
    res = evaluate_scores(scores, _label_array(labels), split)
    test = res["test"]
    io.write_json(out / "metrics.json", {
        "threshold": _thr(res["threshold"]),
        "val_auc": res["val_auc"],
        "n_test": len(split.test),
        "n_test_threat": int(_label_array(labels)[list(split.test)].sum()),
        "test": test.to_dict(),
    })
    for kind in ("roc", "pr"):
        io.write_csv(out / f"{kind}.csv", ["x", "y", "threshold"],
                     [(float(x), float(y), _thr(t)) for x, y, t in res[kind]])
    return (f"evaluate: test AUC={test.auc:.4f} F1={test.f1:.4f} "
            f"FPR={test.fpr:.4f} FNR={test.fnr:.4f}")


def _read_xy(path, xcol=0, ycol=1):
    rows = _need(path).read_text(encoding="utf-8").splitlines()[1:]
    pts = [r.split(",") for r in rows if r]
    return [float(p[xcol]) for p in pts], [float(p[ycol]) for p in pts]


def cmd_report(cfg, out, args):
    rep = out / "report"
    written = []
    for kind, title, xl, yl in (("roc", "ROC (test split)", "false positive rate",
                                 "true positive rate"),
                                ("pr", "Precision-recall (test split)", "recall", "precision")):
        src = out / f"{kind}.csv"
        if src.is_file():
            xs, ys = _read_xy(src)
            io.write_atomic(rep / f"{kind}.csv", src.read_text(encoding="utf-8"))
            io.write_atomic(rep / f"{kind}.svg", line_plot_svg([(kind.upper(), xs, ys)], title, xl,
                                                               yl, (0, 1), (0, 1)))
            written.append(f"{kind}.svg")
    for triples in sorted((out / "denoise").glob("*_triples.csv")):
        lines = triples.read_text(encoding="utf-8").splitlines()[1:]
        cols = list(zip(*(map(float, ln.split(",")) for ln in lines)))
        t = list(range(len(lines)))
        name = triples.name.replace("_triples.csv", "")
        io.write_atomic(rep / triples.name, triples.read_text(encoding="utf-8"))
        io.write_atomic(rep / f"{name}_waveform.svg", line_plot_svg(
            [("noisy", t, cols[1]), ("clean", t, cols[0]), ("denoised", t, cols[2])],
            f"{name}: clean / noisy / denoised", "sample", "amplitude"))
        written.append(f"{name}_waveform.svg")
    loss = out / "embedding_loss.csv"
    if loss.is_file():
        xs, ys = _read_xy(loss)
        io.write_atomic(rep / "embedding_loss.csv", loss.read_text(encoding="utf-8"))
        io.write_atomic(rep / "embedding_loss.svg", line_plot_svg(
            [("mean loss", xs, ys)], "CBOW training loss", "epoch", "mean loss"))
        written.append("embedding_loss.svg")
    if not written:
        raise FileNotFoundError("report: nothing to plot (run evaluate / eval-denoise first)")
    return f"report: {', '.join(written)} -> {rep}"


PIPELINE = ("gen-data", "prep", "train-embeddings", "train-wesma", "score", "evaluate",
            "eval-denoise", "report")


def cmd_run(cfg, out, args):
    for name in PIPELINE:
        print(COMMANDS[name][0](cfg, out, args))
    return f"run: pipeline complete -> {out}"


COMMANDS = {
    "gen-data": (cmd_gen_data, "generate the synthetic corpus and test signals"),
    "decompose": (cmd_decompose, "undecimated wavelet decomposition of a signal CSV"),
    "denoise": (cmd_denoise, "wavelet-shrinkage denoise a signal CSV"),
    "eval-denoise": (cmd_eval_denoise, "SNR before/after denoising per signal and language"),
    "prep": (cmd_prep, "preprocess the corpus, split it, build the vocabulary"),
    "train-embeddings": (cmd_train_embeddings, "train CBOW embeddings on the training split"),
    "train-wesma": (cmd_train_wesma, "grid-search and fit the WESMA detector"),
    "score": (cmd_score, "anomaly scores for every document"),
    "evaluate": (cmd_evaluate, "test metrics at the validation-selected threshold, ROC/PR"),
    "report": (cmd_report, "render SVG plots with their CSV sources"),
    "run": (cmd_run, "run the whole pipeline in order"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration JSON")
    common.add_argument("--seed", type=int, help="global seed (overrides config)")
    common.add_argument("--out", help=f"output directory (overrides config and ${OUT_ENV})")

    parser = _Parser(prog="wesma", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name in ("decompose", "denoise"):
            p.add_argument("--input", required=True, help="signal CSV, one sample per line")
            p.add_argument("--output", help="destination CSV")
        if name == "denoise":
            p.add_argument("--reference", help="clean signal CSV for SNR accounting")
        if name in ("decompose", "denoise", "eval-denoise"):
            p.add_argument("--filter", choices=["haar", "db2"])
            p.add_argument("--levels", type=int)
        if name in ("denoise", "eval-denoise"):
            p.add_argument("--rule", choices=["hard", "soft"])
            p.add_argument("--sigma", type=float, help="known noise sigma (default: MAD)")
            p.add_argument("--threshold", type=float, help="manual threshold (default: universal)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for attr in ("filter", "levels", "rule", "sigma", "threshold"):
        if not hasattr(args, attr):
            setattr(args, attr, None)
    try:
        cfg = load_config(args.config, {"seed": args.seed})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out or os.environ.get(OUT_ENV) or cfg.out)
    try:
        print(COMMANDS[args.command][0](cfg, out, args))
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegularizationRequired, ArithmeticError, EvalError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (io.DataFormatError, FileNotFoundError, TextPrepError, DatagenError, WaveletError,
            DenoiseError, FusionError, EmbeddingError, WesmaError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
