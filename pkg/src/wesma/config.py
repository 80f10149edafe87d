"""Run configuration: one JSON document with a section per stage."""
from dataclasses import dataclass, field, fields, is_dataclass, asdict
import json
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class DatagenSection:
    languages: list = field(default_factory=lambda: [["en", 300, 200], ["hi", 300, 200],
                                                     ["ta", 300, 200], ["fr", 300, 200]])
    doc_length: int = 30
    typo_rate: float = 0.05
    threat_rate: float = 0.05
    signal_kinds: list = field(default_factory=lambda: ["blocks", "bumps", "doppler", "sine"])
    signal_length: int = 2048
    signal_snr_db: float = 10.5


@dataclass
class DenoiseSection:
    filter_name: str = "haar"
    levels: int = 5
    rule: str = "soft"
    sigma: float | None = None
    threshold: float | None = None


@dataclass
class TextprepSection:
    profiles: dict = field(default_factory=dict)
    min_count: int = 2
    weighting: str = "tfidf"


@dataclass
class CbowSection:
    dim: int = 32
    window: int = 2
    negatives: int = 5
    learning_rate: float = 0.05
    epochs: int = 5


@dataclass
class WesmaSection:
    layers: int = 1
    lam: float = 1e-3
    repr_mode: str = "concat"
    base_p0: float = 0.3
    boost: float = 0.0
    p_max: float = 0.9
    seed_terms: list = field(default_factory=list)
    fit_on: str = "legit"
    projections: int = 2
    signal_length: int = 64
    signal_levels: int = 3
    signal_wavelet: str = "haar"
    subband_scale: float = 0.1


@dataclass
class EvalSection:
    ratios: list = field(default_factory=lambda: [0.6, 0.2, 0.2])
    grid: dict = field(default_factory=lambda: {"lam": [1e-3, 0.01, 0.1, 0.3, 1.0]})


@dataclass
class RunConfig:
    seed: int = 0
    out: str = "out"
    datagen: DatagenSection = field(default_factory=DatagenSection)
    denoise: DenoiseSection = field(default_factory=DenoiseSection)
    textprep: TextprepSection = field(default_factory=TextprepSection)
    cbow: CbowSection = field(default_factory=CbowSection)
    wesma: WesmaSection = field(default_factory=WesmaSection)
    eval: EvalSection = field(default_factory=EvalSection)

    def to_dict(self):
        return asdict(self)


def _type_ok(default, value):
    if isinstance(value, bool):
        return isinstance(default, bool)
    if default is None:
        return value is None or isinstance(value, (int, float))
    if isinstance(default, float):
        return isinstance(value, (int, float))
    return isinstance(value, type(default))


def _build(cls, obj, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(obj) - set(known))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}")
    kwargs = {}
    for name, value in obj.items():
        default = getattr(cls(), name)
        if is_dataclass(default):
            kwargs[name] = _build(type(default), value, f"{where}.{name}")
            continue
        if not _type_ok(default, value):
            raise ConfigError(f"{where}.{name}: expected {type(default).__name__}, "
                              f"got {type(value).__name__}")
        kwargs[name] = float(value) if isinstance(default, float) else value
    return cls(**kwargs)


def validate(cfg):
    """Cross-field checks; referenced profile files must exist."""
    for lang, path in cfg.textprep.profiles.items():
        if not Path(path).is_file():
            raise ConfigError(f"textprep.profiles.{lang}: file not found: {path}")
    if len(cfg.eval.ratios) != 3:
        raise ConfigError("eval.ratios must have three entries")
    allowed = {"lam", "base_p0", "boost", "subband_scale"}
    bad = sorted(set(cfg.eval.grid) - allowed)
    if bad:
        raise ConfigError(f"eval.grid: unsupported parameter(s) {bad}; allowed {sorted(allowed)}")
    if cfg.wesma.fit_on not in ("legit", "all"):
        raise ConfigError("wesma.fit_on must be 'legit' or 'all'")
    for entry in cfg.datagen.languages:
        if not (isinstance(entry, list) and len(entry) == 3):
            raise ConfigError("datagen.languages entries must be [lang, vocab_size, doc_count]")
    return cfg


def load_config(path=None, overrides=None):
    obj = {}
    if path is not None:
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    obj.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return validate(_build(RunConfig, obj, "config"))
