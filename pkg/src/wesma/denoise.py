"""Wavelet shrinkage denoising over the undecimated transform."""
from dataclasses import asdict, dataclass
import math

import numpy as np

from .wavelet import as_signal, get_filter, uwt_forward, uwt_inverse

MAD_SCALE = 0.6745
RULES = ("hard", "soft")


class DenoiseError(ValueError):
    pass


@dataclass(frozen=True)
class DenoiseConfig:
    """Shrinkage settings.

    ``sigma=None`` estimates the noise level by MAD on the finest detail
    band; ``threshold=None`` uses the universal threshold.
    """

    filter_name: str = "haar"
    levels: int = 5
    rule: str = "soft"
    sigma: float | None = None
    threshold: float | None = None

    def __post_init__(self):
        get_filter(self.filter_name)
        if self.rule not in RULES:
            raise DenoiseError(f"rule must be one of {RULES}, got {self.rule!r}")
        if int(self.levels) < 1:
            raise DenoiseError("levels must be >= 1")
        if self.sigma is not None and not self.sigma >= 0:
            raise DenoiseError("known sigma must be >= 0")
        if self.threshold is not None and not self.threshold >= 0:
            raise DenoiseError("manual threshold must be >= 0")


@dataclass(frozen=True)
class DenoiseReport:
    sigma_used: float
    threshold_used: float
    input_snr_db: float | None = None
    output_snr_db: float | None = None
    improvement_db: float | None = None

    def to_dict(self):
        out = {}
        for key, v in asdict(self).items():
            if v is None:
                out[key] = "unavailable"
            elif math.isinf(v):
                out[key] = "infinite" if v > 0 else "-infinite"
            else:
                out[key] = v
        return out


def mad_sigma(finest_detail):
    d = np.asarray(finest_detail, dtype=np.float64)
    if d.size == 0:
        raise DenoiseError("empty detail band")
    return float(np.median(np.abs(d))) / MAD_SCALE


def universal_threshold(sigma, n):
    if n < 1:
        raise DenoiseError("N must be >= 1")
    if sigma < 0:
        raise DenoiseError("sigma must be >= 0")
    return sigma * math.sqrt(2.0 * math.log(n))


def apply_threshold(c, t, rule="soft"):
    """Hard or soft shrinkage; works elementwise on arrays."""
    if t < 0:
        raise DenoiseError("threshold must be >= 0")
    c = np.asarray(c, dtype=np.float64)
    if rule == "hard":
        out = np.where(np.abs(c) > t, c, 0.0)
    elif rule == "soft":
        out = np.sign(c) * np.maximum(np.abs(c) - t, 0.0)
    else:
        raise DenoiseError(f"unknown rule {rule!r}")
    return out if out.ndim else float(out)


def snr_db(reference, estimate):
    """10 log10 of reference power over residual power; ``inf`` if exact."""
    ref = np.asarray(reference, dtype=np.float64)
    est = np.asarray(estimate, dtype=np.float64)
    if ref.shape != est.shape:
        raise DenoiseError("length mismatch")
    power = float(np.sum(ref * ref))
    if power == 0.0:
        raise DenoiseError("reference signal is all zero")
    residual = float(np.sum((ref - est) ** 2))
    if residual < 1e-300:
        return math.inf
    return 10.0 * math.log10(power / residual)


def denoise(x, cfg=None, reference=None):
    """Threshold every detail band with one global threshold.

    The approximation band is left untouched. When ``reference`` (the
    clean signal) is given, the report carries SNR before and after.
    """
    cfg = cfg or DenoiseConfig()
    x = as_signal(x)
    dec = uwt_forward(x, cfg.filter_name, cfg.levels)
    sigma = cfg.sigma if cfg.sigma is not None else mad_sigma(dec.details[0])
    t = cfg.threshold if cfg.threshold is not None else universal_threshold(sigma, len(x))
    shrunk = type(dec)(tuple(apply_threshold(d, t, cfg.rule) for d in dec.details),
                       dec.approx, dec.filter_name)
    y = uwt_inverse(shrunk)

    snr_in = snr_out = gain = None
    if reference is not None:
        snr_in = snr_db(reference, x)
        snr_out = snr_db(reference, y)
        if not (math.isinf(snr_in) or math.isinf(snr_out)):
            gain = snr_out - snr_in
    return y, DenoiseReport(float(sigma), float(t), snr_in, snr_out, gain)
