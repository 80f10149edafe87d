"""Splits, decision thresholds, classification metrics, curves, grid search."""
from dataclasses import asdict, dataclass
import itertools
import math

import numpy as np

POSITIVE = "threat"
NEGATIVE = "legit"


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class Split:
    train: tuple
    val: tuple
    test: tuple
    seed: int
    ratios: tuple

    def to_dict(self):
        return {"seed": self.seed, "ratios": list(self.ratios), "train": list(self.train),
                "val": list(self.val), "test": list(self.test)}


def split_dataset(n, ratios=(0.6, 0.2, 0.2), seed=0):
    """Seeded Fisher-Yates shuffle, then contiguous train/val/test slices.

    Val and test get ``floor(n * ratio)``; the remainder goes to train.
    """
    if n < 3:
        raise EvalError("too few examples")
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1) > 1e-9:
        raise EvalError("ratios must be three positive numbers summing to 1")
    rng = np.random.default_rng(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    n_val = math.floor(n * ratios[1])
    n_test = math.floor(n * ratios[2])
    n_train = n - n_val - n_test
    return Split(tuple(perm[:n_train]), tuple(perm[n_train:n_train + n_val]),
                 tuple(perm[n_train + n_val:]), seed, tuple(ratios))


def _binary(labels):
    out = []
    for lab in labels:
        if lab == POSITIVE or lab is True or lab == 1:
            out.append(True)
        elif lab == NEGATIVE or lab is False or lab == 0:
            out.append(False)
        else:
            raise EvalError(f"label must be {POSITIVE!r} or {NEGATIVE!r}, got {lab!r}")
    return np.array(out, dtype=bool)


def _prepare(scores, labels):
    s = np.asarray(scores, dtype=np.float64)
    y = _binary(labels)
    if s.shape != y.shape:
        raise EvalError("scores and labels differ in length")
    return s, y


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


def confusion(scores, labels, threshold):
    """Predict threat iff ``score > threshold``."""
    s, y = _prepare(scores, labels)
    pred = s > threshold
    return ConfusionCounts(int(np.sum(pred & y)), int(np.sum(pred & ~y)),
                           int(np.sum(~pred & ~y)), int(np.sum(~pred & y)))


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    fpr: float
    fnr: float
    auc: float

    def to_dict(self):
        return asdict(self)


def _ratio(a, b):
    return a / b if b else 0.0


def f1_score(c):
    p, r = _ratio(c.tp, c.tp + c.fp), _ratio(c.tp, c.tp + c.fn)
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def metrics(counts, auc):
    """Degenerate denominators give 0 instead of raising."""
    if counts.total == 0:
        raise EvalError("no evaluated examples")
    c = counts
    return MetricsReport(
        accuracy=(c.tp + c.tn) / c.total,
        precision=_ratio(c.tp, c.tp + c.fp),
        recall=_ratio(c.tp, c.tp + c.fn),
        f1=f1_score(c),
        fpr=_ratio(c.fp, c.fp + c.tn),
        fnr=_ratio(c.fn, c.fn + c.tp),
        auc=float(auc),
    )


def _require_both(y):
    if y.all() or not y.any():
        raise EvalError("AUC undefined: need both classes")


def roc_auc(scores, labels):
    """Mann-Whitney statistic; ties count one half.

    Computed from ranks in O(n log n); the pairwise definition is used
    as the test oracle.
    """
    s, y = _prepare(scores, labels)
    _require_both(y)
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s))
    sorted_s = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def curve_points(scores, labels, kind="roc"):
    """Operating points at +inf, each distinct score (descending), -inf.

    Returns a list of ``(x, y, threshold)``: ``(fpr, tpr)`` for ROC,
    ``(recall, precision)`` for PR. Precision with no positive
    predictions is reported as 1, the usual anchor for PR curves.
    """
    s, y = _prepare(scores, labels)
    _require_both(y)
    if kind not in ("roc", "pr"):
        raise EvalError(f"unknown curve kind {kind!r}")
    thresholds = [math.inf] + sorted(set(s.tolist()), reverse=True) + [-math.inf]
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    points = []
    for t in thresholds:
        c = confusion(s, y, t)
        if kind == "roc":
            points.append((c.fp / n_neg, c.tp / n_pos, t))
        else:
            prec = c.tp / (c.tp + c.fp) if c.tp + c.fp else 1.0
            points.append((c.tp / n_pos, prec, t))
    return points


def trapezoid_area(points):
    return float(sum((x1 - x0) * (y0 + y1) / 2.0
                     for (x0, y0, _), (x1, y1, _) in zip(points, points[1:])))


def select_threshold(scores, labels):
    """Threshold maximizing F1 among gap midpoints and +/-inf.

    Ties resolve to the smallest threshold.
    """
    s, y = _prepare(scores, labels)
    _require_both(y)
    distinct = sorted(set(s.tolist()))
    candidates = [-math.inf] + [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])] + [math.inf]
    best_t, best_f = None, -1.0
    for t in candidates:
        f = f1_score(confusion(s, y, t))
        if f > best_f:
            best_t, best_f = t, f
    return best_t


@dataclass
class GridResult:
    best_params: dict | None
    best_score: float | None
    table: list

    def rows(self, names):
        out = []
        for params, score, error in self.table:
            out.append([params[k] for k in names] + [score if error is None else "error"])
        return out


def grid_search(param_grid, eval_fn, objective=max):
    """Evaluate every cell of the Cartesian grid in grid order.

    ``eval_fn(params) -> float``. Failing cells are recorded with their
    error and skipped. Ties keep the earliest cell (parameter order,
    then value order).
    """
    if not param_grid or any(len(v) == 0 for v in param_grid.values()):
        raise EvalError("grid must be nonempty")
    names = list(param_grid)
    table = []
    best_params = best_score = None
    for values in itertools.product(*(param_grid[k] for k in names)):
        params = dict(zip(names, values))
        try:
            score = float(eval_fn(params))
        except Exception as exc:  # noqa: BLE001 - recorded per cell
            table.append((params, None, f"{type(exc).__name__}: {exc}"))
            continue
        table.append((params, score, None))
        if best_score is None or (score != best_score and objective(score, best_score) == score):
            best_params, best_score = params, score
    return GridResult(best_params, best_score, table)
