"""Growth series, linear fits and boom detection, Pareto split, and the
baseline metrics (PageRank, h-index, Spearman) KQI is compared against."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.stats import rankdata

from .engine import KqiTable, compute_volumes, kqi_all
from .errors import (
    AllZeroError,
    DegenerateInputError,
    KeyMismatchError,
    NonconvergenceError,
    TooFewPointsError,
)
from .graph import (
    CitationGraph,
    DecaySpec,
    SnapshotSpec,
    apply_decay,
    augment_super_root,
    snapshot_at,
)


@dataclass(frozen=True)
class GrowthSeries:
    years: tuple
    total_kqi: tuple
    n_nodes: tuple
    mean_in_strength: tuple

    def __post_init__(self):
        if not len(self.years) == len(self.total_kqi) == len(self.n_nodes) == len(self.mean_in_strength):
            raise ValueError("growth series columns differ in length")

    def __len__(self):
        return len(self.years)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["year", "total_kqi", "n", "m"])
        for row in zip(self.years, self.total_kqi, self.n_nodes, self.mean_in_strength):
            w.writerow([row[0], repr(row[1]), row[2], repr(row[3])])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)


def _snapshot_point(g, year, decay):
    snap = augment_super_root(snapshot_at(g, SnapshotSpec(year)))
    n = snap.n_nodes - 1
    if n == 0:
        return 0.0, 0, 0.0
    if decay is not None:
        snap = apply_decay(snap, DecaySpec(decay.rate, year))
    kt = kqi_all(snap, compute_volumes(snap))
    refs = snap.weight[~snap.root_edge_mask]
    m = math.fsum(refs.tolist()) / n
    return kt.total, n, m


def growth_series(
    g: CitationGraph,
    years: Iterable[int],
    decay: DecaySpec | None = None,
    workers: int = 1,
) -> GrowthSeries:
    """Total KQI, paper count ``n`` and mean reference count ``m`` per snapshot year.

    Each snapshot is augmented separately; with ``decay`` the edge weights are
    aged relative to the snapshot year (``decay.reference_time`` is ignored).
    ``m`` averages in-strength over real papers, excluding super-root edges.
    """
    years = sorted(int(y) for y in years)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            points = list(pool.map(lambda y: _snapshot_point(g, y, decay), years))
    else:
        points = [_snapshot_point(g, y, decay) for y in years]
    return GrowthSeries(
        tuple(years),
        tuple(p[0] for p in points),
        tuple(p[1] for p in points),
        tuple(p[2] for p in points),
    )


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    rss: float
    r2: float


def fit_linear(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """Ordinary least squares ``y = slope * x + intercept``.

    A constant ``ys`` has zero total variance; its ``r2`` is defined as 1.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d and of equal length")
    if len(x) < 3:
        raise DegenerateInputError("need at least 3 points")
    if np.ptp(x) == 0:
        raise DegenerateInputError("xs are constant")
    xc = x - x.mean()
    yc = y - y.mean()
    slope = float(xc @ yc / (xc @ xc))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    rss = float(resid @ resid)
    sst = float(yc @ yc)
    if sst == 0:
        return LinearFit(slope, intercept, rss, 1.0)
    r2 = min(1.0, max(0.0, 1.0 - rss / sst))
    return LinearFit(slope, intercept, rss, r2)


def quadratic_coefficient(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Leading coefficient of a least-squares parabola; its sign is the curvature."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    # centre and scale x so the fit stays well conditioned
    u = (x - x.mean()) / (np.ptp(x) or 1.0)
    c2 = np.polyfit(u, y, 2)[0]
    return float(c2 / (np.ptp(x) or 1.0) ** 2)


def threshold_statistic(m: float, n: float) -> float:
    """Required active-neighbour count ``a = (m - 1) / ln n`` at the boom threshold."""
    if n <= 1:
        return math.nan
    return (m - 1) / math.log(n)


@dataclass(frozen=True)
class BoomReport:
    fit: LinearFit
    boomed: bool
    a: float
    threshold_year: int | None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)


def _rescale(y: np.ndarray, scale: str) -> np.ndarray:
    if scale == "none":
        return y
    if scale == "minmax100":
        span = np.ptp(y)
        # a span at rounding level is a constant series, not a signal to stretch
        if span <= 1e-9 * np.max(np.abs(y), initial=0.0):
            return np.zeros_like(y)
        return (y - y.min()) / span * 100.0
    raise ValueError(f"unknown scale {scale!r}")


def detect_boom(
    series: GrowthSeries,
    rss_critical: float = 9.0,
    scale: str = "minmax100",
    increments: bool = False,
) -> BoomReport:
    """Flag a departure from linear KQI growth.

    Total KQI (or its yearly increments) is rescaled, regressed on year, and
    declared boomed when the residual sum of squares exceeds ``rss_critical``.
    ``a`` is evaluated at the final year; ``threshold_year`` is the first year
    whose ``m`` exceeds ``a * ln(n) + 1``.
    """
    if len(series) < 5:
        raise TooFewPointsError(f"need at least 5 yearly points, got {len(series)}")
    years = np.asarray(series.years, dtype=float)
    y = np.asarray(series.total_kqi, dtype=float)
    if increments:
        years, y = years[1:], np.diff(y)
    fit = fit_linear(years, _rescale(y, scale))
    a = threshold_statistic(series.mean_in_strength[-1], series.n_nodes[-1])
    threshold_year = None
    if not math.isnan(a):
        for year, n, m in zip(series.years, series.n_nodes, series.mean_in_strength):
            if n > 1 and m > a * math.log(n) + 1:
                threshold_year = int(year)
                break
    return BoomReport(fit, fit.rss > rss_critical, a, threshold_year)


@dataclass(frozen=True)
class ParetoReport:
    crossing: float
    share_at_crossing: float
    curve: tuple  # ((fraction, cumulative share), ...)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fraction", "share"])
        for f, s in self.curve:
            w.writerow([repr(f), repr(s)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)


def pareto_split(kt: KqiTable | Mapping[str, float]) -> ParetoReport:
    """Smallest top fraction ``k/n`` of papers holding at least ``1 - k/n`` of all KQI."""
    scores = kt.as_dict() if isinstance(kt, KqiTable) else dict(kt)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    values = np.array([v for _, v in ranked], dtype=float)
    total = values.sum() if len(values) else 0.0
    if not total > 0:
        raise AllZeroError("no paper has positive KQI")
    n = len(values)
    # rounding can push a partial sum past 1; the curve must stay monotone
    share = np.minimum(np.cumsum(values) / total, 1.0)
    share[-1] = 1.0
    frac = np.arange(1, n + 1) / n
    k = int(np.flatnonzero(share >= 1.0 - frac)[0])
    curve = ((0.0, 0.0),) + tuple(zip(frac.tolist(), share.tolist()))
    return ParetoReport(float(frac[k]), float(share[k]), curve)


# -- baselines ---------------------------------------------------------------


def pagerank(
    g: CitationGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    direction: str = "citing_to_cited",
) -> dict:
    """Power-iteration PageRank over the real papers.

    By default the walk follows citations (citing paper to cited paper).
    Mass stranded on nodes without out-links is spread uniformly, as is the
    teleport term; iteration stops when the L1 change drops below ``tol``.
    """
    real = g.real_nodes()
    n = len(real)
    if n == 0:
        return {}
    keep = ~g.root_edge_mask
    pos = np.full(g.n_nodes, -1, dtype=np.int64)
    pos[real] = np.arange(n)
    a, b = pos[g.src[keep]], pos[g.dst[keep]]
    if direction == "citing_to_cited":
        frm, to = b, a
    elif direction == "cited_to_citing":
        frm, to = a, b
    else:
        raise ValueError(f"unknown direction {direction!r}")
    w = g.weight[keep]
    out = np.bincount(frm, w, minlength=n)
    dangling = out == 0
    T = sp.csr_matrix((w / out[frm], (to, frm)), shape=(n, n))
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (T @ x + x[dangling].sum() / n) + (1.0 - damping) / n
        nxt /= nxt.sum()
        delta = np.abs(nxt - x).sum()
        x = nxt
        if delta < tol:
            return {g.ids[i]: float(s) for i, s in zip(real.tolist(), x)}
    raise NonconvergenceError(f"PageRank did not converge in {max_iter} iterations")


def h_index(citation_counts: Iterable[int]) -> int:
    counts = sorted((int(c) for c in citation_counts), reverse=True)
    h = 0
    for i, c in enumerate(counts, 1):
        if c < i:
            break
        h = i
    return h


def citation_counts(g: CitationGraph) -> dict:
    """Number of real papers citing each real paper."""
    real = g.real_nodes()
    return {g.ids[i]: int(g.out_degree[i]) for i in real.tolist()}


def group_h_index(g: CitationGraph, kind: str, first_author: bool = False) -> dict:
    """h-index per group key from the citation counts of its papers."""
    cites = citation_counts(g)
    papers: dict = {}
    for i in g.real_nodes().tolist():
        keys = g.groups[kind][i]
        for key in dict.fromkeys(keys[:1] if first_author else keys):
            papers.setdefault(key, []).append(cites[g.ids[i]])
    return {k: h_index(v) for k, v in papers.items()}


def rank_correlation(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Spearman correlation with average ranks for ties.

    Returns 0.0 when either side is constant (no ordering to agree with).
    """
    if set(a) != set(b):
        raise KeyMismatchError("score mappings have different keys")
    if len(a) < 3:
        raise ValueError("need at least 3 keys")
    keys = sorted(a)
    ra = rankdata([a[k] for k in keys])
    rb = rankdata([b[k] for k in keys])
    ra -= ra.mean()
    rb -= rb.mean()
    denom = math.sqrt(float(ra @ ra) * float(rb @ rb))
    if denom == 0:
        return 0.0
    return max(-1.0, min(1.0, float(ra @ rb) / denom))
