"""Preferential-attachment citation networks, bootstrap percolation, and the
closed-form predictions of the continuous growth model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .analysis import LinearFit, fit_linear, quadratic_coefficient
from .engine import compute_volumes, kqi_all
from .errors import ValidityGuardError
from .graph import CitationGraph, augment_super_root, induced_subgraph

SCHEDULE_KINDS = ("standard", "accelerated", "decelerated", "custom")


@dataclass(frozen=True)
class ArrivalSchedule:
    """How many papers arrive at each integer step ``t >= 1``.

    The continuous target ``N(t)`` is rounded once per step and differenced,
    so the cumulative count always equals ``round(N(t))`` exactly.
    Use the constructors rather than filling the fields by hand.
    """

    kind: str
    form: str
    params: tuple
    counts_override: tuple = field(default=(), repr=False)

    # forms: standard (m, k, b); power (c, p); exponential (c, rate);
    # constant (s0,); inverse (c,); table ()

    @classmethod
    def standard(cls, m: int, k: float, b: float = 0.0) -> "ArrivalSchedule":
        """``W(t)^(1/(m+1)) / m = k t + b`` with ``W = (m + 1) N``."""
        return cls("standard", "standard", (int(m), float(k), float(b)))

    @classmethod
    def standard_sized(
        cls, m: int, total: int, steps: int, initial: float | None = None
    ) -> "ArrivalSchedule":
        """Standard growth reaching ``total`` papers at step ``steps``.

        Without ``initial`` the line passes through the origin (``b = 0``);
        otherwise it is pinned so that step 1 holds ``initial`` papers.
        """
        def level(n):
            return ((m + 1) * n) ** (1.0 / (m + 1)) / m

        if initial is None or steps == 1:
            return cls.standard(m, level(total) / steps, 0.0)
        k = (level(total) - level(initial)) / (steps - 1)
        return cls.standard(m, k, level(initial) - k)

    @classmethod
    def power(cls, c: float, p: float) -> "ArrivalSchedule":
        """Accelerated arrivals ``s(t) = c t^p``."""
        return cls("accelerated", "power", (float(c), float(p)))

    @classmethod
    def exponential(cls, c: float, rate: float = 1.0) -> "ArrivalSchedule":
        return cls("accelerated", "exponential", (float(c), float(rate)))

    @classmethod
    def constant(cls, s0: float) -> "ArrivalSchedule":
        return cls("decelerated", "constant", (float(s0),))

    @classmethod
    def inverse(cls, c: float) -> "ArrivalSchedule":
        """Decelerated arrivals ``s(t) = c / t``."""
        return cls("decelerated", "inverse", (float(c),))

    @classmethod
    def custom(cls, counts: Sequence[int]) -> "ArrivalSchedule":
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValueError("arrival counts must be nonnegative")
        return cls("custom", "table", (), counts)

    def cumulative(self, t: int) -> float:
        """Continuous cumulative target ``N(t)``; ``N(0) = 0``."""
        if t <= 0:
            return 0.0
        f, p = self.form, self.params
        if f == "standard":
            m, k, b = p
            return max(m * (k * t + b), 0.0) ** (m + 1) / (m + 1)
        if f == "table":
            return float(sum(self.counts_override[:t]))
        rate: Callable[[int], float]
        if f == "power":
            rate = lambda s: p[0] * s ** p[1]
        elif f == "exponential":
            rate = lambda s: p[0] * math.exp(p[1] * s)
        elif f == "constant":
            rate = lambda s: p[0]
        elif f == "inverse":
            rate = lambda s: p[0] / s
        else:
            raise ValueError(f"unknown schedule form {f!r}")
        return math.fsum(rate(s) for s in range(1, t + 1))

    def counts(self, steps: int) -> np.ndarray:
        targets = [0] + [round(self.cumulative(t)) for t in range(1, steps + 1)]
        if max(targets) >= 2**62:
            raise ValueError("schedule exceeds the representable number of papers")
        cum = np.array(targets, dtype=np.int64)
        out = np.diff(cum)
        if np.any(out < 0):
            raise ValueError("schedule produced a negative arrival count")
        return out

    def arrivals(self, t: int) -> int:
        if t < 1:
            return 0
        return int(round(self.cumulative(t)) - round(self.cumulative(t - 1)))


@dataclass(frozen=True)
class BaConfig:
    m: int
    schedule: ArrivalSchedule
    seed: int = 0
    steps: int = 20
    kernel: str = "total"  # "total": in+out degree, "in": citations received

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if self.kernel not in ("total", "in"):
            raise ValueError(f"unknown attachment kernel {self.kernel!r}")


def generate_ba(cfg: BaConfig) -> CitationGraph:
    """Grow a citation DAG by preferential attachment.

    Papers arrive one by one in schedule order. Each cites ``min(m, existing)``
    distinct earlier papers drawn with probability proportional to degree + 1
    (the +1 stands in for a self-ring; no loop edge is stored). A paper's year
    is its arrival step; its id is its arrival index.
    """
    counts = cfg.schedule.counts(cfg.steps)
    n = int(counts.sum())
    src, dst = _kernels.preferential_attachment(n, cfg.m, cfg.seed, cfg.kernel == "total")
    years = np.repeat(np.arange(1, cfg.steps + 1, dtype=np.float64), counts)
    ids = [str(i) for i in range(n)]
    # targets always precede the newcomer and are distinct, so the result is a valid DAG
    return CitationGraph.from_arrays(ids, src, dst, None, years, validate=False)


def total_kqi_series(g: CitationGraph, steps: int, simplified: bool = False):
    """Total KQI of each yearly prefix of a simulated graph.

    With ``simplified`` the sum of ``volume / W`` over real nodes is returned
    instead of the exact KQI total.
    """
    totals = []
    for t in range(1, steps + 1):
        snap = augment_super_root(induced_subgraph(g, g.years <= t))
        if snap.n_nodes == 1:
            totals.append(0.0)
            continue
        vt = compute_volumes(snap)
        if simplified:
            real = snap.real_nodes()
            totals.append(float(vt.volume[real].sum() / vt.total_weight))
        else:
            totals.append(kqi_all(snap, vt).total)
    return np.arange(1, steps + 1), np.array(totals)


def total_kqi_growth_check(cfg: BaConfig) -> LinearFit:
    """Linear fit of total KQI against time under standard growth."""
    if cfg.schedule.kind != "standard":
        raise ValueError("growth check needs a standard schedule")
    ts, totals = total_kqi_series(generate_ba(cfg), cfg.steps)
    return fit_linear(ts, totals)


def total_kqi_curvature(cfg: BaConfig, skip: int = 0) -> float:
    """Quadratic coefficient of total KQI over time (positive means convex).

    ``skip`` drops the first steps, where the network is too small to matter.
    """
    ts, totals = total_kqi_series(generate_ba(cfg), cfg.steps)
    return quadratic_coefficient(ts[skip:], totals[skip:])


@dataclass(frozen=True)
class ActivationConfig:
    a: int
    seed_fraction: float
    rng_seed: int = 0

    def __post_init__(self):
        if self.a < 1:
            raise ValueError("a must be a positive integer")
        if not 0 < self.seed_fraction < 1:
            raise ValueError("seed_fraction must lie in (0, 1)")


def bootstrap_percolation(g: CitationGraph, cfg: ActivationConfig) -> tuple:
    """Synchronous bootstrap percolation on the undirected citation graph.

    ``ceil(seed_fraction * n)`` random papers start active; each round every
    inactive paper with at least ``a`` active neighbours turns active. Runs to
    a fixed point and returns ``(active_fraction, rounds)`` where ``rounds``
    counts the rounds that activated something. The super root is ignored.
    """
    real = g.real_nodes()
    n = len(real)
    if n == 0:
        raise ValueError("graph is empty")
    keep = ~g.root_edge_mask
    pos = np.full(g.n_nodes, -1, dtype=np.int64)
    pos[real] = np.arange(n)
    a, b = pos[g.src[keep]], pos[g.dst[keep]]
    ones = np.ones(len(a))
    adj = sp.csr_matrix((np.concatenate([ones, ones]), (np.concatenate([a, b]), np.concatenate([b, a]))), shape=(n, n))
    rng = np.random.default_rng(cfg.rng_seed)
    active = np.zeros(n, dtype=bool)
    active[rng.choice(n, size=math.ceil(cfg.seed_fraction * n), replace=False)] = True
    count = np.zeros(n)
    frontier = active.copy()
    rounds = 0
    while True:
        count += adj @ frontier.astype(np.float64)
        new = ~active & (count >= cfg.a)
        if not new.any():
            break
        active |= new
        frontier = new
        rounds += 1
    return float(active.mean()), rounds


@dataclass(frozen=True)
class Prediction:
    degree: float
    volume: float
    contain_proportion: float | None
    kqi_approx: float | None


def analytic_predictions(m: int, r: float, w_birth: float | None = None) -> Prediction:
    """Continuous-model estimates for a node at growth ratio ``r = W(t) / W(t_i)``.

    ``degree = r^(m/(m+1))``, ``volume = m^2/(m+2) (r^((m+2)/(m+1)) - 1)``.
    Given the birth size ``w_birth = W(t_i)``, also the containing proportion
    ``(m / W(t_i)) r^(1/(m+1))`` and ``kqi ~ volume / W(t)``; the proportion is
    only valid while ``W(t) < W(t_i)^(m+2) / m^(m+1)``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if r < 1:
        raise ValueError("r must be at least 1")
    degree = r ** (m / (m + 1))
    volume = m * m / (m + 2) * (r ** ((m + 2) / (m + 1)) - 1.0)
    if w_birth is None:
        return Prediction(degree, volume, None, None)
    # compare in logs; the bound overflows floats for modest m
    lhs = math.log(r) + math.log(w_birth)
    rhs = (m + 2) * math.log(w_birth) - (m + 1) * math.log(m)
    if not lhs < rhs:
        raise ValidityGuardError(f"W(t) = {r * w_birth:g} exceeds the validity bound")
    contain = m / w_birth * r ** (1.0 / (m + 1))
    return Prediction(degree, volume, contain, volume / (r * w_birth))
