"""Volume propagation, per-node KQI, the fragment-enumeration oracle and
additive group aggregation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import (
    FragmentExplosionError,
    MismatchedTableError,
    NotAugmentedError,
    UnknownGroupKindError,
    ZeroInStrengthError,
)
from .graph import GROUP_KINDS, CitationGraph


@dataclass(frozen=True, eq=False)
class VolumeTable:
    """Propagated volume of every node (super root included) plus W."""

    ids: tuple
    volume: np.ndarray
    total_weight: float
    root: int | None

    def __getitem__(self, node_id) -> float:
        return float(self.volume[self._index[node_id]])

    @cached_property
    def _index(self) -> dict:
        return {v: i for i, v in enumerate(self.ids)}

    def as_dict(self) -> dict:
        return dict(zip(self.ids, self.volume.tolist()))

    @property
    def fingerprint(self) -> tuple:
        return (len(self.ids), self.total_weight)


def _fingerprint(g: CitationGraph) -> tuple:
    return (g.n_nodes, g.total_weight)


def compute_volumes(g: CitationGraph) -> VolumeTable:
    """Single backward pass over a topological order.

    ``volume(v) = s_out(v) + sum(w_vu / s_in(u) * volume(u))`` over the papers
    ``u`` citing ``v``.
    """
    if not g.is_augmented:
        raise NotAugmentedError("augment the graph with a super root first")
    s_in = g.in_strength
    real = g.real_nodes()
    bad = real[s_in[real] <= 0]
    if len(bad):
        raise ZeroInStrengthError(g.ids[bad[0]])
    vol = _kernels.propagate_volumes(
        g.topological_order, g.indptr, g.dst, g.weight, s_in, g.out_strength
    )
    vol.setflags(write=False)
    return VolumeTable(g.ids, vol, g.total_weight, g.root)


@dataclass(frozen=True, eq=False)
class KqiTable:
    """Per-node KQI with the quantities it was derived from.

    The super root is carried in the arrays (KQI 0) so positions line up with
    the graph, but it is left out of :attr:`total`, :meth:`as_dict` and every
    export.
    """

    ids: tuple
    kqi: np.ndarray
    volume: np.ndarray
    in_strength: np.ndarray
    out_strength: np.ndarray
    total: float
    root: int | None

    def __getitem__(self, node_id) -> float:
        return float(self.kqi[self._index[node_id]])

    @cached_property
    def _index(self) -> dict:
        return {v: i for i, v in enumerate(self.ids)}

    def real_nodes(self) -> np.ndarray:
        mask = np.ones(len(self.ids), dtype=bool)
        if self.root is not None:
            mask[self.root] = False
        return np.flatnonzero(mask)

    def as_dict(self) -> dict:
        return {self.ids[i]: float(self.kqi[i]) for i in self.real_nodes().tolist()}

    def ranked(self) -> list:
        """Real node ids ordered by KQI descending, ties by id ascending."""
        return [v for v, _ in sorted(self.as_dict().items(), key=lambda kv: (-kv[1], kv[0]))]

    def rows(self):
        for i in self.real_nodes().tolist():
            yield (
                self.ids[i],
                float(self.kqi[i]),
                float(self.volume[i]),
                float(self.in_strength[i]),
                float(self.out_strength[i]),
            )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "kqi", "volume", "in_strength", "out_strength"])
        for row in self.rows():
            w.writerow([row[0]] + [repr(x) for x in row[1:]])
        return buf.getvalue()

    def to_json(self) -> str:
        keys = ("id", "kqi", "volume", "in_strength", "out_strength")
        return json.dumps(
            {"total": self.total, "nodes": [dict(zip(keys, r)) for r in self.rows()]}, indent=1
        )


def kqi_all(g: CitationGraph, vt: VolumeTable | None = None) -> KqiTable:
    """KQI of every node from the volume table.

    Each parent ``u`` of ``v`` receives the share ``x = volume(v) * w_uv / s_in(v)``
    and contributes ``-(x / W) * log2(x / volume(u))``; a zero share
    contributes nothing.
    """
    if vt is None:
        vt = compute_volumes(g)
    if vt.fingerprint != _fingerprint(g):
        raise MismatchedTableError("volume table was computed from a different graph")
    vol = vt.volume
    W = vt.total_weight
    n = g.n_nodes
    if g.n_edges == 0 or W == 0:
        kqi = np.zeros(n)
    else:
        share = vol[g.dst] * (g.weight / g.in_strength[g.dst])
        parent = vol[g.src]
        terms = np.zeros(g.n_edges)
        pos = share > 0
        terms[pos] = -(share[pos] / W) * np.log2(share[pos] / parent[pos])
        if np.any(terms < 0):
            k = int(np.argmin(terms))
            raise AssertionError(f"negative KQI term on edge {g.ids[g.src[k]]}->{g.ids[g.dst[k]]}")
        kqi = np.bincount(g.dst, terms, minlength=n)
    if g.root is not None:
        kqi[g.root] = 0.0
    kqi.setflags(write=False)
    real = g.real_nodes()
    total = math.fsum(kqi[real].tolist())
    return KqiTable(g.ids, kqi, vol, g.in_strength, g.out_strength, total, g.root)


def kqi_of(g: CitationGraph, vt: VolumeTable, node_id) -> float:
    """Constant-time query for a single node (cost proportional to its in-degree)."""
    v = g.index[node_id]
    if v == g.root or vt.total_weight == 0:
        return 0.0
    total = 0.0
    s_in = g.in_strength[v]
    in_ptr, in_order = g._in_csr
    for k in in_order[in_ptr[v]:in_ptr[v + 1]].tolist():
        x = vt.volume[v] * g.weight[k] / s_in
        if x > 0:
            total -= x / vt.total_weight * math.log2(x / vt.volume[g.src[k]])
    return total


# -- fragment oracle ---------------------------------------------------------


def _unfold(g: CitationGraph, limit: int):
    """Decompose the knowledge tree into an ordinary tree of fragments.

    Every root-to-node path is one fragment; its share of the node is the
    product of ``w / s_in`` along the path. Returns, per node index, the list
    of ``(fragment_volume, parent_fragment_volume)`` pairs.
    """
    if not g.is_augmented:
        raise NotAugmentedError("augment the graph with a super root first")
    children = [[] for _ in range(g.n_nodes)]
    for s, d, w in zip(g.src.tolist(), g.dst.tolist(), g.weight.tolist()):
        children[s].append((d, w))
    s_in = g.in_strength.tolist()
    s_out = g.out_strength.tolist()
    pairs = [[] for _ in range(g.n_nodes)]
    count = 0

    def visit(v, frac):
        nonlocal count
        count += 1
        if count > limit:
            raise FragmentExplosionError(f"more than {limit} fragments")
        kids = [(u, visit(u, frac * w / s_in[u])) for u, w in children[v]]
        own = frac * s_out[v] + sum(vol for _, vol in kids)
        for u, vol in kids:
            pairs[u].append((vol, own))
        return own

    visit(g.root, 1.0)
    return pairs


def _fragment_sum(pairs, W) -> float:
    total = 0.0
    for vol, parent in pairs:
        if vol > 0:
            total -= vol / W * math.log2(vol / parent)
    return total


def fragment_oracle_kqi(g: CitationGraph, node_id, limit: int = 10**6) -> float:
    """KQI of one node by explicit fragment enumeration (exponential; tests only)."""
    v = g.index[node_id]
    if v == g.root:
        return 0.0
    pairs = _unfold(g, limit)
    return _fragment_sum(pairs[v], g.total_weight)


def fragment_oracle_table(g: CitationGraph, limit: int = 10**6) -> dict:
    """Like :func:`fragment_oracle_kqi` for every real node, unfolding once."""
    pairs = _unfold(g, limit)
    W = g.total_weight
    return {g.ids[i]: _fragment_sum(pairs[i], W) for i in g.real_nodes().tolist()}


# -- aggregation -------------------------------------------------------------


@dataclass(frozen=True)
class GroupAggregate:
    kind: str
    scores: Mapping[str, tuple]  # key -> (kqi_sum, paper_count)
    skipped: int

    def ranked(self) -> list:
        """``(key, kqi_sum, paper_count)`` by sum descending, key ascending."""
        return sorted(
            ((k, s, c) for k, (s, c) in self.scores.items()), key=lambda r: (-r[1], r[0])
        )

    def to_csv(self, top: int | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "kqi_sum", "paper_count"])
        rows = self.ranked()
        for key, s, c in rows if top is None else rows[:top]:
            w.writerow([key, repr(s), c])
        return buf.getvalue()


def aggregate_kqi(
    g: CitationGraph, kt: KqiTable, kind: str, first_author: bool = False
) -> GroupAggregate:
    """Sum paper KQI per group key.

    A paper with several keys adds its full KQI to each of them, unless
    ``first_author`` is set, in which case only its first key counts.
    Papers without keys are counted in ``skipped``.
    """
    if kind not in GROUP_KINDS:
        raise UnknownGroupKindError(f"unknown group kind {kind!r}; expected one of {GROUP_KINDS}")
    if kind not in g.groups:
        raise UnknownGroupKindError(f"graph carries no {kind!r} metadata")
    if kt.ids != g.ids:
        raise MismatchedTableError("KQI table was computed from a different graph")
    sums: dict = {}
    counts: dict = {}
    skipped = 0
    per_node = g.groups[kind]
    for i in g.real_nodes().tolist():
        keys = per_node[i]
        if not keys:
            skipped += 1
            continue
        if first_author:
            keys = keys[:1]
        for key in dict.fromkeys(keys):
            sums.setdefault(key, []).append(float(kt.kqi[i]))
            counts[key] = counts.get(key, 0) + 1
    scores = {k: (math.fsum(v), counts[k]) for k, v in sums.items()}
    return GroupAggregate(kind, scores, skipped)
