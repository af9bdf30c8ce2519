"""Knowledge veins: a compressed ancestry graph over a chosen set of papers."""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .engine import KqiTable
from .errors import EmptySelectionError
from .graph import CitationGraph

DEFAULT_MAX_DEPTH = 10


@dataclass(frozen=True)
class VeinConfig:
    """Which papers to keep and how far back to look for their ancestors.

    Give exactly one of ``top_fraction`` (share of real papers, by KQI) or
    ``ids``. With ``complete_level`` (the default) a search that reaches a
    selected ancestor still drains the current depth, so every selected
    ancestor at the nearest depth is linked; without it the search stops at
    the first selected ancestor found.
    """

    top_fraction: float | None = None
    ids: Sequence[str] | None = None
    max_depth: int = DEFAULT_MAX_DEPTH
    complete_level: bool = True

    def __post_init__(self):
        if (self.top_fraction is None) == (self.ids is None):
            raise ValueError("give exactly one of top_fraction or ids")
        if self.top_fraction is not None and not 0 < self.top_fraction <= 1:
            raise ValueError("top_fraction must lie in (0, 1]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer")


@dataclass(frozen=True)
class VeinGraph:
    nodes: tuple
    edges: tuple  # (ancestor, descendant) pairs, sorted
    covered_kqi_share: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ancestor", "descendant"])
        w.writerows(self.edges)
        return buf.getvalue()


def resolve_selection(g: CitationGraph, kt: KqiTable, cfg: VeinConfig) -> list:
    """Selected node ids: top ``ceil(f * n)`` by KQI (ties by id) or the explicit list."""
    if cfg.ids is not None:
        unknown = [v for v in cfg.ids if v not in g.index]
        if unknown:
            raise KeyError(f"unknown node ids: {unknown[:5]}")
        root_id = None if g.root is None else g.ids[g.root]
        chosen = [v for v in dict.fromkeys(cfg.ids) if v != root_id]
    else:
        ranked = kt.ranked()
        chosen = ranked[: math.ceil(cfg.top_fraction * len(ranked))]
    if not chosen:
        raise EmptySelectionError("no papers selected")
    return chosen


def _search(g: CitationGraph, v: int, selected, max_depth: int, complete_level: bool) -> list:
    """Selected ancestors linked to ``v``: repeated breadth-first searches with
    a growing depth cap, stopping once one of them yields an ancestor."""
    preds = sorted(g.predecessor_indices(v).tolist(), key=g.ids.__getitem__)
    for cap in range(1, max_depth + 1):
        found = []
        openlist = deque((p, 1) for p in preds)
        access = set(preds)
        truncated = False
        while openlist:
            u, depth = openlist.popleft()
            if u in selected:
                found.append(u)
                if not complete_level:
                    return found
                continue
            if depth < cap:
                for s in sorted(g.predecessor_indices(u).tolist(), key=g.ids.__getitem__):
                    if s not in access:
                        openlist.append((s, depth + 1))
                        access.add(s)
            elif len(g.predecessor_indices(u)):
                truncated = True
        if found:
            return found
        if not truncated:
            # a deeper cap would explore nothing new
            return []
    return []


def extract_vein(g: CitationGraph, kt: KqiTable, cfg: VeinConfig) -> VeinGraph:
    """Link every selected paper to its nearest selected ancestors.

    An edge ``(u, v)`` means some citation path from ``u`` down to ``v``
    passes through no other selected paper. The super root is never
    selected and never appears.
    """
    chosen = resolve_selection(g, kt, cfg)
    selected = {g.index[v] for v in chosen}
    edges = set()
    for v in sorted(selected, key=g.ids.__getitem__):
        for u in _search(g, v, selected, cfg.max_depth, cfg.complete_level):
            edges.add((g.ids[u], g.ids[v]))
    total = kt.total
    covered = math.fsum(float(kt.kqi[i]) for i in selected)
    share = covered / total if total > 0 else 0.0
    return VeinGraph(tuple(sorted(chosen)), tuple(sorted(edges)), min(1.0, share))


def _quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(vein: VeinGraph, labels: Mapping[str, str] | None = None, name: str = "vein") -> str:
    """Graphviz ``digraph`` text; with the default top-to-bottom rank
    direction, ancestors are drawn above descendants."""
    lines = [f"digraph {_quote(name)} {{"]
    for v in vein.nodes:
        if labels is not None:
            lines.append(f"  {_quote(v)} [label={_quote(labels.get(v, v))}];")
        else:
            lines.append(f"  {_quote(v)};")
    for u, v in vein.edges:
        lines.append(f"  {_quote(u)} -> {_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
