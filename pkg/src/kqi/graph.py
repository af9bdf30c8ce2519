"""Citation DAG container, file I/O, super-root augmentation, decay and snapshots.

Edges are stored in knowledge direction: ``src -> dst`` means ``dst`` cites
``src``. The on-disk edge format keeps the usual ``citing<TAB>cited`` order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import (
    AlreadyAugmentedError,
    CycleError,
    DuplicateEdgeError,
    GraphError,
    MalformedLineError,
    MissingYearError,
)

ROOT_ID = "__ROOT__"
GROUP_KINDS = ("author", "affiliation", "country", "discipline")


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CitationGraph:
    """Immutable weighted DAG of papers.

    Nodes are addressed by position ``0..n-1``; ``ids[i]`` is the external
    identifier. ``years`` holds NaN where a publication year is unknown and
    ``groups`` maps a group kind to one tuple of keys per node.

    Build instances with :meth:`from_arrays` (which validates) rather than
    calling the constructor directly.
    """

    ids: tuple
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    years: np.ndarray
    groups: Mapping[str, tuple] = field(default_factory=dict)
    root: int | None = None
    root_in_weight: bool = True

    @classmethod
    def from_arrays(
        cls,
        ids: Sequence[str],
        src,
        dst,
        weight=None,
        years=None,
        groups: Mapping[str, Sequence[Sequence[str]]] | None = None,
        root: int | None = None,
        root_in_weight: bool = True,
        validate: bool = True,
    ) -> "CitationGraph":
        ids = tuple(ids)
        n = len(ids)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        weight = np.ones(len(src)) if weight is None else np.asarray(weight, dtype=np.float64)
        if weight.shape != src.shape:
            raise ValueError("weight must match the edge count")
        if len(src) and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(~np.isfinite(weight)) or np.any(weight < 0):
            raise ValueError("edge weights must be finite and nonnegative")
        years = np.full(n, np.nan) if years is None else np.asarray(years, dtype=np.float64)
        if years.shape != (n,):
            raise ValueError("years must have one entry per node")
        groups = {k: tuple(tuple(keys) for keys in v) for k, v in (groups or {}).items()}
        for kind, per_node in groups.items():
            if kind not in GROUP_KINDS:
                raise ValueError(f"unknown group kind {kind!r}")
            if len(per_node) != n:
                raise ValueError(f"group kind {kind!r} needs one entry per node")

        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        if validate:
            _check_edges(ids, src, dst)
        g = cls(
            ids=ids,
            src=_frozen(src, np.int64),
            dst=_frozen(dst, np.int64),
            weight=_frozen(weight, np.float64),
            years=_frozen(years, np.float64),
            groups=groups,
            root=root,
            root_in_weight=root_in_weight,
        )
        if validate:
            g.topological_order  # raises CycleError
        return g

    # -- sizes and lookups -------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @property
    def is_augmented(self) -> bool:
        return self.root is not None

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.ids)}

    def __contains__(self, node_id) -> bool:
        return node_id in self.index

    def __len__(self) -> int:
        return self.n_nodes

    @cached_property
    def indptr(self) -> np.ndarray:
        """CSR row pointer over ``src``; out-neighbours of ``v`` are
        ``dst[indptr[v]:indptr[v+1]]``."""
        counts = np.bincount(self.src, minlength=self.n_nodes)
        ptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return _frozen(ptr, np.int64)

    @cached_property
    def _in_csr(self):
        order = np.lexsort((self.src, self.dst))
        counts = np.bincount(self.dst, minlength=self.n_nodes)
        ptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return ptr, order

    @cached_property
    def in_strength(self) -> np.ndarray:
        return _frozen(np.bincount(self.dst, self.weight, minlength=self.n_nodes), np.float64)

    @cached_property
    def out_strength(self) -> np.ndarray:
        return _frozen(np.bincount(self.src, self.weight, minlength=self.n_nodes), np.float64)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return _frozen(np.bincount(self.dst, minlength=self.n_nodes), np.int64)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return _frozen(np.bincount(self.src, minlength=self.n_nodes), np.int64)

    @cached_property
    def root_edge_mask(self) -> np.ndarray:
        if self.root is None:
            return _frozen(np.zeros(self.n_edges, dtype=bool), bool)
        return _frozen(self.src == self.root, bool)

    @cached_property
    def total_weight(self) -> float:
        """Sum of edge weights W, correctly rounded (``math.fsum``)."""
        w = self.weight
        if not self.root_in_weight:
            w = w[~self.root_edge_mask]
        if np.all(w == 1.0):
            return float(len(w))
        return math.fsum(w.tolist())

    @cached_property
    def topological_order(self) -> np.ndarray:
        order = _kernels.topological_order(self.n_nodes, self.indptr, self.dst)
        if len(order) != self.n_nodes:
            raise CycleError(self._find_cycle(order))
        return _frozen(order, np.int64)

    def _find_cycle(self, partial_order) -> list:
        remaining = np.ones(self.n_nodes, dtype=bool)
        remaining[partial_order] = False
        in_ptr, in_order = self._in_csr
        # every remaining node has a remaining predecessor: walk back until a repeat
        v = int(np.flatnonzero(remaining)[0])
        seen = {}
        path = []
        while v not in seen:
            seen[v] = len(path)
            path.append(v)
            preds = self.src[in_order[in_ptr[v]:in_ptr[v + 1]]]
            v = int(preds[remaining[preds]][0])
        cycle = path[seen[v]:][::-1]
        return [self.ids[i] for i in cycle]

    def successors(self, node_id) -> list:
        """Papers citing ``node_id`` (knowledge flows to them)."""
        v = self.index[node_id]
        return [self.ids[u] for u in self.dst[self.indptr[v]:self.indptr[v + 1]]]

    def predecessors(self, node_id) -> list:
        """Papers cited by ``node_id``, including the super root if present."""
        v = self.index[node_id]
        return [self.ids[u] for u in self.predecessor_indices(v)]

    def predecessor_indices(self, v: int) -> np.ndarray:
        in_ptr, in_order = self._in_csr
        return self.src[in_order[in_ptr[v]:in_ptr[v + 1]]]

    def edges(self) -> Iterator[tuple]:
        """Yield ``(src_id, dst_id, weight)`` in knowledge direction."""
        ids = self.ids
        for s, d, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield ids[s], ids[d], w

    def year_of(self, node_id):
        y = self.years[self.index[node_id]]
        return None if math.isnan(y) else int(y)

    def real_nodes(self) -> np.ndarray:
        """Indices of every node except the super root."""
        mask = np.ones(self.n_nodes, dtype=bool)
        if self.root is not None:
            mask[self.root] = False
        return np.flatnonzero(mask)

    def replace(self, **changes) -> "CitationGraph":
        kw = dict(
            ids=self.ids, src=self.src, dst=self.dst, weight=self.weight,
            years=self.years, groups=self.groups, root=self.root,
            root_in_weight=self.root_in_weight,
        )
        kw.update(changes)
        return CitationGraph.from_arrays(validate=False, **kw)


def _check_edges(ids, src, dst):
    loops = np.flatnonzero(src == dst)
    if len(loops):
        raise CycleError([ids[src[loops[0]]]])
    if len(src) > 1:
        # edges are sorted by (src, dst), so duplicates are adjacent
        dup = np.flatnonzero((src[1:] == src[:-1]) & (dst[1:] == dst[:-1]))
        if len(dup):
            k = dup[0]
            raise DuplicateEdgeError(ids[dst[k]], ids[src[k]])


# -- file formats ------------------------------------------------------------


def _data_lines(path) -> Iterator[tuple]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line.split("\t")


def load_graph(edge_file, node_file=None) -> CitationGraph:
    """Read an edge file (``citing<TAB>cited[<TAB>weight]``) and optional node file.

    Node-file lines are ``id<TAB>year<TAB>kind=key;key...`` with the kind
    column repeatable; the year may be left empty. Ids that only appear in
    the edge file get no year.
    """
    ids: list = []
    index: dict = {}
    years: dict = {}
    groups: dict = {}

    def intern(v):
        i = index.get(v)
        if i is None:
            i = index[v] = len(ids)
            ids.append(v)
        return i

    if node_file is not None:
        for lineno, parts in _data_lines(node_file):
            if len(parts) < 2 or not parts[0]:
                raise MalformedLineError(node_file, lineno, "expected id<TAB>year[<TAB>kind=keys...]")
            node = parts[0]
            if node in index:
                raise MalformedLineError(node_file, lineno, f"node {node!r} listed twice")
            i = intern(node)
            year = parts[1].strip()
            if year:
                try:
                    years[i] = int(year)
                except ValueError:
                    raise MalformedLineError(node_file, lineno, f"bad year {year!r}") from None
            for col in parts[2:]:
                if not col:
                    continue
                kind, sep, keys = col.partition("=")
                kind = kind.strip()
                if not sep or kind not in GROUP_KINDS:
                    raise MalformedLineError(node_file, lineno, f"bad group column {col!r}")
                groups.setdefault(kind, {}).setdefault(i, []).extend(
                    k for k in (s.strip() for s in keys.split(";")) if k
                )

    src, dst, weight = [], [], []
    for lineno, parts in _data_lines(edge_file):
        if len(parts) not in (2, 3) or not parts[0] or not parts[1]:
            raise MalformedLineError(edge_file, lineno, "expected citing<TAB>cited[<TAB>weight]")
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise MalformedLineError(edge_file, lineno, f"bad weight {parts[2]!r}") from None
            if not math.isfinite(w) or w < 0:
                raise MalformedLineError(edge_file, lineno, f"bad weight {parts[2]!r}")
        citing, cited = intern(parts[0]), intern(parts[1])
        src.append(cited)
        dst.append(citing)
        weight.append(w)

    n = len(ids)
    year_arr = np.full(n, np.nan)
    for i, y in years.items():
        year_arr[i] = y
    group_lists = {
        kind: [tuple(per.get(i, ())) for i in range(n)] for kind, per in groups.items()
    }
    return CitationGraph.from_arrays(ids, src, dst, weight, year_arr, group_lists)


def write_graph(g: CitationGraph, edge_file, node_file=None) -> None:
    """Write ``g`` in the loader's formats. The super root is never written."""
    keep = ~g.root_edge_mask
    weights = g.weight[keep]
    with_weight = bool(np.any(weights != 1.0))
    with open(edge_file, "w", encoding="utf-8") as fh:
        for s, d, w in zip(g.src[keep].tolist(), g.dst[keep].tolist(), weights.tolist()):
            line = f"{g.ids[d]}\t{g.ids[s]}"
            fh.write(f"{line}\t{w!r}\n" if with_weight else line + "\n")
    if node_file is None:
        return
    kinds = [k for k in GROUP_KINDS if k in g.groups]
    with open(node_file, "w", encoding="utf-8") as fh:
        for i in g.real_nodes().tolist():
            y = g.years[i]
            cols = [g.ids[i], "" if math.isnan(y) else str(int(y))]
            for kind in kinds:
                keys = g.groups[kind][i]
                if keys:
                    cols.append(f"{kind}=" + ";".join(keys))
            fh.write("\t".join(cols) + "\n")


# -- transformations ---------------------------------------------------------


def augment_super_root(g: CitationGraph, root_in_weight: bool = True) -> CitationGraph:
    """Add the super root with a unit edge to every node lacking an in-edge.

    ``root_in_weight=False`` keeps the root edges out of W (sensitivity checks
    only; degrees and strengths always include them).
    """
    if g.is_augmented:
        raise AlreadyAugmentedError("graph already has a super root")
    if ROOT_ID in g.index:
        raise GraphError(f"node id {ROOT_ID!r} is reserved")
    n = g.n_nodes
    sources = np.flatnonzero(g.in_degree == 0)
    ids = g.ids + (ROOT_ID,)
    src = np.concatenate([g.src, np.full(len(sources), n, dtype=np.int64)])
    dst = np.concatenate([g.dst, sources])
    weight = np.concatenate([g.weight, np.ones(len(sources))])
    years = np.append(g.years, np.nan)
    groups = {k: v + ((),) for k, v in g.groups.items()}
    return CitationGraph.from_arrays(
        ids, src, dst, weight, years, groups, root=n, root_in_weight=root_in_weight, validate=False
    )


@dataclass(frozen=True)
class DecaySpec:
    """Exponential citation ageing: weight ``exp(-rate * (reference_time - t0))``."""

    rate: float
    reference_time: int

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError("decay rate must be nonnegative")


@dataclass(frozen=True)
class SnapshotSpec:
    cutoff_year: int


def require_years(g: CitationGraph, nodes=None):
    idx = g.real_nodes() if nodes is None else nodes
    missing = idx[np.isnan(g.years[idx])]
    if len(missing):
        raise MissingYearError(g.ids[missing[0]])


def apply_decay(g: CitationGraph, spec: DecaySpec) -> CitationGraph:
    """Reweight every citation by the age of the citing paper.

    ``t0`` is the year of the citing node (the edge's ``dst``). Super-root
    edges keep weight 1.
    """
    require_years(g)
    real = g.real_nodes()
    if len(real) and spec.reference_time < np.max(g.years[real]):
        raise ValueError("reference_time precedes the newest paper")
    if spec.rate == 0:
        weight = np.ones(g.n_edges)
    else:
        age = spec.reference_time - g.years[g.dst]
        weight = np.exp(-spec.rate * age)
        weight[g.root_edge_mask] = 1.0
    return g.replace(weight=weight)


def snapshot_at(g: CitationGraph, spec: SnapshotSpec) -> CitationGraph:
    """Induced subgraph on papers published no later than ``spec.cutoff_year``."""
    if g.is_augmented:
        raise AlreadyAugmentedError("take snapshots before augmenting")
    require_years(g)
    keep = g.years <= spec.cutoff_year
    return induced_subgraph(g, keep)


def induced_subgraph(g: CitationGraph, keep) -> CitationGraph:
    keep = np.asarray(keep, dtype=bool)
    new_index = np.cumsum(keep) - 1
    emask = keep[g.src] & keep[g.dst]
    kept = np.flatnonzero(keep)
    ids = tuple(g.ids[i] for i in kept.tolist())
    groups = {k: [v[i] for i in kept.tolist()] for k, v in g.groups.items()}
    return CitationGraph.from_arrays(
        ids,
        new_index[g.src[emask]],
        new_index[g.dst[emask]],
        g.weight[emask],
        g.years[kept],
        groups,
        validate=False,
    )


def from_edge_list(
    edges: Iterable[tuple], nodes: Iterable[str] = (), years: Mapping[str, int] | None = None,
    groups: Mapping[str, Mapping[str, Sequence[str]]] | None = None,
) -> CitationGraph:
    """Build a graph from ``(src, dst[, weight])`` tuples in knowledge direction."""
    ids: list = list(dict.fromkeys(nodes))
    index = {v: i for i, v in enumerate(ids)}
    src, dst, weight = [], [], []
    for e in edges:
        s, d = e[0], e[1]
        for v in (s, d):
            if v not in index:
                index[v] = len(ids)
                ids.append(v)
        src.append(index[s])
        dst.append(index[d])
        weight.append(float(e[2]) if len(e) > 2 else 1.0)
    year_arr = np.full(len(ids), np.nan)
    for v, y in (years or {}).items():
        year_arr[index[v]] = y
    group_lists = {
        kind: [tuple(per.get(v, ())) for v in ids] for kind, per in (groups or {}).items()
    }
    return CitationGraph.from_arrays(ids, src, dst, weight, year_arr, group_lists)

