import re
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kqi import (
    EmptySelectionError,
    VeinConfig,
    augment_super_root,
    export_dot,
    extract_vein,
    from_edge_list,
    kqi_all,
)
from kqi.vein import VeinGraph, resolve_selection

from conftest import dags, random_dag

DOT_NODE = re.compile(r'^  "(?:[^"\\]|\\.)*"( \[label="(?:[^"\\]|\\.)*"\])?;$')
DOT_EDGE = re.compile(r'^  "(?:[^"\\]|\\.)*" -> "(?:[^"\\]|\\.)*";$')


def interior_free_distances(g, selected):
    """Forward search from each selected paper through unselected papers only.

    Returns {(u, v): hops} for every selected pair joined by a path whose
    interior avoids the selection, with the fewest hops among such paths.
    """
    dist = {}
    for u in selected:
        seen = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in g.successors(x):
                if y in seen:
                    continue
                seen[y] = seen[x] + 1
                if y in selected:
                    dist[(u, y)] = seen[y]
                else:
                    queue.append(y)
    return dist


def _prepared(g):
    a = augment_super_root(g)
    return a, kqi_all(a)


def test_chain_skips_unselected_interior():
    g, kt = _prepared(from_edge_list([("A", "B"), ("B", "C")]))
    v = extract_vein(g, kt, VeinConfig(ids=["A", "C"], max_depth=2))
    assert v.edges == (("A", "C"),)


def test_depth_bound_cuts_long_gaps():
    g, kt = _prepared(from_edge_list([("A", "B"), ("B", "C"), ("C", "D")]))
    v = extract_vein(g, kt, VeinConfig(ids=["A", "D"], max_depth=1))
    assert v.edges == ()
    v = extract_vein(g, kt, VeinConfig(ids=["A", "D"], max_depth=3))
    assert v.edges == (("A", "D"),)


def test_full_selection_reproduces_edges(diamond):
    kt = kqi_all(diamond)
    v = extract_vein(diamond, kt, VeinConfig(top_fraction=1.0))
    assert set(v.edges) == {("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")}
    assert v.covered_kqi_share == pytest.approx(1.0)


def test_first_hit_mode_links_one_ancestor(diamond):
    kt = kqi_all(diamond)
    v = extract_vein(diamond, kt, VeinConfig(top_fraction=1.0, complete_level=False))
    # ascending id order visits B before C
    assert ("B", "D") in v.edges and ("C", "D") not in v.edges


def test_selection_rules(diamond):
    kt = kqi_all(diamond)
    assert resolve_selection(diamond, kt, VeinConfig(top_fraction=0.5)) == ["B", "C"]
    assert resolve_selection(diamond, kt, VeinConfig(ids=["__ROOT__", "A", "A"])) == ["A"]
    with pytest.raises(EmptySelectionError):
        resolve_selection(diamond, kt, VeinConfig(ids=["__ROOT__"]))
    with pytest.raises(EmptySelectionError):
        extract_vein(diamond, kt, VeinConfig(ids=[]))
    with pytest.raises(KeyError):
        resolve_selection(diamond, kt, VeinConfig(ids=["nope"]))
    with pytest.raises(ValueError):
        VeinConfig(top_fraction=0.5, ids=["A"])
    with pytest.raises(ValueError):
        VeinConfig(top_fraction=1.5)
    with pytest.raises(ValueError):
        VeinConfig(ids=["A"], max_depth=0)


def test_root_never_appears(diamond):
    v = extract_vein(diamond, kqi_all(diamond), VeinConfig(top_fraction=1.0))
    assert "__ROOT__" not in v.nodes
    assert all("__ROOT__" not in e for e in v.edges)


@settings(max_examples=150, deadline=None)
@given(dags(max_nodes=25, min_nodes=2), st.data(), st.integers(1, 6), st.booleans())
def test_vein_edges_match_nearest_level_oracle(g, data, max_depth, complete):
    a, kt = _prepared(g)
    chosen = data.draw(st.lists(st.sampled_from(g.ids), min_size=1, unique=True))
    vein = extract_vein(a, kt, VeinConfig(ids=chosen, max_depth=max_depth, complete_level=complete))
    sel = set(chosen)
    dist = interior_free_distances(a, sel)
    assert set(vein.nodes) == sel
    # soundness
    for e in vein.edges:
        assert e in dist
    for v in sel:
        near = {u: d for (u, w), d in dist.items() if w == v and d <= max_depth}
        got = {u for u, w in vein.edges if w == v}
        if not near:
            assert got == set()
            continue
        best = min(near.values())
        nearest = {u for u, d in near.items() if d == best}
        # bounded completeness
        assert got
        if complete:
            assert got == nearest
        else:
            assert len(got) == 1 and got <= nearest


@settings(max_examples=60, deadline=None)
@given(dags(max_nodes=20, min_nodes=2), st.data())
def test_coverage_monotone(g, data):
    a, kt = _prepared(g)
    small = data.draw(st.lists(st.sampled_from(g.ids), min_size=1, unique=True))
    extra = data.draw(st.lists(st.sampled_from(g.ids), unique=True))
    v1 = extract_vein(a, kt, VeinConfig(ids=small))
    v2 = extract_vein(a, kt, VeinConfig(ids=small + extra))
    assert v2.covered_kqi_share >= v1.covered_kqi_share - 1e-12
    assert 0 <= v1.covered_kqi_share <= 1


def test_vein_is_acyclic_and_deterministic():
    rng = np.random.default_rng(11)
    g, kt = _prepared(random_dag(rng, 40, 0.15))
    cfg = VeinConfig(top_fraction=0.3)
    v1, v2 = extract_vein(g, kt, cfg), extract_vein(g, kt, cfg)
    assert export_dot(v1) == export_dot(v2)
    h = from_edge_list(list(v1.edges), nodes=v1.nodes)  # raises on a cycle
    assert set(h.ids) == set(v1.nodes)


def test_dot_empty_and_single_edge():
    empty = export_dot(VeinGraph((), (), 0.0))
    assert empty == 'digraph "vein" {\n}\n'
    text = export_dot(VeinGraph(("A", "C"), (("A", "C"),), 0.5))
    assert text.count("->") == 1 and '  "A" -> "C";' in text.splitlines()


def test_dot_labels_and_quoting():
    v = VeinGraph(('a"b', "c\\d"), (('a"b', "c\\d"),), 1.0)
    text = export_dot(v, labels={'a"b': "first", "c\\d": "second"})
    lines = text.splitlines()
    assert lines[0] == 'digraph "vein" {' and lines[-1] == "}"
    body = lines[1:-1]
    nodes = [l for l in body if "->" not in l]
    assert len(nodes) == 2 and all("[label=" in l for l in nodes)
    for line in body:
        assert DOT_NODE.match(line) or DOT_EDGE.match(line), line


@settings(max_examples=40, deadline=None)
@given(dags(max_nodes=20, min_nodes=2), st.floats(0.05, 1.0))
def test_dot_is_well_formed(g, frac):
    a, kt = _prepared(g)
    v = extract_vein(a, kt, VeinConfig(top_fraction=frac))
    lines = export_dot(v, labels={n: f"{n}\\nKQI={kt[n]:.3g}" for n in v.nodes}).splitlines()
    assert lines[0].startswith("digraph ") and lines[-1] == "}"
    assert all(DOT_NODE.match(l) or DOT_EDGE.match(l) for l in lines[1:-1])
    assert sum("->" in l for l in lines) == len(v.edges)
