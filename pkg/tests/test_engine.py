import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kqi import (
    MismatchedTableError,
    NotAugmentedError,
    UnknownGroupKindError,
    ZeroInStrengthError,
    aggregate_kqi,
    augment_super_root,
    compute_volumes,
    fragment_oracle_kqi,
    fragment_oracle_table,
    from_edge_list,
    kqi_all,
    kqi_of,
)
from kqi.errors import FragmentExplosionError
from kqi.graph import CitationGraph

from conftest import dags

# hand derivations: chain R->A->B->C has W=3 and volumes R=3, A=2, B=1, C=0;
# diamond R->A, A->{B,C}, {B,C}->D has W=5 and volumes R=5, A=4, B=C=1, D=0
CHAIN_A = (2 / 3) * math.log2(3 / 2)
DIAMOND_A = -(4 / 5) * math.log2(4 / 5)


def test_chain_golden(chain):
    vt = compute_volumes(chain)
    assert [vt[v] for v in ("__ROOT__", "A", "B", "C")] == [3.0, 2.0, 1.0, 0.0]
    kt = kqi_all(chain, vt)
    assert abs(kt["A"] - CHAIN_A) <= 1e-12
    assert abs(kt["B"] - 1 / 3) <= 1e-12
    assert kt["C"] == 0.0
    assert abs(kt.total - (CHAIN_A + 1 / 3)) <= 1e-12


def test_diamond_golden(diamond):
    vt = compute_volumes(diamond)
    assert [vt[v] for v in ("__ROOT__", "A", "B", "C", "D")] == [5.0, 4.0, 1.0, 1.0, 0.0]
    kt = kqi_all(diamond, vt)
    assert abs(kt["A"] - DIAMOND_A) <= 1e-12
    assert abs(kt["A"] - 0.257542) < 1e-6
    assert abs(kt["B"] - 0.4) <= 1e-12 and abs(kt["C"] - 0.4) <= 1e-12
    assert kt["D"] == 0.0


def test_oracle_on_fixtures(chain, diamond):
    for g in (chain, diamond):
        kt = kqi_all(g)
        for v, x in fragment_oracle_table(g).items():
            assert abs(kt[v] - x) <= 1e-12
            assert abs(fragment_oracle_kqi(g, v) - x) <= 1e-15


def test_kqi_of_matches_table(diamond):
    vt = compute_volumes(diamond)
    kt = kqi_all(diamond, vt)
    for v in diamond.ids:
        assert kqi_of(diamond, vt, v) == pytest.approx(kt[v], abs=1e-15)


def test_isolated_node_scores_zero():
    g = augment_super_root(from_edge_list([], nodes=["A"]))
    kt = kqi_all(g)
    assert kt["A"] == 0.0 and kt.total == 0.0


def test_requires_augmentation():
    with pytest.raises(NotAugmentedError):
        compute_volumes(from_edge_list([("A", "B")]))


def test_zero_in_strength_rejected():
    g = augment_super_root(from_edge_list([("A", "B", 0.0)]))
    with pytest.raises(ZeroInStrengthError):
        compute_volumes(g)


def test_mismatched_table_rejected(chain, diamond):
    with pytest.raises(MismatchedTableError):
        kqi_all(diamond, compute_volumes(chain))


def test_fragment_limit():
    # a ladder of diamonds doubles the number of paths per rung
    edges = []
    for i in range(14):
        edges += [(f"h{i}", f"a{i}"), (f"h{i}", f"b{i}"), (f"a{i}", f"h{i+1}"), (f"b{i}", f"h{i+1}")]
    g = augment_super_root(from_edge_list(edges))
    with pytest.raises(FragmentExplosionError):
        fragment_oracle_table(g, limit=10_000)


def test_outputs_parse(diamond):
    kt = kqi_all(diamond)
    rows = list(csv.DictReader(io.StringIO(kt.to_csv())))
    assert [r["id"] for r in rows] == ["A", "B", "C", "D"]
    assert float(rows[1]["kqi"]) == kt["B"]
    doc = json.loads(kt.to_json())
    assert doc["total"] == kt.total and len(doc["nodes"]) == 4
    assert kt.ranked() == ["B", "C", "A", "D"]


def _weighted(g, seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.05, 2.0, g.n_edges)
    return g.replace(weight=np.where(g.root_edge_mask, 1.0, w))


@settings(max_examples=150, deadline=None)
@given(dags(max_nodes=9), st.integers(0, 2**31))
def test_weighted_graphs_match_fragment_oracle(g, seed):
    a = _weighted(augment_super_root(g), seed)
    kt = kqi_all(a)
    for v, x in fragment_oracle_table(a).items():
        assert abs(kt[v] - x) <= 1e-9


@settings(max_examples=150, deadline=None)
@given(dags(max_nodes=12), st.integers(0, 2**31))
def test_volume_and_kqi_invariants(g, seed):
    a = _weighted(augment_super_root(g), seed)
    vt = compute_volumes(a)
    kt = kqi_all(a, vt)
    s_out = a.out_strength
    assert np.all(vt.volume >= s_out - 1e-12)
    assert np.all(vt.volume[s_out == 0] == 0)
    assert np.all(kt.kqi >= 0)
    assert kt.total == pytest.approx(float(kt.kqi[kt.real_nodes()].sum()), rel=1e-9, abs=1e-15)
    # the root's volume is its out-degree plus the full volume of every source
    root = a.root
    sources = a.successors("__ROOT__")
    expected = s_out[root] + math.fsum(vt[s] for s in sources)
    assert vt.volume[root] == pytest.approx(expected, rel=1e-12)
    # unit weights: the root volume equals W
    u = augment_super_root(g)
    assert compute_volumes(u).volume[u.root] == pytest.approx(u.total_weight, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(dags(max_nodes=12), st.data())
def test_new_leaf_grows_ancestor_volumes(g, data):
    v = data.draw(st.sampled_from(g.ids))
    before = compute_volumes(augment_super_root(g))
    edges = [(s, d) for s, d, _ in g.edges()] + [(v, "new_leaf")]
    after = compute_volumes(augment_super_root(from_edge_list(edges, nodes=g.ids)))
    assert after[v] > before[v]
    ancestors, stack = set(), [v]
    while stack:
        for p in g.predecessors(stack.pop()):
            if p not in ancestors:
                ancestors.add(p)
                stack.append(p)
    for p in ancestors:
        assert after[p] >= before[p]


@settings(max_examples=50, deadline=None)
@given(dags(max_nodes=12))
def test_deterministic(g):
    a = augment_super_root(g)
    k1, k2 = kqi_all(a), kqi_all(a)
    assert k1.kqi.tobytes() == k2.kqi.tobytes()
    assert compute_volumes(a).volume.tobytes() == compute_volumes(a).volume.tobytes()


def _grouped():
    authors = {"A": ["x", "y"], "B": ["y"], "C": [], "D": ["x"]}
    g = from_edge_list([("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")], groups={"author": authors})
    return augment_super_root(g)


def test_aggregate_full_credit_and_first_author():
    g = _grouped()
    kt = kqi_all(g)
    agg = aggregate_kqi(g, kt, "author")
    assert agg.skipped == 1
    assert agg.scores["x"] == (pytest.approx(kt["A"] + kt["D"]), 2)
    assert agg.scores["y"] == (pytest.approx(kt["A"] + kt["B"]), 2)
    first = aggregate_kqi(g, kt, "author", first_author=True)
    assert first.scores["y"] == (pytest.approx(kt["B"]), 1)
    multiplicity = 2
    assert sum(s for s, _ in agg.scores.values()) <= kt.total * multiplicity + 1e-12
    rows = list(csv.reader(io.StringIO(agg.to_csv(top=1))))
    assert rows[0] == ["key", "kqi_sum", "paper_count"] and len(rows) == 2


def test_aggregate_unknown_kind():
    g = _grouped()
    kt = kqi_all(g)
    with pytest.raises(UnknownGroupKindError):
        aggregate_kqi(g, kt, "country")
    with pytest.raises(UnknownGroupKindError):
        aggregate_kqi(g, kt, "planet")


def test_single_shared_author_sums_to_total():
    g = from_edge_list([("A", "B"), ("B", "C")], groups={"author": {v: ["solo"] for v in "ABC"}})
    g = augment_super_root(g)
    kt = kqi_all(g)
    agg = aggregate_kqi(g, kt, "author")
    assert list(agg.scores) == ["solo"]
    assert agg.scores["solo"][0] == pytest.approx(kt.total, rel=1e-15)


def test_excluding_root_weight_changes_W_only():
    g = from_edge_list([("A", "B")])
    a = augment_super_root(g, root_in_weight=False)
    vt = compute_volumes(a)
    assert vt.total_weight == 1.0
    assert isinstance(a, CitationGraph) and kqi_all(a, vt)["B"] == 0.0
