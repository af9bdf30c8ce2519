"""
Authors, Pareto shares and classic metrics
==========================================

Aggregate paper scores by author, measure how concentrated knowledge is,
and compare KQI with PageRank and citation counts.
"""

import numpy as np

from kqi import (
    ArrivalSchedule,
    BaConfig,
    aggregate_kqi,
    augment_super_root,
    citation_counts,
    generate_ba,
    kqi_all,
    pagerank,
    pareto_split,
    rank_correlation,
)
from kqi.analysis import group_h_index

g = generate_ba(BaConfig(m=3, schedule=ArrivalSchedule.constant(500), seed=4, steps=8))

# Give each paper one or two of 300 synthetic authors.
rng = np.random.default_rng(1)
authors = [tuple(f"au{k}" for k in rng.choice(300, rng.integers(1, 3), replace=False)) for _ in g.ids]
g = g.replace(groups={"author": authors})
g = augment_super_root(g)
kt = kqi_all(g)

agg = aggregate_kqi(g, kt, "author")
print(agg.to_csv(top=5))
first = aggregate_kqi(g, kt, "author", first_author=True)
print("first-author credit, top 3:", first.ranked()[:3])

report = pareto_split(kt)
print(f"top {report.crossing:.1%} of papers hold {report.share_at_crossing:.1%} of the KQI")

scores = kt.as_dict()
print("Spearman vs PageRank:", round(rank_correlation(scores, pagerank(g)), 3))
print("Spearman vs citations:", round(rank_correlation(scores, citation_counts(g)), 3))
sums = {k: s for k, (s, _) in agg.scores.items()}
print("author KQI vs h-index:", round(rank_correlation(sums, group_h_index(g, "author")), 3))
