"""
Extracting a knowledge vein
===========================

Keep only the highest-scoring papers and link each one to its nearest kept
ancestors, then write the result as Graphviz text.
"""

from kqi import (
    ArrivalSchedule,
    BaConfig,
    VeinConfig,
    augment_super_root,
    export_dot,
    extract_vein,
    generate_ba,
    kqi_all,
)

g = augment_super_root(generate_ba(BaConfig(m=2, schedule=ArrivalSchedule.constant(100), seed=3, steps=5)))
kt = kqi_all(g)

vein = extract_vein(g, kt, VeinConfig(top_fraction=0.05, max_depth=10))
print(f"{len(vein.nodes)} papers, {len(vein.edges)} links, {vein.covered_kqi_share:.1%} of KQI")

# Stop at the first ancestor found instead of finishing the level.
sparse = extract_vein(g, kt, VeinConfig(top_fraction=0.05, complete_level=False))
print("first-hit links:", len(sparse.edges))

labels = {v: f"{v}\\nKQI={kt[v]:.3f}" for v in vein.nodes}
print(export_dot(vein, labels))
