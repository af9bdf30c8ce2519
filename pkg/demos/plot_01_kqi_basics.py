"""
Scoring papers on a small citation graph
========================================

Build two toy graphs, attach the super root, and compare the fast volume
pass with the brute-force fragment enumeration.
"""

from kqi import (
    augment_super_root,
    compute_volumes,
    fragment_oracle_table,
    from_edge_list,
    kqi_all,
)

# Edges run from the cited paper to the citing one: knowledge flows forward.
chain = augment_super_root(from_edge_list([("A", "B"), ("B", "C")]))
diamond = augment_super_root(from_edge_list([("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")]))

for name, g in [("chain", chain), ("diamond", diamond)]:
    vt = compute_volumes(g)
    kt = kqi_all(g, vt)
    oracle = fragment_oracle_table(g)
    print(f"{name}: W = {vt.total_weight:g}, total KQI = {kt.total:.6f}")
    for node, score, volume, s_in, s_out in kt.rows():
        print(f"  {node}: kqi={score:.6f} oracle={oracle[node]:.6f} volume={volume:g}")

# Leaves hold no descendants, so they always score zero.
print(kqi_all(diamond).ranked())
