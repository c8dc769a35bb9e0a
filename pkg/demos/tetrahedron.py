# %% [markdown]
# # A tetrahedron in the galaxy
#
# The starlet with hub labels 6 and 10 and an infinite edge between the
# spokes generates a group with four distinct Coxeter generating sets.
# Here we find all four by moves, look at the vertical core, and write DOT
# files that can be rendered with `dot -Tsvg`.

# %%
from pathlib import Path

from coxgalaxy import decide_isomorphic, explore, spine, starlet, vertical_core
from coxgalaxy.galaxy import system_to_dot

seed = starlet([1, 2])
print(seed)
print(system_to_dot(seed))

# %% [markdown]
# Both spokes are pseudo-transpositions, so there are two blow-ups from
# rank 3, and each result still has the other one available.

# %%
frag = explore(seed)
for fv in sorted(frag.vertices.values(), key=lambda fv: fv.layer):
    labels = [x for x in fv.representative.label_multiset() if x != 2]
    print(fv.layer, ["∞" if x == 0 else x for x in labels])
print("edges:", frag.edge_count(), "cliques:", frag.clique_counts())

# %% [markdown]
# The bottom and top vertices are joined by an edge of height 2.  The
# vertical core drops it, and a spine keeps one tree.

# %%
core = vertical_core(frag)
tree = spine(core)
print("core edges:", core.edge_count(), "spine edges:", len(tree))
for u, v, rec in tree.edges:
    print(f"  {u.rank} -> {v.rank} by {rec.kind}")

# %%
res = decide_isomorphic(seed, frag.vertices[max(frag.vertices, key=lambda v: v.rank)].representative)
print(type(res).__name__, [r.kind for r in res.path])

# %%
out = Path("tetrahedron.dot")
out.write_text(frag.to_dot(draw_graphs=True))
Path("tetrahedron_core.dot").write_text(core.to_dot(edges=tree.edges))
print("wrote", out)
