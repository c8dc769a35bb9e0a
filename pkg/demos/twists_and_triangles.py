# %% [markdown]
# # Twists, and what rank 3 looks like
#
# Two short experiments.  First an elementary twist across an I2(5) that
# really changes the diagram, checked with the word-problem oracle.  Then a
# sweep of triangle groups through the rank-3 decision.

# %%
import itertools

from coxgalaxy import INF, CoxeterMatrix, apply_twist, enumerate_twists, iso_rank_le3, triangle
from coxgalaxy.moves import twist_words
from coxgalaxy.oracle import verify_generating_set

m = CoxeterMatrix.from_edges(
    4, {(0, 1): 5, (2, 0): 3, (2, 1): 2, (3, 0): 2, (3, 1): 3, (2, 3): INF}, generators=list("abcd")
)
for tw in enumerate_twists(m):
    out = apply_twist(m, tw)
    rep = verify_generating_set(m, twist_words(m, tw), out)
    print(tw.describe(m), "->", out.labels(), "verified" if rep.ok else "FAILED")

# %% [markdown]
# The twisted system swaps which end of the I2(5) edge meets `c` and `d`.
# It is a genuinely different graph for the same group.
#
# Next: group all 120 triangle systems with labels up to 8 into
# isomorphism classes.  Different label multisets never give the same
# triangle group, so every class should be a singleton.

# %%
labels = (2, 3, 4, 5, 6, 7, 8, INF)
systems = [triangle(*ls) for ls in itertools.combinations_with_replacement(labels, 3)]
classes = []
for m in systems:
    for cls in classes:
        if iso_rank_le3(cls[0], m):
            cls.append(m)
            break
    else:
        classes.append([m])

for cls in classes:
    if len(cls) > 1:
        print([tuple("∞" if x == 0 else x for x in c.label_multiset()) for c in cls])
print(len(systems), "systems,", len(classes), "classes")
