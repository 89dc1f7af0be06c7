# %% [markdown]
# # Values fixed in advance
#
# Suppose every setting carries a preassigned outcome. An assignment is only
# admissible if every left/right pair it implies has nonzero probability.

# %%
import math

from hardycf.correlations import hardy_contradiction

for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
    rep = hardy_contradiction(theta)
    print(f"theta={theta:.4f}: {len(rep.admissible)} admissible assignments")
    for a in rep.admissible:
        print("   ", a.as_dict())
    print(f"    P(L1=+, R1=-) = {rep.qm_event_probability:.6f}; realised by an assignment: {rep.hv_event_possible}")

# %% [markdown]
# None of the five allows L1=+ with R1=-, although that joint outcome has
# positive Born probability.
