# %% [markdown]
# # Checking the counterfactual argument
#
# Two scripted derivations are run through the checker under both readings of
# the counterfactual. Under the realist reading outcomes are context free and
# both go through; the operational reading stops each at a specific step.

# %%
import random

from hardycf.cfl.checker import Semantics, check_derivation
from hardycf.cfl.library import builtin_scripts, builtin_text, random_derivation

for name, d in builtin_scripts().items():
    print(builtin_text(name))
    for sem in Semantics:
        v = check_derivation(d, sem)
        line = f"  {sem.value:12s} {v.status.value}"
        if v.failing_step:
            line += f" at step {v.failing_step}: {v.reason.value} ({v.detail})"
        if v.contradiction:
            c = v.contradiction
            line += f"; claims P=1 but quantum P({c.target[0]}{c.target[1]}|{c.condition[0]}{c.condition[1]}) = {c.quantum_probability:.4f}"
        print(line)
    print()

# %% [markdown]
# Random derivations: the operational checker never accepts one the realist
# checker rejects.

# %%
tally = {(a, b): 0 for a in (True, False) for b in (True, False)}
for seed in range(200):
    d = random_derivation(random.Random(seed))
    key = (check_derivation(d, "operational").accepted, check_derivation(d, "realist").accepted)
    tally[key] += 1
for (op, real), k in tally.items():
    print(f"operational={op!s:5}  realist={real!s:5}  {k}")
