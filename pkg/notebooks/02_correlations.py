# %% [markdown]
# # A chain of certainties and how it fails
#
# Each link below is a conditional probability equal to one. Chaining them
# suggests L1=+ forces R1=+, yet the direct conditional is cos^2(theta).

# %%
import math

from hardycf.correlations import chain_report

for theta in (math.pi / 6, math.pi / 4, math.pi / 3, 1.2, 1.4708):
    rep = chain_report(theta)
    links = "  ".join(f"P({l.target[0]}{l.target[1]}|{l.condition[0]}{l.condition[1]})={l.probability:.12f}" for l in rep.links)
    print(f"theta={theta:.4f}  {links}")
    print(f"    P(R1+|L1+) = {rep.quantum_conditional:.6f}   cos^2 = {math.cos(theta) ** 2:.6f}")

# %% [markdown]
# The gap can be made as large as we like: at theta = 1.4708 the conditional
# drops below one percent.
