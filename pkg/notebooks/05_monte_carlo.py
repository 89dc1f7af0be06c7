# %% [markdown]
# # Sampling the experiment
#
# Draw outcome pairs with the seeded SplitMix64 stream and compare frequencies
# against the Born table.

# %%
import math

from hardycf.hardy import SettingLabel, hardy_state, setting_observable
from hardycf.mc import frequency_report, sample_joint
from hardycf.qcore import joint_distribution

theta = math.pi / 4
state = hardy_state(theta)
for ls, rs in ((SettingLabel.L1, SettingLabel.R2), (SettingLabel.L2, SettingLabel.R1), (SettingLabel.L1, SettingLabel.R1)):
    ol, orr = setting_observable(ls, theta)[1], setting_observable(rs, theta)[1]
    counts = sample_joint(state, ol, orr, 100_000, seed=7)
    print(f"{ls.value},{rs.value}")
    for r in frequency_report(counts, joint_distribution(state, ol, orr)):
        print(f"    {r.cell[0]}{r.cell[1]}  count={r.count:6d}  freq={r.frequency:.5f}  p={r.probability:.5f}  z={r.z:+.2f}")

# %% [markdown]
# The (L1, R2) and (L2, R1) tables each contain a cell of probability zero; it
# is removed before sampling, so its count is exactly zero.
