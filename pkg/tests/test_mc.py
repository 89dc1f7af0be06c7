import math

import numpy as np
import pytest

from hardycf.hardy import SettingLabel, hardy_state, setting_observable
from hardycf.mc import (
    SplitMix64,
    frequency_report,
    sample_joint,
    sample_joint_sharded,
    splitmix64_block,
    uniforms,
)
from hardycf.qcore import Outcome, SpinObservable, joint_distribution

# published SplitMix64 outputs
SEED_1234567 = [6457827717110365317, 3203168211198807973, 9817491932198370423, 4593380528125082431, 16408922859458223821]


def _obs(theta, left, right):
    return setting_observable(left, theta)[1], setting_observable(right, theta)[1]


def test_reference_stream():
    g = SplitMix64(1234567)
    assert [g.next_u64() for _ in range(5)] == SEED_1234567
    assert [int(x) for x in splitmix64_block(1234567, 5)] == SEED_1234567
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


@pytest.mark.parametrize("seed", [0, 1, 2**63, 2**64 - 1])
def test_block_matches_scalar(seed):
    g = SplitMix64(seed)
    scalar = [g.next_u64() for _ in range(40)]
    assert [int(x) for x in splitmix64_block(seed, 40)] == scalar
    assert [int(x) for x in splitmix64_block(seed, 10, start=30)] == scalar[30:]
    g = SplitMix64(seed)
    assert np.array_equal(uniforms(seed, 5), [g.next_float() for _ in range(5)])


def test_seed_range():
    with pytest.raises(ValueError):
        SplitMix64(-1)
    with pytest.raises(ValueError):
        splitmix64_block(2**64, 3)


def test_uniforms_in_unit_interval():
    u = uniforms(99, 100_000)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.01


def test_zero_cell_never_drawn():
    theta = math.pi / 4
    ol, orr = _obs(theta, SettingLabel.L1, SettingLabel.R2)
    counts = sample_joint(hardy_state(theta), ol, orr, 100_000, 7)
    assert counts.counts[Outcome.PLUS, Outcome.MINUS] == 0
    assert counts.as_array().sum() == 100_000


def test_deterministic():
    theta = 0.9
    ol, orr = _obs(theta, SettingLabel.L2, SettingLabel.R1)
    s = hardy_state(theta)
    a = sample_joint(s, ol, orr, 5000, 11)
    b = sample_joint(s, ol, orr, 5000, 11)
    c = sample_joint(s, ol, orr, 5000, 12)
    assert a.counts == b.counts
    assert a.counts != c.counts


def test_sharded_adds_up():
    theta = 0.9
    ol, orr = _obs(theta, SettingLabel.L1, SettingLabel.R1)
    s = hardy_state(theta)
    sh = sample_joint_sharded(s, ol, orr, 10_001, 3, shards=4)
    assert sum(sh.counts.values()) == 10_001
    parts = [sample_joint(s, ol, orr, k, 3 + i) for i, k in enumerate([2501, 2500, 2500, 2500])]
    assert sh.counts == {k: sum(p.counts[k] for p in parts) for k in sh.counts}


def test_frequency_report():
    s = hardy_state(0.0)
    z = SpinObservable.z()
    counts = sample_joint(s, z, z, 20_000, 42)
    rep = frequency_report(counts, joint_distribution(s, z, z))
    assert len(rep) == 4
    for r in rep:
        assert r.frequency == r.count / 20_000
        if r.probability == 0:
            assert r.count == 0 and r.z == 0
        else:
            assert abs(r.z) < 4.75
    with pytest.raises(ValueError):
        frequency_report(counts, joint_distribution(s, z, SpinObservable.x()))


def test_n_must_be_positive():
    z = SpinObservable.z()
    with pytest.raises(ValueError):
        sample_joint(hardy_state(0.3), z, z, 0, 1)
