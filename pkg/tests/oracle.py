"""Independent reference computations used by the tests.

Probabilities here go through density matrices and projectors (1 +/- A)/2,
never through the library's eigenvectors, so agreement is a real check.
"""

import itertools
import math

import numpy as np

SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
I2 = np.eye(2)


def state(theta):
    c, s = math.cos(theta), math.sin(theta)
    n = c / math.sqrt(2 * (1 + s * s))
    # |+> and |-> are the sigma_z eigenstates
    plus, minus = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    terms = [
        (c, plus, plus),
        (s, plus, minus),
        ((1 + s * s) / c, minus, plus),
        (-s, minus, minus),
    ]
    return n * sum(a * np.kron(u, v) for a, u, v in terms)


def observable(name, theta):
    return {"L1": SZ, "L2": SX, "R1": SZ, "R2": math.cos(2 * theta) * SZ + math.sin(2 * theta) * SX}[name]


def proj(name, sign, theta):
    return (I2 + sign * observable(name, theta)) / 2


def prob(theta, left, sl, right, sr):
    psi = state(theta)
    rho = np.outer(psi, psi.conj())
    return float(np.trace(rho @ np.kron(proj(left, sl, theta), proj(right, sr, theta))).real)


def cond(theta, given, target):
    """P(target | given); each is (setting name, sign) on opposite sides."""
    if given[0][0] == "L":
        joint = prob(theta, given[0], given[1], target[0], target[1])
    else:
        joint = prob(theta, target[0], target[1], given[0], given[1])
    marg = sum(
        prob(theta, given[0], given[1], target[0], s) if given[0][0] == "L" else prob(theta, target[0], s, given[0], given[1])
        for s in (1, -1)
    )
    return joint / marg


def admissible(theta, eps=1e-9):
    """Brute force over all 16 value assignments to (L1, L2, R1, R2)."""
    out = []
    for vals in itertools.product((1, -1), repeat=4):
        v = dict(zip(("L1", "L2", "R1", "R2"), vals))
        if all(prob(theta, l, v[l], r, v[r]) > eps for l in ("L1", "L2") for r in ("R1", "R2")):
            out.append(v)
    return out


def hardy_probability(theta):
    c, s = math.cos(theta), math.sin(theta)
    return c * c / (2 * (1 + s * s)) * s * s
