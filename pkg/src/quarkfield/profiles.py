"""Closed-form C-infinity profiles used by every construction in the toolkit.

Everything is built from the flat exponential rho(t) = exp(-1/t) for t > 0,
which gives smooth steps, cutoffs and bumps with all derivatives vanishing
at the glue points.  All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import numpy as np


def flat_exp(t):
    """exp(-1/t) for t > 0, zero otherwise."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, monotone in between."""
    a = flat_exp(u)
    b = flat_exp(1.0 - u)
    return a / (a + b)


def cutoff_1d(t, inner=1.0, outer=1.5):
    """Even cutoff: 1 for |t| <= inner, 0 for |t| >= outer, smooth between."""
    t = np.abs(np.asarray(t, dtype=float))
    return smooth_step((outer - t) / (outer - inner))


def bump_1d(t, lo, hi):
    """Positive C-infinity bump supported exactly on the open interval (lo, hi)."""
    t = np.asarray(t, dtype=float)
    u = (t - lo) / (hi - lo)
    out = np.zeros_like(u)
    inside = (u > 0) & (u < 1)
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (ui * (1.0 - ui)))
    return out


# Support of the 1-D seed bump for the unit-lattice partition of unity.
SEED_LO = 0.05
SEED_HI = 1.9


def seed_bump(t):
    """The 1-D seed bump on (SEED_LO, SEED_HI); strictly positive inside."""
    return bump_1d(t, SEED_LO, SEED_HI)


def seed_bump_lattice_sum(t):
    """sum_m seed_bump(t - m); strictly positive for every real t."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    # supp(seed_bump) subset (0, 2): shifts m with t - m in (0, 2) suffice.
    m_lo = np.floor(t - SEED_HI).astype(int).min() if t.size else 0
    m_hi = np.ceil(t - SEED_LO).astype(int).max() if t.size else 0
    for m in range(m_lo, m_hi + 1):
        out += seed_bump(t - m)
    return out


def partition_bump_1d(t, stretch=1.0):
    """Normalized bump k1 with sum_m k1(t - m) = 1 exactly.

    `stretch` widens the seed bump (support stretch*(SEED_LO, SEED_HI)),
    which flattens the profile; the lattice normalization keeps the exact
    partition of unity for any stretch >= 1.
    """
    t = np.asarray(t, dtype=float)
    s = t / stretch
    num = seed_bump(s)
    den = np.zeros_like(t)
    m_lo = int(np.floor(t.min() - stretch * SEED_HI)) - 1 if t.size else 0
    m_hi = int(np.ceil(t.max() - stretch * SEED_LO)) + 1 if t.size else 0
    for m in range(m_lo, m_hi + 1):
        den += seed_bump((t - m) / stretch)
    return num / den


def omega_window_1d(t):
    """Even window: 1 on [-2, 2], support inside (-pi + 0.01, pi - 0.01)."""
    return cutoff_1d(t, inner=2.0, outer=np.pi - 0.01)


def plateau_bump_1d(t, plateau, support):
    """Even bump: 1 for |t| <= plateau, 0 for |t| >= support."""
    return cutoff_1d(t, inner=plateau, outer=support)
