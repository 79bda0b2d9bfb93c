"""Dyadic resolution of unity and Fourier-analytical reference quasi-norms.

The reference norms computed here are the yardstick every sequence-space
norm in the toolkit is compared against.  The base cutoff is a tensor
product of even one-dimensional C-infinity cutoffs (1 on [-1,1], 0 outside
(-3/2,3/2) per axis); tensor form is what makes the dual quark system real.
For n = 2 the support statements hold in the max-norm, which contains the
Euclidean statements wherever they are exercised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import profiles
from .errors import GridTooCoarse, LevelOutOfRange, SpecInvalid
from .fields import FrequencyField, SampledField, norm_lp

_PROFILE_IDS = ("standard", "narrow")


@dataclass(frozen=True)
class SpaceSpec:
    """Which quasi-norm: family B|F, smoothness s, integrabilities p,q, weight, quark weight."""

    family: str
    s: float
    p: float
    q: float
    delta: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if self.family not in ("B", "F"):
            raise SpecInvalid("family must be 'B' or 'F'")
        if not (0 < self.p):
            raise SpecInvalid("p must be positive (may be inf)")
        if not (0 < self.q):
            raise SpecInvalid("q must be positive (may be inf)")
        if self.family == "F" and math.isinf(self.p) and not math.isinf(self.q):
            raise SpecInvalid("F-family with p = inf requires q = inf")

    def sigma_p(self, n):
        return n * (max(1.0 / self.p, 1.0) - 1.0)

    def sigma_pq(self, n):
        return n * (max(1.0 / self.p, 1.0 / self.q, 1.0) - 1.0)

    def with_(self, **kw):
        data = {
            "family": self.family,
            "s": self.s,
            "p": self.p,
            "q": self.q,
            "delta": self.delta,
            "kappa": self.kappa,
        }
        data.update(kw)
        return SpaceSpec(**data)

    def label(self):
        return (
            f"{self.family}^{self.s}_{{{self.p},{self.q}}}"
            + (f",delta={self.delta}" if self.delta else "")
            + (f",kappa={self.kappa}" if self.kappa else "")
        )


@dataclass(frozen=True)
class ResolutionOfUnity:
    """phi_0 and the dyadic levels phi_j, all as frequency multipliers."""

    grid: object
    profile: str
    phi0: FrequencyField
    levels: tuple  # FrequencyField for j = 0..j_max

    @property
    def j_max(self):
        return len(self.levels) - 1

    def level(self, j):
        if not (0 <= j <= self.j_max):
            raise LevelOutOfRange(f"level {j} outside 0..{self.j_max}")
        return self.levels[j]


def _cutoff_nd(grid, scale, inner, outer):
    """Tensor cutoff evaluated on the scaled frequency mesh."""
    out = None
    for ax_vals in grid.freq_mesh:
        c = profiles.cutoff_1d(ax_vals * scale, inner=inner, outer=outer)
        out = c if out is None else out * c
    return out


def build_resolution(grid, profile="standard"):
    """Construct the dyadic resolution of unity on the grid's frequency lattice."""
    if profile not in _PROFILE_IDS:
        raise ValueError(f"unknown transition profile {profile!r}")
    inner, outer = (1.0, 1.5) if profile == "standard" else (1.2, 1.5)
    j_max = grid.max_level
    if j_max < 3:
        raise GridTooCoarse("grid admits fewer than 3 dyadic levels")
    base = _cutoff_nd(grid, 1.0, inner, outer)
    levels = [base]
    prev = base
    for j in range(1, j_max + 1):
        cur = _cutoff_nd(grid, 2.0 ** (-j), inner, outer)
        levels.append(cur - prev)
        prev = cur
    phi0 = FrequencyField(grid, base)
    return ResolutionOfUnity(
        grid=grid,
        profile=profile,
        phi0=phi0,
        levels=tuple(FrequencyField(grid, lv) for lv in levels),
    )


def annulus_multiplier(res):
    """phi^0(xi) = phi_0(xi) - phi_0(2 xi), vanishing for |xi| <= 1/2."""
    g = res.grid
    inner, outer = (1.0, 1.5) if res.profile == "standard" else (1.2, 1.5)
    halved = _cutoff_nd(g, 2.0, inner, outer)
    return FrequencyField(g, res.phi0.coefficients - halved)


def lp_block(f, res, j):
    """The dyadic frequency block (phi_j fhat)^v."""
    from .fields import dft_forward, dft_inverse

    if not (0 <= j <= res.j_max):
        raise LevelOutOfRange(f"level {j} outside 0..{res.j_max}")
    spec = dft_forward(f)
    coeffs = spec.coefficients * res.levels[j].coefficients
    return dft_inverse(FrequencyField(f.grid, coeffs))


def lp_blocks(f, res):
    """All blocks at once (one forward transform)."""
    from .fields import dft_forward, dft_inverse

    spec = dft_forward(f)
    out = []
    for lv in res.levels:
        out.append(dft_inverse(FrequencyField(f.grid, spec.coefficients * lv.coefficients)))
    return out


def weight_field(grid, delta):
    """w_delta(x) = (1 + |x|^2)^(delta/2) sampled on the grid."""
    sq = None
    for ax_vals in grid.mesh:
        sq = ax_vals ** 2 if sq is None else sq + ax_vals ** 2
    return SampledField(grid, (1.0 + sq) ** (delta / 2.0))


def weight_eval(delta, grid, check_pairs=4096, seed=0):
    """Sample w_delta and report the admissibility constants it realizes.

    Returns (field, report) where the report holds the smallest grid
    constants for the derivative bounds (|gamma| <= 2, closed forms) and
    the two-point growth inequality with exponent alpha = |delta|.
    """
    w = weight_field(grid, delta)
    mesh = grid.mesh
    sq = sum(ax ** 2 for ax in mesh)
    base = 1.0 + sq
    wv = w.values.real

    deriv_consts = {}
    for ax in range(grid.dimension):
        x = mesh[ax]
        d1 = np.abs(delta * x) * base ** (delta / 2.0 - 1.0)
        deriv_consts[f"d1_axis{ax}"] = float(np.max(d1 / wv))
        d2 = np.abs(delta * base + delta * (delta - 2.0) * x ** 2) * base ** (
            delta / 2.0 - 2.0
        )
        deriv_consts[f"d2_axis{ax}"] = float(np.max(d2 / wv))

    rng = np.random.default_rng(seed)
    flat_w = wv.reshape(-1)
    coords = np.stack([ax.reshape(-1) for ax in mesh], axis=-1)
    ii = rng.integers(0, flat_w.size, size=check_pairs)
    jj = rng.integers(0, flat_w.size, size=check_pairs)
    dist_sq = np.sum((coords[ii] - coords[jj]) ** 2, axis=-1)
    growth = flat_w[ii] / (flat_w[jj] * (1.0 + dist_sq) ** (abs(delta) / 2.0))
    report = {
        "delta": delta,
        "derivative_constants": deriv_consts,
        "growth_constant": float(np.max(growth)) if check_pairs else 1.0,
        "growth_exponent": abs(delta),
    }
    return w, report


def _level_weights(spec, j_max):
    return np.array([2.0 ** (j * spec.s) for j in range(j_max + 1)])


def reference_norm(f, spec, res):
    """Fourier-analytical quasi-norm of Definition-1.1 type (weighted when delta != 0)."""
    return reference_norm_record(f, spec, res)["value"]


def reference_norm_record(f, spec, res):
    """Norm plus per-level contributions, as a JSON-friendly record."""
    if not isinstance(spec, SpaceSpec):
        raise SpecInvalid("spec must be a SpaceSpec")
    g = f.grid
    if g != res.grid:
        raise SpecInvalid("field and resolution live on different grids")
    blocks = lp_blocks(f, res)
    w = weight_field(g, spec.delta) if spec.delta != 0.0 else None

    p, q, s = spec.p, spec.q, spec.s
    j_count = len(blocks)
    per_level = []

    if spec.family == "B" or (math.isinf(p) and math.isinf(q)):
        for j, b in enumerate(blocks):
            bw = b * w if w is not None else b
            per_level.append(2.0 ** (j * s) * norm_lp(bw, p))
        contrib = np.array(per_level)
        if math.isinf(q):
            value = float(contrib.max()) if j_count else 0.0
        else:
            value = float(np.sum(contrib ** q) ** (1.0 / q))
    else:
        # F-family: inner ell_q over levels pointwise, then L_p.
        mags = np.stack([np.abs(b.values) for b in blocks])
        lw = _level_weights(spec, j_count - 1).reshape((-1,) + (1,) * g.dimension)
        weighted = lw * mags
        if math.isinf(q):
            inner = weighted.max(axis=0)
        else:
            inner = np.sum(weighted ** q, axis=0) ** (1.0 / q)
        if w is not None:
            inner = inner * w.values.real
        inner_f = SampledField(g, inner)
        value = norm_lp(inner_f, p)
        for j, b in enumerate(blocks):
            bw = b * w if w is not None else b
            per_level.append(2.0 ** (j * s) * norm_lp(bw, p))

    return {
        "spec": spec_dict(spec),
        "value": value,
        "per_level_contributions": [float(c) for c in per_level],
    }


def spec_dict(spec):
    def enc(v):
        return "inf" if math.isinf(v) else v

    return {
        "family": spec.family,
        "s": spec.s,
        "p": enc(spec.p),
        "q": enc(spec.q),
        "delta": spec.delta,
        "kappa": spec.kappa,
    }


def spec_from_dict(d):
    def dec(v):
        return math.inf if v in ("inf", "Infinity", None) else float(v)

    return SpaceSpec(
        family=d["family"],
        s=float(d["s"]),
        p=dec(d["p"]),
        q=dec(d["q"]),
        delta=float(d.get("delta", 0.0)),
        kappa=float(d.get("kappa", 0.0)),
    )
