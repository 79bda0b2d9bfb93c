"""Frame analysis and synthesis in both smoothness regimes.

Positive regime: analyze against the dual system Phi, synthesize with
quarks.  Negative regime: analyze with quarks (discrete local means),
synthesize with Phi.  Per (beta, level) everything reduces to one circular
FFT cross-correlation/convolution on the grid; the quark lattice at level
j sits on every (N / (L 2^j))-th grid point, which keeps all index
arithmetic exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    HypothesisViolated,
    IndexOutOfRange,
    RegimeMismatch,
    ScaleTooFine,
    SupportOverflow,
)
from .fields import SampledField, pairing, norm_l2
from .littlewood import SpaceSpec, reference_norm
from .sequences import CoefficientTensor, SequenceSpec, sequence_norm
from .utils import order


@dataclass(frozen=True)
class TruncationConfig:
    """Finite partial-sum policy for the frame operators."""

    beta_max: int
    j_max: int
    regime: str = "positive"
    window_margin: float = math.inf  # extra m-window dilation in template units

    def __post_init__(self):
        if self.regime not in ("positive", "negative"):
            raise ValueError("regime must be 'positive' or 'negative'")
        if self.beta_max < 0 or self.j_max < 0:
            raise ValueError("truncation orders must be nonnegative")


def _lattice_stride(grid, j):
    cell = grid.points_per_axis / (grid.box_side * 2.0 ** j)
    if abs(cell - round(cell)) > 1e-9 or cell < 1:
        raise IndexOutOfRange(f"level {j} lattice is not grid-commensurate")
    return int(round(cell))


def _level_template(system, beta, j, side):
    """Grid samples of the level-j kernel T(2^j x) (quark or dual)."""
    from .quarks import quark_eval

    if side == "dual":
        return system.dual_level_template(beta, j)
    return quark_eval(system, beta, j, (0,) * system.grid.dimension)


def _m_range(grid, j, support, margin):
    """Admissible m per axis: translated support inside the box, +/- margin."""
    half = grid.box_side / 2.0
    scale = 2.0 ** j
    lo_s, hi_s = support
    m_lo = int(math.ceil(-half * scale - lo_s))
    m_hi = int(math.floor(half * scale - hi_s))
    if not math.isinf(margin):
        m_lo = max(m_lo, int(math.floor(-margin * scale - hi_s)))
        m_hi = min(m_hi, int(math.ceil(margin * scale - lo_s)))
    return m_lo, m_hi


def _quark_support(system):
    """Per-axis support interval of the level-0 quark, in template units.

    The window is governed by the quark side in both regimes: positive
    synthesis places quarks at the analyzed (j, m), negative analysis takes
    local means whose kernels are the quarks themselves.
    """
    from .profiles import SEED_HI

    return (0.0, SEED_HI * system.template.stretch)


def analyze(f, system, cfg, check_margin=True):
    """Coefficient tensor lambda^beta_{j,m} = 2^{jn} (f, T^beta_{j,m}).

    T = Phi (positive regime) or T = k (negative regime), one circular
    cross-correlation per (beta, j).
    """
    g = f.grid
    if g != system.grid:
        raise RegimeMismatch("field and system grids differ")
    if cfg.beta_max > system.beta_max:
        raise IndexOutOfRange("cfg.beta_max exceeds the built dual table")
    if cfg.j_max > system.j_max:
        raise IndexOutOfRange("cfg.j_max exceeds the grid-admissible level")
    if check_margin:
        _check_margin(f, system)

    n = g.dimension
    N = g.points_per_axis
    analysis_side = "dual" if cfg.regime == "positive" else "quark"
    out = CoefficientTensor(n, "quark")
    f_hat = np.fft.fftn(f.values)
    h_n = g.spacing ** n
    sup = _quark_support(system)

    for beta in system.betas():
        if order(beta) > cfg.beta_max:
            continue
        for j in range(cfg.j_max + 1):
            K = _level_template(system, beta, j, analysis_side)
            stride = _lattice_stride(g, j)
            corr = np.fft.ifftn(f_hat * np.conj(np.fft.fftn(K.values.real)))
            scale = 2.0 ** (j * n) * h_n
            m_lo, m_hi = _m_range(g, j, sup, cfg.window_margin)
            if m_hi < m_lo:
                continue
            axes_idx = [((np.arange(m_lo, m_hi + 1) * stride) % N) for _ in range(n)]
            if n == 1:
                vals = corr[axes_idx[0]]
                offset = (m_lo,)
            else:
                vals = corr[np.ix_(axes_idx[0], axes_idx[1])]
                offset = (m_lo, m_lo)
            out.set_slab(beta, j, offset, scale * vals)
    return out


def _check_margin(f, system):
    """The analyzed field's bulk must keep a positive margin to the box edge.

    The 1e-3 relative threshold tolerates band-limited interpolation tails
    (rescaled domain pieces carry them) while still rejecting data whose
    actual mass sits at the seam.
    """
    bounds = f.support_bounds(rel_tol=1e-3)
    if bounds is None:
        return
    g = f.grid
    pad = 2.0  # at least the quark support must fit around the data
    for (lo, hi) in bounds:
        if g.axis[lo] < -g.box_side / 2.0 + pad or g.axis[hi] > g.box_side / 2.0 - pad:
            raise SupportOverflow("field support reaches the box margin")


def synthesize(coeffs, system, cfg):
    """Finite sum of lambda^beta_{j,m} * T^beta_{j,m} (T per cfg.regime)."""
    g = system.grid
    n = g.dimension
    N = g.points_per_axis
    synth_side = "quark" if cfg.regime == "positive" else "dual"
    acc = np.zeros(g.shape, dtype=complex)
    for beta in sorted(coeffs.betas()):
        if order(beta) > cfg.beta_max:
            raise IndexOutOfRange(f"coefficient beta {beta} outside cfg.beta_max")
        for j in coeffs.levels(beta):
            if j > cfg.j_max:
                raise IndexOutOfRange(f"coefficient level {j} outside cfg.j_max")
            slab = coeffs.slab(beta, j)
            if slab is None:
                continue
            off, vals = slab
            if not np.abs(vals).any():
                continue
            stride = _lattice_stride(g, j)
            impulses = np.zeros(g.shape, dtype=complex)
            axes_idx = [
                ((np.arange(o, o + s) * stride) % N) for o, s in zip(off, vals.shape)
            ]
            if n == 1:
                impulses[axes_idx[0]] = vals
            else:
                impulses[np.ix_(axes_idx[0], axes_idx[1])] = vals
            K = _level_template(system, beta, j, synth_side)
            acc += np.fft.ifftn(np.fft.fftn(impulses) * np.fft.fftn(K.values.real))
    return SampledField(g, acc)


def round_trip_residual(f, system, cfg, norm="l2"):
    """|| f - synthesize(analyze(f)) || / || f || in L2 or sup norm."""
    nf = norm_l2(f) if norm == "l2" else f.max_abs()
    if nf == 0.0:
        return 0.0
    recon = synthesize(analyze(f, system, cfg), system, cfg)
    diff = f - recon
    nd = norm_l2(diff) if norm == "l2" else diff.max_abs()
    return nd / nf


def check_regime(spec, regime, n):
    """Hypotheses of the two representation regimes."""
    if regime == "positive":
        thr = spec.sigma_p(n) if spec.family == "B" else spec.sigma_pq(n)
        if not spec.s > thr:
            raise HypothesisViolated(
                f"hypothesis s > sigma^n_{{p{',q' if spec.family == 'F' else ''}}} violated"
                f" (s={spec.s}, threshold={thr})"
            )
    else:
        if not spec.s < 0:
            raise HypothesisViolated(f"negative regime needs s < 0 (s={spec.s})")
        if not spec.kappa < 1e9:
            raise HypothesisViolated("kappa out of range")


def frame_ratio_report(corpus, spec, system, cfg, res):
    """Sequence-vs-reference norm ratios over a corpus: min, max, spread."""
    n = system.grid.dimension
    check_regime(spec, cfg.regime, n)
    if cfg.regime == "negative" and not spec.kappa < system.epsilon:
        raise HypothesisViolated("negative regime needs kappa < epsilon")
    sspec = SequenceSpec(space=spec, flavor="quark", grid=system.grid)
    rows = []
    for idx, f in enumerate(corpus):
        coeffs = analyze(f, system, cfg)
        seq = sequence_norm(coeffs, sspec)
        ref = reference_norm(f, spec, res)
        rows.append(
            {
                "corpus_id": idx,
                "sequence_norm": seq,
                "reference_norm": ref,
                "ratio": seq / ref if ref > 0 else math.inf,
            }
        )
    ratios = [r["ratio"] for r in rows if math.isfinite(r["ratio"])]
    report = {
        "spec": spec.label(),
        "regime": cfg.regime,
        "beta_max": cfg.beta_max,
        "j_max": cfg.j_max,
        "rows": rows,
        "min_ratio": min(ratios) if ratios else math.nan,
        "max_ratio": max(ratios) if ratios else math.nan,
    }
    report["spread"] = (
        report["max_ratio"] / report["min_ratio"] if ratios and report["min_ratio"] > 0 else math.nan
    )
    return report


def local_mean_continuous(f, k_template, t, x):
    """k(t, f)(x) = t^-n * integral k((y - x)/t) f(y) dy by grid quadrature."""
    g = f.grid
    n = g.dimension
    if np.isscalar(x):
        x = (x,)
    if t < g.spacing:
        raise ScaleTooFine(f"scale t={t} below grid spacing {g.spacing}")
    # evaluate k((y - x)/t) on the grid; k known by closed form via its template
    kernel = _kernel_at(k_template, t, x)
    val = (f.values * kernel).sum() * g.spacing ** n
    return complex(val) * t ** (-n)


def _kernel_at(k_template, t, x):
    """Samples of k((y - x)/t): exact index reads when commensurate, else
    band-limited (Dirichlet-kernel) evaluation along the axis (1-D only)."""
    g = k_template.grid
    n = g.dimension
    N = g.points_per_axis
    h = g.spacing
    vals = k_template.values
    gathers = []
    commensurate = True
    for ax in range(n):
        u = (g.axis - x[ax]) / t  # argument of k along this axis
        idx = (u + g.box_side / 2.0) / h
        near = np.rint(idx)
        if np.max(np.abs(idx - near)) < 1e-9:
            gathers.append((near.astype(np.int64), u))
        else:
            commensurate = False
            gathers.append((None, u))
    if commensurate:
        out = np.zeros(g.shape, dtype=complex)
        masks = [(gt >= 0) & (gt < N) for gt, _ in gathers]
        clips = [np.clip(gt, 0, N - 1) for gt, _ in gathers]
        if n == 1:
            out[masks[0]] = vals[clips[0][masks[0]]]
        else:
            mask = np.outer(masks[0], masks[1])
            gathered = vals[np.ix_(clips[0], clips[1])]
            out[mask] = gathered[mask]
        return out
    if n != 1:
        raise ScaleTooFine("off-lattice local means are supported in 1-D only")
    return _dirichlet_eval(k_template, gathers[0][1])


def _dirichlet_eval(template, u):
    """Band-limited values of the template at arbitrary points u (1-D)."""
    g = template.grid
    N = g.points_per_axis
    L = g.box_side
    vals = template.values
    nz = np.nonzero(np.abs(vals) > 0)[0]
    out = np.zeros(u.shape, dtype=complex)
    inside = (u >= -L / 2.0) & (u < L / 2.0)
    pts = u[inside]
    if nz.size == 0 or pts.size == 0:
        return out
    diff = (pts[:, None] - g.axis[nz][None, :]) / L
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = np.sin(np.pi * N * diff) / (N * np.tan(np.pi * diff))
    kern[~np.isfinite(kern)] = 1.0
    out[inside] = kern @ vals[nz]
    return out


def single_beta_norm(f, system, spec, cfg=None):
    """beta = 0 slice of the negative-regime analysis, plain-flavor norm."""
    n = system.grid.dimension
    if not spec.s < 0:
        raise HypothesisViolated("single-beta characterization needs s < 0")
    if cfg is None:
        cfg = TruncationConfig(beta_max=0, j_max=system.j_max, regime="negative")
    coeffs = analyze(f, system, TruncationConfig(0, cfg.j_max, "negative", cfg.window_margin))
    sspec = SequenceSpec(space=spec, flavor="plain", grid=system.grid)
    return sequence_norm(coeffs, sspec)


def measured_gradient_sup(system):
    """sup |grad k| of the base bump, by spectral differentiation."""
    from .fields import spectral_derivative

    g = system.grid
    total = np.zeros(g.shape)
    for ax in range(g.dimension):
        alpha = tuple(1 if a == ax else 0 for a in range(g.dimension))
        d = spectral_derivative(system.template.k, alpha)
        total += np.abs(d.values) ** 2
    return float(np.sqrt(total.max()))


def derivative_lift_norm(f, spec, N_order, system, res, cfg=None):
    """max over |alpha| <= N of the negative-regime norm of D^alpha f at s - N.

    Returns (quark_route, reference_route): the lifted quark-side value and
    the reference-side analogue max || D^alpha f | A^{s-N} ||.
    """
    from .fields import spectral_derivative
    from .utils import multi_indices

    n = system.grid.dimension
    if not (spec.s - N_order < 0 < spec.s <= N_order) and N_order != 0:
        raise HypothesisViolated("need s - N < 0 < s <= N for the derivative lift")
    if cfg is None:
        cfg = TruncationConfig(beta_max=system.beta_max, j_max=system.j_max, regime="negative")
    shifted = spec.with_(s=spec.s - N_order)
    if N_order == 0:
        shifted = spec
    sspec = SequenceSpec(space=shifted, flavor="quark", grid=system.grid)
    quark_route = 0.0
    ref_route = 0.0
    for alpha in multi_indices(n, N_order):
        d = spectral_derivative(f, alpha)
        coeffs = analyze(d, system, cfg)
        quark_route = max(quark_route, sequence_norm(coeffs, sspec))
        ref_route = max(ref_route, reference_norm(d, shifted, res))
    return quark_route, ref_route
