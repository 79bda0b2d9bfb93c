"""Quark system k^beta_{j,m} and its totally independent dual system Phi^beta_{j,m}.

Quarks are polynomial-weighted translates of a normalized C-infinity bump
forming a partition of unity on the integer lattice.  The duals are built
on the Fourier side: a periodized polynomial window Omega^beta multiplied
by the base cutoff (F-branch, level 0) or by the annulus difference
(M-branch, levels >= 1), then transformed back to space.  The two
constructions share nothing but the integer J.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from . import profiles
from .errors import (
    GridTooCoarse,
    IndexOutOfRange,
    TailOverflow,
    TruncationInsufficient,
)
from .fields import (
    FrequencyField,
    SampledField,
    dft_inverse,
    dilate_translate_sample,
    spectral_derivative,
)
from .littlewood import annulus_multiplier
from .utils import fitted_slope, multi_factorial, multi_indices, order


@dataclass(frozen=True)
class QuarkTemplate:
    """Base bump k with its support parameters."""

    grid: object
    k: SampledField
    J: int
    epsilon: float
    support_radius: float
    stretch: float = 1.0


@dataclass(frozen=True)
class DualTemplate:
    """Phi^beta_F / Phi^beta_M for one multi-index beta."""

    grid: object
    beta: tuple
    phi_F: SampledField
    phi_M: SampledField
    omega_truncation: int
    max_imag_F: float
    max_imag_M: float
    tail_radius_F: float
    tail_radius_M: float
    bulk_radius_F: float
    bulk_radius_M: float


class QuarkSystem:
    """Template + dual table + truncation configuration."""

    def __init__(self, template, res, duals, beta_max, m_lattice_cut, kappa=0.0, lattice=None):
        self.template = template
        self.res = res
        self.duals = duals  # dict beta -> DualTemplate
        self.beta_max = beta_max
        self.m_lattice_cut = m_lattice_cut
        self.kappa = kappa
        self.grid = template.grid
        self.lattice = lattice if lattice is not None else OmegaLattice(template.J, m_lattice_cut)
        self._quark_cache = {}
        self._dual_level_cache = {}

    @property
    def J(self):
        return self.template.J

    @property
    def epsilon(self):
        return self.template.epsilon

    @property
    def j_max(self):
        g = self.grid
        # levels must keep the quark lattice grid-commensurate
        return min(g.max_level, int(round(math.log2(g.points_per_axis / g.box_side))))

    def betas(self):
        return multi_indices(self.grid.dimension, self.beta_max)

    def quark_template(self, beta):
        """k^beta(x) = (2^-J x)^beta k(x) sampled on the grid."""
        beta = tuple(beta)
        if order(beta) > self.beta_max:
            raise IndexOutOfRange(f"|beta| = {order(beta)} exceeds beta_max {self.beta_max}")
        if beta not in self._quark_cache:
            g = self.grid
            vals = self.template.k.values.copy()
            for ax, b in enumerate(beta):
                if b:
                    vals = vals * (2.0 ** (-self.J) * g.mesh[ax]) ** b
            fld = SampledField(g, vals.real)
            self._quark_cache[beta] = fld
        return self._quark_cache[beta]

    def dual_template(self, beta):
        beta = tuple(beta)
        if beta not in self.duals:
            raise IndexOutOfRange(f"no dual built for beta = {beta}")
        return self.duals[beta]

    def dual_level_template(self, beta, j):
        """Phi^beta at level j centered at m = 0: the exact torus dilate."""
        beta = tuple(beta)
        if beta not in self.duals:
            raise IndexOutOfRange(f"no dual built for beta = {beta}")
        key = (beta, int(j))
        if key not in self._dual_level_cache:
            mult = dual_multiplier(self.grid, self.res, self.lattice, beta, j)
            raw = dft_inverse(FrequencyField(self.grid, mult))
            sup = max(raw.max_abs(), 1e-300)
            if raw.max_imag() > 1e-10 * sup:
                raise ArithmeticError("level dual template not real")
            self._dual_level_cache[key] = raw.real_part()
        return self._dual_level_cache[key]

    def manifest(self):
        g = self.grid
        man = {
            "n": g.dimension,
            "N": g.points_per_axis,
            "L": g.box_side,
            "J": self.J,
            "epsilon": self.epsilon,
            "beta_max": self.beta_max,
            "j_max": self.j_max,
            "M_max": self.m_lattice_cut,
            "kappa": self.kappa,
            "bump_stretch": self.template.stretch,
            "resolution_profile": self.res.profile,
            "checksums": {
                "k": _checksum(self.template.k),
                **{
                    f"phi_F[{','.join(map(str, b))}]": _checksum(d.phi_F)
                    for b, d in sorted(self.duals.items())
                },
            },
        }
        return man


def _checksum(field):
    return hashlib.sha256(np.ascontiguousarray(field.values).tobytes()).hexdigest()[:16]


def build_base_bump(grid, stretch=1.0):
    """Normalized bump with sum_m k(x - m) = 1 and support in the open positive orthant.

    `stretch` >= 1 widens (flattens) the profile; J and epsilon follow from
    the realized support radius, so epsilon is stretch-independent.
    """
    hi = profiles.SEED_HI * stretch
    if hi / grid.spacing < 32:
        raise GridTooCoarse("bump support must span at least 32 grid cells")
    vals = None
    for ax_vals in grid.mesh:
        v = profiles.partition_bump_1d(ax_vals, stretch=stretch)
        vals = v if vals is None else vals * v
    k = SampledField(grid, vals)
    radius = hi * math.sqrt(grid.dimension)
    J = 1
    while not (radius < 2.0 ** (J - 0.05)):
        J += 1
    epsilon = J - math.log2(radius)
    return QuarkTemplate(
        grid=grid, k=k, J=J, epsilon=epsilon, support_radius=radius, stretch=stretch
    )


def quark_eval(system, beta, j, m):
    """k^beta_{j,m} = k^beta(2^j x - m) sampled on the grid."""
    if j < 0 or j > system.j_max:
        raise IndexOutOfRange(f"level {j} outside 0..{system.j_max}")
    return dilate_translate_sample(system.quark_template(beta), j, m)


class OmegaLattice:
    """Cached lattice samples g_b(t) = (omega^b)^v(t) and symbol evaluation.

    The polynomial window is a tensor product, so everything is per axis:
    g_b carries the 1-D factor i^b 2^(J b) / (2 pi b!) * s^b * window(s)
    transformed at integer points (real by parity), and
    S_b(eta) = sum_{|t| <= M_max} g_b(t) e^{-i t eta}
    is the 2 pi-periodic symbol, evaluable at arbitrary frequencies.
    """

    def __init__(self, J, M_max, quad_points=8192):
        self.J = J
        self.M_max = M_max
        self.quad_points = quad_points
        self._tables = {}

    def lattice_values(self, b):
        if b not in self._tables:
            t = np.arange(-self.M_max, self.M_max + 1)
            s_max = np.pi - 0.005
            s = np.linspace(-s_max, s_max, self.quad_points, endpoint=False)
            ds = s[1] - s[0]
            w = profiles.omega_window_1d(s) * s ** b
            phase = np.exp(1j * np.outer(t, s))
            integral = phase @ w * ds
            coef = (
                (1j ** b)
                * 2.0 ** (self.J * b)
                / (2.0 * np.pi * math.factorial(b))
                / np.sqrt(2.0 * np.pi)
            )
            vals = coef * integral
            if np.max(np.abs(vals.imag)) > 1e-12 * max(np.max(np.abs(vals)), 1e-300):
                raise ArithmeticError("omega lattice values unexpectedly complex")
            g = vals.real
            shell = max(abs(g[0]), abs(g[-1]))
            peak = np.max(np.abs(g))
            if peak > 0 and shell > 1e-12 * peak:
                raise TruncationInsufficient(
                    f"lattice shell |m| = {self.M_max} contributes {shell / peak:.2e} relatively"
                )
            self._tables[b] = g
        return self._tables[b]

    def symbol(self, b, eta, mask_limit=1.6):
        """S_b on arbitrary frequencies, zeroed beyond the cutoff's reach."""
        g = self.lattice_values(b)
        t = np.arange(-self.M_max, self.M_max + 1)
        out = np.zeros(eta.shape, dtype=complex)
        mask = np.abs(eta) <= mask_limit
        pts = eta[mask]
        if pts.size:
            out[mask] = g @ np.exp(-1j * np.outer(t, pts))
        return out


def _axis_cutoff(res):
    inner, outer = (1.0, 1.5) if res.profile == "standard" else (1.2, 1.5)

    def cut(eta):
        return profiles.cutoff_1d(eta, inner=inner, outer=outer)

    return cut


def dual_multiplier(grid, res, lattice, beta, j):
    """Frequency multiplier of the level-j dual template on the grid lattice.

    Level 0 is the F-branch phi_0(xi) Omega(xi); level j >= 1 carries
    2^{-jn} phi^0(2^-j xi) Omega(2^-j xi) -- the exact transform of the
    dilated M-branch, built pointwise so no resampling of the template is
    ever needed.  The parity factor accounts for Phi being defined through
    its inverse transform.
    """
    beta = tuple(beta)
    cut = _axis_cutoff(res)
    scale = 2.0 ** (-j)
    axis_eta = grid.freq_axis * scale
    # tensorize explicitly (n <= 2)
    if grid.dimension == 1:
        symbol = lattice.symbol(beta[0], axis_eta)
        c_axes = cut(axis_eta)
        c_axes_2 = cut(2.0 * axis_eta)
        window = c_axes if j == 0 else (c_axes - c_axes_2)
    else:
        s0 = lattice.symbol(beta[0], axis_eta)
        s1 = lattice.symbol(beta[1], axis_eta)
        symbol = s0[:, None] * s1[None, :]
        c0 = cut(axis_eta)
        c2 = cut(2.0 * axis_eta)
        base = c0[:, None] * c0[None, :]
        halved = c2[:, None] * c2[None, :]
        window = base if j == 0 else (base - halved)
    sign = (-1.0) ** order(beta)
    amp = 2.0 ** (-j * grid.dimension)
    return sign * amp * window * symbol


def build_dual_template(grid, res, beta, J, M_max=384, lattice=None):
    """Build Phi^beta_F and Phi^beta_M from the periodized polynomial window."""
    beta = tuple(beta)
    if lattice is None:
        lattice = OmegaLattice(J, M_max)
    mult_F = dual_multiplier(grid, res, lattice, beta, 0)
    # the M-branch reference template is the level-1 object scaled back:
    # phi^0(xi) Omega(xi) itself (no dilation, no amplitude factor)
    cut = _axis_cutoff(res)
    if grid.dimension == 1:
        symbol = lattice.symbol(beta[0], grid.freq_axis)
        window = cut(grid.freq_axis) - cut(2.0 * grid.freq_axis)
    else:
        s0 = lattice.symbol(beta[0], grid.freq_axis)
        s1 = lattice.symbol(beta[1], grid.freq_axis)
        symbol = s0[:, None] * s1[None, :]
        c0 = cut(grid.freq_axis)
        c2 = cut(2.0 * grid.freq_axis)
        window = c0[:, None] * c0[None, :] - c2[:, None] * c2[None, :]
    sign = (-1.0) ** order(beta)
    raw_F = dft_inverse(FrequencyField(grid, mult_F))
    raw_M = dft_inverse(FrequencyField(grid, sign * window * symbol))
    imag_F = raw_F.max_imag()
    imag_M = raw_M.max_imag()
    sup_F = max(raw_F.max_abs(), 1e-300)
    sup_M = max(raw_M.max_abs(), 1e-300)
    if imag_F > 1e-10 * sup_F or imag_M > 1e-10 * sup_M:
        raise ArithmeticError(
            f"dual template beta={beta}: imaginary part above realness tolerance"
        )
    phi_F = raw_F.real_part()
    phi_M = raw_M.real_part()
    return DualTemplate(
        grid=grid,
        beta=beta,
        phi_F=phi_F,
        phi_M=phi_M,
        omega_truncation=M_max,
        max_imag_F=imag_F,
        max_imag_M=imag_M,
        tail_radius_F=_tail_radius(phi_F),
        tail_radius_M=_tail_radius(phi_M),
        bulk_radius_F=_tail_radius(phi_F, rel=1e-3),
        bulk_radius_M=_tail_radius(phi_M, rel=1e-3),
    )


def _tail_radius(field, rel=1e-12):
    """Smallest r with |field| <= rel * sup outside the max-norm ball of radius r."""
    g = field.grid
    mag = np.abs(field.values)
    peak = mag.max()
    if peak == 0.0:
        return 0.0
    sup_axis = np.abs(g.axis)
    if g.dimension == 1:
        radius_mesh = sup_axis
    else:
        radius_mesh = np.maximum(sup_axis[:, None], sup_axis[None, :])
    significant = mag > rel * peak
    return float(radius_mesh[significant].max()) if significant.any() else 0.0


def build_quark_system(grid, res, beta_max=4, M_max=None, kappa=0.0, stretch=1.0):
    """Build bump + all duals with |beta| <= beta_max.

    The lattice cut M_max applies per axis (the window is a tensor product,
    so the lattice sums factor); 384 keeps the outermost shell below the
    1e-12 relative tail tolerance with commodity cost.
    """
    if M_max is None:
        M_max = 384
    template = build_base_bump(grid, stretch=stretch)
    lattice = OmegaLattice(template.J, M_max)
    duals = {}
    for beta in multi_indices(grid.dimension, beta_max):
        duals[beta] = build_dual_template(
            grid, res, beta, template.J, M_max=M_max, lattice=lattice
        )
    return QuarkSystem(
        template=template,
        res=res,
        duals=duals,
        beta_max=beta_max,
        m_lattice_cut=M_max,
        kappa=kappa,
        lattice=lattice,
    )


def dual_eval(system, beta, j, m):
    """Phi^beta_{j,m}: F-branch translate at j = 0, dilated M-branch for j >= 1.

    The translate is a torus roll of the exact level template.  The guard
    rejects placements whose bulk (1e-3 level set) leaves the box: Gevrey
    tails never reach 1e-12 inside a desk-scale box, so the literal
    full-tail condition is unattainable and the bulk is what is protected.
    """
    if j < 0 or j > system.j_max:
        raise IndexOutOfRange(f"level {j} outside 0..{system.j_max}")
    d = system.dual_template(beta)
    g = system.grid
    if np.isscalar(m):
        m = (m,)
    half = g.box_side / 2.0
    r = (d.bulk_radius_F if j == 0 else d.bulk_radius_M) / 2.0 ** j
    for c in m:
        center = c / 2.0 ** j
        if abs(center) + r > half:
            raise TailOverflow(
                f"dual bulk at (beta={beta}, j={j}, m={m}) leaves the box"
            )
    template = system.dual_level_template(beta, j)
    cell = g.points_per_axis / (g.box_side * 2.0 ** j)
    if abs(cell - round(cell)) > 1e-9:
        raise IndexOutOfRange("level lattice is not grid-commensurate")
    cell = int(round(cell))
    shift = tuple(int(c) * cell for c in m)
    return SampledField(g, np.roll(template.values, shift, axis=tuple(range(g.dimension))))


def moment(field, gamma):
    """integral of x^gamma * field."""
    g = field.grid
    vals = field.values
    for ax, c in enumerate(gamma):
        if c:
            vals = vals * g.mesh[ax] ** c
    return complex(vals.sum() * g.spacing ** g.dimension)


def verify_decay(system, kappa_list=(0.0, 1.0, 3.0), N=6, alpha_orders=(0, 1, 2)):
    """Measured decay constants of both systems across the beta ladder.

    For each kappa the dual table reports
        C(beta, kappa) = sup_x |Phi^beta(x)| * 2^(kappa |beta|) * (1 + |x|)^N
    (the smallest constant verifying the polynomial-decay bound at that
    kappa) plus the least-squares slope of log2 C against |beta|.  The quark
    side reports sup |2^(kappa |beta|) D^alpha k^beta| for kappa < epsilon.
    """
    g = system.grid
    sup_axis = np.abs(g.axis)
    if g.dimension == 1:
        radius = sup_axis
    else:
        radius = np.sqrt(sup_axis[:, None] ** 2 + sup_axis[None, :] ** 2)
    decay_weight = (1.0 + radius) ** N

    betas = system.betas()
    orders = sorted({order(b) for b in betas})
    dual_table = {}
    weighted_sup = {}
    for beta in betas:
        d = system.dual_template(beta)
        wsup = max(
            float(np.max(np.abs(d.phi_F.values) * decay_weight)),
            float(np.max(np.abs(d.phi_M.values) * decay_weight)),
        )
        weighted_sup[beta] = wsup
    for kappa in kappa_list:
        per_order = {}
        for beta in betas:
            b = order(beta)
            c = weighted_sup[beta] * 2.0 ** (kappa * b)
            per_order[b] = max(per_order.get(b, 0.0), c)
        fit_orders = [b for b in orders if 1 <= b]
        slope = (
            fitted_slope(fit_orders, [math.log2(per_order[b]) for b in fit_orders])
            if len(fit_orders) >= 2
            else 0.0
        )
        dual_table[kappa] = {
            "constants_by_order": {str(b): per_order[b] for b in orders},
            "max_constant": max(per_order.values()),
            "log2_slope": slope,
            "passes": slope <= 0.0,
        }

    quark_kappa = system.epsilon / 2.0
    quark_rows = {}
    for beta in betas:
        tmpl = system.quark_template(beta)
        worst = 0.0
        for a in alpha_orders:
            for alpha in multi_indices(g.dimension, a):
                if order(alpha) != a:
                    continue
                dv = spectral_derivative(tmpl, alpha)
                worst = max(worst, dv.max_abs() * 2.0 ** (quark_kappa * order(beta)))
        b = order(beta)
        quark_rows[b] = max(quark_rows.get(b, 0.0), worst)
    fit_orders = [b for b in orders if b >= 1]
    quark_slope = (
        fitted_slope(fit_orders, [math.log2(quark_rows[b]) for b in fit_orders])
        if len(fit_orders) >= 2
        else 0.0
    )
    return {
        "N": N,
        "dual": {str(k): v for k, v in dual_table.items()},
        "quark": {
            "kappa": quark_kappa,
            "constants_by_order": {str(b): quark_rows[b] for b in sorted(quark_rows)},
            "log2_slope": quark_slope,
            "passes": quark_slope <= 0.0,
        },
    }


def system_manifest_json(system):
    return json.dumps(system.manifest(), indent=2, sort_keys=True)
