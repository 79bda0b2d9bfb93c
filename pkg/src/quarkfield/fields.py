"""Uniform-grid fields on the periodic box [-L/2, L/2)^n with spectral ops.

The box emulates R^n for compactly supported functions: everything the
toolkit builds lives well inside the box, so periodization artifacts stay
at round-off level.  Forward/inverse transforms use the symmetric
(2*pi)^(-n/2) normalization throughout.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridMismatch, SupportOverflow

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: n in {1,2}, box side L, N = 2**grid_exp points per axis."""

    dimension: int
    box_side: float
    grid_exp: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.grid_exp < 6:
            raise ValueError("need at least 2**6 points per axis")
        if self.box_side <= 0:
            raise ValueError("box side must be positive")

    @property
    def n(self):
        return self.dimension

    @property
    def points_per_axis(self):
        return 1 << self.grid_exp

    @property
    def spacing(self):
        return self.box_side / self.points_per_axis

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dimension

    @property
    def size(self):
        return self.points_per_axis ** self.dimension

    @property
    def nyquist(self):
        return np.pi / self.spacing

    @property
    def max_level(self):
        """Largest dyadic level j with 1.5 * 2**(j+1) below Nyquist."""
        j = 0
        while 1.5 * 2.0 ** (j + 2) < self.nyquist:
            j += 1
        return j

    @cached_property
    def axis(self):
        N = self.points_per_axis
        return (np.arange(N) - N // 2) * self.spacing

    @cached_property
    def mesh(self):
        if self.dimension == 1:
            return (self.axis,)
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    @cached_property
    def freq_axis(self):
        N = self.points_per_axis
        return np.fft.fftfreq(N, d=1.0 / N) * (_TWO_PI / self.box_side)

    @cached_property
    def freq_mesh(self):
        if self.dimension == 1:
            return (self.freq_axis,)
        return np.meshgrid(self.freq_axis, self.freq_axis, indexing="ij")

    @cached_property
    def _center_phase(self):
        # e^{+i pi k} per axis compensates the box being centered at 0.
        N = self.points_per_axis
        sign = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
        if self.dimension == 1:
            return sign
        return np.outer(sign, sign)


class SampledField:
    """Complex values sampled on a GridSpec; immutable after construction."""

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != grid.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, *_):
        raise AttributeError("SampledField is immutable")

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, fn(*grid.mesh))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def max_imag(self):
        return float(np.max(np.abs(self.values.imag)))

    def is_effectively_real(self, tol=1e-12):
        m = self.max_abs()
        return m == 0.0 or self.max_imag() <= tol * m

    def real_part(self):
        return SampledField(self.grid, self.values.real)

    def __add__(self, other):
        _same_grid(self, other)
        return SampledField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return SampledField(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, SampledField):
            _same_grid(self, other)
            return SampledField(self.grid, self.values * other.values)
        return SampledField(self.grid, self.values * other)

    __rmul__ = __mul__

    def support_bounds(self, rel_tol=0.0):
        """Per-axis closed index ranges of the (essential) support; None if zero."""
        mag = np.abs(self.values)
        peak = mag.max()
        if peak == 0.0:
            return None
        mask = mag > rel_tol * peak if rel_tol > 0 else mag > 0
        if not mask.any():
            return None
        bounds = []
        for ax in range(self.grid.dimension):
            other = tuple(a for a in range(self.grid.dimension) if a != ax)
            line = mask.any(axis=other) if other else mask
            idx = np.nonzero(line)[0]
            bounds.append((int(idx[0]), int(idx[-1])))
        return bounds


class FrequencyField:
    """DFT coefficients on the grid's frequency lattice (numpy fft ordering)."""

    __slots__ = ("grid", "coefficients")

    def __init__(self, grid, coefficients):
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.shape != grid.shape:
            raise ValueError("coefficient shape mismatch")
        coefficients = coefficients.copy()
        coefficients.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "coefficients", coefficients)

    def __setattr__(self, *_):
        raise AttributeError("FrequencyField is immutable")


def _same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatch("fields live on different grids")


def dft_forward(field):
    """Discrete surrogate of the (2*pi)^(-n/2)-normalized Fourier transform."""
    g = field.grid
    scale = (_TWO_PI) ** (-g.dimension / 2.0) * g.spacing ** g.dimension
    coeffs = scale * g._center_phase * np.fft.fftn(field.values)
    return FrequencyField(g, coeffs)


def dft_inverse(freq):
    """Inverse of dft_forward (exact round trip up to round-off)."""
    g = freq.grid
    dxi = _TWO_PI / g.box_side
    scale = (_TWO_PI) ** (-g.dimension / 2.0) * dxi ** g.dimension * g.size
    values = scale * np.fft.ifftn(g._center_phase * freq.coefficients)
    return SampledField(g, values)


def quadrature_integral(field):
    """Rectangle rule h^n * sum(values); spectrally accurate for smooth periodic data."""
    g = field.grid
    return complex(field.values.sum() * g.spacing ** g.dimension)


def pairing(f, g):
    """Bilinear distribution pairing (f, g) = integral of f*g (no conjugation)."""
    _same_grid(f, g)
    return complex((f.values * g.values).sum() * f.grid.spacing ** f.grid.dimension)


def norm_l2(field):
    g = field.grid
    return float(np.sqrt(np.sum(np.abs(field.values) ** 2) * g.spacing ** g.dimension))


def norm_lp(field, p):
    """Grid L_p quasi-norm; p = inf gives the grid supremum."""
    g = field.grid
    mag = np.abs(field.values)
    if np.isinf(p):
        return float(mag.max())
    return float((np.sum(mag ** p) * g.spacing ** g.dimension) ** (1.0 / p))


def _fractional_shift(values, grid, shifts):
    """Band-limited translate by `shifts` (in grid-spacing units) per axis."""
    spec = np.fft.fftn(values)
    N = grid.points_per_axis
    base = np.fft.fftfreq(N, d=1.0 / N)  # integer frequencies
    for ax, s in enumerate(shifts):
        if s == 0.0:
            continue
        phase = np.exp(2j * np.pi * base * s / N)
        shape = [1] * grid.dimension
        shape[ax] = N
        spec = spec * phase.reshape(shape)
    return np.fft.ifftn(spec)


def dilate_translate_sample(template, j, m):
    """Sample template(2**j * x - m) on template's grid, zero outside the box.

    Integer-commensurate translates are exact index gathers; otherwise a
    band-limited (trigonometric) fractional shift is applied first.
    """
    g = template.grid
    n = g.dimension
    if np.isscalar(m):
        m = (m,)
    m = tuple(float(v) for v in m)
    if len(m) != n:
        raise ValueError("translation vector has wrong dimension")
    if j < 0:
        raise ValueError("dyadic level must be nonnegative")
    scale = float(2 ** j)

    bounds = template.support_bounds()
    if bounds is not None:
        half = g.box_side / 2.0
        for ax in range(n):
            lo = g.axis[bounds[ax][0]]
            hi = g.axis[bounds[ax][1]]
            new_lo = (lo + m[ax]) / scale
            new_hi = (hi + m[ax]) / scale
            if new_lo < -half - 1e-12 or new_hi > half - 1e-12:
                raise SupportOverflow(
                    f"translated support [{new_lo:.3f}, {new_hi:.3f}] leaves the box"
                )

    N = g.points_per_axis
    h = g.spacing
    idx_axes = []
    frac_axes = []
    for ax in range(n):
        # y = 2^j x_i - m_ax maps to template index 2^j i - (2^j - 1) N/2 - m/h
        offset = -(scale - 1.0) * (N // 2) - m[ax] / h
        raw = scale * np.arange(N) + offset
        # the integer stride 2^j makes the fractional part shared along the axis
        frac = ((raw[0] + 0.5) % 1.0) - 0.5
        if abs(frac) <= 1e-9:
            frac = 0.0
        frac_axes.append(frac)
        idx_axes.append(np.rint(raw - frac).astype(np.int64))

    values = template.values
    if any(f != 0.0 for f in frac_axes):
        values = _fractional_shift(values, g, frac_axes)

    out = np.zeros(g.shape, dtype=complex)
    valid_axes = [(idx >= 0) & (idx < N) for idx in idx_axes]
    clipped = [np.clip(idx, 0, N - 1) for idx in idx_axes]
    if n == 1:
        out[valid_axes[0]] = values[clipped[0][valid_axes[0]]]
    else:
        vmask = np.outer(valid_axes[0], valid_axes[1])
        gathered = values[np.ix_(clipped[0], clipped[1])]
        out[vmask] = gathered[vmask]
    return SampledField(g, out)


def spectral_derivative(field, alpha):
    """D^alpha via multiplication by (i*xi)^alpha in frequency space."""
    g = field.grid
    if np.isscalar(alpha):
        alpha = (alpha,)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != g.dimension:
        raise ValueError("multi-index has wrong dimension")
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative")
    if sum(alpha) > 8:
        raise ValueError("derivative order above the accuracy guard (|alpha| <= 8)")
    if sum(alpha) == 0:
        return field
    spec = np.fft.fftn(field.values)
    for ax, a in enumerate(alpha):
        if a == 0:
            continue
        mult = (1j * g.freq_axis) ** a
        shape = [1] * g.dimension
        shape[ax] = g.points_per_axis
        spec = spec * mult.reshape(shape)
    return SampledField(g, np.fft.ifftn(spec))


# ---------------------------------------------------------------------------
# Serialization: QFLD binary container and CSV export.

_QFLD_MAGIC = b"QFLD"
_QFLD_VERSION = 1


def write_qfld(field, path_or_buf):
    """Write the flat binary container (little-endian)."""
    g = field.grid
    header = _QFLD_MAGIC + struct.pack(
        "<III d", _QFLD_VERSION, g.dimension, g.points_per_axis, g.box_side
    )
    payload = np.empty(g.size * 2, dtype="<f8")
    flat = field.values.reshape(-1)
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    data = header + payload.tobytes()
    if isinstance(path_or_buf, str) or hasattr(path_or_buf, "__fspath__"):
        with open(path_or_buf, "wb") as fh:
            fh.write(data)
    else:
        path_or_buf.write(data)
    return data


def read_qfld(path_or_buf):
    if isinstance(path_or_buf, (bytes, bytearray)):
        data = bytes(path_or_buf)
    elif isinstance(path_or_buf, str) or hasattr(path_or_buf, "__fspath__"):
        with open(path_or_buf, "rb") as fh:
            data = fh.read()
    else:
        data = path_or_buf.read()
    if data[:4] != _QFLD_MAGIC:
        raise ValueError("not a QFLD container")
    version, n, N, L = struct.unpack("<III d", data[4 : 4 + 20])
    if version != _QFLD_VERSION:
        raise ValueError(f"unsupported QFLD version {version}")
    grid = GridSpec(dimension=n, box_side=L, grid_exp=int(np.log2(N)))
    payload = np.frombuffer(data[24:], dtype="<f8")
    flat = payload[0::2] + 1j * payload[1::2]
    return SampledField(grid, flat.reshape(grid.shape))


def export_csv(field, path_or_buf):
    """CSV with index coordinates and re/im columns."""
    g = field.grid
    close = False
    if isinstance(path_or_buf, str) or hasattr(path_or_buf, "__fspath__"):
        fh = open(path_or_buf, "w", encoding="utf-8")
        close = True
    else:
        fh = path_or_buf
    try:
        if g.dimension == 1:
            fh.write("i,x,re,im\n")
            for i, v in enumerate(field.values):
                fh.write(f"{i},{g.axis[i]!r},{v.real!r},{v.imag!r}\n")
        else:
            fh.write("i,j,x,y,re,im\n")
            for i in range(g.points_per_axis):
                for k in range(g.points_per_axis):
                    v = field.values[i, k]
                    fh.write(
                        f"{i},{k},{g.axis[i]!r},{g.axis[k]!r},{v.real!r},{v.imag!r}\n"
                    )
    finally:
        if close:
            fh.close()


def qfld_bytes(field):
    buf = io.BytesIO()
    write_qfld(field, buf)
    return buf.getvalue()
