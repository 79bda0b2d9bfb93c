"""Sparse multi-indexed coefficient tensors and every sequence-space quasi-norm.

A CoefficientTensor stores, per (beta, level), a dense window of lattice
coefficients.  The same container carries quark coefficients (beta = a
multi-index), wavelet coefficients (beta = a gender word over {F=0, M=1})
and domain-restricted coefficients; the SequenceSpec says which quasi-norm
applies and FlavorMismatch guards the pairing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ComplexInput, FlavorMismatch, SpecInvalid
from .littlewood import SpaceSpec, spec_dict
from .utils import order

_DROP = 1e-300  # denormal guard on insertion

FLAVORS = ("plain", "quark", "wavelet", "domain")


class CoefficientTensor:
    """Map (beta, j, m) -> complex, dense per (beta, j) window."""

    def __init__(self, dimension, indexing="quark"):
        if indexing not in ("quark", "wavelet"):
            raise ValueError("indexing must be 'quark' or 'wavelet'")
        self.dimension = dimension
        self.indexing = indexing
        self._slabs = {}  # (beta, j) -> (offset tuple, ndarray)

    # -- construction -----------------------------------------------------
    def set_slab(self, beta, j, offset, values):
        beta = tuple(int(b) for b in beta)
        values = np.asarray(values, dtype=complex)
        if values.ndim != self.dimension:
            raise ValueError("slab dimensionality mismatch")
        values = np.where(np.abs(values) < _DROP, 0.0, values)
        offset = tuple(int(o) for o in (offset if not np.isscalar(offset) else (offset,)))
        self._slabs[(beta, int(j))] = (offset, values)

    def add_entry(self, beta, j, m, value):
        beta = tuple(int(b) for b in beta)
        m = tuple(int(v) for v in (m if not np.isscalar(m) else (m,)))
        key = (beta, int(j))
        if key not in self._slabs:
            self._slabs[key] = (m, np.zeros((1,) * self.dimension, dtype=complex))
        off, vals = self._slabs[key]
        lo = [min(o, mm) for o, mm in zip(off, m)]
        hi = [max(o + s - 1, mm) for o, s, mm in zip(off, vals.shape, m)]
        shape = tuple(h - l + 1 for l, h in zip(lo, hi))
        if shape != vals.shape or tuple(lo) != off:
            grown = np.zeros(shape, dtype=complex)
            sl = tuple(slice(o - l, o - l + s) for o, l, s in zip(off, lo, vals.shape))
            grown[sl] = vals
            vals = grown
            off = tuple(lo)
        idx = tuple(mm - l for mm, l in zip(m, off))
        vals[idx] += value
        self._slabs[(beta, int(j))] = (off, vals)

    # -- access ------------------------------------------------------------
    def slabs(self):
        return self._slabs.items()

    def betas(self):
        return sorted({b for (b, _) in self._slabs})

    def levels(self, beta=None):
        return sorted({j for (b, j) in self._slabs if beta is None or b == tuple(beta)})

    def slab(self, beta, j):
        return self._slabs.get((tuple(beta), int(j)))

    def get(self, beta, j, m):
        entry = self._slabs.get((tuple(beta), int(j)))
        if entry is None:
            return 0.0 + 0.0j
        off, vals = entry
        m = tuple(int(v) for v in (m if not np.isscalar(m) else (m,)))
        idx = tuple(mm - o for mm, o in zip(m, off))
        if any(i < 0 or i >= s for i, s in zip(idx, vals.shape)):
            return 0.0 + 0.0j
        return complex(vals[idx])

    def nnz(self):
        return int(sum(np.count_nonzero(v) for _, (_, v) in self._slabs.items()))

    def max_abs(self):
        vals = [np.max(np.abs(v)) for _, (_, v) in self._slabs.items() if v.size]
        return float(max(vals)) if vals else 0.0

    def entries(self):
        """Iterate nonzero (beta, j, m, value)."""
        for (beta, j), (off, vals) in sorted(self._slabs.items()):
            nz = np.nonzero(vals)
            for idx in zip(*nz):
                m = tuple(int(o + i) for o, i in zip(off, idx))
                yield beta, j, m, complex(vals[idx])

    # -- algebra -----------------------------------------------------------
    def copy(self):
        out = CoefficientTensor(self.dimension, self.indexing)
        for key, (off, vals) in self._slabs.items():
            out._slabs[key] = (off, vals.copy())
        return out

    def scaled(self, factor):
        out = self.copy()
        for key in out._slabs:
            off, vals = out._slabs[key]
            out._slabs[key] = (off, vals * factor)
        return out

    def combined(self, other, weight=1.0):
        """self + weight * other (window union)."""
        if other.dimension != self.dimension or other.indexing != self.indexing:
            raise FlavorMismatch("tensor layouts differ")
        out = self.copy()
        for (beta, j), (off, vals) in other._slabs.items():
            nz = np.abs(vals) > 0
            if not nz.any():
                continue
            mine = out._slabs.get((beta, j))
            if mine is None:
                out._slabs[(beta, j)] = (off, weight * vals.copy())
                continue
            # grow my window to the union, then add
            ooff, ovals = mine
            lo = [min(a, b) for a, b in zip(ooff, off)]
            hi = [
                max(a + s - 1, b + t - 1)
                for a, s, b, t in zip(ooff, ovals.shape, off, vals.shape)
            ]
            shape = tuple(h - l + 1 for l, h in zip(lo, hi))
            grown = np.zeros(shape, dtype=complex)
            sl = tuple(slice(a - l, a - l + s) for a, l, s in zip(ooff, lo, ovals.shape))
            grown[sl] = ovals
            sl2 = tuple(slice(b - l, b - l + t) for b, l, t in zip(off, lo, vals.shape))
            grown[sl2] += weight * vals
            out._slabs[(beta, j)] = (tuple(lo), grown)
        return out

    # -- serialization -----------------------------------------------------
    def to_jsonl(self):
        lines = []
        for beta, j, m, v in self.entries():
            lines.append(
                json.dumps(
                    {"beta": list(beta), "j": j, "m": list(m), "re": v.real, "im": v.imag},
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text, dimension, indexing="quark"):
        out = cls(dimension, indexing)
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            out.add_entry(tuple(d["beta"]), d["j"], tuple(d["m"]), d["re"] + 1j * d["im"])
        return out


@dataclass(frozen=True)
class SequenceSpec:
    """SpaceSpec plus indexing flavor (and grid/cover context where needed)."""

    space: SpaceSpec
    flavor: str = "quark"
    grid: object = None
    cover: object = None
    beta_aggregate: object = "sup"  # "sup" or a finite r > 0 (ell_r over beta)

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise SpecInvalid(f"unknown flavor {self.flavor!r}")
        if self.flavor == "domain" and self.cover is None:
            raise SpecInvalid("domain flavor needs a WhitneyCover")
        if self.beta_aggregate != "sup" and not (
            isinstance(self.beta_aggregate, (int, float)) and self.beta_aggregate > 0
        ):
            raise SpecInvalid("beta_aggregate must be 'sup' or a positive number")


def positivity_split(tensor, rel_tol=1e-10):
    """Split real coefficients at zero: returns (positive part, negative part)."""
    plus = CoefficientTensor(tensor.dimension, tensor.indexing)
    minus = CoefficientTensor(tensor.dimension, tensor.indexing)
    for (beta, j), (off, vals) in tensor.slabs():
        bad = np.abs(vals.imag) > rel_tol * np.abs(vals)
        if bad.any():
            raise ComplexInput("tensor has genuinely complex entries")
        re = vals.real
        plus._slabs[(beta, j)] = (off, np.maximum(re, 0.0).astype(complex))
        minus._slabs[(beta, j)] = (off, np.maximum(-re, 0.0).astype(complex))
    return plus, minus


# ---------------------------------------------------------------------------
# Quasi-norm evaluation


def _lattice_weight(offset, shape, j, delta, dimension):
    """w_delta(2^-j m) over the slab window."""
    if delta == 0.0:
        return 1.0
    axes = [np.arange(o, o + s) * 2.0 ** (-j) for o, s in zip(offset, shape)]
    if dimension == 1:
        sq = axes[0] ** 2
    else:
        sq = axes[0][:, None] ** 2 + axes[1][None, :] ** 2
    return (1.0 + sq) ** (delta / 2.0)


def _inner_b(slabs_for_beta, space, dimension):
    """( sum_j 2^{j(s-n/p)q} ( sum_m w^p |lam|^p )^{q/p} )^{1/q} for one beta group."""
    s, p, q, delta = space.s, space.p, space.q, space.delta
    n = dimension
    rows = []
    for j, off, vals in slabs_for_beta:
        mag = np.abs(vals)
        if not mag.any():
            rows.append((j, 0.0))
            continue
        w = _lattice_weight(off, vals.shape, j, delta, n)
        wm = mag * w
        if math.isinf(p):
            inner = float(wm.max())
        else:
            inner = float(np.sum(wm ** p) ** (1.0 / p))
        rows.append((j, inner))
    terms = [2.0 ** (j * (s - n / p if not math.isinf(p) else s)) * v for j, v in rows]
    if math.isinf(q):
        return max(terms) if terms else 0.0
    return float(np.sum(np.array(terms) ** q) ** (1.0 / q)) if terms else 0.0


def _inner_f(slab_groups, space, grid, domain_mask=None):
    """f-flavor: pointwise ell_q over (j,m[,G]) through cube indicators, then L_p.

    slab_groups: iterable of (j, offset, values); contributions are painted
    onto the grid because a level-j cell covers exactly N/(L 2^j) grid
    points per axis.
    """
    s, p, q, delta = space.s, space.p, space.q, space.delta
    g = grid
    n = g.dimension
    N = g.points_per_axis
    acc = np.zeros(g.shape)
    use_sup = math.isinf(q)
    for j, off, vals in slab_groups:
        cell = N / (g.box_side * 2.0 ** j)
        if abs(cell - round(cell)) > 1e-9 or cell < 1:
            raise SpecInvalid("level too fine for exact cube tiling on this grid")
        cell = int(round(cell))
        mag = np.abs(vals)
        if not mag.any():
            continue
        w = _lattice_weight(off, vals.shape, j, delta, n)
        contrib = (2.0 ** (j * s) * w * mag)
        if not use_sup:
            contrib = contrib ** q
        # paint each lattice cell onto its grid points
        painted = np.repeat(contrib, cell, axis=0)
        if n == 2:
            painted = np.repeat(painted, cell, axis=1)
        # grid index of lattice point m = off: x = 2^-j m -> i = N/2 + m*cell
        start = [N // 2 + o * cell for o in off]
        sl = []
        src = []
        for ax, st in enumerate(start):
            length = painted.shape[ax]
            lo = max(st, 0)
            hi = min(st + length, N)
            if lo >= hi:
                sl = None
                break
            sl.append(slice(lo, hi))
            src.append(slice(lo - st, hi - st))
        if sl is None:
            continue
        if use_sup:
            region = acc[tuple(sl)]
            np.maximum(region, painted[tuple(src)], out=region)
        else:
            acc[tuple(sl)] += painted[tuple(src)]
    inner = acc if use_sup else acc ** (1.0 / q)
    if domain_mask is not None:
        inner = inner * domain_mask
    if math.isinf(p):
        return float(inner.max())
    return float((np.sum(inner ** p) * g.spacing ** n) ** (1.0 / p))


def sequence_norm(tensor, sspec):
    return sequence_norm_record(tensor, sspec)["value"]


def sequence_norm_record(tensor, sspec):
    """Quasi-norm with the beta (or gender) bookkeeping reported."""
    space = sspec.space
    flavor = sspec.flavor
    if flavor == "wavelet":
        if tensor.indexing != "wavelet":
            raise FlavorMismatch("wavelet flavor needs wavelet-indexed tensor")
    elif tensor.indexing != "quark":
        raise FlavorMismatch(f"{flavor} flavor needs quark-indexed tensor")

    n = tensor.dimension
    record = {"spec": spec_dict(space), "flavor": flavor}

    by_beta = {}
    for (beta, j), (off, vals) in tensor.slabs():
        by_beta.setdefault(beta, []).append((j, off, vals))

    if flavor == "plain":
        if len(by_beta) > 1:
            raise FlavorMismatch("plain flavor admits a single beta slice")
        group = next(iter(by_beta.values()), [])
        if _use_f_path(space, flavor):
            value = _inner_f(group, space, _need_grid(sspec))
        else:
            value = _inner_b(group, space, n)
        record.update({"value": value, "beta_argmax": None})
        return record

    if flavor == "wavelet":
        # genders are summed (b-flavor) or pooled (f-flavor), never sup'ed
        if _use_f_path(space, flavor):
            group = [item for items in by_beta.values() for item in items]
            value = _inner_f(group, space, _need_grid(sspec))
        else:
            s, p, q = space.s, space.p, space.q
            levels = sorted({j for items in by_beta.values() for (j, _, _) in items})
            terms = []
            for j in levels:
                tot = 0.0
                vals_j = []
                for beta, items in by_beta.items():
                    for jj, off, vals in items:
                        if jj != j:
                            continue
                        mag = np.abs(vals)
                        w = _lattice_weight(off, vals.shape, j, space.delta, n)
                        wm = mag * w
                        if math.isinf(p):
                            vals_j.append(float(wm.max()))
                        else:
                            vals_j.append(float(np.sum(wm ** p)))
                if math.isinf(p):
                    inner_pows = vals_j  # sup over m per gender
                    per_gender = inner_pows
                else:
                    per_gender = [v ** (1.0 / p) for v in vals_j]
                lvl_weight = 2.0 ** (j * (s - (0 if math.isinf(p) else n / p)))
                if math.isinf(q):
                    tot = lvl_weight * max(per_gender) if per_gender else 0.0
                    terms.append(tot)
                else:
                    tot = lvl_weight ** q * sum(v ** q for v in per_gender)
                    terms.append(tot)
            if math.isinf(q):
                value = max(terms) if terms else 0.0
            else:
                value = float(sum(terms) ** (1.0 / q)) if terms else 0.0
        record.update({"value": value, "beta_argmax": None})
        return record

    # quark / domain flavor: weight 2^{kappa |beta|}, sup (or ell_r) over beta
    kappa = space.kappa
    domain_mask = None
    grid = None
    if flavor == "domain":
        cover = sspec.cover
        grid = cover.domain.grid
        domain_mask = cover.domain.grid_mask().astype(float)
        _check_domain_indices(tensor, cover)
    per_beta = {}
    for beta, group in by_beta.items():
        if _use_f_path(space, flavor):
            inner = _inner_f(group, space, grid or _need_grid(sspec), domain_mask)
        else:
            inner = _inner_b(group, space, n)
        per_beta[beta] = 2.0 ** (kappa * order(beta)) * inner

    if not per_beta:
        record.update({"value": 0.0, "beta_argmax": None})
        return record
    if sspec.beta_aggregate == "sup":
        arg = max(per_beta, key=lambda b: per_beta[b])
        value = per_beta[arg]
        record.update({"value": float(value), "beta_argmax": list(arg)})
    else:
        r = float(sspec.beta_aggregate)
        value = float(np.sum(np.array(list(per_beta.values())) ** r) ** (1.0 / r))
        record.update({"value": value, "beta_argmax": None})
    return record


def _use_f_path(space, flavor):
    if flavor == "domain":
        # domain norms live in the F-scale; p = inf is the sup variant
        return not math.isinf(space.p) or not math.isinf(space.q)
    if space.family != "F":
        return False
    return not (math.isinf(space.p) and math.isinf(space.q))


def _need_grid(sspec):
    if sspec.grid is None:
        raise SpecInvalid("f-flavor sequence norms need the grid in the SequenceSpec")
    return sspec.grid


def _check_domain_indices(tensor, cover):
    from .errors import IndexNotInDomain

    index = cover.index_membership()
    for (beta, j), (off, vals) in tensor.slabs():
        nz = np.nonzero(vals)
        for idx in zip(*nz):
            m = tuple(int(o + i) for o, i in zip(off, idx))
            if not index(j, m):
                raise IndexNotInDomain(f"(j={j}, m={m}) outside the domain index set")
