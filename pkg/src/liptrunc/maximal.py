"""Discrete maximal operators over centered cell windows.

Four operators are provided, all acting on the zero-extended field:

* ``hl_maximal``: cube variant of the Hardy-Littlewood operator, the max over
  admissible half-widths k of the average of ``|v|`` over centered
  ``(2k+1)^d`` cell blocks.
* ``directional_maximal``: the 1D centered-window maximal along one axis.
* ``composed_maximal``: directional operators applied along axes 1..d in
  order; it dominates the box operator pointwise.
* ``aniso_maximal``: the anisotropic box operator, the max over all per-axis
  half-width combinations of the box average.

Averages always divide by the full window cell count; cells outside the grid
contribute zero mass but keep their share of the denominator.  That is the
discrete form of averaging a compactly supported function over a window that
sticks out of its support.

Window sums are evaluated through dyadic block tables: a window sum is a
fixed summation tree over exactly the window's (zero-extended) values.  Two
consequences matter for the exactness guarantees of the test suite, and both
hold in floating point, not just in exact arithmetic:

* identical window contents produce bitwise identical sums, and
* window sums are monotone in the input field.

Together these make the chain inequality (box operator below the composed
directional operators) hold pointwise with zero tolerance for arbitrary
float inputs, and make sublinearity exact whenever the input values keep
the window averages exactly representable.  Large 2D grids switch to a
prefix-sum kernel with the same contract up to roundoff; the exact path
remains the reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .field import GridSpec, ScalarField

__all__ = [
    "RadiusSet",
    "hl_maximal",
    "directional_maximal",
    "composed_maximal",
    "aniso_maximal",
    "weak_type_constants",
    "lp_norm_ratio",
]

# aniso box-combination budget for full mode (number of box evaluations)
DEFAULT_WORK_CAP = 2**31

# switch aniso_maximal to the prefix-sum kernel above this many cells (2D only)
_KERNEL_MIN_CELLS = 384 * 384


@dataclass(frozen=True)
class RadiusSet:
    """Admissible per-axis window half-widths, in units of cells.

    The zero half-width (the one-cell window) is always admissible and is
    implicit: every operator includes it, which is what makes the operators
    dominate ``|v|`` pointwise.
    """

    per_axis: tuple[tuple[int, ...], ...]
    mode: str = "full"

    def __post_init__(self):
        per_axis = tuple(tuple(int(k) for k in ks) for ks in self.per_axis)
        object.__setattr__(self, "per_axis", per_axis)
        if self.mode not in ("full", "dyadic"):
            raise ValueError(f"radius mode must be 'full' or 'dyadic', got {self.mode!r}")
        if not per_axis:
            raise ValueError("radius set needs at least one axis")
        for ks in per_axis:
            if not ks:
                raise ValueError("empty radius set")
            if any(k <= 0 for k in ks):
                raise ValueError("half-widths must be positive (k=0 is implicit)")
            if any(b <= a for a, b in zip(ks, ks[1:])):
                raise ValueError("half-widths must be strictly increasing")

    @classmethod
    def dyadic(cls, spec: GridSpec) -> "RadiusSet":
        """Half-widths 1, 2, 4, ... up to the grid extent per axis."""
        per_axis = []
        for n in spec.sizes:
            ks = []
            k = 1
            while k < n:
                ks.append(k)
                k *= 2
            per_axis.append(tuple(ks))
        return cls(tuple(per_axis), mode="dyadic")

    @classmethod
    def full(cls, spec: GridSpec) -> "RadiusSet":
        """Every half-width 1 .. n_i - 1 per axis."""
        return cls(tuple(tuple(range(1, n)) for n in spec.sizes), mode="full")

    def validate_for(self, spec: GridSpec) -> None:
        if len(self.per_axis) != spec.dim:
            raise ValueError(
                f"radius set has {len(self.per_axis)} axes, grid has {spec.dim}"
            )
        for ks, n in zip(self.per_axis, spec.sizes):
            if ks[-1] > n:
                raise ValueError(
                    f"largest half-width {ks[-1]} exceeds grid extent {n}"
                )

    def merged(self) -> tuple[int, ...]:
        """Sorted union of all per-axis half-widths (used by the cube operator)."""
        out: set[int] = set()
        for ks in self.per_axis:
            out.update(ks)
        return tuple(sorted(out))


# ---------------------------------------------------------------------------
# window sums via dyadic block tables
# ---------------------------------------------------------------------------


def _block_tables(padded: np.ndarray, max_block: int) -> list[np.ndarray]:
    """Tables of consecutive block sums along the last axis.

    tables[j][..., s] = sum of padded[..., s : s + 2**j].  Each entry is a
    fixed summation tree over its block, so equal blocks sum to equal floats
    and the sums are monotone in the inputs.
    """
    tables = [padded]
    block = 1
    while 2 * block <= max_block:
        prev = tables[-1]
        tables.append(prev[..., : prev.shape[-1] - block] + prev[..., block:])
        block *= 2
    return tables


def _window_sum_last(tables: list[np.ndarray], start_offset: int, length: int,
                     out_len: int) -> np.ndarray:
    """Sum over windows of ``length`` cells starting at ``start_offset + i``."""
    acc = None
    pos = start_offset
    remaining = length
    level = len(tables) - 1
    while remaining > 0:
        block = 1 << level
        if block <= remaining:
            piece = tables[level][..., pos : pos + out_len]
            acc = piece if acc is None else acc + piece
            pos += block
            remaining -= block
        else:
            level -= 1
    return acc


class _AxisWindows:
    """Window averages of one array along one axis, sharing block tables."""

    def __init__(self, values: np.ndarray, axis: int, max_k: int):
        self.axis = axis
        moved = np.moveaxis(values, axis, -1)
        n = moved.shape[-1]
        self.n = n
        pad = [(0, 0)] * moved.ndim
        pad[-1] = (max_k, max_k)
        padded = np.pad(moved, pad)
        self.max_k = max_k
        self.tables = _block_tables(padded, 2 * max_k + 1)

    def average(self, k: int) -> np.ndarray:
        """Centered window average with half-width k, original axis order."""
        if k == 0:
            moved = self.tables[0][..., self.max_k : self.max_k + self.n]
        else:
            length = 2 * k + 1
            moved = _window_sum_last(
                self.tables, self.max_k - k, length, self.n
            ) / float(length)
        return np.moveaxis(moved, -1, self.axis)

    def sum(self, k: int) -> np.ndarray:
        if k == 0:
            moved = self.tables[0][..., self.max_k : self.max_k + self.n]
            return np.moveaxis(moved, -1, self.axis).copy()
        moved = _window_sum_last(self.tables, self.max_k - k, 2 * k + 1, self.n)
        return np.moveaxis(moved, -1, self.axis)


def directional_maximal(v: ScalarField, axis: int, radii: RadiusSet) -> ScalarField:
    """1D centered-window maximal of ``|v|`` along one axis."""
    if not 0 <= axis < v.spec.dim:
        raise ValueError(f"axis {axis} out of range for dimension {v.spec.dim}")
    radii.validate_for(v.spec)
    ks = radii.per_axis[axis]
    a = np.abs(v.values)
    win = _AxisWindows(a, axis, ks[-1])
    out = a.copy()
    for k in ks:
        np.maximum(out, win.average(k), out=out)
    return ScalarField(v.spec, out)


def composed_maximal(v: ScalarField, radii: RadiusSet) -> ScalarField:
    """Directional maximal operators composed along axes 1..d in order."""
    radii.validate_for(v.spec)
    out = v
    for axis in range(v.spec.dim):
        out = directional_maximal(out, axis, radii)
    return out


def hl_maximal(v: ScalarField, radii: RadiusSet) -> ScalarField:
    """Cube maximal: max over half-widths of centered (2k+1)^d block averages.

    The half-width list is the union of the per-axis lists, so on square
    grids it coincides with the per-axis list.
    """
    radii.validate_for(v.spec)
    ks = radii.merged()
    if not ks:
        raise ValueError("empty radius set")
    a = np.abs(v.values)
    d = v.spec.dim
    out = a.copy()
    for k in ks:
        block = a
        for axis in range(d):
            win = _AxisWindows(block, axis, k)
            block = win.sum(k)
        np.maximum(out, block / float((2 * k + 1) ** d), out=out)
    return ScalarField(v.spec, out)


def aniso_maximal(v: ScalarField, radii: RadiusSet,
                  work_cap: int = DEFAULT_WORK_CAP) -> ScalarField:
    """Anisotropic box maximal: max over per-axis half-width combinations.

    Candidates are nested per-axis window averages, evaluated axis by axis;
    with a shared radius set each candidate is dominated by the composed
    directional operators, pointwise and in floating point.  Refuses radius
    sets whose box-evaluation count exceeds ``work_cap``; switch to dyadic
    radii instead.
    """
    radii.validate_for(v.spec)
    combos = v.spec.num_cells
    for ks in radii.per_axis:
        combos *= len(ks) + 1
    if combos > work_cap:
        raise ValueError(
            f"aniso_maximal work {combos} exceeds cap {work_cap}; "
            "use dyadic radii"
        )
    a = np.abs(v.values)
    if v.spec.dim == 2 and v.spec.num_cells >= _KERNEL_MIN_CELLS:
        ks0 = np.array((0,) + radii.per_axis[0], dtype=np.int64)
        ks1 = np.array((0,) + radii.per_axis[1], dtype=np.int64)
        return ScalarField(v.spec, _aniso2d_kernel(a, ks0, ks1))
    out = np.zeros_like(a)
    _aniso_recurse(a, 0, radii, out)
    return ScalarField(v.spec, out)


def _aniso_recurse(stage: np.ndarray, axis: int, radii: RadiusSet,
                   out: np.ndarray) -> None:
    if axis == stage.ndim:
        np.maximum(out, stage, out=out)
        return
    ks = radii.per_axis[axis]
    win = _AxisWindows(stage, axis, ks[-1])
    _aniso_recurse(stage, axis + 1, radii, out)
    for k in ks:
        _aniso_recurse(win.average(k), axis + 1, radii, out)


@njit(cache=True, parallel=True)
def _aniso2d_kernel(a, ks0, ks1):
    n0, n1 = a.shape
    # column prefix sums: P[i, j] = sum of a[:i, j]
    P = np.zeros((n0 + 1, n1))
    for i in range(n0):
        for j in range(n1):
            P[i + 1, j] = P[i, j] + a[i, j]
    out = np.zeros((n0, n1))
    m0 = ks0.shape[0]
    m1 = ks1.shape[0]
    inv1 = np.empty(m0)
    for t in range(m0):
        inv1[t] = 1.0 / (2.0 * ks0[t] + 1.0)
    inv2 = np.empty(m1)
    for t in range(m1):
        inv2[t] = 1.0 / (2.0 * ks1[t] + 1.0)
    for i in prange(n0):
        wrow = np.empty(n1)
        S = np.empty(n1 + 1)
        acc = np.zeros(n1)
        for t0 in range(m0):
            k0 = ks0[t0]
            lo = i - k0
            if lo < 0:
                lo = 0
            hi = i + k0 + 1
            if hi > n0:
                hi = n0
            f1 = inv1[t0]
            Phi = P[hi]
            Plo = P[lo]
            for j in range(n1):
                wrow[j] = (Phi[j] - Plo[j]) * f1
            S[0] = 0.0
            run = 0.0
            for j in range(n1):
                run += wrow[j]
                S[j + 1] = run
            total = S[n1]
            # regions per window offset: start-clamped (top free / top clamped),
            # interior, end-clamped (start free / start clamped); each loop runs
            # over pre-sliced views so it vectorizes
            for t1 in range(m1):
                k1 = ks1[t1]
                f = inv2[t1]
                c = total * f
                jl = k1 if k1 < n1 else n1
                jr = n1 - k1 - 1
                if jr < jl:
                    jr = jl
                a1end = n1 - k1 - 1
                if a1end < 0:
                    a1end = 0
                if a1end > jl:
                    a1end = jl
                a_lo = acc[:a1end]
                s_top = S[k1 + 1 : k1 + 1 + a1end]
                for j in range(a1end):
                    val = s_top[j] * f
                    a_lo[j] = val if val > a_lo[j] else a_lo[j]
                for j in range(a1end, jl):
                    acc[j] = c if c > acc[j] else acc[j]
                mlen = jr - jl
                a_in = acc[jl:jr]
                s_hi = S[jl + k1 + 1 : jl + k1 + 1 + mlen]
                s_lo = S[jl - k1 : jl - k1 + mlen]
                for j in range(mlen):
                    val = (s_hi[j] - s_lo[j]) * f
                    a_in[j] = val if val > a_in[j] else a_in[j]
                c2end = k1 if k1 < n1 else n1
                if c2end < jr:
                    c2end = jr
                for j in range(jr, c2end):
                    acc[j] = c if c > acc[j] else acc[j]
                clen = n1 - c2end
                a_hi = acc[c2end:]
                s_bot = S[c2end - k1 : c2end - k1 + clen]
                for j in range(clen):
                    val = (total - s_bot[j]) * f
                    a_hi[j] = val if val > a_hi[j] else a_hi[j]
        for j in range(n1):
            out[i, j] = acc[j]
    return out


# ---------------------------------------------------------------------------
# empirical weak-type constants
# ---------------------------------------------------------------------------


def weak_type_constants(v: ScalarField, op: str, lambdas, eps: float = 0.5,
                        radii: RadiusSet | None = None) -> dict:
    """Empirical ratios for the weak-type inequalities of the maximal operators.

    For ``op == "M"`` the report carries, per level, the plain weak (1,1)
    ratio ``lambda * |{Mv >= lambda}| / int |v|`` and the restricted-mass
    variant ``lambda * |{Mv > lambda}| / int_{|v| > lambda/2} |v|``.  For
    ``op == "N"`` it carries the box-operator ratio with the (1+eps) power,
    ``lambda^(1+eps) * |{Nv >= lambda}| / int_{|v| >= lambda/2} |v|^(1+eps)``.

    The displayed first-power form of the box inequality is not asserted
    anywhere; only the (1+eps) form backs a bound, so that is what the
    report measures.
    """
    lambdas = [float(l) for l in lambdas]
    if any(l <= 0 for l in lambdas):
        raise ValueError("lambdas must be positive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if radii is None:
        radii = RadiusSet.dyadic(v.spec)
    vol = v.spec.cell_volume
    a = np.abs(v.values)
    report: dict = {"op": op, "lambda": lambdas}
    if op == "M":
        m = hl_maximal(v, radii).values
        total_mass = float(a.sum()) * vol
        weak, zhang = [], []
        for lam in lambdas:
            meas_ge = float(np.count_nonzero(m >= lam)) * vol
            meas_gt = float(np.count_nonzero(m > lam)) * vol
            weak.append(lam * meas_ge / total_mass if total_mass > 0 else 0.0)
            tail = float(a[a > lam / 2.0].sum()) * vol
            zhang.append(lam * meas_gt / tail if tail > 0 else 0.0)
        report["weak11"] = weak
        report["zhang"] = zhang
        report["max_ratio"] = max(weak + zhang) if lambdas else 0.0
    elif op == "N":
        m = aniso_maximal(v, radii).values
        box = []
        for lam in lambdas:
            meas = float(np.count_nonzero(m >= lam)) * vol
            tail = float((a[a >= lam / 2.0] ** (1.0 + eps)).sum()) * vol
            box.append(lam ** (1.0 + eps) * meas / tail if tail > 0 else 0.0)
        report["eps"] = eps
        report["box_eps"] = box
        report["max_ratio"] = max(box) if lambdas else 0.0
    else:
        raise ValueError(f"op must be 'M' or 'N', got {op!r}")
    return report


def lp_norm_ratio(v: ScalarField, p: float, radii: RadiusSet | None = None) -> float:
    """``||Nv||_p / ||v||_p`` with discrete norms; 0 for the zero field."""
    if not p > 1.0:
        raise ValueError(f"p must be > 1, got {p}")
    if radii is None:
        radii = RadiusSet.dyadic(v.spec)
    vol = v.spec.cell_volume
    denom = float((np.abs(v.values) ** p).sum()) * vol
    if denom == 0.0:
        return 0.0
    m = aniso_maximal(v, radii).values
    numer = float((m**p).sum()) * vol
    return (numer / denom) ** (1.0 / p)
