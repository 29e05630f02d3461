"""Analytic test-function families with closed-form integrals.

Each generator returns the sampled field(s) together with an analytics
record holding the exact radial profiles and annulus integrals, evaluated
independently of the grid (in closed form where elementary, otherwise by
1D adaptive quadrature of the radial profile).  Grid sums are compared
against these records, never against other grid sums, so discretization
error is measured like for like.

Radial generators exclude a configurable inner radius around the origin;
the singular core is not grid-representable, and every comparison is
restricted to the resolved annulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .field import GridSpec, ScalarField, VectorField

__all__ = [
    "RadialMapAnalytics",
    "SawtoothAnalytics",
    "PHarmonicAnalytics",
    "gen_radial_map",
    "gen_sawtooth",
    "gen_p_harmonic_radial",
]


@dataclass(frozen=True)
class RadialMapAnalytics:
    """Closed forms for the planar map x |x|^(beta-1) on an annulus."""

    beta: float
    r0: float
    r1: float

    def det(self, r):
        return self.beta * np.asarray(r) ** (2.0 * self.beta - 2.0)

    def grad_eigenvalues(self, r):
        """Tangential and radial stretch of the differential."""
        r = np.asarray(r)
        return r ** (self.beta - 1.0), self.beta * r ** (self.beta - 1.0)

    def grad_frobenius(self, r):
        return math.sqrt(1.0 + self.beta**2) * np.asarray(r) ** (self.beta - 1.0)

    def integral_det(self) -> float:
        """Annulus integral of the Jacobian determinant, exactly."""
        b = self.beta
        return math.pi * (self.r1 ** (2 * b) - self.r0 ** (2 * b))

    def integral_grad_sq(self) -> float:
        """Annulus integral of the squared Frobenius norm of the gradient."""
        b = self.beta
        return math.pi * (1.0 + b * b) * (self.r1 ** (2 * b) - self.r0 ** (2 * b)) / b

    def integral_det_log_grad(self) -> float:
        """Annulus integral of det * log(1 + |grad|), by radial quadrature."""

        def f(r):
            return float(self.det(r)) * math.log1p(float(self.grad_frobenius(r))) * r

        val, _ = quad(f, self.r0, self.r1, limit=200)
        return 2.0 * math.pi * val

    def integral_det_log_det(self, alpha: float = 0.0) -> float:
        """Annulus integral of det * log(1 + det)^(alpha+1), by quadrature."""

        def f(r):
            d = float(self.det(r))
            return d * math.log1p(d) ** (alpha + 1.0) * r

        val, _ = quad(f, self.r0, self.r1, limit=200)
        return 2.0 * math.pi * val

    def annulus_mask(self, spec: GridSpec) -> np.ndarray:
        return _annulus_mask(spec, self.r0, self.r1)


def _square_grid(n: int, dim: int) -> GridSpec:
    h = 2.0 / n
    return GridSpec((n,) * dim, (h,) * dim, (-1.0 + h / 2.0,) * dim)


def _annulus_mask(spec: GridSpec, r0: float, r1: float) -> np.ndarray:
    """Cells inside the annulus whose forward stencil stays on the grid.

    Far-face cells difference against the zero extension, so they carry an
    O(1/h) gradient artifact and are excluded from annulus comparisons.
    """
    coords = spec.meshgrid()
    r = np.sqrt(sum(c**2 for c in coords))
    mask = (r > r0) & (r < r1)
    for axis in range(spec.dim):
        last = [slice(None)] * spec.dim
        last[axis] = -1
        mask[tuple(last)] = False
    return mask


def gen_radial_map(beta: float, n: int, annulus: tuple[float, float] = (0.1, 1.0),
                   ) -> tuple[VectorField, RadialMapAnalytics]:
    """Sample the planar map u(x) = x |x|^(beta-1) on [-1, 1]^2.

    The determinant of its differential is beta |x|^(2 beta - 2), so beta
    tunes the integrability of the gradient while keeping the determinant
    nonnegative.
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    r0, r1 = float(annulus[0]), float(annulus[1])
    if not 0.0 < r0 < r1:
        raise ValueError(f"annulus radii must satisfy 0 < r0 < r1, got {annulus}")
    spec = _square_grid(n, 2)
    if r0 <= spec.spacings[0]:
        raise ValueError(
            f"inner radius {r0} does not resolve the singularity at spacing "
            f"{spec.spacings[0]}; increase n or r0"
        )
    xx, yy = spec.meshgrid()
    r = np.sqrt(xx**2 + yy**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(r > 0.0, r ** (beta - 1.0), 0.0)
    comps = (
        ScalarField(spec, xx * scale),
        ScalarField(spec, yy * scale),
    )
    return VectorField(spec, comps), RadialMapAnalytics(beta, r0, r1)


@dataclass(frozen=True)
class SawtoothAnalytics:
    """Exact slope distribution of the sawtooth profile."""

    spike_slope: float
    base_slope: float
    cells_up: int
    cells_down: int
    periods: int
    spacing: float

    def moment_pos(self, r: float) -> float:
        """Integral of the r-th power of the positive difference part."""
        return self.spike_slope**r * self.cells_up * self.periods * self.spacing

    def moment_neg(self, q: float) -> float:
        return self.base_slope**q * self.cells_down * self.periods * self.spacing


def gen_sawtooth(spike_slope: float, base_slope: float, spike_frac: float,
                 n: int) -> tuple[ScalarField, SawtoothAnalytics]:
    """1D compactly supported sawtooth: thin steep up-slopes, gentle down-slopes.

    Per period a fraction ``spike_frac`` of cells rises at ``spike_slope``
    and the rest falls at ``base_slope``; the mass balance
    ``spike_slope * spike_frac = base_slope * (1 - spike_frac)`` must hold
    so every period closes back to zero.  The final down-step of each
    period absorbs the accumulated float residual (relatively ~1e-16) so
    the support boundary is exactly zero.
    """
    if not 0.0 < spike_frac <= 0.5:
        raise ValueError(f"spike_frac must lie in (0, 1/2], got {spike_frac}")
    if spike_slope <= 0.0 or base_slope <= 0.0:
        raise ValueError("slopes must be positive")
    balance = spike_slope * spike_frac - base_slope * (1.0 - spike_frac)
    if abs(balance) > 1e-9 * max(spike_slope, base_slope):
        raise ValueError(
            "slope/fraction combination not closable to zero mean: "
            f"{spike_slope}*{spike_frac} != {base_slope}*(1-{spike_frac})"
        )
    frac = Fraction(spike_frac).limit_denominator(max(2, n // 4))
    if abs(float(frac) - spike_frac) > 1e-9:
        raise ValueError(f"spike_frac {spike_frac} not representable on {n} cells")
    cells_up = frac.numerator
    period = frac.denominator
    cells_down = period - cells_up
    margin = max(2, n // 8)
    periods = (n - 2 * margin) // period
    if periods < 1:
        raise ValueError(f"grid of {n} cells too small for period {period}")
    h = 1.0 / n
    spec = GridSpec((n,), (h,))
    steps = np.zeros(n)
    start = margin
    for _ in range(periods):
        steps[start : start + cells_up] = spike_slope
        steps[start + cells_up : start + period] = -base_slope
        run = float(steps[start : start + period - 1].sum())
        steps[start + period - 1] = -run
        start += period
    u = np.zeros(n)
    u[1:] = np.cumsum(steps[:-1]) * h
    return ScalarField(spec, u), SawtoothAnalytics(
        spike_slope, base_slope, cells_up, cells_down, periods, h
    )


@dataclass(frozen=True)
class PHarmonicAnalytics:
    """Radial power profile solving the p-Laplace equation away from 0."""

    p: float
    n_dim: int
    r0: float
    r1: float

    @property
    def exponent(self) -> float:
        return (self.p - self.n_dim) / (self.p - 1.0)

    @property
    def grad_exponent(self) -> float:
        return (1.0 - self.n_dim) / (self.p - 1.0)

    @property
    def grad_coef(self) -> float:
        return abs(self.exponent)

    def value(self, r):
        return np.asarray(r) ** self.exponent

    def grad_norm(self, r):
        return self.grad_coef * np.asarray(r) ** self.grad_exponent

    def lr_threshold(self) -> float:
        """|grad u| lies in L^r near the origin exactly for r below this."""
        return self.n_dim * (self.p - 1.0) / (self.n_dim - 1.0)

    def annulus_mask(self, spec: GridSpec) -> np.ndarray:
        return _annulus_mask(spec, self.r0, self.r1)


def gen_p_harmonic_radial(p: float, n_dim: int, n: int,
                          annulus: tuple[float, float] = (0.1, 1.0),
                          ) -> tuple[ScalarField, PHarmonicAnalytics]:
    """Sample u(x) = |x|^((p - d)/(p - 1)) on [-1, 1]^d.

    This is the radial solution of the p-Laplace equation away from the
    origin; ``p == n_dim`` is the logarithmic case and is rejected.
    """
    if not p > 1.0:
        raise ValueError(f"p must be > 1, got {p}")
    if n_dim < 2 or n_dim > 3:
        raise ValueError(f"n_dim must be 2 or 3, got {n_dim}")
    if p == float(n_dim):
        raise ValueError(f"p = {p} equals the dimension; radial profile degenerates")
    r0, r1 = float(annulus[0]), float(annulus[1])
    if not 0.0 < r0 < r1:
        raise ValueError(f"annulus radii must satisfy 0 < r0 < r1, got {annulus}")
    spec = _square_grid(n, n_dim)
    if r0 <= spec.spacings[0]:
        raise ValueError(
            f"inner radius {r0} does not resolve the singularity at spacing "
            f"{spec.spacings[0]}; increase n or r0"
        )
    coords = spec.meshgrid()
    r = np.sqrt(sum(c**2 for c in coords))
    expo = (p - n_dim) / (p - 1.0)
    with np.errstate(divide="ignore"):
        vals = np.where(r > 0.0, r**expo, 0.0)
    return ScalarField(spec, vals), PHarmonicAnalytics(p, n_dim, r0, r1)
