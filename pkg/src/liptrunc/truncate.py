"""Lipschitz truncation pipelines.

Three pipelines share one skeleton: compute a maximal-operator level mask
(the kept set), measure or accept an inflation constant, and replace the
field by its McShane extension off the kept set.

* ``lipschitz_truncate``: symmetric truncation at one level; the kept set is
  a sublevel set of the cube maximal function of the l1 gradient magnitude.
* ``asym_truncate``: the kept set bounds the box maximal functions of the
  positive and negative parts of each forward difference separately, so the
  up-slopes and down-slopes of the output obey independent bounds.
* ``asym_truncate_zero_boundary``: the asymmetric pipeline on a convex
  polytope with zero boundary values; the exterior cells are pinned to zero
  so the output vanishes identically outside the domain.

The inflation constant scales the slope bounds before extension.  By
default it is measured from the kept samples (smallest scale at which the
extension agrees there), then nudged up by a relative guard so the pinned
values survive the floating-point sweeps bitwise.  Slope-bound checks must
compare ``u[i+1] <= u[i] + step`` against the recorded per-axis steps, the
exact floats the sweeps propagated.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from .asymlip import (
    AsymMetricParams,
    SampleSet,
    _BRUTE_MODULUS_MAX,
    asym_lip_modulus,
    mcshane_extend_fast,
    modulus_by_bisection,
    slope_steps,
)
from .field import GridSpec, ScalarField, gradient, negative_part, positive_part
from .maximal import RadiusSet, aniso_maximal, hl_maximal

__all__ = [
    "TruncationParams",
    "ConvexPolytope",
    "TruncationResult",
    "lipschitz_truncate",
    "asym_truncate",
    "asym_truncate_zero_boundary",
    "changed_set_bound",
    "part_box_maxima",
    "l1_gradient_magnitude",
]


@dataclass(frozen=True)
class TruncationParams:
    """Levels and constants for the asymmetric pipelines.

    ``inflation=None`` requests the measured per-instance constant; an
    explicit value >= 1 is honored as given (agreement then depends on it
    dominating the sample modulus, reported via ``TruncationResult.agrees``).
    """

    lam: float
    mu: float
    eps: float = 0.5
    inflation: float | None = None

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be positive finite, got {self.lam}")
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be positive finite, got {self.mu}")
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be positive finite, got {self.eps}")
        if self.inflation is not None and not self.inflation >= 1.0:
            raise ValueError(f"inflation must be >= 1, got {self.inflation}")


@dataclass(frozen=True)
class ConvexPolytope:
    """Intersection of half-spaces a_i . x <= b_i."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.atleast_2d(np.asarray(self.normals, dtype=np.float64))
        offsets = np.atleast_1d(np.asarray(self.offsets, dtype=np.float64))
        if normals.shape[0] != offsets.shape[0]:
            raise ValueError("one offset per half-space required")
        if not np.isfinite(normals).all() or not np.isfinite(offsets).all():
            raise ValueError("half-space data must be finite")
        if (np.abs(normals).sum(axis=1) == 0.0).any():
            raise ValueError("zero normal vector")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def cell_mask(self, spec: GridSpec) -> np.ndarray:
        """Boolean mask of cells whose centers lie in the polytope."""
        if self.dim != spec.dim:
            raise ValueError(
                f"polytope dimension {self.dim} does not match grid {spec.dim}"
            )
        coords = np.stack([g.ravel() for g in spec.meshgrid()], axis=-1)
        inside = (coords @ self.normals.T <= self.offsets[None, :]).all(axis=1)
        return inside.reshape(spec.sizes)

    @classmethod
    def from_json(cls, text: str) -> "ConvexPolytope":
        data = json.loads(text)
        halfspaces = data["halfspaces"]
        normals = [hs["normal"] for hs in halfspaces]
        offsets = [hs["offset"] for hs in halfspaces]
        return cls(np.asarray(normals), np.asarray(offsets))

    def to_json(self) -> str:
        return json.dumps(
            {
                "halfspaces": [
                    {"normal": list(map(float, n)), "offset": float(b)}
                    for n, b in zip(self.normals, self.offsets)
                ]
            }
        )

    @classmethod
    def box(cls, lows, highs) -> "ConvexPolytope":
        lows = np.asarray(lows, dtype=np.float64)
        highs = np.asarray(highs, dtype=np.float64)
        d = lows.shape[0]
        eye = np.eye(d)
        normals = np.concatenate([eye, -eye])
        offsets = np.concatenate([highs, -lows])
        return cls(normals, offsets)


@dataclass(frozen=True)
class TruncationResult:
    """Truncated field plus the kept set and empirical constants.

    ``kept_mask`` is the source set of the extension; when ``agrees`` is
    true the output equals the input there exactly.  ``steps_up`` and
    ``steps_down`` are the per-axis slope steps the sweeps enforced
    (inflation * level * spacing), recorded so bound checks compare against
    the exact floats used.
    """

    field: ScalarField
    kept_mask: np.ndarray
    bad_measure: float
    changed_measure: float
    lam: float
    mu: float
    eps: float
    inflation: float
    modulus: float | None
    agrees: bool
    steps_up: tuple[float, ...]
    steps_down: tuple[float, ...]
    t1: float
    t2: float
    t4_lhs: float | None = None
    t4_rhs: float | None = None

    def to_report(self) -> dict:
        rep = {
            "lam": self.lam,
            "mu": self.mu,
            "eps": self.eps,
            "inflation": self.inflation,
            "modulus": self.modulus,
            "agrees": self.agrees,
            "kept_cells": int(self.kept_mask.sum()),
            "bad_measure": self.bad_measure,
            "changed_measure": self.changed_measure,
            "t1": self.t1,
            "t2": self.t2,
        }
        if self.t4_lhs is not None:
            rep["t4_lhs"] = self.t4_lhs
            rep["t4_rhs"] = self.t4_rhs
        return rep


def l1_gradient_magnitude(u: ScalarField) -> ScalarField:
    """l1 norm of the forward-difference vector, the symmetric gate field."""
    grads = gradient(u)
    mag = np.zeros(u.spec.sizes)
    for comp in grads.components:
        mag += np.abs(comp.values)
    return ScalarField(u.spec, mag)


def part_box_maxima(u: ScalarField, radii: RadiusSet) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis box maximal of the signed parts of the forward differences.

    Returns the pointwise max over axes of the box operator applied to the
    positive and to the negative part of each difference component, the two
    gate fields of the asymmetric pipeline.
    """
    return _part_box_maxima(gradient(u), radii)


def _part_box_maxima(grads, radii: RadiusSet) -> tuple[np.ndarray, np.ndarray]:
    spec = grads.spec
    pos = np.zeros(spec.sizes)
    neg = np.zeros(spec.sizes)
    for comp in grads.components:
        np.maximum(pos, aniso_maximal(positive_part(comp), radii).values, out=pos)
        np.maximum(neg, aniso_maximal(negative_part(comp), radii).values, out=neg)
    return pos, neg


def _interior_diffs(values: np.ndarray, axis: int) -> np.ndarray:
    lead = [slice(None)] * values.ndim
    head = [slice(None)] * values.ndim
    lead[axis] = slice(1, None)
    head[axis] = slice(0, -1)
    return values[tuple(lead)] - values[tuple(head)]


def _slope_stats(out: np.ndarray, spec: GridSpec, lam: float, mu: float):
    """Empirical T1/T2: per-axis sup of the signed difference quotients."""
    t1 = 0.0
    t2 = 0.0
    for axis in range(spec.dim):
        d = _interior_diffs(out, axis) / spec.spacings[axis]
        t1 = max(t1, float(d.max(initial=0.0)) / lam)
        t2 = max(t2, float((-d).max(initial=0.0)) / mu)
    return t1, t2


# relative guard applied to a measured modulus so the pinned samples survive
# the floating-point sweep chains
_MODULUS_GUARD = 1e-12


def _extend_with_inflation(sample: SampleSet, base: AsymMetricParams,
                           explicit: float | None):
    """Extend over the sample set, resolving the inflation constant.

    Returns (extension result, effective inflation, measured modulus).
    With ``explicit=None`` the modulus is measured and the scale escalated
    until the extension agrees on the samples exactly.
    """
    if explicit is not None:
        ext = mcshane_extend_fast(sample, base.scaled(explicit))
        return ext, explicit, ext.modulus
    if sample.count <= _BRUTE_MODULUS_MAX:
        measured = asym_lip_modulus(sample, base)
    else:
        measured = modulus_by_bisection(sample, base)
    c = max(1.0, measured) * (1.0 + _MODULUS_GUARD)
    for attempt in range(60):
        ext = mcshane_extend_fast(sample, base.scaled(c))
        if ext.agrees:
            return ext, c, measured
        c *= 1.0 + _MODULUS_GUARD * 2.0**attempt
    raise RuntimeError("could not reach exact sample agreement by inflation")


def lipschitz_truncate(u: ScalarField, lam: float, radii: RadiusSet,
                       inflation: float | None = None,
                       keep_mask: np.ndarray | None = None) -> TruncationResult:
    """Symmetric truncation at level lam.

    The kept set is ``{cube maximal of |grad u|_l1 <= lam}``; off it the
    field is replaced by the symmetric extension with slope bound
    ``inflation * lam`` per axis.  ``keep_mask`` overrides the gate (used
    for pipeline cross-checks).
    """
    if not lam > 0.0:
        raise ValueError(f"lam must be positive, got {lam}")
    if keep_mask is None:
        gate = hl_maximal(l1_gradient_magnitude(u), radii).values
        keep_mask = gate <= lam
    if not keep_mask.any():
        raise ValueError("lambda below global minimum of maximal function")
    sample = SampleSet(u.spec, keep_mask, u.values)
    base = AsymMetricParams(lam, lam)
    ext, c, measured = _extend_with_inflation(sample, base, inflation)
    out = ext.field.values
    vol = u.spec.cell_volume
    t1, t2 = _slope_stats(out, u.spec, lam, lam)
    up, down = slope_steps(u.spec, base.scaled(c))
    return TruncationResult(
        field=ext.field,
        kept_mask=keep_mask,
        bad_measure=float(np.count_nonzero(~keep_mask)) * vol,
        changed_measure=float(np.count_nonzero(out != u.values)) * vol,
        lam=lam,
        mu=lam,
        eps=1.0,
        inflation=c,
        modulus=measured,
        agrees=ext.agrees,
        steps_up=up,
        steps_down=down,
        t1=t1,
        t2=t2,
    )


def asym_truncate(u: ScalarField, params: TruncationParams, radii: RadiusSet,
                  keep_mask: np.ndarray | None = None) -> TruncationResult:
    """Asymmetric truncation at levels (lam, mu).

    Kept set: box maximal of every positive difference part <= lam and of
    every negative part <= mu.  The extension then has up-slopes bounded by
    ``inflation * lam`` and down-slopes by ``inflation * mu`` per axis.
    """
    grads = gradient(u)
    if keep_mask is None:
        pos, neg = _part_box_maxima(grads, radii)
        keep_mask = (pos <= params.lam) & (neg <= params.mu)
    if not keep_mask.any():
        raise ValueError("levels below global minimum of the gate fields")
    sample = SampleSet(u.spec, keep_mask, u.values)
    base = AsymMetricParams(params.lam, params.mu)
    ext, c, measured = _extend_with_inflation(sample, base, params.inflation)
    out = ext.field.values
    vol = u.spec.cell_volume
    t1, t2 = _slope_stats(out, u.spec, params.lam, params.mu)
    up, down = slope_steps(u.spec, base.scaled(c))
    result = TruncationResult(
        field=ext.field,
        kept_mask=keep_mask,
        bad_measure=float(np.count_nonzero(~keep_mask)) * vol,
        changed_measure=float(np.count_nonzero(out != u.values)) * vol,
        lam=params.lam,
        mu=params.mu,
        eps=params.eps,
        inflation=c,
        modulus=measured,
        agrees=ext.agrees,
        steps_up=up,
        steps_down=down,
        t1=t1,
        t2=t2,
    )
    lhs, rhs = _changed_bound_from_grads(u, params, result.field.values, grads)
    return dataclasses.replace(result, t4_lhs=lhs, t4_rhs=rhs)


def asym_truncate_zero_boundary(u: ScalarField, domain: ConvexPolytope,
                                params: TruncationParams, radii: RadiusSet,
                                ) -> TruncationResult:
    """Asymmetric truncation preserving zero values outside a convex domain.

    Requires u = 0 on every cell whose center lies outside the domain.  The
    extension sources are the kept cells inside the domain plus all exterior
    cells pinned at zero, so the output vanishes outside the domain and the
    slope bounds hold across the boundary.
    """
    inside = domain.cell_mask(u.spec)
    if not inside.any():
        raise ValueError("polytope contains no grid cell")
    outside = ~inside
    if (u.values[outside] != 0.0).any():
        raise ValueError("u must vanish outside the domain")
    grads = gradient(u)
    pos, neg = _part_box_maxima(grads, radii)
    gate = (pos <= params.lam) & (neg <= params.mu)
    keep_mask = (gate & inside) | outside
    if not (gate & inside).any():
        raise ValueError("levels below global minimum of the gate fields")
    sample = SampleSet(u.spec, keep_mask, u.values)
    base = AsymMetricParams(params.lam, params.mu)
    ext, c, measured = _extend_with_inflation(sample, base, params.inflation)
    out = ext.field.values
    vol = u.spec.cell_volume
    t1, t2 = _slope_stats(out, u.spec, params.lam, params.mu)
    up, down = slope_steps(u.spec, base.scaled(c))
    result = TruncationResult(
        field=ext.field,
        kept_mask=keep_mask,
        bad_measure=float(np.count_nonzero(~keep_mask)) * vol,
        changed_measure=float(np.count_nonzero(out != u.values)) * vol,
        lam=params.lam,
        mu=params.mu,
        eps=params.eps,
        inflation=c,
        modulus=measured,
        agrees=ext.agrees,
        steps_up=up,
        steps_down=down,
        t1=t1,
        t2=t2,
    )
    lhs, rhs = _changed_bound_from_grads(u, params, result.field.values, grads)
    return dataclasses.replace(result, t4_lhs=lhs, t4_rhs=rhs)


def changed_set_bound(u: ScalarField, params: TruncationParams,
                      result: TruncationResult) -> tuple[float, float]:
    """Measure of the changed set against the (1+eps)-moment tail bound.

    lhs is the measure of {u != truncated u}.  rhs evaluates, with unit
    constant, ``lam^-(1+eps) * int_{g+ >= lam/2} g+^(1+eps)`` plus the same
    in the negative part at level mu, where g+/g- are the l1-combined
    positive/negative parts of the forward differences.  The empirical
    constant is lhs/rhs whenever rhs > 0.
    """
    return _changed_bound_from_grads(u, params, result.field.values, gradient(u))


def _changed_bound_from_grads(u: ScalarField, params: TruncationParams,
                              out_values: np.ndarray, grads) -> tuple[float, float]:
    vol = u.spec.cell_volume
    lhs = float(np.count_nonzero(out_values != u.values)) * vol
    gp = np.zeros(u.spec.sizes)
    gm = np.zeros(u.spec.sizes)
    for comp in grads.components:
        gp += np.maximum(comp.values, 0.0)
        gm += np.maximum(-comp.values, 0.0)
    e = 1.0 + params.eps
    tail_p = gp[gp >= params.lam / 2.0]
    tail_m = gm[gm >= params.mu / 2.0]
    rhs = 0.0
    if tail_p.size:
        rhs += float((tail_p**e).sum()) * vol / params.lam**e
    if tail_m.size:
        rhs += float((tail_m**e).sum()) * vol / params.mu**e
    return lhs, rhs
