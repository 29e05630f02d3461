"""Elliptic operators of generalized p-Laplace form and their weak pairing.

The operator acts on a gradient field as ``a1(|grad|) * (a2(x) grad)``
where a1 is a scalar profile growing like ``t^(p-2)`` for large arguments
with a controlled small-argument branch, and a2 is a diagonal matrix field
with entries between 1 and nu.  ``weak_form_pairing`` evaluates the
discrete residual of the divergence-form equation against a test function;
it is a consistency probe on analytically known solutions, not a solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import GridSpec, ScalarField, VectorField, gradient
from .maximal import RadiusSet
from .truncate import part_box_maxima

__all__ = [
    "EllipticOperatorSpec",
    "a1_profile",
    "elliptic_eval",
    "weak_form_pairing",
    "good_bad_split",
]


@dataclass(frozen=True)
class EllipticOperatorSpec:
    """Data (a1 kind, diagonal a2, ellipticity bound nu) defining the operator.

    The power kind uses ``t^(p-2)`` for t >= 1 and
    ``min(t^(p-2), t^(eps_a - 1))`` below 1, continuously stitched at 1;
    the small-argument cap keeps the profile integrable for p close to 1.
    The unit kind (a1 = 1) is the linear case and requires p = 2.
    """

    p: float
    a1_kind: str
    a2: VectorField
    nu: float = 1.0
    eps_a: float = 0.5

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError(f"p must be > 1, got {self.p}")
        if self.a1_kind not in ("power", "unit"):
            raise ValueError(f"a1_kind must be 'power' or 'unit', got {self.a1_kind!r}")
        if self.a1_kind == "unit" and self.p != 2.0:
            raise ValueError("unit a1 satisfies the growth bounds only for p = 2")
        if not self.nu >= 1.0:
            raise ValueError(f"nu must be >= 1, got {self.nu}")
        if not 0.0 < self.eps_a < 1.0:
            raise ValueError(f"eps_a must lie in (0, 1), got {self.eps_a}")
        for comp in self.a2.components:
            vals = comp.values
            if (vals < 1.0).any() or (vals > self.nu).any():
                raise ValueError("a2 diagonal entries must lie in [1, nu]")

    @classmethod
    def identity_a2(cls, spec: GridSpec, p: float, a1_kind: str = "power",
                    nu: float = 1.0, eps_a: float = 0.5) -> "EllipticOperatorSpec":
        ones = tuple(ScalarField(spec, np.ones(spec.sizes)) for _ in range(spec.dim))
        return cls(p, a1_kind, VectorField(spec, ones), nu, eps_a)


def a1_profile(op: EllipticOperatorSpec, t: np.ndarray) -> np.ndarray:
    """The scalar coefficient a1 evaluated on positive arguments."""
    t = np.asarray(t, dtype=np.float64)
    if (t <= 0.0).any():
        raise ValueError("a1 is defined for positive arguments")
    if op.a1_kind == "unit":
        return np.ones_like(t)
    main = t ** (op.p - 2.0)
    cap = t ** (op.eps_a - 1.0)
    return np.where(t < 1.0, np.minimum(main, cap), main)


def elliptic_eval(op: EllipticOperatorSpec, grad: VectorField) -> VectorField:
    """Pointwise ``a1(|grad|_l2) * (a2 grad)``; zero where the gradient is zero."""
    if grad.spec != op.a2.spec:
        raise ValueError("gradient and coefficient grids differ")
    mag = np.sqrt(sum(c.values**2 for c in grad.components))
    pos = mag > 0.0
    a1 = np.zeros(grad.spec.sizes)
    if pos.any():
        a1[pos] = a1_profile(op, mag[pos])
    comps = tuple(
        ScalarField(grad.spec, a1 * a2c.values * gc.values)
        for a2c, gc in zip(op.a2.components, grad.components)
    )
    return VectorField(grad.spec, comps)


def weak_form_pairing(op: EllipticOperatorSpec, u: ScalarField,
                      test: ScalarField, f: VectorField) -> float:
    """Discrete ``int (A(x, grad u) - f) . grad(test)``.

    Vanishes identically when f equals the flux pointwise; for an exact
    continuum solution sampled on a fine grid with a compactly supported
    test function it decays at first order under refinement.
    """
    if u.spec != test.spec or f.spec != u.spec:
        raise ValueError("all fields must share one grid")
    flux = elliptic_eval(op, gradient(u))
    gtest = gradient(test)
    total = 0.0
    for fl, fc, tc in zip(flux.components, f.components, gtest.components):
        total += float(((fl.values - fc.values) * tc.values).sum())
    return total * u.spec.cell_volume


def good_bad_split(u: ScalarField, lam: float, mu: float, radii: RadiusSet,
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Partition into the good set (both gate fields below their levels)
    and its complement.

    The gates are the per-axis box maximal functions of the positive and
    negative difference parts; the two levels are exposed separately
    because the iteration couples them as mu = lam^alpha.
    """
    if lam <= 0.0 or mu <= 0.0:
        raise ValueError("levels must be positive")
    pos, neg = part_box_maxima(u, radii)
    good = (pos <= lam) & (neg <= mu)
    return good, ~good
