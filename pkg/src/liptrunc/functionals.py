"""Quasiconcave integrands with power growth, and the null-Lagrangian check.

The determinant (in 2 and 3 dimensions) is the central example: it is both
quasiconcave and quasiconvex, so averaging it over periodic perturbations
of an affine map leaves it unchanged.  ``neg_ell1_power`` is a pointwise
concave control case, quasiconcave for trivial reasons, whose check
reduces to Jensen's inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .field import GridSpec, ScalarField, VectorField, gradient

__all__ = [
    "QuasiconcaveFunctional",
    "gradient_matrix",
    "F_eval",
    "F_split",
    "null_lagrangian_check",
]

_KINDS = ("det2", "det3", "neg_ell1_power")


@dataclass(frozen=True)
class QuasiconcaveFunctional:
    """A quasiconcave integrand F with F(0) = 0 and |F(v)| <= C(1+|v|^p).

    ``power`` is the growth exponent p (2 and 3 for the determinants) and
    ``growth_constant`` a valid C for the Frobenius norm.
    """

    kind: str
    power: float
    growth_constant: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if not self.power >= 1.0:
            raise ValueError(f"growth exponent must be >= 1, got {self.power}")

    @classmethod
    def det2(cls) -> "QuasiconcaveFunctional":
        # |ad - bc| <= (a^2+b^2+c^2+d^2)/2
        return cls("det2", 2.0, 0.5)

    @classmethod
    def det3(cls) -> "QuasiconcaveFunctional":
        # Hadamard + AM-GM: |det| <= (|v|_F / sqrt(3))^3
        return cls("det3", 3.0, 3.0**-1.5)

    @classmethod
    def neg_ell1_power(cls, p: float) -> "QuasiconcaveFunctional":
        if not p >= 1.0:
            raise ValueError(f"p must be >= 1, got {p}")
        return cls("neg_ell1_power", p, float("nan"))

    @property
    def shape(self) -> tuple[int, int] | None:
        if self.kind == "det2":
            return (2, 2)
        if self.kind == "det3":
            return (3, 3)
        return None


def gradient_matrix(u: VectorField | Sequence[ScalarField]) -> np.ndarray:
    """Forward-difference gradient of a map, shape (ncomp, dim, *sizes)."""
    comps = u.components if isinstance(u, VectorField) else tuple(u)
    rows = [gradient(c).as_array() for c in comps]
    return np.stack(rows)


def _eval_values(F: QuasiconcaveFunctional, G: np.ndarray) -> np.ndarray:
    if F.shape is not None and tuple(G.shape[:2]) != F.shape:
        raise ValueError(
            f"{F.kind} expects a {F.shape} matrix field, got {G.shape[:2]}"
        )
    if F.kind == "det2":
        return G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    if F.kind == "det3":
        return (
            G[0, 0] * (G[1, 1] * G[2, 2] - G[1, 2] * G[2, 1])
            - G[0, 1] * (G[1, 0] * G[2, 2] - G[1, 2] * G[2, 0])
            + G[0, 2] * (G[1, 0] * G[2, 1] - G[1, 1] * G[2, 0])
        )
    l1 = np.abs(G).sum(axis=(0, 1))
    return -(l1**F.power)


def F_eval(F: QuasiconcaveFunctional, G: np.ndarray, spec: GridSpec) -> ScalarField:
    """Pointwise F of a matrix field of shape (ncomp, dim, *grid sizes)."""
    vals = _eval_values(F, G)
    if vals.shape != spec.sizes:
        raise ValueError(f"matrix field shape {G.shape} does not match grid {spec.sizes}")
    return ScalarField(spec, vals)


def F_split(F: QuasiconcaveFunctional, G: np.ndarray, spec: GridSpec,
            ) -> tuple[ScalarField, ScalarField]:
    """Positive and negative parts of the pointwise values, F = F+ - F-."""
    v = F_eval(F, G, spec)
    return (
        ScalarField(spec, np.maximum(v.values, 0.0)),
        ScalarField(spec, np.maximum(-v.values, 0.0)),
    )


def _periodic_gradient_matrix(psi: VectorField) -> np.ndarray:
    """Forward differences with wrap-around on the unit torus grid."""
    spec = psi.spec
    rows = []
    for comp in psi.components:
        v = comp.values
        cols = []
        for axis in range(spec.dim):
            h = spec.spacings[axis]
            cols.append((np.roll(v, -1, axis=axis) - v) / h)
        rows.append(np.stack(cols))
    return np.stack(rows)


def null_lagrangian_check(F: QuasiconcaveFunctional, A: np.ndarray,
                          psi: VectorField) -> tuple[float, float]:
    """Compare F(A) with the torus average of F(A + grad psi).

    ``psi`` is read as one period of a field on the unit torus; differences
    wrap around.  For the determinants the two sides agree up to O(h)
    discretization defect; for a quasiconcave F the left side dominates.
    Returns (lhs, rhs) = (F(A), mean of F(A + grad psi)).
    """
    A = np.asarray(A, dtype=np.float64)
    spec = psi.spec
    Gpsi = _periodic_gradient_matrix(psi)
    if F.shape is not None and (A.shape != F.shape or tuple(Gpsi.shape[:2]) != F.shape):
        raise ValueError(
            f"{F.kind} expects {F.shape} matrices, got A {A.shape} and "
            f"psi gradient {Gpsi.shape[:2]}"
        )
    if A.ndim != 2 or A.shape != tuple(Gpsi.shape[:2]):
        raise ValueError(f"A shape {A.shape} does not match psi components")
    lhs_mat = _eval_values(F, A.reshape(A.shape + (1,) * spec.dim))
    lhs = float(lhs_mat.reshape(()))
    shifted = A.reshape(A.shape + (1,) * spec.dim) + Gpsi
    vals = _eval_values(F, shifted)
    rhs = float(vals.mean())
    return lhs, rhs
