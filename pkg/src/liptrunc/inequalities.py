"""Verifiers for the quantitative inequalities behind the truncation proofs.

Each verifier evaluates both sides of one inequality on a sampled map, per
level, and reports the empirical ratio.  The constants in the inequalities
are existential, so nothing is asserted here against a theoretical value;
callers pin the reported ratios per generator family and track them as
regressions.
"""

from __future__ import annotations

import numpy as np

from .field import OrliczWeight, ScalarField, VectorField, log_integral, orlicz_integral
from .functionals import F_eval, F_split, QuasiconcaveFunctional, gradient_matrix
from .maximal import RadiusSet, hl_maximal

__all__ = [
    "verify_consequently",
    "verify_intermediary",
    "orlicz_conclusion_check",
]


def _grad_data(u: VectorField, F: QuasiconcaveFunctional):
    G = gradient_matrix(u)
    frob = np.sqrt((G**2).sum(axis=(0, 1)))
    Fv = F_eval(F, G, u.spec).values
    return G, frob, Fv


def _ratio(lhs: float, rhs: float) -> float:
    return lhs / rhs if rhs != 0.0 else 0.0


def verify_consequently(u: VectorField, F: QuasiconcaveFunctional, lambdas,
                        radii: RadiusSet | None = None) -> dict:
    """Truncation energy bound: on superlevel sets of the maximal function
    of the gradient, the integral of F is controlled by
    ``lam * int (|grad u|^(p-1) + lam^(p-1))`` over the same set.

    Reports per-level (lhs, rhs, ratio) with unit constant; the summary is
    the max ratio, the empirical constant of the inequality.
    """
    lambdas = [float(l) for l in lambdas]
    if any(l <= 0 for l in lambdas):
        raise ValueError("lambdas must be positive")
    if radii is None:
        radii = RadiusSet.dyadic(u.spec)
    _, frob, Fv = _grad_data(u, F)
    m = hl_maximal(ScalarField(u.spec, frob), radii).values
    vol = u.spec.cell_volume
    p = F.power
    lhs_list, rhs_list, ratios = [], [], []
    for lam in lambdas:
        mask = m > lam
        lhs = float(Fv[mask].sum()) * vol
        rhs = lam * float((frob[mask] ** (p - 1.0) + lam ** (p - 1.0)).sum()) * vol
        lhs_list.append(lhs)
        rhs_list.append(rhs)
        ratios.append(_ratio(lhs, rhs))
    return {
        "kind": "consequently",
        "p": p,
        "lambda": lambdas,
        "lhs": lhs_list,
        "rhs": rhs_list,
        "ratio": ratios,
        "max_ratio": max(ratios) if ratios else 0.0,
    }


def verify_intermediary(u: VectorField, F: QuasiconcaveFunctional, lambdas,
                        level_constant: float = 1.0,
                        radii: RadiusSet | None = None) -> dict:
    """Split bound: the mass of F+ below level ``C lam^p`` is controlled by
    ``C lam^(p-1) int_{|grad u| >= lam/2} |grad u|`` plus the matching
    F- mass below the same level.
    """
    lambdas = [float(l) for l in lambdas]
    if any(l <= 0 for l in lambdas):
        raise ValueError("lambdas must be positive")
    C = float(level_constant)
    _, frob, Fv = _grad_data(u, F)
    fp = np.maximum(Fv, 0.0)
    fm = np.maximum(-Fv, 0.0)
    vol = u.spec.cell_volume
    p = F.power
    lhs_list, rhs_list, ratios = [], [], []
    for lam in lambdas:
        level = C * lam**p
        lhs = float(fp[fp <= level].sum()) * vol
        tail = float(frob[frob >= lam / 2.0].sum()) * vol
        rhs = C * lam ** (p - 1.0) * tail + float(fm[fm <= level].sum()) * vol
        lhs_list.append(lhs)
        rhs_list.append(rhs)
        ratios.append(_ratio(lhs, rhs))
    return {
        "kind": "intermediary",
        "p": p,
        "level_constant": C,
        "lambda": lambdas,
        "lhs": lhs_list,
        "rhs": rhs_list,
        "ratio": ratios,
        "max_ratio": max(ratios) if ratios else 0.0,
    }


def orlicz_conclusion_check(u: VectorField, F: QuasiconcaveFunctional,
                            w: OrliczWeight,
                            coarse: VectorField | None = None) -> dict:
    """The two hypothesis integrals and the conclusion integral, all finite.

    Hypothesis (i): weighted gradient integral ``int |grad u|^p log(1+|grad u|)^alpha``.
    Hypothesis (ii): ``int F- log(1 + F-)^(alpha+1)``.
    Conclusion:      ``int F+ log(1 + F+)^(alpha+1)``.

    With a coarser sampling of the same map, a two-resolution check reports
    whether the conclusion integral is refinement-stable (relative change
    at most 2 percent).
    """
    G = gradient_matrix(u)
    frob = ScalarField(u.spec, np.sqrt((G**2).sum(axis=(0, 1))))
    fp, fm = F_split(F, G, u.spec)
    hyp_i = orlicz_integral(frob, w)
    hyp_ii = log_integral(fm, w)
    conclusion = log_integral(fp, w)
    report = {
        "kind": "orlicz",
        "p": w.p,
        "alpha": w.alpha,
        "hypothesis_gradient": hyp_i,
        "hypothesis_negative": hyp_ii,
        "conclusion": conclusion,
    }
    if coarse is not None:
        Gc = gradient_matrix(coarse)
        fpc, _ = F_split(F, Gc, coarse.spec)
        conclusion_coarse = log_integral(fpc, w)
        rel = abs(conclusion - conclusion_coarse) / max(abs(conclusion), 1e-300)
        report["conclusion_coarse"] = conclusion_coarse
        report["refinement_rel_change"] = rel
        report["converged"] = bool(rel <= 0.02)
    return report
