"""Exponent bookkeeping for the integrability improvement iteration.

Given current integrability r of the positive part and q of the negative
part (with 1 < r < q), one round of the truncation-test argument couples
the two levels through alpha = (r+1)/(q+1) and upgrades r to
s = q(r+1)/(q+1), strictly between r and q.  Iterating drives r to q at
the linear rate q/(q+1).  ``q3_feasibility`` evaluates the three exponent
conditions under which the round closes and identifies the binding one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ExponentState",
    "exponent_alpha",
    "improvement_step",
    "exponent_iterate",
    "q3_feasibility",
]


def _check_ordering(r: float, q: float) -> None:
    if not (math.isfinite(r) and math.isfinite(q)):
        raise ValueError("exponents must be finite")
    if not 1.0 < r < q:
        raise ValueError(f"need 1 < r < q, got r={r}, q={q}")


def exponent_alpha(r: float, q: float) -> float:
    """Level-coupling exponent (r+1)/(q+1), in (0, 1) for r < q."""
    _check_ordering(r, q)
    return (r + 1.0) / (q + 1.0)


def improvement_step(r: float, q: float) -> float:
    """One round of integrability improvement: s = q(r+1)/(q+1) in (r, q)."""
    _check_ordering(r, q)
    return q * (r + 1.0) / (q + 1.0)


def exponent_iterate(r0: float, q: float, delta: float,
                     max_steps: int = 10_000) -> tuple[list[float], int]:
    """Iterate the improvement step until within delta of q.

    Returns the trajectory [s_0 = r0, s_1, ...] up to the first index k*
    with s_k >= q - delta, and k*.  The gap contracts by exactly q/(q+1)
    per step, so k* matches the closed-form geometric count.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    _check_ordering(r0, q)
    traj = [r0]
    k = 0
    while traj[-1] < q - delta:
        if k >= max_steps:
            raise RuntimeError("iteration failed to converge (delta too small?)")
        traj.append(q * (traj[-1] + 1.0) / (q + 1.0))
        k += 1
    return traj, k


@dataclass(frozen=True)
class ExponentState:
    """One round's exponents: growth p, integrabilities r < q, target s,
    tail power eps, level coupling alpha."""

    p: float
    r: float
    q: float
    s: float
    eps: float
    alpha: float

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError(f"p must be > 1, got {self.p}")
        if not max(1.0, self.p - 1.0) < self.r < self.q:
            raise ValueError(
                f"need max(1, p-1) < r < q, got p={self.p}, r={self.r}, q={self.q}"
            )
        if not self.q < self.p:
            raise ValueError(f"need q < p, got q={self.q}, p={self.p}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not (math.isfinite(self.s) and self.s > 0.0):
            raise ValueError(f"s must be positive finite, got {self.s}")

    @property
    def q1(self) -> float:
        return max(self.p - 2.0 + self.alpha, (self.p - 1.0) * self.alpha)

    @property
    def q2(self) -> float:
        return max(self.p - 1.0, 1.0 + (self.p - 2.0) * self.alpha)

    @property
    def q3(self) -> float:
        return max(self.q2, self.p - (1.0 + self.eps) * self.alpha + self.eps)


def q3_feasibility(state: ExponentState) -> dict:
    """Evaluate the three closure conditions and report which binds.

    The conditions bound, respectively with q3 standing for each term of
    its max: (1+eps) + (s-1-eps)/alpha, (p-1+eps) + (1+s-p-eps)/alpha, and
    s/alpha, all against q.  The last has the smallest margin whenever
    alpha <= 1 (the differences are (1+eps)(1-alpha)/alpha and
    (p-1+eps)(1-alpha)/alpha, both nonnegative), so feasibility reduces to
    s <= alpha q.

    The improvement step sits exactly on the boundary s = alpha q, so
    margins are compared with a 1e-12 relative slack; otherwise rounding of
    the boundary case would flip the verdict.
    """
    p, s, q, eps, alpha = state.p, state.s, state.q, state.eps, state.alpha
    lhs = [
        (1.0 + eps) + (s - 1.0 - eps) / alpha,
        (p - 1.0 + eps) + (1.0 + s - p - eps) / alpha,
        s / alpha,
    ]
    names = ["plain_tail", "mixed_tail", "s_over_alpha"]
    margins = [q - v for v in lhs]
    binding = int(min(range(3), key=lambda i: margins[i]))
    slack = 1e-12 * max(1.0, abs(q))
    return {
        "q1": state.q1,
        "q2": state.q2,
        "q3": state.q3,
        "lhs": lhs,
        "q": q,
        "margins": margins,
        "binding": names[binding],
        "feasible": bool(min(margins) >= -slack),
        "s_le_alpha_q": bool(s <= alpha * q + slack),
    }
