"""Placement of the central PA by maximizing the aggregated inverse path loss.

``L(x) = sum_m 1 / ((x - x_m)^2 + d^2)`` always peaks inside ``[x_1, x_M]``.
When the array span is below ``d / sqrt(3)`` it is strictly concave there, so a
plain ternary search is enough; otherwise a grid scan picks the best cell first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import UserArray

DEFAULT_TOLERANCE = 1e-7
SYMMETRY_SLACK = 1e-12

SYMMETRIC = "symmetric-closed-form"
TERNARY = "ternary-search"
GRID_REFINED = "grid-refined"


@dataclass(frozen=True)
class CenterSolution:
    x_center: float
    L_value: float
    method_tag: str
    concavity_certified: bool


def _offsets(user: UserArray, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x - user.positions.reshape((-1,) + (1,) * x.ndim)


def inverse_path_loss(user: UserArray, x):
    """``L(x)``; accepts scalars or arrays."""
    u = _offsets(user, x)
    return np.sum(1.0 / (u**2 + user.vertical_distance**2), axis=0)


def inverse_path_loss_derivative(user: UserArray, x):
    u = _offsets(user, x)
    return np.sum(-2.0 * u / (u**2 + user.vertical_distance**2) ** 2, axis=0)


def inverse_path_loss_second_derivative(user: UserArray, x):
    d2 = user.vertical_distance**2
    u = _offsets(user, x)
    return np.sum((6.0 * u**2 - 2.0 * d2) / (u**2 + d2) ** 3, axis=0)


def is_symmetric(user: UserArray, slack: float = SYMMETRY_SLACK) -> bool:
    """Mirror test of the array about its midpoint."""
    x = user.positions
    xc = user.midpoint
    return bool(np.all(np.abs((x - xc) + (x[::-1] - xc)) <= slack))


def concavity_guaranteed(user: UserArray) -> bool:
    return user.span < user.vertical_distance / np.sqrt(3.0)


def ternary_search(f: Callable[[float], float], lo: float, hi: float, tolerance: float) -> float:
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns the midpoint of the final bracket."""
    while hi - lo > tolerance:
        third = (hi - lo) / 3.0
        m1, m2 = lo + third, hi - third
        if f(m1) < f(m2):
            lo = m1
        else:
            hi = m2
    return 0.5 * (lo + hi)


def optimize_center(user: UserArray, tolerance: float = DEFAULT_TOLERANCE) -> CenterSolution:
    """Choose the x-coordinate of the central PA.

    Symmetric arrays with a concavity guarantee take the array midpoint
    directly. Otherwise ``L`` is maximized numerically over ``[x_1, x_M]``.

    Raises:
        ValueError: if ``tolerance`` is not positive.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    lo, hi = float(user.positions[0]), float(user.positions[-1])
    concave = concavity_guaranteed(user)

    def L(x):
        return float(inverse_path_loss(user, x))

    if is_symmetric(user) and concave:
        xc = user.midpoint
        return CenterSolution(xc, L(xc), SYMMETRIC, True)

    if concave:
        x = ternary_search(L, lo, hi, tolerance)
        return CenterSolution(x, L(x), TERNARY, True)

    # no unimodality guarantee: locate the best cell on a grid, then refine inside it
    step = max(100.0 * tolerance, 1e-4)
    n = int(np.ceil((hi - lo) / step))
    grid = np.linspace(lo, hi, n + 1)
    i = int(np.argmax(inverse_path_loss(user, grid)))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n)]
    x = min(max(ternary_search(L, a, b, tolerance), lo), hi)
    return CenterSolution(x, L(x), GRID_REFINED, False)
