"""Discontinuous piecewise affine monotone interval maps on [0, 1].

A map is stored as its breakpoints ``z_0 < ... < z_{n-1}``, one affine branch
per partition interval ``I_0 = (0, z_0), ..., I_n = (z_{n-1}, 1)`` and, for
every breakpoint, the side whose branch defines the value at the breakpoint.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import IndexOutOfRange, InvalidMap, InvalidParams, OutOfDomain
from .numeric import GUARD, format_number, is_exact, parse_number, sign

RIGHT = "right"
LEFT = "left"


@dataclass(frozen=True)
class BetaParams:
    """Parameters of ``x -> beta*x + alpha (mod 1)``."""

    beta: object
    alpha: object

    def __post_init__(self):
        beta, alpha = self.beta, self.alpha
        if not 1 < beta <= 2:
            raise InvalidParams(f"beta must lie in (1, 2], got {beta}")
        if not 0 <= alpha <= 2 - beta:
            raise InvalidParams(f"alpha must lie in [0, 2 - beta], got {alpha}")

    @classmethod
    def parse(cls, beta, alpha, exact: bool = True) -> "BetaParams":
        return cls(parse_number(beta, exact), parse_number(alpha, exact))

    @property
    def exact(self) -> bool:
        return is_exact(self.beta, self.alpha)

    @property
    def cut(self):
        return (1 - self.alpha) / self.beta

    def to_json(self) -> dict:
        return {"beta": format_number(self.beta), "alpha": format_number(self.alpha)}


@dataclass(frozen=True)
class BranchSpec:
    slope: object
    intercept: object

    def __post_init__(self):
        if self.slope == 0:
            raise InvalidMap("branch slope must be nonzero")

    def __call__(self, x):
        return self.slope * x + self.intercept

    def inverse(self, y):
        return (y - self.intercept) / self.slope


@dataclass(frozen=True)
class PiecewiseAffineMap:
    breakpoints: tuple
    branches: tuple
    sides: tuple

    def __post_init__(self):
        bps, branches, sides = self.breakpoints, self.branches, self.sides
        object.__setattr__(self, "breakpoints", tuple(bps))
        object.__setattr__(self, "branches", tuple(branches))
        object.__setattr__(self, "sides", tuple(sides))
        n = len(self.breakpoints)
        if n < 1:
            raise InvalidMap("at least one breakpoint (discontinuity) is required")
        if len(self.branches) != n + 1 or len(self.sides) != n:
            raise InvalidMap("need n+1 branches and n sides for n breakpoints")
        if any(s not in (LEFT, RIGHT) for s in self.sides):
            raise InvalidMap(f"sides must be '{LEFT}' or '{RIGHT}'")
        edges = (0, *self.breakpoints, 1)
        if any(not a < b for a, b in zip(edges, edges[1:])):
            raise InvalidMap("breakpoints must be strictly increasing inside (0, 1)")
        slack = 0 if self.exact else GUARD
        for j, br in enumerate(self.branches):
            lo, hi = sorted((br(edges[j]), br(edges[j + 1])))
            if lo < -slack or hi > 1 + slack:
                raise InvalidMap(f"branch {j} maps its interval outside [0, 1]")
        for m in range(n):
            f_minus, f_plus = self.one_sided_limits(m)
            if f_minus == f_plus:
                raise InvalidMap(f"no jump at breakpoint {m}; the map is continuous there")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_lists(cls, breakpoints, branches, sides) -> "PiecewiseAffineMap":
        return cls(tuple(breakpoints), tuple(BranchSpec(s, t) for s, t in branches), tuple(sides))

    # -- basic structure --------------------------------------------------

    @property
    def n(self) -> int:
        """Number of breakpoints."""
        return len(self.breakpoints)

    @property
    def exact(self) -> bool:
        values = [*self.breakpoints]
        for br in self.branches:
            values += [br.slope, br.intercept]
        return is_exact(*values)

    @property
    def edges(self) -> tuple:
        return (0, *self.breakpoints, 1)

    def cell(self, j: int) -> tuple:
        """Endpoints of the partition interval ``I_j``."""
        edges = self.edges
        return edges[j], edges[j + 1]

    def cell_lengths(self) -> list:
        edges = self.edges
        return [b - a for a, b in zip(edges, edges[1:])]

    def max_abs_slope(self):
        return max(abs(br.slope) for br in self.branches)

    def branch_index(self, x) -> int:
        """Index of the branch that defines ``f(x)`` (sides decide at breakpoints)."""
        if not 0 <= x <= 1:
            raise OutOfDomain(f"{x} is outside [0, 1]")
        j = bisect_left(self.breakpoints, x)
        if j < self.n and self.breakpoints[j] == x and self.sides[j] == RIGHT:
            j += 1
        return j

    def evaluate(self, x):
        y = self.branches[self.branch_index(x)](x)
        if isinstance(y, float):
            y = min(1.0, max(0.0, y))
        return y

    __call__ = evaluate

    def evaluate_limit(self, x, from_left: bool):
        """One-sided limit of ``f`` at ``x`` (``from_left`` approaches from below)."""
        if not 0 <= x <= 1:
            raise OutOfDomain(f"{x} is outside [0, 1]")
        if (from_left and x == 0) or (not from_left and x == 1):
            return self.evaluate(x)
        j = bisect_left(self.breakpoints, x)
        if j < self.n and self.breakpoints[j] == x and not from_left:
            j += 1
        return self.branches[j](x)

    def one_sided_limits(self, m: int) -> tuple:
        """``(f_-(z_m), f_+(z_m))``: limits from below and from above."""
        if not 0 <= m < self.n:
            raise IndexOutOfRange(f"breakpoint index {m} out of range 0..{self.n - 1}")
        z = self.breakpoints[m]
        return self.branches[m](z), self.branches[m + 1](z)

    def jumps(self) -> list:
        return [abs(b - a) for a, b in map(self.one_sided_limits, range(self.n))]

    def orientation(self, j: int, z) -> int:
        """Sign (+1/-1) of the branch of ``f^j`` containing ``f^j(z)``."""
        if j < 0:
            raise ValueError("iterate count must be nonnegative")
        result = 1
        x = z
        for _ in range(j):
            k = self.branch_index(x)
            result *= sign(self.branches[k].slope)
            x = self.evaluate(x)
        return result

    def reflect(self) -> "PiecewiseAffineMap":
        """Conjugate by ``x -> 1 - x``; an involution that swaps left/right sides."""
        bps = tuple(1 - z for z in reversed(self.breakpoints))
        branches = tuple(
            BranchSpec(br.slope, 1 - br.slope - br.intercept) for br in reversed(self.branches)
        )
        sides = tuple(LEFT if s == RIGHT else RIGHT for s in reversed(self.sides))
        return PiecewiseAffineMap(bps, branches, sides)

    def as_float(self) -> "PiecewiseAffineMap":
        return PiecewiseAffineMap(
            tuple(float(z) for z in self.breakpoints),
            tuple(BranchSpec(float(b.slope), float(b.intercept)) for b in self.branches),
            self.sides,
        )

    # -- vectorised evaluation (binary64) ---------------------------------

    def arrays(self):
        """Float arrays ``(breakpoints, slopes, intercepts, left_mask)``."""
        return (
            np.array([float(z) for z in self.breakpoints]),
            np.array([float(b.slope) for b in self.branches]),
            np.array([float(b.intercept) for b in self.branches]),
            np.array([s == LEFT for s in self.sides]),
        )

    def evaluate_array(self, x: np.ndarray, arrays=None) -> np.ndarray:
        bps, slopes, intercepts, left = arrays if arrays is not None else self.arrays()
        idx = np.searchsorted(bps, x, side="right")
        at_left_bp = idx > 0
        at_left_bp[at_left_bp] = (x[at_left_bp] == bps[idx[at_left_bp] - 1]) & left[
            idx[at_left_bp] - 1
        ]
        idx = idx - at_left_bp
        return np.clip(slopes[idx] * x + intercepts[idx], 0.0, 1.0)

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_number(z) for z in self.breakpoints],
            "branches": [
                {"slope": format_number(b.slope), "intercept": format_number(b.intercept)}
                for b in self.branches
            ],
            "sides": list(self.sides),
        }

    @classmethod
    def from_json(cls, data: dict, exact: bool = True) -> "PiecewiseAffineMap":
        """Read the general schema or the ``{"beta", "alpha"}`` shorthand."""
        if "beta" in data:
            return beta_map(BetaParams.parse(data["beta"], data["alpha"], exact))
        num = lambda v: parse_number(v, exact)  # noqa: E731
        return cls(
            tuple(num(z) for z in data["breakpoints"]),
            tuple(BranchSpec(num(b["slope"]), num(b["intercept"])) for b in data["branches"]),
            tuple(s.lower() for s in data["sides"]),
        )


def beta_map(params: BetaParams) -> PiecewiseAffineMap:
    """``T_{beta,alpha}`` with its cut ``c = (1-alpha)/beta`` assigned to the right branch."""
    beta, alpha = params.beta, params.alpha
    return PiecewiseAffineMap(
        (params.cut,),
        (BranchSpec(beta, alpha), BranchSpec(beta, alpha - 1)),
        (RIGHT,),
    )


def beta_params_of(fmap: PiecewiseAffineMap) -> BetaParams | None:
    """Recover ``(beta, alpha)`` when ``fmap`` is a beta-transformation."""
    if fmap.n != 1 or fmap.sides != (RIGHT,):
        return None
    b0, b1 = fmap.branches
    if b0.slope != b1.slope or b0.intercept - b1.intercept != 1:
        return None
    try:
        return BetaParams(b0.slope, b0.intercept)
    except InvalidParams:
        return None


def check_points(points: Sequence) -> None:
    for x in points:
        if not 0 <= x <= 1:
            raise OutOfDomain(f"{x} is outside [0, 1]")


def to_backend(value, exact: bool):
    return Fraction(value) if exact else float(value)
