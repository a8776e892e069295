"""Orbits, pseudo-orbits and preimage search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import EmptySequence, NotFound, OutOfDomain, PieceExplosion
from .maps import PiecewiseAffineMap, check_points
from .numeric import GUARD, UNCERTAIN, format_number, is_exact, less, parse_number

DEFAULT_MAX_DEPTH = 64
DEFAULT_MAX_PIECES = 100_000


@dataclass(frozen=True)
class Orbit:
    points: tuple
    map: PiecewiseAffineMap


@dataclass(frozen=True)
class PseudoOrbit:
    points: tuple
    delta: object

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def __len__(self):
        return len(self.points)

    @property
    def exact(self) -> bool:
        return is_exact(self.delta, *self.points)

    def to_json(self) -> dict:
        return {
            "delta": format_number(self.delta),
            "points": [format_number(x) for x in self.points],
        }

    @classmethod
    def from_json(cls, data: dict, exact: bool = True) -> "PseudoOrbit":
        return cls(
            tuple(parse_number(x, exact) for x in data["points"]),
            parse_number(data["delta"], exact),
        )


@dataclass(frozen=True)
class GapReport:
    max_gap: object
    argmax_index: int
    valid: object  # True, False or UNCERTAIN

    def to_json(self) -> dict:
        valid = "uncertain" if self.valid is UNCERTAIN else self.valid
        return {
            "max_gap": format_number(self.max_gap),
            "argmax_index": self.argmax_index,
            "valid": valid,
        }


def iterate(fmap: PiecewiseAffineMap, x, N: int) -> Orbit:
    if N < 0:
        raise ValueError("N must be nonnegative")
    check_points([x])
    points = [x]
    for _ in range(N):
        x = fmap(x)
        points.append(x)
    return Orbit(tuple(points), fmap)


def validate_pseudo_orbit(fmap: PiecewiseAffineMap, points: Sequence, delta) -> GapReport:
    """Largest one-step gap ``|f(x_i) - x_{i+1}|`` and whether it is below ``delta``."""
    if len(points) < 2:
        raise EmptySequence("a pseudo-orbit needs at least two points")
    check_points(points)
    gaps = [abs(fmap(a) - b) for a, b in zip(points, points[1:])]
    idx = max(range(len(gaps)), key=gaps.__getitem__)
    return GapReport(gaps[idx], idx, less(gaps[idx], delta))


def preimages_of(fmap: PiecewiseAffineMap, p) -> list:
    """All ``q`` with ``f(q) = p``, sorted."""
    check_points([p])
    exact = fmap.exact and is_exact(p)
    slack = 0 if exact else GUARD
    found = []
    for j, br in enumerate(fmap.branches):
        q = br.inverse(p)
        lo, hi = fmap.cell(j)
        if not lo - slack <= q <= hi + slack:
            continue
        q = min(max(q, 0), 1)
        if exact:
            if fmap(q) == p:
                found.append(q)
        elif abs(fmap(q) - p) <= slack and fmap.branch_index(q) == j:
            found.append(q)
    return sorted(set(found))


def _split(fmap: PiecewiseAffineMap, seed_lo, seed_hi, scale, offset):
    """Split an affine piece at the breakpoints inside its image.

    Yields ``("piece", lo, hi, branch)`` for open sub-seeds and
    ``("point", q, z)`` for seed points whose image is exactly a breakpoint.
    """
    a, b = scale * seed_lo + offset, scale * seed_hi + offset
    img_lo, img_hi = (a, b) if a <= b else (b, a)
    cuts = [z for z in fmap.breakpoints if img_lo < z < img_hi]
    edges = [img_lo, *cuts, img_hi]
    for z in cuts:
        yield ("point", (z - offset) / scale, z)
    for u0, u1 in zip(edges, edges[1:]):
        j = fmap.branch_index(min(max((u0 + u1) / 2, 0), 1))
        s0, s1 = (u0 - offset) / scale, (u1 - offset) / scale
        yield ("piece", min(s0, s1), max(s0, s1), j)


def forward_search(
    fmap: PiecewiseAffineMap,
    window: tuple,
    target: tuple,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_pieces: int = DEFAULT_MAX_PIECES,
):
    """Smallest ``m >= 1`` and smallest ``y`` in the open ``window`` whose
    ``f^m(y)`` lies in ``target``.

    ``target`` is either ``(p, p)`` (hit ``p`` exactly) or an open interval,
    in which case ``y`` is chosen to land on the midpoint of the first
    reachable sub-interval.  Works forward: the window is cut into pieces on
    which ``f^m`` is affine, so every solution at depth ``m`` is found.
    """
    w_lo, w_hi = window
    t_lo, t_hi = target
    point_target = t_lo == t_hi
    if not w_lo < w_hi:
        raise ValueError("window must be a nonempty open interval")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    if not (0 <= w_lo and w_hi <= 1):
        raise OutOfDomain("window must lie in [0, 1]")

    def hits(v):
        return v == t_lo if point_target else t_lo < v < t_hi

    pieces = [(w_lo, w_hi, 1, 0)]
    points = []  # (y, current value f^d(y))
    for depth in range(1, max_depth + 1):
        new_pieces, new_points = [], []
        for y, v in points:
            new_points.append((y, fmap(v)))
        for seed_lo, seed_hi, scale, offset in pieces:
            for item in _split(fmap, seed_lo, seed_hi, scale, offset):
                if item[0] == "point":
                    _, q, z = item
                    new_points.append((q, fmap(z)))
                else:
                    _, lo, hi, j = item
                    br = fmap.branches[j]
                    new_pieces.append((lo, hi, br.slope * scale, br.slope * offset + br.intercept))
        if len(new_pieces) > max_pieces:
            raise PieceExplosion(f"{len(new_pieces)} pieces at depth {depth}")
        pieces, points = new_pieces, new_points

        solutions = [y for y, v in points if hits(v)]
        for lo, hi, scale, offset in pieces:
            a, b = sorted((scale * lo + offset, scale * hi + offset))
            if point_target:
                if a < t_lo < b:
                    solutions.append((t_lo - offset) / scale)
            else:
                u0, u1 = max(a, t_lo), min(b, t_hi)
                if u0 < u1:
                    solutions.append(((u0 + u1) / 2 - offset) / scale)
        if solutions:
            return min(solutions), depth
    raise NotFound(f"no point of {window} reaches the target within {max_depth} steps")


def find_preimage_in(
    fmap: PiecewiseAffineMap,
    p,
    window: tuple,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_pieces: int = DEFAULT_MAX_PIECES,
) -> tuple:
    """``(y, m)`` with ``y`` in the open window and ``f^m(y) = p``; minimal ``m``, then ``y``."""
    check_points([p])
    y, m = forward_search(fmap, window, (p, p), max_depth, max_pieces)
    if not (fmap.exact and is_exact(y)):
        residual = abs(iterate(fmap, y, m).points[-1] - p)
        if residual > GUARD:
            raise NotFound(f"binary64 preimage residual {residual} exceeds the guard band")
    return y, m


def parse_points(text: str, exact: bool = True) -> tuple:
    return tuple(parse_number(tok, exact) for tok in text.split(",") if tok.strip())
