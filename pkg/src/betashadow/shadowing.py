"""Deciding finite epsilon-shadowing of a pseudo-orbit.

For an affine-branched map, ``f^i`` is affine on every set of starting points
that share an itinerary, so the set of starting points whose orbit stays
within ``epsilon`` of the pseudo-orbit is a finite union of intervals and can
be propagated exactly.  Open intervals lose orbits that pass exactly through a
breakpoint; those are recovered by a separate track of candidate points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import OutOfDomain, PieceExplosion
from .maps import PiecewiseAffineMap, check_points
from .numeric import GUARD, MERGE_TOL, UNCERTAIN, format_number, is_exact, less
from .orbits import DEFAULT_MAX_PIECES, PseudoOrbit, _split

SHADOWED = "Shadowed"
NOT_SHADOWED = "NotShadowed"
UNCERTAIN_STATUS = "Uncertain"


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise-disjoint open intervals."""

    components: tuple = ()

    @classmethod
    def of(cls, intervals: Iterable, tol=None) -> "IntervalUnion":
        items = sorted((lo, hi) for lo, hi in intervals if lo < hi)
        if tol is None:
            tol = 0 if all(is_exact(lo, hi) for lo, hi in items) else MERGE_TOL
        merged = []
        for lo, hi in items:
            if merged and lo - merged[-1][1] <= tol:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        return cls(tuple(merged))

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def union(self, other: "IntervalUnion", tol=None) -> "IntervalUnion":
        return IntervalUnion.of([*self.components, *other.components], tol)

    def measure(self):
        return sum(hi - lo for lo, hi in self.components)

    def contains_interval(self, lo, hi) -> bool:
        return any(a <= lo and hi <= b for a, b in self.components)

    def gaps(self) -> list:
        """Complement of the union in [0, 1], as (lo, hi) pairs (possibly degenerate)."""
        out, prev = [], 0
        for lo, hi in self.components:
            if lo > prev:
                out.append((prev, lo))
            prev = max(prev, hi)
        if prev < 1:
            out.append((prev, 1))
        return out


def forward_image(fmap: PiecewiseAffineMap, u: IntervalUnion, tol=None) -> IntervalUnion:
    """Image of the union, excluding the images of breakpoints themselves."""
    images = []
    for lo, hi in u:
        for item in _split(fmap, lo, hi, 1, 0):
            if item[0] == "piece":
                _, a, b, j = item
                br = fmap.branches[j]
                images.append(tuple(sorted((br(a), br(b)))))
    return IntervalUnion.of(images, tol)


@dataclass
class TrackedPiece:
    """Open seed of starting points on which ``f^step`` equals ``scale*x + offset``."""

    seed_lo: object
    seed_hi: object
    scale: object
    offset: object
    step: int = 0


@dataclass(frozen=True)
class ShadowReport:
    status: str
    witness: Optional[object] = None
    max_deviation: Optional[object] = None
    pieces_peak: int = 0
    candidate_points_checked: int = 0
    epsilon: Optional[object] = field(default=None, compare=False)

    @property
    def shadowed(self) -> bool:
        return self.status == SHADOWED

    def to_json(self) -> dict:
        fmt = lambda v: None if v is None else format_number(v)  # noqa: E731
        return {
            "status": self.status,
            "witness": fmt(self.witness),
            "max_deviation": fmt(self.max_deviation),
            "pieces_peak": self.pieces_peak,
            "candidate_points_checked": self.candidate_points_checked,
        }


def max_deviation(fmap: PiecewiseAffineMap, x, points) -> object:
    """``max_i |f^i(x) - points[i]|``."""
    dev = abs(x - points[0])
    for target in points[1:]:
        x = fmap(x)
        dev = max(dev, abs(x - target))
    return dev


def _follow(fmap, value, start, points, epsilon):
    """Check a single orbit from index ``start`` (where it equals ``value``).

    Returns True/False/UNCERTAIN for "within epsilon at every index >= start".
    """
    x = value
    verdict = True
    for i in range(start, len(points)):
        if i > start:
            x = fmap(x)
        ok = less(abs(x - points[i]), epsilon)
        if ok is False:
            return False
        if ok is UNCERTAIN:
            verdict = UNCERTAIN
    return verdict


def check_shadowing(
    fmap: PiecewiseAffineMap,
    pseudo: PseudoOrbit | Iterable,
    epsilon,
    max_pieces: int = DEFAULT_MAX_PIECES,
) -> ShadowReport:
    """Decide whether some true orbit stays within ``epsilon`` of ``pseudo``.

    Exact when the map, the points and ``epsilon`` are all rational; in
    binary64 any elimination decided inside the guard band makes the verdict
    ``Uncertain`` unless a witness survives.
    """
    points = tuple(pseudo.points if isinstance(pseudo, PseudoOrbit) else pseudo)
    if not points:
        raise OutOfDomain("empty pseudo-orbit")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    check_points(points)
    exact = fmap.exact and is_exact(epsilon, *points)
    rho = 0 if exact else GUARD
    uncertain = False

    x0 = points[0]
    lo, hi = max(x0 - epsilon, 0), min(x0 + epsilon, 1)
    pieces = [TrackedPiece(lo, hi, 1, 0)] if hi - lo > rho else []
    # (seed point, index, value at that index); both ends of [0, 1] can be
    # inside the epsilon-ball even though they are not in any open seed.
    candidates = [(e, 0, e) for e in (0, 1) if abs(e - x0) < epsilon]
    peak = len(pieces)

    for i in range(len(points) - 1):
        w_lo, w_hi = points[i + 1] - epsilon, points[i + 1] + epsilon
        survivors = []
        for piece in pieces:
            for item in _split(fmap, piece.seed_lo, piece.seed_hi, piece.scale, piece.offset):
                if item[0] == "point":
                    _, q, z = item
                    candidates.append((q, i, z))
                    continue
                _, s_lo, s_hi, j = item
                br = fmap.branches[j]
                scale = br.slope * piece.scale
                offset = br.slope * piece.offset + br.intercept
                a, b = scale * s_lo + offset, scale * s_hi + offset
                if a > b:
                    a, b = b, a
                a, b = max(a, w_lo), min(b, w_hi)
                if b - a <= rho:
                    if b - a > -rho and rho:
                        uncertain = True
                    continue
                u, v = (a - offset) / scale, (b - offset) / scale
                survivors.append(TrackedPiece(min(u, v), max(u, v), scale, offset, i + 1))
        survivors.sort(key=lambda p: p.seed_lo)
        if len(survivors) > max_pieces:
            raise PieceExplosion(f"{len(survivors)} live pieces at step {i + 1}")
        pieces = survivors
        peak = max(peak, len(pieces))

    checked = 0
    witness = None
    for piece in pieces:
        mid = (piece.seed_lo + piece.seed_hi) / 2
        verdict = _follow(fmap, mid, 0, points, epsilon)
        if verdict is True:
            witness = mid
            break
        uncertain = True
    if witness is None:
        for q, start, value in candidates:
            checked += 1
            verdict = _follow(fmap, value, start, points, epsilon)
            if verdict is True:
                witness = q
                break
            if verdict is UNCERTAIN:
                uncertain = True

    if witness is not None:
        return ShadowReport(
            SHADOWED, witness, max_deviation(fmap, witness, points), peak, checked, epsilon
        )
    status = UNCERTAIN_STATUS if uncertain else NOT_SHADOWED
    return ShadowReport(status, None, None, peak, checked, epsilon)


def grid_shadow_oracle(
    fmap: PiecewiseAffineMap,
    pseudo: PseudoOrbit | Iterable,
    epsilon,
    samples: int,
    chunk: int = 1_000_000,
):
    """First grid point whose binary64 orbit stays within ``epsilon``, or None.

    Tests ``samples`` uniform points of [0, 1] followed by ``x_0`` and
    ``x_0 +- epsilon/2``.  Finding nothing proves nothing.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    points = np.array([float(x) for x in (pseudo.points if isinstance(pseudo, PseudoOrbit) else pseudo)])
    eps = float(epsilon)
    arrays = fmap.arrays()
    x0 = points[0]
    extras = np.clip(np.array([x0, x0 - eps / 2, x0 + eps / 2]), 0.0, 1.0)
    for start in range(0, samples + len(extras), chunk):
        grid = np.arange(start, min(start + chunk, samples), dtype=float)
        z = grid / (samples - 1) if samples > 1 else np.zeros(len(grid))
        if start + chunk >= samples:
            z = np.concatenate([z, extras])
        if not len(z):
            continue
        start_points = z
        alive = np.flatnonzero(np.abs(z - points[0]) < eps)
        x = z[alive]
        for target in points[1:]:
            if not len(alive):
                break
            x = fmap.evaluate_array(x, arrays)
            keep = np.abs(x - target) < eps
            alive, x = alive[keep], x[keep]
        if len(alive):
            return float(start_points[alive[0]])
    return None
