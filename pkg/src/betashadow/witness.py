"""Pseudo-orbits of transitive maps that no true orbit can epsilon-shadow.

Every construction has the same skeleton.  An *anchor* point ``q`` is chosen
where any shadow is pinned to one side: just right of a breakpoint whose
value is the right-hand limit (a shadow left of it would jump away), or a
domain endpoint.  The anchor's image ``v = f(q)`` is then the extreme value
a shadow can take at index 1, so a point ``y`` placed within ``delta`` of
``v`` on the far side cannot be matched.  Following the true orbit of ``y``
until it lands on a breakpoint, the shadow is forced to the side of that
breakpoint fixed by the orientation of ``f^m`` at ``y``; stepping the
pseudo-orbit onto the other side makes the two orbits separate by a jump.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import EpsilonTooLarge, NoWitness, NotTransitive, WrongCase
from .maps import RIGHT, PiecewiseAffineMap
from .numeric import UNCERTAIN, format_number, sign
from .orbits import DEFAULT_MAX_DEPTH, PseudoOrbit, find_preimage_in, iterate
from .shadowing import ShadowReport, check_shadowing

CASE1 = "Case1"
CASE2 = "Case2"
THEOREM_B = "TheoremB"


@dataclass(frozen=True)
class WitnessMargins:
    eta: object
    epsilon_max: object
    min_cell: object
    min_jump: object


@dataclass(frozen=True)
class WitnessTrace:
    pseudo: PseudoOrbit
    epsilon: object
    case_tag: str
    k: int
    y: object
    m: int
    orientation_m: int
    anchor: object = None
    perturbation: object = None
    w: Optional[object] = None
    l: Optional[int] = None
    orientation_l: Optional[int] = None
    reflected: bool = False
    report: Optional[ShadowReport] = None
    extras: dict = field(default_factory=dict)

    @property
    def delta(self):
        return self.pseudo.delta

    def to_json(self) -> dict:
        fmt = lambda v: None if v is None else format_number(v)  # noqa: E731
        out = {
            **self.pseudo.to_json(),
            "epsilon": fmt(self.epsilon),
            "case": self.case_tag,
            "k": self.k,
            "y": fmt(self.y),
            "m": self.m,
            "orientation_m": self.orientation_m,
            "anchor": fmt(self.anchor),
            "perturbation": fmt(self.perturbation),
            "w": fmt(self.w),
            "l": self.l,
            "orientation_l": self.orientation_l,
            "reflected": self.reflected,
        }
        if self.report is not None:
            out["shadow_report"] = self.report.to_json()
        if self.extras:
            out["extras"] = self.extras
        return out


# -- margins ------------------------------------------------------------------


def _anchor_image(fmap: PiecewiseAffineMap, anchor):
    """``(v, d)``: the anchor's value and the side (+1 above, -1 below) of ``v``
    on which every shadow's image at index 1 lies."""
    kind, idx = anchor
    if kind == "breakpoint":
        f_minus, f_plus = fmap.one_sided_limits(idx)
        if fmap.sides[idx] == RIGHT:
            return f_plus, sign(fmap.branches[idx + 1].slope)
        return f_minus, -sign(fmap.branches[idx].slope)
    if idx == 0:
        return fmap(0), sign(fmap.branches[0].slope)
    return fmap(1), -sign(fmap.branches[-1].slope)


def _room(v, d):
    """Width available for the window on the far side of ``v``."""
    return v if d > 0 else 1 - v


def witness_margins(fmap: PiecewiseAffineMap, k: int, epsilon, room=None) -> WitnessMargins:
    """``eta`` (any ``delta < eta`` works) and the quantities that bound it.

    Raises EpsilonTooLarge naming the first violated constraint: the jumps
    must exceed ``(1 + max|slope|) * epsilon`` and ``epsilon`` must be below
    the shortest partition interval.
    """
    f_minus, f_plus = fmap.one_sided_limits(k)
    min_cell = min(fmap.cell_lengths())
    min_jump = min(fmap.jumps())
    epsilon_max = min(min_cell, min_jump / (1 + fmap.max_abs_slope()))
    if not min_jump > (1 + fmap.max_abs_slope()) * epsilon:
        raise EpsilonTooLarge("jump", f"min jump {min_jump} <= (1 + max|slope|) * {epsilon}")
    if not epsilon < min_cell:
        raise EpsilonTooLarge("cell", f"epsilon {epsilon} >= shortest interval {min_cell}")
    bounds = [epsilon, min_cell - epsilon]
    if fmap.sides[k] == RIGHT and f_plus != 0:
        bounds.append(f_minus)
    if room is not None:
        bounds.append(room)
    return WitnessMargins(min(bounds) / 2, epsilon_max, min_cell, min_jump)


def _resolve_delta(margins: WitnessMargins, delta):
    if delta is None:
        return margins.eta / 2
    if not 0 < delta < margins.eta:
        raise ValueError(f"delta must lie in (0, eta={margins.eta})")
    return delta


# -- the anchored construction --------------------------------------------------


def _anchored(fmap, anchor_point, v, d, k, delta, max_depth):
    """Pseudo-orbit ``q, y, f(y), ..., f^{m-1}(y), z_k -+ p, f(z_k -+ p)``."""
    z = fmap.breakpoints[k]
    window = (max(v - delta, 0), v) if d > 0 else (v, min(v + delta, 1))
    y, m = find_preimage_in(fmap, z, window, max_depth)
    orient = fmap.orientation(m, y)
    # the shadow sits on side d*orient of z at index m+1; step to the other side
    p = delta / 2
    stepped = z - d * orient * p
    points = [anchor_point, *iterate(fmap, y, m - 1).points, stepped, fmap(stepped)]
    return points, y, m, orient, p


def case1_witness(
    fmap: PiecewiseAffineMap, k: int, epsilon, delta=None, max_depth: int = DEFAULT_MAX_DEPTH
) -> WitnessTrace:
    """Anchor at the breakpoint ``z_k`` itself (value taken from the right, nonzero)."""
    if fmap.sides[k] != RIGHT:
        raise WrongCase(f"breakpoint {k} takes its left limit; reflect the map first")
    v, d = _anchor_image(fmap, ("breakpoint", k))
    if v == 0:
        raise WrongCase(f"f(z_{k}) = 0; use case2_witness")
    margins = witness_margins(fmap, k, epsilon, room=_room(v, d))
    delta = _resolve_delta(margins, delta)
    z = fmap.breakpoints[k]
    points, y, m, orient, p = _anchored(fmap, z, v, d, k, delta, max_depth)
    return WitnessTrace(
        PseudoOrbit(points, delta), epsilon, CASE1, k, y, m, orient, anchor=z, perturbation=p
    )


def case2_witness(
    fmap: PiecewiseAffineMap, k: int, epsilon, delta=None, max_depth: int = DEFAULT_MAX_DEPTH
) -> WitnessTrace:
    """For ``f(z_k) = f_+(z_k) = 0``: anchor at the domain endpoint with most room.

    Raises NoWitness when neither endpoint leaves room (both extreme branch
    values are 0 or 1), e.g. for the doubling map, whose branches are onto.
    """
    if fmap.sides[k] != RIGHT:
        raise WrongCase(f"breakpoint {k} takes its left limit; reflect the map first")
    if fmap(fmap.breakpoints[k]) != 0:
        raise WrongCase(f"f(z_{k}) != 0; use case1_witness")
    options = []
    for end in (0, 1):
        v, d = _anchor_image(fmap, ("endpoint", end))
        options.append((_room(v, d), -end, end, v, d))
    room, _, end, v, d = max(options)
    if not room > 0:
        raise NoWitness("no endpoint leaves room below/above its image")
    margins = witness_margins(fmap, k, epsilon, room=room)
    delta = _resolve_delta(margins, delta)
    points, y, m, orient, p = _anchored(fmap, end, v, d, k, delta, max_depth)
    return WitnessTrace(
        PseudoOrbit(points, delta), epsilon, CASE2, k, y, m, orient, anchor=end, perturbation=p
    )


def literal_case2_sequence(
    fmap: PiecewiseAffineMap, k: int, delta, max_depth: int = DEFAULT_MAX_DEPTH
) -> dict:
    """The two-segment sequence ``z_k, y, ..., z_k, w, ..., z_k -+ delta``.

    ``y`` in ``(0, delta)`` and ``w`` in ``(0, y)`` or ``(y, delta)`` by the
    parity of the orientation bit, each reaching ``z_k``.  Kept for study:
    its terminal step lands exactly ``delta`` from ``z_k`` and for maps such
    as the doubling map the sequence is shadowable.
    """
    z = fmap.breakpoints[k]
    y, m = find_preimage_in(fmap, z, (0, delta), max_depth)
    m_bit = 0 if fmap.orientation(m, y) > 0 else 1
    w_window = (0, y) if m_bit == 0 else (y, delta)
    w, l = find_preimage_in(fmap, z, w_window, max_depth)
    l_bit = 0 if fmap.orientation(l, w) > 0 else 1
    points = [
        z,
        *iterate(fmap, y, m - 1).points,
        z,
        *iterate(fmap, w, l - 1).points,
        z - (-1) ** (m_bit + l_bit) * delta,
    ]
    return {"points": points, "y": y, "m": m, "w": w, "l": l, "m_bit": m_bit, "l_bit": l_bit}


# -- dispatch -------------------------------------------------------------------


def _unreflect(trace: WitnessTrace) -> WitnessTrace:
    flip = lambda x: None if x is None else 1 - x  # noqa: E731
    pseudo = PseudoOrbit(tuple(1 - x for x in trace.pseudo.points), trace.pseudo.delta)
    return replace(
        trace,
        pseudo=pseudo,
        y=flip(trace.y),
        w=flip(trace.w),
        anchor=flip(trace.anchor),
        reflected=True,
    )


def theorem_a_witness(
    fmap: PiecewiseAffineMap,
    epsilon,
    delta=None,
    *,
    check_transitive: bool = True,
    certify: bool = True,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> WitnessTrace:
    """A non-shadowable pseudo-orbit for a transitive map.

    Prefers a breakpoint anchor (smallest index with the right-hand value
    taken and nonzero, reflecting the map when only left-valued breakpoints
    qualify), else falls back to an endpoint anchor.  With ``certify`` the
    result carries the exact shadowing verdict in ``report``.
    """
    if check_transitive:
        from .renorm import is_transitive

        verdict = is_transitive(fmap)
        if verdict is UNCERTAIN or not verdict:
            raise NotTransitive(f"map is not transitive (verdict: {verdict})")

    trace = None
    for k in range(fmap.n):
        if fmap.sides[k] == RIGHT and fmap(fmap.breakpoints[k]) != 0:
            trace = case1_witness(fmap, k, epsilon, delta, max_depth)
            break
    if trace is None:
        mirror = fmap.reflect()
        for k in range(mirror.n):
            if mirror.sides[k] == RIGHT and mirror(mirror.breakpoints[k]) != 0:
                trace = _unreflect(case1_witness(mirror, k, epsilon, delta, max_depth))
                break
    if trace is None:
        rights = [k for k in range(fmap.n) if fmap.sides[k] == RIGHT]
        if rights:
            trace = case2_witness(fmap, rights[0], epsilon, delta, max_depth)
        else:
            mirror = fmap.reflect()
            trace = _unreflect(case2_witness(mirror, 0, epsilon, delta, max_depth))
    if certify:
        trace = replace(trace, report=check_shadowing(fmap, trace.pseudo, epsilon))
    return trace
