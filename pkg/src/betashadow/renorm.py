"""Transitivity, first-return renormalization of beta-transformations, and the
lift of return-map witnesses back to the original map."""

from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import (
    DepthExceeded,
    EpsilonTooLarge,
    InvalidParams,
    IsTransitive,
    NoStabilization,
    PointOutsideJ,
    VerificationFailed,
)
from .maps import BetaParams, PiecewiseAffineMap, beta_map
from .numeric import MERGE_TOL, UNCERTAIN, format_number, is_exact
from .orbits import (
    DEFAULT_MAX_DEPTH,
    PseudoOrbit,
    _split,
    find_preimage_in,
    forward_search,
    iterate,
    preimages_of,
)
from .shadowing import IntervalUnion, check_shadowing, forward_image
from .witness import THEOREM_B, WitnessTrace, theorem_a_witness

DEFAULT_TOL = 1e-6
RESIDUAL_TOL = 1e-9


# -- invariant hulls and transitivity ----------------------------------------------


def _subtract(u, v, tol, starts=None) -> list:
    """Parts of ``u`` not covered by the sorted disjoint intervals ``v``,
    dropping slivers of width <= tol."""
    v = list(v)
    if starts is None:
        starts = [a for a, _ in v]
    out = []
    for lo, hi in u:
        # components of v that can overlap (lo, hi) start before hi
        i = max(bisect_left(starts, lo) - 1, 0)
        p = lo
        while i < len(starts) and starts[i] < hi:
            a, b = v[i]
            if b > p:
                if a > p and a - p > tol:
                    out.append((p, a))
                p = max(p, b)
            i += 1
        if hi - p > tol:
            out.append((p, hi))
    return out


def _merge_into(comps: list, starts: list, fresh: list, tol) -> None:
    """Insert intervals into the sorted disjoint list ``comps`` in place."""
    for lo, hi in fresh:
        i = bisect_left(starts, lo)
        if i and lo - comps[i - 1][1] <= tol:
            i -= 1
            lo = comps[i][0]
        j = i
        while j < len(comps) and comps[j][0] - hi <= tol:
            hi = max(hi, comps[j][1])
            j += 1
        comps[i:j] = [(lo, hi)]
        starts[i:j] = [lo]


def _covers(comps: list, starts: list, lo, hi) -> bool:
    i = bisect_right(starts, lo) - 1
    return i >= 0 and comps[i][1] >= hi


def invariant_hull(
    fmap: PiecewiseAffineMap,
    u: IntervalUnion,
    max_rounds: int = 10_000,
    tol=None,
    stop_when_covers=None,
) -> IntervalUnion:
    """Stabilised union of the forward images of ``u``.

    Each round maps only the part added in the previous round.  With
    ``stop_when_covers=(lo, hi)`` the iteration returns as soon as the hull
    contains that interval.
    """
    if not len(u):
        raise ValueError("hull of an empty union")
    if tol is None:
        tol = 0 if fmap.exact and all(is_exact(a, b) for a, b in u) else MERGE_TOL
    frontier = IntervalUnion.of(u.components, tol)
    comps = list(frontier.components)
    starts = [a for a, _ in comps]
    for _ in range(max_rounds):
        if stop_when_covers is not None and _covers(comps, starts, *stop_when_covers):
            break
        image = forward_image(fmap, frontier, tol)
        fresh = _subtract(image, comps, tol, starts)
        if not fresh:
            break
        _merge_into(comps, starts, fresh, tol)
        frontier = IntervalUnion.of(fresh, tol)
    else:
        raise NoStabilization(f"hull still growing after {max_rounds} rounds")
    return IntervalUnion(tuple(comps))


def is_transitive(fmap: PiecewiseAffineMap, tol=DEFAULT_TOL, max_rounds: int = 10_000):
    """True, False or UNCERTAIN from hulls of small windows.

    Windows of width ``2*tol`` sit on every breakpoint and every partition
    midpoint.  True when every hull covers ``(tol, 1 - tol)``; False when
    some hull misses an interval wider than ``2*tol``.
    """
    tol = Fraction(tol) if fmap.exact else float(tol)
    centres = [*fmap.breakpoints, *[(a + b) / 2 for a, b in zip(fmap.edges, fmap.edges[1:])]]
    target = (tol, 1 - tol)
    verdict = True
    for c in centres:
        window = IntervalUnion.of([(max(c - tol, 0), min(c + tol, 1))])
        hull = invariant_hull(fmap, window, max_rounds, stop_when_covers=target)
        if hull.contains_interval(*target):
            continue
        if any(b - a > 2 * tol for a, b in hull.gaps()):
            return False
        verdict = UNCERTAIN
    return verdict


# -- renormalization -------------------------------------------------------------


@dataclass(frozen=True)
class RenormalizationData:
    J: tuple
    n: int
    renormalized: BetaParams
    h: tuple  # (scale, offset): h(x) = scale*x + offset maps J onto [0, 1]
    residuals: dict
    depth: int = 1
    warnings: tuple = ()

    @property
    def length(self):
        return self.J[1] - self.J[0]

    def h_map(self, x):
        return self.h[0] * x + self.h[1]

    def h_inverse(self, u):
        return self.J[0] + self.length * u

    def to_json(self) -> dict:
        return {
            "J": [format_number(self.J[0]), format_number(self.J[1])],
            "n": self.n,
            "beta_n": format_number(self.renormalized.beta),
            "alpha_hat": format_number(self.renormalized.alpha),
            "h": {"scale": format_number(self.h[0]), "offset": format_number(self.h[1])},
            "residuals": {k: format_number(v) for k, v in self.residuals.items()},
            "depth": self.depth,
            "warnings": list(self.warnings),
        }


def _close(a, b, tol):
    return a == b if is_exact(a, b) else abs(a - b) <= tol


def _left_limit_orbit(fmap, x, steps):
    """Iterate the approach-from-below limit (valid for increasing branches)."""
    for _ in range(steps):
        x = fmap.evaluate_limit(x, from_left=True)
    return x


def _try_period(params: BetaParams, fmap: PiecewiseAffineMap, n: int, tol):
    """Renormalization data for return time ``n``, or None if it does not exist."""
    beta = params.beta
    c = fmap.breakpoints[0]
    a = iterate(fmap, fmap(c), n - 1).points[-1]
    b = _left_limit_orbit(fmap, fmap.one_sided_limits(0)[0], n - 1)
    if not a < c < b:
        return None
    length = b - a
    halves = [(a, c, 1, 0), (c, b, 1, 0)]
    for i in range(1, n + 1):
        nxt = []
        for lo, hi, scale, offset in halves:
            items = [it for it in _split(fmap, lo, hi, scale, offset) if it[0] == "piece"]
            if len(items) != 1:
                return None  # an intermediate image straddles the cut
            _, s_lo, s_hi, j = items[0]
            br = fmap.branches[j]
            nxt.append((s_lo, s_hi, br.slope * scale, br.slope * offset + br.intercept))
        halves = nxt
        if i < n:
            for lo, hi, scale, offset in halves:
                img_lo, img_hi = sorted((scale * lo + offset, scale * hi + offset))
                if img_hi > a and img_lo < b:
                    return None  # returns to J before time n
    (_, _, s_left, o_left), (_, _, s_right, o_right) = halves
    alpha_hat = (s_left * a + o_left - a) / length
    if not (_close(o_left - o_right, length, tol) and _close(s_left, beta**n, tol)):
        return None
    # both branches of T^n on J, including the closed ends, must be affine
    if not _close(iterate(fmap, a, n).points[-1], s_left * a + o_left, tol):
        return None
    if not _close(iterate(fmap, b, n).points[-1], s_right * b + o_right, tol):
        return None
    if not _close(iterate(fmap, c, n).points[-1], a, tol):
        return None
    if not _close(s_left * c + o_left, b, tol):
        return None
    try:
        if not is_exact(alpha_hat):
            alpha_hat = min(max(alpha_hat, 0.0), 2 - beta**n)
        renormalized = BetaParams(beta**n, alpha_hat)
    except InvalidParams:
        return None
    h = (1 / length, -a / length)
    return a, b, renormalized, h


def _residuals(params, fmap, a, b, n, renormalized, h, grid=1000, samples=100, seed=0):
    """Invariance, conjugacy defect on a grid, and first-return check."""
    inner = beta_map(renormalized)
    c = fmap.breakpoints[0]
    length = b - a
    exact = is_exact(a, b)
    hmap = lambda x: h[0] * x + h[1]  # noqa: E731
    image_lo = min(iterate(fmap, a, n).points[-1], iterate(fmap, c, n).points[-1])
    image_hi = max(_left_limit_orbit(fmap, c, n), iterate(fmap, b, n).points[-1])
    invariance = max(abs(image_lo - a), abs(image_hi - b))
    conjugacy = 0
    for i in range(grid):
        frac = Fraction(2 * i + 1, 2 * grid) if exact else (i + 0.5) / grid
        x = a + length * frac
        lhs = hmap(iterate(fmap, x, n).points[-1])
        rhs = inner(hmap(x))
        conjugacy = max(conjugacy, abs(lhs - rhs))
    rng = random.Random(seed)
    return_errors = 0
    for _ in range(samples):
        frac = Fraction(rng.randrange(1, 10**9), 10**9) if exact else rng.random()
        x = a + length * frac
        for i in range(1, n + 1):
            x = fmap(x)
            if a <= x <= b:
                break
        return_errors += i != n or not (a <= x <= b)
    return {"invariance": invariance, "conjugacy": conjugacy, "first_return": return_errors}


def _renormalize_once(params: BetaParams, tol, seed=0):
    fmap = beta_map(params)
    beta = params.beta
    n = 2
    while beta**n <= 2:
        found = _try_period(params, fmap, n, tol)
        if found is not None:
            a, b, renormalized, h = found
            res = _residuals(params, fmap, a, b, n, renormalized, h, seed=seed)
            if res["invariance"] > tol or res["conjugacy"] > tol or res["first_return"]:
                raise VerificationFailed(f"return time {n}: residuals {res}")
            return RenormalizationData((a, b), n, renormalized, h, res)
        n += 1
    raise VerificationFailed(f"no renormalization found for {params}")


def renormalize(
    params: BetaParams,
    depth_cap: int = 5,
    tol=RESIDUAL_TOL,
    check_transitive: bool = True,
    seed: int = 0,
) -> RenormalizationData:
    """First-return renormalization of a non-transitive ``T_{beta,alpha}``.

    Finds the shortest return time ``n`` whose interval ``J`` around the cut
    satisfies ``T^n(J) = J`` with ``T^i(J)`` disjoint from ``J`` for
    ``0 < i < n``, recovers ``alpha_hat`` from the affine return map and
    verifies every clause.  Recurses while the renormalized map is still
    not transitive.
    """
    fmap = beta_map(params)
    if check_transitive and is_transitive(fmap) is True:
        raise IsTransitive(f"{params} is transitive")
    data = _renormalize_once(params, tol, seed)
    depth = 1
    while is_transitive(beta_map(data.renormalized)) is not True:
        if depth >= depth_cap:
            raise DepthExceeded(f"still not transitive after {depth_cap} renormalizations")
        deeper = _renormalize_once(data.renormalized, tol, seed)
        a = data.h_inverse(deeper.J[0])
        b = data.h_inverse(deeper.J[1])
        n = data.n * deeper.n
        h = (1 / (b - a), -a / (b - a))
        res = _residuals(params, fmap, a, b, n, deeper.renormalized, h, seed=seed)
        if res["invariance"] > tol or res["conjugacy"] > tol or res["first_return"]:
            raise VerificationFailed(f"composed renormalization: residuals {res}")
        depth += 1
        data = RenormalizationData((a, b), n, deeper.renormalized, h, res, depth)
    if data.n == 2:
        data = replace(data, warnings=("return time n = 2",))
    return data


# -- witnesses through the return map ----------------------------------------------


def lift_pseudo_orbit(params: BetaParams, data: RenormalizationData, inner: PseudoOrbit) -> PseudoOrbit:
    """Interleave ``T^l(x_j)``, ``l < n``, between consecutive return-map points."""
    a, b = data.J
    if any(not a <= x <= b for x in inner.points):
        raise PointOutsideJ("every inner point must lie in J")
    fmap = beta_map(params)
    out = []
    for x in inner.points[:-1]:
        out.extend(iterate(fmap, x, data.n - 1).points)
    out.append(inner.points[-1])
    return PseudoOrbit(tuple(out), inner.delta)


def theorem_b_witness(
    params: BetaParams,
    epsilon,
    delta=None,
    *,
    certify: bool = True,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> WitnessTrace:
    """A non-shadowable pseudo-orbit for any beta-transformation that admits one.

    Transitive parameters are delegated to :func:`theorem_a_witness`.
    Otherwise a witness of the renormalized map is pulled back into ``J``
    (distances scale by ``|J|``), prefixed by an excursion through the
    midpoint of ``J`` and lifted to ``T_{beta,alpha}``.
    """
    fmap = beta_map(params)
    verdict = is_transitive(fmap)
    if verdict is True:
        return theorem_a_witness(fmap, epsilon, delta, check_transitive=False, certify=certify)
    data = renormalize(params, check_transitive=False)
    length = data.length
    if not 0 < epsilon < length / 2:
        raise EpsilonTooLarge("half-J", f"epsilon must lie in (0, |J|/2 = {length / 2})")
    inner_map = beta_map(data.renormalized)
    inner_delta = None if delta is None else delta / length
    inner = theorem_a_witness(
        inner_map, epsilon / length, inner_delta, check_transitive=False, certify=False
    )
    w = inner.pseudo.points
    d_in = inner.pseudo.delta
    half = Fraction(1, 2) if is_exact(length) else 0.5

    def window(centre):
        return (max(centre - d_in, 0), min(centre + d_in, 1))

    y_star, k = find_preimage_in(inner_map, half, window(inner_map(w[-1])), max_depth)
    z_window = window(inner_map(half))
    if preimages_of(inner_map, w[0]):
        z_star, t = find_preimage_in(inner_map, w[0], z_window, max_depth)
    else:
        # w_0 has no preimage (e.g. the endpoint 1): land within delta/2 of it
        target = (max(w[0] - d_in / 2, 0), min(w[0] + d_in / 2, 1))
        z_star, t = forward_search(inner_map, z_window, target, max_depth)
    chain = [
        *w,
        *iterate(inner_map, y_star, k - 1).points,
        half,
        *iterate(inner_map, z_star, t - 1).points,
        *w,
    ]
    in_j = PseudoOrbit(tuple(data.h_inverse(u) for u in chain), d_in * length)
    lifted = lift_pseudo_orbit(params, data, in_j)
    trace = WitnessTrace(
        lifted,
        epsilon,
        THEOREM_B,
        inner.k,
        inner.y,
        inner.m,
        inner.orientation_m,
        anchor=inner.anchor,
        perturbation=inner.perturbation,
        extras={
            "J": [format_number(data.J[0]), format_number(data.J[1])],
            "n": data.n,
            "a_star": format_number(data.h_inverse(half)),
            "y_star": format_number(data.h_inverse(y_star)),
            "k_steps": k,
            "z_star": format_number(data.h_inverse(z_star)),
            "t_steps": t,
            "inner_case": inner.case_tag,
            "inner_length": len(w),
        },
    )
    if certify:
        trace = replace(trace, report=check_shadowing(fmap, lifted, epsilon))
    return trace


# -- parameter sweeps ------------------------------------------------------------

SWEEP_COLUMNS = ("beta", "alpha", "transitive", "n", "J_lo", "J_hi", "alpha_hat", "residual", "error")


def sweep_grid(beta_lo, beta_hi, resolution: int) -> list:
    """``resolution`` betas (endpoints included), each with ``resolution``
    alphas spanning ``[0, 2 - beta]``; beta-major order."""
    if resolution < 2:
        raise InvalidParams("sweep resolution must be at least 2")
    beta_lo, beta_hi = float(beta_lo), float(beta_hi)
    if not 1 < beta_lo <= beta_hi <= 2:
        raise InvalidParams("beta range must lie in (1, 2]")
    cells = []
    for i in range(resolution):
        beta = beta_lo + (beta_hi - beta_lo) * i / (resolution - 1)
        top = 2 - beta
        cells.extend((beta, min(top * j / (resolution - 1), top)) for j in range(resolution))
    return cells


def sweep_cell(beta: float, alpha: float, tol=DEFAULT_TOL) -> dict:
    """One sweep row.  Failures are reported in ``error`` rather than raised."""
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row["beta"], row["alpha"] = repr(beta), repr(alpha)
    try:
        params = BetaParams(beta, alpha)
        verdict = is_transitive(beta_map(params), tol)
        row["transitive"] = "uncertain" if verdict is UNCERTAIN else str(verdict).lower()
        if verdict is not True:
            data = renormalize(params, check_transitive=False)
            row.update(
                n=data.n,
                J_lo=repr(data.J[0]),
                J_hi=repr(data.J[1]),
                alpha_hat=repr(data.renormalized.alpha),
                residual=repr(max(data.residuals["invariance"], data.residuals["conjugacy"])),
            )
    except Exception as exc:  # one bad cell must not stop the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def sweep(beta_lo, beta_hi, resolution: int, tol=DEFAULT_TOL):
    """Yield sweep rows in deterministic beta-major order."""
    for beta, alpha in sweep_grid(beta_lo, beta_hi, resolution):
        yield sweep_cell(beta, alpha, tol)
