"""Acceptance suite: eight end-to-end checks, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly as a script.
Every check recomputes its evidence with an oracle that does not share code
paths with the routine under test (grid search, itinerary enumeration,
direct iteration).
"""

from __future__ import annotations

import functools
import random
import sys
import time
from fractions import Fraction as F

import pytest

from betashadow.errors import ShadowingError
from betashadow.expansions import coding, expansion_target, reconstruct, truncation_bound
from betashadow.maps import RIGHT, BetaParams, BranchSpec, PiecewiseAffineMap, beta_map
from betashadow.orbits import iterate, validate_pseudo_orbit
from betashadow.renorm import is_transitive, renormalize, sweep, theorem_b_witness
from betashadow.shadowing import NOT_SHADOWED, SHADOWED, check_shadowing, grid_shadow_oracle
from betashadow.witness import case1_witness, theorem_a_witness

GRID_SAMPLES = 2_000_000


def _report(number: int, passed: bool, detail: str) -> None:
    line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    print(line, flush=True)


def _witness_suite(fmap, trace, eps):
    """validate / exact checker / grid oracle verdicts for one trace."""
    gaps = validate_pseudo_orbit(fmap, trace.pseudo.points, trace.delta)
    report = check_shadowing(fmap, trace.pseudo, eps)
    hit = grid_shadow_oracle(fmap, trace.pseudo, eps, GRID_SAMPLES)
    ok = gaps.valid is True and report.status == NOT_SHADOWED and hit is None
    return ok, f"gap={float(gaps.max_gap):.3g}<delta={float(trace.delta):.3g}:{gaps.valid} check={report.status} grid={hit}"


# -- 1 --------------------------------------------------------------------------------


def criterion_1():
    results = []
    for beta, alpha in (("2", "0"), ("1.9", "0.05"), ("1.8", "0.1")):
        fmap = beta_map(BetaParams.parse(beta, alpha))
        for eps in (F(1, 20), F(1, 50)):
            start = time.perf_counter()
            label = f"({beta},{alpha}) eps={eps}"
            try:
                if is_transitive(fmap) is not True:
                    results.append((False, f"{label}: not confirmed transitive"))
                    continue
                # delta defaults to eta/2 for the margins of the chosen anchor
                trace = theorem_a_witness(fmap, eps, check_transitive=False, certify=False)
                ok, detail = _witness_suite(fmap, trace, eps)
            except ShadowingError as exc:
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            elapsed = time.perf_counter() - start
            ok = ok and elapsed < 10
            results.append((ok, f"{label}: {detail} t={elapsed:.2f}s"))
    return all(ok for ok, _ in results), results


# -- 2 --------------------------------------------------------------------------------


LORENZ = PiecewiseAffineMap(
    (F(1, 2),), (BranchSpec(F(8, 5), F(1, 10)), BranchSpec(F(8, 5), F(-7, 10))), (RIGHT,)
)


def criterion_2():
    eps = F(1, 20)
    start = time.perf_counter()
    trace = case1_witness(LORENZ, 0, eps)
    ok, detail = _witness_suite(LORENZ, trace, eps)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 10 and LORENZ(F(1, 2)) == F(1, 10)
    hull = is_transitive(LORENZ)  # image misses [0, 0.1): reported, not gated
    return ok, [(ok, f"case={trace.case_tag} m={trace.m} {detail} t={elapsed:.2f}s is_transitive={hull}")]


# -- 3 --------------------------------------------------------------------------------


def _random_params(rng):
    beta = F(rng.randrange(105, 201), 100)
    return BetaParams(beta, (2 - beta) * F(rng.randrange(0, 101), 100))


def criterion_3():
    rng = random.Random(20240603)
    params = [_random_params(rng) for _ in range(10)]
    bad_true = []
    for i in range(200):
        fmap = beta_map(params[i % 10])
        x = F(rng.randrange(0, 10**6 + 1), 10**6)
        pts = iterate(fmap, x, rng.randrange(0, 30)).points
        eps = F(rng.randrange(1, 101), 1000)
        report = check_shadowing(fmap, pts, eps)
        if report.status != SHADOWED:
            bad_true.append((i, report.status))
            continue
        fl = fmap.as_float()
        dev = max(abs(a - float(b)) for a, b in zip(iterate(fl, float(report.witness), len(pts) - 1).points, pts))
        if not dev < float(eps) + 1e-10:
            bad_true.append((i, dev))
    contradictions, verdicts = [], {}
    for i in range(100):
        fmap = beta_map(params[i % 10])
        delta = F(rng.randrange(1, 51), 1000)
        pts = [F(rng.randrange(0, 1001), 1000)]
        for _ in range(rng.randrange(1, 20)):
            nxt = fmap(pts[-1]) + delta * F(rng.randrange(-99, 100), 100)
            pts.append(min(max(nxt, F(0)), F(1)))
        eps = F(rng.randrange(1, 101), 1000)
        report = check_shadowing(fmap, pts, eps)
        verdicts[report.status] = verdicts.get(report.status, 0) + 1
        if grid_shadow_oracle(fmap, pts, eps, 100_000) is not None and report.status == NOT_SHADOWED:
            contradictions.append(i)
    ok = not bad_true and not contradictions
    return ok, [
        (not bad_true, f"true orbits: {200 - len(bad_true)}/200 shadowed within eps+1e-10 {bad_true[:3]}"),
        (not contradictions, f"pseudo-orbits: verdicts {verdicts}, grid-vs-checker contradictions {len(contradictions)}"),
    ]


# -- 4 --------------------------------------------------------------------------------


def _clip(iv, lo, lo_closed, hi, hi_closed):
    """Intersect interval (lo, lo_closed, hi, hi_closed) tuples; None if empty."""
    a, ac, b, bc = iv
    if lo > a or (lo == a and not lo_closed):
        a, ac = lo, lo_closed
    if hi < b or (hi == b and not hi_closed):
        b, bc = hi, hi_closed
    if a < b or (a == b and ac and bc):
        return (a, ac, b, bc)
    return None


def _preimage_constraint(iv, scale, offset, lo, lo_closed, hi, hi_closed):
    """Restrict x-interval ``iv`` to ``scale*x + offset`` in the given interval."""
    u, v = (lo - offset) / scale, (hi - offset) / scale
    if scale > 0:
        return _clip(iv, u, lo_closed, v, hi_closed)
    return _clip(iv, v, hi_closed, u, lo_closed)


def _cell_bounds(fmap, j):
    """Closed/open bounds of the set of points evaluated with branch ``j``."""
    edges = fmap.edges
    lo, hi = edges[j], edges[j + 1]
    lo_closed = j == 0 or fmap.sides[j - 1] == RIGHT
    hi_closed = j == fmap.n or fmap.sides[j] != RIGHT
    return lo, lo_closed, hi, hi_closed


def itinerary_oracle(fmap, pts, eps) -> bool:
    """Depth-first enumeration of branch itineraries; each node solves the
    linear constraints ``|f^i(x) - p_i| < eps`` and ``f^i(x) in cell(j_i)``."""

    def dfs(i, iv, scale, offset):
        p = pts[i]
        iv = _preimage_constraint(iv, scale, offset, p - eps, False, p + eps, False)
        if iv is None:
            return False
        if i == len(pts) - 1:
            return True
        for j, br in enumerate(fmap.branches):
            sub = _preimage_constraint(iv, scale, offset, *_cell_bounds(fmap, j))
            if sub is not None and dfs(i + 1, sub, br.slope * scale, br.slope * offset + br.intercept):
                return True
        return False

    return dfs(0, (F(0), True, F(1), True), F(1), F(0))


def criterion_4():
    rng = random.Random(4)
    disagreements, uncertain, tally = [], 0, {}
    for i in range(50):
        beta = F(rng.randrange(11, 21), 10)
        alpha = (2 - beta) * F(rng.randrange(0, 11), 10)
        fmap = beta_map(BetaParams(beta, alpha))
        eps = F(rng.randrange(1, 21), 200)
        pts = list(iterate(fmap, F(rng.randrange(0, 201), 200), rng.randrange(1, 15)).points)
        for k in range(1, len(pts)):
            if rng.random() < 0.3:
                pts[k] = min(max(pts[k] + F(rng.randrange(-40, 41), 200), F(0)), F(1))
        report = check_shadowing(fmap, pts, eps)
        uncertain += report.status not in (SHADOWED, NOT_SHADOWED)
        oracle = itinerary_oracle(fmap, pts, eps)
        tally[report.status] = tally.get(report.status, 0) + 1
        if (report.status == SHADOWED) != oracle:
            disagreements.append((i, report.status, oracle))
    ok = not disagreements and not uncertain
    return ok, [(ok, f"verdicts {tally}; disagreements {disagreements[:3]} ({len(disagreements)}); uncertain {uncertain}")]


# -- 5 and 6 --------------------------------------------------------------------------


@functools.lru_cache(maxsize=1)
def _sweep_cells():
    """Run the full 200x200 sweep; return (cell count, non-transitive rows, seconds)."""
    start = time.perf_counter()
    rows = list(sweep(1.05, 1.4, 200))
    found = [r for r in rows if r["transitive"] != "true"]
    return len(rows), found, time.perf_counter() - start


def _beta_orbit_images(params, lo, hi, steps):
    """Open images of (lo, hi) under T^1..T^steps, split at the cut by hand."""
    beta, alpha = params.beta, params.alpha
    c = (1 - alpha) / beta
    pieces, out = [(lo, hi)], []
    for _ in range(steps):
        nxt = []
        for a, b in pieces:
            if a < c < b:
                nxt += [(beta * a + alpha, F(1)), (F(0), beta * b + alpha - 1)]
            elif b <= c:
                nxt.append((beta * a + alpha, beta * b + alpha))
            else:
                nxt.append((beta * a + alpha - 1, beta * b + alpha - 1))
        pieces = nxt
        out.append(list(pieces))
    return out


def _direct_T(params, x):
    y = params.beta * x + params.alpha
    return y - 1 if y >= 1 else y


def _verify_cell(row):
    params = BetaParams.parse(row["beta"], row["alpha"])
    data = renormalize(params)
    a, b = data.J
    n, length = data.n, data.length
    bn, ah = data.renormalized.beta, data.renormalized.alpha
    images = _beta_orbit_images(params, a, b, n)
    disjoint = all(hi <= a or lo >= b for step in images[:-1] for lo, hi in step)
    invariant = max(abs(min(lo for lo, _ in images[-1]) - a), abs(max(hi for _, hi in images[-1]) - b))
    conj = 0
    inner = lambda u: bn * u + ah - (1 if bn * u + ah >= 1 else 0)  # noqa: E731
    for i in range(1000):
        x = a + length * F(2 * i + 1, 2000)
        y = x
        for _ in range(n):
            y = _direct_T(params, y)
        conj = max(conj, abs((y - a) / length - inner((x - a) / length)))
    rng = random.Random(1)
    returns_ok = True
    for _ in range(100):
        x = a + length * F(rng.randrange(1, 10**6), 10**6)
        for step in range(1, n + 1):
            x = _direct_T(params, x)
            if a <= x <= b:
                break
        returns_ok &= step == n and a <= x <= b
    checks = {
        "invariance": invariant < F(1, 10**9),
        "disjoint": disjoint,
        "conjugacy": conj < F(1, 10**9),
        "beta_n": 1 < bn <= 2 and bn == params.beta**n,
        "alpha_hat": 0 <= ah <= 2 - bn,
        "first_return": returns_ok,
    }
    return all(checks.values()), params, data, checks


def criterion_5():
    cells, found, seconds = _sweep_cells()
    results = [(bool(found), f"sweep {cells} cells in {seconds:.0f}s: {len(found)} non-transitive")]
    for row in found[:5]:
        try:
            ok, params, data, checks = _verify_cell(row)
            failed = [k for k, v in checks.items() if not v]
            results.append((ok, f"beta={row['beta']} alpha={row['alpha']}: n={data.n} J=({float(data.J[0]):.6f},{float(data.J[1]):.6f}) failed={failed}"))
        except ShadowingError as exc:
            results.append((False, f"beta={row['beta']} alpha={row['alpha']}: {type(exc).__name__}: {exc}"))
    return all(ok for ok, _ in results) and len(results) > 1, results


def criterion_6():
    _, found, _ = _sweep_cells()
    results = []
    for row in found[:5]:
        start = time.perf_counter()
        try:
            params = BetaParams.parse(row["beta"], row["alpha"])
            data = renormalize(params)
            eps = data.length / 4
            trace = theorem_b_witness(params, eps, certify=False)
            ok, detail = _witness_suite(beta_map(params), trace, eps)
        except ShadowingError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < 60
        results.append((ok, f"beta={row['beta']} alpha={row['alpha']}: {detail} t={elapsed:.2f}s"))
    return bool(results) and all(ok for ok, _ in results), results


# -- 7 --------------------------------------------------------------------------------


def criterion_7():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(100):
        params = _random_params(rng)
        x = F(rng.randrange(0, 10**6 + 1), 10**6)
        for N in (10, 20, 40):
            err = abs(reconstruct(coding(params, x, N)) - expansion_target(params, x))
            worst = max(worst, float(err / truncation_bound(params, N)))
    doubling = BetaParams(F(2), F(0))
    exact = all(reconstruct(coding(doubling, F(5, 8), N)) == F(5, 8) for N in range(4, 41))
    ok = worst <= 1 and exact
    return ok, [(ok, f"max error/bound = {worst:.3f} over 300 cases; (2,0) x=0.625 exact for N>=4: {exact}")]


# -- 8 --------------------------------------------------------------------------------

FOLDED = PiecewiseAffineMap(
    (F(1, 2),), (BranchSpec(F(-3, 2), F(9, 10)), BranchSpec(F(3, 2), F(-1, 2))), (RIGHT,)
)


def _difference_sign(fmap, j, z):
    """Sign of f^j(z + h) - f^j(z) for a tiny h (orbit kept off breakpoints)."""
    h = F(1, 10**30)
    a, b = iterate(fmap, z, j).points[-1], iterate(fmap, z + h, j).points[-1]
    return (b > a) - (b < a)


def criterion_8():
    rng = random.Random(8)
    beta_bad = 0
    for _ in range(1000):
        fmap = beta_map(_random_params(rng))
        j, z = rng.randrange(0, 21), F(rng.randrange(0, 10**4 + 1), 10**4)
        beta_bad += fmap.orientation(j, z) != 1
    hand = {(0, F(1, 4)): 1, (1, F(1, 4)): -1, (2, F(1, 4)): -1}
    hand_ok = all(FOLDED.orientation(j, z) == s for (j, z), s in hand.items())
    diff_bad = 0
    for _ in range(200):
        j, z = rng.randrange(0, 12), F(rng.randrange(1, 10**4), 10**4)
        orbit = iterate(FOLDED, z, j).points
        if any(p == F(1, 2) for p in orbit):
            continue
        diff_bad += FOLDED.orientation(j, z) != _difference_sign(FOLDED, j, z)
    ok = beta_bad == 0 and hand_ok and diff_bad == 0
    return ok, [(ok, f"beta-map pairs not +1: {beta_bad}/1000; hand values match: {hand_ok}; finite-difference mismatches: {diff_bad}")]


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def _run(number):
    passed, results = CRITERIA[number]()
    for ok, detail in results:
        print(f"    [{'ok' if ok else 'FAILED'}] {detail}")
    failing = [d for ok, d in results if not ok]
    _report(number, passed, failing[0] if failing else f"{len(results)} check(s)")
    return passed, results


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    with capsys.disabled():
        print()
        passed, results = _run(number)
    assert passed, "; ".join(d for ok, d in results if not ok)


if __name__ == "__main__":
    outcome = [_run(k)[0] for k in sorted(CRITERIA)]
    sys.exit(0 if all(outcome) else 1)
