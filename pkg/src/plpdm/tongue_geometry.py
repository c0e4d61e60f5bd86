"""Tongue and eye boundaries at fixed height b, and constructive tongue seeds.

Along a fixed itinerary and fixed lift laps every iterate is affine in a:

    x_{j+1}(a) = B^{s_j} x_j(a) + a + const,   d x_{j+1}/da = B^{s_j} d x_j/da + 1,

so the a at which a break point becomes periodic is one linear solve. At the
left end of a component the attracting point in [1/2, 1) closest to 1/2
coincides with 1/2; at the right end the rightmost such point reaches 0 ~ 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cycle_search import (
    SearchOptions,
    Outcome,
    _detect_batch,
    _report,
    _window_batch,
    find_attractor,
)
from .map_core import MINUS, Params, circle, circle_dist, lift_offset, slopes, step
from .semiconj import lift_shift
from .symbolic import (
    Classification,
    Cycle,
    Itinerary,
    classify,
    cycles_with_itinerary,
    least_rotation,
)

PRESWEEP = 2048
BISECT_TOL = 1e-10
SLACK = 1e-12


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class NoBoundaryFound(ValueError):
    pass


class AmbiguousBoundary(ValueError):
    def __init__(self, candidates):
        self.candidates = list(candidates)
        spans = ", ".join(f"[{lo:.6f}, {hi:.6f}]" for lo, hi in self.candidates)
        super().__init__(f"{len(self.candidates)} components match; pass `near` to pick one: {spans}")


class EmptyInterval(ValueError):
    pass


class StageCheckFailed(RuntimeError):
    def __init__(self, stage: int, detail: str = ""):
        self.stage = stage
        super().__init__(f"nesting stage {stage} failed" + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class BoundaryQuery:
    b: float
    itinerary: Itinerary
    side: Side
    near: "float | None" = None

    def __post_init__(self):
        object.__setattr__(self, "itinerary", Itinerary.parse(self.itinerary))
        object.__setattr__(self, "side", Side(self.side))


@dataclass(frozen=True)
class BoundaryResult:
    a: float
    b: float
    side: Side
    itinerary: Itinerary
    residual: float
    bisection_a: float
    a_rate: float

    @property
    def consistent(self) -> bool:
        return circle_dist(self.a, self.bisection_a) < 1e-9

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "side": self.side.value,
            "itinerary": str(self.itinerary),
            "residual": self.residual,
            "bisection_a": self.bisection_a,
            "a_rate": self.a_rate,
        }


# ---------------------------------------------------------------- pre-sweep

@lru_cache(maxsize=64)
def _presweep(b: float, canon: str, n: int) -> tuple:
    """Sample a at cell centres; return runs of samples carrying ``canon``.

    Each run is a tuple of (a, cycle) pairs, ordered along the circle.
    """
    a = (np.arange(n) + 0.5) / n
    bb = np.full(n, b)
    opts = SearchOptions()
    win = _window_batch(a, bb, 0.5, opts)
    per, dist = _detect_batch(win, opts)
    hits = {}
    for i in range(n):
        q = int(per[i])
        if q != len(canon):
            continue
        seg = win[-1 - q:-1, i].tolist()
        word = "".join("+" if x < 0.5 else "-" for x in seg)
        if least_rotation(word) != canon:
            continue
        rep = _report(Params(float(a[i]), b), seg, float(dist[i]))
        if rep.cycle is not None and str(rep.cycle.itinerary) == canon:
            hits[i] = rep.cycle
    if not hits:
        return ()
    idx = sorted(hits)
    runs = [[idx[0]]]
    for i in idx[1:]:
        if i == runs[-1][-1] + 1:
            runs[-1].append(i)
        else:
            runs.append([i])
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == n - 1:
        runs[0] = runs.pop() + runs[0]
    return tuple(tuple((float(a[i]), hits[i]) for i in run) for run in runs)


def components_at(b: float, itinerary, n: int = PRESWEEP) -> list[tuple[float, float]]:
    """Approximate a-extents (sample centres) of the components at height b."""
    canon = least_rotation(str(Itinerary.parse(itinerary)))
    return [(run[0][0], run[-1][0]) for run in _presweep(float(b), canon, n)]


def _pick_run(runs, near):
    if near is None:
        if len(runs) > 1:
            raise AmbiguousBoundary([(r[0][0], r[-1][0]) for r in runs])
        return runs[0]

    def gap(run):
        lo, hi = run[0][0], run[-1][0]
        if (hi - lo) % 1.0 >= (near - lo) % 1.0:
            return 0.0
        return min(circle_dist(near, lo), circle_dist(near, hi))

    return min(runs, key=gap)


# ------------------------------------------------------- affine break solve

def _designated(c: Cycle, side: Side) -> int:
    """Index of the cycle point that reaches the break point on this side."""
    idx = [i for i, s in enumerate(c.itinerary.signs) if s == MINUS]
    if side is Side.LEFT:
        return min(idx, key=lambda i: c.points[i])
    return max(idx, key=lambda i: c.points[i])


def _laps(a: float, b: float, x0: float, n: int) -> list[int]:
    """Integer parts of F^j(x0), j < n, along the lift orbit."""
    out = []
    X = x0
    off = lift_offset(a, b)
    bp, bm = slopes(b)
    for _ in range(n):
        k = math.floor(X)
        out.append(k)
        u = X - k
        if u < 0.5:
            X = 2 * k + bp * u + a - 0.5 * b + off
        else:
            X = 2 * k + bm * u + a + 1.5 * b + off
    return out


def break_point_line(a_ref: float, b: float, word: str, laps: list[int], side: Side):
    """F^p of the break point as alpha * a + beta, along fixed laps and signs.

    Returns (X0, alpha, beta) with X0 the break point in lift coordinates.
    """
    bp, bm = slopes(b)
    off = lift_offset(a_ref, b)
    X0 = 0.5 if side is Side.LEFT else 1.0
    alpha, beta = 0.0, X0
    for j, s in enumerate(word):
        k = laps[j]
        if j == 0:
            # the break point itself: 1/2 sits at the left end of its lap,
            # 1 is the left limit of the lap [1/2, 1)
            k = 0
        B = bm if s == MINUS else bp
        c = 1.5 * b if s == MINUS else -0.5 * b
        alpha = B * alpha + 1.0
        beta = 2 * k + B * (beta - k) + c + off
    return X0, alpha, beta


def _affine_boundary(a_ref: float, b: float, cycle: Cycle, side: Side):
    i = _designated(cycle, side)
    c = cycle.rotate(i)
    word = str(c.itinerary)
    p = Params(a_ref, b)
    k = lift_shift(p, c.points[0], c.period)
    laps = _laps(a_ref, b, c.points[0], c.period)
    X0, alpha, beta = break_point_line(a_ref, b, word, laps, side)
    a_star = (X0 + k - beta) / alpha
    return a_star, alpha, word


def _residual(a: float, b: float, side: Side, period: int) -> float:
    a = circle(a)
    x = 0.5 if side is Side.LEFT else 0.0
    y = x
    for _ in range(period):
        y = step(a, b, y)
    return circle_dist(x, y)


def _has_cycle(a: float, b: float, word: str) -> bool:
    return any(c.attracting for c in cycles_with_itinerary(Params(circle(a), b), word))


def _bisect(a_in: float, a_out: float, b: float, word: str) -> float:
    """Boundary of the attractor-existence set between an inside and outside a."""
    while abs(a_in - a_out) > BISECT_TOL:
        mid = 0.5 * (a_in + a_out)
        if _has_cycle(mid, b, word):
            a_in = mid
        else:
            a_out = mid
    return 0.5 * (a_in + a_out)


def boundary_a(q: BoundaryQuery, presweep: int = PRESWEEP) -> BoundaryResult:
    """Parameter a at which a component at height q.b ends on side q.side."""
    canon = least_rotation(str(q.itinerary))
    runs = _presweep(float(q.b), canon, presweep)
    if not runs:
        raise NoBoundaryFound(f"no attracting cycle with itinerary {canon} at b={q.b}")
    run = _pick_run(runs, q.near)
    a_ref, cycle = run[0] if q.side is Side.LEFT else run[-1]
    a_star, alpha, word = _affine_boundary(a_ref, q.b, cycle, q.side)
    h = 1.0 / presweep
    # the neighbouring sample lies outside the run; walk further if needed
    step_out = -h if q.side is Side.LEFT else h
    a_out = a_ref + step_out
    for _ in range(8):
        if not _has_cycle(a_out, q.b, canon):
            break
        a_out += step_out
    a_bis = _bisect(a_ref, a_out, q.b, canon)
    res = _residual(a_star, q.b, q.side, len(word))
    return BoundaryResult(circle(a_star), q.b, q.side, Itinerary.parse(word), res, circle(a_bis), alpha)


def boundary_candidates(b: float, itinerary, side, presweep: int = PRESWEEP) -> list[BoundaryResult]:
    """``boundary_a`` for every matching component at this height."""
    canon = least_rotation(str(Itinerary.parse(itinerary)))
    runs = _presweep(float(b), canon, presweep)
    if not runs:
        raise NoBoundaryFound(f"no attracting cycle with itinerary {canon} at b={b}")
    out = []
    for run in runs:
        near = run[len(run) // 2][0]
        out.append(boundary_a(BoundaryQuery(b, Itinerary.parse(canon), Side(side), near), presweep))
    return out


def slice_at(a_ref: float, b: float, cycle: Cycle) -> tuple[float, float]:
    """Exact a-extent, at height b, of the component through (a_ref, b)."""
    lo, _, _ = _affine_boundary(a_ref, b, cycle, Side.LEFT)
    hi, _, _ = _affine_boundary(a_ref, b, cycle, Side.RIGHT)
    return lo, hi


# ---------------------------------------------------------- period 3 lemma

def period3_interval(epsilon: float) -> tuple[float, float]:
    """The a-interval I_b, b = 1 - epsilon, where f(1/2) lies on the last lap of I+."""
    b = 1.0 - epsilon
    bp, bm = slopes(b)
    if bm * bp * bp >= 1.0:
        raise ValueError(f"epsilon={epsilon} too large: B- (B+)^2 = {bm * bp * bp} >= 1")
    k = (1.0 - 10.0 * epsilon + 4.0 * epsilon ** 2) / (10.0 - 4.0 * epsilon)
    hi = (2.0 - epsilon) / 2.0
    if k <= 0.0:
        raise EmptyInterval(f"epsilon={epsilon} gives an empty interval")
    return hi - k, hi


# ------------------------------------------------------------- xi and seeds

@dataclass(frozen=True)
class XiTable:
    n: int
    b: object
    values: tuple

    def __getitem__(self, j: int):
        if not 1 <= j <= self.n - 1:
            raise IndexError(j)
        return self.values[j - 1]

    def __len__(self):
        return len(self.values)


def _geometric(bp, j):
    """1 + B+ + ... + B+^(j-1)."""
    return sum(bp ** i for i in range(j))


def xi_table(n: int, b) -> XiTable:
    """xi_j = (1 + ... + B+^(j-1)) / (1 + ... + B+^(n-1)), j = 1..n-1.

    Exact when b is an int or Fraction.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    exact = isinstance(b, (int, Fraction)) and not isinstance(b, bool)
    bp = 2 * (1 + Fraction(b)) if exact else 2.0 * (1.0 + b)
    total = _geometric(bp, n)
    if exact:
        vals = tuple(Fraction(_geometric(bp, j)) / total for j in range(1, n))
    else:
        vals = tuple(_geometric(bp, j) / total for j in range(1, n))
    return XiTable(n, b, vals)


@dataclass(frozen=True)
class SeedResult:
    n: int
    b: float
    a_interval: tuple[float, float]
    witness_a: float
    witness_x: float
    nesting_trace: tuple[tuple[float, float], ...]
    verified: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "b": self.b,
            "a_interval": list(self.a_interval),
            "witness_a": self.witness_a,
            "witness_x": self.witness_x,
            "nesting_trace": [list(j) for j in self.nesting_trace],
            "verified": self.verified,
        }


def _theta(a: float, b: float, x: float, j: int) -> float:
    """F^j_{a,b}(x) on the lift, with a kept unreduced."""
    X = x
    for _ in range(j):
        k = math.floor(X)
        u = X - k
        bp, bm = slopes(b)
        off = lift_offset(a, b)
        if u < 0.5:
            X = 2 * k + bp * u + a - 0.5 * b + off
        else:
            X = 2 * k + bm * u + a + 1.5 * b + off
    return X


def _lap_preimage(J, b, x, j, S, lo_val, hi_val):
    """Sub-interval of J on which F^j(x) lies in (lo_val, hi_val); slope S in a."""
    mid = 0.5 * (J[0] + J[1])
    t = _theta(mid, b, x, j)
    return (mid + (lo_val - t) / S, mid + (hi_val - t) / S), t


def seed_tongue(n: int, b: float, x: float = 0.75, near: "float | None" = None) -> SeedResult:
    """Nested-interval construction of a period-n single-minus tongue slice.

    Stage j keeps the a-interval on which F^j(x) stays inside a lap of I+
    with margin xi_j; the last stage solves F^n(x) = x + m on the room left
    by stage n-1. The returned ``a_interval`` is the exact slice of that
    tongue at height b.

    Without ``near`` the lowest admissible lap is taken at every stage.
    With ``near`` every admissible lap sequence is followed and the witness
    closest to ``near`` wins.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    bp, bm = slopes(b)
    if bm * bp ** (n - 1) >= 1.0:
        raise StageCheckFailed(0, f"B- (B+)^{n - 1} = {bm * bp ** (n - 1):.6g} >= 1, no single-minus "
                                  f"period-{n} cycle can attract at b={b}")
    xi = xi_table(n, b)
    if not (0.5 + xi[1] < x < 1.0 - xi[1]):
        raise ValueError(f"x must lie in (1/2 + xi_1, 1 - xi_1) = ({0.5 + xi[1]}, {1 - xi[1]})")
    S = [None] + [_geometric(bp, j) for j in range(1, n + 1)]

    c1 = bm * x + 1.5 * b
    J1 = (2.0 + xi[1] - c1, 2.5 - xi[1] - c1)
    if not (0.5 * b <= J1[0] and J1[1] <= 0.5 + 0.5 * b):
        raise StageCheckFailed(1, f"J_1 = {J1} leaves ({0.5 * b}, {0.5 + 0.5 * b})")

    best = None
    failure = None
    for trace, lap in _nestings(n, b, x, xi, S, [J1]):
        if isinstance(trace, StageCheckFailed):
            failure = failure or trace
            continue
        witness = _final_stage(n, b, x, S, trace, lap, near)
        if witness is None:
            failure = failure or StageCheckFailed(n, "F^n(x) misses every shifted diagonal on the final interval")
            continue
        a_star, room = witness
        score = 0.0 if near is None else abs(a_star - near)
        if best is None or score < best[0]:
            best = (score, a_star, tuple(trace) + (room,))
        if near is None:
            break
    if best is None:
        raise failure
    _, a_star, trace = best

    p = Params(circle(a_star), b)
    cands = [c for c in cycles_with_itinerary(p, "-" + "+" * (n - 1)) if c.attracting]
    if not cands:
        raise StageCheckFailed(n, f"no attracting cycle at the witness a={a_star}")
    cyc = min(cands, key=lambda c: circle_dist(c.points[0], x))
    lo, hi = slice_at(p.a, b, cyc)
    if hi < lo:
        hi += 1.0
    return SeedResult(n, b, (lo, hi), a_star, x, trace, _verify_seed(lo, hi, b, n))


def _nestings(n, b, x, xi, S, trace, lap=None):
    """Every admissible chain J_1 > J_2 > ... > J_{n-1}, lowest laps first.

    Yields (trace, lap of stage n-1), or (StageCheckFailed, None) for a dead end.
    """
    j = len(trace) + 1
    if j == n:
        yield trace, lap
        return
    J = trace[-1]
    length = S[j] * (J[1] - J[0])
    if not length > 1.5 - 2.0 * xi[j] + SLACK:
        yield StageCheckFailed(j, f"{length:.6g} <= {1.5 - 2.0 * xi[j]:.6g}"), None
        return
    mid = 0.5 * (J[0] + J[1])
    t_mid = _theta(mid, b, x, j)
    img_lo = t_mid + S[j] * (J[0] - mid)
    img_hi = t_mid + S[j] * (J[1] - mid)
    options = [
        N for N in range(math.floor(img_lo), math.ceil(img_hi) + 1)
        if img_lo + SLACK < N + xi[j] and N + 0.5 - xi[j] < img_hi - SLACK
    ]
    if not options:
        yield StageCheckFailed(j, "no lap of I+ fits inside the image"), None
        return
    for N in options:
        sub = (mid + (N + xi[j] - t_mid) / S[j], mid + (N + 0.5 - xi[j] - t_mid) / S[j])
        yield from _nestings(n, b, x, xi, S, trace + [sub], N)


def _final_stage(n, b, x, S, trace, lap, near):
    """Solve F^n(x) = x + m on the full-lap room of stage n-1 inside J_{n-2}."""
    prev = trace[-2]
    room, _ = _lap_preimage(prev, b, x, n - 1, S[n - 1], lap, lap + 0.5)
    room = (max(room[0], prev[0]), min(room[1], prev[1]))
    mid = 0.5 * (room[0] + room[1])
    t_mid = _theta(mid, b, x, n)
    target = 0.5 * sum(trace[-1]) if near is None else near
    sols = []
    for m in range(math.floor(t_mid - x - S[n]), math.ceil(t_mid - x + S[n]) + 1):
        a = mid + (x + m - t_mid) / S[n]
        if room[0] < a < room[1]:
            sols.append(a)
    if not sols:
        return None
    return min(sols, key=lambda a: abs(a - target)), room


def _verify_seed(lo: float, hi: float, b: float, n: int) -> bool:
    for t in (0.02, 0.25, 0.5, 0.75, 0.98):
        rep = find_attractor(Params(circle(lo + t * (hi - lo)), b))
        if rep.outcome is not Outcome.FOUND:
            return False
        c = rep.cycle
        if c.period != n or classify(c.itinerary) is not Classification.SINGLE_MINUS:
            return False
    return True


def ceiling_gap(component) -> float:
    """Distance from the highest cell of a component to the ceiling b = 1."""
    return 1.0 - component.max_b
