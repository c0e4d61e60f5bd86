"""Attractor detection by iterating the break point 1/2, then exact refinement.

Any attracting cycle has both break points in its immediate basin, so one
orbit per parameter is enough. The orbit only supplies a candidate period
and itinerary; the reported cycle is always the exact solution from
``cycles_with_itinerary``.

``find_attractor`` (one parameter, pure Python) and ``find_attractors``
(numpy, many parameters) run the same floating-point recurrence and return
identical reports.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .map_core import MINUS, PLUS, Params, circle_dist
from .symbolic import (
    Cycle,
    Itinerary,
    cycles_with_itinerary,
    enumerate_attracting_cycles,
    multiplier,
)

# fallback recurrence threshold for orbits that converge too slowly to
# reach tol_close inside the burn-in; the exact solve rejects false hits
LOOSE_TOL = 1e-4
# symbols of window points this close to a break point are ambiguous
AMBIGUOUS = 1e-7
MAX_FLIPS = 3


@dataclass(frozen=True)
class SearchOptions:
    burn_in: int = 2000
    detect_window: int = 256
    max_period: int = 64
    tol_close: float = 1e-9

    def __post_init__(self):
        if min(self.burn_in, self.detect_window, self.max_period) < 1 or self.tol_close <= 0:
            raise ValueError("search options must be positive")
        if self.detect_window < self.max_period + 1:
            raise ValueError("detect_window must exceed max_period")


class Outcome(str, enum.Enum):
    FOUND = "Found"
    NOT_FOUND = "NotFound"
    BREAK_POINT_ADJACENT = "BreakPointAdjacent"


@dataclass(frozen=True)
class AttractorReport:
    params: Params
    outcome: Outcome
    cycle: "Cycle | None" = None

    @property
    def found(self) -> bool:
        return self.cycle is not None

    def to_dict(self) -> dict:
        d = {"a": self.params.a, "b": self.params.b, "outcome": self.outcome.value}
        d["cycle"] = None if self.cycle is None else self.cycle.to_dict()
        return d


def _window_scalar(a: float, b: float, seed: float, opts: SearchOptions) -> list[float]:
    bp = 2.0 * (1.0 + b)
    bm = 2.0 * (1.0 - b)
    ap = a - 0.5 * b
    am = a + 1.5 * b
    x = seed
    for _ in range(opts.burn_in):
        y = bp * x + ap if x < 0.5 else bm * x + am
        x = y % 1.0
        if x >= 1.0:
            x = 0.0
    win = [x]
    for _ in range(opts.detect_window):
        y = bp * x + ap if x < 0.5 else bm * x + am
        x = y % 1.0
        if x >= 1.0:
            x = 0.0
        win.append(x)
    return win


def _window_batch(a: np.ndarray, b: np.ndarray, seed: float, opts: SearchOptions) -> np.ndarray:
    bp = 2.0 * (1.0 + b)
    bm = 2.0 * (1.0 - b)
    ap = a - 0.5 * b
    am = a + 1.5 * b

    def advance(x):
        y = np.where(x < 0.5, bp * x + ap, bm * x + am)
        y = np.mod(y, 1.0)
        y[y >= 1.0] = 0.0
        return y

    x = np.full(a.shape, seed, dtype=float)
    for _ in range(opts.burn_in):
        x = advance(x)
    win = np.empty((opts.detect_window + 1,) + a.shape)
    win[0] = x
    for i in range(opts.detect_window):
        x = advance(x)
        win[i + 1] = x
    return win


def _cdist(x, y):
    d = np.abs(x - y) % 1.0
    return np.minimum(d, 1.0 - d)


def _detect_scalar(win: list[float], opts: SearchOptions) -> tuple[int, float]:
    last = win[-1]
    for q in range(1, opts.max_period + 1):
        d = circle_dist(last, win[-1 - q])
        if d < opts.tol_close:
            return q, d
    best_q, best_d = 0, LOOSE_TOL
    for q in range(1, opts.max_period + 1):
        d = max(circle_dist(last, win[-1 - q]), circle_dist(win[-2], win[-2 - q]))
        if d < best_d:
            best_q, best_d = q, d
    return best_q, best_d


def _detect_batch(win: np.ndarray, opts: SearchOptions) -> tuple[np.ndarray, np.ndarray]:
    n = win.shape[1]
    per = np.zeros(n, dtype=np.int64)
    dist = np.full(n, np.inf)
    for q in range(opts.max_period, 0, -1):
        d = _cdist(win[-1], win[-1 - q])
        hit = d < opts.tol_close
        per[hit] = q
        dist[hit] = d[hit]
    loose_q = np.zeros(n, dtype=np.int64)
    loose_d = np.full(n, LOOSE_TOL)
    for q in range(1, opts.max_period + 1):
        d = np.maximum(_cdist(win[-1], win[-1 - q]), _cdist(win[-2], win[-2 - q]))
        better = d < loose_d
        loose_q[better] = q
        loose_d[better] = d[better]
    miss = per == 0
    per[miss] = loose_q[miss]
    dist[miss] = loose_d[miss]
    return per, dist


def _candidate_words(seg: list[float], tol: float):
    signs = [PLUS if x < 0.5 else MINUS for x in seg]
    yield "".join(signs)
    shaky = [
        i for i, x in enumerate(seg)
        if min(x, 1.0 - x, abs(x - 0.5)) < tol
    ][:MAX_FLIPS]
    for r in range(1, len(shaky) + 1):
        for idx in itertools.combinations(shaky, r):
            alt = list(signs)
            for i in idx:
                alt[i] = PLUS if alt[i] == MINUS else MINUS
            yield "".join(alt)


def _refine(p: Params, seg: list[float], dist: float) -> "Cycle | None":
    """Exact attracting cycle through the orbit segment, if there is one."""
    tol = max(AMBIGUOUS, 10.0 * dist)
    for word in _candidate_words(seg, tol):
        itin = Itinerary(tuple(word))
        if itin.unrealizable or multiplier(p, itin) >= 1.0:
            continue
        for c in cycles_with_itinerary(p, itin):
            if c.attracting and circle_dist(c.points[0], seg[0]) < 1e-3:
                return c
    return None


def _report(p: Params, seg: "list[float] | None", dist: float) -> AttractorReport:
    if seg is None:
        return AttractorReport(p, Outcome.NOT_FOUND)
    c = _refine(p, seg, dist)
    if c is None:
        return AttractorReport(p, Outcome.NOT_FOUND)
    c = c.canonical()
    if c.break_point_adjacent:
        return AttractorReport(p, Outcome.BREAK_POINT_ADJACENT, c)
    return AttractorReport(p, Outcome.FOUND, c)


def find_attractor(p: Params, opts: SearchOptions = SearchOptions(), seed: float = 0.5) -> AttractorReport:
    """Locate the attracting cycle of f_{a,b}, if any, with period <= opts.max_period."""
    win = _window_scalar(p.a, p.b, seed, opts)
    q, d = _detect_scalar(win, opts)
    seg = win[-1 - q:-1] if q else None
    return _report(p, seg, d)


def find_attractors(a, b, opts: SearchOptions = SearchOptions(), seed: float = 0.5,
                    chunk: int = 8192) -> list[AttractorReport]:
    """Vectorised ``find_attractor`` over arrays of parameters."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.broadcast_to(np.asarray(b, dtype=float), a.shape).ravel()
    out: list[AttractorReport] = []
    for s in range(0, a.size, chunk):
        aa, bb = a[s:s + chunk], b[s:s + chunk]
        win = _window_batch(aa, bb, seed, opts)
        per, dist = _detect_batch(win, opts)
        for i in range(aa.size):
            p = Params(float(aa[i]), float(bb[i]))
            q = int(per[i])
            seg = win[-1 - q:-1, i].tolist() if q else None
            out.append(_report(p, seg, float(dist[i])))
    return out


@dataclass(frozen=True)
class AuditReport:
    params: Params
    max_period: int
    attractor: AttractorReport
    enumerated: tuple[Cycle, ...]
    seed0: AttractorReport
    problems: tuple[str, ...] = field(default=())

    @property
    def count(self) -> int:
        return len(self.enumerated)

    @property
    def consistent(self) -> bool:
        return not self.problems

    @property
    def uniqueness_violation(self) -> bool:
        return self.count > 1

    def to_dict(self) -> dict:
        return {
            "a": self.params.a,
            "b": self.params.b,
            "max_period": self.max_period,
            "count": self.count,
            "consistent": self.consistent,
            "problems": list(self.problems),
            "attractor": self.attractor.to_dict(),
        }


def _compare(p, max_period, rep, enumerated, rep0) -> AuditReport:
    problems = []
    if len(enumerated) > 1:
        problems.append("UniquenessViolation")
    truth = enumerated[0] if enumerated else None
    if truth is not None:
        if rep.cycle is None:
            problems.append("iteration missed the enumerated cycle")
        elif not rep.cycle.same_orbit(truth):
            problems.append("iteration and enumeration disagree")
    elif rep.cycle is not None and rep.cycle.period <= max_period:
        problems.append("enumeration missed the iterated cycle")
    ref = rep.cycle or truth
    if ref is not None:
        if rep0.cycle is None or not rep0.cycle.same_orbit(ref):
            problems.append("seed 0 does not reach the attractor")
    elif rep0.cycle is not None:
        problems.append("seed 0 found a cycle that seed 1/2 did not")
    return AuditReport(p, max_period, rep, tuple(enumerated), rep0, tuple(problems))


def audit_uniqueness(p: Params, max_period: int = 8, opts: SearchOptions = SearchOptions()) -> AuditReport:
    """Cross-check iteration from both break points against exhaustive enumeration."""
    rep = find_attractor(p, opts, 0.5)
    rep0 = find_attractor(p, opts, 0.0)
    found = enumerate_attracting_cycles(p, max_period, strict=False)
    return _compare(p, max_period, rep, found, rep0)


def audit_many(a, b, max_period: int = 8, opts: SearchOptions = SearchOptions()) -> list[AuditReport]:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    reps = find_attractors(a, b, opts, 0.5)
    reps0 = find_attractors(a, b, opts, 0.0)
    out = []
    for r, r0 in zip(reps, reps0):
        found = enumerate_attracting_cycles(r.params, max_period, strict=False)
        out.append(_compare(r.params, max_period, r, found, r0))
    return out
