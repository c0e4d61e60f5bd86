"""Itineraries, follower sets and exact periodic orbits along an itinerary.

The iterates of the lift are piecewise affine. Starting from the identity on
[0, 1) we refine one step at a time: each piece is cut where its image
crosses a multiple of 1/2 (so that the next symbol is constant) and the
corresponding branch of the lift is composed on. After p steps every piece
carries a word of length p and an affine formula for F^p, and periodic
points with that word are solutions of one linear equation per piece.

A piece is stored anchored at its left end,

    F^j(X) = N + r + slope * (X - lo),   X in [lo, hi),

with the integer part N kept as an exact int. This keeps the fractional
digits intact however large F^j gets.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .map_core import (
    MINUS,
    PLUS,
    Params,
    circle,
    circle_dist,
    intercepts,
    lift_offset,
    sign_of,
    slopes,
    step,
)

BREAK_GUARD = 1e-12
MIN_WIDTH = 1e-14
NEUTRAL_TOL = 1e-12
CLOSE_TOL = 1e-9


class Classification(str, enum.Enum):
    ALL_PLUS = "AllPlus"
    SINGLE_MINUS = "SingleMinus"
    MULTI_MINUS = "MultiMinus"
    ALL_MINUS = "AllMinus"


class Stability(str, enum.Enum):
    ATTRACTING = "Attracting"
    REPELLING = "Repelling"
    NEUTRAL = "Neutral"


class UniquenessViolation(RuntimeError):
    """Two distinct attracting cycles were found for one parameter."""

    def __init__(self, params, cycles):
        self.params = params
        self.cycles = list(cycles)
        words = ", ".join(str(c.itinerary) for c in self.cycles)
        super().__init__(f"{len(self.cycles)} attracting cycles at {params}: {words}")


def least_rotation(word: str) -> str:
    """Lexicographically least rotation with '-' < '+'."""
    # ord('+') < ord('-'), so compare on a translated copy
    t = word.translate(_ORDER)
    best = min(t[i:] + t[:i] for i in range(len(t)))
    return best.translate(_UNORDER)


_ORDER = str.maketrans("-+", "01")
_UNORDER = str.maketrans("01", "-+")


@dataclass(frozen=True)
class Itinerary:
    signs: tuple[str, ...]

    def __post_init__(self):
        if not self.signs:
            raise ValueError("itinerary must be nonempty")
        bad = set(self.signs) - {PLUS, MINUS}
        if bad:
            raise ValueError(f"itinerary symbols must be '+' or '-', got {sorted(bad)}")

    @classmethod
    def parse(cls, word: "str | Itinerary | Sequence[str]") -> "Itinerary":
        if isinstance(word, Itinerary):
            return word
        return cls(tuple(word))

    def __str__(self):
        return "".join(self.signs)

    def __len__(self):
        return len(self.signs)

    @property
    def period(self) -> int:
        return len(self.signs)

    @property
    def minus_count(self) -> int:
        return self.signs.count(MINUS)

    @property
    def plus_count(self) -> int:
        return self.signs.count(PLUS)

    @property
    def classification(self) -> Classification:
        return classify(self)

    @property
    def unrealizable(self) -> bool:
        """True for words that can never carry an attracting cycle.

        An attracting orbit needs a '-' (the '+' slope is at least 2), and an
        all-minus word of period >= 2 is excluded because every orbit in
        [1/2, 1) eventually leaves it.
        """
        if self.minus_count == 0:
            return True
        return self.minus_count == self.period and self.period >= 2

    def rotate(self, k: int) -> "Itinerary":
        k %= self.period
        return Itinerary(self.signs[k:] + self.signs[:k])

    def canonical(self) -> "Itinerary":
        return Itinerary(tuple(least_rotation(str(self))))

    def primitive_period(self) -> int:
        p = self.period
        for q in _divisors(p):
            if all(self.signs[i] == self.signs[i % q] for i in range(p)):
                return q
        return p


def classify(itin: Itinerary) -> Classification:
    m = itin.minus_count
    if m == 0:
        return Classification.ALL_PLUS
    if m == itin.period and itin.period >= 2:
        return Classification.ALL_MINUS
    if m == 1:
        return Classification.SINGLE_MINUS
    return Classification.MULTI_MINUS


def multiplier(p: Params, itin: Itinerary) -> float:
    bp, bm = slopes(p.b)
    return bm ** itin.minus_count * bp ** itin.plus_count


@dataclass(frozen=True)
class IntervalUnion:
    """Ordered, pairwise disjoint half-open intervals [lo, hi) in [0, 1)."""

    intervals: tuple[tuple[float, float], ...] = ()

    @classmethod
    def from_pieces(cls, spans: Iterable[tuple[float, float]], gap: float = 1e-15) -> "IntervalUnion":
        merged: list[list[float]] = []
        for lo, hi in sorted(spans):
            if hi - lo < MIN_WIDTH:
                continue
            if merged and lo - merged[-1][1] <= gap:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def contains(self, x: float) -> bool:
        return any(lo <= x < hi for lo, hi in self.intervals)

    @property
    def measure(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)


@dataclass(frozen=True)
class AffinePiece:
    """One branch of F^p: F^p(X) = slope * X + intercept + lift_offset on [lo, hi)."""

    lo: float
    hi: float
    slope: float
    value_lo: float
    lift_offset: int
    itinerary: Itinerary

    @property
    def domain(self) -> tuple[float, float]:
        return self.lo, self.hi

    @property
    def intercept(self) -> float:
        return self.value_lo - self.slope * self.lo

    def lift_value(self, X: float) -> float:
        return self.lift_offset + self.value_lo + self.slope * (X - self.lo)

    def circle_value(self, X: float) -> float:
        return (self.value_lo + self.slope * (X - self.lo)) % 1.0


@dataclass(frozen=True)
class Cycle:
    points: tuple[float, ...]
    itinerary: Itinerary
    multiplier: float
    stability: Stability
    break_point_adjacent: bool = False

    @property
    def period(self) -> int:
        return len(self.points)

    @property
    def attracting(self) -> bool:
        return self.stability is Stability.ATTRACTING

    def rotate(self, k: int) -> "Cycle":
        k %= self.period
        pts = self.points[k:] + self.points[:k]
        return Cycle(pts, self.itinerary.rotate(k), self.multiplier, self.stability, self.break_point_adjacent)

    def canonical(self) -> "Cycle":
        """Rotation whose itinerary is the least rotation.

        Ties (non-primitive words) go to the smallest starting point.
        """
        target = least_rotation(str(self.itinerary))
        ks = [k for k in range(self.period) if str(self.itinerary.rotate(k)) == target]
        k = min(ks, key=lambda j: self.points[j])
        return self.rotate(k)

    def same_orbit(self, other: "Cycle", tol: float = 1e-9) -> bool:
        if self.period != other.period:
            return False
        return all(
            min(circle_dist(x, y) for y in other.points) < tol for x in self.points
        )

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "itinerary": str(self.itinerary),
            "classification": classify(self.itinerary).value,
            "points": list(self.points),
            "multiplier": self.multiplier,
            "stability": self.stability.value,
            "break_point_adjacent": self.break_point_adjacent,
        }


def stability_of(lam: float) -> Stability:
    if abs(abs(lam) - 1.0) <= NEUTRAL_TOL:
        return Stability.NEUTRAL
    return Stability.ATTRACTING if abs(lam) < 1.0 else Stability.REPELLING


# A raw piece is the tuple (lo, hi, slope, r, N, word); see module docstring.

def _root():
    return (0.0, 1.0, 1.0, 0.0, 0, "")


def _advance(coef, piece, want=None):
    """Split a piece by the half containing its current image and apply F."""
    bp, bm, ap, am = coef
    lo, hi, lam, r, N, word = piece
    w = hi - lo
    t_hi = r + lam * w
    j0 = math.floor(2.0 * r)
    j1 = j0 if lam == 0.0 else math.ceil(2.0 * t_hi) - 1
    out = []
    for j in range(j0, j1 + 1):
        minus = j & 1
        sign = MINUS if minus else PLUS
        if want is not None and sign != want:
            continue
        if lam == 0.0:
            xl, xh, tl = lo, hi, r
        else:
            xl = lo if j == j0 else lo + (0.5 * j - r) / lam
            xh = hi if j == j1 else lo + (0.5 * (j + 1) - r) / lam
            tl = r if j == j0 else 0.5 * j
        if xh - xl < MIN_WIDTH:
            continue
        q = j >> 1
        u = tl - q
        if minus:
            g = bm * u + am
            s = bm
        else:
            g = bp * u + ap
            s = bp
        k = math.floor(g)
        out.append((xl, xh, s * lam, g - k, 2 * (N + q) + k, word + sign))
    return out


def _coef(p: Params):
    bp, bm = slopes(p.b)
    ap, am = intercepts(p.a, p.b)
    off = lift_offset(p.a, p.b)
    return bp, bm, ap + off, am + off


def _pieces_for_word(p: Params, word: str):
    coef = _coef(p)
    pieces = [_root()]
    for sign in word:
        nxt = []
        for pc in pieces:
            nxt.extend(_advance(coef, pc, sign))
        pieces = nxt
        if not pieces:
            break
    return pieces


def affine_pieces(p: Params, itin: Itinerary) -> list[AffinePiece]:
    """Branches of F^period over the follower set of ``itin``."""
    itin = Itinerary.parse(itin)
    return [
        AffinePiece(lo, hi, lam, r, N, itin)
        for lo, hi, lam, r, N, _ in _pieces_for_word(p, str(itin))
    ]


def follower_set(p: Params, itin: Itinerary) -> IntervalUnion:
    """Points x with f^j(x) in I_{sigma_j} for 0 <= j < period."""
    itin = Itinerary.parse(itin)
    return IntervalUnion.from_pieces((pc[0], pc[1]) for pc in _pieces_for_word(p, str(itin)))


def _fixed_points(piece):
    """Solutions X in [lo, hi) of F^p(X) = X + k, for integer k."""
    lo, hi, lam, r, N, _ = piece
    d = lam - 1.0
    if abs(d) <= NEUTRAL_TOL:
        return []
    w = hi - lo
    # m = k - N ranges over the integers hit by d*t + r - lo, t in [0, w)
    v0 = r - lo
    v1 = d * w + r - lo
    m_lo, m_hi = (v0, v1) if v0 <= v1 else (v1, v0)
    out = []
    for m in range(math.ceil(m_lo) - 1, math.floor(m_hi) + 2):
        t = (m - v0) / d
        if 0.0 <= t < w:
            out.append((lo + t, N + m))
    return out


def _divisors(p: int) -> list[int]:
    return [q for q in range(1, p + 1) if p % q == 0]


def _near_break(x: float) -> bool:
    return min(x, 1.0 - x, abs(x - 0.5)) < BREAK_GUARD


def _make_cycle(p: Params, x0: float, word: str) -> "Cycle | None":
    """Orbit of a solved periodic point; None when its minimal period is smaller."""
    n = len(word)
    pts = [x0]
    for _ in range(n - 1):
        pts.append(step(p.a, p.b, pts[-1]))
    for q in _divisors(n)[:-1]:
        if word[:q] * (n // q) == word and circle_dist(pts[q], x0) < CLOSE_TOL:
            return None
    itin = Itinerary(tuple(word))
    lam = multiplier(p, itin)
    adjacent = any(_near_break(x) for x in pts)
    return Cycle(tuple(pts), itin, lam, stability_of(lam), adjacent)


def _dedupe(cycles: list[Cycle]) -> list[Cycle]:
    out: list[Cycle] = []
    keyed = sorted(cycles, key=lambda c: min(c.points))
    for c in keyed:
        m = min(c.points)
        dup = False
        for o in reversed(out):
            if m - min(o.points) > CLOSE_TOL:
                break
            if c.same_orbit(o):
                dup = True
                break
        if not dup:
            out.append(c)
    return out


def cycles_with_itinerary(p: Params, itin: Itinerary) -> list[Cycle]:
    """All periodic orbits of exact period len(itin) carrying this itinerary.

    Each returned cycle starts at the point whose itinerary is ``itin``
    itself (not a rotation of it).
    """
    itin = Itinerary.parse(itin)
    word = str(itin)
    # start the computation right after a '-' step, where slopes are smallest
    shift = word.index(MINUS) if MINUS in word else 0
    rotated = word[shift:] + word[:shift]
    found = []
    for piece in _pieces_for_word(p, rotated):
        for X, _k in _fixed_points(piece):
            c = _make_cycle(p, X, rotated)
            if c is not None:
                found.append(c.rotate(-shift) if shift else c)
    return _dedupe(found)


def enumerate_attracting_cycles(p: Params, max_period: int, strict: bool = True) -> list[Cycle]:
    """Every attracting cycle of period <= max_period, in canonical rotation.

    Walks the tree of words beginning with '-' (an attracting cycle has at
    least one '-'), solving for periodic points at canonical words and
    pruning branches whose slope can no longer drop below 1.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    coef = _coef(p)
    bm = coef[1]
    found: list[Cycle] = []
    frontier = _advance(coef, _root(), MINUS)
    depth = 1
    while frontier:
        remaining = max_period - depth
        floor = bm ** remaining if bm < 1.0 else 1.0
        nxt = []
        for pc in frontier:
            lam = pc[2]
            if lam < 1.0 - NEUTRAL_TOL and least_rotation(pc[5]) == pc[5]:
                for X, _k in _fixed_points(pc):
                    c = _make_cycle(p, X, pc[5])
                    if c is not None and c.attracting:
                        found.append(c)
            if remaining > 0 and lam * floor < 1.0:
                nxt.extend(_advance(coef, pc))
        frontier = nxt
        depth += 1
    found = _dedupe(found)
    if strict and len(found) > 1:
        raise UniquenessViolation(p, found)
    return found


def orbit_itinerary(p: Params, x: float, n: int) -> tuple[Itinerary, list[int]]:
    """First n symbols of the orbit of x, plus indices that hit a break point."""
    x = circle(x)
    signs, hits = [], []
    for i in range(n):
        if _near_break(x):
            hits.append(i)
        signs.append(sign_of(x))
        x = step(p.a, p.b, x)
    return Itinerary(tuple(signs)), hits
