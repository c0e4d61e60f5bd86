"""The semiconjugacy to the doubling map and the type of a cycle.

Phi(x) = lim F^n(x) / 2^n is evaluated through the telescoping series

    Phi(x) = x + sum_{n >= 0} g(f^n(x)) / 2^(n+1),   g(y) = F(y) - 2y,

where g has period 1. Only circle points are iterated, so nothing grows
with n, and the tail after n terms is at most M / 2^n with M = sup |g|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .map_core import MINUS, Params, circle, lift_iterate, lift_offset, lift_unit, step
from .symbolic import Cycle


class NonIntegerShift(ValueError):
    """F^p(x0) - x0 is not an integer: the cycle is not periodic for these Params."""


@dataclass(frozen=True)
class TypeFraction:
    k: int
    p: int

    def __post_init__(self):
        if self.p < 1 or not 0 <= self.k <= 2 ** self.p - 2:
            raise ValueError(f"invalid type {self.k}/(2^{self.p}-1)")

    @property
    def value(self) -> float:
        return self.k / (2 ** self.p - 1)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.k, 2 ** self.p - 1)

    def __str__(self):
        return f"{self.k}/{2 ** self.p - 1}"

    def to_dict(self) -> dict:
        return {"k": self.k, "p": self.p, "value": self.value}


@dataclass(frozen=True)
class PhiEstimate:
    value: float
    error_bound: float
    iterations: int

    def to_dict(self) -> dict:
        return {"value": self.value, "error_bound": self.error_bound, "iterations": self.iterations}


def _g(a: float, b: float, off: float, x: float) -> float:
    if x < 0.5:
        return 2.0 * b * x + (a - 0.5 * b) + off
    return -2.0 * b * x + (a + 1.5 * b) + off


def tail_bound(p: Params) -> float:
    """M = sup over [0, 1) of |F(y) - 2y|, from a 256-point grid plus branch ends."""
    off = lift_offset(p.a, p.b)
    ys = [i / 256 for i in range(256)] + [0.5, math.nextafter(0.5, 0.0), math.nextafter(1.0, 0.0)]
    return max(abs(_g(p.a, p.b, off, y)) for y in ys)


def iterations_for(p: Params, tol: float) -> int:
    M = tail_bound(p)
    if M == 0.0:
        return 0
    return max(0, math.ceil(math.log2(M / tol)) + 1)


def phi(p: Params, x: float, tol: float = 1e-10) -> PhiEstimate:
    """Phi_{a,b}(x) for a lift coordinate x (any real)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = tail_bound(p)
    n = iterations_for(p, tol)
    y = circle(x)
    off = lift_offset(p.a, p.b)
    acc = 0.0
    scale = 0.5
    for _ in range(n):
        acc += _g(p.a, p.b, off, y) * scale
        scale *= 0.5
        y = step(p.a, p.b, y)
    return PhiEstimate(x + acc, M / 2 ** n, n)


def phi_circle(p: Params, x: float, tol: float = 1e-10) -> float:
    return circle(phi(p, x, tol).value)


def phi_grid(p: Params, xs, tol: float = 1e-10) -> np.ndarray:
    """Vectorised Phi over points of [0, 1)."""
    xs = np.asarray(xs, dtype=float)
    n = iterations_for(p, tol)
    a, b = p.a, p.b
    off = lift_offset(a, b)
    bp, bm = 2.0 * (1.0 + b), 2.0 * (1.0 - b)
    ap, am = a - 0.5 * b, a + 1.5 * b
    y = xs.copy()
    acc = np.zeros_like(xs)
    scale = 0.5
    for _ in range(n):
        lo = y < 0.5
        acc += np.where(lo, 2.0 * b * y + ap + off, -2.0 * b * y + am + off) * scale
        scale *= 0.5
        y = np.mod(np.where(lo, bp * y + ap, bm * y + am), 1.0)
        y[y >= 1.0] = 0.0
    return xs + acc


def base_point(c: Cycle) -> int:
    """Index of the cycle point in [1/2, 1) closest to 1/2 (0 if there is none)."""
    idx = [i for i, s in enumerate(c.itinerary.signs) if s == MINUS]
    if not idx:
        return 0
    return min(idx, key=lambda i: c.points[i])


def lift_shift(p: Params, x0: float, period: int) -> int:
    """k with F^period(x0) = x0 + k; raises NonIntegerShift if there is none."""
    N, u = lift_iterate(p.a, p.b, x0, period)
    k = N + round(u - x0)
    if abs((N - k) + (u - x0)) >= 1e-6:
        raise NonIntegerShift(f"F^{period}({x0}) - {x0} = {N + u - x0} is not an integer")
    return k


def type_of(p: Params, c: Cycle) -> TypeFraction:
    """Type k/(2^p - 1) of a cycle, read off the lift at the distinguished point."""
    x0 = c.points[base_point(c)]
    k = lift_shift(p, x0, c.period)
    return TypeFraction(k % (2 ** c.period - 1), c.period)


@dataclass(frozen=True)
class ProbeResult:
    plateau_intervals: tuple[tuple[float, float], ...]
    monotone: bool

    def to_dict(self) -> dict:
        return {"plateau_intervals": [list(iv) for iv in self.plateau_intervals], "monotone": self.monotone}


def injectivity_probe(p: Params, grid_n: int = 4096, plateau_tol: float = 1e-6,
                      noise: float = 1e-12) -> ProbeResult:
    """Sample phi on a uniform grid and report flat runs.

    A run of consecutive samples whose values differ by less than
    ``plateau_tol`` is a plateau candidate. ``noise`` is the rounding floor
    below which a decrease does not count against monotonicity.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    xs = np.arange(grid_n) / grid_n
    vals = phi_grid(p, xs, tol=plateau_tol * 1e-3)
    vals = np.append(vals, vals[0] + 1.0)
    xs = np.append(xs, 1.0)
    diffs = np.diff(vals)
    flat = diffs < plateau_tol
    plateaus = []
    i = 0
    while i < grid_n:
        if flat[i]:
            j = i
            while j + 1 < grid_n and flat[j + 1]:
                j += 1
            plateaus.append((float(xs[i]), float(xs[j + 1])))
            i = j + 1
        else:
            i += 1
    return ProbeResult(tuple(plateaus), bool(np.all(diffs >= -noise)))


def lift_power(a: float, b: float, x: float, n: int) -> float:
    """F^n_{a,b}(x) as a float; ``a`` may be unreduced."""
    X = x
    for _ in range(n):
        k = math.floor(X)
        X = lift_unit(a, b, X - k) + 2 * k
    return X
