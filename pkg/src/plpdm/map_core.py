"""Evaluation of the map family f_{a,b}(x) = (2x + a + (b/2) S(x)) mod 1.

Everything here is double precision. The circle is represented by [0, 1);
every circle-valued result is reduced into that range.

Two calling styles coexist: the ``Params``-level functions (``eval_map``,
``eval_lift``, ...) used by library callers, and the raw float kernels
(``step``, ``lift``) that hot loops call directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

PLUS = "+"
MINUS = "-"


@dataclass(frozen=True)
class Params:
    """A point (a, b) of the parameter cylinder."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < 1.0):
            raise ValueError(f"a must lie in [0, 1), got {self.a!r}")
        if not (0.0 <= self.b <= 1.0):
            raise ValueError(f"b must lie in [0, 1], got {self.b!r}")

    @classmethod
    def of(cls, a: float, b: float) -> "Params":
        """Build Params, reducing ``a`` mod 1 first."""
        return cls(circle(a), float(b))


@dataclass(frozen=True)
class BranchCoeffs:
    sign: str
    slope: float
    intercept: float


def circle(x: float) -> float:
    """Reduce to the canonical representative in [0, 1)."""
    r = x % 1.0
    # -1e-17 % 1.0 == 1.0 in IEEE arithmetic
    return 0.0 if r >= 1.0 else r


def circle_dist(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def sign_of(x: float) -> str:
    """Half-interval of a circle point; I+ = [0, 1/2), I- = [1/2, 1)."""
    return PLUS if x < 0.5 else MINUS


def straight_sine(x: float) -> float:
    if x <= 0.5:
        return 4.0 * x - 1.0
    return -4.0 * x + 3.0


def slopes(b: float) -> tuple[float, float]:
    """(B+, B-) = (2(1+b), 2(1-b))."""
    return 2.0 * (1.0 + b), 2.0 * (1.0 - b)


def intercepts(a: float, b: float) -> tuple[float, float]:
    """(A+, A-) = (a - b/2, a + 3b/2)."""
    return a - 0.5 * b, a + 1.5 * b


def branch_coeffs(p: Params, sign: str) -> BranchCoeffs:
    bp, bm = slopes(p.b)
    ap, am = intercepts(p.a, p.b)
    if sign == PLUS:
        return BranchCoeffs(PLUS, bp, ap)
    if sign == MINUS:
        return BranchCoeffs(MINUS, bm, am)
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def step(a: float, b: float, x: float) -> float:
    """One application of f_{a,b} on raw floats (x already in [0, 1))."""
    if x < 0.5:
        y = 2.0 * (1.0 + b) * x + (a - 0.5 * b)
    else:
        y = 2.0 * (1.0 - b) * x + (a + 1.5 * b)
    r = y % 1.0
    return 0.0 if r >= 1.0 else r


def eval_map(p: Params, x: float) -> float:
    return step(p.a, p.b, circle(x))


def lift_offset(a: float, b: float) -> int:
    """Integer added to the unreduced formula so that F(0) lands in [0, 1).

    ``a`` may be any real; its integer part is carried through, which gives
    F_{a+1,b} = F_{a,b} + 1.
    """
    ia = math.floor(a)
    ar = a - ia
    return ia + (1 if ar - 0.5 * b < 0.0 else 0)


def lift_unit(a: float, b: float, u: float) -> float:
    """F_{a,b}(u) for u in [0, 1); ``a`` may be unreduced."""
    ia = math.floor(a)
    ar = a - ia
    off = ia + (1 if ar - 0.5 * b < 0.0 else 0)
    if u < 0.5:
        return 2.0 * (1.0 + b) * u + (ar - 0.5 * b) + off
    return 2.0 * (1.0 - b) * u + (ar + 1.5 * b) + off


def lift(a: float, b: float, X: float) -> float:
    """The degree-2 lift F_{a,b} on the real line."""
    k = math.floor(X)
    return lift_unit(a, b, X - k) + 2 * k


def eval_lift(p: Params, X: float) -> float:
    return lift(p.a, p.b, X)


def lift_iterate(a: float, b: float, X: float, n: int) -> tuple[int, float]:
    """F^n(X) as (integer part, fractional part).

    The integer part is an exact Python int so that large n does not eat
    the fractional digits.
    """
    N = math.floor(X)
    u = X - N
    for _ in range(n):
        y = lift_unit(a, b, u)
        k = math.floor(y)
        N = 2 * N + k
        u = y - k
    return N, u


def orbit(p: Params, x: float, n: int) -> list[float]:
    """x, f(x), ..., f^n(x)."""
    a, b = p.a, p.b
    out = [circle(x)]
    for _ in range(n):
        out.append(step(a, b, out[-1]))
    return out


def mirror(p: Params, x: float) -> tuple[Params, float]:
    """Image under the symmetry (a, x) -> (1/2 - a, 1/2 - x)."""
    return Params(circle(0.5 - p.a), p.b), circle(0.5 - x)
