"""Both ends of a period-5 tongue at b = 0.999, solved and cross-checked."""
import sys

from plpdm import BoundaryQuery, Side, boundary_a

b, word = 0.999, "-++++"
near = float(sys.argv[1]) if len(sys.argv) > 1 else 0.71

for side in (Side.LEFT, Side.RIGHT):
    r = boundary_a(BoundaryQuery(b, word, side, near=near))
    print(f"{side.value:5s}  a = {r.a:.15f}  bisection = {r.bisection_a:.15f}  residual = {r.residual:.1e}")
