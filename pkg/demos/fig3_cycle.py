"""The period-3 attractor at (a, b) = (0.964, 0.988) and its type."""
from plpdm import Params, find_attractor, type_of
from plpdm.map_core import slopes

p = Params(0.964, 0.988)
rep = find_attractor(p)
c = rep.cycle
print(f"outcome     {rep.outcome.value}")
print(f"itinerary   {c.itinerary}")
print("points      " + "  ".join(f"{x:.9f}" for x in c.points))

bp, bm = slopes(p.b)
print(f"multiplier  {c.multiplier:.12f}  (B- B+^2 = {bm * bp * bp:.12f})")
print(f"type        {type_of(p, c)}")
