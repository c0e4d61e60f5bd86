"""Build single-minus tongue slices at b = 0.999 by interval nesting."""
from plpdm import Params, StageCheckFailed, find_attractor, seed_tongue, xi_table
from plpdm.map_core import circle

print("xi table, n = 4, b = 1:", ", ".join(str(v) for v in xi_table(4, 1).values))

for n in (3, 4, 5, 6):
    try:
        r = seed_tongue(n, 0.999)
    except StageCheckFailed as e:
        print(f"n = {n}: {e}")
        continue
    lo, hi = r.a_interval
    c = find_attractor(Params(circle(0.5 * (lo + hi)), 0.999)).cycle
    print(f"n = {n}: a in ({lo:.6f}, {hi:.6f}), midpoint cycle {c.itinerary}")
