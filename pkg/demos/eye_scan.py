"""Find the multi-minus period-5 eye near (0.576, 0.7913) and show it never reaches the top."""
from plpdm import Params, find_attractor
from plpdm.scan import GridSpec, component_at, label_components, scan_grid
from plpdm.tongue_geometry import ceiling_gap

c = find_attractor(Params(0.576, 0.7913)).cycle
print(f"cycle at (0.576, 0.7913): period {c.period}, {sum(x >= 0.5 for x in c.points)} points in [1/2, 1)")

# the eye is a thin strip, so a needs ~1e-4 resolution here
g = scan_grid(GridSpec(0.574, 0.584, 0.78, 0.9999, 100, 220))
comp = component_at(g, label_components(g), 0.576, 0.7913)
print(f"component   {comp.kind.value} {comp.itinerary} ({comp.cell_count} cells)")
print(f"a extent    [{comp.a_min:.5f}, {comp.a_max:.5f}]")
print(f"b extent    [{comp.b_min:.5f}, {comp.max_b:.5f}]")
print(f"gap to b=1  {ceiling_gap(comp):.4f}")
