"""Rasterise the upper parameter plane to plane.ppm / plane.csv / plane.json."""
import sys

from plpdm.scan import GridSpec, export, label_components, scan_grid

na = int(sys.argv[1]) if len(sys.argv) > 1 else 256
spec = GridSpec(0.0, 1.0, 0.5, 0.9999, na, na // 2)
g = scan_grid(spec, workers=4)
comps = label_components(g)
for fmt in ("ppm", "csv", "json"):
    print(export(g, comps, fmt, f"plane.{fmt}"))

tongues = sum(c.kind.value == "Tongue" for c in comps)
print(f"{len(comps)} components, {tongues} reach the top")
