"""Rasterisation of the hyperbolic set, component labelling, and export."""
from __future__ import annotations

import csv
import enum
import io
import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .cycle_search import Outcome, SearchOptions, find_attractors
from .map_core import circle
from .semiconj import type_of
from .symbolic import Classification

TOP_PROXY = 0.9995

CSV_FIELDS = (
    "id", "kind", "period", "itinerary", "type_k", "type_p", "cell_count",
    "a_min", "a_max", "b_min", "b_max", "max_b", "touches_top",
)

# period mod 16 -> RGB at full brightness
PALETTE = (
    (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200),
    (245, 130, 48), (145, 30, 180), (70, 240, 240), (240, 50, 230),
    (210, 245, 60), (250, 190, 190), (0, 128, 128), (230, 190, 255),
    (170, 110, 40), (255, 250, 200), (128, 0, 0), (170, 255, 195),
)


@dataclass(frozen=True)
class GridSpec:
    a_min: float
    a_max: float
    b_min: float
    b_max: float
    na: int
    nb: int

    def __post_init__(self):
        if self.na < 1 or self.nb < 1:
            raise ValueError("na and nb must be >= 1")
        if not (0.0 <= self.b_min <= self.b_max <= 1.0):
            raise ValueError("need 0 <= b_min <= b_max <= 1")
        if not 0.0 < self.a_width <= 1.0:
            raise ValueError("a-range must have positive width at most 1")

    @property
    def a_width(self) -> float:
        w = self.a_max - self.a_min
        if w <= 0.0:
            w = (self.a_max - self.a_min) % 1.0
        return w

    @property
    def full_circle(self) -> bool:
        return self.a_width == 1.0

    @property
    def cell_height(self) -> float:
        return (self.b_max - self.b_min) / self.nb

    @property
    def truncated(self) -> bool:
        return self.b_max < TOP_PROXY

    def a_values(self) -> np.ndarray:
        i = np.arange(self.na)
        a = self.a_min + (i + 0.5) * (self.a_width / self.na)
        a = np.mod(a, 1.0)
        a[a >= 1.0] = 0.0
        return a

    def b_values(self) -> np.ndarray:
        """Row centres, row 0 at the top."""
        r = np.arange(self.nb)
        return self.b_max - (r + 0.5) * self.cell_height

    def to_dict(self) -> dict:
        return asdict(self)


class Status(str, enum.Enum):
    NO_ATTRACTOR = "NoAttractor"
    ATTRACTOR = "Attractor"
    BREAK_POINT_ADJACENT = "BreakPointAdjacent"


@dataclass(frozen=True)
class CellResult:
    status: Status
    period: int = 0
    itinerary: str = ""
    classification: "str | None" = None
    type_k: "int | None" = None
    type_p: "int | None" = None

    @property
    def key(self):
        if self.status is not Status.ATTRACTOR:
            return None
        return self.period, self.itinerary

    def to_dict(self) -> dict:
        if self.status is Status.NO_ATTRACTOR:
            return {"status": self.status.value}
        return {
            "status": self.status.value,
            "period": self.period,
            "itinerary": self.itinerary,
            "classification": self.classification,
            "type_k": self.type_k,
            "type_p": self.type_p,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CellResult":
        st = Status(d["status"])
        if st is Status.NO_ATTRACTOR:
            return cls(st)
        return cls(st, d["period"], d["itinerary"], d["classification"], d["type_k"], d["type_p"])


EMPTY = CellResult(Status.NO_ATTRACTOR)


class Kind(str, enum.Enum):
    TONGUE = "Tongue"
    EYE = "Eye"


@dataclass(frozen=True)
class ComponentRecord:
    id: int
    kind: Kind
    period: int
    itinerary: str
    type_k: "int | None"
    type_p: "int | None"
    cell_count: int
    a_min: float
    a_max: float
    b_min: float
    b_max: float
    max_b: float
    touches_top: bool
    grid_truncated: bool = False

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return self.a_min, self.a_max, self.b_min, self.b_max

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ComponentRecord":
        d = dict(d)
        d["kind"] = Kind(d["kind"])
        return cls(**d)


@dataclass
class Grid:
    spec: GridSpec
    rows: list

    def __eq__(self, other):
        return isinstance(other, Grid) and self.spec == other.spec and self.rows == other.rows

    def cell(self, r: int, c: int) -> CellResult:
        return self.rows[r][c]

    def locate(self, a: float, b: float) -> tuple[int, int]:
        """Row and column of the cell containing (a, b)."""
        g = self.spec
        c = int(((a - g.a_min) % 1.0) / g.a_width * g.na)
        h = g.cell_height
        r = 0 if h == 0.0 else int((g.b_max - b) / h)
        return min(max(r, 0), g.nb - 1), min(max(c, 0), g.na - 1)


# ----------------------------------------------------------------- scanning

def _cell_from_report(rep) -> CellResult:
    if rep.outcome is Outcome.NOT_FOUND:
        return EMPTY
    c = rep.cycle
    t = type_of(rep.params, c)
    st = Status.ATTRACTOR if rep.outcome is Outcome.FOUND else Status.BREAK_POINT_ADJACENT
    return CellResult(st, c.period, str(c.itinerary), c.itinerary.classification.value, t.k, t.p)


def _scan_rows(args) -> list:
    spec, opts, rows = args
    a = spec.a_values()
    bs = spec.b_values()
    out = []
    for r in rows:
        reps = find_attractors(a, np.full(a.shape, bs[r]), opts)
        out.append([_cell_from_report(rep) for rep in reps])
    return out


def scan_grid(g: GridSpec, opts: SearchOptions = SearchOptions(), workers: int = 1) -> Grid:
    """find_attractor at every cell centre; independent of ``workers``."""
    rows = list(range(g.nb))
    if workers <= 1 or g.nb == 1:
        return Grid(g, _scan_rows((g, opts, rows)))
    chunks = [rows[i::workers] for i in range(workers)]
    chunks = [c for c in chunks if c]
    result = [None] * g.nb
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for chunk, got in zip(chunks, ex.map(_scan_rows, [(g, opts, c) for c in chunks])):
            for r, row in zip(chunk, got):
                result[r] = row
    return Grid(g, result)


# ---------------------------------------------------------------- labelling

class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x != y:
            self.parent[max(x, y)] = min(x, y)


def _circular_extent(cols: set, na: int, full: bool) -> tuple[int, int]:
    """First and last column of the smallest arc covering ``cols``."""
    s = sorted(cols)
    if not full or len(s) == na:
        return s[0], s[-1]
    gaps = [(s[(i + 1) % len(s)] - s[i]) % na for i in range(len(s))]
    i = max(range(len(s)), key=lambda k: (gaps[k], -k))
    if gaps[i] <= 1:
        return s[0], s[-1]
    return s[(i + 1) % len(s)], s[i]


def _flood(grid: Grid) -> _DSU:
    """4-connected union of equal-key cells; roots are the smallest cell index."""
    g = grid.spec
    na, nb = g.na, g.nb
    dsu = _DSU(na * nb)
    for r in range(nb):
        row = grid.rows[r]
        for c in range(na):
            k = row[c].key
            if k is None:
                continue
            if c + 1 < na and row[c + 1].key == k:
                dsu.union(r * na + c, r * na + c + 1)
            if r + 1 < nb and grid.rows[r + 1][c].key == k:
                dsu.union(r * na + c, (r + 1) * na + c)
        if g.full_circle and na > 1 and row[0].key is not None and row[0].key == row[na - 1].key:
            dsu.union(r * na, r * na + na - 1)
    return dsu


def label_components(grid: Grid) -> list[ComponentRecord]:
    g = grid.spec
    na, nb = g.na, g.nb
    dsu = _flood(grid)
    members: dict[int, list[tuple[int, int]]] = {}
    for r in range(nb):
        for c in range(na):
            if grid.rows[r][c].key is not None:
                members.setdefault(dsu.find(r * na + c), []).append((r, c))

    a_vals = g.a_values()
    b_vals = g.b_values()
    out = []
    for cid, root in enumerate(sorted(members)):
        cells = members[root]
        r0, c0 = cells[0]
        first = grid.rows[r0][c0]
        types = Counter((grid.rows[r][c].type_k, grid.rows[r][c].type_p) for r, c in cells)
        tk, tp = types.most_common(1)[0][0]
        rows_hit = [r for r, _ in cells]
        top = sorted(c for r, c in cells if r == 0)
        run = _longest_run(top, na, g.full_circle)
        touches = bool(top)
        kind = Kind.TONGUE if touches and run >= 2 and not g.truncated else Kind.EYE
        lo, hi = _circular_extent({c for _, c in cells}, na, g.full_circle)
        out.append(ComponentRecord(
            id=cid,
            kind=kind,
            period=first.period,
            itinerary=first.itinerary,
            type_k=tk,
            type_p=tp,
            cell_count=len(cells),
            a_min=float(a_vals[lo]),
            a_max=float(a_vals[hi]),
            b_min=float(b_vals[max(rows_hit)]),
            b_max=float(b_vals[min(rows_hit)]),
            max_b=float(b_vals[min(rows_hit)]),
            touches_top=touches,
            grid_truncated=g.truncated,
        ))
    return out


def _longest_run(cols: list[int], na: int, full: bool) -> int:
    if not cols:
        return 0
    s = set(cols)
    if full and len(s) == na:
        return na
    best = 0
    for c in s:
        prev = (c - 1) % na if full else c - 1
        if prev in s:
            continue
        n = 1
        nxt = (c + 1) % na if full else c + 1
        while nxt in s:
            n += 1
            nxt = (nxt + 1) % na if full else nxt + 1
        best = max(best, n)
    return best


def component_at(grid: Grid, comps: list[ComponentRecord], a: float, b: float) -> "ComponentRecord | None":
    """The component containing the cell of (a, b), if that cell is in one."""
    r, c = grid.locate(a, b)
    if grid.rows[r][c].key is None:
        return None
    g = grid.spec
    dsu = _flood(grid)
    roots = sorted({dsu.find(i) for i in range(g.na * g.nb) if grid.rows[i // g.na][i % g.na].key is not None})
    return comps[roots.index(dsu.find(r * g.na + c))]


# ------------------------------------------------------------------- export

def _pixel(cell: CellResult) -> tuple[int, int, int]:
    if cell.status is Status.NO_ATTRACTOR:
        return 0, 0, 0
    if cell.status is Status.BREAK_POINT_ADJACENT:
        return 255, 255, 255
    rgb = PALETTE[cell.period % 16]
    if cell.classification == Classification.SINGLE_MINUS.value:
        return rgb
    return tuple(v // 2 for v in rgb)


def to_ppm(grid: Grid) -> bytes:
    g = grid.spec
    body = bytearray()
    for row in grid.rows:
        for cell in row:
            body.extend(_pixel(cell))
    return f"P6\n{g.na} {g.nb}\n255\n".encode("ascii") + bytes(body)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    if v is None:
        return ""
    if isinstance(v, enum.Enum):
        return v.value
    return str(v)


def to_csv(comps: list[ComponentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for comp in comps:
        w.writerow([_fmt(getattr(comp, f)) for f in CSV_FIELDS])
    return buf.getvalue()


def _rle(row: list) -> list:
    out = []
    for cell in row:
        if out and out[-1][1] == cell:
            out[-1][0] += 1
        else:
            out.append([1, cell])
    return [[n, cell.to_dict()] for n, cell in out]


def to_json(grid: Grid, comps: list[ComponentRecord]) -> str:
    doc = {
        "grid_spec": grid.spec.to_dict(),
        "cells": [_rle(row) for row in grid.rows],
        "components": [c.to_dict() for c in comps],
    }
    return json.dumps(doc, indent=1) + "\n"


def from_json(text: str) -> tuple[Grid, list[ComponentRecord]]:
    doc = json.loads(text)
    spec = GridSpec(**doc["grid_spec"])
    rows = []
    for enc in doc["cells"]:
        row = []
        for n, d in enc:
            row.extend([CellResult.from_dict(d)] * n)
        rows.append(row)
    return Grid(spec, rows), [ComponentRecord.from_dict(c) for c in doc["components"]]


def load_json(path) -> tuple[Grid, list[ComponentRecord]]:
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())


def export(grid: Grid, comps: list[ComponentRecord], fmt: str, path) -> str:
    """Write one export format to ``path``; returns the path written."""
    path = os.fspath(path)
    try:
        if fmt == "ppm":
            with open(path, "wb") as fh:
                fh.write(to_ppm(grid))
        elif fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(to_csv(comps))
        elif fmt == "json":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(to_json(grid, comps))
        else:
            raise ValueError(f"unknown export format {fmt!r}")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e
    return path


def mirror_column(spec: GridSpec, c: int) -> int:
    """Column of a -> 1/2 - a on a full-circle grid with an even number of columns."""
    if not spec.full_circle:
        raise ValueError("mirror columns need a full-circle grid")
    # centre (c + 1/2)/na maps to (na/2 - c - 1/2)/na, shifted by 2 a_min/na
    shift = round(2 * spec.a_min * spec.na)
    return (spec.na // 2 - 1 - c - shift) % spec.na
