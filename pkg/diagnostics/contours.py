"""
Marching-squares level-set extraction on a rectangular lattice.

Cells touching a non-finite value (the +-inf sentinels of a potential
field) are skipped. Saddle cells are resolved with the cell-centre rule:
the mean of the four corners decides whether the two "above" corners are
connected through the centre.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from diagnostics.potential import PotentialField

EdgeId = Tuple[str, int, int]

# corner bits: 1 bottom-left, 2 bottom-right, 4 top-right, 8 top-left
_CASES: Dict[int, List[Tuple[str, str]]] = {
    1: [("left", "bottom")],
    2: [("bottom", "right")],
    3: [("left", "right")],
    4: [("right", "top")],
    6: [("bottom", "top")],
    7: [("left", "top")],
    8: [("left", "top")],
    9: [("bottom", "top")],
    11: [("right", "top")],
    12: [("left", "right")],
    13: [("bottom", "right")],
    14: [("left", "bottom")],
}
_SADDLE_SPLIT = [("left", "bottom"), ("right", "top")]
_SADDLE_JOIN = [("bottom", "right"), ("left", "top")]


@dataclass(frozen=True, eq=False)
class Polyline:
    level: float
    points: np.ndarray  # shape (k, 2)
    closed: bool


def default_levels(values: np.ndarray, step: float = 0.5) -> List[float]:
    """Integer and half-integer levels spanning the finite range of values."""
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return []
    lo, hi = np.ceil(finite.min() / step), np.floor(finite.max() / step)
    return [float(k * step) for k in np.arange(lo, hi + 1)]


def _segments(values: np.ndarray, level: float) -> List[Tuple[EdgeId, EdgeId]]:
    segs: List[Tuple[EdgeId, EdgeId]] = []
    above = (values >= level).astype(int)
    cases = above[:-1, :-1] | (above[:-1, 1:] << 1) | (above[1:, 1:] << 2) | (above[1:, :-1] << 3)
    finite = np.isfinite(values)
    usable = finite[:-1, :-1] & finite[:-1, 1:] & finite[1:, 1:] & finite[1:, :-1]
    active = usable & (cases != 0) & (cases != 15)
    for i, j in zip(*np.nonzero(active)):
        i, j = int(i), int(j)
        a, b = values[i, j], values[i, j + 1]
        c, d = values[i + 1, j + 1], values[i + 1, j]
        case = int(cases[i, j])
        edges = {
            "bottom": ("h", i, j),
            "top": ("h", i + 1, j),
            "left": ("v", i, j),
            "right": ("v", i, j + 1),
        }
        if case in (5, 10):
            centre_above = (a + b + c + d) / 4.0 >= level
            if case == 5:
                pairs = _SADDLE_JOIN if centre_above else _SADDLE_SPLIT
            else:
                pairs = _SADDLE_SPLIT if centre_above else _SADDLE_JOIN
        else:
            pairs = _CASES[case]
        for e0, e1 in pairs:
            segs.append((edges[e0], edges[e1]))
    return segs


def _edge_point(edge: EdgeId, x: np.ndarray, y: np.ndarray, values: np.ndarray, level: float) -> Tuple[float, float]:
    kind, i, j = edge
    if kind == "h":
        v0, v1 = values[i, j], values[i, j + 1]
        t = (level - v0) / (v1 - v0) if v1 != v0 else 0.5
        return (float(x[j] + t * (x[j + 1] - x[j])), float(y[i]))
    v0, v1 = values[i, j], values[i + 1, j]
    t = (level - v0) / (v1 - v0) if v1 != v0 else 0.5
    return (float(x[j]), float(y[i] + t * (y[i + 1] - y[i])))


def _chain(segs: Sequence[Tuple[EdgeId, EdgeId]]) -> List[Tuple[List[EdgeId], bool]]:
    adjacency: Dict[EdgeId, List[EdgeId]] = defaultdict(list)
    for e0, e1 in segs:
        adjacency[e0].append(e1)
        adjacency[e1].append(e0)
    visited_links = set()
    chains: List[Tuple[List[EdgeId], bool]] = []

    def walk(start: EdgeId) -> Tuple[List[EdgeId], bool]:
        path = [start]
        node = start
        while True:
            nxt = None
            for cand in adjacency[node]:
                link = frozenset((node, cand))
                if link not in visited_links:
                    nxt = cand
                    visited_links.add(link)
                    break
            if nxt is None:
                return path, False
            if nxt == start:
                path.append(start)
                return path, True
            path.append(nxt)
            node = nxt

    for node in sorted(adjacency):
        if len(adjacency[node]) == 1 and any(
            frozenset((node, c)) not in visited_links for c in adjacency[node]
        ):
            chains.append(walk(node))
    for node in sorted(adjacency):
        if any(frozenset((node, c)) not in visited_links for c in adjacency[node]):
            chains.append(walk(node))
    return chains


def contour_lines_grid(
    x: np.ndarray, y: np.ndarray, values: np.ndarray, levels: Iterable[float]
) -> List[Polyline]:
    """Polylines of values == level for every requested level (values[i, j] at (x[j], y[i]))."""
    out: List[Polyline] = []
    for level in levels:
        segs = _segments(values, level)
        for path, closed in _chain(segs):
            pts = np.array([_edge_point(e, x, y, values, level) for e in path])
            out.append(Polyline(float(level), pts, closed))
    return out


def contour_lines(field: PotentialField, levels: Optional[Iterable[float]] = None) -> List[Polyline]:
    """Contours of a potential field; default levels are integers and half-integers."""
    if levels is None:
        levels = default_levels(field.values)
    return contour_lines_grid(field.x, field.y, field.values, levels)
