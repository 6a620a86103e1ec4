"""Triangulation generators for tests and verification corpora.

All generators are deterministic.  Rotation systems are derived from explicit
planar coordinates (neighbors sorted by angle), so the combinatorial
embedding always matches a genuine drawing.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from velpack.planar import PlanarMap, RootedTriangulation


def map_from_positions(adjacency: Mapping[int, Sequence[int]],
                       pos: Mapping[int, complex],
                       outer: Sequence[int]) -> PlanarMap:
    """Rotation system from straight-line coordinates (ccw angle order)."""
    rotations = {}
    for v, nbrs in adjacency.items():
        rotations[v] = sorted(
            nbrs, key=lambda w: math.atan2((pos[w] - pos[v]).imag,
                                           (pos[w] - pos[v]).real))
    return PlanarMap.from_rotations(rotations, outer)


def k4() -> RootedTriangulation:
    """Outer triangle 1,2,3 with interior root 0."""
    pos = {0: 0j, 1: complex(-1, -0.7), 2: complex(1, -0.7), 3: complex(0, 1)}
    adj = {0: [1, 2, 3], 1: [0, 2, 3], 2: [0, 1, 3], 3: [0, 1, 2]}
    return RootedTriangulation(map_from_positions(adj, pos, [1, 2, 3]), 0)


def wheel(spokes: int) -> RootedTriangulation:
    """Hub 0 joined to a cycle 1..spokes; W7 is wheel(6)."""
    if spokes < 3:
        raise ValueError("need at least 3 spokes")
    pos = {0: 0j}
    adj: dict[int, list[int]] = {0: list(range(1, spokes + 1))}
    for i in range(1, spokes + 1):
        ang = 2 * math.pi * (i - 1) / spokes
        pos[i] = complex(math.cos(ang), math.sin(ang))
        nxt = i % spokes + 1
        prv = (i - 2) % spokes + 1
        adj[i] = [0, prv, nxt]
    return RootedTriangulation(
        map_from_positions(adj, pos, list(range(1, spokes + 1))), 0)


def stacked_wheel(spokes: int, rings: int) -> RootedTriangulation:
    """Hub plus `rings` concentric rings of `spokes` vertices each.

    Ring r vertex i has id r*spokes + i + 1; each annulus is triangulated
    with radials (r,i)-(r+1,i) and diagonals (r,i+1)-(r+1,i).
    """
    if spokes < 3 or rings < 1:
        raise ValueError("need spokes >= 3 and rings >= 1")

    def vid(r: int, i: int) -> int:
        return (r - 1) * spokes + (i % spokes) + 1

    pos = {0: 0j}
    adj: dict[int, list[int]] = {0: [vid(1, i) for i in range(spokes)]}
    for r in range(1, rings + 1):
        for i in range(spokes):
            ang = 2 * math.pi * i / spokes
            v = vid(r, i)
            pos[v] = r * complex(math.cos(ang), math.sin(ang))
            nbrs = [vid(r, i - 1), vid(r, i + 1)]
            if r == 1:
                nbrs.append(0)
            else:
                nbrs.extend([vid(r - 1, i), vid(r - 1, i + 1)])
            if r < rings:
                nbrs.extend([vid(r + 1, i), vid(r + 1, i - 1)])
            adj[v] = nbrs
    outer = [vid(rings, i) for i in range(spokes)]
    return RootedTriangulation(map_from_positions(adj, pos, outer), 0)


def subdivided_triangle(depth: int) -> RootedTriangulation:
    """Equilateral triangle uniformly subdivided `depth` times per side.

    Vertices are lattice points (i, j) with i + j <= depth, id-packed row by
    row.  Root is the most central interior lattice point.
    """
    if depth < 3:
        raise ValueError("need depth >= 3 for an interior root")
    ids = {}
    pos = {}
    for i in range(depth + 1):
        for j in range(depth + 1 - i):
            ids[(i, j)] = len(ids)
            pos[len(ids) - 1] = complex(i + 0.5 * j, j * math.sqrt(3) / 2)
    adj: dict[int, list[int]] = {v: [] for v in pos}
    steps = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]
    for (i, j), v in ids.items():
        for di, dj in steps:
            w = ids.get((i + di, j + dj))
            if w is not None:
                adj[v].append(w)
    bottom = [ids[(i, 0)] for i in range(depth + 1)]
    hypot = [ids[(depth - j, j)] for j in range(1, depth + 1)]
    left = [ids[(0, depth - j)] for j in range(1, depth)]
    outer = bottom + hypot + left
    c = depth // 3
    root = ids.get((c, c), ids[(1, 1)])
    return RootedTriangulation(map_from_positions(adj, pos, outer), root)
