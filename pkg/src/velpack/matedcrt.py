"""Mated-CRT random maps from correlated two-sided Brownian traces.

A trace is a pair (L, R) of standard two-sided Brownian motions pinned at
zero, with per-step increment correlation -cos(pi gamma^2 / 4), sampled on a
grid of step eps/oversample.  Vertices are the integer multiples of eps in a
time window.  Consecutive vertices are joined by spine edges; two vertices
x1 < x2 - eps are joined below (resp. above) the spine when both of their
cell infima are at most the infimum of the coordinate between them:

    min over [x1-eps, x1]  and  min over [x2-eps, x2]
        both <= min over [x1, x2-eps].

With distinct cell minima these pairs form a non-crossing family per side,
found in linear time by a monotone stack; the rotation system nests arcs by
depth, lower-coordinate arcs below the spine and upper-coordinate arcs
above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from velpack.planar import (PlanarMap, RootedTriangulation, block_containing,
                            collapse_parallel, fill_enclosed,
                            validate_triangulation)


class DegenerateTraceError(ValueError):
    """Tied interval minima; the adjacency rule is only almost-surely
    well defined and refuses exact ties."""


class TraceSizeError(ValueError):
    pass


class WindowError(ValueError):
    """Window pipeline failure (root deleted, root on boundary, ...)."""


MAX_GRID_POINTS = 80_000_000


class RangeMin:
    """O(1) range-minimum queries after linear-ish preprocessing.

    Block decomposition with a sparse table over block minima plus in-block
    prefix and suffix minima; queries inside one block fall back to a scan
    bounded by the block size.
    """

    def __init__(self, values: np.ndarray, block: int = 32):
        self.values = np.asarray(values, dtype=float)
        n = len(self.values)
        self.block = block
        nb = (n + block - 1) // block
        pad = np.full(nb * block - n, np.inf)
        v = np.concatenate([self.values, pad]).reshape(nb, block)
        self.prefix = np.minimum.accumulate(v, axis=1)
        self.suffix = np.minimum.accumulate(v[:, ::-1], axis=1)[:, ::-1]
        bmins = v.min(axis=1)
        levels = max(1, nb.bit_length())
        table = [bmins]
        k = 1
        while (1 << k) <= nb:
            prev = table[-1]
            table.append(np.minimum(prev[:nb - (1 << k) + 1],
                                    prev[(1 << (k - 1)):nb - (1 << (k - 1))
                                         + 1]))
            k += 1
        self.table = table

    def min(self, i: int, j: int) -> float:
        """Minimum of values[i..j] inclusive."""
        if i > j:
            raise ValueError("empty range")
        bi, bj = i // self.block, j // self.block
        if bi == bj:
            return float(self.values[i:j + 1].min())
        left = float(self.suffix[bi, i - bi * self.block])
        right = float(self.prefix[bj, j - bj * self.block])
        best = min(left, right)
        lo, hi = bi + 1, bj - 1
        if lo <= hi:
            k = (hi - lo + 1).bit_length() - 1
            best = min(best,
                       float(self.table[k][lo]),
                       float(self.table[k][hi - (1 << k) + 1]))
        return best


@dataclass
class CorrelatedTrace:
    """Correlated Brownian pair on the grid of [-horizon, horizon].

    `lower` and `upper` hold L and R on fine-grid indices 0..2N with time
    (index - N) * eps / oversample; both are zero at the center index.
    """
    gamma: float
    epsilon: float
    oversample: int
    horizon: float
    seed: int
    lower: np.ndarray
    upper: np.ndarray
    _rmq: dict = field(default_factory=dict, repr=False)

    @property
    def center(self) -> int:
        return (len(self.lower) - 1) // 2

    @property
    def dt(self) -> float:
        return self.epsilon / self.oversample

    def grid_index(self, t: float) -> int:
        return self.center + round(t / self.dt)

    def interval_min(self, which: str, t0: float, t1: float) -> float:
        """Minimum of the chosen coordinate over grid points in [t0, t1]."""
        if which not in ("lower", "upper"):
            raise ValueError("which must be 'lower' or 'upper'")
        if which not in self._rmq:
            self._rmq[which] = RangeMin(getattr(self, which))
        i, j = self.grid_index(t0), self.grid_index(t1)
        return self._rmq[which].min(i, j)


def correlation_for_gamma(gamma: float) -> float:
    return -math.cos(math.pi * gamma * gamma / 4.0)


def sample_trace(gamma: float, epsilon: float, horizon: float,
                 oversample: int = 16, seed: int = 0,
                 max_points: int = MAX_GRID_POINTS) -> CorrelatedTrace:
    """Deterministic correlated trace; independent forward and backward
    halves pinned at zero."""
    if not 0.0 < gamma < 2.0:
        raise ValueError("gamma must lie in (0, 2)")
    if epsilon <= 0 or horizon <= 0:
        raise ValueError("epsilon and horizon must be positive")
    if oversample < 1:
        raise ValueError("oversample must be at least 1")
    cells = math.ceil(horizon / epsilon)
    n = cells * oversample
    if 2 * n + 1 > max_points:
        raise TraceSizeError(f"grid of {2 * n + 1} points exceeds cap "
                             f"{max_points}")
    corr = correlation_for_gamma(gamma)
    dt = epsilon / oversample
    rng = np.random.default_rng(seed)
    out = {}
    for part in ("fwd", "bwd"):
        z1 = rng.standard_normal(n)
        z2 = rng.standard_normal(n)
        dl = math.sqrt(dt) * z1
        dr = math.sqrt(dt) * (corr * z1 + math.sqrt(1.0 - corr * corr) * z2)
        out[part] = (np.cumsum(dl), np.cumsum(dr))
    lower = np.concatenate([out["bwd"][0][::-1], [0.0], out["fwd"][0]])
    upper = np.concatenate([out["bwd"][1][::-1], [0.0], out["fwd"][1]])
    return CorrelatedTrace(gamma, epsilon, oversample, cells * epsilon,
                           seed, lower, upper)


# -- adjacency ----------------------------------------------------------------

def cell_minima(trace: CorrelatedTrace, lo: int, hi: int,
                which: str) -> np.ndarray:
    """Minimum of the coordinate over the cell (x - eps, x] for each vertex
    index x = lo..hi (integer multiples of eps).

    Cells are half-open on the grid so that adjacent cells share no sample:
    the continuum infima are almost surely attained at interior times, and
    keeping the shared endpoint would manufacture exact ties that the
    genericity check must reject.
    """
    arr = getattr(trace, which)
    os_ = trace.oversample
    c = trace.center
    start = c + (lo - 1) * os_
    stop = c + hi * os_
    if start < 0 or stop >= len(arr):
        raise ValueError("window exceeds sampled horizon")
    seg = arr[start + 1:stop + 1]
    return seg.reshape(hi - lo + 1, os_).min(axis=1)


def _stack_arcs(m: np.ndarray) -> list[tuple[int, int]]:
    """Pairs (i, j), j >= i + 2, whose cell minima are both below every
    cell minimum strictly between them.  Linear-time monotone stack; exact
    ties raise."""
    arcs: list[tuple[int, int]] = []
    stack: list[int] = []
    for j in range(len(m)):
        while stack:
            top = m[stack[-1]]
            if top == m[j]:
                raise DegenerateTraceError("tied interval minima")
            if top < m[j]:
                break
            p = stack.pop()
            if stack:
                arcs.append((stack[-1], j))
        stack.append(j)
    return arcs


@dataclass(frozen=True)
class MatedCrtMap:
    """Windowed mated-CRT adjacency with its drawing data.  Vertex ids are
    the integer time indices; `side` tags each edge label as spine, lower
    or upper."""
    map: PlanarMap
    epsilon: float
    side: dict[int, str]

    def time_of(self, v: int) -> float:
        return v * self.epsilon

    @property
    def vertices(self):
        return self.map.vertices


def build_adjacency(trace: CorrelatedTrace,
                    window: tuple[float, float]) -> MatedCrtMap:
    """Mated-CRT map on the vertices of eps Z inside the window.

    Lower (L) and upper (R) arcs come from the stack sweep over cell
    minima; the rotation at each vertex nests arcs by span, lower arcs
    below the spine and upper arcs above.
    """
    a, b = window
    if b <= a:
        raise ValueError("empty window")
    eps = trace.epsilon
    lo = math.ceil(a / eps - 1e-12)
    hi = math.floor(b / eps + 1e-12)
    n = hi - lo + 1
    if n < 2:
        raise ValueError("window holds fewer than two vertices")

    arcs = {}
    for which in ("lower", "upper"):
        m = cell_minima(trace, lo, hi, which)
        if np.unique(m).size != n:
            raise DegenerateTraceError("tied interval minima")
        arcs[which] = _stack_arcs(m)

    # edge list: spine, then lower arcs, then upper arcs; half-edge 2e sits
    # at the left (smaller-time) endpoint
    edges: list[tuple[int, int]] = [(i, i + 1) for i in range(n - 1)]
    side: dict[int, str] = {e: "spine" for e in range(n - 1)}
    for which in ("lower", "upper"):
        for i, j in sorted(arcs[which]):
            side[len(edges)] = which
            edges.append((i, j))
    # per-vertex arc lists (edge indices) for the rotation
    up_r: list[list[int]] = [[] for _ in range(n)]
    up_l: list[list[int]] = [[] for _ in range(n)]
    low_r: list[list[int]] = [[] for _ in range(n)]
    low_l: list[list[int]] = [[] for _ in range(n)]
    for e in range(n - 1, len(edges)):
        i, j = edges[e]
        if side[e] == "lower":
            low_r[i].append(e)
            low_l[j].append(e)
        else:
            up_r[i].append(e)
            up_l[j].append(e)

    def span(e):
        i, j = edges[e]
        return j - i

    origin = [0] * (2 * len(edges))
    for e, (i, j) in enumerate(edges):
        origin[2 * e] = i + lo
        origin[2 * e + 1] = j + lo
    nxt = [0] * (2 * len(edges))
    for v in range(n):
        rot: list[int] = []
        if v + 1 < n:
            rot.append(2 * v)
        # above the spine: right arcs by increasing span, then left arcs
        # from the outermost down toward the west spine direction
        for e in sorted(up_r[v], key=span):
            rot.append(2 * e)
        for e in sorted(up_l[v], key=span, reverse=True):
            rot.append(2 * e + 1)
        if v - 1 >= 0:
            rot.append(2 * (v - 1) + 1)
        for e in sorted(low_l[v], key=span):
            rot.append(2 * e + 1)
        for e in sorted(low_r[v], key=span, reverse=True):
            rot.append(2 * e)
        for x, y in zip(rot, rot[1:] + rot[:1]):
            nxt[x] = y

    # unbounded wedge at the leftmost vertex: between the outermost upper
    # arc (or the east spine edge) and the following rotation entry.
    # Multiplicity never exceeds two here: spine pairs are unit-span, and
    # each coordinate contributes at most one arc per pair.
    outer_half = 2 * max(up_r[0], key=span) if up_r[0] else 0
    mp = PlanarMap(origin, nxt, outer_edge=outer_half)
    return MatedCrtMap(mp, eps, dict(side))


def _relabel_vertices(m: PlanarMap, ren: dict[int, int]) -> PlanarMap:
    origin = [ren[v] for v in m.origin]
    return PlanarMap(origin, m.nxt, m.outer_edge, m.edge_labels)


def _block_vertex_sets(m: PlanarMap) -> list[set[int]]:
    from velpack.planar import _biconnected_edge_sets
    out = []
    for comp in _biconnected_edge_sets(m):
        vs: set[int] = set()
        for e in comp:
            u, w = m.edge_endpoints(e)
            vs.add(u)
            vs.add(w)
        out.append(vs)
    return out


def window_triangulation(mcrt: MatedCrtMap, inner_fraction: float,
                         seeds=None) -> RootedTriangulation:
    """Simple rooted triangulation from a windowed map: restrict to the
    block spanned by the seed vertices, fill enclosed vertices back in,
    collapse doubled edges, and root at time zero.

    By default the seeds are the central `inner_fraction` of the window
    intersected with the root's largest block: unlike a disk window, a time
    window gives no guarantee that the central vertices share one block, so
    the seed set is clipped to the block that carries the root.
    """
    if not 0.0 < inner_fraction < 1.0:
        raise ValueError("inner fraction must lie in (0, 1)")
    m = mcrt.map
    vs = m.vertices
    if 0 not in vs:
        raise WindowError("window does not contain time zero")
    if seeds is None:
        lo, hi = vs[0], vs[-1]
        center = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        central = {v for v in vs
                   if abs(v - center) <= inner_fraction * half}
        root_block = max(
            (blk for blk in _block_vertex_sets(m) if 0 in blk),
            key=lambda blk: (len(blk), sorted(blk)))
        seeds = (central & root_block) | {0}
    g0 = block_containing(m, seeds)
    g1 = fill_enclosed(m, g0)
    g2 = collapse_parallel(g1)
    if 0 not in g2.vertices:
        raise WindowError("window too small: root was cut away")
    if 0 in set(g2.outer_face_vertices()):
        raise WindowError("window too small: root lies on the boundary")
    rep = validate_triangulation(g2, 0)
    if not rep.ok:
        raise WindowError(f"pipeline output invalid: {rep.violations}")
    return RootedTriangulation(g2, 0)


# -- trace serialization ------------------------------------------------------

def trace_csv(trace: CorrelatedTrace) -> str:
    lines = ["gamma,epsilon,oversample,horizon,seed",
             f"{trace.gamma!r},{trace.epsilon!r},{trace.oversample},"
             f"{trace.horizon!r},{trace.seed}",
             "index,L,R"]
    for i in range(len(trace.lower)):
        lines.append(f"{i - trace.center},{trace.lower[i]!r},"
                     f"{trace.upper[i]!r}")
    return "\n".join(lines) + "\n"


def write_trace_csv(trace: CorrelatedTrace, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(trace_csv(trace))


def read_trace_csv(path: str) -> CorrelatedTrace:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "gamma,epsilon,oversample,horizon,seed":
            raise ValueError(f"bad trace header: {header}")
        g, e, o, h, s = fh.readline().strip().split(",")
        fh.readline()
        lower, upper = [], []
        for line in fh:
            if not line.strip():
                continue
            _, lv, rv = line.strip().split(",")
            lower.append(float(lv))
            upper.append(float(rv))
    return CorrelatedTrace(float(g), float(e), int(o), float(h), int(s),
                           np.array(lower), np.array(upper))
