"""Vertex extremal length of boundary and winding path families.

VEL of a path family is sup_m len_m^2 / area(m) over nonnegative vertex
weights, where a path's length counts each distinct vertex once.  The exact
value is computed through the equivalent convex program

    minimize  sum_v m(v)^2   subject to  len_m(gamma) >= 1 for all gamma,

solved by constraint generation: a vertex-weighted shortest-path oracle
produces the most violated family member, and the inner minimization over
the active 0/1 rows is an equality-constrained least squares with active-set
clipping for nonnegativity.

Two families are supported for a rooted map: paths from a vertex to the
outer face, and closed walks through a vertex that wind once around the
root.  Winding is measured combinatorially: a reference cut is built as a
dual path of faces from the root to the outer face, each traversed edge
carries a sheet offset of -1, 0 or +1, and the oracle searches the lifted
graph of (vertex, sheet) states from (v, 0) to (v, 1).
"""

from __future__ import annotations

import cmath
import heapq
import math
import warnings
from dataclasses import dataclass

import numpy as np

from velpack.planar import PlanarMap, RootedTriangulation


class FamilyEmptyError(ValueError):
    pass


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class Boundary:
    """Paths from `vertex` to any vertex of the outer face."""
    vertex: int


@dataclass(frozen=True)
class Winding:
    """Closed walks through `vertex`, avoiding `root`, winding once
    around it."""
    root: int
    vertex: int


PathFamily = Boundary | Winding


@dataclass(frozen=True)
class VelResult:
    value: float
    metric: dict[int, float]
    certificates: tuple[tuple[int, ...], ...]
    gap: float
    iterations: int

    def csv_row(self, vertex: int, family: str) -> str:
        area = sum(x * x for x in self.metric.values())
        return (f"{vertex},{family},{self.value!r},{area!r},"
                f"{self.iterations},{self.gap!r}")


@dataclass(frozen=True)
class AnnuliParams:
    """Dyadic annuli centered at `center` with radii inner_radius * 2^k,
    k = 0..levels; anchors locate each vertex's object and `size_kind` says
    whether the per-vertex size field is a radius or a diameter."""
    center: complex
    inner_radius: float
    levels: int
    anchors: dict[int, complex]
    size_kind: str = "radius"


def evaluate_metric(m: dict[int, float], path) -> tuple[float, float]:
    """(length, area): length counts each vertex of the path once."""
    try:
        length = sum(m[v] for v in set(path))
    except KeyError as exc:
        raise ValueError(f"vertex {exc.args[0]} missing from metric") from exc
    area = sum(x * x for x in m.values())
    return length, area


def path_length(m: dict[int, float], path) -> float:
    return sum(m[v] for v in set(path))


# -- winding cut --------------------------------------------------------------

def winding_cut(m: PlanarMap, root: int) -> dict[int, int]:
    """Sheet offsets for a reference cut from the root to the outer face.

    The cut is a dual path: it leaves the root inside an incident face and
    crosses one edge at a time until it reaches the outer face.  A half-edge
    h crossing the cut gets offset +1 when the cut passes from the face
    right of h to the face left of h, so the accumulated offset of a walk
    equals its winding number around the root.
    """
    start = sorted(m.faces_at(root))
    outer = m.outer_face_index
    parent: dict[int, tuple[int, int]] = {}
    seen = set(start)
    queue = list(start)
    found = None
    while queue:
        f = queue.pop(0)
        if f == outer:
            found = f
            break
        for h in sorted(m.faces[f]):
            g = m.face_of(h ^ 1)
            if g not in seen:
                seen.add(g)
                parent[g] = (f, h)
                queue.append(g)
    if found is None:
        raise OracleError("outer face unreachable in dual graph")
    delta: dict[int, int] = {}
    f = found
    while f not in set(start):
        prev, h = parent[f]
        # cut crosses the edge of h from face prev (= left of h) into f;
        # traversing h then crosses the cut left-to-right, which is one
        # positive (counterclockwise) turn around the root
        delta[h] = +1
        delta[h ^ 1] = -1
        f = prev
    return delta


# -- oracles ------------------------------------------------------------------

def _neighbors_sorted(m: PlanarMap) -> dict[int, list[int]]:
    return {v: sorted(set(m.neighbors_ccw(v))) for v in m.vertices}


def shortest_boundary_path(m: PlanarMap, weights: dict[int, float],
                           v: int) -> list[int]:
    """Vertex-weighted shortest path from v to the outer-face vertex set."""
    targets = set(m.outer_face_vertices())
    adj = _neighbors_sorted(m)
    dist = {v: weights[v]}
    parent: dict[int, int | None] = {v: None}
    heap = [(dist[v], v)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u in targets:
            path = []
            x: int | None = u
            while x is not None:
                path.append(x)
                x = parent[x]
            return path[::-1]
        for w in adj[u]:
            nd = d + weights[w]
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                parent[w] = u
                heapq.heappush(heap, (nd, w))
    raise OracleError("no path to the outer face")


def shortest_winding_walk(m: PlanarMap, weights: dict[int, float],
                          root: int, v: int, sheets: int = 3,
                          delta: dict[int, int] | None = None
                          ) -> list[int] | None:
    """Minimum-weight closed walk through v avoiding the root with winding
    number one, as a shortest path from (v, 0) to (v, 1) in the sheeted
    lift.  Returns the projected vertex walk (first == last == v), or None
    when no lift stays within the sheet range."""
    if v == root:
        raise FamilyEmptyError("winding family at the root is empty")
    if delta is None:
        delta = winding_cut(m, root)
    trans: dict[int, list[tuple[int, int]]] = {}
    for u in m.vertices:
        if u == root:
            continue
        out = []
        for h in m.half_edges_at(u):
            w = m.head(h)
            if w == root:
                continue
            out.append((w, delta.get(h, 0)))
        trans[u] = sorted(set(out))
    lo, hi = -sheets, sheets + 1
    start = (v, 0)
    goal = (v, 1)
    dist = {start: weights[v]}
    parent: dict[tuple[int, int], tuple[int, int] | None] = {start: None}
    heap = [(weights[v], v, 0)]
    done = set()
    while heap:
        d, u, k = heapq.heappop(heap)
        if (u, k) in done:
            continue
        done.add((u, k))
        if (u, k) == goal:
            walk = []
            cur: tuple[int, int] | None = goal
            while cur is not None:
                walk.append(cur[0])
                cur = parent[cur]
            return walk[::-1]
        for w, dk in trans[u]:
            k2 = k + dk
            if not lo <= k2 <= hi:
                continue
            nd = d + weights[w]
            state = (w, k2)
            if state not in dist or nd < dist[state]:
                dist[state] = nd
                parent[state] = (u, k)
                heapq.heappush(heap, (nd, w, k2))
    return None


def shortest_constraint(tri: RootedTriangulation, m: dict[int, float],
                        fam: PathFamily) -> list[int]:
    """Most violated family member under the metric: the vertex-weighted
    shortest path (or winding walk) for the family."""
    for v in tri.map.vertices:
        if m.get(v, None) is None:
            raise ValueError(f"metric missing vertex {v}")
        if m[v] < 0:
            raise ValueError("metric must be nonnegative")
    if isinstance(fam, Boundary):
        return shortest_boundary_path(tri.map, m, fam.vertex)
    walk = shortest_winding_walk(tri.map, m, fam.root, fam.vertex)
    if walk is None:
        raise OracleError("no winding walk found within sheet bound")
    return walk


# -- inner QP -----------------------------------------------------------------

def _min_area_metric(rows: list[frozenset], qp_tol: float = 1e-12,
                     max_steps: int = 2000):
    """Minimize sum m^2 subject to sum_{v in row} m_v >= 1 and m >= 0.

    Active-set method: working rows are treated as equalities, solved in the
    dual (Gram system); negative primal entries are clamped to zero and
    negative multipliers release their rows.  Returns (metric dict on the
    support, active row indices with positive multipliers).
    """
    support = sorted(set().union(*rows)) if rows else []
    vidx = {v: i for i, v in enumerate(support)}
    n = len(support)
    A = np.zeros((len(rows), n))
    for i, row in enumerate(rows):
        for v in row:
            A[i, vidx[v]] = 1.0
    work: list[int] = []
    clamped = np.zeros(n, dtype=bool)
    mvec = np.zeros(n)
    lam = np.zeros(0)
    for _ in range(max_steps):
        if work:
            Af = A[np.ix_(work, np.nonzero(~clamped)[0])]
            G = Af @ Af.T
            try:
                lam = np.linalg.solve(G, np.ones(len(work)))
            except np.linalg.LinAlgError:
                lam = np.linalg.lstsq(G, np.ones(len(work)), rcond=None)[0]
            mvec = np.zeros(n)
            mvec[~clamped] = Af.T @ lam
        else:
            lam = np.zeros(0)
            mvec = np.zeros(n)
        neg = np.nonzero(mvec < -qp_tol)[0]
        if neg.size:
            worst = neg[np.argmin(mvec[neg])]
            clamped[worst] = True
            continue
        if lam.size and np.min(lam) < -qp_tol:
            work.pop(int(np.argmin(lam)))
            clamped[:] = False
            continue
        vals = A @ np.clip(mvec, 0.0, None)
        viol = [i for i in range(len(rows))
                if i not in work and vals[i] < 1.0 - qp_tol]
        if viol:
            worst = min(viol, key=lambda i: vals[i])
            work.append(worst)
            continue
        mvec = np.clip(mvec, 0.0, None)
        metric = {v: float(mvec[vidx[v]]) for v in support}
        active = [work[i] for i in range(len(work)) if lam[i] > qp_tol]
        return metric, active
    raise OracleError("inner quadratic program did not settle")


# -- exact VEL ----------------------------------------------------------------

def vel_exact(tri: RootedTriangulation, fam: PathFamily, tol: float = 1e-6,
              max_rounds: int = 500, sheets: int = 3,
              max_sheets: int = 6) -> VelResult:
    """Vertex extremal length by cutting planes.

    Stops when the oracle's shortest member has length >= 1 - tol under the
    current optimal metric of the accumulated rows.  For winding families
    the oracle is re-run with one more sheet after convergence and the solve
    resumes if that finds a shorter member.  The returned value len^2/area
    is the certified lower bound; `gap` bounds the distance to the true
    supremum.  By convention the winding family at the root itself has
    VEL 0.
    """
    mp = tri.map
    verts = list(mp.vertices)
    if isinstance(fam, Winding):
        if fam.vertex == fam.root:
            return VelResult(0.0, {v: 0.0 for v in verts}, (), 0.0, 0)
        if fam.vertex not in mp._rot or fam.root not in mp._rot:
            raise ValueError("family vertices not in map")
        delta = winding_cut(mp, fam.root)
    else:
        if fam.vertex not in mp._rot:
            raise ValueError("family vertex not in map")
        delta = None

    def oracle(metric, nsheets):
        if isinstance(fam, Boundary):
            return shortest_boundary_path(mp, metric, fam.vertex)
        return shortest_winding_walk(mp, metric, fam.root, fam.vertex,
                                     sheets=nsheets, delta=delta)

    m = {v: 1.0 / len(verts) for v in verts}
    rows: list[frozenset] = []
    paths: list[tuple[int, ...]] = []
    row_set: set[frozenset] = set()
    active_idx: list[int] = []
    cur_sheets = sheets
    area = 0.0
    it = 0
    while it < max_rounds:
        it += 1
        walk = oracle(m, cur_sheets)
        if walk is None:
            if not rows:
                return VelResult(math.inf, {v: 0.0 for v in verts}, (),
                                 math.inf, it)
            raise OracleError("winding oracle lost the family mid-solve")
        length = path_length(m, walk)
        if length >= 1.0 - tol:
            if isinstance(fam, Winding) and cur_sheets < max_sheets:
                walk2 = oracle(m, cur_sheets + 1)
                if walk2 is not None and \
                        path_length(m, walk2) < length - tol:
                    cur_sheets += 1
                    continue
            break
        row = frozenset(walk)
        if row in row_set:
            # oracle disagrees with the QP at tolerance level; accept the
            # tiny residual rather than loop
            break
        rows.append(row)
        paths.append(tuple(walk))
        row_set.add(row)
        m_support, active_idx = _min_area_metric(rows)
        m = {v: m_support.get(v, 0.0) for v in verts}
        area = sum(x * x for x in m.values())
    else:
        raise OracleError(f"no convergence in {max_rounds} rounds")

    if not rows:
        # the very first oracle call was already >= 1 under the uniform
        # start; solve with that single row to get a clean optimum
        walk = oracle(m, cur_sheets)
        rows.append(frozenset(walk))
        paths.append(tuple(walk))
        m_support, active_idx = _min_area_metric(rows)
        m = {v: m_support.get(v, 0.0) for v in verts}
    area = sum(x * x for x in m.values())
    final_walk = oracle(m, cur_sheets)
    length = path_length(m, final_walk) if final_walk else 1.0
    length = min(length, min(path_length(m, p) for p in paths))
    value = length * length / area
    scale = 1.0 / length
    metric = {v: m[v] * scale for v in verts}
    upper = 1.0 / area
    certs = tuple(paths[i] for i in active_idx) or tuple(paths)
    return VelResult(value, metric, certs, max(0.0, upper - value), it)


# -- annulus lower bound ------------------------------------------------------

def annuli_params_from_packing(p, v: int,
                               eps: float | None = None) -> AnnuliParams:
    """The dyadic-annulus construction around vertex v's circle: inner
    radius five times the largest circle, doubling up to between 1/8
    and 1/4."""
    if eps is None:
        eps = max(p.radii.values())
    r0 = 5.0 * eps
    levels = math.floor(math.log2(1.0 / r0)) - 2 if r0 < 1 else 0
    return AnnuliParams(center=p.centers[v], inner_radius=r0,
                        levels=levels, anchors=dict(p.centers),
                        size_kind="radius")


def annulus_metric(tri: RootedTriangulation, sizes: dict[int, float],
                   params: AnnuliParams) -> dict[int, float]:
    """Weight size/r_k on vertices whose object sits inside the k-th
    annulus, zero elsewhere."""
    m = {v: 0.0 for v in tri.map.vertices}
    if params.levels < 1:
        return m
    half = 0.5 if params.size_kind == "diameter" else 1.0
    radii = [params.inner_radius * (2.0 ** k)
             for k in range(params.levels + 1)]
    for v in tri.map.vertices:
        d = abs(params.anchors[v] - params.center)
        ext = sizes[v] * half
        for k in range(1, params.levels + 1):
            if d - ext > radii[k - 1] and d + ext < radii[k]:
                m[v] = sizes[v] / radii[k]
                break
    return m


def vel_lower_bound_annuli(tri: RootedTriangulation, sizes: dict[int, float],
                           params: AnnuliParams,
                           fam: PathFamily) -> float:
    """len^2/area of the explicit annulus metric; a certified lower bound
    for the family's VEL (weak duality).  Returns 0 with a warning when no
    annulus fits."""
    if params.levels < 1:
        warnings.warn("annulus construction empty: levels < 1",
                      stacklevel=2)
        return 0.0
    m = annulus_metric(tri, sizes, params)
    area = sum(x * x for x in m.values())
    if area <= 0.0:
        warnings.warn("annulus metric vanished on this map", stacklevel=2)
        return 0.0
    walk = shortest_constraint(tri, m, fam)
    length = path_length(m, walk)
    return length * length / area


# -- certificate paths from a packing ----------------------------------------

class DegenerateSampleError(RuntimeError):
    pass


def _circle_path(p, root: int, v: int, t: float) -> list[int]:
    """Vertices whose circles meet the circle of radius t about the origin,
    in counterclockwise order of first encounter starting at v."""
    cv = p.centers[v]
    base = cmath.phase(cv)
    hits = []
    for u in sorted(p.centers):
        if u == root:
            continue
        d = abs(p.centers[u])
        r = p.radii[u]
        if abs(d - t) >= r:
            if abs(abs(d - t) - r) < 1e-12:
                raise DegenerateSampleError("tangent grazing")
            continue
        arg = (t * t + d * d - r * r) / (2.0 * t * d)
        if abs(abs(arg) - 1.0) < 1e-12:
            raise DegenerateSampleError("tangent grazing")
        half = math.acos(max(-1.0, min(1.0, arg)))
        rel = (cmath.phase(p.centers[u]) - base) % (2.0 * math.pi)
        entry = (rel - half) % (2.0 * math.pi)
        hits.append((entry, u))
    hits.sort()
    order = [u for _, u in hits]
    if v not in order:
        raise DegenerateSampleError("sample circle misses the vertex circle")
    i = order.index(v)
    cyc = order[i:] + order[:i]
    return cyc + [v]


def _ray_path(pn, v: int, theta: float) -> list[int]:
    """Vertices whose circles meet the ray at angle theta from the origin,
    in order of entry; the packing must be normalized at v."""
    u_hat = cmath.exp(1j * theta)
    hits = []
    for u in sorted(pn.centers):
        if u == v:
            continue
        z = pn.centers[u] * u_hat.conjugate()
        along, perp = z.real, abs(z.imag)
        r = pn.radii[u]
        if perp >= r or along <= 0:
            if abs(perp - r) < 1e-12:
                raise DegenerateSampleError("ray grazing")
            continue
        if abs(perp - r) < 1e-12:
            raise DegenerateSampleError("ray grazing")
        hits.append((along - math.sqrt(r * r - perp * perp), u))
    hits.sort()
    return [v] + [u for _, u in hits]


def certificate_paths(p, v: int, kind: str, samples: int,
                      max_retries: int = 50) -> list[list[int]]:
    """Family members read off the packing geometry.

    kind "circle": for sampled t inside the root-axis chord of C_v, the
    circles met by |z| = t, a closed walk through v winding once around the
    root (requires a root-normalized packing and v != root).
    kind "ray": for sampled angles, the circles met by a ray from the
    origin in the packing normalized at v, a path from v to the boundary.
    Samples that graze a tangency are redrawn deterministically.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    out = []
    if kind == "circle":
        if p.root is None or abs(p.centers[p.root]) > 1e-6:
            raise ValueError("circle paths need a root-normalized packing")
        if v == p.root:
            raise ValueError("circle paths need v distinct from the root")
        d = abs(p.centers[v])
        r = p.radii[v]
        t1, t2 = d - r, d + r
        for k in range(samples):
            t = t1 + (t2 - t1) * (k + 1) / (samples + 1)
            for retry in range(max_retries):
                try:
                    out.append(_circle_path(p, p.root, v, t))
                    break
                except DegenerateSampleError:
                    t += (t2 - t1) * 1e-9 * (retry + 1)
            else:
                raise DegenerateSampleError(
                    "could not find a clean sample radius")
    elif kind == "ray":
        from velpack.packing import normalize_root
        pn = normalize_root(p, v)
        for k in range(samples):
            theta = 2.0 * math.pi * (k + 0.5) / samples
            for retry in range(max_retries):
                try:
                    path = _ray_path(pn, v, theta)
                    if path[-1] not in set(pn.boundary):
                        raise DegenerateSampleError("ray ends off-boundary")
                    out.append(path)
                    break
                except DegenerateSampleError:
                    theta += 1e-8 * (retry + 1)
            else:
                raise DegenerateSampleError(
                    "could not find a clean sample angle")
    else:
        raise ValueError(f"unknown certificate kind: {kind}")
    return out


def geometric_winding(p, root: int, walk) -> int:
    """Winding number of the closed polyline through the circle centers
    around the root circle's center."""
    c0 = p.centers[root]
    total = 0.0
    for a, b in zip(walk, walk[1:]):
        za = p.centers[a] - c0
        zb = p.centers[b] - c0
        total += cmath.phase(zb / za)
    return round(total / (2.0 * math.pi))


def path_in_family(tri: RootedTriangulation, p, path,
                   fam: PathFamily) -> bool:
    """Independent membership check: endpoints, consecutive adjacency, and
    for winding families the geometric winding number from the packing."""
    adj = {u: set(tri.map.neighbors_ccw(u)) for u in tri.map.vertices}
    for a, b in zip(path, path[1:]):
        if b not in adj[a]:
            return False
    if isinstance(fam, Boundary):
        return (path[0] == fam.vertex
                and path[-1] in set(tri.map.outer_face_vertices()))
    if fam.root in set(path):
        return False
    if path[0] != fam.vertex or path[-1] != fam.vertex:
        return False
    return geometric_winding(p, fam.root, path) == 1


# -- exports ------------------------------------------------------------------

def family_label(fam: PathFamily) -> str:
    return "boundary" if isinstance(fam, Boundary) else "winding"


def metric_csv(metric: dict[int, float]) -> str:
    lines = ["vertex,m"]
    for v in sorted(metric):
        lines.append(f"{v},{metric[v]!r}")
    return "\n".join(lines) + "\n"
