"""Maximal circle packings of triangulations with boundary in the unit disk.

The radius problem is solved in the hyperbolic metric of the disk, where the
maximal packing is the one whose boundary circles are horocycles.  Radii are
parametrized as s = exp(-hyperbolic radius), so s = 0 encodes a boundary
horocycle exactly and the interior angle-sum equations stay bounded.  Each
sweep relaxes every interior vertex toward angle sum 2*pi with the classical
uniform-neighbor closed form, with an extrapolated super-step when the
contraction rate stabilizes.  Centers are then laid out by breadth-first fan
placement around interior vertices, and a final Gauss-Newton pass polishes
the Euclidean tangency residuals to near machine precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import lsqr

from velpack.planar import RootedTriangulation, validate_triangulation


TWO_PI = 2.0 * math.pi


class PackingError(RuntimeError):
    pass


class PackingConvergenceError(PackingError):
    """Radius iteration hit the sweep cap; carries the best residual seen."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class Packing:
    """Circle per vertex, in disk units.  `tol` is the achieved residual:
    the max over edge-tangency, boundary-tangency and disk-containment
    defects."""
    centers: dict[int, complex]
    radii: dict[int, float]
    tol: float
    boundary: tuple[int, ...]
    root: int | None = None

    @property
    def vertices(self) -> list[int]:
        return sorted(self.centers)


# -- Mobius helpers -----------------------------------------------------------

def disk_mobius(a: complex, z: complex) -> complex:
    """z -> (z - a) / (1 - conj(a) z), an automorphism of the disk."""
    return (z - a) / (1.0 - a.conjugate() * z)


def disk_mobius_inv(a: complex, w: complex) -> complex:
    return (w + a) / (1.0 + a.conjugate() * w)


def mobius_circle_image(center: complex, radius: float, a: complex,
                        rotation: float = 0.0) -> tuple[complex, float]:
    """Image of a circle under z -> e^{i rotation} (z - a)/(1 - conj(a) z).

    Uses the inverse point of the map's pole with respect to the circle,
    whose image is the image circle's center.
    """
    rot = cmath.exp(1j * rotation)
    if abs(a) < 1e-300:
        return rot * center, radius
    pole = 1.0 / a.conjugate()
    q = center + radius * radius / (pole - center).conjugate()
    c_img = disk_mobius(a, q)
    u = (pole - center) / abs(pole - center)
    z0 = center + radius * u
    r_img = abs(disk_mobius(a, z0) - c_img)
    return rot * c_img, r_img


# -- radius iteration ---------------------------------------------------------

def _corner_arrays(tri: RootedTriangulation):
    """Interior fan corners (v, u, w) with u, w rotation-consecutive."""
    m = tri.map
    boundary = set(m.outer_face_vertices())
    verts = list(m.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    interior = [v for v in verts if v not in boundary]
    cv, cu, cw = [], [], []
    for v in interior:
        nbrs = m.neighbors_ccw(v)
        d = len(nbrs)
        for i in range(d):
            cv.append(idx[v])
            cu.append(idx[nbrs[i]])
            cw.append(idx[nbrs[(i + 1) % d]])
    return (verts, idx, [idx[v] for v in interior],
            np.array(cv, dtype=np.intp), np.array(cu, dtype=np.intp),
            np.array(cw, dtype=np.intp))


def _angle_sums(s, cv, cu, cw, n):
    sv, su, sw = s[cv], s[cu], s[cw]
    num = sv * sv * (1.0 - su * su) * (1.0 - sw * sw)
    den = (1.0 - (sv * su) ** 2) * (1.0 - (sv * sw) ** 2)
    half = np.arcsin(np.sqrt(np.clip(num / den, 0.0, 1.0)))
    theta = np.zeros(n)
    np.add.at(theta, cv, 2.0 * half)
    return theta


def _sweep(s, theta, interior_idx, deg):
    """Uniform-neighbor update of the interior s-values toward angle sum
    2*pi.  For the current angle sum, solve for the uniform neighbor value
    that would reproduce it, then for the vertex radius that would make it
    exactly 2*pi against that neighbor."""
    si = s[interior_idx]
    beta = np.sin(theta[interior_idx] / (2.0 * deg))
    sigma2 = np.clip((si - beta) / (si * (1.0 - beta * si)), 0.0, 1.0)
    delta = np.sin(math.pi / deg)
    b = 1.0 - sigma2
    disc = np.sqrt(b * b + 4.0 * delta * delta * sigma2)
    with np.errstate(divide="ignore", invalid="ignore"):
        s_new = np.where(sigma2 > 1e-14,
                         (-b + disc) / (2.0 * delta * sigma2),
                         delta)
    return np.clip(s_new, 1e-15, 1.0 - 1e-15)


def _solve_radii(tri: RootedTriangulation, tol: float, max_iters: int,
                 warm: np.ndarray | None = None):
    verts, idx, interior_idx, cv, cu, cw = _corner_arrays(tri)
    n = len(verts)
    s = np.zeros(n)
    if not interior_idx:
        return verts, idx, s
    interior_idx = np.array(interior_idx, dtype=np.intp)
    s[interior_idx] = 0.5 if warm is None else warm[interior_idx]
    deg = np.zeros(n)
    np.add.at(deg, cv, 1.0)
    deg = deg[interior_idx]

    def residual(svec):
        th = _angle_sums(svec, cv, cu, cw, n)
        return float(np.max(np.abs(th[interior_idx] - TWO_PI))), th

    best = math.inf
    prev_norm = None
    lam_prev = None
    it = 0
    while it < max_iters:
        resid, theta = residual(s)
        best = min(best, resid)
        if resid < tol:
            return verts, idx, s
        s_next = s.copy()
        s_next[interior_idx] = _sweep(s, theta, interior_idx, deg)
        ds = s_next - s
        norm = float(np.linalg.norm(ds))
        lam = norm / prev_norm if prev_norm else None
        if (lam is not None and lam_prev is not None and 0.5 < lam < 0.999
                and abs(lam - lam_prev) < 0.02 and it % 5 == 4):
            s_try = np.clip(s_next + ds * (lam / (1.0 - lam)),
                            0.0, 1.0 - 1e-15)
            s_try[~np.isin(np.arange(n), interior_idx)] = 0.0
            r_try, _ = residual(s_try)
            r_next, _ = residual(s_next)
            if r_try < r_next:
                s = s_try
                prev_norm = None
                lam_prev = None
                it += 1
                continue
        s = s_next
        prev_norm = norm
        lam_prev = lam
        it += 1
    raise PackingConvergenceError(
        f"radius iteration did not reach {tol} in {max_iters} sweeps "
        f"(best residual {best:.3e})", best)


# -- layout -------------------------------------------------------------------

def _s_to_euclidean(zeta: complex, s: float) -> tuple[complex, float]:
    rho0 = (1.0 - s) / (1.0 + s)
    d2 = abs(zeta) ** 2
    den = 1.0 - d2 * rho0 * rho0
    return zeta * (1.0 - rho0 * rho0) / den, rho0 * (1.0 - d2) / den


def _horocycle_radius(xi: complex, c: complex, r: float) -> float:
    """Euclidean radius of the horocycle tangent to the unit circle at xi and
    externally tangent to the circle (c, r)."""
    w = (xi.conjugate() * c).real
    return (1.0 - 2.0 * w + abs(c) ** 2 - r * r) / (2.0 * (1.0 - w + r))


def _corner_angle(sv: float, su: float, sw: float) -> float:
    num = sv * sv * (1.0 - su * su) * (1.0 - sw * sw)
    den = (1.0 - (sv * su) ** 2) * (1.0 - (sv * sw) ** 2)
    return 2.0 * math.asin(min(1.0, max(0.0, math.sqrt(num / den))))


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def _horocycle_from_two(cu: complex, ru: float, cw: complex, rw: float):
    """Candidate horocycles tangent to two placed circles.

    Writing the horocycle as center (1-rho)*xi, |xi| = 1, tangency to a
    circle (c, r) is linear in xi for fixed rho:  xi . c = (1+r) - b/t with
    t = 1 - rho and b = ((1+r)^2 - |c|^2)/2.  Solving the 2x2 system gives
    xi affine in 1/t; |xi| = 1 is then a quadratic in 1/t.
    Returns a list of (center, rho, xi).
    """
    a1, b1 = 1.0 + ru, ((1.0 + ru) ** 2 - abs(cu) ** 2) / 2.0
    a2, b2 = 1.0 + rw, ((1.0 + rw) ** 2 - abs(cw) ** 2) / 2.0
    M = np.array([[cu.real, cu.imag], [cw.real, cw.imag]])
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        return []
    P = Minv @ np.array([a1, a2])
    Q = Minv @ np.array([-b1, -b2])
    qq = float(Q @ Q)
    pq = float(P @ Q)
    pp = float(P @ P)
    disc = pq * pq - qq * (pp - 1.0)
    if qq < 1e-30 or disc < 0:
        return []
    cands = []
    for sign in (1.0, -1.0):
        inv_t = (-pq + sign * math.sqrt(disc)) / qq
        if inv_t <= 0:
            continue
        rho = 1.0 - 1.0 / inv_t
        if not 0.0 < rho < 1.0:
            continue
        xi = complex(*(P + Q * inv_t))
        xi /= abs(xi)
        cands.append(((1.0 - rho) * xi, rho, xi))
    return cands


def _apollonius(circles):
    """Circles externally tangent to three placed circles (classical
    Apollonius, external case).  Returns a list of (center, radius)."""
    (c1, r1), (c2, r2), (c3, r3) = circles
    rows, rhs = [], []
    for (ca, ra), (cb, rb) in (((c1, r1), (c2, r2)), ((c1, r1), (c3, r3))):
        rows.append([2.0 * (cb.real - ca.real), 2.0 * (cb.imag - ca.imag)])
        rhs.append(((abs(cb) ** 2 - rb * rb) - (abs(ca) ** 2 - ra * ra),
                    2.0 * (rb - ra)))
    A2 = np.array(rows)
    try:
        base = np.linalg.solve(A2, np.array([rhs[0][0], rhs[1][0]]))
        slope = np.linalg.solve(A2, np.array([-rhs[0][1], -rhs[1][1]]))
    except np.linalg.LinAlgError:
        return []
    dx0 = base[0] - c1.real
    dy0 = base[1] - c1.imag
    aq = slope[0] ** 2 + slope[1] ** 2 - 1.0
    bq = 2.0 * (dx0 * slope[0] + dy0 * slope[1]) - 2.0 * r1
    cq = dx0 * dx0 + dy0 * dy0 - r1 * r1
    roots = []
    if abs(aq) < 1e-14:
        if abs(bq) > 1e-14:
            roots.append(-cq / bq)
    else:
        disc = bq * bq - 4.0 * aq * cq
        if disc >= 0:
            roots.extend([(-bq + math.sqrt(disc)) / (2.0 * aq),
                          (-bq - math.sqrt(disc)) / (2.0 * aq)])
    out = []
    for r in roots:
        if 0 < r <= 2.0:
            c = complex(base[0] + slope[0] * r, base[1] + slope[1] * r)
            out.append((c, r))
    return out


def _layout(tri: RootedTriangulation, verts, idx, s):
    m = tri.map
    boundary = set(m.outer_face_vertices())
    interior = [v for v in verts if v not in boundary]
    sval = {v: float(s[idx[v]]) for v in verts}
    zeta: dict[int, complex] = {}
    cen: dict[int, complex] = {}
    rad: dict[int, float] = {}

    def euclidize(v, support):
        if v in boundary:
            xi = zeta[v] / abs(zeta[v])
            zeta[v] = xi
            rho = _horocycle_radius(xi, cen[support], rad[support])
            cen[v] = (1.0 - rho) * xi
            rad[v] = rho
        else:
            cen[v], rad[v] = _s_to_euclidean(zeta[v], sval[v])

    def fan(p):
        """Place all neighbors of interior vertex p."""
        nbrs = m.neighbors_ccw(p)
        ref_i = next((i for i, u in enumerate(nbrs) if u in zeta), None)
        if ref_i is None:
            return []
        zp = zeta[p]
        phi = cmath.phase(disk_mobius(zp, zeta[nbrs[ref_i]]))
        newly = []
        d = len(nbrs)
        for k in range(d):
            u = nbrs[(ref_i + k) % d]
            if u not in zeta:
                sp, su = sval[p], sval[u]
                e = (1.0 - sp * su) / (1.0 + sp * su)
                zeta[u] = disk_mobius_inv(zp, e * cmath.exp(1j * phi))
                euclidize(u, p)
                newly.append(u)
            w = nbrs[(ref_i + k + 1) % d]
            phi += _corner_angle(sval[p], sval[u], sval[w])
        return newly

    if interior:
        v0 = tri.root if tri.root in interior else interior[0]
        zeta[v0] = 0j
        cen[v0], rad[v0] = _s_to_euclidean(0j, sval[v0])
        u0 = m.neighbors_ccw(v0)[0]
        e = (1.0 - sval[v0] * sval[u0]) / (1.0 + sval[v0] * sval[u0])
        zeta[u0] = complex(e, 0.0)
        euclidize(u0, v0)
        queue = [v0]
        seen_pivot = {v0}
        while queue:
            p = queue.pop(0)
            for u in fan(p):
                pass
            for u in m.neighbors_ccw(p):
                if u in zeta and u not in seen_pivot and u not in boundary:
                    seen_pivot.add(u)
                    queue.append(u)
    else:
        fi = min(m.inner_faces(), key=lambda f: m.face_vertices(f))
        a, b, c = m.face_vertices(fi)[:3]
        r0 = 2.0 * math.sqrt(3.0) - 3.0
        for v, ang in ((a, 0.5 * math.pi), (b, 7.0 * math.pi / 6.0),
                       (c, 11.0 * math.pi / 6.0)):
            xi = cmath.exp(1j * ang)
            zeta[v] = xi
            cen[v] = (1.0 - r0) * xi
            rad[v] = r0

    # fallback passes for circles not reachable by interior fans (ears and
    # pockets whose neighbors are all boundary vertices)
    outer_fi = m.outer_face_index
    for _ in range(len(verts) + 1):
        if len(zeta) == len(verts):
            break
        progress = False
        for v in verts:
            if v in zeta:
                continue
            hs = m.half_edges_at(v)
            nbrs = [m.head(h) for h in hs]
            d = len(nbrs)
            if v in boundary:
                for i in range(d):
                    u, w = nbrs[i], nbrs[(i + 1) % d]
                    if (u not in cen or w not in cen
                            or m.face_of(hs[i]) == outer_fi):
                        continue
                    pick = None
                    for cb, rho, xi in _horocycle_from_two(
                            cen[u], rad[u], cen[w], rad[w]):
                        if _cross(cen[u] - cb, cen[w] - cb) > 0:
                            pick = (cb, rho, xi)
                            break
                    if pick is None:
                        continue
                    cen[v], rad[v], zeta[v] = pick[0], pick[1], pick[2]
                    progress = True
                    break
            else:
                for i in range(d):
                    trip = [nbrs[i], nbrs[(i + 1) % d], nbrs[(i + 2) % d]]
                    if any(u not in cen for u in trip):
                        continue
                    pick = None
                    for c, r in _apollonius([(cen[u], rad[u]) for u in trip]):
                        if _cross(cen[trip[0]] - c, cen[trip[1]] - c) > 0:
                            pick = (c, r)
                            break
                    if pick is None:
                        continue
                    c, r = pick
                    cen[v], rad[v] = c, r
                    dd = abs(c)
                    hi = math.atanh(min(dd + r, 1.0 - 1e-15))
                    lo = math.atanh(max(dd - r, -(1.0 - 1e-15)))
                    mid = math.tanh(0.5 * (hi + lo))
                    zeta[v] = mid * (c / dd) if dd > 1e-300 else 0j
                    progress = True
                    break
        if not progress:
            break
    if len(cen) != len(verts):
        missing = [v for v in verts if v not in cen]
        raise PackingError(f"layout could not place {len(missing)} circles "
                           f"(first: {missing[:5]})")
    return cen, rad


# -- polish and residuals -----------------------------------------------------

def _polish(edges, boundary_pos, cen, rad, rounds=6, target=5e-14):
    """Gauss-Newton on the tangency and boundary conditions via sparse
    least squares."""
    verts = sorted(cen)
    vi = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    x = np.array([cen[v].real for v in verts])
    y = np.array([cen[v].imag for v in verts])
    r = np.array([rad[v] for v in verts])
    eu = np.array([vi[a] for a, b in edges], dtype=np.intp)
    ev = np.array([vi[b] for a, b in edges], dtype=np.intp)
    bidx = np.array([vi[b] for b in boundary_pos], dtype=np.intp)

    ne = len(eu)
    nb = len(bidx)

    def fvec(xx, yy, rr):
        dx = xx[eu] - xx[ev]
        dy = yy[eu] - yy[ev]
        dist = np.hypot(dx, dy)
        f_edge = dist - rr[eu] - rr[ev]
        db = np.hypot(xx[bidx], yy[bidx])
        f_b = db + rr[bidx] - 1.0
        return np.concatenate([f_edge, f_b]), dx, dy, dist, db

    for _ in range(rounds):
        f, dx, dy, dist, db = fvec(x, y, r)
        worst = float(np.max(np.abs(f), initial=0.0))
        if worst < target:
            break
        inv = 1.0 / np.maximum(dist, 1e-300)
        gx = dx * inv
        gy = dy * inv
        erange = np.arange(ne)
        rows = np.concatenate([np.repeat(erange, 6),
                               np.repeat(ne + np.arange(nb), 3)])
        cols = np.concatenate([
            np.stack([eu, ev, n + eu, n + ev, 2 * n + eu, 2 * n + ev],
                     axis=1).ravel(),
            np.stack([bidx, n + bidx, 2 * n + bidx], axis=1).ravel()])
        invb = 1.0 / np.maximum(db, 1e-300)
        vals = np.concatenate([
            np.stack([gx, -gx, gy, -gy, -np.ones(ne), -np.ones(ne)],
                     axis=1).ravel(),
            np.stack([x[bidx] * invb, y[bidx] * invb, np.ones(nb)],
                     axis=1).ravel()])
        J = coo_matrix((vals, (rows, cols)), shape=(ne + nb, 3 * n)).tocsr()
        step = lsqr(J, -f, atol=1e-15, btol=1e-15, iter_lim=20 * n)[0]
        base = float(f @ f)
        scale = 1.0
        for _ in range(30):
            xn = x + scale * step[:n]
            yn = y + scale * step[n:2 * n]
            rn = r + scale * step[2 * n:]
            if np.all(rn > 0):
                fn = fvec(xn, yn, rn)[0]
                if float(fn @ fn) < base:
                    x, y, r = xn, yn, rn
                    break
            scale *= 0.5
        else:
            break
    return ({v: complex(x[i], y[i]) for v, i in vi.items()},
            {v: float(r[i]) for v, i in vi.items()})


@dataclass(frozen=True)
class ResidualReport:
    edge_tangency: float
    boundary_tangency: float
    containment: float
    overlap: float

    @property
    def worst(self) -> float:
        return max(self.edge_tangency, self.boundary_tangency,
                   self.containment, self.overlap)


def packing_residuals(tri: RootedTriangulation, p: Packing,
                      check_overlap: bool = False) -> ResidualReport:
    cen, rad = p.centers, p.radii
    e_res = 0.0
    for u, v in tri.map.edges():
        e_res = max(e_res, abs(abs(cen[u] - cen[v]) - (rad[u] + rad[v])))
    b_res = 0.0
    for b in p.boundary:
        b_res = max(b_res, abs(abs(cen[b]) + rad[b] - 1.0))
    c_res = 0.0
    for v in cen:
        c_res = max(c_res, abs(cen[v]) + rad[v] - 1.0)
    o_res = 0.0
    if check_overlap:
        o_res = _max_overlap(tri, p)
    return ResidualReport(e_res, b_res, max(0.0, c_res), o_res)


def _max_overlap(tri: RootedTriangulation, p: Packing) -> float:
    """Largest interpenetration r_u + r_v - dist over NON-adjacent pairs,
    found with a uniform spatial grid."""
    verts = sorted(p.centers)
    if not verts:
        return 0.0
    rmax = max(p.radii.values())
    cell = max(2.0 * rmax, 1e-9)
    grid: dict[tuple[int, int], list[int]] = {}
    for v in verts:
        c = p.centers[v]
        key = (int(math.floor(c.real / cell)), int(math.floor(c.imag / cell)))
        grid.setdefault(key, []).append(v)
    adj = {v: set(tri.map.neighbors_ccw(v)) for v in verts}
    worst = 0.0
    for (gx, gy), vs in grid.items():
        block = []
        for ddx in (-1, 0, 1):
            for ddy in (-1, 0, 1):
                block.extend(grid.get((gx + ddx, gy + ddy), ()))
        for v in vs:
            for w in block:
                if w <= v or w in adj[v]:
                    continue
                pen = p.radii[v] + p.radii[w] - abs(p.centers[v]
                                                    - p.centers[w])
                worst = max(worst, pen)
    return worst


# -- public operations --------------------------------------------------------

_TRI_RULES_IGNORED = {"root-on-outer-face", "root-missing"}


def pack_in_disk(tri: RootedTriangulation, tol: float = 1e-9,
                 max_iters: int = 200_000) -> Packing:
    """Maximal circle packing in the closed unit disk.

    Boundary circles come out internally tangent to the unit circle; the
    achieved residual is recorded on the result.  The root is not centered
    here; apply normalize_root for the rooted normalization.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rep = validate_triangulation(tri.map, tri.root)
    hard = [v for v in rep.violations if v[0] not in _TRI_RULES_IGNORED]
    if hard:
        raise PackingError(f"not a triangulation with boundary: {hard}")
    # Angle-sum convergence does not by itself certify the layout: radius
    # errors compound along the placement tree on deep meshes.  Escalate the
    # angle tolerance (warm-started) until the measured layout residual is
    # acceptable.
    angle_tol = tol
    warm = None
    best: Packing | None = None
    for _ in range(3):
        verts, idx, s = _solve_radii(tri, angle_tol, max_iters, warm=warm)
        cen, rad = _layout(tri, verts, idx, s)
        cen, rad = _polish(tri.map.edges(), tri.map.outer_face_vertices(),
                           cen, rad)
        p = Packing(cen, rad, 0.0, tri.map.outer_face_vertices(), tri.root)
        achieved = packing_residuals(tri, p).worst
        p = replace(p, tol=max(achieved, 5e-16))
        if best is None or p.tol < best.tol:
            best = p
        if best.tol <= max(tol, 1e-12):
            return best
        warm = s
        angle_tol = max(angle_tol * 1e-3, 1e-15)
    return best


def normalize_root(p: Packing, root: int) -> Packing:
    """Disk automorphism taking the root circle to one centered at the
    origin, with rotation fixed by placing the lowest-id boundary circle's
    center on the positive real axis."""
    if root not in p.centers:
        raise PackingError(f"root {root} not in packing")
    if root in set(p.boundary):
        raise PackingError("root lies on the boundary; cannot center it")
    c = p.centers[root]
    r = p.radii[root]
    d = abs(c)
    if d < 1e-300:
        a = 0j
    else:
        hi = math.atanh(min(d + r, 1.0 - 1e-15))
        lo = math.atanh(d - r)
        a = math.tanh(0.5 * (hi + lo)) * (c / d)
    moved_c: dict[int, complex] = {}
    moved_r: dict[int, float] = {}
    for v in p.centers:
        moved_c[v], moved_r[v] = mobius_circle_image(p.centers[v],
                                                     p.radii[v], a)
    anchor = min(p.boundary)
    rot = -cmath.phase(moved_c[anchor])
    w = cmath.exp(1j * rot)
    for v in moved_c:
        moved_c[v] = w * moved_c[v]
    moved_c[root] = 0j
    return Packing(moved_c, moved_r, p.tol, p.boundary, root)


# -- serialization ------------------------------------------------------------

def write_packing_csv(p: Packing, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(packing_csv(p))


def packing_csv(p: Packing) -> str:
    lines = ["vertex,cx,cy,r"]
    for v in sorted(p.centers):
        c = p.centers[v]
        lines.append(f"{v},{c.real!r},{c.imag!r},{p.radii[v]!r}")
    return "\n".join(lines) + "\n"


def read_packing_csv(path: str,
                     tri: RootedTriangulation | None = None) -> Packing:
    centers: dict[int, complex] = {}
    radii: dict[int, float] = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "vertex,cx,cy,r":
            raise PackingError(f"bad packing csv header: {header}")
        for line in fh:
            if not line.strip():
                continue
            v, cx, cy, r = line.strip().split(",")
            centers[int(v)] = complex(float(cx), float(cy))
            radii[int(v)] = float(r)
    boundary = tri.map.outer_face_vertices() if tri else ()
    root = tri.root if tri else None
    return Packing(centers, radii, float("nan"), boundary, root)


def render_svg(p: Packing, path: str) -> None:
    """Unit circle plus one circle per vertex; the root circle is filled."""
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.05 -1.05 2.1 2.1" '
        'width="640" height="640">',
        '<circle cx="0" cy="0" r="1" fill="none" stroke="black" '
        'stroke-width="0.004"/>',
    ]
    for v in sorted(p.centers):
        c = p.centers[v]
        is_root = v == p.root
        fill = "#c33" if is_root else "none"
        lines.append(
            f'<circle cx="{c.real:.12g}" cy="{-c.imag:.12g}" '
            f'r="{p.radii[v]:.12g}" fill="{fill}" stroke="#369" '
            'stroke-width="0.002"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
