"""Combinatorial planar maps as half-edge rotation systems.

A map is stored as arrays over half-edge ids 0..2m-1.  The twin of half-edge
h is h ^ 1, `origin[h]` is the vertex h leaves from, and `nxt[h]` is the next
half-edge counterclockwise around origin[h].  Faces are the orbits of
h -> prev[twin(h)] (prev is the inverse rotation); the face of a half-edge
lies to its left, and one face is designated as the outer (unbounded) one.
The wedge between rotation-consecutive half-edges (h, nxt[h]) at a vertex
belongs to the face of h.

Everything here is purely combinatorial: "inside" and "enclosed" are decided
from the rotation system via the face structure, never from coordinates.
Maps are immutable after construction and all operations return new maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class MapError(ValueError):
    """Base class for planar map errors."""


class MapStructureError(MapError):
    """Rotation system is malformed (bad twin pairing, broken rotation cycle,
    disconnected map, ...)."""


class SeedBlockError(MapError):
    """Seed vertices do not lie in a common block."""


class MultiplicityError(MapError):
    """More than two parallel edges between a vertex pair."""


class SubmapMismatchError(MapError):
    """Claimed submap is not a submap of the host."""


class PlanarMap:
    """Immutable connected planar map with a designated outer face.

    Parameters
    ----------
    origin : sequence of vertex ids, one per half-edge (length 2m).
    nxt : sequence of half-edge ids; nxt[h] is the half-edge following h
        counterclockwise around origin[h].
    outer_edge : a half-edge whose left face is the outer face.
    edge_labels : optional stable labels, one per edge (length m).  Labels
        survive submap operations, which lets callers track edge identity
        through the simplification pipeline.
    """

    __slots__ = ("origin", "nxt", "outer_edge", "edge_labels",
                 "_vertices", "_rot", "_faces", "_face_of", "_outer_face")

    def __init__(self, origin: Sequence[int], nxt: Sequence[int],
                 outer_edge: int, edge_labels: Sequence[int] | None = None):
        origin = tuple(origin)
        nxt = tuple(nxt)
        n_half = len(origin)
        if n_half % 2 != 0 or len(nxt) != n_half:
            raise MapStructureError("origin/nxt must have equal even length")
        if n_half == 0:
            raise MapStructureError("map must have at least one edge")
        if sorted(nxt) != list(range(n_half)):
            raise MapStructureError("nxt is not a permutation of half-edges")
        for h in range(n_half):
            if origin[nxt[h]] != origin[h]:
                raise MapStructureError(f"nxt[{h}] changes origin vertex")
        self.origin = origin
        self.nxt = nxt
        if edge_labels is None:
            edge_labels = tuple(range(n_half // 2))
        else:
            edge_labels = tuple(edge_labels)
            if len(edge_labels) != n_half // 2:
                raise MapStructureError("need one label per edge")
            if len(set(edge_labels)) != len(edge_labels):
                raise MapStructureError("edge labels must be distinct")
        self.edge_labels = edge_labels

        # rotation cycles: each vertex's half-edges must form a single orbit
        rot: dict[int, tuple[int, ...]] = {}
        seen = [False] * n_half
        at_vertex: dict[int, int] = {}
        for h in range(n_half):
            at_vertex[origin[h]] = at_vertex.get(origin[h], 0) + 1
        for h in range(n_half):
            if seen[h]:
                continue
            v = origin[h]
            cycle = []
            g = h
            while not seen[g]:
                seen[g] = True
                cycle.append(g)
                g = nxt[g]
            if g != h or len(cycle) != at_vertex[v]:
                raise MapStructureError(
                    f"rotation at vertex {v} is not a single cycle")
            start = cycle.index(min(cycle))
            rot[v] = tuple(cycle[start:] + cycle[:start])
        self._rot = rot
        self._vertices = tuple(sorted(rot))

        # face orbits of h -> prev[h ^ 1]
        prev = [0] * n_half
        for h in range(n_half):
            prev[nxt[h]] = h
        face_of = [-1] * n_half
        faces = []
        for h in range(n_half):
            if face_of[h] >= 0:
                continue
            walk = []
            g = h
            while face_of[g] < 0:
                face_of[g] = len(faces)
                walk.append(g)
                g = prev[g ^ 1]
            if g != h:
                raise MapStructureError("face walk does not close")
            faces.append(tuple(walk))
        self._faces = tuple(faces)
        self._face_of = tuple(face_of)
        if not 0 <= outer_edge < n_half:
            raise MapStructureError("outer_edge out of range")
        self.outer_edge = outer_edge
        self._outer_face = face_of[outer_edge]

        if not self._is_connected():
            raise MapStructureError("map is not connected")

    # -- basic accessors ---------------------------------------------------

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def n_vertices(self) -> int:
        return len(self._vertices)

    @property
    def n_edges(self) -> int:
        return len(self.origin) // 2

    @property
    def n_half_edges(self) -> int:
        return len(self.origin)

    def head(self, h: int) -> int:
        return self.origin[h ^ 1]

    def half_edges_at(self, v: int) -> tuple[int, ...]:
        return self._rot[v]

    def degree(self, v: int) -> int:
        return len(self._rot[v])

    def neighbors_ccw(self, v: int) -> tuple[int, ...]:
        return tuple(self.head(h) for h in self._rot[v])

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        return self.origin[2 * e], self.origin[2 * e + 1]

    def edges(self) -> list[tuple[int, int]]:
        """Edge list as (u, v) pairs, one per edge, in edge-index order."""
        return [self.edge_endpoints(e) for e in range(self.n_edges)]

    @property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        return self._faces

    def face_of(self, h: int) -> int:
        return self._face_of[h]

    @property
    def outer_face_index(self) -> int:
        return self._outer_face

    def face_vertices(self, fi: int) -> tuple[int, ...]:
        return tuple(self.origin[h] for h in self._faces[fi])

    def outer_face_vertices(self) -> tuple[int, ...]:
        return self.face_vertices(self._outer_face)

    def inner_faces(self) -> list[int]:
        return [i for i in range(len(self._faces)) if i != self._outer_face]

    def faces_at(self, v: int) -> set[int]:
        return {self._face_of[h] for h in self._rot[v]}

    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Neighbor sets for graph algorithms (parallel edges collapsed)."""
        return {v: tuple(dict.fromkeys(self.neighbors_ccw(v)))
                for v in self._vertices}

    def _is_connected(self) -> bool:
        start = self._vertices[0]
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for h in self._rot[v]:
                w = self.head(h)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._vertices)

    # -- structure predicates ----------------------------------------------

    def loops(self) -> list[int]:
        return [e for e in range(self.n_edges)
                if self.origin[2 * e] == self.origin[2 * e + 1]]

    def parallel_groups(self) -> dict[tuple[int, int], list[int]]:
        """Vertex pairs with more than one edge, mapped to their edge ids."""
        groups: dict[tuple[int, int], list[int]] = {}
        for e in range(self.n_edges):
            u, w = self.edge_endpoints(e)
            key = (u, w) if u <= w else (w, u)
            groups.setdefault(key, []).append(e)
        return {k: v for k, v in groups.items() if len(v) > 1}

    def is_simple(self) -> bool:
        return not self.loops() and not self.parallel_groups()

    # -- comparisons and construction ----------------------------------------

    def canonical(self):
        """Hashable form: per-vertex ccw neighbor cycles (rotation-normalized)
        plus the outer face cycle.  Two maps on the same vertex ids are equal
        as embedded maps iff their canonical forms agree."""
        rots = {}
        for v in self._vertices:
            seq = self.neighbors_ccw(v)
            rots[v] = _min_rotation(seq)
        return (tuple(sorted(rots.items())),
                _min_rotation(self.outer_face_vertices()))

    def same_map(self, other: "PlanarMap") -> bool:
        return self.canonical() == other.canonical()

    @staticmethod
    def from_rotations(rotations: Mapping[int, Sequence[int]],
                       outer: Sequence[int]) -> "PlanarMap":
        """Build a simple map from ccw neighbor lists and an outer cycle.

        The outer cycle may be given in either orientation; it must match the
        vertex walk of exactly one face.  Parallel edges and loops are
        rejected (multigraphs are built by lower-level code that controls
        half-edge ids directly).
        """
        pairs = set()
        for v, nbrs in rotations.items():
            if len(set(nbrs)) != len(nbrs):
                raise MapStructureError(f"repeated neighbor at vertex {v}")
            for w in nbrs:
                if w == v:
                    raise MapStructureError(f"loop at vertex {v}")
                if w not in rotations:
                    raise MapStructureError(f"neighbor {w} has no rotation")
                if v not in rotations[w]:
                    raise MapStructureError(f"edge {v}-{w} not symmetric")
                pairs.add((v, w) if v < w else (w, v))
        edges = sorted(pairs)
        he_id = {}
        for k, (u, w) in enumerate(edges):
            he_id[(u, w)] = 2 * k
            he_id[(w, u)] = 2 * k + 1
        origin = []
        for k, (u, w) in enumerate(edges):
            origin.extend((u, w))
        nxt = [0] * (2 * len(edges))
        for v in rotations:
            hs = [he_id[(v, w)] for w in rotations[v]]
            for i, h in enumerate(hs):
                nxt[h] = hs[(i + 1) % len(hs)]
        probe = PlanarMap(origin, nxt, outer_edge=0)
        outer_idx = _match_outer_face(probe, outer)
        return PlanarMap(origin, nxt, outer_edge=probe._faces[outer_idx][0])


def _min_rotation(seq: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically smallest rotation of a cyclic sequence."""
    seq = tuple(seq)
    if not seq:
        return seq
    best = seq
    for i in range(1, len(seq)):
        cand = seq[i:] + seq[:i]
        if cand < best:
            best = cand
    return best


def _match_outer_face(m: PlanarMap, outer: Sequence[int]) -> int:
    want = _min_rotation(tuple(outer))
    want_rev = _min_rotation(tuple(reversed(tuple(outer))))
    hits = []
    for fi in range(len(m.faces)):
        key = _min_rotation(m.face_vertices(fi))
        if key == want or key == want_rev:
            hits.append(fi)
    if not hits:
        raise MapStructureError("no face matches the given outer cycle")
    if len(hits) > 1:
        exact = [fi for fi in hits
                 if _min_rotation(m.face_vertices(fi)) == want]
        if len(exact) == 1:
            return exact[0]
        raise MapStructureError("outer cycle is ambiguous")
    return hits[0]


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[str, object], ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {rule for rule, _ in self.violations}


@dataclass(frozen=True)
class RootedTriangulation:
    """A triangulation with boundary plus a distinguished interior root."""
    map: PlanarMap
    root: int

    @property
    def boundary(self) -> tuple[int, ...]:
        return self.map.outer_face_vertices()

    def interior_vertices(self) -> list[int]:
        b = set(self.boundary)
        return [v for v in self.map.vertices if v not in b]


def validate_triangulation(m: PlanarMap, root: int) -> ValidationReport:
    """Check the rooted-triangulation-with-boundary invariants.

    Violations are data, not exceptions: each is (rule id, witness).
    Structural problems with the rotation system itself raise
    MapStructureError at map construction instead.
    """
    violations: list[tuple[str, object]] = []
    for e in m.loops():
        violations.append(("simple:loop", m.edge_labels[e]))
    for pair, es in m.parallel_groups().items():
        violations.append(("simple:parallel-edges",
                           (pair, tuple(m.edge_labels[e] for e in es))))
    for fi in m.inner_faces():
        if len(m.faces[fi]) != 3:
            violations.append(("inner-face-not-triangle", m.face_vertices(fi)))
    outer = m.outer_face_vertices()
    if len(set(outer)) != len(outer):
        seen = set()
        witness = next(v for v in outer if v in seen or seen.add(v))
        violations.append(("outer-face-not-simple-cycle", witness))
    if root not in m._rot:
        violations.append(("root-missing", root))
    elif root in set(outer):
        violations.append(("root-on-outer-face", root))
    return ValidationReport(tuple(violations))


# -- submap machinery --------------------------------------------------------

def _restrict(host: PlanarMap, keep_edges: Iterable[int]) -> PlanarMap:
    """Submap on a subset of host edges, with the outer face inherited.

    Deleting an edge merges the two faces on its sides; the outer face of the
    result is the face covering the region that absorbed the host's outer
    face.  The result must be connected.
    """
    keep = sorted(set(keep_edges))
    if not keep:
        raise MapError("restriction would delete every edge")
    keep_set = set(keep)

    parent = list(range(len(host.faces)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in range(host.n_edges):
        if e not in keep_set:
            a, b = find(host.face_of(2 * e)), find(host.face_of(2 * e + 1))
            if a != b:
                parent[a] = b
    outer_region = find(host.outer_face_index)

    old_of_new: list[int] = []
    new_of_old: dict[int, int] = {}
    for k, e in enumerate(keep):
        new_of_old[2 * e] = 2 * k
        new_of_old[2 * e + 1] = 2 * k + 1
        old_of_new.extend((2 * e, 2 * e + 1))

    origin = [host.origin[h] for h in old_of_new]
    nxt = [0] * len(old_of_new)
    for h_old, h_new in new_of_old.items():
        g = host.nxt[h_old]
        while (g >> 1) not in keep_set:
            g = host.nxt[g]
        nxt[h_new] = new_of_old[g]
    labels = [host.edge_labels[e] for e in keep]

    sub = PlanarMap(origin, nxt, outer_edge=0, edge_labels=labels)
    outer_candidates = set()
    for fi in range(len(sub.faces)):
        h_new = sub.faces[fi][0]
        if find(host.face_of(old_of_new[h_new])) == outer_region:
            outer_candidates.add(fi)
    if len(outer_candidates) != 1:
        raise MapError("outer face of restriction is not unique; "
                       "restriction is probably disconnected")
    fi = outer_candidates.pop()
    if fi == sub.outer_face_index:
        return sub
    return PlanarMap(origin, nxt, outer_edge=sub.faces[fi][0],
                     edge_labels=labels)


def _outside_faces(host: PlanarMap, barrier_edges: set[int]) -> set[int]:
    """Faces reachable from the outer face without crossing barrier edges."""
    seen = {host.outer_face_index}
    stack = [host.outer_face_index]
    adj: dict[int, list[int]] = {}
    for e in range(host.n_edges):
        if e in barrier_edges:
            continue
        a, b = host.face_of(2 * e), host.face_of(2 * e + 1)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    while stack:
        f = stack.pop()
        for g in adj.get(f, ()):
            if g not in seen:
                seen.add(g)
                stack.append(g)
    return seen


def _biconnected_edge_sets(m: PlanarMap) -> list[set[int]]:
    """Blocks (2-connected components) as sets of edge ids.

    Iterative lowpoint computation; parallel edges are distinct edges, so a
    doubled edge forms a 2-connected pair as expected.
    """
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    comps: list[set[int]] = []
    estack: list[int] = []
    t = 0
    root = m.vertices[0]
    disc[root] = low[root] = t
    t += 1
    # frames: (vertex, half-edge arrived by, iterator over incident half-edges)
    frames = [(root, -1, iter(m.half_edges_at(root)))]
    while frames:
        v, via, it = frames[-1]
        advanced = False
        for h in it:
            if via >= 0 and (h >> 1) == (via >> 1):
                continue
            w = m.head(h)
            if w not in disc:
                disc[w] = low[w] = t
                t += 1
                estack.append(h >> 1)
                frames.append((w, h, iter(m.half_edges_at(w))))
                advanced = True
                break
            if disc[w] < disc[v]:
                estack.append(h >> 1)
                low[v] = min(low[v], disc[w])
        if advanced:
            continue
        frames.pop()
        if frames:
            u = frames[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= disc[u]:
                comp = set()
                while True:
                    e = estack.pop()
                    comp.add(e)
                    if e == (via >> 1):
                        break
                comps.append(comp)
    return comps


def block_containing(m: PlanarMap, seeds: Iterable[int]) -> PlanarMap:
    """The maximal 2-connected submap containing every seed vertex.

    The outer face of the result is the face that inherits the host's outer
    region.  Raises SeedBlockError when the seeds straddle several blocks (or
    sit on a single cut vertex shared by several).
    """
    seeds = set(seeds)
    if not seeds:
        raise SeedBlockError("seed set is empty")
    missing = seeds - set(m.vertices)
    if missing:
        raise SeedBlockError(f"seeds not in map: {sorted(missing)}")
    blocks = _biconnected_edge_sets(m)
    block_vertices = []
    for comp in blocks:
        vs = set()
        for e in comp:
            u, w = m.edge_endpoints(e)
            vs.add(u)
            vs.add(w)
        block_vertices.append(vs)
    hits = [i for i, vs in enumerate(block_vertices) if seeds <= vs]
    if not hits:
        raise SeedBlockError("seeds not co-blocked")
    if len(hits) > 1:
        raise SeedBlockError(
            "seeds lie on a cut vertex shared by several blocks")
    return _restrict(m, blocks[hits[0]])


def _host_edge_index(host: PlanarMap) -> dict[int, int]:
    return {lab: e for e, lab in enumerate(host.edge_labels)}


def _check_submap(host: PlanarMap, sub: PlanarMap) -> list[int]:
    """Host edge ids of sub's edges; raises if sub is not a submap.

    Submap means: shared edge labels with matching endpoints, and each
    vertex's rotation in sub is the host rotation restricted to sub's edges.
    """
    by_label = _host_edge_index(host)
    host_edges = []
    for e in range(sub.n_edges):
        lab = sub.edge_labels[e]
        if lab not in by_label:
            raise SubmapMismatchError(f"edge label {lab} not in host")
        he = by_label[lab]
        if set(sub.edge_endpoints(e)) != set(host.edge_endpoints(he)):
            raise SubmapMismatchError(f"edge {lab} endpoints differ from host")
        host_edges.append(he)
    sub_labels = set(sub.edge_labels)
    for v in sub.vertices:
        host_seq = [host.edge_labels[h >> 1] for h in host.half_edges_at(v)
                    if host.edge_labels[h >> 1] in sub_labels]
        sub_seq = [sub.edge_labels[h >> 1] for h in sub.half_edges_at(v)]
        if _min_rotation(tuple(host_seq)) != _min_rotation(tuple(sub_seq)):
            raise SubmapMismatchError(
                f"rotation at vertex {v} is not inherited from host")
    return host_edges


def fill_enclosed(host: PlanarMap, sub: PlanarMap) -> PlanarMap:
    """Add back every host vertex enclosed by a cycle of sub, with the host
    edges incident to those vertices.  The outer face boundary of sub is
    unchanged."""
    sub_edge_ids = set(_check_submap(host, sub))
    outside = _outside_faces(host, sub_edge_ids)
    sub_vs = set(sub.vertices)
    enclosed = set()
    for v in host.vertices:
        if v in sub_vs:
            continue
        if any(f not in outside for f in host.faces_at(v)):
            enclosed.add(v)
    keep = set(sub_edge_ids)
    for e in range(host.n_edges):
        u, w = host.edge_endpoints(e)
        if u in enclosed or w in enclosed:
            keep.add(e)
    out = _restrict(host, keep)
    if _min_rotation(out.outer_face_vertices()) != \
            _min_rotation(sub.outer_face_vertices()):
        raise SubmapMismatchError(
            "sub's outer face is incompatible with the host embedding")
    return out


def collapse_parallel(m: PlanarMap) -> PlanarMap:
    """Collapse each doubled edge to a single edge, erasing everything the
    pair encloses.  Input may have at most two edges between any pair."""
    if m.loops():
        raise MapError("loop edges are not supported")
    groups = m.parallel_groups()
    for pair, es in groups.items():
        if len(es) > 2:
            raise MultiplicityError(
                f"multiplicity exceeds 2 between {pair[0]} and {pair[1]}")
    if not groups:
        return m
    deleted: set[int] = set()
    for pair in sorted(groups):
        e1, e2 = sorted(groups[pair])
        if e1 in deleted or e2 in deleted:
            continue
        inside = set(range(len(m.faces))) - _outside_faces(m, {e1, e2})
        pair_vs = set(pair)
        enclosed_vs = {v for v in m.vertices
                       if v not in pair_vs
                       and any(f in inside for f in m.faces_at(v))}
        for e in range(m.n_edges):
            u, w = m.edge_endpoints(e)
            if u in enclosed_vs or w in enclosed_vs:
                deleted.add(e)
        deleted.add(e2)
    out = _restrict(m, set(range(m.n_edges)) - deleted)
    if not out.is_simple():
        raise MapError("collapse left a non-simple map (internal error)")
    return out


# -- text exchange format -----------------------------------------------------
#
#   nv ne
#   <vertex> <degree> <n1> ... <nk>      one line per vertex, ccw order
#   outer <k> <b1> ... <bk>
#
# Simple maps only.  Neighbor cycles are rotation-normalized on write, so
# parse(serialize(m)) reproduces the same embedded map.

def serialize_map(m: PlanarMap) -> str:
    if not m.is_simple():
        raise MapError("text format supports simple maps only")
    lines = [f"{m.n_vertices} {m.n_edges}"]
    for v in m.vertices:
        nbrs = _min_rotation(m.neighbors_ccw(v))
        lines.append(f"{v} {len(nbrs)} " + " ".join(map(str, nbrs)))
    outer = _min_rotation(m.outer_face_vertices())
    lines.append(f"outer {len(outer)} " + " ".join(map(str, outer)))
    return "\n".join(lines) + "\n"


def parse_map(text: str) -> PlanarMap:
    rows = [ln.split() for ln in text.splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise MapError("empty map file")
    try:
        nv, ne = int(rows[0][0]), int(rows[0][1])
    except (IndexError, ValueError) as exc:
        raise MapError("bad header line; expected 'nv ne'") from exc
    if len(rows) != nv + 2:
        raise MapError(f"expected {nv} vertex lines plus outer line")
    rotations: dict[int, list[int]] = {}
    for row in rows[1:nv + 1]:
        v, k = int(row[0]), int(row[1])
        nbrs = [int(x) for x in row[2:]]
        if len(nbrs) != k:
            raise MapError(f"vertex {v}: degree {k} but "
                           f"{len(nbrs)} neighbors listed")
        if v in rotations:
            raise MapError(f"vertex {v} listed twice")
        rotations[v] = nbrs
    last = rows[nv + 1]
    if last[0] != "outer":
        raise MapError("missing outer face line")
    outer = [int(x) for x in last[2:]]
    if len(outer) != int(last[1]):
        raise MapError("outer cycle length mismatch")
    m = PlanarMap.from_rotations(rotations, outer)
    if m.n_edges != ne:
        raise MapError(f"header says {ne} edges, found {m.n_edges}")
    return m
