"""1+1-dimensional space-time meshes with causal face classification.

Conventions used throughout the package:

* interior faces are either space-like (c |n_x| < n_t, unit normal chosen
  future-pointing) or time-like (n_t = 0, unit normal pointing from the
  left element to the right one);
* initial and final faces store the future-pointing normal (0, 1); the
  outward normal of an initial face is (0, -1);
* lateral boundary faces are vertical and store the outward normal
  (-1, 0) at x = a, (+1, 0) at x = b;
* face adjacency is (elem_minus, elem_plus) = (past, future) across
  space-like faces, (left, right) across time-like ones and
  (owner, None) on the boundary.

Meshes are immutable after construction and safe for concurrent reads.
"""

import json
import heapq
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    CyclicDependency,
    DegenerateFace,
    HasTimeLikeFaces,
    InvalidPartition,
    NonTerminating,
    UnclassifiableFace,
)

# classification tolerances: a face is time-like iff |n_t| <= _TIME_TOL;
# space-like needs n_t - c|n_x| > _SPACE_TOL * n_t; in between is an error
_TIME_TOL = 1e-12
_SPACE_TOL = 1e-12
_UNIT_TOL = 1e-14
_AREA_TOL = 1e-12


class FaceKind(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    INITIAL = "initial"
    FINAL = "final"
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"


INTERIOR_KINDS = (FaceKind.SPACELIKE, FaceKind.TIMELIKE)
LATERAL_KINDS = (FaceKind.DIRICHLET, FaceKind.NEUMANN, FaceKind.ROBIN)
_KIND_BY_LETTER = {"D": FaceKind.DIRICHLET, "N": FaceKind.NEUMANN, "R": FaceKind.ROBIN}
_LETTER_BY_KIND = {v: k for k, v in _KIND_BY_LETTER.items()}


def classify_face(p0, p1, speeds, tag=None, outward=1.0):
    """Classify a face segment, returning (kind, unit normal, gamma).

    ``speeds`` is the wave speed of the adjacent element(s) (scalar or
    pair); interior faces (``tag=None``) use the larger one for the
    space-like test.  ``tag`` selects a boundary kind: "initial", "final"
    or one of "D"/"N"/"R" (lateral, with ``outward`` = +-1 giving the
    outward x-direction).  gamma = c |n_x| / n_t on space-like faces and
    0 otherwise.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    d = p1 - p0
    length = float(np.hypot(d[0], d[1]))
    if length == 0.0:
        raise DegenerateFace(f"face endpoints coincide at {p0}")
    normal = np.array([-d[1], d[0]]) / length
    cs = np.atleast_1d(np.asarray(speeds, dtype=float))
    if np.any(cs <= 0):
        raise ValueError(f"wave speeds must be positive, got {cs}")
    c = float(np.max(cs))

    if tag is None:
        if abs(normal[1]) <= _TIME_TOL:
            return FaceKind.TIMELIKE, np.array([1.0, 0.0]), 0.0
        if normal[1] < 0:
            normal = -normal
        if normal[1] - c * abs(normal[0]) > _SPACE_TOL * normal[1]:
            return FaceKind.SPACELIKE, normal, c * abs(normal[0]) / normal[1]
        raise UnclassifiableFace(
            f"interior face with c|n_x| = {c * abs(normal[0]):.3e} vs "
            f"n_t = {normal[1]:.3e} is characteristic or steeper"
        )
    if tag in ("initial", "final"):
        if abs(normal[0]) > _TIME_TOL:
            raise UnclassifiableFace(f"{tag} face must be flat, normal {normal}")
        kind = FaceKind.INITIAL if tag == "initial" else FaceKind.FINAL
        return kind, np.array([0.0, 1.0]), 0.0
    if tag in _KIND_BY_LETTER:
        if abs(normal[1]) > _TIME_TOL:
            raise UnclassifiableFace(
                f"lateral boundary face must be vertical, normal {normal}"
            )
        return _KIND_BY_LETTER[tag], np.array([float(np.sign(outward)), 0.0]), 0.0
    raise ValueError(f"unknown face tag {tag!r}")


@dataclass
class Face:
    id: int
    v0: int
    v1: int
    p0: np.ndarray
    p1: np.ndarray
    kind: FaceKind
    normal: np.ndarray
    gamma: float
    elem_minus: int | None
    elem_plus: int | None = None

    @property
    def length(self):
        return float(np.hypot(*(self.p1 - self.p0)))

    @property
    def midpoint(self):
        return 0.5 * (self.p0 + self.p1)

    @property
    def interior(self):
        return self.kind in INTERIOR_KINDS


@dataclass
class Element:
    id: int
    vert_ids: tuple
    verts: np.ndarray  # (k, 2), counterclockwise
    c: float
    face_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.area = polygon_area(self.verts)
        self.centroid = polygon_centroid(self.verts)
        dx = self.verts[:, None, :] - self.verts[None, :, :]
        self.h = float(np.max(np.hypot(dx[..., 0], dx[..., 1])))


@dataclass(frozen=True)
class BoundarySegment:
    side: str  # "left" | "right"
    t0: float
    t1: float
    kind: str  # "D" | "N" | "R"


@dataclass
class Mesh:
    a: float
    b: float
    T: float
    vertices: np.ndarray
    elements: list
    faces: list
    boundary: tuple

    def faces_of(self, *kinds):
        return [f for f in self.faces if f.kind in kinds]

    @property
    def n_elements(self):
        return len(self.elements)

    def locate(self, x, t):
        """Element id containing (x, t); lowest id wins on shared faces."""
        p = np.array([x, t], dtype=float)
        for e in self.elements:
            v = e.verts
            tol = 1e-12 * e.h
            inside = True
            for i in range(len(v)):
                d = v[(i + 1) % len(v)] - v[i]
                r = p - v[i]
                if d[0] * r[1] - d[1] * r[0] < -tol:
                    inside = False
                    break
            if inside:
                return e.id
        raise ValueError(f"point ({x}, {t}) is outside the mesh")

    def to_dict(self):
        return {
            "format": "spacetime-mesh",
            "version": 1,
            "domain": {"a": self.a, "b": self.b, "T": self.T},
            "vertices": [[float(x), float(t)] for x, t in self.vertices],
            "elements": [
                {"verts": list(map(int, e.vert_ids)), "c": float(e.c)}
                for e in self.elements
            ],
            "boundary": [
                {"side": s.side, "from_t": s.t0, "to_t": s.t1, "kind": s.kind}
                for s in self.boundary
            ],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def from_dict(d):
        if d.get("format") != "spacetime-mesh" or int(d.get("version", -1)) != 1:
            raise InvalidPartition(
                f"unsupported mesh file format/version: "
                f"{d.get('format')!r} v{d.get('version')!r}"
            )
        dom = d["domain"]
        boundary = tuple(
            BoundarySegment(s["side"], float(s["from_t"]), float(s["to_t"]), s["kind"])
            for s in d["boundary"]
        )
        return mesh_from_polygons(
            float(dom["a"]),
            float(dom["b"]),
            float(dom["T"]),
            np.asarray(d["vertices"], dtype=float),
            [tuple(e["verts"]) for e in d["elements"]],
            [float(e["c"]) for e in d["elements"]],
            boundary,
        )

    @staticmethod
    def load(path):
        with open(path) as fh:
            return Mesh.from_dict(json.load(fh))


def polygon_area(verts):
    """Signed (shoelace) area; positive for counterclockwise loops."""
    v = np.asarray(verts, dtype=float)
    x, t = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(t, -1) - np.roll(x, -1) * t))


def polygon_centroid(verts):
    v = np.asarray(verts, dtype=float)
    x, t = v[:, 0], v[:, 1]
    xn, tn = np.roll(x, -1), np.roll(t, -1)
    cross = x * tn - xn * t
    area = 0.5 * np.sum(cross)
    if abs(area) < 1e-300:
        return v.mean(axis=0)
    cx = np.sum((x + xn) * cross) / (6.0 * area)
    ct = np.sum((t + tn) * cross) / (6.0 * area)
    return np.array([cx, ct])


def _normalize_bc(bc, T):
    """Accept ("D","R")-style pairs or per-side segment lists."""
    if isinstance(bc, (tuple, list)) and len(bc) == 2 and all(
        isinstance(s, str) for s in bc
    ):
        bc = {"left": bc[0], "right": bc[1]}
    if not isinstance(bc, dict) or set(bc) != {"left", "right"}:
        raise InvalidPartition(f"boundary spec needs 'left' and 'right', got {bc!r}")
    segments = []
    for side in ("left", "right"):
        spec = bc[side]
        if isinstance(spec, str):
            spec = [(0.0, T, spec)]
        last = 0.0
        for t0, t1, kind in spec:
            if kind not in _KIND_BY_LETTER:
                raise InvalidPartition(f"boundary kind must be D/N/R, got {kind!r}")
            if t0 > last + 1e-12 * T or t1 <= t0:
                raise InvalidPartition(
                    f"boundary segments on {side} must cover [0, T] in order"
                )
            segments.append(BoundarySegment(side, float(t0), float(t1), kind))
            last = t1
        if last < T * (1 - 1e-12):
            raise InvalidPartition(f"boundary segments on {side} stop at t={last} < T")
    return tuple(segments)


def _bc_kind(boundary, side, t):
    for seg in boundary:
        if seg.side == side and seg.t0 - 1e-12 <= t <= seg.t1 + 1e-12:
            return seg.kind
    raise InvalidPartition(f"no boundary segment covers side={side}, t={t}")


def mesh_from_polygons(a, b, T, vertices, polys, speeds, boundary):
    """Assemble a Mesh from polygon loops; faces are derived, not stored.

    Shared edges are matched by vertex-id pairs, classified by
    classify_face, and oriented: past before future across space-like
    faces, left before right across time-like ones.
    """
    verts = np.asarray(vertices, dtype=float)
    elements = []
    for eid, (ids, c) in enumerate(zip(polys, speeds)):
        elements.append(Element(eid, tuple(int(i) for i in ids), verts[list(ids)], float(c)))

    edge_owners = {}
    for e in elements:
        k = len(e.vert_ids)
        for i in range(k):
            key = tuple(sorted((e.vert_ids[i], e.vert_ids[(i + 1) % k])))
            edge_owners.setdefault(key, []).append(e.id)

    scale = max(b - a, T)
    tol = 1e-10 * scale
    faces = []
    for key in sorted(edge_owners):
        owners = edge_owners[key]
        va, vb = key
        p0, p1 = verts[va], verts[vb]
        if len(owners) > 2:
            raise UnclassifiableFace(f"edge {key} shared by {len(owners)} elements")
        if len(owners) == 2:
            e1, e2 = owners
            kind, normal, gamma = classify_face(
                p0, p1, (elements[e1].c, elements[e2].c)
            )
            mid = 0.5 * (p0 + p1)
            if kind is FaceKind.SPACELIKE:
                s1 = float(normal @ (elements[e1].centroid - mid))
                minus, plus = (e1, e2) if s1 < 0 else (e2, e1)
            else:
                x1 = elements[e1].centroid[0]
                x2 = elements[e2].centroid[0]
                minus, plus = (e1, e2) if x1 < x2 else (e2, e1)
        else:
            (e1,) = owners
            minus, plus = e1, None
            t0, t1 = p0[1], p1[1]
            x0, x1 = p0[0], p1[0]
            if abs(t0) <= tol and abs(t1) <= tol:
                kind, normal, gamma = classify_face(p0, p1, elements[e1].c, tag="initial")
            elif abs(t0 - T) <= tol and abs(t1 - T) <= tol:
                kind, normal, gamma = classify_face(p0, p1, elements[e1].c, tag="final")
            elif abs(x0 - a) <= tol and abs(x1 - a) <= tol:
                letter = _bc_kind(boundary, "left", 0.5 * (t0 + t1))
                kind, normal, gamma = classify_face(
                    p0, p1, elements[e1].c, tag=letter, outward=-1.0
                )
            elif abs(x0 - b) <= tol and abs(x1 - b) <= tol:
                letter = _bc_kind(boundary, "right", 0.5 * (t0 + t1))
                kind, normal, gamma = classify_face(
                    p0, p1, elements[e1].c, tag=letter, outward=+1.0
                )
            else:
                raise UnclassifiableFace(
                    f"boundary edge {key} at {p0}-{p1} lies on no domain boundary "
                    "(nonconforming mesh?)"
                )
        fid = len(faces)
        faces.append(
            Face(fid, va, vb, verts[va].copy(), verts[vb].copy(), kind, normal, gamma,
                 minus, plus)
        )
        for owner in owners:
            elements[owner].face_ids.append(fid)

    return Mesh(float(a), float(b), float(T), verts, elements, faces, tuple(boundary))


def build_slab_mesh(x_partition, t_partition, speeds=1.0, bc=("D", "D")):
    """Tensor-product mesh of rectangles on strictly increasing partitions.

    Interior horizontal faces are space-like (gamma = 0), vertical ones
    time-like.  ``speeds`` is a scalar or one wave speed per x-column, so
    c jumps only across time-like faces.
    """
    x = np.asarray(x_partition, dtype=float)
    t = np.asarray(t_partition, dtype=float)
    for name, part in (("x", x), ("t", t)):
        if part.ndim != 1 or len(part) < 2 or np.any(np.diff(part) <= 0):
            raise InvalidPartition(f"{name}-partition must be strictly increasing")
    if abs(t[0]) > 1e-12 * max(abs(t[-1]), 1.0):
        raise InvalidPartition(f"t-partition must start at 0, got {t[0]}")
    nx, nt = len(x) - 1, len(t) - 1
    cs = np.broadcast_to(np.asarray(speeds, dtype=float), (nx,)).copy()
    if np.any(cs <= 0):
        raise InvalidPartition(f"wave speeds must be positive, got {cs}")

    def vid(i, j):
        return j * (nx + 1) + i

    xx, tt = np.meshgrid(x, t)
    vertices = np.column_stack([xx.ravel(), tt.ravel()])
    polys, elem_c = [], []
    for j in range(nt):
        for i in range(nx):
            polys.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
            elem_c.append(cs[i])
    boundary = _normalize_bc(bc, float(t[-1]))
    return mesh_from_polygons(x[0], x[-1], t[-1], vertices, polys, elem_c, boundary)


def build_tent_mesh(x_partition, c=1.0, zeta=0.5, T=1.0, bc=("R", "R")):
    """Advancing-front tent mesh: every interior face is space-like.

    Front times t_i live on the nodes of the x-partition, all starting at
    0.  Repeatedly the node with minimal t_i (ties by index) is pitched to
    min(T, min_j t_j + zeta |x_j - x_i| / c) over its neighbors j, and the
    polygon between the old and the new front over [x_{i-1}, x_{i+1}]
    (clipped at the boundary) is emitted.  The slope bound zeta/c keeps
    every interior face strictly under the characteristic cone
    (gamma <= zeta < 1).
    """
    x = np.asarray(x_partition, dtype=float)
    if x.ndim != 1 or len(x) < 2 or np.any(np.diff(x) <= 0):
        raise InvalidPartition("x-partition must be strictly increasing")
    if not 0.0 < zeta < 1.0:
        raise InvalidPartition(f"zeta must lie in (0, 1), got {zeta}")
    if c <= 0 or T <= 0:
        raise InvalidPartition("c and T must be positive")
    n = len(x)
    front = np.zeros(n)
    coords = []
    vid_of = {}

    def vid(i, t):
        key = (i, t)
        if key not in vid_of:
            vid_of[key] = len(coords)
            coords.append((x[i], t))
        return vid_of[key]

    for i in range(n):
        vid(i, 0.0)

    dmin = float(np.min(np.diff(x)))
    max_pitches = min(200_000, 64 + 8 * n * (int(c * T / (zeta * dmin)) + 2))
    polys = []
    pitches = 0
    while np.any(front < T):
        active = [i for i in range(n) if front[i] < T]
        i = min(active, key=lambda j: (front[j], j))
        t_old = front[i]
        cand = [front[j] + zeta * abs(x[j] - x[i]) / c
                for j in (i - 1, i + 1) if 0 <= j < n]
        t_new = min(T, min(cand))
        if t_new >= T * (1.0 - 1e-12):
            t_new = T  # snap: roundoff slivers below T would degenerate
        if t_new <= t_old:
            raise NonTerminating(
                f"tent pitching stalled at node {i}, t={t_old} (zeta={zeta})"
            )
        poly = []
        if i > 0:
            poly.append(vid(i - 1, front[i - 1]))
        poly.append(vid(i, t_old))
        if i < n - 1:
            poly.append(vid(i + 1, front[i + 1]))
        poly.append(vid(i, t_new))
        polys.append(tuple(poly))
        front[i] = t_new
        pitches += 1
        if pitches > max_pitches:
            raise NonTerminating(
                f"tent pitching exceeded {max_pitches} pitches without finishing"
            )

    boundary = _normalize_bc(bc, float(T))
    return mesh_from_polygons(
        x[0], x[-1], float(T), np.asarray(coords, dtype=float), polys,
        [float(c)] * len(polys), boundary,
    )


def causal_order(mesh):
    """Topological order of elements along space-like faces.

    Returns (order, layers): ``order`` lists element ids sorted by
    (longest-path layer, id); ``layers[e]`` is the layer index of element
    e.  Raises HasTimeLikeFaces if any interior time-like face exists and
    CyclicDependency if the causal graph is not a DAG (a mesh bug).
    """
    if any(f.kind is FaceKind.TIMELIKE for f in mesh.faces):
        raise HasTimeLikeFaces("mesh has interior time-like faces")
    n = mesh.n_elements
    succs = [[] for _ in range(n)]
    indeg = np.zeros(n, dtype=int)
    for f in mesh.faces:
        if f.kind is FaceKind.SPACELIKE:
            succs[f.elem_minus].append(f.elem_plus)
            indeg[f.elem_plus] += 1
    layers = np.zeros(n, dtype=int)
    ready = [e for e in range(n) if indeg[e] == 0]
    heapq.heapify(ready)
    done = 0
    while ready:
        e = heapq.heappop(ready)
        done += 1
        for s in succs[e]:
            layers[s] = max(layers[s], layers[e] + 1)
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(ready, s)
    if done < n:
        raise CyclicDependency("causal element graph has a cycle")
    order = sorted(range(n), key=lambda e: (layers[e], e))
    return order, layers


def _space_face_dag(mesh):
    """Edges lower -> upper between space-like faces overlapping in x."""
    sp = [f for f in mesh.faces if f.kind is FaceKind.SPACELIKE]
    tol = 1e-12 * max(mesh.b - mesh.a, 1.0)
    edges = {f.id: [] for f in sp}

    def t_at(f, xq):
        x0, t0 = f.p0
        x1, t1 = f.p1
        if abs(x1 - x0) < tol:
            return 0.5 * (t0 + t1)
        return t0 + (t1 - t0) * (xq - x0) / (x1 - x0)

    for i, f1 in enumerate(sp):
        a1, b1 = sorted((f1.p0[0], f1.p1[0]))
        for f2 in sp[i + 1:]:
            a2, b2 = sorted((f2.p0[0], f2.p1[0]))
            lo, hi = max(a1, a2), min(b1, b2)
            if hi - lo <= tol:
                continue
            xm = 0.5 * (lo + hi)
            t1m, t2m = t_at(f1, xm), t_at(f2, xm)
            if t1m < t2m:
                edges[f1.id].append(f2.id)
            elif t2m < t1m:
                edges[f2.id].append(f1.id)
    return sp, edges


def interface_layers(mesh):
    """Greedy antichain layering of the interior space-like faces.

    Peeling minimal faces (those with no uncovered face below them) gives
    the longest-path layering of the face DAG; each layer is a set of
    non-crossing faces that fits on one space-like interface graph.
    """
    sp, edges = _space_face_dag(mesh)
    indeg = {f.id: 0 for f in sp}
    for src, dsts in edges.items():
        for d in dsts:
            indeg[d] += 1
    layers = []
    current = sorted(fid for fid, k in indeg.items() if k == 0)
    while current:
        layers.append(current)
        nxt = set()
        for fid in current:
            for d in edges[fid]:
                indeg[d] -= 1
                if indeg[d] == 0:
                    nxt.add(d)
        current = sorted(nxt)
    return layers


def longest_face_chain(mesh):
    """Length of the longest below/above chain of space-like faces."""
    sp, edges = _space_face_dag(mesh)
    memo = {}

    def depth(fid):
        if fid not in memo:
            memo[fid] = 1 + max((depth(d) for d in edges[fid]), default=0)
        return memo[fid]

    return max((depth(f.id) for f in sp), default=0)


def count_interface_layers(mesh):
    """Minimal number N of nested space-like interfaces covering the
    interior space-like faces, plus one for the final interface at t=T."""
    return len(interface_layers(mesh)) + 1


@dataclass
class MeshReport:
    violations: list

    @property
    def ok(self):
        return not self.violations


def validate_mesh(mesh):
    """Check every structural invariant; returns a report, never raises."""
    v = []
    area_domain = (mesh.b - mesh.a) * mesh.T
    area_sum = 0.0
    for e in mesh.elements:
        if e.c <= 0:
            v.append(f"element {e.id}: nonpositive wave speed {e.c}")
        area = polygon_area(e.verts)
        if area <= 0:
            v.append(f"element {e.id}: vertex loop not counterclockwise "
                     f"(signed area {area:.3e})")
        area_sum += abs(area)
        centroid = polygon_centroid(e.verts)
        k = len(e.verts)
        for i in range(k):
            p1 = e.verts[i] - centroid
            p2 = e.verts[(i + 1) % k] - centroid
            if p1[0] * p2[1] - p1[1] * p2[0] <= 0 and area > 0:
                v.append(f"element {e.id}: not star-shaped w.r.t. centroid")
                break
        perim = sum(np.hypot(*(e.verts[(i + 1) % k] - e.verts[i])) for i in range(k))
        flen = sum(mesh.faces[fid].length for fid in e.face_ids)
        if abs(perim - flen) > 1e-9 * perim:
            v.append(f"element {e.id}: faces do not partition the boundary "
                     f"({flen:.6g} vs perimeter {perim:.6g})")
    if abs(area_sum - area_domain) > _AREA_TOL * max(area_domain, 1.0):
        v.append(f"element areas sum to {area_sum!r}, domain has {area_domain!r}")

    tmin = float(np.min(mesh.vertices[:, 1]))
    tmax = float(np.max(mesh.vertices[:, 1]))
    if tmin < -1e-12 * mesh.T or tmax > mesh.T * (1 + 1e-12):
        v.append(f"vertex times outside [0, T]: [{tmin}, {tmax}]")

    for f in mesh.faces:
        nrm = float(np.hypot(*f.normal))
        if abs(nrm - 1.0) > _UNIT_TOL:
            v.append(f"face {f.id}: normal not unit (|n| = {nrm!r})")
        if f.kind is FaceKind.SPACELIKE and f.normal[1] <= 0:
            v.append(f"face {f.id}: space-like normal not future-pointing")
        if f.kind is FaceKind.TIMELIKE and f.normal[1] != 0.0:
            v.append(f"face {f.id}: time-like face with n_t != 0")
        try:
            if f.interior:
                cs = (mesh.elements[f.elem_minus].c, mesh.elements[f.elem_plus].c)
                kind, normal, gamma = classify_face(f.p0, f.p1, cs)
            else:
                tag = {"initial": "initial", "final": "final"}.get(f.kind.value)
                if tag is None:
                    tag = _LETTER_BY_KIND.get(f.kind)
                kind, normal, gamma = classify_face(
                    f.p0, f.p1, mesh.elements[f.elem_minus].c, tag=tag,
                    outward=f.normal[0] if f.kind in LATERAL_KINDS else 1.0,
                )
            if kind is not f.kind:
                v.append(f"face {f.id}: stored kind {f.kind} vs recomputed {kind}")
            elif not np.allclose(normal, f.normal, atol=1e-13):
                v.append(f"face {f.id}: stored normal {f.normal} vs {normal}")
            elif abs(gamma - f.gamma) > 1e-12:
                v.append(f"face {f.id}: stored gamma {f.gamma} vs {gamma}")
        except Exception as exc:  # noqa: BLE001 - reported, not raised
            v.append(f"face {f.id}: reclassification failed: {exc}")
        if f.kind is FaceKind.SPACELIKE:
            cm = mesh.elements[f.elem_minus].c
            cp = mesh.elements[f.elem_plus].c
            if abs(cm - cp) > 1e-12 * max(cm, cp):
                v.append(f"face {f.id}: wave speed jumps across space-like face")
        for side in (f.elem_minus, f.elem_plus):
            if side is not None and f.id not in mesh.elements[side].face_ids:
                v.append(f"face {f.id}: element {side} does not list it back")
    return MeshReport(v)
