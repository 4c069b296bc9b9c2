"""Indexed triangle mesh with derived half-edge connectivity and topology queries.

The mesh is stored as flat numpy arrays (vertices, faces, per-corner
attributes).  Half-edge tables (twins, undirected edges, vertex stars) are
derived lazily and cached; meshes are treated as immutable once built, so
every repair operation returns a new Mesh.

Half-edge numbering: half-edge ``h = 3*f + k`` runs from ``faces[f, k]`` to
``faces[f, (k+1) % 3]``; its in-face successor is ``3*f + (k+1) % 3``.
"""

from __future__ import annotations

import numpy as np


class MeshError(Exception):
    """Structural problem in a mesh (bad indices, malformed input)."""


class TopologyError(MeshError):
    """Mesh violates a topological precondition (non-manifold, disconnected...)."""


def halfedge_next(h: int) -> int:
    """In-face successor of half-edge h."""
    return h - h % 3 + (h % 3 + 1) % 3


class BoundaryLoop:
    """Ordered cycle of boundary vertices of one mesh component.

    Vertices follow the boundary half-edge walk, i.e. counter-clockwise with
    respect to the surface orientation.  Closing the loop with fan faces
    therefore uses the reversed edge direction (see fill_hole).
    """

    __slots__ = ("vertices", "length")

    def __init__(self, vertices, length):
        self.vertices = np.asarray(vertices, dtype=np.int64)
        self.length = float(length)

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"BoundaryLoop(n={len(self.vertices)}, length={self.length:.6g})"

    @property
    def edges(self):
        """Consecutive vertex pairs, cyclic, in stored order."""
        v = self.vertices
        n = len(v)
        return [(int(v[i]), int(v[(i + 1) % n])) for i in range(n)]


class Mesh:
    """Triangle mesh carrying positions and per-corner texture attributes.

    Parameters
    ----------
    vertices : (V, 3) float array
        3D positions.
    faces : (F, 3) int array
        Vertex indices per triangle, counter-clockwise within each face.
    corner_uv : (F, 3, 2) float array or None
        Original texture coordinates per face corner.  NaN marks a corner
        with no usable color (geometry created by hole filling).  None means
        the model carries no texture coordinates at all (parameterize-only).
    corner_tex : (F, 3) int array or None
        Source texture index per corner, -1 where undefined.
    texture_paths : sequence of str
        Source texture image paths, indexed by corner_tex.
    source_vertices : (V,) int array or None
        Original vertex ids these vertices descend from (kept through
        component splitting and repair); defaults to identity.
    """

    def __init__(self, vertices, faces, corner_uv=None, corner_tex=None,
                 texture_paths=(), source_vertices=None):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64).reshape(-1, 3)
        if self.faces.size:
            if self.faces.min() < 0 or self.faces.max() >= len(self.vertices):
                raise MeshError("face references a vertex index out of range")
            f = self.faces
            degen = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 2] == f[:, 0])
            if degen.any():
                raise MeshError(f"face {int(np.nonzero(degen)[0][0])} repeats a vertex index")
        self.corner_uv = None
        if corner_uv is not None:
            self.corner_uv = np.ascontiguousarray(corner_uv, dtype=np.float64).reshape(-1, 3, 2)
            if len(self.corner_uv) != len(self.faces):
                raise MeshError("corner_uv must have one row per face")
        self.corner_tex = None
        if corner_tex is not None:
            self.corner_tex = np.ascontiguousarray(corner_tex, dtype=np.int64).reshape(-1, 3)
            if len(self.corner_tex) != len(self.faces):
                raise MeshError("corner_tex must have one row per face")
        self.texture_paths = list(texture_paths)
        if source_vertices is None:
            self.source_vertices = np.arange(len(self.vertices), dtype=np.int64)
        else:
            self.source_vertices = np.asarray(source_vertices, dtype=np.int64).reshape(-1)
            if len(self.source_vertices) != len(self.vertices):
                raise MeshError("source_vertices must have one entry per vertex")
        # caches
        self._twin = None
        self._edges = None
        self._he_edge = None
        self._edge_faces_count = None
        self._dup_directed = None
        self._v2f = None
        self._eidx = None

    # ------------------------------------------------------------------
    # basic counts

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edge_array())

    def has_uv(self) -> bool:
        return self.corner_uv is not None

    # ------------------------------------------------------------------
    # connectivity tables

    def _build_connectivity(self):
        F = len(self.faces)
        if F == 0:
            self._twin = np.empty(0, dtype=np.int64)
            self._edges = np.empty((0, 2), dtype=np.int64)
            self._he_edge = np.empty(0, dtype=np.int64)
            self._edge_faces_count = np.empty(0, dtype=np.int64)
            self._dup_directed = False
            return
        V = max(len(self.vertices), 1)
        o = self.faces.reshape(-1)
        d = self.faces[:, (1, 2, 0)].reshape(-1)
        code = o * V + d
        rcode = d * V + o
        order = np.argsort(code, kind="stable")
        sc = code[order]
        pos = np.searchsorted(sc, rcode)
        valid = pos < sc.size
        cand = np.where(valid, pos, 0)
        match = valid & (sc[cand] == rcode)
        twin = np.full(3 * F, -1, dtype=np.int64)
        twin[match] = order[cand[match]]
        self._twin = twin
        # two half-edges in the same direction = inconsistent orientation
        # (or a >2-face edge); either way the mesh needs repair first
        self._dup_directed = bool(np.any(sc[1:] == sc[:-1]))
        lo = np.minimum(o, d)
        hi = np.maximum(o, d)
        ucode = lo * V + hi
        uniq, inv, counts = np.unique(ucode, return_inverse=True, return_counts=True)
        self._edges = np.column_stack((uniq // V, uniq % V))
        self._he_edge = inv.reshape(-1)
        self._edge_faces_count = counts

    def halfedge_twins(self) -> np.ndarray:
        """(3F,) twin half-edge index per half-edge, -1 on boundary."""
        if self._twin is None:
            self._build_connectivity()
        return self._twin

    def edge_array(self) -> np.ndarray:
        """(E, 2) unique undirected edges, each row sorted, rows sorted."""
        if self._edges is None:
            self._build_connectivity()
        return self._edges

    def halfedge_edge(self) -> np.ndarray:
        """(3F,) undirected edge row index per half-edge."""
        if self._he_edge is None:
            self._build_connectivity()
        return self._he_edge

    def edge_face_counts(self) -> np.ndarray:
        """(E,) number of incident faces per undirected edge."""
        if self._edge_faces_count is None:
            self._build_connectivity()
        return self._edge_faces_count

    def edge_lengths(self) -> np.ndarray:
        e = self.edge_array()
        return np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)

    def vertex_faces(self):
        """List of (k,) face-index arrays, one per vertex, sorted ascending."""
        if self._v2f is None:
            flat = self.faces.reshape(-1)
            order = np.argsort(flat, kind="stable")
            fidx = order // 3
            counts = np.bincount(flat, minlength=len(self.vertices))
            splits = np.cumsum(counts)[:-1]
            self._v2f = [np.sort(a) for a in np.split(fidx, splits)]
        return self._v2f

    def edge_index(self):
        """Dict mapping sorted vertex pair to undirected edge row (cached)."""
        if self._eidx is None:
            e = self.edge_array()
            self._eidx = {(int(a), int(b)): i for i, (a, b) in enumerate(e)}
        return self._eidx

    # ------------------------------------------------------------------
    # validation

    def is_edge_manifold(self) -> bool:
        c = self.edge_face_counts()
        return bool(c.size == 0 or c.max() <= 2)

    def is_oriented(self) -> bool:
        if self._dup_directed is None:
            self._build_connectivity()
        return not self._dup_directed

    def vertex_face_groups(self, vid: int):
        """Groups of faces around a vertex, connected through shared manifold
        edges at that vertex.  More than one group = non-manifold vertex."""
        v2f = self.vertex_faces()
        inc = list(v2f[vid])
        if not inc:
            return []
        counts = self.edge_face_counts()
        eidx = self.edge_index()
        # map: other-endpoint -> faces using edge (vid, other)
        by_edge = {}
        for f in inc:
            for w in self.faces[f]:
                w = int(w)
                if w == vid:
                    continue
                by_edge.setdefault(w, []).append(f)
        adj = {f: set() for f in inc}
        for w, fl in by_edge.items():
            row = eidx[(min(vid, w), max(vid, w))]
            if counts[row] == 2 and len(fl) == 2:
                adj[fl[0]].add(fl[1])
                adj[fl[1]].add(fl[0])
        groups = []
        seen = set()
        for f0 in inc:
            if f0 in seen:
                continue
            stack = [f0]
            seen.add(f0)
            grp = []
            while stack:
                f = stack.pop()
                grp.append(f)
                for g in adj[f]:
                    if g not in seen:
                        seen.add(g)
                        stack.append(g)
            groups.append(sorted(grp))
        return groups

    def is_vertex_manifold(self) -> bool:
        return all(len(self.vertex_face_groups(v)) <= 1
                   for v in range(len(self.vertices)))

    def is_manifold(self) -> bool:
        return self.is_edge_manifold() and self.is_vertex_manifold()

    def validate_manifold(self):
        """Raise TopologyError unless edge- and vertex-manifold and oriented."""
        if not self.is_edge_manifold():
            bad = int(np.argmax(self.edge_face_counts()))
            a, b = self.edge_array()[bad]
            raise TopologyError(f"edge ({a}, {b}) borders more than two faces")
        if not self.is_oriented():
            raise TopologyError("inconsistent face orientation; run repair first")
        for v in range(len(self.vertices)):
            if len(self.vertex_face_groups(v)) > 1:
                raise TopologyError(f"vertex {v} has more than one face fan")

    # ------------------------------------------------------------------
    # topology queries

    def boundary_loops(self):
        """All boundary loops, ordered by descending arc length.

        Requires an edge-manifold, consistently oriented mesh.
        """
        if not self.is_edge_manifold() or not self.is_oriented():
            raise TopologyError("boundary_loops requires a manifold oriented mesh")
        twin = self.halfedge_twins()
        boundary = np.nonzero(twin < 0)[0]
        origin = self.faces.reshape(-1)
        visited = np.zeros(len(twin), dtype=bool)
        loops = []
        for h0 in boundary:
            if visited[h0]:
                continue
            verts = []
            h = int(h0)
            guard = 0
            while not visited[h]:
                visited[h] = True
                verts.append(int(origin[h]))
                # rotate around the destination vertex to the next boundary side
                h2 = halfedge_next(h)
                while twin[h2] >= 0:
                    h2 = halfedge_next(int(twin[h2]))
                    guard += 1
                    if guard > len(twin) + 3:
                        raise TopologyError("boundary walk did not terminate")
                h = h2
            p = self.vertices[np.asarray(verts)]
            length = float(np.linalg.norm(p - np.roll(p, -1, axis=0), axis=1).sum())
            loops.append(BoundaryLoop(verts, length))
        loops.sort(key=lambda lp: (-lp.length, int(lp.vertices.min())))
        return loops

    def face_components(self) -> np.ndarray:
        """(F,) component label per face; faces connected through shared edges."""
        F = len(self.faces)
        labels = np.full(F, -1, dtype=np.int64)
        if F == 0:
            return labels
        he_edge = self.halfedge_edge()
        # faces sharing an undirected edge, including non-manifold bundles
        order = np.argsort(he_edge, kind="stable")
        sorted_e = he_edge[order]
        face_of = order // 3
        starts = np.searchsorted(sorted_e, np.arange(len(self.edge_array())))
        ends = np.append(starts[1:], len(sorted_e))
        adj = [[] for _ in range(F)]
        for s, e in zip(starts, ends):
            grp = face_of[s:e]
            if len(grp) > 1:
                base = int(grp[0])
                for g in grp[1:]:
                    adj[base].append(int(g))
                    adj[int(g)].append(base)
        label = 0
        for f0 in range(F):
            if labels[f0] >= 0:
                continue
            stack = [f0]
            labels[f0] = label
            while stack:
                f = stack.pop()
                for g in adj[f]:
                    if labels[g] < 0:
                        labels[g] = label
                        stack.append(g)
            label += 1
        return labels

    def split_components(self):
        """One Mesh per face-connected component, vertices densely remapped.

        Unreferenced vertices are dropped.  Components are ordered by their
        smallest face index in the parent mesh.
        """
        labels = self.face_components()
        out = []
        for c in range(labels.max() + 1 if labels.size else 0):
            fsel = np.nonzero(labels == c)[0]
            faces = self.faces[fsel]
            used = np.unique(faces)
            remap = np.full(len(self.vertices), -1, dtype=np.int64)
            remap[used] = np.arange(len(used))
            out.append(Mesh(
                self.vertices[used],
                remap[faces],
                corner_uv=None if self.corner_uv is None else self.corner_uv[fsel],
                corner_tex=None if self.corner_tex is None else self.corner_tex[fsel],
                texture_paths=self.texture_paths,
                source_vertices=self.source_vertices[used],
            ))
        return out

    def euler_characteristic(self) -> int:
        """V - E + F, counting only vertices referenced by faces."""
        v_used = len(np.unique(self.faces)) if self.faces.size else 0
        return v_used - self.n_edges + self.n_faces

    def genus(self) -> int:
        """Genus from the Euler formula V - E + F = 2 - 2g - b.

        Requires a manifold, oriented, connected mesh.
        """
        labels = self.face_components()
        if labels.size and labels.max() > 0:
            raise TopologyError("genus requires a connected mesh; split components first")
        b = len(self.boundary_loops())
        chi = self.euler_characteristic()
        num = 2 - b - chi
        if num < 0 or num % 2 != 0:
            raise TopologyError(f"Euler count is inconsistent (chi={chi}, b={b}); "
                                "connectivity is corrupted")
        return num // 2

    def bbox_diagonal(self) -> float:
        if len(self.vertices) == 0:
            return 0.0
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    def bbox_center(self) -> np.ndarray:
        return 0.5 * (self.vertices.max(axis=0) + self.vertices.min(axis=0))

    def __repr__(self):
        return f"Mesh(V={self.n_vertices}, F={self.n_faces})"
