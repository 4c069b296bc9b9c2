"""Turn each mesh component into a topological disk.

Steps: slice non-manifold elements, fill small holes with centroid fans,
remove small handles by cutting along short homology generators, and cut
closed or high-genus surfaces open along a cut graph.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .mesh import BoundaryLoop, Mesh, MeshError, TopologyError, halfedge_next

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# orientation

def orient_consistently(mesh: Mesh) -> Mesh:
    """Flip faces so every interior edge is traversed once in each direction.

    Raises TopologyError for non-orientable input.  Requires edge-manifold
    input.  Returns the same object when nothing needs flipping.
    """
    if not mesh.is_edge_manifold():
        raise TopologyError("orientation pass requires an edge-manifold mesh")
    F = len(mesh.faces)
    o = mesh.faces.reshape(-1)
    d = mesh.faces[:, (1, 2, 0)].reshape(-1)
    he_edge = mesh.halfedge_edge()
    n_e = len(mesh.edge_array())
    edge_sides = [[] for _ in range(n_e)]
    for h in range(3 * F):
        edge_sides[he_edge[h]].append(h)

    flip = np.zeros(F, dtype=bool)
    seen = np.zeros(F, dtype=bool)
    flipped_any = False
    for f0 in range(F):
        if seen[f0]:
            continue
        seen[f0] = True
        stack = [f0]
        while stack:
            f = stack.pop()
            for k in range(3):
                h = 3 * f + k
                for h2 in edge_sides[he_edge[h]]:
                    g = h2 // 3
                    if g == f:
                        continue
                    same_dir = (o[h] == o[h2])  # both run a->b: one must flip
                    want = flip[f] ^ same_dir
                    if not seen[g]:
                        seen[g] = True
                        flip[g] = want
                        if want:
                            flipped_any = True
                        stack.append(g)
                    elif flip[g] != want:
                        raise TopologyError("mesh is non-orientable")
    if not flipped_any:
        return mesh
    faces = mesh.faces.copy()
    faces[flip] = faces[flip][:, (0, 2, 1)]
    cuv = mesh.corner_uv
    if cuv is not None:
        cuv = cuv.copy()
        cuv[flip] = cuv[flip][:, (0, 2, 1)]
    ctex = mesh.corner_tex
    if ctex is not None:
        ctex = ctex.copy()
        ctex[flip] = ctex[flip][:, (0, 2, 1)]
    return Mesh(mesh.vertices, faces, corner_uv=cuv, corner_tex=ctex,
                texture_paths=mesh.texture_paths, source_vertices=mesh.source_vertices)


# ----------------------------------------------------------------------
# non-manifold repair

def _sector_groups(mesh: Mesh, vid: int, cut: frozenset, paired=None) -> list:
    """Incident-face groups around vid, linked through shared 2-face edges at
    vid that are not in ``cut``.  ``paired`` optionally links one face pair
    across a non-manifold edge (key -> (fa, fb)).  Groups sorted by smallest
    face id."""
    inc = list(mesh.vertex_faces()[vid])
    if not inc:
        return []
    counts = mesh.edge_face_counts()
    eidx = mesh.edge_index()
    by_other = {}
    for f in inc:
        for w in mesh.faces[f]:
            w = int(w)
            if w != vid:
                by_other.setdefault(w, []).append(f)
    adj = {f: [] for f in inc}
    for w, fl in by_other.items():
        key = (min(vid, w), max(vid, w))
        if key in cut:
            continue
        if counts[eidx[key]] == 2 and len(fl) == 2:
            adj[fl[0]].append(fl[1])
            adj[fl[1]].append(fl[0])
        elif paired and key in paired:
            fa, fb = paired[key]
            if fa in adj and fb in adj:
                adj[fa].append(fb)
                adj[fb].append(fa)
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
    groups.sort(key=lambda g: g[0])
    return groups


def _split_vertex_sectors(mesh: Mesh, vids, cut: frozenset, paired=None) -> Mesh:
    """Duplicate each listed vertex once per face sector beyond the first.
    The sector containing the smallest face id keeps the original id."""
    faces = mesh.faces.copy()
    new_pos = []
    new_src = []
    changed = False
    for vid in sorted(int(v) for v in vids):
        groups = _sector_groups(mesh, vid, cut, paired)
        for grp in groups[1:]:
            new_id = len(mesh.vertices) + len(new_pos)
            new_pos.append(mesh.vertices[vid])
            new_src.append(mesh.source_vertices[vid])
            for f in grp:
                slot = np.nonzero(faces[f] == vid)[0]
                faces[f, slot] = new_id
            changed = True
    if not changed:
        return mesh
    verts = np.vstack([mesh.vertices, np.asarray(new_pos)])
    src = np.concatenate([mesh.source_vertices, np.asarray(new_src, dtype=np.int64)])
    return Mesh(verts, faces, corner_uv=mesh.corner_uv, corner_tex=mesh.corner_tex,
                texture_paths=mesh.texture_paths, source_vertices=src)


def fix_nonmanifold(mesh: Mesh) -> Mesh:
    """Slice non-manifold vertices and edges, then orient consistently.

    Edges bordered by three or more faces are multiplied into per-sector
    copies; vertices whose incident faces form several fans are duplicated
    once per fan.  Already-manifold, consistently oriented input is returned
    unchanged (same object).
    """
    m = mesh
    for _ in range(10):
        counts = m.edge_face_counts()
        suspect = set()
        paired = {}
        if counts.size and counts.max() > 2:
            bad_rows = np.nonzero(counts > 2)[0]
            edges = m.edge_array()
            he_edge = m.halfedge_edge()
            o = m.faces.reshape(-1)
            by_row = {int(r): [] for r in bad_rows}
            for h in range(3 * len(m.faces)):
                r = int(he_edge[h])
                if r in by_row:
                    by_row[r].append(h)
            for r, sides in by_row.items():
                a, b = int(edges[r, 0]), int(edges[r, 1])
                fwd = sorted(h // 3 for h in sides if o[h] == a)
                rev = sorted(h // 3 for h in sides if o[h] == b)
                if fwd and rev:
                    # keep one opposite-direction face pair glued per edge;
                    # every other incident face separates into its own copy
                    paired[(a, b)] = (fwd[0], rev[0])
                suspect.update((a, b))
        for vid in range(len(m.vertices)):
            if vid in suspect:
                continue
            if len(m.vertex_face_groups(vid)) > 1:
                suspect.add(vid)
        if not suspect:
            break
        m = _split_vertex_sectors(m, suspect, frozenset(), paired)
    else:
        raise TopologyError("non-manifold repair did not converge")
    if not m.is_edge_manifold() or not m.is_vertex_manifold():
        raise TopologyError("non-manifold configuration could not be sliced apart")
    return orient_consistently(m)


# ----------------------------------------------------------------------
# hole filling

def _boundary_he_index(mesh: Mesh):
    twin = mesh.halfedge_twins()
    o = mesh.faces.reshape(-1)
    d = mesh.faces[:, (1, 2, 0)].reshape(-1)
    idx = {}
    for h in np.nonzero(twin < 0)[0]:
        idx[(int(o[h]), int(d[h]))] = int(h)
    return idx


def _fill_hole(mesh: Mesh, loop: BoundaryLoop):
    """Fill one boundary loop with a centroid fan; returns (mesh, new_vid)."""
    n = len(loop)
    if n < 3:
        raise MeshError("cannot fill a loop with fewer than 3 vertices")
    bidx = _boundary_he_index(mesh)
    lv = [int(v) for v in loop.vertices]
    donors = []
    for i in range(n):
        a, b = lv[i], lv[(i + 1) % n]
        h = bidx.get((a, b))  # loops follow the boundary walk order
        if h is None:
            raise MeshError(f"loop edge ({a}, {b}) is not a boundary edge of this mesh")
        donors.append(h)
    new_vid = len(mesh.vertices)
    centroid = mesh.vertices[np.asarray(lv)].mean(axis=0)
    verts = np.vstack([mesh.vertices, centroid[None, :]])
    src = np.concatenate([mesh.source_vertices, [-1]])
    # fan edges run against the walk direction to keep orientation consistent
    fan = np.array([(new_vid, lv[(i + 1) % n], lv[i]) for i in range(n)], dtype=np.int64)
    faces = np.vstack([mesh.faces, fan])

    cuv = mesh.corner_uv
    ctex = mesh.corner_tex
    if cuv is not None:
        fan_uv = np.full((n, 3, 2), np.nan)
        fan_tex = np.full((n, 3), -1, dtype=np.int64)
        for i in range(n):
            fd = donors[i] // 3
            a, b = lv[i], lv[(i + 1) % n]
            sa = int(np.nonzero(mesh.faces[fd] == a)[0][0])
            sb = int(np.nonzero(mesh.faces[fd] == b)[0][0])
            fan_uv[i, 1] = cuv[fd, sb]
            fan_uv[i, 2] = cuv[fd, sa]
            if ctex is not None:
                fan_tex[i, 1] = ctex[fd, sb]
                fan_tex[i, 2] = ctex[fd, sa]
        cuv = np.vstack([cuv, fan_uv])
        if ctex is not None:
            ctex = np.vstack([ctex, fan_tex])
    out = Mesh(verts, faces, corner_uv=cuv, corner_tex=ctex,
               texture_paths=mesh.texture_paths, source_vertices=src)
    return out, new_vid


def fill_hole(mesh: Mesh, loop: BoundaryLoop) -> Mesh:
    """Close one boundary loop with a fan around its centroid.

    The new vertex carries no original UV; the fan corners at the new vertex
    are marked color-undefined and get their color from the dilation pass at
    bake time.
    """
    out, _ = _fill_hole(mesh, loop)
    return out


# ----------------------------------------------------------------------
# slicing along edge sets

def slice_edges(mesh: Mesh, edges) -> Mesh:
    """Cut the surface open along a set of interior edges.

    Every vertex touched by the cut is split into one copy per remaining
    face sector; faces are reassigned accordingly.  Face count never changes.
    Path endpoints (one incident cut edge) are not duplicated, which matches
    slicing semantics: only interior cut vertices separate.
    """
    cut = frozenset((min(int(a), int(b)), max(int(a), int(b))) for a, b in edges)
    if not cut:
        return mesh
    counts = mesh.edge_face_counts()
    eidx = mesh.edge_index()
    for key in cut:
        row = eidx.get(key)
        if row is None:
            raise MeshError(f"cut edge {key} does not exist in the mesh")
        if counts[row] != 2:
            raise MeshError(f"cut edge {key} is not an interior manifold edge")
    touched = sorted({v for e in cut for v in e})
    return _split_vertex_sectors(mesh, touched, cut)


# ----------------------------------------------------------------------
# homology basis (tree-cotree with local loop shortening)

@dataclass
class HomologyLoop:
    """Closed vertex-simple edge cycle on the mesh."""
    vertices: list = field(default_factory=list)
    length: float = 0.0

    def __len__(self):
        return len(self.vertices)

    @property
    def edges(self):
        v = self.vertices
        n = len(v)
        return [(v[i], v[(i + 1) % n]) for i in range(n)]


def _vertex_adjacency(mesh: Mesh):
    e = mesh.edge_array()
    adj = [[] for _ in range(len(mesh.vertices))]
    for a, b in e:
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    return [sorted(x) for x in adj]


def _primal_tree(mesh: Mesh, adj):
    """BFS spanning tree from vertex 0; returns parent array (root's parent
    is itself) and the set of tree edge keys."""
    from collections import deque
    n = len(mesh.vertices)
    parent = np.full(n, -1, dtype=np.int64)
    parent[0] = 0
    tree = set()
    q = deque([0])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if parent[w] < 0:
                parent[w] = u
                tree.add((min(u, w), max(u, w)))
                q.append(w)
    if (parent < 0).any():
        raise TopologyError("mesh is disconnected")
    return parent, tree


def _tree_path(parent, u, v):
    """Unique path from u to v through the spanning tree, as a vertex list."""
    anc_u = []
    x = int(u)
    while True:
        anc_u.append(x)
        if parent[x] == x:
            break
        x = int(parent[x])
    up_set = set(anc_u)
    path_v = []
    y = int(v)
    while y not in up_set:
        path_v.append(y)
        y = int(parent[y])
    lca = y
    path = anc_u[:anc_u.index(lca) + 1]
    path.extend(reversed(path_v))
    return path


def _cycle_length(pos, cycle):
    p = pos[np.asarray(cycle)]
    return float(np.linalg.norm(p - np.roll(p, -1, axis=0), axis=1).sum())


def _shorten_cycle(mesh: Mesh, adj, cycle, max_moves=None):
    """Greedy local shortening, keeping the cycle vertex-simple.

    Two moves: drop a vertex when the chord edge exists and is shorter, and
    slide a vertex across a quad of two triangles when that is shorter.
    Stops at a local minimum: no single move gives a strict improvement.
    """
    pos = mesh.vertices
    edge_keys = {(int(a), int(b)) for a, b in mesh.edge_array()}
    neigh = [set(x) for x in adj]
    if max_moves is None:
        max_moves = 60 * len(cycle) + 200
    moves = 0
    improved = True
    while improved and moves < max_moves:
        improved = False
        n = len(cycle)
        if n <= 3:
            break
        in_cycle = set(cycle)
        for i in range(n):
            a = cycle[i]
            b = cycle[(i + 1) % n]
            c = cycle[(i + 2) % n]
            if a == c:
                continue
            lab = float(np.linalg.norm(pos[a] - pos[b]))
            lbc = float(np.linalg.norm(pos[b] - pos[c]))
            old = lab + lbc
            key = (min(a, c), max(a, c))
            if key in edge_keys:
                lac = float(np.linalg.norm(pos[a] - pos[c]))
                if lac < old * (1 - 1e-12) and len(cycle) > 3:
                    del cycle[(i + 1) % n]
                    improved = True
                    moves += 1
                    break
            best_d, best_len = -1, old
            for d in sorted(neigh[a] & neigh[c]):
                if d == b or d in in_cycle:
                    continue
                cand = (float(np.linalg.norm(pos[a] - pos[d]))
                        + float(np.linalg.norm(pos[d] - pos[c])))
                if cand < best_len * (1 - 1e-12):
                    best_len = cand
                    best_d = d
            if best_d >= 0:
                cycle[(i + 1) % n] = best_d
                improved = True
                moves += 1
                break
    return cycle


def homology_basis(mesh: Mesh) -> list:
    """2g independent generator loops of a closed genus-g mesh.

    Tree-cotree construction: a primal spanning tree plus a dual spanning
    tree avoiding primal tree edges leave exactly 2g edges, each closing a
    unique cycle through the primal tree.  Cycles are locally shortened and
    returned sorted by ascending length.
    """
    mesh.validate_manifold()
    if bool((mesh.halfedge_twins() < 0).any()):
        raise TopologyError("homology basis requires a closed mesh; fill holes first")
    labels = mesh.face_components()
    if labels.size and labels.max() > 0:
        raise TopologyError("homology basis requires a connected mesh")

    adj = _vertex_adjacency(mesh)
    parent, tree = _primal_tree(mesh, adj)

    from collections import deque
    twin = mesh.halfedge_twins()
    he_edge = mesh.halfedge_edge()
    edges = mesh.edge_array()
    F = len(mesh.faces)
    in_tree = np.zeros(len(edges), dtype=bool)
    eidx = mesh.edge_index()
    for a, b in tree:
        in_tree[eidx[(a, b)]] = True

    visited = np.zeros(F, dtype=bool)
    dual_used = np.zeros(len(edges), dtype=bool)
    visited[0] = True
    q = deque([0])
    while q:
        f = q.popleft()
        for k in range(3):
            h = 3 * f + k
            t = twin[h]
            if t < 0:
                continue
            row = he_edge[h]
            if in_tree[row]:
                continue
            g = int(t) // 3
            if not visited[g]:
                visited[g] = True
                dual_used[row] = True
                q.append(g)
    if not visited.all():
        raise TopologyError("dual graph traversal failed; mesh is not a closed surface")

    leftover = np.nonzero(~in_tree & ~dual_used)[0]
    genus = mesh.genus()
    if len(leftover) != 2 * genus:
        raise TopologyError(f"tree-cotree leftover count {len(leftover)} != 2g = {2 * genus}")

    pos = mesh.vertices
    loops = []
    for row in leftover:
        u, v = int(edges[row, 0]), int(edges[row, 1])
        cycle = _tree_path(parent, u, v)
        cycle = _shorten_cycle(mesh, adj, cycle)
        loops.append(HomologyLoop(vertices=list(cycle),
                                  length=_cycle_length(pos, cycle)))
    loops.sort(key=lambda lp: (lp.length, lp.vertices))
    return loops


def tree_cotree_leftover_count(mesh: Mesh) -> int:
    """Number of edges outside both the primal and the dual spanning tree."""
    return len(homology_basis(mesh))


# ----------------------------------------------------------------------
# handle removal

def remove_small_handles(mesh: Mesh, max_loop_length: float = 0.02) -> Mesh:
    """Remove handles whose generator loop is shorter than
    ``max_loop_length`` times the bounding-box diagonal.

    Each round cuts the mesh along the shortest qualifying loop and fills
    both resulting boundary copies, reducing the genus by one, then
    recomputes the basis until no loop is below the threshold.
    """
    if max_loop_length <= 0:
        raise ValueError("handle threshold must be positive")
    m = mesh
    while True:
        g = m.genus()
        if g == 0:
            return m
        threshold = max_loop_length * m.bbox_diagonal()
        basis = homology_basis(m)
        short = [lp for lp in basis if lp.length < threshold]
        if not short:
            return m
        loop = short[0]
        cut = slice_edges(m, loop.edges)
        new_loops = cut.boundary_loops()
        if len(new_loops) != 2:
            raise TopologyError("cutting a generator loop did not open two boundaries")
        filled = fill_hole(cut, new_loops[0])
        filled = fill_hole(filled, new_loops[1])
        g_after = filled.genus()
        if g_after != g - 1:
            raise TopologyError("handle removal did not reduce the genus")
        logger.info("removed handle loop of length %.4g (threshold %.4g)",
                    loop.length, threshold)
        m = filled


# ----------------------------------------------------------------------
# cut graph and cutting to a disk

@dataclass
class CutGraph:
    """Edge set whose slicing turns a closed mesh into a topological disk."""
    edges: list

    @property
    def edge_count(self):
        return len(self.edges)

    def node_degrees(self):
        deg = {}
        for a, b in self.edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        return deg


def cut_graph(mesh: Mesh) -> CutGraph:
    """Cut graph of a closed mesh: edges whose dual edge is not in a dual
    spanning tree, iteratively pruned of degree-1 nodes."""
    mesh.validate_manifold()
    if bool((mesh.halfedge_twins() < 0).any()):
        raise TopologyError("cut graph requires a closed mesh")
    from collections import deque
    twin = mesh.halfedge_twins()
    he_edge = mesh.halfedge_edge()
    edges = mesh.edge_array()
    F = len(mesh.faces)
    visited = np.zeros(F, dtype=bool)
    dual_used = np.zeros(len(edges), dtype=bool)
    visited[0] = True
    q = deque([0])
    while q:
        f = q.popleft()
        for k in range(3):
            h = 3 * f + k
            t = twin[h]
            if t < 0:
                continue
            g = int(t) // 3
            if not visited[g]:
                visited[g] = True
                dual_used[he_edge[h]] = True
                q.append(g)
    if not visited.all():
        raise TopologyError("mesh is disconnected")
    keep = ~dual_used
    # prune leaves
    deg = {}
    inc = {}
    for row in np.nonzero(keep)[0]:
        a, b = int(edges[row, 0]), int(edges[row, 1])
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
        inc.setdefault(a, set()).add(row)
        inc.setdefault(b, set()).add(row)
    queue = deque(sorted(v for v, k in deg.items() if k == 1))
    alive = set(np.nonzero(keep)[0].tolist())
    while queue:
        v = queue.popleft()
        if deg.get(v, 0) != 1:
            continue
        row = min(r for r in inc[v] if r in alive)
        alive.discard(row)
        a, b = int(edges[row, 0]), int(edges[row, 1])
        for w in (a, b):
            deg[w] -= 1
            inc[w].discard(row)
            if deg[w] == 1:
                queue.append(w)
    out = sorted((int(edges[r, 0]), int(edges[r, 1])) for r in alive)
    return CutGraph(edges=out)


def _shortest_slit(mesh: Mesh):
    """Two-edge path used to open a closed genus-0 surface, chosen near the
    bounding-box center for determinism."""
    edges = mesh.edge_array()
    mid = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    d = np.linalg.norm(mid - mesh.bbox_center(), axis=1)
    row = int(np.argmin(d))
    a, b = int(edges[row, 0]), int(edges[row, 1])
    adj = _vertex_adjacency(mesh)
    best_w, best_len = -1, np.inf
    for w in adj[b]:
        if w == a:
            continue
        ln = float(np.linalg.norm(mesh.vertices[b] - mesh.vertices[w]))
        if ln < best_len:
            best_len, best_w = ln, w
    if best_w < 0:
        raise TopologyError("cannot find a slit path")
    return [(a, b), (b, best_w)]


def cut_to_disk(mesh: Mesh) -> Mesh:
    """Reduce a manifold connected mesh to genus 0 with exactly one boundary.

    Already-disk input is returned unchanged.  Extra boundaries are filled
    (keeping the longest), positive genus is opened along the cut graph, and
    a closed genus-0 surface gets a minimal two-edge slit.
    """
    labels = mesh.face_components()
    if labels.size and labels.max() > 0:
        raise TopologyError("cut_to_disk requires a connected mesh; split components first")
    mesh.validate_manifold()
    g = mesh.genus()
    loops = mesh.boundary_loops()
    b = len(loops)
    if g == 0 and b == 1:
        return mesh
    m = mesh
    if g == 0:
        if b == 0:
            m = slice_edges(m, _shortest_slit(m))
        else:
            for lp in loops[1:]:  # keep the longest boundary
                m = fill_hole(m, lp)
    else:
        for lp in loops:  # close everything, then cut along the graph
            m = fill_hole(m, lp)
        graph = cut_graph(m)
        if not graph.edges:
            raise TopologyError("empty cut graph on a positive-genus mesh")
        deg = graph.node_degrees()
        if any(k == 1 for k in deg.values()):
            raise TopologyError("cut graph still has a degree-1 node after pruning")
        m = slice_edges(m, graph.edges)
    g2 = m.genus()
    b2 = len(m.boundary_loops())
    if g2 != 0 or b2 != 1:
        raise TopologyError(f"cutting failed to produce a disk (g={g2}, b={b2})")
    return m


# ----------------------------------------------------------------------
# full repair sequence

@dataclass
class RepairStats:
    input_genus: int = 0
    input_boundaries: int = 0
    holes_filled: int = 0
    handles_removed: int = 0
    cut_opened: bool = False


def _reopen_fans(mesh: Mesh, centers) -> Mesh:
    """Delete the given fan-center vertices and their incident faces,
    restoring the boundaries that were temporarily closed."""
    centers = set(int(c) for c in centers)
    keep = np.ones(len(mesh.faces), dtype=bool)
    v2f = mesh.vertex_faces()
    for c in centers:
        keep[v2f[c]] = False
    faces = mesh.faces[keep]
    used = np.unique(faces)
    remap = np.full(len(mesh.vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return Mesh(mesh.vertices[used], remap[faces],
                corner_uv=None if mesh.corner_uv is None else mesh.corner_uv[keep],
                corner_tex=None if mesh.corner_tex is None else mesh.corner_tex[keep],
                texture_paths=mesh.texture_paths,
                source_vertices=mesh.source_vertices[used])


def repair_component(mesh: Mesh, max_hole_edges: int = 100,
                     handle_threshold: float = 0.02,
                     denoise: bool = True, fill: bool = True):
    """Full repair of one face-connected component.

    Non-manifold slicing can split the component further, so this returns a
    list of (disk_mesh, RepairStats) pairs, one per resulting piece.
    """
    m = fix_nonmanifold(mesh)
    pieces = m.split_components()
    out = []
    for piece in pieces:
        stats = RepairStats()
        loops = piece.boundary_loops()
        stats.input_boundaries = len(loops)
        stats.input_genus = piece.genus()
        if fill and len(loops) > 1:
            for lp in loops[1:]:  # never the longest boundary of an open piece
                if len(lp) <= max_hole_edges:
                    piece = fill_hole(piece, lp)
                    stats.holes_filled += 1
        if denoise:
            g_before = piece.genus()
            if g_before > 0:
                open_loops = piece.boundary_loops()
                if open_loops:
                    temp_centers = []
                    for lp in open_loops:
                        piece, vid = _fill_hole(piece, lp)
                        temp_centers.append(vid)
                    piece = remove_small_handles(piece, handle_threshold)
                    piece = _reopen_fans(piece, temp_centers)
                else:
                    piece = remove_small_handles(piece, handle_threshold)
                stats.handles_removed = g_before - piece.genus()
        b_now = len(piece.boundary_loops())
        g_now = piece.genus()
        disk = cut_to_disk(piece)
        stats.cut_opened = not (g_now == 0 and b_now == 1)
        out.append((disk, stats))
    return out
