"""Synthetic meshes and textures for tests, demos, and benchmarks."""

from __future__ import annotations

import numpy as np
from scipy.spatial import Delaunay

from .image import TextureImage
from .mesh import Mesh


def _ccw2d(points, faces):
    """Reorient triangles counter-clockwise in the xy plane."""
    faces = np.asarray(faces, dtype=np.int64)
    p = points[:, :2]
    a, b, c = p[faces[:, 0]], p[faces[:, 1]], p[faces[:, 2]]
    det = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    flip = det < 0
    faces[flip] = faces[flip][:, (0, 2, 1)]
    return faces


def grid_mesh(n: int, with_uv: bool = True, tex: int = 0) -> Mesh:
    """Flat (n+1)x(n+1) vertex grid on the unit square in z=0.

    Triangulated with the same diagonal everywhere; corner UVs equal the
    vertex xy position (an identity atlas).
    """
    if n < 1:
        raise ValueError("grid needs n >= 1 cells per side")
    xs = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(xs, xs, indexing="xy")
    verts = np.column_stack([xx.ravel(), yy.ravel(), np.zeros((n + 1) ** 2)])
    faces = []
    for j in range(n):
        for i in range(n):
            v00 = j * (n + 1) + i
            v10 = v00 + 1
            v01 = v00 + (n + 1)
            v11 = v01 + 1
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    faces = np.asarray(faces, dtype=np.int64)
    corner_uv = corner_tex = None
    if with_uv:
        corner_uv = verts[faces][:, :, :2].copy()
        corner_tex = np.full(faces.shape, tex, dtype=np.int64)
    return Mesh(verts, faces, corner_uv=corner_uv, corner_tex=corner_tex)


def wheel_mesh(k: int) -> Mesh:
    """One center vertex surrounded by a k-gon rim (k >= 3), flat in z=0."""
    ang = 2 * np.pi * np.arange(k) / k
    rim = np.column_stack([np.cos(ang), np.sin(ang), np.zeros(k)])
    verts = np.vstack([[[0.0, 0.0, 0.0]], rim])
    faces = [(0, 1 + i, 1 + (i + 1) % k) for i in range(k)]
    return Mesh(verts, np.asarray(faces))


def tetrahedron() -> Mesh:
    verts = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 1.0, 0.0],
        [0.5, 0.35, 1.0],
    ])
    faces = np.array([
        [0, 2, 1],
        [0, 1, 3],
        [1, 2, 3],
        [2, 0, 3],
    ])
    return Mesh(verts, faces)


def random_disk_mesh(n_interior: int, seed: int = 0, bump: float = 0.25,
                     n_boundary: int | None = None) -> Mesh:
    """Delaunay-triangulated disk with a circular boundary and a smooth bump.

    The triangulation of random interior points plus a boundary ring is a
    topological disk by construction.
    """
    rng = np.random.default_rng(seed)
    if n_boundary is None:
        n_boundary = max(12, int(2.0 * np.sqrt(max(n_interior, 1))))
    ang = 2 * np.pi * np.arange(n_boundary) / n_boundary
    ring = np.column_stack([np.cos(ang), np.sin(ang)])
    pts = []
    while len(pts) < n_interior:
        cand = rng.uniform(-1.0, 1.0, size=(n_interior * 2, 2))
        keep = cand[np.hypot(cand[:, 0], cand[:, 1]) < 0.96]
        pts.extend(keep.tolist())
    interior = np.asarray(pts[:n_interior])
    p2 = np.vstack([ring, interior]) if n_interior else ring
    tri = Delaunay(p2)
    faces = _ccw2d(np.column_stack([p2, np.zeros(len(p2))]), tri.simplices)
    r2 = p2[:, 0] ** 2 + p2[:, 1] ** 2
    z = bump * np.exp(-2.5 * r2)
    verts = np.column_stack([p2, z])
    return Mesh(verts, faces)


def torus_mesh(n_major: int = 24, n_minor: int = 12,
               r_major: float = 1.0, r_minor: float = 0.35) -> Mesh:
    """Closed genus-1 torus grid."""
    if n_major < 3 or n_minor < 3:
        raise ValueError("torus needs at least 3 segments per direction")
    verts = np.empty((n_major * n_minor, 3))
    for i in range(n_major):
        a = 2 * np.pi * i / n_major
        for j in range(n_minor):
            b = 2 * np.pi * j / n_minor
            r = r_major + r_minor * np.cos(b)
            verts[i * n_minor + j] = (r * np.cos(a), r * np.sin(a), r_minor * np.sin(b))
    faces = []
    for i in range(n_major):
        i2 = (i + 1) % n_major
        for j in range(n_minor):
            j2 = (j + 1) % n_minor
            v00 = i * n_minor + j
            v01 = i * n_minor + j2
            v10 = i2 * n_minor + j
            v11 = i2 * n_minor + j2
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    return Mesh(verts, np.asarray(faces))


def thin_handle_torus(ratio: float = 0.005, n_major: int = 48, n_minor: int = 8) -> Mesh:
    """Torus whose tube circumference is a tiny fraction of the bbox diagonal."""
    return torus_mesh(n_major=n_major, n_minor=n_minor, r_major=1.0, r_minor=ratio)


def plate_with_holes(n_holes: int, cells_per_hole: int = 4) -> Mesh:
    """Closed surface of genus ``n_holes``: a thin slab with square through-holes.

    Built from a quad grid plate (top + bottom sheets) with ``n_holes``
    removed cells, joined by side walls around the outer rim and each hole.
    """
    if n_holes < 0:
        raise ValueError("n_holes must be >= 0")
    nx = max(3, n_holes * (cells_per_hole + 2) + 2)
    ny = cells_per_hole + 4
    hole_cells = set()
    for h in range(n_holes):
        cx = 2 + h * (cells_per_hole + 2)
        for di in range(cells_per_hole):
            for dj in range(cells_per_hole):
                hole_cells.add((cx + di, 2 + dj))

    def vid(i, j, layer):
        return layer * (nx + 1) * (ny + 1) + j * (nx + 1) + i

    verts = []
    for layer, z in ((0, 0.0), (1, 0.12)):
        for j in range(ny + 1):
            for i in range(nx + 1):
                verts.append((i / nx, j / ny, z))
    faces = []

    def quad(a, b, c, d):
        faces.append((a, b, c))
        faces.append((a, c, d))

    for j in range(ny):
        for i in range(nx):
            if (i, j) in hole_cells:
                continue
            # bottom sheet faces down, top sheet faces up
            quad(vid(i, j, 0), vid(i, j + 1, 0), vid(i + 1, j + 1, 0), vid(i + 1, j, 0))
            quad(vid(i, j, 1), vid(i + 1, j, 1), vid(i + 1, j + 1, 1), vid(i, j + 1, 1))

    def cell_solid(i, j):
        return 0 <= i < nx and 0 <= j < ny and (i, j) not in hole_cells

    # walls wherever a solid cell borders a missing/outside cell
    for j in range(ny):
        for i in range(nx):
            if not cell_solid(i, j):
                continue
            if not cell_solid(i - 1, j):
                quad(vid(i, j, 0), vid(i, j, 1), vid(i, j + 1, 1), vid(i, j + 1, 0))
            if not cell_solid(i + 1, j):
                quad(vid(i + 1, j + 1, 0), vid(i + 1, j + 1, 1), vid(i + 1, j, 1), vid(i + 1, j, 0))
            if not cell_solid(i, j - 1):
                quad(vid(i + 1, j, 0), vid(i + 1, j, 1), vid(i, j, 1), vid(i, j, 0))
            if not cell_solid(i, j + 1):
                quad(vid(i, j + 1, 0), vid(i, j + 1, 1), vid(i + 1, j + 1, 1), vid(i + 1, j + 1, 0))
    mesh = Mesh(np.asarray(verts, dtype=float), np.asarray(faces))
    # drop grid vertices that ended up inside holes / unused
    return mesh.split_components()[0]


def hemisphere_mesh(rings: int = 24, segments: int = 48, tex: int = 0) -> Mesh:
    """Open hemisphere (disk topology) with an orthographic source atlas.

    Corner UVs project (x, y) in [-1, 1]^2 onto [0, 1]^2.
    """
    verts = [(0.0, 0.0, 1.0)]
    for r in range(1, rings + 1):
        phi = 0.5 * np.pi * r / rings
        s, c = np.sin(phi), np.cos(phi)
        for k in range(segments):
            a = 2 * np.pi * k / segments
            verts.append((s * np.cos(a), s * np.sin(a), c))
    faces = []
    for k in range(segments):
        faces.append((0, 1 + k, 1 + (k + 1) % segments))
    for r in range(1, rings):
        base0 = 1 + (r - 1) * segments
        base1 = 1 + r * segments
        for k in range(segments):
            k2 = (k + 1) % segments
            faces.append((base0 + k, base1 + k, base1 + k2))
            faces.append((base0 + k, base1 + k2, base0 + k2))
    verts = np.asarray(verts)
    faces = np.asarray(faces, dtype=np.int64)
    uv = 0.5 * (verts[faces][:, :, :2] + 1.0)
    return Mesh(verts, faces, corner_uv=uv,
                corner_tex=np.full(faces.shape, tex, dtype=np.int64))


def vase_mesh(rings: int = 28, segments: int = 36, tex: int = 0) -> Mesh:
    """Open vase: surface of revolution, closed bottom, open rim.

    The source atlas is a cylindrical chart with a vertical seam, so corner
    UVs are genuinely per-corner (they disagree across the seam).
    """
    heights = np.linspace(0.0, 1.0, rings + 1)
    radii = 0.32 + 0.16 * np.sin(np.pi * heights) + 0.06 * np.sin(3.1 * np.pi * heights)
    verts = [(0.0, 0.0, 0.0)]
    for r, (h, rad) in enumerate(zip(heights, radii)):
        for k in range(segments):
            a = 2 * np.pi * k / segments
            verts.append((rad * np.cos(a), rad * np.sin(a), h))
    verts = np.asarray(verts)

    def ring_vid(r, k):
        return 1 + r * segments + k % segments

    faces = []
    for k in range(segments):
        faces.append((0, ring_vid(0, k + 1), ring_vid(0, k)))
    for r in range(rings):
        for k in range(segments):
            v00 = ring_vid(r, k)
            v01 = ring_vid(r, k + 1)
            v10 = ring_vid(r + 1, k)
            v11 = ring_vid(r + 1, k + 1)
            faces.append((v00, v01, v11))
            faces.append((v00, v11, v10))
    faces = np.asarray(faces, dtype=np.int64)

    def cyl_uv(vid, wrap_hint):
        x, y, z = verts[vid]
        if vid == 0:
            return (0.0, 0.0)
        k = (vid - 1) % segments
        u = k / segments
        if wrap_hint and k == 0:
            u = 1.0  # seam corner duplicated at u=1
        return (u, z)

    uv = np.zeros((len(faces), 3, 2))
    for fi, f in enumerate(faces):
        ks = [(v - 1) % segments if v else 0 for v in f]
        wrap = max(ks) - min(ks) > segments // 2
        for ci, v in enumerate(f):
            hint = wrap and ((v - 1) % segments if v else 0) == 0
            uv[fi, ci] = cyl_uv(int(v), hint)
    return Mesh(verts, faces, corner_uv=uv,
                corner_tex=np.full(faces.shape, tex, dtype=np.int64))


def bowtie_mesh() -> Mesh:
    """Two triangles sharing exactly one vertex (non-manifold vertex)."""
    verts = np.array([
        [0.0, 0.0, 0.0],
        [-1.0, 0.5, 0.0],
        [-1.0, -0.5, 0.0],
        [1.0, 0.5, 0.0],
        [1.0, -0.5, 0.0],
    ])
    faces = np.array([[0, 1, 2], [0, 4, 3]])
    return Mesh(verts, faces)


def fin_mesh() -> Mesh:
    """A quad sheet with an extra fin face attached along an interior edge,
    producing a 3-face edge."""
    verts = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.5, 0.5, 1.0],
    ])
    faces = np.array([
        [0, 1, 2],
        [0, 2, 3],
        [0, 2, 4],
    ])
    return Mesh(verts, faces)


def checkerboard_texture(size: int = 256, cell: int = 32,
                         color_a=(20, 20, 20, 255), color_b=(235, 235, 235, 255)) -> TextureImage:
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    board = ((xx // cell) + (yy // cell)) % 2
    px = np.where(board[..., None] == 0,
                  np.asarray(color_a, dtype=np.uint8),
                  np.asarray(color_b, dtype=np.uint8)).astype(np.uint8)
    return TextureImage(size, size, px)


def gradient_texture(size: int = 256) -> TextureImage:
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    px = np.zeros((size, size, 4), dtype=np.uint8)
    px[..., 0] = (255 * xx / max(size - 1, 1)).astype(np.uint8)
    px[..., 1] = (255 * yy / max(size - 1, 1)).astype(np.uint8)
    px[..., 2] = 96
    px[..., 3] = 255
    return TextureImage(size, size, px)
