"""Texture generation: scan-line triangle filling in the new UV domain,
color transfer from the source atlases, and the dilation post-pass.

Coverage rule: a pixel belongs to a triangle when its center passes the
edge-function test; centers exactly on an edge are resolved by a top-left
convention (accept when the edge points up in v, or left along a horizontal
edge).  The rule is a consistent tie-break, so triangles tiling the UV plane
claim every pixel center exactly once.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .harmonic import ParamCoords
from .image import TextureImage
from .mesh import Mesh, MeshError

logger = logging.getLogger(__name__)

DILATION_ROUNDS = 16
UNDEFINED_FILL = (128, 128, 128, 255)


class RasterError(MeshError):
    """Invalid rasterization input."""


@dataclass(frozen=True)
class RasterPoint:
    """A sample carrying both UV sets and its source texture index.

    Coordinates are clamped into [0, 1] at creation.
    """
    u_new: float
    v_new: float
    u_ori: float
    v_ori: float
    tex: int = 0

    def __post_init__(self):
        for name in ("u_new", "v_new", "u_ori", "v_ori"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise RasterError(f"{name} is not finite")
            object.__setattr__(self, name, min(1.0, max(0.0, float(val))))


def _edge_tie(dx: float, dy: float) -> bool:
    """Accept a pixel center lying exactly on this edge?  True for edges
    pointing up in v, or leftward when horizontal (top-left convention)."""
    return dy > 0 or (dy == 0 and dx < 0)


def _scan_triangle(corners: np.ndarray, res_x: int, res_y: int):
    """Scan-line coverage of one triangle given in pixel-space coordinates.

    Walks the scan rows between the triangle's v-range, intersects each row
    with the triangle edges, keeps the interior segment (odd-even pairing of
    the sorted crossings), and resolves pixel-center membership at the
    segment ends with the exact edge-function test.

    Returns (cols, rows, bary) where bary is (N, 3) in the input corner
    order; empty arrays for degenerate triangles.
    """
    c = np.asarray(corners, dtype=np.float64).reshape(3, 2)
    area2 = (c[1, 0] - c[0, 0]) * (c[2, 1] - c[0, 1]) \
        - (c[1, 1] - c[0, 1]) * (c[2, 0] - c[0, 0])
    empty = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
             np.empty((0, 3)))
    if area2 == 0.0:
        logger.debug("degenerate triangle skipped")
        return empty
    perm = (0, 1, 2) if area2 > 0 else (0, 2, 1)
    q = c[list(perm)]

    ymin = q[:, 1].min()
    ymax = q[:, 1].max()
    r0 = max(0, math.ceil(ymin - 0.5))
    r1 = min(res_y - 1, math.floor(ymax - 0.5))
    if r1 < r0:
        return empty
    rows = np.arange(r0, r1 + 1, dtype=np.int64)
    ys = rows + 0.5

    xlo = np.full(len(rows), np.inf)
    xhi = np.full(len(rows), -np.inf)
    for i in range(3):
        ax, ay = q[i]
        bx, by = q[(i + 1) % 3]
        if ay == by:
            # a horizontal edge exactly on a scan row contributes its whole
            # x-range as candidates; the edge-function test decides ownership
            on_row = ys == ay
            if on_row.any():
                xlo[on_row] = np.minimum(xlo[on_row], min(ax, bx))
                xhi[on_row] = np.maximum(xhi[on_row], max(ax, bx))
            continue
        crossed = (ay <= ys) != (by <= ys)
        if not crossed.any():
            continue
        x = ax + (ys[crossed] - ay) * (bx - ax) / (by - ay)
        np.clip(x, min(ax, bx), max(ax, bx), out=x)
        xlo[crossed] = np.minimum(xlo[crossed], x)
        xhi[crossed] = np.maximum(xhi[crossed], x)
    hit = xhi >= xlo
    if not hit.any():
        return empty
    rows, ys, xlo, xhi = rows[hit], ys[hit], xlo[hit], xhi[hit]

    # candidate columns with a one-pixel margin; the exact test below decides
    c_first = np.maximum(np.floor(xlo - 0.5).astype(np.int64) - 1, 0)
    c_last = np.minimum(np.ceil(xhi - 0.5).astype(np.int64) + 1, res_x - 1)
    counts = np.maximum(c_last - c_first + 1, 0)
    total = int(counts.sum())
    if total == 0:
        return empty
    row_rep = np.repeat(rows, counts)
    y_rep = np.repeat(ys, counts)
    starts = np.repeat(c_first, counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    cols = starts + offs
    xs = cols + 0.5

    e = np.empty((3, total))
    inside = np.ones(total, dtype=bool)
    for i in range(3):
        ax, ay = q[i]
        bx, by = q[(i + 1) % 3]
        dx = bx - ax
        dy = by - ay
        e[i] = dx * (y_rep - ay) - dy * (xs - ax)
        if _edge_tie(dx, dy):
            inside &= e[i] >= 0
        else:
            inside &= e[i] > 0
    if not inside.any():
        return empty
    cols = cols[inside]
    rows_out = row_rep[inside]
    es = e[:, inside]
    s = es.sum(axis=0)
    bary_q = np.stack([es[1], es[2], es[0]]) / s
    bary = np.empty_like(bary_q)
    bary[list(perm), :] = bary_q
    return cols, rows_out, bary.T


def odd_even_inside(point, polygon_edges) -> bool:
    """Odd-even rule: is the point inside the closed polygon?

    Counts crossings of the horizontal ray toward +x.  A vertex exactly on
    the ray is handled by the half-open rule (each edge counts its lower
    endpoint only), which is equivalent to nudging the ray by half a pixel.
    """
    px, py = float(point[0]), float(point[1])
    crossings = 0
    for a, b in polygon_edges:
        ax, ay = float(a[0]), float(a[1])
        bx, by = float(b[0]), float(b[1])
        if (ay <= py) == (by <= py):
            continue
        x = ax + (py - ay) * (bx - ax) / (by - ay)
        if x > px:
            crossings += 1
    return crossings % 2 == 1


def scanline_fill(triangle, resolution: int):
    """Rasterize one triangle of RasterPoint corners at the given square
    resolution.

    Emits one RasterPoint per covered pixel center; (u_ori, v_ori) of each
    point uses the same barycentric coefficients that locate the pixel
    center inside the new-UV triangle.  Degenerate triangles give an empty
    list.
    """
    if resolution < 1:
        raise RasterError("resolution must be >= 1")
    corners = list(triangle)
    if len(corners) != 3:
        raise RasterError("scanline_fill expects exactly three corners")
    tex = {p.tex for p in corners}
    if len(tex) != 1:
        raise RasterError("triangle spans more than one source texture")
    tex = tex.pop()
    px = np.array([[p.u_new * resolution, p.v_new * resolution] for p in corners])
    cols, rows, bary = _scan_triangle(px, resolution, resolution)
    uo = np.array([p.u_ori for p in corners])
    vo = np.array([p.v_ori for p in corners])
    out = []
    for c, r, lam in zip(cols, rows, bary):
        out.append(RasterPoint(
            u_new=(c + 0.5) / resolution,
            v_new=(r + 0.5) / resolution,
            u_ori=float(lam @ uo),
            v_ori=float(lam @ vo),
            tex=tex,
        ))
    return out


def sample_source(atlases, point: RasterPoint, filter: str = "bilinear"):
    """Color of one RasterPoint from its source atlas."""
    if not 0 <= point.tex < len(atlases):
        raise RasterError(f"source texture index {point.tex} out of range")
    img = atlases[point.tex]
    if filter == "nearest":
        return img.sample_nearest(np.array([point.u_ori]), np.array([point.v_ori]))[0]
    if filter == "bilinear":
        return img.sample_bilinear(np.array([point.u_ori]), np.array([point.v_ori]))[0]
    raise ValueError(f"unknown filter {filter!r}")


def _dilate(pixels, defined, max_rounds=DILATION_ROUNDS):
    """Fill undefined pixels from the average of defined 8-neighbors,
    iteratively.  Returns the number of rounds used."""
    rounds = 0
    h, w = defined.shape
    while not defined.all() and rounds < max_rounds:
        acc = np.zeros((h, w, 4), dtype=np.float64)
        cnt = np.zeros((h, w), dtype=np.int64)
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                ys0, ys1 = max(dy, 0), h + min(dy, 0)
                xs0, xs1 = max(dx, 0), w + min(dx, 0)
                yt0, yt1 = max(-dy, 0), h + min(-dy, 0)
                xt0, xt1 = max(-dx, 0), w + min(-dx, 0)
                src_def = defined[ys0:ys1, xs0:xs1]
                acc[yt0:yt1, xt0:xt1] += np.where(
                    src_def[..., None], pixels[ys0:ys1, xs0:xs1], 0)
                cnt[yt0:yt1, xt0:xt1] += src_def
        grow = ~defined & (cnt > 0)
        if not grow.any():
            break
        vals = np.floor(acc[grow] / cnt[grow, None] + 0.5)
        pixels[grow] = np.clip(vals, 0, 255).astype(np.uint8)
        pixels[grow, 3] = 255
        defined[grow] = True
        rounds += 1
    forced = int((~defined).sum())
    if forced:
        logger.warning("%d pixels still undefined after %d dilation rounds; "
                       "filling with mid-gray", forced, max_rounds)
        pixels[~defined] = np.asarray(UNDEFINED_FILL, dtype=np.uint8)
        defined[:] = True
    return rounds, forced


def _box_downsample(pixels, defined, ss):
    """Average ss x ss blocks; a block is defined when any subsample is."""
    h, w = defined.shape
    H, W = h // ss, w // ss
    px = pixels.reshape(H, ss, W, ss, 4).astype(np.float64)
    df = defined.reshape(H, ss, W, ss)
    cnt = df.sum(axis=(1, 3))
    acc = (px * df[:, :, :, :, None]).sum(axis=(1, 3))
    out_def = cnt > 0
    out = np.zeros((H, W, 4), dtype=np.uint8)
    safe = np.maximum(cnt, 1)
    out[out_def] = np.clip(np.floor(acc[out_def] / safe[out_def, None] + 0.5),
                           0, 255).astype(np.uint8)
    return out, out_def


def bake_texture(mesh: Mesh, coords: ParamCoords, atlases, resolution: int,
                 filter: str = "bilinear", aspect=(1, 1), supersample: int = 1) -> TextureImage:
    """Generate the output texture for a parameterized mesh.

    Every face is scan-filled in the new UV domain; pixel colors come from
    the source atlas at the barycentrically matched original UV.  Faces with
    color-undefined corners (filled-hole geometry) claim their pixels but
    leave them undefined; those and any remaining undefined pixels are
    closed by the dilation pass.  Pixel ownership is unique: the first
    claiming face wins, and shared-edge ties follow the top-left rule.

    The returned image carries ``defined`` (all True after dilation) plus
    ``coverage_before_dilation`` and ``dilation_rounds`` attributes.
    """
    if len(mesh.faces) == 0:
        raise RasterError("cannot bake a mesh with zero triangles")
    if resolution < 1:
        raise RasterError("resolution must be >= 1")
    if supersample not in (1, 2, 4):
        raise ValueError("supersample must be 1, 2 or 4")
    if filter not in ("nearest", "bilinear"):
        raise ValueError(f"unknown filter {filter!r}")
    aw, ah = aspect
    if aw <= 0 or ah <= 0:
        raise ValueError("aspect components must be positive")
    uv = coords.uv if isinstance(coords, ParamCoords) else np.asarray(coords)
    if len(uv) != len(mesh.vertices) or not np.isfinite(uv).all():
        raise RasterError("parameterization does not cover every vertex")

    m = max(aw, ah)
    out_w = max(1, round(resolution * aw / m))
    out_h = max(1, round(resolution * ah / m))
    wx, hy = out_w * supersample, out_h * supersample

    pixels = np.zeros((hy, wx, 4), dtype=np.uint8)
    defined = np.zeros((hy, wx), dtype=bool)
    claimed = np.zeros((hy, wx), dtype=bool)

    cuv = mesh.corner_uv
    ctex = mesh.corner_tex
    scale = np.array([wx, hy], dtype=np.float64)
    for f in range(len(mesh.faces)):
        tri_px = uv[mesh.faces[f]] * scale
        cols, rows, bary = _scan_triangle(tri_px, wx, hy)
        if len(cols) == 0:
            continue
        img_rows = hy - 1 - rows  # v up -> row 0 on top
        free = ~claimed[img_rows, cols]
        if not free.any():
            continue
        cols, img_rows, bary = cols[free], img_rows[free], bary[free]
        claimed[img_rows, cols] = True

        face_defined = cuv is not None and ctex is not None \
            and bool(np.isfinite(cuv[f]).all()) and bool((ctex[f] >= 0).all())
        if not face_defined:
            continue
        tex_ids = np.unique(ctex[f])
        if len(tex_ids) != 1:
            raise RasterError(f"face {f} spans more than one source texture")
        tex = int(tex_ids[0])
        if not 0 <= tex < len(atlases):
            raise RasterError(f"face {f}: source texture index {tex} out of range")
        u_ori = np.clip(bary @ cuv[f, :, 0], 0.0, 1.0)
        v_ori = np.clip(bary @ cuv[f, :, 1], 0.0, 1.0)
        img = atlases[tex]
        if filter == "nearest":
            colors = img.sample_nearest(u_ori, v_ori)
        else:
            colors = img.sample_bilinear(u_ori, v_ori)
        pixels[img_rows, cols] = colors
        defined[img_rows, cols] = True

    if supersample > 1:
        pixels, defined = _box_downsample(pixels, defined, supersample)
    coverage = float(defined.mean())
    rounds, forced = _dilate(pixels, defined)
    out = TextureImage(out_w, out_h, pixels, defined=defined)
    out.coverage_before_dilation = coverage
    out.dilation_rounds = rounds
    out.forced_fill_pixels = forced
    return out
