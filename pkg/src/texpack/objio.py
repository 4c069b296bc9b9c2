"""Wavefront geometry IO: OBJ with per-corner texture coordinates plus MTL
material-to-image bindings.

Floats are written with up to 17 significant digits so a load/save/load round
trip preserves positions and UVs bit-exactly.
"""

from __future__ import annotations

import logging
import os

import numpy as np

from .mesh import Mesh, MeshError

logger = logging.getLogger(__name__)

_FLOAT_FMT = "%.17g"


class ParseError(MeshError):
    """Malformed geometry or material file."""


def _parse_mtl(path):
    """Return dict material name -> texture image path (or None)."""
    materials = {}
    current = None
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if tokens[0] == "newmtl":
                if len(tokens) < 2:
                    raise ParseError(f"{path}:{lineno}: newmtl without a name")
                current = tokens[1]
                materials.setdefault(current, None)
            elif tokens[0] == "map_Kd":
                if current is None:
                    raise ParseError(f"{path}:{lineno}: map_Kd before any newmtl")
                if len(tokens) < 2:
                    raise ParseError(f"{path}:{lineno}: map_Kd without a file")
                # keep options-free final token as the image path
                materials[current] = os.path.join(os.path.dirname(path), tokens[-1])
    return materials


def _resolve_index(token: str, count: int, lineno: int, what: str) -> int:
    try:
        idx = int(token)
    except ValueError:
        raise ParseError(f"line {lineno}: bad {what} index {token!r}") from None
    if idx > 0:
        idx -= 1
    elif idx < 0:
        idx += count
    else:
        raise ParseError(f"line {lineno}: {what} index 0 is not allowed")
    if not 0 <= idx < count:
        raise ParseError(f"line {lineno}: {what} index {token} out of range")
    return idx


def load_mesh(path) -> Mesh:
    """Load an OBJ file into a Mesh.

    Polygonal faces are fan-triangulated.  Texture indices are resolved
    through usemtl/mtllib; a material without a diffuse map yields texture
    index -1 (no color transfer for those corners).  A file with no texture
    coordinates at all loads in parameterize-only mode (corner_uv is None);
    a file where only some corners carry them is an error.
    """
    path = os.fspath(path)
    positions = []
    texcoords = []
    tri_verts = []       # (a, b, c) position indices
    tri_uv_idx = []      # (a, b, c) texcoord indices, -1 if absent
    tri_mtl = []         # material name or None, per triangle
    materials = {}       # name -> image path or None
    current_mtl = None
    obj_dir = os.path.dirname(path)

    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            tag = tokens[0]
            if tag == "v":
                if len(tokens) < 4:
                    raise ParseError(f"line {lineno}: vertex needs 3 coordinates")
                try:
                    positions.append([float(t) for t in tokens[1:4]])
                except ValueError:
                    raise ParseError(f"line {lineno}: bad vertex coordinate") from None
            elif tag == "vt":
                if len(tokens) < 3:
                    raise ParseError(f"line {lineno}: texture coordinate needs 2 values")
                try:
                    texcoords.append([float(tokens[1]), float(tokens[2])])
                except ValueError:
                    raise ParseError(f"line {lineno}: bad texture coordinate") from None
            elif tag == "f":
                if len(tokens) < 4:
                    raise ParseError(f"line {lineno}: face needs at least 3 corners")
                corner_v = []
                corner_t = []
                for tok in tokens[1:]:
                    parts = tok.split("/")
                    corner_v.append(_resolve_index(parts[0], len(positions), lineno, "vertex"))
                    if len(parts) > 1 and parts[1]:
                        corner_t.append(_resolve_index(parts[1], len(texcoords), lineno,
                                                       "texture coordinate"))
                    else:
                        corner_t.append(-1)
                for k in range(1, len(corner_v) - 1):
                    tri = (corner_v[0], corner_v[k], corner_v[k + 1])
                    if len(set(tri)) != 3:
                        logger.warning("line %d: skipping degenerate triangle %s",
                                       lineno, tri)
                        continue
                    tri_verts.append(tri)
                    tri_uv_idx.append((corner_t[0], corner_t[k], corner_t[k + 1]))
                    tri_mtl.append(current_mtl)
            elif tag == "mtllib":
                if len(tokens) < 2:
                    raise ParseError(f"line {lineno}: mtllib without a file name")
                mtl_path = os.path.join(obj_dir, tokens[1])
                if not os.path.exists(mtl_path):
                    raise ParseError(f"line {lineno}: material library not found: {tokens[1]}")
                materials.update(_parse_mtl(mtl_path))
            elif tag == "usemtl":
                if len(tokens) < 2:
                    raise ParseError(f"line {lineno}: usemtl without a name")
                current_mtl = tokens[1]
            # vn, o, g, s and others are ignored

    if not tri_verts:
        raise ParseError(f"{path}: no faces found")

    faces = np.asarray(tri_verts, dtype=np.int64)
    uv_idx = np.asarray(tri_uv_idx, dtype=np.int64)

    corner_uv = None
    corner_tex = None
    texture_paths = []
    if texcoords:
        missing = np.nonzero((uv_idx < 0).any(axis=1))[0]
        if missing.size:
            raise ParseError(f"face {int(missing[0])} has a corner without a "
                             "texture coordinate")
        uvs = np.asarray(texcoords, dtype=np.float64)
        if uvs.min() < -1e-9 or uvs.max() > 1 + 1e-9:
            logger.warning("%s: texture coordinates outside [0, 1] are clamped",
                           path)
        corner_uv = np.clip(uvs[uv_idx], 0.0, 1.0)
        # materials -> dense texture indices, in order of first face use
        tex_of_mtl = {}
        corner_tex = np.empty(faces.shape, dtype=np.int64)
        for fi, name in enumerate(tri_mtl):
            if name is None:
                corner_tex[fi] = -1
                continue
            if name not in materials:
                raise ParseError(f"face {fi}: material {name!r} is not defined in "
                                 "any material library")
            if name not in tex_of_mtl:
                img = materials[name]
                if img is None:
                    tex_of_mtl[name] = -1
                else:
                    texture_paths.append(img)
                    tex_of_mtl[name] = len(texture_paths) - 1
            corner_tex[fi] = tex_of_mtl[name]
        if (corner_tex < 0).all():
            logger.warning("%s: texture coordinates present but no diffuse maps "
                           "resolved; color transfer disabled", path)
    else:
        logger.info("%s: no texture coordinates; parameterize-only mode", path)

    verts = np.asarray(positions, dtype=np.float64)
    return Mesh(verts, faces, corner_uv=corner_uv, corner_tex=corner_tex,
                texture_paths=texture_paths)


def save_mesh(mesh: Mesh, path, mtl_path=None):
    """Write a mesh with its original per-corner UVs (if any).

    Produces one vt record per distinct corner UV and, when ``mtl_path`` is
    given and the mesh carries texture indices, a material library binding
    material ``mat<i>`` to texture path i (plus usemtl switches in face
    order).  Used for fixtures, round-trip fidelity, and debugging; result
    meshes go through save_result.
    """
    path = os.fspath(path)
    with_materials = (mtl_path is not None and mesh.corner_tex is not None
                      and mesh.texture_paths)
    lines = []
    if with_materials:
        lines.append(f"mtllib {os.path.basename(os.fspath(mtl_path))}")
    for p in mesh.vertices:
        lines.append("v " + " ".join(_FLOAT_FMT % c for c in p))
    if mesh.corner_uv is not None:
        uv_rows = {}
        corner_rows = np.empty((len(mesh.faces), 3), dtype=np.int64)
        for fi in range(len(mesh.faces)):
            for k in range(3):
                key = (float(mesh.corner_uv[fi, k, 0]), float(mesh.corner_uv[fi, k, 1]))
                row = uv_rows.setdefault(key, len(uv_rows))
                corner_rows[fi, k] = row
        for (u, v) in uv_rows:
            lines.append("vt " + _FLOAT_FMT % u + " " + _FLOAT_FMT % v)
        current_tex = None
        for fi, f in enumerate(mesh.faces):
            if with_materials:
                tex = int(mesh.corner_tex[fi].max())
                if tex != current_tex:
                    lines.append(f"usemtl mat{tex}" if tex >= 0 else "usemtl mat_none")
                    current_tex = tex
            lines.append("f " + " ".join(f"{int(f[k]) + 1}/{int(corner_rows[fi, k]) + 1}"
                                         for k in range(3)))
    else:
        for f in mesh.faces:
            lines.append("f " + " ".join(str(int(v) + 1) for v in f))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    if with_materials:
        mtl_lines = []
        for ti, tex_path in enumerate(mesh.texture_paths):
            mtl_lines.append(f"newmtl mat{ti}")
            mtl_lines.append(f"map_Kd {os.path.basename(os.fspath(tex_path))}")
            mtl_lines.append("")
        if mesh.corner_tex is not None and (mesh.corner_tex < 0).any():
            mtl_lines.append("newmtl mat_none")
            mtl_lines.append("")
        with open(mtl_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(mtl_lines))


def save_result(path_obj, path_mtl, components, texture_files):
    """Write the pipeline output: one OBJ holding every component, with one
    material (and texture) per component and one vt per vertex (the new UVs).

    components: list of Mesh whose ``new_uv`` is set.
    texture_files: texture file name per component, or None entries when no
    texture was generated (parameterize-only runs).
    """
    path_obj = os.fspath(path_obj)
    lines = [f"mtllib {os.path.basename(path_mtl)}"]
    v_off = 0
    for ci, mesh in enumerate(components):
        if mesh.new_uv is None:
            raise MeshError(f"component {ci} has no computed parameterization")
        lines.append(f"o component_{ci}")
        for p in mesh.vertices:
            lines.append("v " + " ".join(_FLOAT_FMT % c for c in p))
        for uv in mesh.new_uv:
            lines.append("vt " + _FLOAT_FMT % uv[0] + " " + _FLOAT_FMT % uv[1])
        lines.append(f"usemtl component_{ci}")
        for f in mesh.faces:
            lines.append("f " + " ".join(f"{int(v) + 1 + v_off}/{int(v) + 1 + v_off}"
                                         for v in f))
        v_off += len(mesh.vertices)
    with open(path_obj, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    mtl_lines = []
    for ci, tex in enumerate(texture_files):
        mtl_lines.append(f"newmtl component_{ci}")
        mtl_lines.append("Kd 1 1 1")
        if tex is not None:
            mtl_lines.append(f"map_Kd {os.path.basename(tex)}")
        mtl_lines.append("")
    with open(path_mtl, "w", encoding="utf-8") as fh:
        fh.write("\n".join(mtl_lines))
