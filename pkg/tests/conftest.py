"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately re-derive results through a different route
than the library (brute-force point-in-triangle, dense linear solves,
hand-rolled barycentric systems) so tests never compare code to itself.
"""

import os

import numpy as np
import pytest

from texpack import harmonic, objio, synth


# ----------------------------------------------------------------------
# independent oracles

def oracle_point_in_triangle(x, y, tri):
    """Brute-force membership test with the top-left tie convention:
    accept an on-edge point when the edge rises in v, or runs leftward
    when horizontal."""
    c = np.asarray(tri, dtype=float)
    area2 = (c[1, 0] - c[0, 0]) * (c[2, 1] - c[0, 1]) \
        - (c[1, 1] - c[0, 1]) * (c[2, 0] - c[0, 0])
    if area2 == 0:
        return False
    q = c if area2 > 0 else c[[0, 2, 1]]
    for i in range(3):
        ax, ay = q[i]
        bx, by = q[(i + 1) % 3]
        dx, dy = bx - ax, by - ay
        e = dx * (y - ay) - dy * (x - ax)
        tie = dy > 0 or (dy == 0 and dx < 0)
        if e < 0 or (e == 0 and not tie):
            return False
    return True


def oracle_coverage(tri, res):
    """Pixel-center coverage set of a triangle (pixel-space coords) by
    testing every center in the res x res grid."""
    out = set()
    for r in range(res):
        for col in range(res):
            if oracle_point_in_triangle(col + 0.5, r + 0.5, tri):
                out.add((col, r))
    return out


def oracle_barycentric(p, tri):
    """Barycentric coordinates via a dense 3x3 solve (not edge functions)."""
    a = np.array([[tri[0][0], tri[1][0], tri[2][0]],
                  [tri[0][1], tri[1][1], tri[2][1]],
                  [1.0, 1.0, 1.0]])
    return np.linalg.solve(a, np.array([p[0], p[1], 1.0]))


def euler_characteristic(mesh):
    """Recompute V - E + F from scratch (edges via a set of sorted pairs)."""
    edges = set()
    for f in mesh.faces:
        f = [int(v) for v in f]
        for i in range(3):
            a, b = f[i], f[(i + 1) % 3]
            edges.add((min(a, b), max(a, b)))
    v_used = len({int(v) for f in mesh.faces for v in f})
    return v_used - len(edges) + len(mesh.faces)


def solve_uv_for_mesh(mesh, scheme="uniform"):
    """Boundary condition + solve, the standard path used by many tests."""
    loop = mesh.boundary_loops()[0]
    corners = harmonic.pick_corners(mesh, loop)
    ids, uv = harmonic.square_boundary_map(mesh, loop, corners)
    weights = harmonic.compute_weights(mesh, scheme)
    coords = harmonic.solve_harmonic(mesh, weights, ids, uv)
    return coords, weights, (ids, uv)


# ----------------------------------------------------------------------
# fixture files

def write_textured_obj(mesh, textures, directory, stem):
    """Write mesh + textures as an OBJ/MTL/PNG fixture; returns the OBJ path."""
    paths = []
    for i, tex in enumerate(textures):
        p = os.path.join(directory, f"{stem}_atlas{i}.png")
        tex.save_png(p)
        paths.append(p)
    mesh.texture_paths = paths
    obj = os.path.join(directory, f"{stem}.obj")
    objio.save_mesh(mesh, obj, mtl_path=os.path.join(directory, f"{stem}.mtl"))
    return obj


@pytest.fixture
def vase_obj(tmp_path):
    mesh = synth.vase_mesh()
    return write_textured_obj(mesh, [synth.gradient_texture(128)],
                              str(tmp_path), "vase")


@pytest.fixture
def hemisphere_obj(tmp_path):
    mesh = synth.hemisphere_mesh()
    return write_textured_obj(mesh, [synth.checkerboard_texture(256)],
                              str(tmp_path), "hemisphere")
