"""Square harmonic parameterization of a topological-disk mesh.

Pipeline: cotangent (or uniform) edge weights, arc-length square boundary
condition, then a fixed-boundary Laplace solve for (u, v).  Boundary values
are pinned, never re-solved, so they survive bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .mesh import BoundaryLoop, Mesh, MeshError

COT_CLAMP = 1.0e4
DENSE_LIMIT = 2000  # unknowns; above this the dense fallback refuses

SQUARE_CORNERS = np.array([
    [0.0, 0.0],
    [1.0, 0.0],
    [1.0, 1.0],
    [0.0, 1.0],
])


class SolveError(MeshError):
    """The linear solve failed or the system is singular."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass
class EdgeWeightMap:
    """Per-undirected-edge scalar weights.

    ``edges`` mirrors ``mesh.edge_array()`` row for row; ``scheme`` is
    'cotangent' or 'uniform'.
    """
    edges: np.ndarray
    weights: np.ndarray
    scheme: str

    def lookup(self):
        """Dict (min_vid, max_vid) -> weight, for spot checks."""
        return {(int(a), int(b)): float(w)
                for (a, b), w in zip(self.edges, self.weights)}


@dataclass
class ParamCoords:
    """Per-vertex (u, v) in the unit square with solve diagnostics."""
    uv: np.ndarray          # (V, 2)
    residual: float         # interior Laplace residual, infinity norm
    flips: int              # triangles against the majority orientation


def compute_weights(mesh: Mesh, scheme: str = "cotangent") -> EdgeWeightMap:
    """Edge weights for the harmonic energy.

    Cotangent scheme: an interior edge gets (cot a + cot b) / 2 from the two
    angles opposite it, a boundary edge gets cot a / 2.  Angles come from 3D
    edge lengths via the law of cosines (cosines clamped to [-1, 1] for
    sliver robustness); cotangents are clamped to +-COT_CLAMP.  Uniform
    scheme: every edge weighs 1.
    """
    edges = mesh.edge_array()
    if scheme == "uniform":
        return EdgeWeightMap(edges, np.ones(len(edges)), "uniform")
    if scheme != "cotangent":
        raise ValueError(f"unknown weight scheme {scheme!r}")

    v = mesh.vertices
    f = mesh.faces
    p0, p1, p2 = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
    # side k is opposite corner k
    l0 = np.linalg.norm(p1 - p2, axis=1)
    l1 = np.linalg.norm(p2 - p0, axis=1)
    l2 = np.linalg.norm(p0 - p1, axis=1)
    lens = np.stack([l0, l1, l2], axis=1)
    if (lens <= 0).any():
        bad = int(np.nonzero((lens <= 0).any(axis=1))[0][0])
        raise MeshError(f"face {bad} has a zero-length edge")
    s = 0.5 * lens.sum(axis=1)
    area_sq = s * (s - l0) * (s - l1) * (s - l2)
    if (area_sq <= 0).any():
        bad = int(np.nonzero(area_sq <= 0)[0][0])
        raise MeshError(f"face {bad} has zero area")

    weights = np.zeros(len(edges))
    he_edge = mesh.halfedge_edge()
    for k in range(3):
        ka, kb = (k + 1) % 3, (k + 2) % 3
        cos_k = (lens[:, ka] ** 2 + lens[:, kb] ** 2 - lens[:, k] ** 2) \
            / (2 * lens[:, ka] * lens[:, kb])
        cos_k = np.clip(cos_k, -1.0, 1.0)
        sin_k = np.sqrt(np.maximum(1.0 - cos_k ** 2, 1e-300))
        cot_k = np.clip(cos_k / sin_k, -COT_CLAMP, COT_CLAMP)
        # the half-edge opposite corner k starts at corner (k+1)%3
        rows = he_edge[3 * np.arange(len(f)) + ka]
        np.add.at(weights, rows, 0.5 * cot_k)
    return EdgeWeightMap(edges, weights, "cotangent")


# ----------------------------------------------------------------------
# boundary condition

def _arc_cumlen(positions, verts):
    p = positions[verts]
    seg = np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])  # length n+1, [-1] = perimeter


def pick_corners(mesh: Mesh, loop: BoundaryLoop):
    """Choose four corner vertices on a boundary loop.

    The first corner is the loop vertex with the lexicographically smallest
    3D position (ties broken by vertex id); the others are placed greedily,
    in loop order, so each cumulative arc length lands as close as the
    discretization allows to k/4 of the perimeter.
    """
    if len(loop) < 4:
        raise MeshError("corner picking needs a boundary loop with at least 4 vertices")
    pos = mesh.vertices
    verts = loop.vertices
    pts = pos[verts]
    order = np.lexsort((verts, pts[:, 2], pts[:, 1], pts[:, 0]))
    verts = np.roll(verts, -int(order[0]))
    cum = _arc_cumlen(pos, verts)
    total = cum[-1]
    n = len(verts)
    idx = [0]
    for k in (1, 2, 3):
        target = k * total / 4.0
        lo = idx[-1] + 1
        hi = n - (3 - k)  # leave room for the remaining corners
        cands = np.arange(lo, hi)
        best = int(cands[np.argmin(np.abs(cum[cands] - target))])
        idx.append(best)
    return [int(verts[i]) for i in idx]


def square_boundary_map(mesh: Mesh, loop: BoundaryLoop, corners):
    """Map a boundary loop onto the unit-square perimeter.

    Corners go exactly to (0,0), (1,0), (1,1), (0,1).  Every vertex between
    corner k and corner k+1 goes to (1-t) * b(c_k) + t * b(c_{k+1}) with
    t = len(c_k, v) / s, where s is the 3D path length of that side.

    Returns (vertex_ids, uv): parallel arrays covering the whole loop.
    """
    verts = [int(v) for v in loop.vertices]
    n = len(verts)
    try:
        ci = [verts.index(int(c)) for c in corners]
    except ValueError as exc:
        raise MeshError(f"corner vertex not on the loop: {exc}") from None
    rot = verts[ci[0]:] + verts[:ci[0]]
    ci = sorted((i - ci[0]) % n for i in ci)
    if ci[0] != 0 or len(set(ci)) != 4:
        raise MeshError("need four distinct corners on the loop")
    cum = _arc_cumlen(mesh.vertices, np.asarray(rot))
    bounds = ci + [n]
    ids = []
    uv = []
    for k in range(4):
        i0, i1 = bounds[k], bounds[k + 1]
        s = cum[i1] - cum[i0]
        if s <= 0:
            raise MeshError(f"side {k} of the boundary has zero length")
        a = SQUARE_CORNERS[k]
        b = SQUARE_CORNERS[(k + 1) % 4]
        for i in range(i0, i1):
            if i == i0:
                ids.append(rot[i])
                uv.append(a.copy())
                continue
            t = (cum[i] - cum[i0]) / s
            ids.append(rot[i])
            uv.append((1.0 - t) * a + t * b)
    return np.asarray(ids, dtype=np.int64), np.asarray(uv)


# ----------------------------------------------------------------------
# the Laplace solve

def _assemble(mesh: Mesh, weights: EdgeWeightMap, boundary_ids, boundary_uv):
    V = len(mesh.vertices)
    is_bnd = np.zeros(V, dtype=bool)
    is_bnd[boundary_ids] = True
    interior = np.nonzero(~is_bnd)[0]
    e = weights.edges
    w = weights.weights
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    vals = np.concatenate([w, w])
    W = sparse.csr_matrix((vals, (rows, cols)), shape=(V, V))
    deg = np.asarray(W.sum(axis=1)).reshape(-1)
    L = sparse.diags(deg) - W  # weighted graph Laplacian
    bnd_uv_full = np.zeros((V, 2))
    bnd_uv_full[boundary_ids] = boundary_uv
    A = L[interior][:, interior].tocsr()
    rhs = -L[interior][:, is_bnd.nonzero()[0]] @ bnd_uv_full[is_bnd]
    return interior, A, rhs, bnd_uv_full, W, deg


def _interior_residual(W, deg, uv, interior):
    if len(interior) == 0:
        return 0.0
    r = W @ uv - deg[:, None] * uv
    return float(np.abs(r[interior]).max())


def solve_harmonic(mesh: Mesh, weights: EdgeWeightMap,
                   boundary_ids, boundary_uv, rtol: float = 1e-10) -> ParamCoords:
    """Solve the fixed-boundary Laplace system for (u, v).

    One preconditioned conjugate-gradient solve per coordinate on the
    symmetric interior-interior weight Laplacian (Jacobi preconditioner,
    relative tolerance ``rtol``, iteration cap 10n).  The reported residual
    is the infinity norm of sum_j w_ij (H(v_j) - H(v_i)) over interior
    vertices.
    """
    boundary_ids = np.asarray(boundary_ids, dtype=np.int64)
    boundary_uv = np.asarray(boundary_uv, dtype=np.float64)
    interior, A, rhs, uv, W, deg = _assemble(mesh, weights, boundary_ids, boundary_uv)
    n = len(interior)
    if n:
        diag = A.diagonal()
        if (diag == 0).any():
            bad = int(interior[np.nonzero(diag == 0)[0][0]])
            raise SolveError(f"singular system: interior vertex {bad} has zero "
                             "weight degree (isolated vertex?)")
        precond = sparse.diags(1.0 / diag)
        maxiter = max(10 * n, 50)
        x = np.empty((n, 2))
        for c in range(2):
            xc, info = splinalg.cg(A, rhs[:, c], rtol=rtol, atol=0.0,
                                   maxiter=maxiter, M=precond)
            if info > 0:
                res = float(np.abs(A @ xc - rhs[:, c]).max())
                raise SolveError(f"conjugate gradient did not converge within "
                                 f"{maxiter} iterations (residual {res:.3e})",
                                 residual=res)
            if info < 0:
                raise SolveError("conjugate gradient failed on illegal input")
            x[:, c] = xc
        uv[interior] = x
        target = 1e-8 * max(1.0, float(np.abs(weights.weights).max()))
        if _interior_residual(W, deg, uv, interior) > target:
            tighter = min(rtol * 1e-3, 1e-13)
            for c in range(2):
                xc, info = splinalg.cg(A, rhs[:, c], x0=x[:, c], rtol=tighter,
                                       atol=0.0, maxiter=maxiter, M=precond)
                if info == 0:
                    x[:, c] = xc
            uv[interior] = x
    uv[boundary_ids] = boundary_uv  # pinned exactly
    residual = _interior_residual(W, deg, uv, interior)
    return ParamCoords(uv=uv, residual=residual, flips=count_flips(mesh, uv))


def solve_harmonic_dense(mesh: Mesh, weights: EdgeWeightMap,
                         boundary_ids, boundary_uv) -> ParamCoords:
    """Direct dense-elimination solve of the same system.

    Independent of the iterative path; usable as an oracle and as a fallback
    for small systems (refuses above DENSE_LIMIT unknowns).
    """
    boundary_ids = np.asarray(boundary_ids, dtype=np.int64)
    boundary_uv = np.asarray(boundary_uv, dtype=np.float64)
    interior, A, rhs, uv, W, deg = _assemble(mesh, weights, boundary_ids, boundary_uv)
    if len(interior) > DENSE_LIMIT:
        raise SolveError(f"dense solve limited to {DENSE_LIMIT} unknowns")
    if len(interior):
        try:
            uv[interior] = np.linalg.solve(A.toarray(), rhs)
        except np.linalg.LinAlgError as exc:
            raise SolveError(f"dense solve failed: {exc}") from exc
    uv[boundary_ids] = boundary_uv
    residual = _interior_residual(W, deg, uv, interior)
    return ParamCoords(uv=uv, residual=residual, flips=count_flips(mesh, uv))


# ----------------------------------------------------------------------
# diagnostics

def harmonic_energy(mesh: Mesh, weights: EdgeWeightMap, coords) -> float:
    """Sum over edges of w * |H(v_i) - H(v_j)|^2."""
    uv = coords.uv if isinstance(coords, ParamCoords) else np.asarray(coords)
    e = weights.edges
    d = uv[e[:, 0]] - uv[e[:, 1]]
    return float(np.sum(weights.weights * (d * d).sum(axis=1)))


def count_flips(mesh: Mesh, coords) -> int:
    """Triangles whose UV signed area opposes the majority orientation.

    Areas within 1e-9 of zero (relative to the squared UV extent) count as
    degenerate rather than flipped: boundary slivers collapse to exact
    collinearity up to the solver tolerance, far below one pixel.
    """
    uv = coords.uv if isinstance(coords, ParamCoords) else np.asarray(coords)
    f = mesh.faces
    a, b, c = uv[f[:, 0]], uv[f[:, 1]], uv[f[:, 2]]
    area2 = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) \
        - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    extent = max(float(np.ptp(uv[:, 0])), float(np.ptp(uv[:, 1])), 1e-30)
    tol = 1e-9 * extent * extent
    pos = int((area2 > tol).sum())
    neg = int((area2 < -tol).sum())
    return neg if pos >= neg else pos


def signed_uv_area(mesh: Mesh, coords) -> float:
    """Sum of signed UV triangle areas (+-1 for a bijective square map)."""
    uv = coords.uv if isinstance(coords, ParamCoords) else np.asarray(coords)
    f = mesh.faces
    a, b, c = uv[f[:, 0]], uv[f[:, 1]], uv[f[:, 2]]
    area2 = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) \
        - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    return float(0.5 * area2.sum())
