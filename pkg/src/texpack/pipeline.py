"""End-to-end pipeline: load, split, repair, parameterize, bake, save."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import harmonic, objio, raster, repair
from .image import TextureImage
from .mesh import Mesh, MeshError

logger = logging.getLogger(__name__)


class PipelineError(Exception):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class PipelineConfig:
    input_path: str
    output_dir: str
    resolution: int = 4096
    weights: str = "cotangent"
    auto_fallback: bool = False
    filter: str = "bilinear"
    max_hole_edges: int = 100
    handle_threshold: float = 0.02
    solver_tol: float = 1e-10
    aspect: tuple = (1.0, 1.0)
    threads: int = 1
    supersample: int = 1
    rgba: bool = False
    denoise: bool = True
    fill_holes: bool = True
    report_path: str | None = None
    figures: bool = True
    stem: str | None = None

    def validate(self):
        if not self.input_path:
            raise ValueError("input path must not be empty")
        if not self.output_dir:
            raise ValueError("output directory must not be empty")
        if not 16 <= self.resolution <= 16384:
            raise ValueError("resolution must be within [16, 16384]")
        if self.weights not in ("cotangent", "uniform"):
            raise ValueError(f"unknown weight scheme {self.weights!r}")
        if self.filter not in ("nearest", "bilinear"):
            raise ValueError(f"unknown filter {self.filter!r}")
        if self.max_hole_edges < 0:
            raise ValueError("max hole edges must be >= 0")
        if self.handle_threshold <= 0:
            raise ValueError("handle threshold must be positive")
        if not 0 < self.solver_tol <= 1e-4:
            raise ValueError("solver tolerance must be in (0, 1e-4]")
        if len(self.aspect) != 2 or self.aspect[0] <= 0 or self.aspect[1] <= 0:
            raise ValueError("aspect must be two positive numbers")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.supersample not in (1, 2, 4):
            raise ValueError("supersample must be 1, 2 or 4")

    def base_name(self):
        if self.stem:
            return self.stem
        return os.path.splitext(os.path.basename(self.input_path))[0] + "_packed"


@dataclass
class ComponentReport:
    index: int
    input_genus: int = 0
    input_boundaries: int = 0
    holes_filled: int = 0
    handles_removed: int = 0
    n_vertices: int = 0
    n_faces: int = 0
    weight_scheme: str = ""
    harmonic_energy: float = 0.0
    residual: float = 0.0
    flips: int = 0
    coverage_before_dilation: float | None = None
    dilation_rounds: int | None = None
    forced_fill_pixels: int | None = None
    texture_file: str | None = None
    seconds: dict = field(default_factory=dict)


@dataclass
class RunReport:
    input_path: str
    output_dir: str
    obj_file: str | None = None
    mtl_file: str | None = None
    components: list = field(default_factory=list)
    seconds: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)


def _config_snapshot(cfg: PipelineConfig) -> dict:
    return {
        "resolution": cfg.resolution,
        "weights": cfg.weights,
        "auto_fallback": cfg.auto_fallback,
        "filter": cfg.filter,
        "max_hole_edges": cfg.max_hole_edges,
        "handle_threshold": cfg.handle_threshold,
        "solver_tol": cfg.solver_tol,
        "aspect": list(cfg.aspect),
        "threads": cfg.threads,
        "supersample": cfg.supersample,
        "denoise": cfg.denoise,
        "fill_holes": cfg.fill_holes,
    }


def _parameterize(mesh: Mesh, cfg: PipelineConfig):
    """Weights, boundary condition, solve; honours --auto-fallback."""
    scheme = cfg.weights
    loops = mesh.boundary_loops()
    loop = loops[0]
    corners = harmonic.pick_corners(mesh, loop)
    ids, uv = harmonic.square_boundary_map(mesh, loop, corners)
    weights = harmonic.compute_weights(mesh, scheme)
    coords = harmonic.solve_harmonic(mesh, weights, ids, uv, rtol=cfg.solver_tol)
    if coords.flips > 0 and cfg.auto_fallback and scheme != "uniform":
        logger.info("%d flipped triangles with %s weights; retrying uniform",
                    coords.flips, scheme)
        scheme = "uniform"
        weights = harmonic.compute_weights(mesh, scheme)
        coords = harmonic.solve_harmonic(mesh, weights, ids, uv, rtol=cfg.solver_tol)
    energy = harmonic.harmonic_energy(mesh, weights, coords)
    return coords, scheme, energy


def _process_piece(args):
    """Repair one split component and run every resulting disk through the
    parameterize and bake stages.  Returns a list of result dicts."""
    index, mesh, atlases, cfg = args
    results = []
    t0 = time.perf_counter()
    try:
        repaired = repair.repair_component(
            mesh, max_hole_edges=cfg.max_hole_edges,
            handle_threshold=cfg.handle_threshold,
            denoise=cfg.denoise, fill=cfg.fill_holes)
    except MeshError as exc:
        raise PipelineError("repair", f"component {index}: {exc}") from exc
    t_repair = time.perf_counter() - t0
    for piece, stats in repaired:
        rep = ComponentReport(index=-1)
        rep.seconds["repair"] = t_repair / len(repaired)
        rep.input_genus = stats.input_genus
        rep.input_boundaries = stats.input_boundaries
        rep.holes_filled = stats.holes_filled
        rep.handles_removed = stats.handles_removed
        rep.n_vertices = piece.n_vertices
        rep.n_faces = piece.n_faces
        t1 = time.perf_counter()
        try:
            coords, scheme, energy = _parameterize(piece, cfg)
        except MeshError as exc:
            raise PipelineError("parameterize", f"component {index}: {exc}") from exc
        rep.seconds["parameterize"] = time.perf_counter() - t1
        rep.weight_scheme = scheme
        rep.harmonic_energy = energy
        rep.residual = coords.residual
        rep.flips = coords.flips
        piece.new_uv = coords.uv
        texture = None
        if atlases and piece.has_uv():
            t2 = time.perf_counter()
            try:
                texture = raster.bake_texture(
                    piece, coords, atlases, cfg.resolution, filter=cfg.filter,
                    aspect=cfg.aspect, supersample=cfg.supersample)
            except MeshError as exc:
                raise PipelineError("bake", f"component {index}: {exc}") from exc
            rep.seconds["bake"] = time.perf_counter() - t2
            rep.coverage_before_dilation = texture.coverage_before_dilation
            rep.dilation_rounds = texture.dilation_rounds
            rep.forced_fill_pixels = texture.forced_fill_pixels
        results.append((piece, coords, texture, rep))
    return results


def run(config: PipelineConfig) -> RunReport:
    """Execute the whole pipeline.

    Writes one OBJ referencing one texture per processed component, the
    per-component textures, and (optionally) the report files.  On any stage
    failure the partial outputs are removed and PipelineError is raised.
    """
    try:
        config.validate()
    except ValueError as exc:
        raise PipelineError("config", str(exc)) from exc
    report = RunReport(input_path=config.input_path, output_dir=config.output_dir,
                       config=_config_snapshot(config))
    written = []
    t_total = time.perf_counter()
    try:
        # load
        t0 = time.perf_counter()
        if not os.path.isfile(config.input_path):
            raise PipelineError("load", f"input not readable: {config.input_path}")
        try:
            mesh = objio.load_mesh(config.input_path)
            atlases = [TextureImage.from_file(p) for p in mesh.texture_paths]
        except (MeshError, OSError) as exc:
            raise PipelineError("load", str(exc)) from exc
        report.seconds["load"] = time.perf_counter() - t0

        # split
        t0 = time.perf_counter()
        components = mesh.split_components()
        if not components:
            raise PipelineError("split", "input mesh has no faces")
        report.seconds["split"] = time.perf_counter() - t0
        logger.info("%d face-connected component(s)", len(components))

        # repair + parameterize + bake, per component
        t0 = time.perf_counter()
        jobs = [(i, comp, atlases, config) for i, comp in enumerate(components)]
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                nested = list(pool.map(_process_piece, jobs))
        else:
            nested = [_process_piece(j) for j in jobs]
        pieces = [item for batch in nested for item in batch]
        report.seconds["process"] = time.perf_counter() - t0

        # save (single-threaded IO)
        t0 = time.perf_counter()
        os.makedirs(config.output_dir, exist_ok=True)
        base = config.base_name()
        texture_files = []
        meshes = []
        for ci, (piece, coords, texture, rep) in enumerate(pieces):
            rep.index = ci
            report.components.append(rep)
            meshes.append(piece)
            if texture is None:
                texture_files.append(None)
                continue
            tex_name = f"{base}_tex{ci}.png"
            tex_path = os.path.join(config.output_dir, tex_name)
            written.append(tex_path)
            texture.save_png(tex_path, rgba=config.rgba)
            texture_files.append(tex_name)
            rep.texture_file = tex_name
        obj_path = os.path.join(config.output_dir, base + ".obj")
        mtl_path = os.path.join(config.output_dir, base + ".mtl")
        written.extend([obj_path, mtl_path])
        objio.save_result(obj_path, mtl_path, meshes, texture_files)
        report.obj_file = os.path.basename(obj_path)
        report.mtl_file = os.path.basename(mtl_path)
        report.seconds["save"] = time.perf_counter() - t0
        report.seconds["total"] = time.perf_counter() - t_total

        if config.report_path:
            from . import report as report_mod
            stem, _ = os.path.splitext(os.fspath(config.report_path))
            written.append(os.fspath(config.report_path))
            written.append(stem + ".csv")
            if config.figures:
                written.extend(f"{stem}_component{i}_uv.png" for i in range(len(pieces)))
                written.append(stem + "_stats.png")
            report_mod.write_report_files(
                report, config.report_path,
                pieces=[(p, c) for p, c, _, _ in pieces] if config.figures else None)
        return report
    except PipelineError:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise
