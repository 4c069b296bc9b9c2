"""texpack: rebuild fragmented texture atlases as one dense square texture
per mesh component, using a fixed-boundary harmonic parameterization."""

from .harmonic import (
    EdgeWeightMap,
    ParamCoords,
    SolveError,
    compute_weights,
    count_flips,
    harmonic_energy,
    pick_corners,
    solve_harmonic,
    solve_harmonic_dense,
    square_boundary_map,
)
from .image import TextureImage
from .mesh import BoundaryLoop, Mesh, MeshError, TopologyError
from .objio import ParseError, load_mesh, save_mesh, save_result
from .pipeline import PipelineConfig, PipelineError, RunReport, run
from .raster import RasterPoint, bake_texture, odd_even_inside, sample_source, scanline_fill
from .repair import (
    CutGraph,
    HomologyLoop,
    cut_graph,
    cut_to_disk,
    fill_hole,
    fix_nonmanifold,
    homology_basis,
    remove_small_handles,
    repair_component,
    slice_edges,
)
from .report import report_to_csv, report_to_json

__version__ = "0.1.0"

__all__ = [
    "BoundaryLoop", "CutGraph", "EdgeWeightMap", "HomologyLoop", "Mesh",
    "MeshError", "ParamCoords", "ParseError", "PipelineConfig",
    "PipelineError", "RasterPoint", "RunReport", "SolveError", "TextureImage",
    "TopologyError", "bake_texture", "compute_weights", "count_flips",
    "cut_graph", "cut_to_disk", "fill_hole", "fix_nonmanifold",
    "harmonic_energy", "homology_basis", "load_mesh", "odd_even_inside",
    "pick_corners", "remove_small_handles", "repair_component",
    "report_to_csv", "report_to_json", "run", "sample_source", "save_mesh",
    "save_result", "scanline_fill", "slice_edges", "solve_harmonic",
    "solve_harmonic_dense", "square_boundary_map",
]
