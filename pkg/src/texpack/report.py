"""Run reports: JSON, delimited per-component statistics, and rendered
UV-layout figures."""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CSV_COLUMNS = [
    "component", "input_genus", "input_boundaries", "holes_filled",
    "handles_removed", "vertices", "faces", "weight_scheme",
    "harmonic_energy", "residual", "flips", "coverage_before_dilation",
    "dilation_rounds", "texture_file", "seconds_repair",
    "seconds_parameterize", "seconds_bake",
]


def _component_dict(rep) -> dict:
    return {
        "component": rep.index,
        "input_genus": rep.input_genus,
        "input_boundaries": rep.input_boundaries,
        "holes_filled": rep.holes_filled,
        "handles_removed": rep.handles_removed,
        "vertices": rep.n_vertices,
        "faces": rep.n_faces,
        "weight_scheme": rep.weight_scheme,
        "harmonic_energy": rep.harmonic_energy,
        "residual": rep.residual,
        "flips": rep.flips,
        "coverage_before_dilation": rep.coverage_before_dilation,
        "dilation_rounds": rep.dilation_rounds,
        "forced_fill_pixels": rep.forced_fill_pixels,
        "texture_file": rep.texture_file,
        "seconds": {k: rep.seconds[k] for k in sorted(rep.seconds)},
    }


def report_to_dict(report) -> dict:
    return {
        "input": report.input_path,
        "output_dir": report.output_dir,
        "obj_file": report.obj_file,
        "mtl_file": report.mtl_file,
        "config": report.config,
        "components": [_component_dict(c) for c in report.components],
        "seconds": {k: report.seconds[k] for k in sorted(report.seconds)},
    }


def report_to_json(report) -> str:
    """Serialize a run report with stable field order and full float
    precision (shortest round-trip representation)."""
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_csv(report) -> str:
    """One delimited row per component."""
    lines = [",".join(CSV_COLUMNS)]
    for rep in report.components:
        d = _component_dict(rep)
        row = [
            d["component"], d["input_genus"], d["input_boundaries"],
            d["holes_filled"], d["handles_removed"], d["vertices"], d["faces"],
            d["weight_scheme"], d["harmonic_energy"], d["residual"], d["flips"],
            d["coverage_before_dilation"], d["dilation_rounds"], d["texture_file"],
            rep.seconds.get("repair"), rep.seconds.get("parameterize"),
            rep.seconds.get("bake"),
        ]
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def human_summary(report) -> str:
    lines = [f"input: {report.input_path}",
             f"output: {report.output_dir} ({report.obj_file})",
             f"components: {len(report.components)}"]
    for rep in report.components:
        cov = ("-" if rep.coverage_before_dilation is None
               else f"{rep.coverage_before_dilation:.4f}")
        lines.append(
            f"  [{rep.index}] genus {rep.input_genus}, boundaries "
            f"{rep.input_boundaries}, holes filled {rep.holes_filled}, handles "
            f"removed {rep.handles_removed} | V {rep.n_vertices} F {rep.n_faces} "
            f"| {rep.weight_scheme} energy {rep.harmonic_energy:.6g} residual "
            f"{rep.residual:.3e} flips {rep.flips} | coverage {cov}"
            + (f" -> {rep.texture_file}" if rep.texture_file else ""))
    total = report.seconds.get("total")
    if total is not None:
        lines.append(f"total: {total:.2f} s")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# figures

def render_uv_figure(mesh, coords, path, title=None):
    """Wireframe of the new UV layout with the texture border highlighted."""
    uv = coords.uv if hasattr(coords, "uv") else np.asarray(coords)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.triplot(uv[:, 0], uv[:, 1], mesh.faces, linewidth=0.3, color="#4878a8")
    loops = mesh.boundary_loops()
    for loop in loops:
        ring = np.append(loop.vertices, loop.vertices[0])
        ax.plot(uv[ring, 0], uv[ring, 1], color="#c0392b", linewidth=1.4)
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_aspect("equal")
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_stats_figure(report, path):
    """Per-component coverage and stage timing bars."""
    comps = report.components
    n = max(len(comps), 1)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    xs = np.arange(n)
    cov = [c.coverage_before_dilation if c.coverage_before_dilation is not None
           else 0.0 for c in comps]
    ax1.bar(xs, cov, color="#4878a8")
    ax1.axhline(1.0, color="#c0392b", linewidth=0.8, linestyle="--")
    ax1.set_ylim(0, 1.05)
    ax1.set_xlabel("component")
    ax1.set_ylabel("defined-pixel fraction before dilation")
    stages = ["repair", "parameterize", "bake"]
    bottoms = np.zeros(n)
    for stage in stages:
        vals = np.array([c.seconds.get(stage, 0.0) for c in comps])
        ax2.bar(xs, vals, bottom=bottoms, label=stage)
        bottoms += vals
    ax2.set_xlabel("component")
    ax2.set_ylabel("seconds")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report_files(report, json_path, pieces=None):
    """Write the JSON report, the CSV beside it, and the figures.

    Returns the list of written paths.  ``pieces`` is an optional list of
    (mesh, coords) pairs; when given, one UV-layout figure is rendered per
    component next to the report.
    """
    written = []
    json_path = os.fspath(json_path)
    stem, _ = os.path.splitext(json_path)
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report))
    written.append(json_path)
    csv_path = stem + ".csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(report_to_csv(report))
    written.append(csv_path)
    if pieces is not None:
        for i, (mesh, coords) in enumerate(pieces):
            fig_path = f"{stem}_component{i}_uv.png"
            render_uv_figure(mesh, coords, fig_path, title=f"component {i}")
            written.append(fig_path)
        stats_path = stem + "_stats.png"
        render_stats_figure(report, stats_path)
        written.append(stats_path)
    return written
