"""End-to-end pipeline runs, reports, CLI, and determinism."""

import hashlib
import json
import os

import numpy as np
import pytest

from conftest import write_textured_obj
from texpack import synth
from texpack.cli import main
from texpack.mesh import Mesh
from texpack.objio import load_mesh
from texpack.pipeline import ComponentReport, PipelineConfig, PipelineError, RunReport, run
from texpack.report import report_to_csv, report_to_json


def _cfg(obj, out, **kw):
    kw.setdefault("resolution", 64)
    kw.setdefault("figures", False)
    return PipelineConfig(input_path=obj, output_dir=out, **kw)


def _hash_dir(d):
    out = {}
    for name in sorted(os.listdir(d)):
        with open(os.path.join(d, name), "rb") as fh:
            out[name] = hashlib.sha256(fh.read()).hexdigest()
    return out


# ----------------------------------------------------------------------
# end-to-end runs

def test_vase_golden_run(vase_obj, tmp_path):
    out = str(tmp_path / "out")
    report = run(_cfg(vase_obj, out, weights="uniform", resolution=128))
    assert len(report.components) == 1
    rep = report.components[0]
    assert rep.input_genus == 0
    assert rep.input_boundaries == 1
    assert rep.flips == 0
    assert rep.coverage_before_dilation == 1.0
    assert rep.texture_file is not None
    assert os.path.exists(os.path.join(out, rep.texture_file))
    assert os.path.exists(os.path.join(out, report.obj_file))


def test_two_component_input_yields_two_textures(tmp_path):
    a = synth.vase_mesh(rings=6, segments=9)
    b = synth.hemisphere_mesh(rings=4, segments=9)
    verts = np.vstack([a.vertices, b.vertices + np.array([4.0, 0, 0])])
    faces = np.vstack([a.faces, b.faces + a.n_vertices])
    uv = np.vstack([a.corner_uv, b.corner_uv])
    tex = np.vstack([a.corner_tex, b.corner_tex + 1])
    merged = Mesh(verts, faces, corner_uv=uv, corner_tex=tex)
    obj = write_textured_obj(
        merged, [synth.gradient_texture(64), synth.checkerboard_texture(64)],
        str(tmp_path), "pair")
    out = str(tmp_path / "out")
    report = run(_cfg(obj, out, weights="uniform"))
    assert len(report.components) == 2
    textures = {rep.texture_file for rep in report.components}
    assert len(textures) == 2
    for t in textures:
        assert os.path.exists(os.path.join(out, t))


def test_unreadable_input_no_outputs(tmp_path):
    out = str(tmp_path / "out")
    with pytest.raises(PipelineError, match=r"\[load\]"):
        run(_cfg(str(tmp_path / "missing.obj"), out))
    assert not os.path.exists(out) or os.listdir(out) == []


def test_stage_error_removes_partial_outputs(tmp_path, vase_obj, monkeypatch):
    out = str(tmp_path / "out")
    from texpack import pipeline as pl

    real = pl.objio.save_result

    def boom(*a, **k):
        real(*a, **k)
        raise pl.PipelineError("save", "forced failure")

    monkeypatch.setattr(pl.objio, "save_result", boom)
    with pytest.raises(PipelineError, match=r"\[save\]"):
        run(_cfg(vase_obj, out))
    assert os.listdir(out) == []


def test_geometry_preserved(vase_obj, tmp_path):
    out = str(tmp_path / "out")
    report = run(_cfg(vase_obj, out, weights="uniform"))
    packed = load_mesh(os.path.join(out, report.obj_file))
    original = load_mesh(vase_obj)
    # the vase is already a disk: same vertex set, bit-exact positions
    assert packed.n_faces == original.n_faces
    src = {tuple(p) for p in original.vertices}
    assert {tuple(p) for p in packed.vertices} <= src
    assert packed.corner_uv.min() >= 0.0
    assert packed.corner_uv.max() <= 1.0


def test_parameterize_only_mode(tmp_path):
    mesh = synth.random_disk_mesh(60, seed=9)
    obj = str(tmp_path / "bare.obj")
    from texpack.objio import save_mesh
    save_mesh(mesh, obj)
    out = str(tmp_path / "out")
    report = run(_cfg(obj, out, weights="uniform"))
    rep = report.components[0]
    assert rep.texture_file is None
    assert rep.coverage_before_dilation is None
    packed = load_mesh(os.path.join(out, report.obj_file))
    assert packed.corner_uv is not None  # the new parameterization is written


def test_textured_genus2_through_cut_graph(tmp_path):
    base = synth.plate_with_holes(2)
    uv = base.vertices[base.faces][:, :, :2].copy()
    mesh = Mesh(base.vertices, base.faces, corner_uv=uv,
                corner_tex=np.zeros((base.n_faces, 3), dtype=np.int64))
    obj = write_textured_obj(mesh, [synth.gradient_texture(64)],
                             str(tmp_path), "genus2")
    out = str(tmp_path / "out")
    report = run(_cfg(obj, out, weights="uniform"))
    rep = report.components[0]
    assert rep.input_genus == 2
    assert rep.flips == 0
    assert rep.coverage_before_dilation == 1.0


def test_holes_filled_and_dilated(tmp_path):
    vase = synth.vase_mesh(rings=10, segments=12)
    keep = np.ones(vase.n_faces, dtype=bool)
    keep[[40, 41, 140]] = False  # two punched holes away from the rim
    holed = Mesh(vase.vertices, vase.faces[keep],
                 corner_uv=vase.corner_uv[keep], corner_tex=vase.corner_tex[keep])
    obj = write_textured_obj(holed, [synth.gradient_texture(64)],
                             str(tmp_path), "holey")
    out = str(tmp_path / "out")
    report = run(_cfg(obj, out, weights="uniform", resolution=128))
    rep = report.components[0]
    assert rep.holes_filled == 2
    assert rep.coverage_before_dilation < 1.0  # fan faces carry no color
    assert rep.forced_fill_pixels == 0


def test_auto_fallback_recovers_from_flips(tmp_path):
    # a spiky disk folds over under cotangent weights but not uniform ones
    mesh = synth.random_disk_mesh(200, seed=23, bump=6.0)
    from texpack.objio import save_mesh
    obj = str(tmp_path / "spiky.obj")
    save_mesh(mesh, obj)
    r1 = run(_cfg(obj, str(tmp_path / "o1"), weights="cotangent"))
    assert r1.components[0].weight_scheme == "cotangent"
    assert r1.components[0].flips > 0
    r2 = run(_cfg(obj, str(tmp_path / "o2"), weights="cotangent",
                  auto_fallback=True))
    assert r2.components[0].weight_scheme == "uniform"
    assert r2.components[0].flips == 0


def test_thin_handle_denoised_in_pipeline(tmp_path):
    mesh = synth.thin_handle_torus()
    obj = write_textured_obj(mesh, [], str(tmp_path), "noisy")
    out = str(tmp_path / "out")
    report = run(_cfg(obj, out, weights="uniform"))
    rep = report.components[0]
    assert rep.input_genus == 1
    assert rep.handles_removed == 1


def test_no_denoise_still_reaches_disk(tmp_path):
    mesh = synth.thin_handle_torus()
    obj = write_textured_obj(mesh, [], str(tmp_path), "noisy")
    out = str(tmp_path / "out")
    report = run(_cfg(obj, out, weights="uniform", denoise=False))
    rep = report.components[0]
    assert rep.handles_removed == 0  # handle kept, opened by the cut graph
    assert rep.flips == 0


def test_determinism_byte_identical(vase_obj, tmp_path):
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    cfg1 = _cfg(vase_obj, out1, stem="result")
    cfg2 = _cfg(vase_obj, out2, stem="result")
    run(cfg1)
    run(cfg2)
    assert _hash_dir(out1) == _hash_dir(out2)


def test_threads_give_identical_textures(tmp_path):
    a = synth.vase_mesh(rings=6, segments=9)
    b = synth.hemisphere_mesh(rings=4, segments=9)
    verts = np.vstack([a.vertices, b.vertices + np.array([4.0, 0, 0])])
    faces = np.vstack([a.faces, b.faces + a.n_vertices])
    uv = np.vstack([a.corner_uv, b.corner_uv])
    tex = np.vstack([a.corner_tex, b.corner_tex + 1])
    merged = Mesh(verts, faces, corner_uv=uv, corner_tex=tex)
    obj = write_textured_obj(
        merged, [synth.gradient_texture(64), synth.checkerboard_texture(64)],
        str(tmp_path), "pair")
    o1, o2 = str(tmp_path / "s"), str(tmp_path / "m")
    run(_cfg(obj, o1, stem="r"))
    run(_cfg(obj, o2, stem="r", threads=4))
    assert _hash_dir(o1) == _hash_dir(o2)


# ----------------------------------------------------------------------
# config validation

@pytest.mark.parametrize("kw", [
    {"resolution": 8},
    {"resolution": 69999},
    {"weights": "magic"},
    {"filter": "cubic"},
    {"handle_threshold": 0.0},
    {"threads": 0},
    {"supersample": 3},
    {"aspect": (0, 1)},
])
def test_config_rejected(tmp_path, vase_obj, kw):
    with pytest.raises(PipelineError, match=r"\[config\]"):
        run(_cfg(vase_obj, str(tmp_path / "out"), **kw))


# ----------------------------------------------------------------------
# reports

def test_report_json_empty_run():
    rep = RunReport(input_path="x.obj", output_dir="out")
    doc = json.loads(report_to_json(rep))
    assert doc["components"] == []


def test_report_json_roundtrip_byte_identical(vase_obj, tmp_path):
    report = run(_cfg(vase_obj, str(tmp_path / "out"), weights="uniform"))
    text = report_to_json(report)
    again = json.dumps(json.loads(text), indent=2) + "\n"
    assert text == again


def test_report_preserves_tiny_floats():
    rep = RunReport(input_path="x", output_dir="y")
    comp = ComponentReport(index=0)
    comp.residual = 1.2345678901234567e-11
    rep.components.append(comp)
    doc = json.loads(report_to_json(rep))
    assert doc["components"][0]["residual"] == 1.2345678901234567e-11


def test_report_csv_one_row_per_component(vase_obj, tmp_path):
    report = run(_cfg(vase_obj, str(tmp_path / "out"), weights="uniform"))
    text = report_to_csv(report)
    lines = text.strip().split("\n")
    assert len(lines) == 1 + len(report.components)
    assert lines[0].startswith("component,")


def test_report_files_and_figures(vase_obj, tmp_path):
    out = str(tmp_path / "out")
    rp = str(tmp_path / "out" / "run.json")
    run(_cfg(vase_obj, out, report_path=rp, figures=True))
    assert os.path.exists(rp)
    assert os.path.exists(str(tmp_path / "out" / "run.csv"))
    assert os.path.exists(str(tmp_path / "out" / "run_component0_uv.png"))
    assert os.path.exists(str(tmp_path / "out" / "run_stats.png"))


# ----------------------------------------------------------------------
# CLI

def test_cli_success(vase_obj, tmp_path, capsys):
    out = str(tmp_path / "out")
    rc = main([vase_obj, "-o", out, "--resolution", "64", "--weights", "uniform",
               "--no-figures"])
    assert rc == 0
    captured = capsys.readouterr()
    assert "components: 1" in captured.out


def test_cli_failure_exit_code(tmp_path, capsys):
    rc = main([str(tmp_path / "nope.obj"), "-o", str(tmp_path / "out")])
    assert rc != 0
    assert "[load]" in capsys.readouterr().err


def test_cli_aspect_parsing(tmp_path, vase_obj):
    out = str(tmp_path / "out")
    rc = main([vase_obj, "-o", out, "--resolution", "64", "--aspect", "2:1",
               "--no-figures"])
    assert rc == 0
    from texpack.image import TextureImage
    tex = TextureImage.from_file(os.path.join(out, "vase_packed_tex0.png"))
    assert tex.width == 64 and tex.height == 32
