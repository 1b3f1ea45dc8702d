"""Writers for the generated artefacts.

Everything here is byte-deterministic: a given model always serializes
to identical files, so outputs can be diffed and cached.  OBJ groups the
deck under one object and numbers railing and support solids; STL is
the little-endian binary flavour; JSON is canonical (sorted keys,
two-space indent, trailing newline).
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path
from typing import Iterable

import numpy as np

from .geometry import RampModel, Solid, TriMesh
from .params import GeomParams
from .pathfinder import RampPath

STL_HEADER = b"rampgen binary STL".ljust(80, b"\0")


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def round_floats(data, digits: int = 9):
    """Round every float in a nested JSON-able structure, clearing the
    representation noise that would otherwise churn diffs."""
    if isinstance(data, float):
        r = round(data, digits)
        return 0.0 if r == 0 else r  # avoid -0.0
    if isinstance(data, dict):
        return {k: round_floats(v, digits) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [round_floats(v, digits) for v in data]
    return data


# ---------------------------------------------------------------------------
# OBJ / MTL
# ---------------------------------------------------------------------------

def _obj_objects(model: RampModel) -> list[tuple[str, str, TriMesh]]:
    """Stable export order: one merged deck object, then numbered
    railing and support solids."""
    out: list[tuple[str, str, TriMesh]] = []
    decks = model.by_name("deck")
    if decks:
        out.append(("deck", decks[0].material,
                    TriMesh.merged(s.mesh for s in decks)))
    for prefix in ("railing", "support"):
        for i, s in enumerate(model.by_name(prefix), start=1):
            out.append((f"{prefix}_{i:03d}", s.material, s.mesh))
    return out


def write_obj(model: RampModel, obj_path: str | Path,
              mtl_name: str = "ramp.mtl") -> None:
    lines = ["# ramp model", f"mtllib {mtl_name}"]
    base = 1  # OBJ indices are 1-based and global
    for name, material, mesh in _obj_objects(model):
        lines.append(f"o {name}")
        lines.append(f"usemtl {material}")
        for x, y, z in mesh.vertices:
            lines.append(f"v {x:.6f} {y:.6f} {z:.6f}")
        for a, b, c in mesh.faces:
            lines.append(f"f {base + a} {base + b} {base + c}")
        base += mesh.n_vertices
    Path(obj_path).write_text("\n".join(lines) + "\n")


def write_mtl(model: RampModel, mtl_path: str | Path,
              geom: GeomParams | None = None) -> None:
    geom = geom or GeomParams()
    materials = sorted({s.material for s in model.solids})
    lines = ["# ramp materials"]
    for tag in materials:
        r, g, b = geom.material_color(tag)
        lines.append(f"newmtl {tag}")
        lines.append(f"Kd {r:.3f} {g:.3f} {b:.3f}")
    Path(mtl_path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# STL (binary, little-endian)
# ---------------------------------------------------------------------------

def write_stl(model_or_mesh: RampModel | TriMesh, stl_path: str | Path) -> None:
    mesh = (model_or_mesh.combined()
            if isinstance(model_or_mesh, RampModel) else model_or_mesh)
    parts = [STL_HEADER, struct.pack("<I", mesh.n_faces)]
    tri = mesh.vertices[mesh.faces] if mesh.n_faces else np.zeros((0, 3, 3))
    for corners in tri:
        a, b, c = corners
        n = np.cross(b - a, c - a)
        length = float(np.linalg.norm(n))
        if length > 1e-20:
            n = n / length
        else:
            n = np.zeros(3)
        parts.append(struct.pack(
            "<12fH",
            float(n[0]), float(n[1]), float(n[2]),
            float(a[0]), float(a[1]), float(a[2]),
            float(b[0]), float(b[1]), float(b[2]),
            float(c[0]), float(c[1]), float(c[2]),
            0,
        ))
    Path(stl_path).write_bytes(b"".join(parts))


# ---------------------------------------------------------------------------
# model JSON
# ---------------------------------------------------------------------------

def path_to_dict(path: RampPath) -> dict:
    return {
        "stations": [
            {"x": st.x, "y": st.y, "z": st.z, "arc": st.arc, "kind": st.kind}
            for st in path.stations
        ],
        "slope": path.slope,
        "landings": [list(l) for l in path.landings],
        "intermediate_landings": [list(l) for l in path.intermediate_landings()],
        "length": path.length,
        "rise": path.rise,
        "source": path.source,
        "notes": list(path.notes),
    }


def model_to_dict(model: RampModel, path: RampPath | None = None) -> dict:
    data = {
        "schema": "ramp_model@1",
        "solids": [
            {
                "name": name,
                "material": material,
                "vertices": mesh.vertices.tolist(),
                "triangles": mesh.faces.tolist(),
            }
            for name, material, mesh in _obj_objects(model)
        ],
        "counts": {"vertices": model.n_vertices, "triangles": model.n_faces},
        "deck_plan_area": model.deck_plan_area,
    }
    if path is not None:
        data["path"] = path_to_dict(path)
    return data


def write_model_json(model: RampModel, json_path: str | Path,
                     path: RampPath | None = None) -> None:
    Path(json_path).write_text(
        canonical_json(round_floats(model_to_dict(model, path)))
    )


def write_report(report: dict, report_path: str | Path) -> None:
    Path(report_path).write_text(canonical_json(round_floats(report)))


def export_model(outdir: str | Path, model: RampModel, path: RampPath,
                 geom: GeomParams | None = None,
                 formats: Iterable[str] = ("obj", "stl", "json")) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    formats = set(formats)
    if "obj" in formats:
        obj = outdir / "ramp.obj"
        write_obj(model, obj)
        write_mtl(model, outdir / "ramp.mtl", geom)
        written["obj"] = obj
        written["mtl"] = outdir / "ramp.mtl"
    if "stl" in formats:
        stl = outdir / "ramp.stl"
        write_stl(model, stl)
        written["stl"] = stl
    if "json" in formats:
        mj = outdir / "ramp.json"
        write_model_json(model, mj, path)
        written["json"] = mj
    return written
