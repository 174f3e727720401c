"""Regenerate the JSON domain fixtures in this directory."""
import json
import math
from pathlib import Path

import numpy as np

from polyreg.geometry import Face, BcKind, cube_document, dihedral_angle

HERE = Path(__file__).resolve().parent


def l_prism(bc: int = 0) -> dict:
    """L-shaped cross-section extruded along z; one reentrant vertical edge."""
    outline = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    n = len(outline)
    faces = [{"id": "bottom", "bc": bc, "normal": [0.0, 0.0, -1.0]},
             {"id": "top", "bc": bc, "normal": [0.0, 0.0, 1.0]}]
    for i in range(n):
        (x0, y0), (x1, y1) = outline[i], outline[(i + 1) % n]
        length = math.hypot(x1 - x0, y1 - y0)
        # counter-clockwise outline: outward normal is the edge vector turned clockwise
        faces.append({"id": f"side{i}", "bc": bc,
                      "normal": [(y1 - y0) / length, -(x1 - x0) / length, 0.0]})
    points = {}
    for i, (x, y) in enumerate(outline):
        points[f"b{i}"] = (x, y, 0)
        points[f"t{i}"] = (x, y, 1)
    lookup = {f["id"]: Face(f["id"], BcKind(f["bc"]), tuple(f["normal"]), None) for f in faces}
    edges = []

    def add(eid, fa, fb, va, vb):
        direction = np.subtract(points[vb], points[va]).astype(float)
        theta_ab = dihedral_angle(lookup[fa], lookup[fb], direction)
        theta_ba = dihedral_angle(lookup[fb], lookup[fa], direction)
        # the interior angle is the smaller one except at the reentrant corner
        reentrant = eid == "v3"
        theta, plus, minus = max(((theta_ab, fa, fb), (theta_ba, fb, fa)),
                                 key=lambda c: c[0] if reentrant else -c[0])
        edges.append({"id": eid, "faces": [plus, minus], "vertices": [va, vb],
                      "theta": theta, "direction": [float(c) for c in direction]})

    for i in range(n):
        add(f"v{i}", f"side{(i - 1) % n}", f"side{i}", f"b{i}", f"t{i}")
        j = (i + 1) % n
        add(f"lb{i}", "bottom", f"side{i}", f"b{i}", f"b{j}")
        add(f"lt{i}", "top", f"side{i}", f"t{i}", f"t{j}")
    vertices = []
    for vid in sorted(points):
        inc = [e["id"] for e in edges if vid in e["vertices"]]
        vertices.append({"id": vid, "edges": inc, "point": [float(c) for c in points[vid]]})
    return {"name": "L-shaped prism", "faces": faces, "edges": edges, "vertices": vertices,
            "attestations": ["lipschitz"]}


def write(name: str, doc) -> None:
    (HERE / name).write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    write("cube.json", cube_document(0, attestations=()))
    write("cube_convex.json", cube_document(0, attestations=("convex", "lipschitz")))
    write("neumann_cube.json", {**cube_document(3, attestations=("lipschitz",)),
                                "name": "traction cube"})
    write("mixed_cube.json", {**cube_document([3, 0, 0, 0, 0, 0], attestations=("convex",)),
                              "name": "cube, traction on x = 0"})
    write("mixed_overrides.json", [
        {"vertex_id": v, "re_lo": -1, "re_hi": "-1/2",
         "citation": "assumed strip for a Dirichlet/traction vertex"}
        for v in ("v000", "v001", "v010", "v011")])
    write("l_prism.json", l_prism(0))
