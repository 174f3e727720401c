"""Polyhedral domain descriptions: parsing, dihedral angles, validation.

Orientation convention for derived angles: the edge direction ``e`` is
oriented so that ``e x n_plus`` points from the edge into the plus face
(``n_plus`` is that face's outward unit normal). Equivalently ``n_minus x e``
points into the minus face. Listing an edge's vertices in the opposite order
turns an interior angle theta into 2*pi - theta.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from importlib import resources
from typing import Any, Iterable, Sequence

import jsonschema
import numpy as np

TWO_PI = 2.0 * math.pi
ANGLE_AGREEMENT = 1e-6
UNIT_TOL = 1e-12
IN_PLANE_TOL = 1e-9


class BcKind(IntEnum):
    DIRICHLET = 0
    TANGENTIAL_VELOCITY = 1   # u_tangential = 0, normal stress prescribed
    NORMAL_VELOCITY = 2       # u . n = 0, tangential stress prescribed
    TRACTION = 3              # full stress vector prescribed

    @property
    def label(self) -> str:
        return {0: "dirichlet", 1: "tangential velocity + normal stress",
                2: "normal velocity + tangential stress", 3: "traction"}[int(self)]


class DomainError(ValueError):
    """Invalid domain description; ``path`` locates the offending entry."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class Face:
    id: str
    bc: BcKind
    normal: tuple[float, float, float] | None = None
    point: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class EdgeModel:
    id: str
    face_plus: str
    face_minus: str
    vertex_ids: tuple[str, ...] = ()
    theta: float | None = None
    theta_samples: tuple[float, ...] = ()
    direction: tuple[float, float, float] | None = None
    theta_supplied: bool = field(default=True, compare=False)

    @property
    def angles(self) -> tuple[float, ...]:
        """All angle values that enter the edge exponent (infimum over samples)."""
        if self.theta_samples:
            return self.theta_samples
        return (self.theta,) if self.theta is not None else ()


@dataclass(frozen=True)
class VertexModel:
    id: str
    incident_edges: tuple[str, ...]
    incident_faces: tuple[str, ...] = ()
    convexity_flag: bool | None = None
    attestations: tuple[str, ...] = ()
    point: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class DomainModel:
    faces: tuple[Face, ...]
    edges: tuple[EdgeModel, ...]
    vertices: tuple[VertexModel, ...]
    attestations: tuple[str, ...] = ()
    name: str = ""
    _face_index: dict = field(default_factory=dict, compare=False, repr=False)
    _edge_index: dict = field(default_factory=dict, compare=False, repr=False)
    _vertex_index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._face_index.update({f.id: f for f in self.faces})
        self._edge_index.update({e.id: e for e in self.edges})
        self._vertex_index.update({v.id: v for v in self.vertices})

    def face(self, fid: str) -> Face:
        return self._face_index[fid]

    def edge(self, eid: str) -> EdgeModel:
        return self._edge_index[eid]

    def vertex(self, vid: str) -> VertexModel:
        return self._vertex_index[vid]

    def bc_pair(self, edge: EdgeModel) -> tuple[int, int]:
        return int(self.face(edge.face_plus).bc), int(self.face(edge.face_minus).bc)

    def has_attestation(self, name: str) -> bool:
        return name in self.attestations


# angles -------------------------------------------------------------------

def _unit(v: Sequence[float], what: str) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise DomainError(f"{what} is the zero vector")
    return a / n


def dihedral_angle(face_plus: Face, face_minus: Face, edge_direction: Sequence[float]) -> float:
    """Interior angle between the two face half-planes at an oriented edge."""
    if face_plus.normal is None or face_minus.normal is None:
        raise DomainError("missing plane data: both faces need an outward normal")
    e = _unit(edge_direction, "edge direction")
    n_plus = np.asarray(face_plus.normal, dtype=float)
    n_minus = np.asarray(face_minus.normal, dtype=float)
    for n, fid in ((n_plus, face_plus.id), (n_minus, face_minus.id)):
        if abs(float(e @ n)) > IN_PLANE_TOL:
            raise DomainError(f"edge direction does not lie in the plane of face {fid!r}")
    if float(np.linalg.norm(n_plus + n_minus)) < 1e-12:
        raise DomainError("faces parallel (undefined edge)")
    t_plus = np.cross(e, n_plus)
    t_minus = np.cross(n_minus, e)
    theta = math.atan2(float(t_minus @ -n_plus), float(t_minus @ t_plus)) % TWO_PI
    if theta <= 0.0 or theta >= TWO_PI:
        raise DomainError("faces parallel (undefined edge)")
    return theta


# parsing ------------------------------------------------------------------

def load_schema(name: str) -> dict:
    text = resources.files("polyreg").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _schema_check(doc: Any, schema_name: str) -> None:
    validator = jsonschema.Draft202012Validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/" + "/".join(str(p) for p in err.absolute_path)
        raise DomainError(f"schema violation: {err.message}", path)


def _vec(v) -> tuple[float, float, float] | None:
    return None if v is None else tuple(float(x) for x in v)  # type: ignore[return-value]


def parse_domain(document: str | bytes | dict) -> DomainModel:
    """Build a DomainModel from JSON text (or an already decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise DomainError(f"not valid JSON: {exc}") from exc
    else:
        doc = document
    _schema_check(doc, "domain")

    faces = []
    seen: set[str] = set()
    for i, f in enumerate(doc["faces"]):
        if f["id"] in seen:
            raise DomainError(f"duplicate face id {f['id']!r}", f"/faces/{i}")
        seen.add(f["id"])
        normal = _vec(f.get("normal"))
        if normal is not None and abs(math.sqrt(sum(x * x for x in normal)) - 1.0) > UNIT_TOL:
            raise DomainError("normal is not a unit vector", f"/faces/{i}/normal")
        faces.append(Face(f["id"], BcKind(f["bc"]), normal, _vec(f.get("point"))))
    face_ids = {f.id for f in faces}

    raw_vertices = doc.get("vertices", [])
    vertex_ids = [v["id"] for v in raw_vertices]
    if len(set(vertex_ids)) != len(vertex_ids):
        raise DomainError("duplicate vertex id", "/vertices")
    vertex_points = {v["id"]: _vec(v.get("point")) for v in raw_vertices}

    face_lookup = {f.id: f for f in faces}
    edges = []
    edge_ids: set[str] = set()
    for i, e in enumerate(doc["edges"]):
        path = f"/edges/{i}"
        if e["id"] in edge_ids:
            raise DomainError(f"duplicate edge id {e['id']!r}", path)
        edge_ids.add(e["id"])
        fp, fm = e["faces"]
        for fid in (fp, fm):
            if fid not in face_ids:
                raise DomainError(f"dangling face id {fid!r}", path + "/faces")
        if fp == fm:
            raise DomainError("an edge needs two distinct faces", path + "/faces")
        verts = tuple(e.get("vertices", []))
        for vid in verts:
            if vid not in vertex_points:
                raise DomainError(f"dangling vertex id {vid!r}", path + "/vertices")
        samples = tuple(float(t) for t in e.get("theta_samples", []))
        theta = e.get("theta")
        for t in samples + ((theta,) if theta is not None else ()):
            if not (0.0 < float(t) < TWO_PI):
                raise DomainError(f"angle out of range: {t} not in (0, 2*pi)", path)
        direction = _vec(e.get("direction"))
        if direction is None and len(verts) == 2 and all(vertex_points[v] for v in verts):
            a, b = (np.asarray(vertex_points[v]) for v in verts)
            direction = tuple(float(x) for x in (b - a))  # type: ignore[assignment]
        supplied = theta is not None or bool(samples)
        if theta is None and not samples:
            if direction is None:
                raise DomainError("no angle: give theta, theta_samples, or plane geometry "
                                  "(face normals plus edge direction or vertex points)", path)
            theta = dihedral_angle(face_lookup[fp], face_lookup[fm], direction)
        if theta is None and samples:
            theta = min(samples)
        edges.append(EdgeModel(e["id"], fp, fm, verts, float(theta), samples, direction, supplied))

    vertices = []
    for i, v in enumerate(raw_vertices):
        path = f"/vertices/{i}"
        for eid in v["edges"]:
            if eid not in edge_ids:
                raise DomainError(f"dangling edge id {eid!r}", path + "/edges")
        atts = tuple(v.get("attestations", []))
        convex = True if "convex" in atts else None
        incident_faces = sorted({fid for e in edges if e.id in v["edges"]
                                 for fid in (e.face_plus, e.face_minus)})
        vertices.append(VertexModel(v["id"], tuple(v["edges"]), tuple(incident_faces),
                                    convex, atts, vertex_points[v["id"]]))
    model = DomainModel(tuple(faces), tuple(edges), tuple(vertices),
                        tuple(doc.get("attestations", [])), doc.get("name", ""))
    errors = [d for d in validate(model) if d.level == "error"]
    if errors:
        raise DomainError(errors[0].message, errors[0].entity)
    return model


def serialize_domain(model: DomainModel) -> dict:
    """Inverse of parse_domain (derived angles are written out as supplied)."""
    faces = []
    for f in model.faces:
        d: dict[str, Any] = {"id": f.id, "bc": int(f.bc)}
        if f.normal is not None:
            d["normal"] = list(f.normal)
        if f.point is not None:
            d["point"] = list(f.point)
        faces.append(d)
    edges = []
    for e in model.edges:
        d = {"id": e.id, "faces": [e.face_plus, e.face_minus], "vertices": list(e.vertex_ids)}
        if e.theta_samples:
            d["theta_samples"] = list(e.theta_samples)
        else:
            d["theta"] = e.theta
        if e.direction is not None:
            d["direction"] = list(e.direction)
        edges.append(d)
    vertices = []
    for v in model.vertices:
        d = {"id": v.id, "edges": list(v.incident_edges)}
        if v.attestations:
            d["attestations"] = list(v.attestations)
        if v.point is not None:
            d["point"] = list(v.point)
        vertices.append(d)
    out: dict[str, Any] = {"faces": faces, "edges": edges, "vertices": vertices}
    if model.attestations:
        out["attestations"] = list(model.attestations)
    if model.name:
        out["name"] = model.name
    return out


# validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    level: str      # "error" or "warning"
    entity: str
    message: str
    citation: str = ""


DEGENERATE_ANGLE = "degenerate angle for compatibility reduction"
CITE_STRAIGHT = "we assume additionally that $\\theta\\not=\\pi$, $\\theta\\not=2\\pi$"
CITE_SUM3 = ("The condition of Lemma \\ref{bl3} is satisfied for $d^+ +d^-=3$, "
             "$\\sin 2\\theta\\not=0$")
CITE_SUM15 = "for $d^+ + d^- \\in \\{1,5\\}$, $\\cos\\theta\\, \\cos 2\\theta\\not=0$"


def _near_zero(x: float) -> bool:
    return abs(x) < 1e-9


def angle_warnings(pair: tuple[int, int], theta: float) -> list[tuple[str, str]]:
    """Warnings (message, citation) for angles where the edge compatibility reduction degenerates."""
    out = []
    total = pair[0] + pair[1]
    if total % 2 == 0 and _near_zero(theta - math.pi):
        out.append((f"{DEGENERATE_ANGLE}: theta = pi", CITE_STRAIGHT))
    if total == 3 and _near_zero(math.sin(2 * theta)):
        out.append((f"{DEGENERATE_ANGLE}: sin 2theta = 0 for d+ + d- = 3", CITE_SUM3))
    if total in (1, 5) and _near_zero(math.cos(theta) * math.cos(2 * theta)):
        out.append((f"{DEGENERATE_ANGLE}: cos theta cos 2theta = 0 for d+ + d- in {{1,5}}",
                    CITE_SUM15))
    return out


def validate(model: DomainModel) -> list[Diagnostic]:
    """Invariant violations (errors) and angle degeneracies (warnings)."""
    diags: list[Diagnostic] = []
    face_ids = {f.id for f in model.faces}
    vertex_ids = {v.id for v in model.vertices}
    for f in model.faces:
        if f.normal is not None:
            if abs(math.sqrt(sum(x * x for x in f.normal)) - 1.0) > UNIT_TOL:
                diags.append(Diagnostic("error", f"face {f.id}", "normal is not a unit vector"))
    for e in model.edges:
        ent = f"edge {e.id}"
        if e.face_plus not in face_ids or e.face_minus not in face_ids:
            diags.append(Diagnostic("error", ent, "dangling face id"))
            continue
        if e.face_plus == e.face_minus:
            diags.append(Diagnostic("error", ent, "an edge needs two distinct faces"))
        for vid in e.vertex_ids:
            if vid not in vertex_ids:
                diags.append(Diagnostic("error", ent, f"dangling vertex id {vid!r}"))
        for t in e.angles:
            if not (0.0 < t < TWO_PI):
                diags.append(Diagnostic("error", ent, f"angle out of range: {t}"))
        fp, fm = model.face(e.face_plus), model.face(e.face_minus)
        if (e.theta_supplied and e.direction is not None and fp.normal is not None
                and fm.normal is not None and not e.theta_samples):
            try:
                derived = dihedral_angle(fp, fm, e.direction)
            except DomainError as exc:
                diags.append(Diagnostic("error", ent, str(exc)))
            else:
                if abs(derived - e.theta) > ANGLE_AGREEMENT:
                    diags.append(Diagnostic(
                        "error", ent,
                        f"supplied angle {e.theta:.9g} disagrees with geometry {derived:.9g}"))
        pair = model.bc_pair(e)
        for t in e.angles:
            for msg, cite in angle_warnings(pair, t):
                diags.append(Diagnostic("warning", ent, msg, cite))
    edge_lookup = {e.id: e for e in model.edges}
    for v in model.vertices:
        for eid in v.incident_edges:
            e = edge_lookup.get(eid)
            if e is None:
                diags.append(Diagnostic("error", f"vertex {v.id}", f"dangling edge id {eid!r}"))
            elif e.vertex_ids and v.id not in e.vertex_ids:
                diags.append(Diagnostic("error", f"vertex {v.id}",
                                        f"incident edge {eid} does not list this vertex"))
    return diags


def load_domain(path: str) -> DomainModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_domain(fh.read())


# fixtures -----------------------------------------------------------------

def cube_document(bc: int | Sequence[int] = 0, attestations: Iterable[str] = ("convex", "lipschitz"),
                  with_geometry: bool = True) -> dict:
    """Unit cube [0,1]^3 with consistently oriented edges.

    ``bc`` is one kind for every face or six kinds in the order
    x=0, x=1, y=0, y=1, z=0, z=1.
    """
    bcs = [bc] * 6 if isinstance(bc, int) else list(bc)
    names = ["x0", "x1", "y0", "y1", "z0", "z1"]
    normals = {"x0": (-1, 0, 0), "x1": (1, 0, 0), "y0": (0, -1, 0),
               "y1": (0, 1, 0), "z0": (0, 0, -1), "z1": (0, 0, 1)}
    faces = []
    for nm, b in zip(names, bcs):
        f: dict[str, Any] = {"id": nm, "bc": int(b)}
        if with_geometry:
            f["normal"] = [float(c) for c in normals[nm]]
        faces.append(f)
    corners = {f"v{i}{j}{k}": (i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)}
    edges = []
    face_of = {(0, 0): "x0", (0, 1): "x1", (1, 0): "y0", (1, 1): "y1", (2, 0): "z0", (2, 1): "z1"}
    for axis in range(3):
        others = [a for a in range(3) if a != axis]
        for p in (0, 1):
            for q in (0, 1):
                fa = face_of[(others[0], p)]
                fb = face_of[(others[1], q)]
                start = [0, 0, 0]
                start[others[0]], start[others[1]] = p, q
                end = list(start)
                end[axis] = 1
                e_dir = np.zeros(3)
                e_dir[axis] = 1.0
                # orient so that e x n_plus points into the plus face
                n_a = np.asarray(normals[fa], dtype=float)
                n_b = np.asarray(normals[fb], dtype=float)
                t = np.cross(e_dir, n_a)
                plus, minus = (fa, fb) if float(t @ -n_b) > 0 else (fb, fa)
                v0 = "v" + "".join(str(c) for c in start)
                v1 = "v" + "".join(str(c) for c in end)
                eid = f"e{'xyz'[axis]}{p}{q}"
                edge: dict[str, Any] = {"id": eid, "faces": [plus, minus], "vertices": [v0, v1],
                                        "theta": math.pi / 2}
                if with_geometry:
                    edge["direction"] = [float(c) for c in e_dir]
                edges.append(edge)
    vertices = []
    for vid in sorted(corners):
        inc = [e["id"] for e in edges if vid in e["vertices"]]
        vertices.append({"id": vid, "edges": inc, "point": [float(c) for c in corners[vid]]})
    return {"name": "unit cube", "faces": faces, "edges": edges, "vertices": vertices,
            "attestations": list(attestations)}
