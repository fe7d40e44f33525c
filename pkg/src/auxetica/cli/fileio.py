"""Framework and path file I/O plus CSV traces of Gram curves.

The on-disk format is JSON with a canonical writer: fixed key order,
two-space indentation, and floats printed with 17 significant digits, so
save -> load -> save is byte-identical.
"""

from __future__ import annotations

import csv
import json
import warnings

import numpy as np

from ..errors import InvalidInput, ParseError, ValidationFailure
from ..framework import EdgeOrbit, PeriodicFramework, QuotientGraph, validate
from ..deformation import DeformationPath, _gram_tangents
from ..symcone import LinearMap, jacobi_eigh

FORMAT_VERSION = 1

_FRAMEWORK_KEYS = {"format_version", "kind", "dim", "vertices", "lattice", "edges", "metadata"}
_VERTEX_KEYS = {"id", "position"}
_EDGE_KEYS = {"u", "v", "gamma", "length"}


def _fmt_number(x):
    if isinstance(x, bool):
        raise InvalidInput("booleans are not valid numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _emit(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{pad}  "{k}": {_emit(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(isinstance(v, (int, float, np.integer, np.floating)) for v in obj)
        if flat:
            return "[" + ", ".join(_fmt_number(v) for v in obj) + "]"
        rows = [f"{pad}  {_emit(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    return _fmt_number(obj)


def canonical_json(obj) -> str:
    return _emit(obj) + "\n"


def framework_to_dict(f: PeriodicFramework, metadata=None) -> dict:
    lam = f.lattice.matrix
    return {
        "format_version": FORMAT_VERSION,
        "dim": f.dim,
        "vertices": [
            {"id": i, "position": [float(x) for x in f.positions[i]]} for i in range(f.n)
        ],
        "lattice": [[float(x) for x in lam[:, j]] for j in range(f.dim)],
        "edges": [
            {
                "u": e.u,
                "v": e.v,
                "gamma": [int(g) for g in e.gamma],
                "length": float(e.length),
            }
            for e in f.graph.edges
        ],
        "metadata": dict(metadata or {}),
    }


def save_framework(f: PeriodicFramework, path, metadata=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(framework_to_dict(f, metadata)))


def _check_unknown(doc, allowed, where, strict):
    unknown = set(doc) - allowed
    if unknown:
        msg = f"unknown fields in {where}: {sorted(unknown)}"
        if strict:
            raise ParseError(msg)
        warnings.warn(msg)


def framework_from_dict(doc: dict, strict=False):
    if not isinstance(doc, dict):
        raise ParseError("framework document must be an object")
    _check_unknown(doc, _FRAMEWORK_KEYS, "framework", strict)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION}")
    try:
        dim = int(doc["dim"])
        vertices = doc["vertices"]
        lattice_cols = doc["lattice"]
        edge_docs = doc.get("edges", [])
    except KeyError as exc:
        raise ParseError(f"missing required field {exc}") from exc

    positions = np.zeros((len(vertices), dim))
    for k, vdoc in enumerate(vertices):
        _check_unknown(vdoc, _VERTEX_KEYS, f"vertex {k}", strict)
        if int(vdoc.get("id", -1)) != k:
            raise ParseError(f"vertex {k} must carry id {k}, got {vdoc.get('id')!r}")
        pos = vdoc["position"]
        if len(pos) != dim:
            raise ParseError(f"vertex {k} position has {len(pos)} coordinates, expected {dim}")
        positions[k] = pos

    lam = np.array(lattice_cols, dtype=float)
    if lam.shape != (dim, dim):
        raise ParseError(f"lattice must be {dim} generator columns of length {dim}")
    lam = lam.T  # stored as list of generator columns

    edges = []
    for k, edoc in enumerate(edge_docs):
        _check_unknown(edoc, _EDGE_KEYS, f"edge {k}", strict)
        u, v = int(edoc["u"]), int(edoc["v"])
        if not (0 <= u < len(vertices)) or not (0 <= v < len(vertices)):
            raise ParseError(
                f"edge {k} references vertex id {max(u, v)} outside 0..{len(vertices) - 1}"
            )
        gamma = tuple(int(g) for g in edoc["gamma"])
        if len(gamma) != dim:
            raise ParseError(f"edge {k} marking has {len(gamma)} entries, expected {dim}")
        if "length" in edoc:
            length = float(edoc["length"])
        else:
            length = float(
                np.linalg.norm(positions[v] + lam @ np.array(gamma, float) - positions[u])
            )
        edges.append(EdgeOrbit(u, v, gamma, length))

    graph = QuotientGraph(dim, len(vertices), tuple(edges))
    fw = PeriodicFramework(graph, positions, LinearMap.from_matrix(lam))
    bad = validate(fw)
    if bad:
        raise ValidationFailure(bad)
    return fw, dict(doc.get("metadata", {}))


def load_framework(path, strict=False):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return framework_from_dict(doc, strict=strict)


# ---------------------------------------------------------------------------
# path files
# ---------------------------------------------------------------------------


def path_to_dict(path: DeformationPath, samples=None, metadata=None) -> dict:
    pts = path.sampled(samples)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "path",
        "framework": framework_to_dict(path.framework0),
        "samples": [
            {
                "tau": float(s.tau),
                "positions": [[float(x) for x in row] for row in s.positions],
                "lattice": [[float(x) for x in s.lattice[:, j]] for j in range(s.lattice.shape[0])],
            }
            for s in pts
        ],
        "metadata": dict(metadata or {}),
    }


def save_path(path: DeformationPath, file_path, samples=None, metadata=None):
    with open(file_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(path_to_dict(path, samples, metadata)))


def load_path(file_path, strict=False) -> DeformationPath:
    with open(file_path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if doc.get("kind") != "path":
        raise ParseError("not a path file (kind != 'path')")
    fw, _ = framework_from_dict(doc["framework"], strict=strict)
    samples = []
    for sdoc in doc["samples"]:
        lat = np.array(sdoc["lattice"], dtype=float).T
        samples.append((float(sdoc["tau"]), np.array(sdoc["positions"], dtype=float), lat))
    return DeformationPath.from_samples(fw, samples)


# ---------------------------------------------------------------------------
# Gram-trace CSV
# ---------------------------------------------------------------------------


def _upper_names(d):
    return [f"w{i + 1}{j + 1}" for i in range(d) for j in range(i, d)]


def write_gram_trace(path: DeformationPath, csv_path, samples=None):
    """Columns: tau, upper triangle of the Gram matrix, its determinant,
    and the smallest eigenvalue of the Gram velocity."""
    pts = path.sampled(samples)
    tangents = _gram_tangents(path, pts)
    d = path.framework0.dim
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau"] + _upper_names(d) + ["det", "min_eig_rate"])
        for s, rate in zip(pts, tangents):
            g = path.gram_at(s)
            upper = [g[i, j] for i in range(d) for j in range(i, d)]
            row = (
                [s.tau]
                + upper
                + [float(np.linalg.det(g)), float(jacobi_eigh(0.5 * (rate + rate.T))[0][0])]
            )
            writer.writerow([_fmt_number(x) for x in row])


def read_gram_trace(csv_path):
    """Returns (taus, grams) reconstructed from a trace file."""
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        wcols = [k for k, name in enumerate(header) if name.startswith("w")]
        count = len(wcols)
        d = int(round((np.sqrt(8 * count + 1) - 1) / 2))
        if d * (d + 1) // 2 != count:
            raise ParseError(f"trace has {count} Gram columns, not a triangular count")
        taus, grams = [], []
        for row in reader:
            taus.append(float(row[0]))
            g = np.zeros((d, d))
            vals = iter(float(row[k]) for k in wcols)
            for i in range(d):
                for j in range(i, d):
                    g[i, j] = g[j, i] = next(vals)
            grams.append(g)
    return taus, grams
