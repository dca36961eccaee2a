"""JSON formats for matrices, tomographic sets and the various tomograms.

Complex numbers are written as [re, im] pairs.  Each reader checks the keys
it needs and raises :class:`FormatError` naming the expected schema, so a
file of the wrong kind fails loudly instead of half-parsing.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .fock_tomography import FockSpace, PhotonTomogram, PolarGrid
from .operator_space import OperatorMatrix
from .special_functions import HalfInteger, QuadratureRule
from .spin_tomography import SphereQuadrature, SpinTomogramGrid
from .symplectic_tomography import GridWavefunction, SymplecticTomogram, UniformGrid
from .tomographic_sets import Tomogram, TomographicSet

SCHEMAS = {
    "matrix": ("dim", "entries"),
    "set": ("dim", "projectors"),
    "tomogram": ("set", "values"),
    "spin": ("j2", "nodes", "values"),
    "photon": ("nmax", "ncut", "grid", "values"),
    "symplectic": ("xgrid", "munu_nodes", "values"),
    "wavefunction": ("qmin", "qmax", "values"),
}


class FormatError(ValueError):
    pass


def detect_kind(doc: dict) -> str | None:
    """The first schema whose keys are all present, most specific first."""
    for kind in ("tomogram", "spin", "photon", "symplectic", "wavefunction", "set", "matrix"):
        if isinstance(doc, dict) and all(k in doc for k in SCHEMAS[kind]):
            return kind
    return None


def _require(doc: Any, kind: str) -> dict:
    keys = SCHEMAS[kind]
    if not isinstance(doc, dict) or not all(k in doc for k in keys):
        found = detect_kind(doc) if isinstance(doc, dict) else None
        extra = f" (looks like a {found} file)" if found else ""
        raise FormatError(f"expected a {kind} document with keys {list(keys)}{extra}")
    return doc


def encode_complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex_array(data, ndim: int) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except ValueError as exc:  # ragged nesting
        raise FormatError(f"ragged or non-numeric complex array: {exc}") from None
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise FormatError(f"expected a {ndim}-d array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


# -- matrices and sets -------------------------------------------------------

def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"dim": a.shape[0], "entries": encode_complex_array(a)}


def matrix_from_json(doc) -> OperatorMatrix:
    doc = _require(doc, "matrix")
    m = decode_complex_array(doc["entries"], 2)
    if m.shape != (doc["dim"], doc["dim"]):
        raise FormatError(f"entries have shape {m.shape}, dim says {doc['dim']}")
    return OperatorMatrix.hermitian(m)


def _label_out(label):
    return list(label) if isinstance(label, tuple) else label


def _label_in(label):
    return tuple(label) if isinstance(label, list) else label


def set_to_json(tset: TomographicSet) -> dict:
    return {
        "dim": tset.dim,
        "projectors": [encode_complex_array(p.vector) for p in tset.projectors],
        "labels": [_label_out(l) for l in tset.labels],
    }


def set_from_json(doc) -> TomographicSet:
    doc = _require(doc, "set")
    vectors = [decode_complex_array(v, 1) for v in doc["projectors"]]
    for k, v in enumerate(vectors):
        if v.size != doc["dim"]:
            raise FormatError(f"projector {k} has length {v.size}, dim is {doc['dim']}")
    labels = doc.get("labels")
    labels = None if labels is None else [_label_in(l) for l in labels]
    if not vectors:
        return TomographicSet(doc["dim"], [], [])
    return TomographicSet.from_vectors(vectors, labels)


def tomogram_to_json(tom: Tomogram) -> dict:
    return {"set": set_to_json(tom.set), "values": tom.formatted_values()}


def tomogram_from_json(doc) -> Tomogram:
    doc = _require(doc, "tomogram")
    return Tomogram(set_from_json(doc["set"]), np.asarray(doc["values"], dtype=float))


# -- spin -------------------------------------------------------------------

def spin_to_json(grid: SpinTomogramGrid) -> dict:
    nodes = [{"theta": float(t), "phi": float(p), "wtheta": float(wt), "wphi": float(wp)}
             for t, wt in zip(grid.quad.theta.nodes, grid.quad.theta.weights)
             for p, wp in zip(grid.quad.phi.nodes, grid.quad.phi.weights)]
    return {"j2": grid.j.twice_value, "nodes": nodes, "values": grid.values.tolist()}


def spin_from_json(doc) -> SpinTomogramGrid:
    doc = _require(doc, "spin")
    nodes = doc["nodes"]
    try:
        thetas = list(dict.fromkeys((n["theta"], n["wtheta"]) for n in nodes))
        phis = list(dict.fromkeys((n["phi"], n["wphi"]) for n in nodes))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"spin node entries need theta, phi, wtheta, wphi: {exc}") from None
    if len(thetas) * len(phis) != len(nodes):
        raise FormatError("spin nodes do not form a theta x phi product grid")
    th = QuadratureRule(np.array([t for t, _ in thetas]), np.array([w for _, w in thetas]), (0.0, np.pi))
    ph = QuadratureRule(np.array([p for p, _ in phis]), np.array([w for _, w in phis]), (0.0, 2 * np.pi))
    return SpinTomogramGrid(HalfInteger(int(doc["j2"])), SphereQuadrature(th, ph), np.asarray(doc["values"]))


# -- photon -----------------------------------------------------------------

def photon_to_json(tom: PhotonTomogram, nmax: int = 8) -> dict:
    r, wr = tom.grid.radial()
    return {
        "nmax": nmax,
        "ncut": tom.ncut,
        "grid": {
            "radial_nodes": r.tolist(),
            "radial_weights": wr.tolist(),
            "angular_count": tom.grid.n_angular,
            "radius": tom.grid.radius,
        },
        "values": tom.values.tolist(),
    }


def photon_from_json(doc) -> tuple[PhotonTomogram, int]:
    """The tomogram and the requested output truncation nmax."""
    doc = _require(doc, "photon")
    g = doc["grid"]
    grid = PolarGrid(float(g["radius"]), len(g["radial_nodes"]), int(g["angular_count"]))
    r, wr = grid.radial()
    if not (np.allclose(r, g["radial_nodes"], rtol=1e-12, atol=1e-14)
            and np.allclose(wr, g["radial_weights"], rtol=1e-12, atol=1e-14)):
        raise FormatError("photon grid is not the Gauss-Legendre r dr rule this reader rebuilds")
    tom = PhotonTomogram(FockSpace(int(doc["ncut"])), grid, np.asarray(doc["values"]))
    return tom, int(doc["nmax"])


# -- symplectic -------------------------------------------------------------

def _grid_json(g: UniformGrid) -> dict:
    return {"lo": g.lo, "hi": g.hi, "npoints": g.npoints}


def _grid_from(d) -> UniformGrid:
    try:
        return UniformGrid(float(d["lo"]), float(d["hi"]), int(d["npoints"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"grid needs lo, hi, npoints: {exc}") from None


def symplectic_to_json(tom: SymplecticTomogram, ygrid: UniformGrid | None = None) -> dict:
    doc = {
        "xgrid": _grid_json(tom.xgrid),
        "munu_nodes": [[float(m), float(n), float(w)] for (m, n), w in zip(tom.munu_nodes, tom.weights)],
        "values": tom.values.tolist(),
        "scaled": tom.scaled,
    }
    if ygrid is not None:
        doc["ygrid"] = _grid_json(ygrid)
    return doc


def symplectic_from_json(doc) -> tuple[SymplecticTomogram, UniformGrid | None]:
    doc = _require(doc, "symplectic")
    nodes = np.asarray(doc["munu_nodes"], dtype=float)
    if nodes.ndim != 2 or nodes.shape[1] != 3:
        raise FormatError("munu_nodes must be a list of [mu, nu, weight]")
    tom = SymplecticTomogram(_grid_from(doc["xgrid"]), nodes[:, :2], nodes[:, 2],
                             np.asarray(doc["values"]), bool(doc.get("scaled", True)))
    ygrid = _grid_from(doc["ygrid"]) if "ygrid" in doc else None
    return tom, ygrid


def wavefunction_to_json(psi: GridWavefunction) -> dict:
    return {"qmin": psi.qgrid.lo, "qmax": psi.qgrid.hi, "values": encode_complex_array(psi.values)}


def wavefunction_from_json(doc) -> GridWavefunction:
    doc = _require(doc, "wavefunction")
    values = decode_complex_array(doc["values"], 1)
    return GridWavefunction(UniformGrid(float(doc["qmin"]), float(doc["qmax"]), values.size), values)


# -- files ------------------------------------------------------------------

def load_json(path) -> tuple[Any, str]:
    """Parsed document and the sha256 of the raw bytes."""
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if not raw.strip():
        raise FormatError(f"{path}: empty file")
    try:
        return json.loads(raw), digest
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def dump_json(doc, path=None) -> str:
    text = json.dumps(doc, indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
