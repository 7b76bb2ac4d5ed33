"""JSON file formats for channels, instruments, and states.

Complex entries are encoded as two-element [re, im] arrays so files stay
diff-friendly and parseable without complex-literal syntax. Channel payloads
come in two representations: "kraus" (a list of weighted operators) and
"dynamical_matrix" (the dim^2 x dim^2 matrix itself). Structural problems
raise ParseError; files that parse but break a physical invariant raise
ValidationError naming the invariant.
"""

from __future__ import annotations

import json
import numbers

import numpy as np

from .channel import DensityMatrix, DynamicalMap, map_from_kraus
from .errors import ParseError, ValidationError
from .instrument import Instrument

FORMAT_VERSION = "1"

# Hermiticity gate applied to dynamical matrices read from files.
LOAD_HERMITICITY_TOL = 1e-8


def encode_matrix(m) -> list:
    """Nested lists with each complex entry as a [re, im] pair."""
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def decode_matrix(obj, where: str) -> np.ndarray:
    """Parse nested [re, im] lists back into a complex matrix."""
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{where}: expected a non-empty list of rows")
    width = None
    rows = []
    for r, row in enumerate(obj):
        if not isinstance(row, list):
            raise ParseError(f"{where}[{r}]: expected a list of [re, im] pairs")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{where}[{r}]: row length {len(row)} differs from {width}")
        vals = []
        for c, entry in enumerate(row):
            ok = (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(x, numbers.Real) for x in entry)
            )
            if not ok:
                raise ParseError(f"{where}[{r}][{c}]: expected a [re, im] pair")
            vals.append(complex(entry[0], entry[1]))
        rows.append(vals)
    return np.array(rows, dtype=complex)


def _read_document(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object at top level")
    version = doc.get("format_version")
    if str(version) != FORMAT_VERSION:
        raise ParseError(
            f"{path}: unsupported format_version {version!r}, expected {FORMAT_VERSION!r}"
        )
    return doc


def _read_dim(doc: dict, path) -> int:
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{path}: 'dim' must be a positive integer")
    return dim


def _decode_channel_payload(obj: dict, dim: int, where: str) -> DynamicalMap:
    representation = obj.get("representation")
    data = obj.get("data")
    if representation == "kraus":
        if not isinstance(data, list) or not data:
            raise ParseError(f"{where}: kraus data must be a non-empty list")
        terms = []
        for k, item in enumerate(data):
            if not isinstance(item, dict) or "matrix" not in item:
                raise ParseError(f"{where}: kraus term {k} must be an object with 'matrix'")
            weight = item.get("weight", 1.0)
            if not isinstance(weight, numbers.Real):
                raise ParseError(f"{where}: kraus term {k} weight must be real")
            op = decode_matrix(item["matrix"], f"{where} kraus term {k}")
            if op.shape != (dim, dim):
                raise ValidationError(
                    f"{where}: kraus operator {k} has shape {op.shape}, "
                    f"expected ({dim}, {dim})"
                )
            terms.append((float(weight), op))
        return map_from_kraus(terms, dim)
    if representation == "dynamical_matrix":
        bmat = decode_matrix(data, f"{where} dynamical matrix")
        if bmat.shape != (dim * dim, dim * dim):
            raise ValidationError(
                f"{where}: dynamical matrix has shape {bmat.shape}, "
                f"expected ({dim * dim}, {dim * dim})"
            )
        return DynamicalMap(bmat, tol=LOAD_HERMITICITY_TOL)
    raise ParseError(
        f"{where}: representation must be 'kraus' or 'dynamical_matrix', "
        f"got {representation!r}"
    )


def load_channel(path) -> DynamicalMap:
    """Read a channel spec file into a dynamical map."""
    doc = _read_document(path)
    dim = _read_dim(doc, path)
    return _decode_channel_payload(doc, dim, str(path))


def save_channel_spec(path, dmap: DynamicalMap, metadata: dict = None) -> None:
    """Write a channel as a dynamical-matrix spec file."""
    doc = {
        "format_version": FORMAT_VERSION,
        "dim": dmap.dim,
        "representation": "dynamical_matrix",
        "data": encode_matrix(dmap.bmat),
    }
    if metadata:
        doc["metadata"] = metadata
    _write_document(path, doc)


def load_instrument(path) -> Instrument:
    """Read an instrument spec file into an Instrument."""
    doc = _read_document(path)
    dim = _read_dim(doc, path)
    outcomes = doc.get("outcomes")
    if not isinstance(outcomes, list) or not outcomes:
        raise ParseError(f"{path}: 'outcomes' must be a non-empty list")
    maps = []
    for k, item in enumerate(outcomes):
        if not isinstance(item, dict) or not isinstance(item.get("label"), str):
            raise ParseError(f"{path}: outcome {k} must be an object with a 'label'")
        label = item["label"]
        maps.append((label, _decode_channel_payload(item, dim, f"{path} outcome {label!r}")))
    padded_index = doc.get("padded_index")
    if padded_index is not None and (
        not isinstance(padded_index, int) or isinstance(padded_index, bool)
    ):
        raise ParseError(f"{path}: 'padded_index' must be an integer when present")
    return Instrument(dim=dim, maps=tuple(maps), padded_index=padded_index)


def save_instrument_spec(path, inst: Instrument, metadata: dict = None) -> None:
    """Write an instrument with every outcome in dynamical-matrix form."""
    outcomes = []
    for label, dmap in inst.maps:
        outcomes.append(
            {
                "label": label,
                "representation": "dynamical_matrix",
                "data": encode_matrix(dmap.bmat),
            }
        )
    doc = {
        "format_version": FORMAT_VERSION,
        "dim": inst.dim,
        "outcomes": outcomes,
    }
    if inst.padded_index is not None:
        doc["padded_index"] = inst.padded_index
    if metadata:
        doc["metadata"] = metadata
    _write_document(path, doc)


def load_state(path) -> DensityMatrix:
    """Read a state spec file into a DensityMatrix."""
    doc = _read_document(path)
    dim = _read_dim(doc, path)
    mat = decode_matrix(doc.get("matrix"), f"{path} state matrix")
    if mat.shape != (dim, dim):
        raise ValidationError(
            f"{path}: state matrix has shape {mat.shape}, expected ({dim}, {dim})"
        )
    return DensityMatrix(mat)


def save_state_spec(path, rho: DensityMatrix, metadata: dict = None) -> None:
    """Write a density matrix as a state spec file."""
    doc = {
        "format_version": FORMAT_VERSION,
        "dim": rho.dim,
        "matrix": encode_matrix(rho.mat),
    }
    if metadata:
        doc["metadata"] = metadata
    _write_document(path, doc)


def _write_document(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
