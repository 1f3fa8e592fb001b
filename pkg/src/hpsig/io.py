"""JSON readers and writers for complexes, groups and cocycles."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .covers import FiniteGroupData, Irrep
from .errors import MalformedInput
from .simplicial import OrientedSimplicialComplex, build_complex

FIXTURE_DIR = Path(__file__).with_name("fixtures")


def fixture_path(name: str) -> Path:
    p = FIXTURE_DIR / name
    return p if p.suffix else p.with_suffix(".json")


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# --- complexes ----------------------------------------------------------------------


def complex_from_json(obj) -> OrientedSimplicialComplex:
    if not isinstance(obj, dict) or "maximal_simplices" not in obj:
        raise MalformedInput("complex file needs a 'maximal_simplices' list")
    simplices = obj["maximal_simplices"]
    if not isinstance(simplices, list) or not all(isinstance(s, list) for s in simplices):
        raise MalformedInput("'maximal_simplices' must be a list of vertex lists")
    return build_complex([tuple(s) for s in simplices], name=str(obj.get("name", "")))


def complex_to_json(K: OrientedSimplicialComplex) -> dict:
    return {"name": K.name, "maximal_simplices": [list(s) for s in K.maximal_labelled()]}


def load_complex(path) -> OrientedSimplicialComplex:
    return complex_from_json(read_json(path))


def load_fixture(name: str) -> OrientedSimplicialComplex:
    return load_complex(fixture_path(name))


# --- groups -------------------------------------------------------------------------


def _complex_entries(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.shape[-1] != 2:
        raise MalformedInput("irrep entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def group_from_json(obj) -> FiniteGroupData:
    try:
        elements = obj["elements"]
        table = obj["table"]
    except (KeyError, TypeError):
        raise MalformedInput("group file needs 'elements' and 'table'") from None
    elements = [tuple(e) if isinstance(e, list) else e for e in elements]
    irreps = None
    if obj.get("irreps"):
        irreps = []
        for r in obj["irreps"]:
            mats = _complex_entries(r["matrices"])
            dim = int(r.get("dim", mats.shape[-1]))
            irreps.append(Irrep(str(r["label"]), dim, mats.reshape(len(elements), dim, dim)))
    return FiniteGroupData.from_table(elements, table, irreps=irreps, name=str(obj.get("name", "")))


def group_to_json(G: FiniteGroupData, include_irreps: bool | None = None) -> dict:
    out = {
        "name": G.name,
        "elements": [list(e) if isinstance(e, tuple) else e for e in G.elements],
        "table": G.table.tolist(),
    }
    if include_irreps is None:
        include_irreps = not G.is_abelian
    if include_irreps:
        out["irreps"] = [
            {
                "label": r.label,
                "dim": r.dim,
                "matrices": np.stack([r.matrices.real, r.matrices.imag], axis=-1).tolist(),
            }
            for r in G.irreps
        ]
    return out


def load_group(path) -> FiniteGroupData:
    return group_from_json(read_json(path))


# --- cocycles -----------------------------------------------------------------------


def cocycle_from_json(obj) -> list:
    """``[[v, w, g], ...]`` to ``[((v, w), g), ...]``; ``g`` may be an int or an int vector."""
    if isinstance(obj, dict):
        obj = obj.get("cocycle")
    if not isinstance(obj, list):
        raise MalformedInput("cocycle file must be a list of [v, w, g] triples")
    out = []
    for item in obj:
        if not isinstance(item, list) or len(item) != 3:
            raise MalformedInput(f"bad cocycle entry {item!r}")
        v, w, g = item
        out.append(((v, w), tuple(g) if isinstance(g, list) else g))
    return out


def cocycle_to_json(cocycle) -> list:
    items = cocycle.items() if isinstance(cocycle, dict) else cocycle
    return [[v, w, list(g) if isinstance(g, tuple) else g] for (v, w), g in items]


def load_cocycle(path) -> list:
    return cocycle_from_json(read_json(path))


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")
