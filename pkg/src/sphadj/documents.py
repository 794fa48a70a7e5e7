"""JSON documents for matrices, complexes, diagrams, algebras and reports.

Every integer array is stored explicitly.  Readers validate structure and
raise :class:`DocumentError` on malformed input; mathematical validation
(d^2 = 0, functoriality, algebra identities) happens in the constructors.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .algebras import GradedAlgebra
from .complexes import ChainComplex, ChainMap
from .errors import DocumentError
from .linalg import Matrix
from .posets import FinitePoset, PosetDiagram, sphere_poset

FORMAT_VERSION = 1


def _require(doc: Mapping, key: str, kind: type | tuple = object):
    if not isinstance(doc, Mapping) or key not in doc:
        raise DocumentError(f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise DocumentError(f"field {key!r} has the wrong type")
    return value


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DocumentError(f"{what} must be an integer, got {x!r}")
    return x


# -- matrices -----------------------------------------------------------------


def matrix_to_doc(m: Matrix) -> dict:
    return {"p": m.p, "shape": [m.rows, m.cols], "rows": m.tolist()}


def matrix_from_doc(doc: Mapping, p: int | None = None) -> Matrix:
    mp = _int(_require(doc, "p"), "p") if "p" in doc else p
    if mp is None:
        raise DocumentError("matrix document without a modulus")
    if p is not None and mp != p:
        raise DocumentError(f"matrix over F_{mp} inside a document over F_{p}")
    shape = _require(doc, "shape", list)
    rows = _require(doc, "rows", list)
    return _nested_matrix(mp, rows, shape)


def _nested_matrix(p: int, rows: Any, shape: Any = None) -> Matrix:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise DocumentError("matrix rows must be a list of lists")
    for r in rows:
        for x in r:
            _int(x, "matrix entry")
    if shape is not None:
        if len(shape) != 2:
            raise DocumentError("shape must have two entries")
        r, c = (_int(s, "shape") for s in shape)
        if len(rows) != r or any(len(row) != c for row in rows):
            raise DocumentError(f"matrix rows do not match shape {shape}")
        return Matrix(p, np.array(rows, dtype=np.int64).reshape(r, c), shape=(r, c))
    widths = {len(row) for row in rows}
    if len(widths) > 1:
        raise DocumentError("ragged matrix rows")
    return Matrix(p, rows)


# -- complexes and maps -------------------------------------------------------


def complex_to_doc(c: ChainComplex) -> dict:
    return {
        "type": "complex",
        "p": c.p,
        "degrees": c.degrees,
        "dims": [c.dim(i) for i in c.degrees],
        "differentials": {str(i): m.tolist() for i, m in c.differentials.items()},
    }


def complex_from_doc(doc: Mapping, p: int | None = None) -> ChainComplex:
    cp = _int(_require(doc, "p"), "p")
    if p is not None and cp != p:
        raise DocumentError(f"complex over F_{cp} inside a document over F_{p}")
    degrees = [_int(d, "degree") for d in _require(doc, "degrees", list)]
    dims = [_int(n, "dimension") for n in _require(doc, "dims", list)]
    if len(degrees) != len(dims) or len(set(degrees)) != len(degrees):
        raise DocumentError("degrees and dims must align and degrees must be distinct")
    dim_of = dict(zip(degrees, dims))
    diffs = {}
    for key, rows in dict(doc.get("differentials", {})).items():
        try:
            i = int(key)
        except ValueError:
            raise DocumentError(f"differential key {key!r} is not a degree") from None
        diffs[i] = _nested_matrix(cp, rows, [dim_of.get(i - 1, 0), dim_of.get(i, 0)])
    return ChainComplex(cp, dim_of, diffs)


def map_to_doc(f: ChainMap) -> dict:
    return {
        "type": "chain-map",
        "source": complex_to_doc(f.source),
        "target": complex_to_doc(f.target),
        "components": {str(i): m.tolist() for i, m in f.components.items()},
    }


def map_from_doc(doc: Mapping) -> ChainMap:
    src = complex_from_doc(_require(doc, "source", dict))
    tgt = complex_from_doc(_require(doc, "target", dict), src.p)
    return ChainMap(src, tgt, _components(src, tgt, doc.get("components", {})))


def _components(src: ChainComplex, tgt: ChainComplex, comps: Mapping) -> dict[int, Matrix]:
    if not isinstance(comps, Mapping):
        raise DocumentError("components must be an object keyed by degree")
    out = {}
    for key, rows in comps.items():
        try:
            i = int(key)
        except ValueError:
            raise DocumentError(f"component key {key!r} is not a degree") from None
        out[i] = _nested_matrix(src.p, rows, [tgt.dim(i), src.dim(i)])
    return out


# -- diagrams -----------------------------------------------------------------


def _label(x) -> str:
    return str(x)


def poset_to_doc(poset: FinitePoset):
    if poset.sphere_dimension is not None:
        return f"P_{poset.sphere_dimension}"
    return {"elements": list(poset.elements), "covers": [list(c) for c in poset.covers()]}


def poset_from_doc(doc) -> FinitePoset:
    if isinstance(doc, str):
        if not doc.startswith("P_"):
            raise DocumentError(f"unknown poset name {doc!r}")
        try:
            n = int(doc[2:])
        except ValueError:
            raise DocumentError(f"unknown poset name {doc!r}") from None
        return sphere_poset(n)
    elements = _require(doc, "elements", list)
    for x in elements:
        if not isinstance(x, (int, str)) or isinstance(x, bool):
            raise DocumentError("poset elements must be integers or strings")
    covers = []
    for c in _require(doc, "covers", list):
        if not isinstance(c, list) or len(c) != 2:
            raise DocumentError("each cover must be a pair [x, y]")
        covers.append(tuple(c))
    return FinitePoset.from_covers(elements, covers)


def diagram_to_doc(f: PosetDiagram) -> dict:
    covers = f.base.covers()
    return {
        "type": "diagram",
        "p": f.p,
        "poset": poset_to_doc(f.base),
        "stalks": {_label(x): complex_to_doc(f.at(x)) for x in f.base.elements},
        "transitions": [
            {"from": x, "to": y, "components": {str(i): m.tolist() for i, m in f.along(x, y).components.items()}}
            for x, y in covers
        ],
    }


def diagram_from_doc(doc: Mapping) -> PosetDiagram:
    base = poset_from_doc(_require(doc, "poset", (str, dict)))
    p = _int(_require(doc, "p"), "p")
    stalk_docs = _require(doc, "stalks", dict)
    by_label = {_label(x): x for x in base.elements}
    stalks = {}
    for key, cdoc in stalk_docs.items():
        if key not in by_label:
            raise DocumentError(f"stalk given for unknown element {key!r}")
        stalks[by_label[key]] = complex_from_doc(cdoc, p)
    missing = [x for x in base.elements if x not in stalks]
    if missing:
        raise DocumentError(f"no stalk for elements {missing}")
    cover_maps = {}
    for t in _require(doc, "transitions", list):
        x, y = _require(t, "from"), _require(t, "to")
        x, y = by_label.get(_label(x)), by_label.get(_label(y))
        if x is None or y is None:
            raise DocumentError(f"transition {t.get('from')!r} -> {t.get('to')!r} mentions an unknown element")
        cover_maps[(x, y)] = ChainMap(stalks[x], stalks[y], _components(stalks[x], stalks[y], t.get("components", {})))
    return PosetDiagram.from_covers(base, stalks, cover_maps)


# -- algebras -----------------------------------------------------------------


def algebra_to_doc(a: GradedAlgebra) -> dict:
    return {
        "type": "algebra",
        "p": a.p,
        "name": a.name,
        "basis": [{"label": lbl, "degree": d} for lbl, d in a.basis],
        "unit": a.unit.tolist(),
        "mult": a.mult.tolist(),
    }


def algebra_raw_from_doc(doc: Mapping) -> dict:
    """Parse an algebra document into constructor arguments without validating the identities."""
    p = _int(_require(doc, "p"), "p")
    basis = []
    for b in _require(doc, "basis", list):
        basis.append((str(_require(b, "label")), _int(_require(b, "degree"), "degree")))
    n = len(basis)
    unit = [_int(x, "unit coordinate") for x in _require(doc, "unit", list)]
    mult = _require(doc, "mult", list)
    try:
        arr = np.array(mult, dtype=np.int64)
    except (ValueError, TypeError):
        raise DocumentError("mult must be an n x n x n integer array") from None
    if arr.shape != (n, n, n) or len(unit) != n:
        raise DocumentError(f"mult must have shape {(n, n, n)} and unit length {n}")
    name = doc.get("name")
    return {"p": p, "basis": basis, "mult": arr, "unit": unit, "name": name if isinstance(name, str) else None}


def algebra_from_doc(doc: Mapping) -> GradedAlgebra:
    raw = algebra_raw_from_doc(doc)
    return GradedAlgebra(raw["p"], raw["basis"], raw["mult"], raw["unit"], name=raw["name"])


# -- files --------------------------------------------------------------------


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from None


def document_type(doc: Any) -> str:
    """The ``type`` field, or a guess from the keys present."""
    if not isinstance(doc, Mapping):
        raise DocumentError("document must be a JSON object")
    if isinstance(doc.get("type"), str):
        return doc["type"]
    if "checks" in doc:
        return "report"
    if "mult" in doc:
        return "algebra"
    if "stalks" in doc:
        return "diagram"
    if "source" in doc and "target" in doc:
        return "chain-map"
    if "degrees" in doc:
        return "complex"
    raise DocumentError("cannot tell what kind of document this is")
