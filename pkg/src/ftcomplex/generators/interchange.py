"""JSON interchange format for templates and explicit complexes.

Document layout::

    {"name": ..., "dims": [Lx, Ly, Lz] (optional),
     "vertices": [...], "edges": [[[v, [dx,dy,dz]], [v, [dx,dy,dz]]], ...],
     "faces": [[[e, off], ...], ...], "cells": [[[f, off], ...], ...],
     "embedding": [[x, y, z], ...] (optional)}

How the document is read:

* no ``dims`` and some nonzero offset: a periodic unit-cell template;
* no ``dims`` and all offsets zero: an explicit complex without torus
  wraps (homology is then unavailable from wraps);
* ``dims`` present: an explicit complex on that torus, offsets being the
  torus wraps of each incidence.  This is what :func:`export` writes for a
  :class:`CellComplex` so that a round trip loses nothing.

Omitting ``cells`` gives the 2d sub-format.
"""

from __future__ import annotations

import json
from collections import Counter

import numpy as np

from ..complex import CellComplex, Incidence, UnitCellTemplate
from ..errors import ConsistencyError, ParseError

__all__ = ["parse_interchange", "export", "dumps"]

_KEYS = {"name", "dims", "vertices", "edges", "faces", "cells", "embedding"}


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"expected an integer, got {x!r}", where)
    return x


def _offset(x, where):
    if not isinstance(x, list) or len(x) != 3:
        raise ParseError(f"expected a 3-vector offset, got {x!r}", where)
    return tuple(_int(v, f"{where}[{i}]") for i, v in enumerate(x))


def _refs(rows, field, bound, child):
    if not isinstance(rows, list):
        raise ParseError("expected a list", field)
    out = []
    for i, row in enumerate(rows):
        where = f"{field}[{i}]"
        if not isinstance(row, list):
            raise ParseError("expected a list of [index, offset] pairs", where)
        items = []
        for j, it in enumerate(row):
            w = f"{where}[{j}]"
            if not isinstance(it, list) or len(it) != 2:
                raise ParseError("expected [index, offset]", w)
            k = _int(it[0], f"{w}[0]")
            if not 0 <= k < bound:
                raise ConsistencyError(f"{field[:-1]} {i} references missing {child} {k}", where)
            items.append((k, _offset(it[1], f"{w}[1]")))
        out.append(tuple(items))
    return out


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _check_closed(rows, child_rows, what, part):
    for i, row in enumerate(rows):
        par: Counter = Counter()
        for k, off in row:
            for c, o in child_rows[k]:
                par[(c, _add(off, o))] ^= 1
        if any(par.values()):
            raise ConsistencyError(f"{what} {i} has an open {part} cycle", f"{what}s[{i}]")


def parse_interchange(data) -> UnitCellTemplate | CellComplex:
    """Parse an interchange document given as bytes or text."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}", "bytes") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "document")
    extra = set(doc) - _KEYS
    if extra:
        raise ParseError(f"unknown fields {sorted(extra)}", "document")
    for key in ("vertices", "edges", "faces"):
        if key not in doc:
            raise ParseError("missing required field", key)
    name = doc.get("name", "unnamed")
    if not isinstance(name, str):
        raise ParseError("name must be a string", "name")
    verts = doc["vertices"]
    if not isinstance(verts, list):
        raise ParseError("expected a list", "vertices")
    nv = len(verts)

    edges = _refs(doc["edges"], "edges", nv, "vertex")
    for i, e in enumerate(edges):
        if len(e) != 2:
            raise ParseError("an edge needs exactly two endpoints", f"edges[{i}]")
    faces = _refs(doc["faces"], "faces", len(edges), "edge")
    for i, f in enumerate(faces):
        if not f:
            raise ConsistencyError(f"face {i} is empty", f"faces[{i}]")
    _check_closed(faces, edges, "face", "edge")
    dim = 2
    cells = ()
    if "cells" in doc:
        dim = 3
        cells = _refs(doc["cells"], "cells", len(faces), "face")
        _check_closed(cells, faces, "cell", "face")

    coords = None
    if "embedding" in doc and doc["embedding"] is not None:
        emb = doc["embedding"]
        if not isinstance(emb, list) or len(emb) != nv:
            raise ParseError("embedding must list one point per vertex", "embedding")
        try:
            coords = tuple(tuple(float(x) for x in p) for p in emb)
        except (TypeError, ValueError):
            raise ParseError("embedding entries must be numeric", "embedding") from None

    dims = doc.get("dims")
    if dims is not None:
        if not isinstance(dims, list) or len(dims) != 3:
            raise ParseError("dims must be three integers", "dims")
        dims = tuple(_int(d, f"dims[{i}]") for i, d in enumerate(dims))

    periodic = any(o != (0, 0, 0) for rows in (edges, faces, cells) for r in rows for _, o in r)
    if dims is None and periodic:
        return UnitCellTemplate(
            name=name, vertices=tuple(verts), edges=tuple(edges), faces=tuple(faces),
            cells=tuple(cells), coords=coords, dim=dim,
        )
    return CellComplex(
        name=name,
        n_vertices=nv,
        bd1=Incidence.from_rows(edges),
        bd2=Incidence.from_rows(faces),
        bd3=Incidence.from_rows(cells) if dim == 3 else None,
        dims=dims,
        coords=None if coords is None else np.asarray(coords, dtype=float),
    )


def _rows(inc: Incidence):
    return [[[int(c), [int(x) for x in s]] for c, s in inc.items(i)] for i in range(inc.n)]


def export(obj) -> dict:
    """Document dictionary for a template or complex (see module docs)."""
    if isinstance(obj, UnitCellTemplate):
        doc = {
            "name": obj.name,
            "vertices": list(range(len(obj.vertices))),
            "edges": [[[int(v), list(o)] for v, o in e] for e in obj.edges],
            "faces": [[[int(x), list(o)] for x, o in f] for f in obj.faces],
        }
        if obj.dim == 3:
            doc["cells"] = [[[int(x), list(o)] for x, o in c] for c in obj.cells]
        if obj.coords is not None:
            doc["embedding"] = [list(map(float, p)) for p in obj.coords]
        return doc
    if isinstance(obj, CellComplex):
        doc = {"name": obj.name}
        if obj.dims is not None:
            doc["dims"] = [int(d) for d in obj.dims]
        doc["vertices"] = list(range(obj.n_vertices))
        doc["edges"] = _rows(obj.bd1)
        doc["faces"] = _rows(obj.bd2)
        if obj.bd3 is not None:
            doc["cells"] = _rows(obj.bd3)
        if obj.coords is not None:
            doc["embedding"] = [[float(x) for x in p] for p in obj.coords]
        return doc
    raise TypeError(f"cannot export {type(obj).__name__}")


def dumps(obj, indent: int | None = None) -> str:
    return json.dumps(export(obj), indent=indent)
