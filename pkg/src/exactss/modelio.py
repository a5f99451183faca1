"""JSON model files.

Every document is a UTF-8 JSON object with ``"schema": 1`` and a ``"type"`` tag.
Matrices are row-major arrays of integer strings; tables of matrices or ranks
are keyed by comma-joined decimal indices such as ``"0,1"``.  A missing entry
in a table means zero.

``filtered_complex``::

    {"schema": 1, "type": "filtered_complex",
     "lo": 0, "ranks": [1, 1], "d": {"0": [["2"]]},
     "pmin": 0, "pmax": 2, "F": {"1,0": [], "1,1": [["1"]]},
     "dec": {...optional, same layout as F...}}

``F["p,n"]`` lists generators of ``F^p C^n`` as rows; levels outside the table
are the whole group.  ``dec`` (with ``dec_pmin``/``dec_pmax``) overrides the
computed décalage, which is how a corrupted comparison fixture is written.

``double_complex``: ``amax``, ``bmin``, ``bmax``, ``ranks{"a,b"}``,
``d1{"a,b"}``, ``d2{"a,b"}``.

``cosimplicial_abelian``: ``top``, ``ranks[n]``, ``coface{"n,i"}`` for
``d^i: X^{n-1} -> X^n`` and ``codeg{"n,i"}`` for ``s^i: X^{n+1} -> X^n``.

``cosimplicial_complex``: ``top``, ``bmin``, ``bmax``, ``groups{"b"}`` holding
the three cosimplicial fields, and ``d{"n,b"}`` for ``X^n_b -> X^n_{b+1}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .complexes import CochainComplex, DoubleComplex, FilteredComplex, ValidationError
from .cosimplicial import CosimplicialAbGroup, CosimplicialComplex
from .zlinalg import IntMatrix, Lattice

SCHEMA_VERSION = 1
TYPES = ("filtered_complex", "double_complex", "cosimplicial_abelian", "cosimplicial_complex")


@dataclass(frozen=True)
class FilteredModel:
    """A filtered complex, optionally with a claimed décalage."""

    filtered: FilteredComplex
    dec: FilteredComplex | None = None


# ---------------------------------------------------------------------------
# Primitive readers


def _int(x, where: str) -> int:
    # integers may arrive as strings (preferred) or plain JSON numbers
    if isinstance(x, bool):
        raise ValidationError("expected an integer", where)
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            pass
    raise ValidationError(f"expected an integer, got {x!r}", where)


def _field(doc: dict, key: str, where: str, default=None, required: bool = True):
    if key in doc:
        return doc[key]
    if required and default is None:
        raise ValidationError(f"missing field {key!r}", where)
    return default


def _matrix(rows_data, nrows: int, ncols: int, where: str) -> IntMatrix:
    if not isinstance(rows_data, list):
        raise ValidationError("matrix must be an array of rows", where)
    if nrows == 0 or ncols == 0:
        if any(row for row in rows_data) or (rows_data and len(rows_data) != nrows):
            raise ValidationError(f"expected a {nrows}x{ncols} matrix", where)
        return IntMatrix.zeros(nrows, ncols)
    if len(rows_data) != nrows:
        raise ValidationError(f"expected {nrows} rows, got {len(rows_data)}", where)
    rows = []
    for i, row in enumerate(rows_data):
        if not isinstance(row, list) or len(row) != ncols:
            raise ValidationError(f"expected {ncols} entries", f"{where}/{i}")
        rows.append([_int(x, f"{where}/{i}/{j}") for j, x in enumerate(row)])
    return IntMatrix.from_rows(rows)


def _generators(rows_data, rank: int, where: str) -> Lattice:
    if not isinstance(rows_data, list):
        raise ValidationError("generators must be an array of rows", where)
    vecs = []
    for i, row in enumerate(rows_data):
        if not isinstance(row, list) or len(row) != rank:
            raise ValidationError(f"generator must have {rank} entries", f"{where}/{i}")
        vecs.append({j: v for j, x in enumerate(row) if (v := _int(x, f"{where}/{i}/{j}"))})
    return Lattice.span(rank, vecs)


def _key(s: str, arity: int, where: str) -> tuple:
    parts = s.split(",")
    if len(parts) != arity:
        raise ValidationError(f"index key {s!r} must have {arity} components", where)
    return tuple(_int(x, where) for x in parts)


def _table(doc: dict, name: str, arity: int, where: str) -> dict:
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise ValidationError("expected an object keyed by indices", f"{where}/{name}")
    out = {}
    for k, v in raw.items():
        loc = f"{where}/{name}/{k}"
        key = _key(k, arity, loc)
        out[key[0] if arity == 1 else key] = (v, loc)
    return out


# ---------------------------------------------------------------------------
# Model parsers


def _parse_filtered(doc: dict) -> FilteredModel:
    ranks_raw = _field(doc, "ranks", "", [])
    if not isinstance(ranks_raw, list):
        raise ValidationError("ranks must be an array", "/ranks")
    ranks = [_int(x, f"/ranks/{i}") for i, x in enumerate(ranks_raw)]
    lo = _int(doc.get("lo", 0), "/lo")
    rank = {lo + i: r for i, r in enumerate(ranks)}
    d = {}
    for n, (m, loc) in _table(doc, "d", 1, "").items():
        d[n] = _matrix(m, rank.get(n + 1, 0), rank.get(n, 0), loc)
    C = CochainComplex(lo, tuple(ranks), d)
    F = _filtration(doc, C, "F", "pmin", "pmax")
    dec = None
    if "dec" in doc:
        dec = _filtration(doc, C, "dec", "dec_pmin", "dec_pmax")
    return FilteredModel(F, dec)


def _filtration(doc: dict, C: CochainComplex, name: str, lo_key: str, hi_key: str) -> FilteredComplex:
    pmin = _int(_field(doc, lo_key, ""), f"/{lo_key}")
    pmax = _int(_field(doc, hi_key, ""), f"/{hi_key}")
    filt = {}
    for (p, n), (rows, loc) in _table(doc, name, 2, "").items():
        filt[(p, n)] = _generators(rows, C.rank(n), loc)
    try:
        return FilteredComplex(C, pmin, pmax, filt)
    except ValidationError as exc:
        # FilteredComplex reports locations under /F
        where = exc.where
        if where.startswith("/F/"):
            where = f"/{name}/" + where[3:]
        elif where == "/pmax":
            where = f"/{hi_key}"
        raise ValidationError(exc.reason, where) from None


def _parse_double(doc: dict) -> DoubleComplex:
    amax = _int(doc.get("amax", 0), "/amax")
    bmin = _int(doc.get("bmin", 0), "/bmin")
    bmax = _int(doc.get("bmax", bmin), "/bmax")
    ranks = {k: _int(v, loc) for k, (v, loc) in _table(doc, "ranks", 2, "").items()}
    rk = lambda a, b: ranks.get((a, b), 0)
    d1 = {(a, b): _matrix(m, rk(a + 1, b), rk(a, b), loc)
          for (a, b), (m, loc) in _table(doc, "d1", 2, "").items()}
    d2 = {(a, b): _matrix(m, rk(a, b + 1), rk(a, b), loc)
          for (a, b), (m, loc) in _table(doc, "d2", 2, "").items()}
    return DoubleComplex(amax, bmin, bmax, ranks, d1, d2)


def _parse_group(doc: dict, where: str, top: int | None = None,
                 check: bool = True) -> CosimplicialAbGroup:
    ranks_raw = doc.get("ranks", [])
    if not isinstance(ranks_raw, list):
        raise ValidationError("ranks must be an array", f"{where}/ranks")
    ranks = [_int(x, f"{where}/ranks/{i}") for i, x in enumerate(ranks_raw)]
    if top is None:
        top = _int(doc.get("top", max(len(ranks) - 1, 0)), f"{where}/top")
    if len(ranks) > top + 1:
        raise ValidationError(f"{len(ranks)} ranks for top {top}", f"{where}/ranks")
    ranks += [0] * (top + 1 - len(ranks))
    cof = {(n, i): IntMatrix.zeros(ranks[n], ranks[n - 1])
           for n in range(1, top + 1) for i in range(n + 1)}
    cod = {(n, i): IntMatrix.zeros(ranks[n], ranks[n + 1])
           for n in range(top) for i in range(n + 1)}
    for (n, i), (m, loc) in _table(doc, "coface", 2, where).items():
        if not (1 <= n <= top and 0 <= i <= n):
            raise ValidationError(f"no coface d^{i} into level {n}", loc)
        cof[(n, i)] = _matrix(m, ranks[n], ranks[n - 1], loc)
    for (n, i), (m, loc) in _table(doc, "codeg", 2, where).items():
        if not (0 <= n < top and 0 <= i <= n):
            raise ValidationError(f"no codegeneracy s^{i} into level {n}", loc)
        cod[(n, i)] = _matrix(m, ranks[n], ranks[n + 1], loc)
    try:
        return CosimplicialAbGroup(top, tuple(ranks), cof, cod, check=check)
    except ValidationError as exc:
        raise ValidationError(exc.reason, f"{where}{exc.where}") from None


def _parse_cosimplicial_complex(doc: dict) -> CosimplicialComplex:
    top = _int(_field(doc, "top", ""), "/top")
    bmin = _int(doc.get("bmin", 0), "/bmin")
    bmax = _int(doc.get("bmax", bmin), "/bmax")
    raw = _table(doc, "groups", 1, "")
    groups = {}
    for b in range(bmin, bmax + 1):
        g, loc = raw.get(b, ({}, f"/groups/{b}"))
        if not isinstance(g, dict):
            raise ValidationError("expected an object", loc)
        groups[b] = _parse_group(g, loc, top)
    for b, (_, loc) in raw.items():
        if b not in groups:
            raise ValidationError(f"internal degree {b} outside {bmin}..{bmax}", loc)
    rk = lambda n, b: groups[b].ranks[n] if b in groups and 0 <= n <= top else 0
    d = {}
    for (n, b), (m, loc) in _table(doc, "d", 2, "").items():
        d[(n, b)] = _matrix(m, rk(n, b + 1), rk(n, b), loc)
    return CosimplicialComplex(top, bmin, bmax, groups, d)


def parse_model(doc):
    """Validate a decoded document and build the model it describes."""
    if not isinstance(doc, dict):
        raise ValidationError("top level must be an object", "")
    if "schema" not in doc:
        raise ValidationError("missing field 'schema'", "/schema")
    if doc["schema"] != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema {doc['schema']!r}", "/schema")
    kind = doc.get("type")
    if kind not in TYPES:
        raise ValidationError(f"type must be one of {', '.join(TYPES)}", "/type")
    if kind == "filtered_complex":
        return _parse_filtered(doc)
    if kind == "double_complex":
        return _parse_double(doc)
    if kind == "cosimplicial_abelian":
        return _parse_group(doc, "")
    return _parse_cosimplicial_complex(doc)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                              "") from None
    return parse_model(doc)


def load(path: str | Path):
    """Read and validate a model file.  Raises :class:`ValidationError`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}", "") from None
    return loads(text)


# ---------------------------------------------------------------------------
# Writers


def _mat_out(M: IntMatrix) -> list:
    return [[str(x) for x in row] for row in M.to_rows()]


def _lat_out(L: Lattice) -> list:
    return [[str(v.get(i, 0)) for i in range(L.ambient_rank)] for v in L.vectors()]


def _filt_out(F: FilteredComplex) -> dict:
    return {f"{p},{n}": _lat_out(L) for (p, n), L in sorted(F.filt.items())}


def _group_out(G: CosimplicialAbGroup) -> dict:
    return {
        "ranks": list(G.ranks),
        "coface": {f"{n},{i}": _mat_out(m) for (n, i), m in sorted(G.cofaces.items())
                   if not m.is_zero()},
        "codeg": {f"{n},{i}": _mat_out(m) for (n, i), m in sorted(G.codegs.items())
                  if not m.is_zero()},
    }


def dump_model(model) -> dict:
    """Inverse of :func:`parse_model`; zero matrices are omitted."""
    head = {"schema": SCHEMA_VERSION}
    if isinstance(model, FilteredComplex):
        model = FilteredModel(model)
    if isinstance(model, FilteredModel):
        F = model.filtered
        C = F.complex
        doc = dict(head, type="filtered_complex", lo=C.lo, ranks=list(C.ranks),
                   d={str(n): _mat_out(m) for n, m in sorted(C.d.items())},
                   pmin=F.pmin, pmax=F.pmax, F=_filt_out(F))
        if model.dec is not None:
            doc.update(dec_pmin=model.dec.pmin, dec_pmax=model.dec.pmax, dec=_filt_out(model.dec))
        return doc
    if isinstance(model, DoubleComplex):
        return dict(head, type="double_complex", amax=model.amax, bmin=model.bmin,
                    bmax=model.bmax,
                    ranks={f"{a},{b}": r for (a, b), r in sorted(model.ranks.items())},
                    d1={f"{a},{b}": _mat_out(m) for (a, b), m in sorted(model.d1.items())},
                    d2={f"{a},{b}": _mat_out(m) for (a, b), m in sorted(model.d2.items())})
    if isinstance(model, CosimplicialAbGroup):
        return dict(head, type="cosimplicial_abelian", top=model.top, **_group_out(model))
    if isinstance(model, CosimplicialComplex):
        return dict(head, type="cosimplicial_complex", top=model.top, bmin=model.bmin,
                    bmax=model.bmax,
                    groups={str(b): _group_out(g) for b, g in sorted(model.groups.items())},
                    d={f"{n},{b}": _mat_out(m) for (n, b), m in sorted(model.d.items())
                       if not m.is_zero()})
    raise TypeError(f"cannot serialize {type(model).__name__}")


def dumps(model) -> str:
    return json.dumps(dump_model(model), indent=1, sort_keys=True, ensure_ascii=False) + "\n"
