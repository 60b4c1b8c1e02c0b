"""JSON representation-spec files.

Layout (all labels 1-based, complex entries as ``[re, im]``)::

    {"kind": "graph", "dim": 3,
     "graph": {"vertices": 3, "edges": [[1, 2], [2, 3], [3, 1]]},   # (source, range)
     "sigma": [M, M, M],            # optional for one vertex (defaults to I)
     "A": [M, M, M]}

    {"kind": "single_vertex_kgraph", "dim": 4, "m": [2, 2],
     "theta": {"1,2": {"cycles": [[[1, 1], [2, 2]]], "pairs": [[[1, 2], [2, 1]]]}},
     "rows": [[A1, A2], [B1, B2]]}

    {"kind": "algebra", "dim": 2, "generators": [M, M]}

``theta["i,j"]`` lists pairs ``(l, m) -> (l', m')`` of edge indices for
colors i < j; unlisted pairs are fixed.  Any file may carry ``"name"``,
``"labels"``, an ``"expect"`` block of claimed analysis results and
``"candidates"``: subspaces (lists of vectors) to be tested for minimality.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .graphs import DirectedGraph
from .kgraphs import ThetaError, ThetaKGraph
from .numerics import DEFAULT_TOL, Tolerance
from .reps import GraphRep, KGraphRep, RepresentationError

__all__ = ["ParseError", "RepSpec", "load", "loads", "dumps", "encode_matrix", "encode_rep",
           "encode_algebra", "encode_vectors"]

KINDS = ("graph", "single_vertex_kgraph", "algebra")


class ParseError(ValueError):
    """Malformed or invalid spec file; ``where`` locates the problem."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


@dataclass(frozen=True, eq=False)
class RepSpec:
    kind: str
    obj: Any                      # GraphRep | KGraphRep | list of generator matrices
    dim: int
    name: str = ""
    expect: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    digest: str = ""
    candidates: tuple[np.ndarray, ...] = ()

    @property
    def rep(self) -> GraphRep | KGraphRep:
        if self.kind == "algebra":
            raise TypeError("an algebra spec has no representation")
        return self.obj


def _need(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise ParseError(where, "expected an object")
    if key not in d:
        raise ParseError(where, f"missing field {key!r}")
    return d[key]


def _int(x, where: str, lo: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(where, f"expected an integer, got {x!r}")
    if lo is not None and x < lo:
        raise ParseError(where, f"must be >= {lo}, got {x}")
    return x


def _complex(x, where: str) -> complex:
    ok = (isinstance(x, list) and len(x) == 2
          and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x))
    if not ok:
        raise ParseError(where, f"complex entries must be [re, im], got {x!r}")
    return complex(x[0], x[1])


def _matrix(x, dim: int, where: str) -> np.ndarray:
    if not isinstance(x, list) or len(x) != dim:
        raise ParseError(where, f"expected {dim} rows")
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}[{i}]", f"expected a row of {dim} entries")
        for j, z in enumerate(row):
            out[i, j] = _complex(z, f"{where}[{i}][{j}]")
    return out


def _matrices(x, dim: int, where: str, count: int | None = None) -> list[np.ndarray]:
    if not isinstance(x, list):
        raise ParseError(where, "expected a list of matrices")
    if count is not None and len(x) != count:
        raise ParseError(where, f"expected {count} matrices, got {len(x)}")
    return [_matrix(m, dim, f"{where}[{i}]") for i, m in enumerate(x)]


def _pair(x, where: str) -> tuple[int, int]:
    if not isinstance(x, list) or len(x) != 2:
        raise ParseError(where, f"expected an index pair [l, m], got {x!r}")
    return (_int(x[0], f"{where}[0]", 1) - 1, _int(x[1], f"{where}[1]", 1) - 1)


def _theta(x, k: int, where: str) -> dict:
    if not isinstance(x, dict):
        raise ParseError(where, "expected an object keyed by 'i,j'")
    out = {}
    for key, body in x.items():
        w = f"{where}[{key!r}]"
        try:
            i, j = (int(t) - 1 for t in key.split(","))
        except ValueError:
            raise ParseError(w, "key must look like 'i,j'") from None
        if not (0 <= i < j < k):
            raise ParseError(w, f"need 1 <= i < j <= {k}")
        perm: dict = {}
        for n, cyc in enumerate(body.get("cycles", [])):
            pts = [_pair(p, f"{w}.cycles[{n}][{t}]") for t, p in enumerate(cyc)]
            for a, b in zip(pts, pts[1:] + pts[:1]):
                perm[a] = b
        for n, pr in enumerate(body.get("pairs", [])):
            if not isinstance(pr, list) or len(pr) != 2:
                raise ParseError(f"{w}.pairs[{n}]", "expected [[l, m], [l', m']]")
            a, b = _pair(pr[0], f"{w}.pairs[{n}][0]"), _pair(pr[1], f"{w}.pairs[{n}][1]")
            if a in perm and perm[a] != b:
                raise ParseError(f"{w}.pairs[{n}]", f"conflicting image for {pr[0]}")
            perm[a] = b
        unknown = set(body) - {"cycles", "pairs"}
        if unknown:
            raise ParseError(w, f"unknown fields {sorted(unknown)}")
        out[(i, j)] = perm
    return out


def _vectors(x, dim: int, where: str) -> np.ndarray:
    """A list of vectors, returned as the columns of a matrix."""
    if not isinstance(x, list) or not x:
        raise ParseError(where, "expected a nonempty list of vectors")
    cols = []
    for n, v in enumerate(x):
        if not isinstance(v, list) or len(v) != dim:
            raise ParseError(f"{where}[{n}]", f"expected a vector of {dim} entries")
        cols.append([_complex(z, f"{where}[{n}][{i}]") for i, z in enumerate(v)])
    return np.array(cols, dtype=complex).T


def _build(doc: dict, tol: Tolerance) -> tuple[str, Any, int]:
    kind = _need(doc, "kind", "$")
    if kind not in KINDS:
        raise ParseError("$.kind", f"must be one of {KINDS}, got {kind!r}")
    dim = _int(_need(doc, "dim", "$"), "$.dim", 1)
    if kind == "algebra":
        gens = _matrices(_need(doc, "generators", "$"), dim, "$.generators")
        return kind, gens, dim
    if kind == "graph":
        gd = _need(doc, "graph", "$")
        nv = _int(_need(gd, "vertices", "$.graph"), "$.graph.vertices", 1)
        edges_raw = _need(gd, "edges", "$.graph")
        if not isinstance(edges_raw, list):
            raise ParseError("$.graph.edges", "expected a list of [source, range]")
        edges = []
        for n, e in enumerate(edges_raw):
            s, r = _pair(e, f"$.graph.edges[{n}]")
            if s >= nv or r >= nv:
                raise ParseError(f"$.graph.edges[{n}]", f"vertex out of range 1..{nv}")
            edges.append((s, r))
        g = DirectedGraph(nv, tuple(edges))
        A = _matrices(_need(doc, "A", "$"), dim, "$.A", len(edges))
        if "sigma" in doc:
            sigma = _matrices(doc["sigma"], dim, "$.sigma", nv)
        elif nv == 1:
            sigma = [np.eye(dim, dtype=complex)]
        else:
            raise ParseError("$", "missing field 'sigma' (required for more than one vertex)")
        try:
            return kind, GraphRep(g, dim, tuple(sigma), tuple(A), tol), dim
        except RepresentationError as exc:
            raise ParseError("$", str(exc)) from None
    m_raw = _need(doc, "m", "$")
    if not isinstance(m_raw, list) or not m_raw:
        raise ParseError("$.m", "expected a nonempty list of edge counts")
    m = tuple(_int(x, f"$.m[{i}]", 1) for i, x in enumerate(m_raw))
    k = len(m)
    theta = _theta(doc.get("theta", {}), k, "$.theta")
    try:
        g = ThetaKGraph(k, m, theta)
    except ThetaError as exc:
        raise ParseError("$.theta", str(exc)) from None
    rows_raw = _need(doc, "rows", "$")
    if not isinstance(rows_raw, list) or len(rows_raw) != k:
        raise ParseError("$.rows", f"expected {k} rows (one per color)")
    rows = tuple(tuple(_matrices(r, dim, f"$.rows[{c}]", m[c])) for c, r in enumerate(rows_raw))
    try:
        return kind, KGraphRep(g, dim, rows, tol), dim
    except RepresentationError as exc:
        raise ParseError("$", str(exc)) from None


def loads(text: str, tol: Tolerance = DEFAULT_TOL) -> RepSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    kind, obj, dim = _build(doc, tol)
    expect = doc.get("expect", {})
    if not isinstance(expect, dict):
        raise ParseError("$.expect", "expected an object")
    raw = doc.get("candidates", [])
    if not isinstance(raw, list):
        raise ParseError("$.candidates", "expected a list of subspaces")
    cands = tuple(_vectors(c, dim, f"$.candidates[{i}]") for i, c in enumerate(raw))
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return RepSpec(kind, obj, dim, str(doc.get("name", "")), expect, doc.get("labels", {}), digest,
                   cands)


def load(path: str | Path, tol: Tolerance = DEFAULT_TOL) -> RepSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), exc.strerror or str(exc)) from None
    return loads(text, tol)


# ---------------------------------------------------------------------------
# writing

def _num(x: float) -> float | int:
    x = float(x)
    if abs(x) < 1e-15:
        return 0
    return int(x) if x.is_integer() else x


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in m]


def encode_vectors(frame) -> list:
    """Columns of ``frame`` as a list of [re, im] vectors."""
    return [[[_num(z.real), _num(z.imag)] for z in col] for col in np.asarray(frame, complex).T]


def encode_rep(rep: GraphRep | KGraphRep, name: str = "", expect: dict | None = None) -> dict:
    doc: dict = {}
    if name:
        doc["name"] = name
    if isinstance(rep, GraphRep):
        g = rep.graph
        doc.update(kind="graph", dim=rep.dim,
                   graph={"vertices": g.vertex_count,
                          "edges": [[s + 1, r + 1] for s, r in g.edges]})
        if g.vertex_count > 1:
            doc["sigma"] = [encode_matrix(p) for p in rep.sigma]
        doc["A"] = [encode_matrix(a) for a in rep.A]
    else:
        g = rep.kgraph
        theta = {}
        for (i, j), perm in g.theta.items():
            moved = [[[a[0] + 1, a[1] + 1], [b[0] + 1, b[1] + 1]] for a, b in perm.items() if a != b]
            if moved:
                theta[f"{i + 1},{j + 1}"] = {"pairs": moved}
        doc.update(kind="single_vertex_kgraph", dim=rep.dim, m=list(g.m), theta=theta,
                   rows=[[encode_matrix(a) for a in row] for row in rep.rows_])
    if expect:
        doc["expect"] = expect
    return doc


def encode_algebra(gens, name: str = "", expect: dict | None = None,
                   candidates=()) -> dict:
    gens = [np.asarray(g) for g in gens]
    doc: dict = {"name": name} if name else {}
    doc.update(kind="algebra", dim=gens[0].shape[0], generators=[encode_matrix(g) for g in gens])
    if len(candidates):
        doc["candidates"] = [encode_vectors(c) for c in candidates]
    if expect:
        doc["expect"] = expect
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"
