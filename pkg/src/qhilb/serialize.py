"""JSON (de)serialization of cells, Q-systems and scenarios.

Complex entries are two-element ``[re, im]`` arrays, one-cells are
``{"src", "tgt", "grading"}`` with 1-based index pairs, two-cells carry
their source and target cells plus a nested row-major matrix.  Files
are versioned with a top-level ``"schema": 1``.
"""

from __future__ import annotations

import json

import numpy as np

from .cells import BlockTwoCell, GradedOneCell, ZeroCell
from .errors import ParseError
from .funcat import EndFQSystem, FunctorData, ModificationData, TransformationData
from .presentation import (
    EDagger,
    EGen,
    EHComp,
    EId,
    EVComp,
    GenOneCell,
    GenTwoCell,
    Path,
    PresentedTwoCat,
)
from .qsystem import QSystemData
from .splitting import SplitResult

SCHEMA = 1

__all__ = [
    "cell_to_json", "cell_from_json",
    "two_cell_to_json", "two_cell_from_json",
    "qsystem_to_json", "qsystem_from_json",
    "presentation_to_json", "presentation_from_json",
    "scenario_to_json", "scenario_from_json",
    "constant_to_json", "constant_from_json",
    "split_result_to_json",
    "load_document", "dump_document",
]


def cell_to_json(c: GradedOneCell) -> dict:
    return {"src": c.src.n, "tgt": c.tgt.n,
            "grading": [list(g) for g in c.grading]}


def cell_from_json(d: dict) -> GradedOneCell:
    try:
        return GradedOneCell(ZeroCell(int(d["src"])), ZeroCell(int(d["tgt"])),
                             tuple((int(r), int(c)) for r, c in d["grading"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad one-cell: {exc}") from exc


def _mat_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _mat_from_json(rows, shape) -> np.ndarray:
    m = np.zeros(shape, dtype=complex)
    if shape[0] and len(rows) != shape[0]:
        raise ParseError("matrix has wrong number of rows")
    for i, row in enumerate(rows):
        if len(row) != shape[1]:
            raise ParseError("matrix has wrong number of columns")
        for j, z in enumerate(row):
            m[i, j] = complex(float(z[0]), float(z[1]))
    return m


def two_cell_to_json(f: BlockTwoCell) -> dict:
    return {"source": cell_to_json(f.source), "target": cell_to_json(f.target),
            "mat": _mat_to_json(f.mat)}


def two_cell_from_json(d: dict) -> BlockTwoCell:
    try:
        src = cell_from_json(d["source"])
        tgt = cell_from_json(d["target"])
        return BlockTwoCell(src, tgt, _mat_from_json(d["mat"], (tgt.dim, src.dim)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad two-cell: {exc}") from exc


def qsystem_to_json(q: QSystemData) -> dict:
    return {"schema": SCHEMA, "kind": "qsystem",
            "cell": cell_to_json(q.Q),
            "m": two_cell_to_json(q.m), "i": two_cell_to_json(q.i)}


def qsystem_from_json(d: dict) -> QSystemData:
    return QSystemData(cell_from_json(d["cell"]),
                       two_cell_from_json(d["m"]), two_cell_from_json(d["i"]))


def _path_to_json(p: Path) -> dict:
    return {"labels": list(p.labels), "src": p.src}


def _path_from_json(cat: PresentedTwoCat, d: dict) -> Path:
    return cat.path(tuple(d["labels"]), src=d.get("src"))


def _expr_to_json(e) -> dict:
    if isinstance(e, EGen):
        return {"gen": e.label}
    if isinstance(e, EId):
        return {"id": _path_to_json(e.path)}
    if isinstance(e, EDagger):
        return {"dagger": _expr_to_json(e.expr)}
    if isinstance(e, EVComp):
        return {"vcomp": [_expr_to_json(x) for x in e.exprs]}
    if isinstance(e, EHComp):
        return {"hcomp": [_expr_to_json(x) for x in e.exprs]}
    raise ParseError(f"unknown expression {e!r}")


def _expr_from_json(cat: PresentedTwoCat, d: dict):
    if "gen" in d:
        return EGen(d["gen"])
    if "id" in d:
        return EId(_path_from_json(cat, d["id"]))
    if "dagger" in d:
        return EDagger(_expr_from_json(cat, d["dagger"]))
    if "vcomp" in d:
        return EVComp(tuple(_expr_from_json(cat, x) for x in d["vcomp"]))
    if "hcomp" in d:
        return EHComp(tuple(_expr_from_json(cat, x) for x in d["hcomp"]))
    raise ParseError(f"unknown expression {d!r}")


def presentation_to_json(cat: PresentedTwoCat) -> dict:
    return {
        "zero_cells": list(cat.zero_cells),
        "gen_one_cells": [{"label": g.label, "src": g.src, "tgt": g.tgt}
                          for g in cat.gen_one_cells],
        "gen_two_cells": [{"label": f.label,
                           "source": _path_to_json(f.source),
                           "target": _path_to_json(f.target)}
                          for f in cat.gen_two_cells],
        "relations": [[_expr_to_json(l), _expr_to_json(r)]
                      for l, r in cat.relations],
    }


def presentation_from_json(d: dict) -> PresentedTwoCat:
    try:
        zero = tuple(d["zero_cells"])
        gens = tuple(GenOneCell(g["label"], g["src"], g["tgt"])
                     for g in d["gen_one_cells"])
        cat = PresentedTwoCat(zero, gens)
        two = tuple(GenTwoCell(f["label"],
                               _path_from_json(cat, f["source"]),
                               _path_from_json(cat, f["target"]))
                    for f in d.get("gen_two_cells", ()))
        cat = PresentedTwoCat(zero, gens, two)
        rel = tuple((_expr_from_json(cat, l), _expr_from_json(cat, r))
                    for l, r in d.get("relations", ()))
        return PresentedTwoCat(zero, gens, two, rel)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad presentation: {exc}") from exc


def scenario_to_json(cat: PresentedTwoCat, f: FunctorData,
                     q: EndFQSystem) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "scenario",
        "presentation": presentation_to_json(cat),
        "functor": {
            "on0": {a: f.on0[a].n for a in cat.zero_cells},
            "on1": {g.label: cell_to_json(f.on1[g.label])
                    for g in cat.gen_one_cells},
            "on2": {t.label: two_cell_to_json(f.on2[t.label])
                    for t in cat.gen_two_cells},
        },
        "qsystem": {
            "psi0": {a: cell_to_json(q.psi.comp0[a]) for a in cat.zero_cells},
            "psi1": {g.label: two_cell_to_json(
                q.psi.comp1[cat_path_of(cat, g.label)])
                for g in cat.gen_one_cells},
            "m": {a: two_cell_to_json(q.m[a]) for a in cat.zero_cells},
            "i": {a: two_cell_to_json(q.i[a]) for a in cat.zero_cells},
        },
    }


def cat_path_of(cat: PresentedTwoCat, label: str) -> Path:
    return cat.path((label,))


def scenario_from_json(d: dict):
    try:
        cat = presentation_from_json(d["presentation"])
        fd = d["functor"]
        on0 = {a: ZeroCell(int(n)) for a, n in fd["on0"].items()}
        on1 = {lab: cell_from_json(c) for lab, c in fd["on1"].items()}
        on2 = {lab: two_cell_from_json(c) for lab, c in fd.get("on2", {}).items()}
        f = FunctorData(cat, on0, on1, on2)
        qd = d["qsystem"]
        comp0 = {a: cell_from_json(c) for a, c in qd["psi0"].items()}
        comp1 = {cat_path_of(cat, lab): two_cell_from_json(c)
                 for lab, c in qd["psi1"].items()}
        psi = TransformationData(f, f, comp0, comp1)
        m = ModificationData({a: two_cell_from_json(c) for a, c in qd["m"].items()})
        i = ModificationData({a: two_cell_from_json(c) for a, c in qd["i"].items()})
        return cat, f, EndFQSystem(psi, m, i)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad scenario: {exc}") from exc


def constant_to_json(cat: PresentedTwoCat, q: QSystemData) -> dict:
    return {"schema": SCHEMA, "kind": "constant",
            "presentation": presentation_to_json(cat),
            "qsystem": {"cell": cell_to_json(q.Q),
                        "m": two_cell_to_json(q.m),
                        "i": two_cell_to_json(q.i)}}


def constant_from_json(d: dict):
    try:
        cat = presentation_from_json(d["presentation"])
        q = qsystem_from_json(d["qsystem"])
        return cat, q
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad constant scenario: {exc}") from exc


def split_result_to_json(res: SplitResult) -> dict:
    return {"schema": SCHEMA, "kind": "split_result", "k": res.k.n,
            "X": cell_to_json(res.pair.X), "Xbar": cell_to_json(res.pair.Xbar),
            "ev": two_cell_to_json(res.pair.ev),
            "coev": two_cell_to_json(res.pair.coev),
            "gamma": two_cell_to_json(res.gamma)}


def load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise ParseError(f"{path}: missing or unsupported schema")
    if "kind" not in doc:
        raise ParseError(f"{path}: missing kind")
    return doc


def dump_document(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
