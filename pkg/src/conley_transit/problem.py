"""Problem files: the JSON surface of the library.

Top-level keys: ``schema_version``, ``field``, ``poset``, ``spaces``,
``matrices``, ``task``.  Spaces are sparse degree -> dimension maps;
matrices are named block maps with blocks keyed "q,p" and inner keys the
source degree; rationals serialize as "num/den" strings.  Parse errors
carry a JSON-pointer-style location.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import SchemaError, ShapeMismatch
from .fields import FieldSpec
from .graded import BlockGradedMap, GradedMap, GradedSpace
from .matrices import Matrix
from .posets import Poset, close_and_validate

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ProblemFile:
    field: FieldSpec
    poset: Poset
    spaces: tuple[tuple[str, tuple[GradedSpace, ...]], ...]
    matrices: tuple[tuple[str, BlockGradedMap], ...]
    task: dict

    def space_collection(self, name: str) -> tuple[GradedSpace, ...]:
        for key, sp in self.spaces:
            if key == name:
                return sp
        raise SchemaError("/spaces", f"unknown space collection {name!r}")

    def matrix(self, name: str) -> BlockGradedMap:
        for key, m in self.matrices:
            if key == name:
                return m
        raise SchemaError("/matrices", f"unknown matrix {name!r}")

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "field": self.field.to_json(),
            "poset": poset_to_json(self.poset),
            "spaces": {name: [s.to_json() for s in sp] for name, sp in self.spaces},
            "matrices": {name: _matrix_spec_to_json(self, name, m)
                         for name, m in self.matrices},
            "task": self.task,
        }


def poset_to_json(P: Poset) -> dict:
    return {"n": P.n, "labels": list(P.labels), "covers": [list(c) for c in P.covers()]}


def poset_from_json(obj, pointer: str) -> Poset:
    if not isinstance(obj, dict):
        raise SchemaError(pointer, "poset must be an object")
    n = _get(obj, "n", pointer, int)
    covers = obj.get("covers", [])
    if not isinstance(covers, list):
        raise SchemaError(f"{pointer}/covers", "covers must be a list of pairs")
    pairs = []
    for i, pair in enumerate(covers):
        if (not isinstance(pair, list)) or len(pair) != 2 \
                or not all(isinstance(x, int) for x in pair):
            raise SchemaError(f"{pointer}/covers/{i}", "cover must be [int, int]")
        a, b = pair
        if not (0 <= a < n and 0 <= b < n):
            raise SchemaError(f"{pointer}/covers/{i}", f"index out of range for n={n}")
        pairs.append((a, b))
    labels = obj.get("labels", [])
    if labels and (len(labels) != n or not all(isinstance(x, str) for x in labels)):
        raise SchemaError(f"{pointer}/labels", "labels must be n strings")
    try:
        return close_and_validate(pairs, n, tuple(labels))
    except Exception as exc:
        raise SchemaError(pointer, str(exc))


def space_from_json(obj, pointer: str) -> GradedSpace:
    if not isinstance(obj, dict):
        raise SchemaError(pointer, "space must be a degree->dimension object")
    dims = {}
    for key, val in obj.items():
        try:
            k = int(key)
        except ValueError:
            raise SchemaError(f"{pointer}/{key}", "degree keys must be integers")
        if not isinstance(val, int) or val < 0:
            raise SchemaError(f"{pointer}/{key}", "dimension must be a nonnegative int")
        dims[k] = val
    return GradedSpace.of(dims)


def _get(obj, key, pointer, typ):
    if key not in obj:
        raise SchemaError(f"{pointer}/{key}", "missing required key")
    val = obj[key]
    if not isinstance(val, typ):
        raise SchemaError(f"{pointer}/{key}", f"expected {typ.__name__}")
    return val


def matrix_from_json(fld: FieldSpec, poset: Poset, spaces_by_name, obj,
                     pointer: str) -> BlockGradedMap:
    if not isinstance(obj, dict):
        raise SchemaError(pointer, "matrix must be an object")
    degree = _get(obj, "degree", pointer, int)
    src_name = _get(obj, "source", pointer, str)
    tgt_name = _get(obj, "target", pointer, str)
    if src_name not in spaces_by_name:
        raise SchemaError(f"{pointer}/source", f"unknown space collection {src_name!r}")
    if tgt_name not in spaces_by_name:
        raise SchemaError(f"{pointer}/target", f"unknown space collection {tgt_name!r}")
    source = spaces_by_name[src_name]
    target = spaces_by_name[tgt_name]
    blocks = obj.get("blocks", {})
    if not isinstance(blocks, dict):
        raise SchemaError(f"{pointer}/blocks", "blocks must be an object")
    entries = {}
    for key, per_degree in blocks.items():
        qp = key.split(",")
        if len(qp) != 2:
            raise SchemaError(f"{pointer}/blocks/{key}", 'block keys look like "q,p"')
        try:
            q, p = int(qp[0]), int(qp[1])
        except ValueError:
            raise SchemaError(f"{pointer}/blocks/{key}", 'block keys look like "q,p"')
        if not (0 <= q < poset.n and 0 <= p < poset.n):
            raise SchemaError(f"{pointer}/blocks/{key}", "element index out of range")
        if not isinstance(per_degree, dict):
            raise SchemaError(f"{pointer}/blocks/{key}", "expected degree->rows object")
        gm_blocks = {}
        for dkey, rows in per_degree.items():
            try:
                k = int(dkey)
            except ValueError:
                raise SchemaError(f"{pointer}/blocks/{key}/{dkey}", "degree keys must be integers")
            want_rows, want_cols = target[q].dim(k - degree), source[p].dim(k)
            if not isinstance(rows, list) or len(rows) != want_rows \
                    or any(not isinstance(r, list) or len(r) != want_cols for r in rows):
                raise ShapeMismatch(
                    f"{pointer}/blocks/{key}/{dkey}: want {want_rows}x{want_cols}")
            try:
                gm_blocks[k] = Matrix.from_rows(fld, rows)
            except Exception as exc:
                raise SchemaError(f"{pointer}/blocks/{key}/{dkey}", str(exc))
        entries[(q, p)] = GradedMap.build(fld, source[p], target[q], degree, gm_blocks)
    return BlockGradedMap.build(fld, poset, source, target, degree, entries)


def _matrix_spec_to_json(pf: ProblemFile, name: str, m: BlockGradedMap) -> dict:
    src_name = _find_space_name(pf, m.source, f"{name}.source")
    tgt_name = _find_space_name(pf, m.target, f"{name}.target")
    return {"degree": m.degree, "source": src_name, "target": tgt_name,
            "blocks": {f"{q},{p}": {str(k): mat.to_json() for k, mat in gm.blocks}
                       for (q, p), gm in m.entries}}


def _find_space_name(pf: ProblemFile, spaces, what: str) -> str:
    for key, sp in pf.spaces:
        if sp == spaces:
            return key
    raise SchemaError("/matrices", f"{what} is not a named space collection")


def parse(text: str | dict) -> ProblemFile:
    """Parse and validate a problem file from JSON text or a dict."""
    if isinstance(text, str):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("/", f"invalid JSON: {exc}")
    else:
        obj = text
    if not isinstance(obj, dict):
        raise SchemaError("/", "problem file must be an object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError("/schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    fld = FieldSpec.from_json(_get(obj, "field", "", str))
    poset = poset_from_json(_get(obj, "poset", "", dict), "/poset")
    spaces_obj = obj.get("spaces", {})
    if not isinstance(spaces_obj, dict):
        raise SchemaError("/spaces", "spaces must be an object")
    spaces_by_name = {}
    for name in sorted(spaces_obj):
        lst = spaces_obj[name]
        if not isinstance(lst, list) or len(lst) != poset.n:
            raise SchemaError(f"/spaces/{name}", f"expected {poset.n} per-element spaces")
        spaces_by_name[name] = tuple(space_from_json(s, f"/spaces/{name}/{i}")
                                     for i, s in enumerate(lst))
    matrices = {}
    mat_obj = obj.get("matrices", {})
    if not isinstance(mat_obj, dict):
        raise SchemaError("/matrices", "matrices must be an object")
    for name in sorted(mat_obj):
        matrices[name] = matrix_from_json(fld, poset, spaces_by_name, mat_obj[name],
                                          f"/matrices/{name}")
    task = obj.get("task", {})
    if not isinstance(task, dict):
        raise SchemaError("/task", "task must be an object")
    return ProblemFile(fld, poset, tuple(sorted(spaces_by_name.items())),
                       tuple(sorted(matrices.items())), task)


def parse_path(path: str) -> ProblemFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()
