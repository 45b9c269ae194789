"""File formats.

Matrix text::

    ring 3 1
    4 4
    1 0 0 0
    ...

Sequence JSON: ``{"ring": [p, k], "n": n, "vectors": [[...], ...]}``.
Chain JSON: ``{"ring": [p, k], "n": n, "degree": d,
"terms": [{"coef": m, "vectors": [[...], ...]}, ...]}``.
Stabilizer parameters JSON: ``{"ring", "n", "k", "upper", "x", "B"}``
with ``upper`` the c-entries above the diagonal in row-major order.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complex import Chain
from .forms import HyperbolicSpace
from .ring import Ring


class FormatError(ValueError):
    pass


def _space(data: dict) -> HyperbolicSpace:
    try:
        p, k = data["ring"]
        return HyperbolicSpace(Ring(int(p), int(k)), int(data["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad ring/n header: {exc}") from exc


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _vectors(space: HyperbolicSpace, raw) -> tuple:
    m = space.ring.modulus
    out = []
    for v in raw:
        if len(v) != space.dim:
            raise FormatError(f"vector {v} does not have length {space.dim}")
        out.append(tuple(int(x) % m for x in v))
    return tuple(out)


def read_matrix(path) -> tuple[Ring, np.ndarray]:
    try:
        lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    try:
        if lines[0][0] != "ring":
            raise FormatError("first line must be 'ring p k'")
        ring = Ring(int(lines[0][1]), int(lines[0][2]))
        rows, cols = int(lines[1][0]), int(lines[1][1])
        body = [[int(x) for x in ln] for ln in lines[2:]]
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed matrix file: {exc}") from exc
    if len(body) != rows or any(len(r) != cols for r in body):
        raise FormatError(f"expected a {rows} x {cols} matrix")
    return ring, np.array(body, dtype=np.int64).reshape(rows, cols) % ring.modulus


def format_matrix(ring: Ring, M) -> str:
    M = np.asarray(M)
    lines = [f"ring {ring.p} {ring.k}", f"{M.shape[0]} {M.shape[1]}"]
    lines += [" ".join(str(int(x)) for x in row) for row in M]
    return "\n".join(lines) + "\n"


def read_sequence(path) -> tuple[HyperbolicSpace, tuple]:
    data = _load_json(path)
    space = _space(data)
    return space, _vectors(space, data.get("vectors", []))


def sequence_to_dict(space: HyperbolicSpace, seq) -> dict:
    return {"ring": [space.ring.p, space.ring.k], "n": space.n, "vectors": [list(v) for v in seq]}


def read_targets(path) -> tuple[HyperbolicSpace, list]:
    data = _load_json(path)
    space = _space(data)
    return space, [_vectors(space, t) for t in data.get("targets", [])]


def chain_to_dict(space: HyperbolicSpace, chain: Chain) -> dict:
    return {
        "ring": [space.ring.p, space.ring.k],
        "n": space.n,
        "degree": chain.degree,
        "terms": [{"coef": c, "vectors": [list(v) for v in seq]} for seq, c in chain.items()],
    }


def chain_from_dict(data: dict) -> tuple[HyperbolicSpace, Chain]:
    space = _space(data)
    try:
        out = Chain(int(data["degree"]))
        for term in data["terms"]:
            out += Chain(out.degree, {_vectors(space, term["vectors"]): int(term["coef"])})
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed chain: {exc}") from exc
    return space, out


def read_chain(path) -> tuple[HyperbolicSpace, Chain]:
    return chain_from_dict(_load_json(path))


def read_params(path):
    from .stabilizer import StabilizerParams

    data = _load_json(path)
    space = _space(data)
    try:
        k = int(data["k"])
        return StabilizerParams.from_free(space, k, data.get("upper", []), data.get("x"), data.get("B"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed stabilizer parameters: {exc}") from exc


def params_to_dict(params) -> dict:
    space = params.space
    return {
        "ring": [space.ring.p, space.ring.k],
        "n": space.n,
        "k": params.k,
        "upper": list(params.free_upper()),
        "c": params.c.tolist(),
        "x": params.x.tolist(),
        "B": params.B.tolist(),
    }
