"""Spec files, built-in presets, tile records and verification reports.

Spec files are JSON.  Numeric fields accept numbers or strings; strings may
be arithmetic in the base ratio ``s`` (``"s**3"``, ``"1 - s**4"``).
"""
from __future__ import annotations

import ast
import json
import operator
from pathlib import Path
from typing import IO, Any, Iterable

import numpy as np

from .errors import ConfigError
from .geometry import ExactPolygon, IfsSpec, PointCloud, Similitude, refine_root, rotation_matrix
from .symbolic import AbsoluteAddress
from .tiling import Tiling

PRESETS: dict[str, dict[str, Any]] = {
    "goldenb": {
        "name": "goldenb",
        "dim": 2,
        "s": {"polynomial": [1, 0, 1, 0, -1], "bracket": [0, 1]},
        "maps": [
            {"a": 1, "matrix": [[0, 1], [-1, 0]], "translate": [0, "s"]},
            {"a": 2, "matrix": [[-1, 0], [0, 1]], "translate": [1, 0]},
        ],
        "attractor": [[0, 0], [1, 0], [1, "s**3"], ["s**2", "s**3"], ["s**2", "s"], [0, "s"]],
        "mode": "polygon",
    },
    "square": {
        "name": "square",
        "dim": 2,
        "s": {"value": 0.5},
        "maps": [
            {"a": 1, "rotation_degrees": 0, "translate": [0, 0]},
            {"a": 1, "rotation_degrees": 0, "translate": [0.5, 0]},
            {"a": 1, "rotation_degrees": 0, "translate": [0, 0.5]},
            {"a": 1, "rotation_degrees": 0, "translate": [0.5, 0.5]},
        ],
        "attractor": [[0, 0], [1, 0], [1, 1], [0, 1]],
        "mode": "polygon",
    },
    "cantor": {
        "name": "cantor",
        "dim": 2,
        "s": {"value": 0.35},
        "maps": [
            {"a": 1, "rotation_degrees": 0, "translate": [0, 0]},
            {"a": 2, "rotation_degrees": 90, "translate": [1, 0]},
            {"a": 2, "rotation_degrees": 0, "reflect": True, "translate": [0.6, 0.8]},
        ],
        "mode": "pointcloud",
        "depth": 7,
    },
}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def eval_number(value, s: float | None, where: str) -> float:
    """Number, decimal string, or arithmetic expression in ``s``."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a number, got {value!r}")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "s":
            if s is None:
                raise ConfigError(f"{where}: 's' is not available here")
            return s
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ConfigError(f"{where}: unsupported expression {value!r}")

    try:
        tree = ast.parse(value.replace("^", "**"), mode="eval")
    except SyntaxError:
        raise ConfigError(f"{where}: cannot parse {value!r}")
    return float(walk(tree))


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ConfigError(f"{where}: missing field '{key}'")
    return obj[key]


def spec_from_dict(data: dict) -> IfsSpec:
    """Build and validate an :class:`IfsSpec` from parsed JSON."""
    if not isinstance(data, dict):
        raise ConfigError("spec: top level must be an object")
    name = str(data.get("name", "unnamed"))
    dim = int(_field(data, "dim", "spec"))

    s_field = _field(data, "s", "spec")
    if not isinstance(s_field, dict):
        s_field = {"value": s_field}
    poly = bracket = None
    given = eval_number(s_field["value"], None, "s.value") if "value" in s_field else None
    if "polynomial" in s_field:
        poly = tuple(eval_number(c, None, f"s.polynomial[{i}]") for i, c in enumerate(s_field["polynomial"]))
        bracket = tuple(eval_number(c, None, f"s.bracket[{i}]") for i, c in enumerate(s_field.get("bracket", [0, 1])))
        s = refine_root(poly, bracket, given)
        if given is not None and abs(s - given) <= 1e-15 * abs(given):
            s = given
    elif given is not None:
        s = given
    else:
        raise ConfigError("s: give a value or a polynomial")

    maps_field = _field(data, "maps", "spec")
    if not isinstance(maps_field, list):
        raise ConfigError("maps: expected a list")
    maps = []
    for idx, m in enumerate(maps_field):
        where = f"maps[{idx}]"
        power = _field(m, "a", where)
        if not isinstance(power, int) or isinstance(power, bool):
            raise ConfigError(f"{where}.a: expected an integer, got {power!r}")
        if "matrix" in m:
            ortho = np.array(
                [[eval_number(x, s, f"{where}.matrix") for x in row] for row in m["matrix"]], dtype=float
            )
        elif "rotation_degrees" in m:
            if dim != 2:
                raise ConfigError(f"{where}: rotation_degrees needs dim 2, use matrix rows")
            ortho = rotation_matrix(eval_number(m["rotation_degrees"], s, f"{where}.rotation_degrees"), bool(m.get("reflect", False)))
        else:
            raise ConfigError(f"{where}: give 'matrix' or 'rotation_degrees'")
        trans = [eval_number(x, s, f"{where}.translate") for x in _field(m, "translate", where)]
        if ortho.shape != (dim, dim) or len(trans) != dim:
            raise ConfigError(f"{where}: matrix/translate do not match dim {dim}")
        maps.append(Similitude(power, ortho, trans, s))

    mode = data.get("mode", "polygon" if "attractor" in data else "pointcloud")
    if mode == "polygon":
        verts = _field(data, "attractor", "spec")
        model = ExactPolygon(
            tuple(tuple(eval_number(x, s, f"attractor[{i}]") for x in v) for i, v in enumerate(verts))
        )
    elif mode == "pointcloud":
        model = PointCloud(int(data.get("depth", 8)))
    else:
        raise ConfigError(f"mode: expected 'polygon' or 'pointcloud', got {mode!r}")
    return IfsSpec(name, s, tuple(maps), model, poly, bracket)


def load_spec(source: str | Path) -> IfsSpec:
    """Load a preset by name or a JSON spec file."""
    if isinstance(source, str) and source in PRESETS:
        return spec_from_dict(PRESETS[source])
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"no preset or file named {str(source)!r} (presets: {', '.join(PRESETS)})")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    return spec_from_dict(data)


def spec_to_dict(spec: IfsSpec) -> dict:
    """Serialise with ``repr`` decimal strings so that loading gives back the
    same floats."""
    s_field: dict[str, Any] = {"value": repr(spec.s)}
    if spec.polynomial is not None:
        s_field["polynomial"] = [repr(c) for c in spec.polynomial]
        s_field["bracket"] = [repr(c) for c in spec.bracket]
    out: dict[str, Any] = {
        "name": spec.name,
        "dim": spec.dim,
        "s": s_field,
        "maps": [
            {
                "a": f.power,
                "matrix": [[repr(float(x)) for x in row] for row in f.ortho],
                "translate": [repr(float(x)) for x in f.trans],
            }
            for f in spec.maps
        ],
    }
    if spec.is_polygon:
        out["mode"] = "polygon"
        out["attractor"] = [[repr(float(x)) for x in v] for v in spec.attractor_model.vertices]
    else:
        out["mode"] = "pointcloud"
        out["depth"] = spec.attractor_model.depth
    return out


def save_spec(spec: IfsSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n", encoding="utf-8")


def specs_equal(a: IfsSpec, b: IfsSpec) -> bool:
    """Exact (bitwise float) equality of two specs."""
    return (
        a.name == b.name
        and a.s == b.s
        and a.polynomial == b.polynomial
        and a.bracket == b.bracket
        and a.attractor_model == b.attractor_model
        and len(a.maps) == len(b.maps)
        and all(
            f.power == g.power and np.array_equal(f.ortho, g.ortho) and np.array_equal(f.trans, g.trans)
            for f, g in zip(a.maps, b.maps)
        )
    )


def tile_records(tiling: Tiling) -> Iterable[dict]:
    for j in range(len(tiling)):
        addr = tiling.addresses[j]
        yield {
            "address": None if addr is None else str(addr),
            "proto": int(tiling.powers[j]),
            "matrix": [float(x) for x in tiling.orthos[j].ravel()],
            "translation": [float(x) for x in tiling.trans[j]],
            "power": int(tiling.powers[j]),
        }


def write_tiles(tiling: Tiling, stream: IO[str]) -> None:
    """Newline-delimited JSON, one record per tile."""
    for rec in tile_records(tiling):
        stream.write(json.dumps(rec) + "\n")


def read_tiles(lines: Iterable[str], spec: IfsSpec, provenance=("derived", "records")) -> Tiling:
    recs = [json.loads(line) for line in lines if line.strip()]
    dim = spec.dim
    if not recs:
        return Tiling.empty(spec, provenance)
    return Tiling(
        np.array([r["power"] for r in recs], dtype=int),
        np.array([r["matrix"] for r in recs], dtype=float).reshape(-1, dim, dim),
        np.array([r["translation"] for r in recs], dtype=float).reshape(-1, dim),
        tuple(None if r["address"] is None else AbsoluteAddress.parse(r["address"]) for r in recs),
        spec,
        provenance,
    )


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def report_dict(spec_name: str, checks: Iterable[dict]) -> dict:
    return _jsonable({"spec": spec_name, "checks": list(checks)})


def write_report(report: dict, path: str | Path | None = None, stream: IO[str] | None = None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    elif stream is not None:
        stream.write(text)
