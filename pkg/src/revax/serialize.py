"""JSON/CSV input and output for the command-line surface.

All floats are emitted with 17 significant digits so doubles round-trip
losslessly, and files are written atomically (temp file + rename) so a
crashed run never leaves a truncated output behind.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

from .costs import CostModel, affine_cost, uniform_cost
from .errors import SchemaError
from .kernels import Kernel, Population, Strategy, cycle_kernel, from_metapopulation


def fmt17(x: float) -> str:
    """17-significant-digit decimal representation of a double."""
    return np.format_float_positional(float(x), precision=17, unique=False,
                                      fractional=False)


def dumps17(obj, indent: int = 0) -> str:
    """JSON text with every float rendered by fmt17."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {dumps17(v)}" for k, v in obj.items())
        return pad + "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return pad + "[" + ", ".join(dumps17(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return fmt17(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".revax-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read JSON document {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path!r}: top-level JSON value must be an object")
    return doc


def _require_fields(doc: dict, allowed: set[str], context: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise SchemaError(f"{context}: unknown fields {sorted(unknown)}")


def kernel_from_document(doc: dict) -> Kernel:
    """Kernel from {"n", "mu", "k"} or a generator shorthand."""
    try:
        if "generator" in doc:
            gen = doc["generator"]
            if gen == "cycle":
                _require_fields(doc, {"generator", "n"}, "cycle generator")
                return cycle_kernel(int(doc["n"]))
            if gen == "metapop":
                _require_fields(doc, {"generator", "K", "mu"}, "metapop generator")
                return from_metapopulation(doc["K"], doc["mu"])
            raise SchemaError(f"unknown generator {gen!r}")
        _require_fields(doc, {"n", "mu", "k"}, "kernel document")
        for name in ("n", "mu", "k"):
            if name not in doc:
                raise SchemaError(f"kernel document: missing field {name!r}")
        ker = Kernel(Population(doc["mu"]), doc["k"])
        if ker.n != int(doc["n"]):
            raise SchemaError("kernel document: field 'n' disagrees with arrays")
        return ker
    except SchemaError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SchemaError(f"invalid kernel document: {exc}") from exc


def load_kernel(path: str) -> Kernel:
    return kernel_from_document(_load_json(path))


def load_strategy(path: str, n: int) -> Strategy:
    doc = _load_json(path)
    _require_fields(doc, {"eta"}, "strategy document")
    if "eta" not in doc:
        raise SchemaError("strategy document: missing field 'eta'")
    try:
        eta = Strategy(doc["eta"])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid strategy document: {exc}") from exc
    if eta.n != n:
        raise SchemaError(f"strategy has {eta.n} traits, kernel has {n}")
    return eta


def cost_from_document(doc: dict, pop: Population) -> CostModel:
    _require_fields(doc, {"cost"}, "cost document")
    spec = doc.get("cost")
    if not isinstance(spec, dict):
        raise SchemaError("cost document: field 'cost' must be an object")
    kind = spec.get("kind")
    if kind == "uniform":
        _require_fields(spec, {"kind"}, "uniform cost")
        return uniform_cost(pop)
    if kind == "affine":
        _require_fields(spec, {"kind", "weights"}, "affine cost")
        if "weights" not in spec:
            raise SchemaError("affine cost: missing field 'weights'")
        try:
            return affine_cost(pop, spec["weights"])
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"invalid affine cost: {exc}") from exc
    raise SchemaError(f"unknown cost kind {kind!r}")


def load_cost(spec: str, pop: Population) -> CostModel:
    """Cost from a CLI spec: 'uniform' or 'affine:/path/to/cost.json'."""
    if spec == "uniform":
        return uniform_cost(pop)
    if spec.startswith("affine:"):
        return cost_from_document(_load_json(spec[len("affine:"):]), pop)
    raise SchemaError(f"cost spec must be 'uniform' or 'affine:PATH', got {spec!r}")


def frontier_csv(frontiers, n: int) -> str:
    header = "kind,cost,loss," + ",".join(f"eta_{i}" for i in range(n))
    lines = [header]
    for fr in frontiers:
        for p in fr.points:
            eta = ",".join(fmt17(v) for v in p.strategy.eta)
            lines.append(f"{fr.kind},{fmt17(p.cost)},{fmt17(p.loss)},{eta}")
    return "\n".join(lines) + "\n"


def trajectory_csv(trajectory, stride: int = 1) -> str:
    n = trajectory.states[0].infected.size
    header = "t," + ",".join(f"I_{i}" for i in range(n))
    lines = [header]
    states = trajectory.states
    for idx in range(0, len(states), stride):
        s = states[idx]
        lines.append(fmt17(s.t) + "," + ",".join(fmt17(v) for v in s.infected))
    if (len(states) - 1) % stride != 0:
        s = states[-1]
        lines.append(fmt17(s.t) + "," + ",".join(fmt17(v) for v in s.infected))
    return "\n".join(lines) + "\n"


def run_manifest(command: str, model_path: str, **params) -> dict:
    manifest = {"command": command, "input_digest": sha256_file(model_path)}
    manifest.update(params)
    return manifest
