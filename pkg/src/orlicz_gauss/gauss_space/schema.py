"""JSON form of functions.

``{"kind": "hermite", "dim": n, "terms": [{"alpha": [...], "c": ...}, ...]}``
or ``{"kind": "builtin", "name": "...", "params": {...}}``.
"""

from __future__ import annotations

from typing import Any

from .builtins import UnknownBuiltinError, make_builtin
from .functions import BuiltinFunction, GaussFunction, HermiteExpansion


class SchemaError(ValueError):
    """Malformed function JSON; ``field`` names the offending key path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def function_from_json(obj: Any, where: str = "f") -> GaussFunction:
    if not isinstance(obj, dict):
        raise SchemaError(where, "expected an object")
    kind = obj.get("kind")
    if kind == "hermite":
        try:
            dim = int(obj["dim"])
        except (KeyError, TypeError, ValueError):
            raise SchemaError(f"{where}.dim", "missing or not an integer") from None
        terms = obj.get("terms")
        if not isinstance(terms, list):
            raise SchemaError(f"{where}.terms", "expected a list")
        coeffs = {}
        for k, t in enumerate(terms):
            path = f"{where}.terms[{k}]"
            if not isinstance(t, dict) or "alpha" not in t or "c" not in t:
                raise SchemaError(path, "expected {alpha, c}")
            alpha = t["alpha"]
            if not isinstance(alpha, list) or len(alpha) != dim or not all(
                isinstance(a, int) and a >= 0 for a in alpha
            ):
                raise SchemaError(f"{path}.alpha", f"expected {dim} non-negative integers")
            try:
                c = float(t["c"])
            except (TypeError, ValueError):
                raise SchemaError(f"{path}.c", "not a number") from None
            key = tuple(alpha)
            coeffs[key] = coeffs.get(key, 0.0) + c
        return HermiteExpansion(dim, coeffs, label=obj.get("label", "hermite"))
    if kind == "builtin":
        name = obj.get("name")
        if not isinstance(name, str):
            raise SchemaError(f"{where}.name", "missing builtin name")
        params = obj.get("params", {})
        if not isinstance(params, dict):
            raise SchemaError(f"{where}.params", "expected an object")
        try:
            return make_builtin(name, params)
        except UnknownBuiltinError as exc:
            raise SchemaError(f"{where}.name", str(exc.args[0])) from None
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"{where}.params", str(exc)) from None
    raise SchemaError(f"{where}.kind", f"expected 'hermite' or 'builtin', got {kind!r}")


def function_to_json(f: GaussFunction) -> dict:
    if isinstance(f, HermiteExpansion):
        return {
            "kind": "hermite",
            "dim": f.dim,
            "terms": [{"alpha": list(a), "c": c} for a, c in f.terms.items()],
        }
    if isinstance(f, BuiltinFunction) and f.params is not None and f.name in _known():
        return {"kind": "builtin", "name": f.name, "params": f.params}
    raise ValueError(f"{f!r} has no JSON form")


def _known():
    from .builtins import REGISTRY

    return REGISTRY
