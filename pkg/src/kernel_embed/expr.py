"""Closed-form sequence expressions such as ``"log(i+1)/i**2"``.

Only arithmetic, powers, a handful of elementary functions and the constants
``pi`` and ``e`` are accepted; anything else is rejected at parse time.
Expressions evaluate elementwise on numpy arrays.
"""
from __future__ import annotations

import ast

import numpy as np

from .errors import InvalidArgument

_FUNCTIONS = {
    "log": np.log,
    "log2": np.log2,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
_CONSTANTS = {"pi": np.pi, "e": np.e}
_ALLOWED = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
    ast.Call,
    ast.Name,
    ast.Load,
    ast.Constant,
)


class Expression:
    """A parsed expression in one variable, callable on scalars or arrays."""

    def __init__(self, source: str, var: str = "i"):
        self.source = source
        self.var = var
        try:
            tree = ast.parse(source, mode="eval")
        except SyntaxError as exc:
            raise InvalidArgument(f"cannot parse expression {source!r}: {exc.msg}") from None
        for node in ast.walk(tree):
            if not isinstance(node, _ALLOWED):
                raise InvalidArgument(f"unsupported syntax {type(node).__name__} in {source!r}")
            if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
                raise InvalidArgument(f"only numeric constants allowed in {source!r}")
            if isinstance(node, ast.Call):
                if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                    raise InvalidArgument(f"unknown function in {source!r}")
                if len(node.args) != 1 or node.keywords:
                    raise InvalidArgument(f"functions take exactly one argument in {source!r}")
            if isinstance(node, ast.Name) and node.id not in _FUNCTIONS and node.id not in _CONSTANTS and node.id != var:
                raise InvalidArgument(f"unknown name {node.id!r} in {source!r}")
        self._code = compile(tree, f"<expr {source}>", "eval")

    def __call__(self, i):
        scope = dict(_FUNCTIONS)
        scope.update(_CONSTANTS)
        scope[self.var] = np.asarray(i, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = eval(self._code, {"__builtins__": {}}, scope)
        out = np.asarray(out, dtype=float)
        if np.ndim(i) == 0:
            return float(out)
        return np.broadcast_to(out, np.shape(i)).copy()

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"

    def __str__(self) -> str:
        return self.source
