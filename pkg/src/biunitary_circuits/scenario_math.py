"""Exact-string numbers for scenario files, such as ``"pi/7"`` or ``"2*pi/3"``."""

from __future__ import annotations

import ast
import math
import operator

_BIN = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e}


def parse_number(value) -> float:
    """Evaluate a number or an arithmetic string over ``pi`` and ``e``."""
    if isinstance(value, (int, float)):
        return float(value)
    tree = ast.parse(str(value).strip(), mode="eval")
    return float(_eval(tree.body))


def _eval(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BIN:
        return _BIN[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    raise ValueError(f"unsupported expression {ast.dump(node)}")
