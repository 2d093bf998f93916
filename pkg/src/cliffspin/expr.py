"""A tiny expression grammar for fields, used by the command line.

Accepted: integer/rational literals, ``x1..xm``, ``u1..um``, ``v1..vm`` (an
underscore is allowed, ``x_1``), blades ``e1``, ``e23``, the radial variable
``r`` = ||x|| (any integer power), the imaginary unit ``i``, and ``+ - * / ^``
with parentheses.  Division is only by numbers.

>>> parse_field("x1^2*u1", 3).to_latex()
'x_1^{2} u_1'
"""

from __future__ import annotations

import ast
import re

from .clifford import Multivector
from .fields import RadialField
from .scalars import I, Q

__all__ = ["parse_field", "ExpressionError"]

_NAME = re.compile(r"^(x|u|v|e)_?(\d+)$")


class ExpressionError(ValueError):
    pass


def _symbol(name, m):
    if name == "r":
        return ("radial", None)
    if name == "i":
        return ("const", RadialField.const(m, I))
    mt = _NAME.match(name)
    if not mt:
        raise ExpressionError(f"unknown symbol {name!r}")
    kind, digits = mt.groups()
    if kind == "e":
        idx = [int(c) for c in digits] if len(digits) > 1 or m < 10 else [int(digits)]
        if any(not 1 <= i <= m for i in idx) or len(set(idx)) != len(idx):
            raise ExpressionError(f"bad blade {name!r} for m = {m}")
        return ("const", RadialField.const(m, Multivector.blade(m, tuple(idx))))
    i = int(digits)
    if not 1 <= i <= m:
        raise ExpressionError(f"index of {name!r} out of range 1..{m}")
    return ("const", getattr(RadialField, kind)(m, i))


def _number(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        v = _number(node.operand)
        return None if v is None else -v
    return None


def _eval(node, m):
    if isinstance(node, ast.Expression):
        return _eval(node.body, m)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int) and not isinstance(node.value, bool):
            return RadialField.const(m, node.value)
        raise ExpressionError(f"unsupported literal {node.value!r}")
    if isinstance(node, ast.Name):
        kind, val = _symbol(node.id, m)
        return RadialField.radial(m, 1) if kind == "radial" else val
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, m)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            p = _number(node.right)
            if p is None:
                raise ExpressionError("exponents must be integer literals")
            if isinstance(node.left, ast.Name) and node.left.id == "r":
                return RadialField.radial(m, p)
            if p < 0:
                raise ExpressionError("negative powers are only allowed on r")
            return _eval(node.left, m) ** p
        if isinstance(node.op, ast.Div):
            a = _eval(node.left, m)
            d = _number(node.right)
            if d is None or d == 0:
                raise ExpressionError("division only by a nonzero integer literal")
            return a * Q(1, d)
        a, b = _eval(node.left, m), _eval(node.right, m)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")


def parse_field(text: str, m: int) -> RadialField:
    """Parse ``text`` into a RadialField of dimension m."""
    if not text or not text.strip():
        raise ExpressionError("empty expression")
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval(tree, m)
