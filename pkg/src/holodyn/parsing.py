"""Small exact expression grammar.

ASCII only; ``*`` is explicit, ``^`` (or ``**``) raises to a non-negative
integer power, ``i`` and ``tau`` are literals, and ``x``, ``y``, ``z`` are
variables when the caller supplies them.  Evaluation is delegated to whatever
objects the namespace maps names to, so the same grammar yields Scalars, jets
or three-variable polynomials.
"""

import ast

from .errors import ParseError
from .scalar import I, TAU, Scalar

__all__ = ["evaluate_expression", "parse_scalar"]

_SCALAR_NAMES = {"i": I, "tau": TAU}


def _translate(text):
    """Replace ``^`` by ``**``; return new text and a new->old column map."""
    out = []
    cols = []
    for k, ch in enumerate(text):
        if ch == "^":
            out.append("**")
            cols.extend([k, k])
        else:
            out.append(ch)
            cols.append(k)
    cols.append(len(text))
    return "".join(out), cols


class _Evaluator:
    def __init__(self, text, cols, names):
        self.text = text
        self.cols = cols
        self.names = names

    def fail(self, message, node):
        col = getattr(node, "col_offset", 0)
        col = self.cols[min(col, len(self.cols) - 1)]
        raise ParseError(message, col, self.text)

    def visit(self, node):
        if isinstance(node, ast.Expression):
            return self.visit(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                self.fail(f"unsupported literal {node.value!r}", node)
            return Scalar(node.value)
        if isinstance(node, ast.Name):
            if node.id in self.names:
                return self.names[node.id]
            if node.id in _SCALAR_NAMES:
                return _SCALAR_NAMES[node.id]
            self.fail(f"unknown name '{node.id}'", node)
        if isinstance(node, ast.UnaryOp):
            operand = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return -operand
            if isinstance(node.op, ast.UAdd):
                return operand
            self.fail("unsupported unary operator", node)
        if isinstance(node, ast.BinOp):
            return self.binop(node)
        self.fail(f"unsupported syntax ({type(node).__name__})", node)

    def binop(self, node):
        left = self.visit(node.left)
        if isinstance(node.op, ast.Pow):
            exp = node.right
            sign = 1
            if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                sign, exp = -1, exp.operand
            if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)
                    and not isinstance(exp.value, bool)):
                self.fail("exponent must be an integer literal", node.right)
            n = sign * exp.value
            if n < 0 and not isinstance(left, Scalar):
                self.fail("negative powers are only allowed on scalars", node.right)
            return left ** n
        right = self.visit(node.right)
        try:
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if not isinstance(right, Scalar):
                    self.fail("division is only allowed by scalars", node.right)
                if not right:
                    self.fail("division by zero", node.right)
                return left * right.inverse()
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            self.fail(str(exc), node)
        self.fail("unsupported operator", node)


def evaluate_expression(text, names=None):
    """Parse ``text`` and evaluate it with the objects bound in ``names``."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", 0, text if isinstance(text, str) else "")
    if not text.isascii():
        bad = next(k for k, ch in enumerate(text) if not ch.isascii())
        raise ParseError("non-ASCII character", bad, text)
    src, cols = _translate(text)
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        # an offset of 0 means the parser ran off the end of the text
        offset = exc.offset - 1 if exc.offset else len(src.strip())
        lead = len(src) - len(src.lstrip())
        col = cols[min(offset + lead, len(cols) - 1)]
        raise ParseError(f"syntax error: {exc.msg}", col, text) from None
    lead = len(src) - len(src.lstrip())
    return _Evaluator(text, cols[lead:], names or {}).visit(tree)


def parse_scalar(text):
    value = evaluate_expression(text)
    if not isinstance(value, Scalar):
        raise ParseError("expression is not a scalar", 0, text)
    return value
