"""Recursive-descent parser/evaluator for scalar math expressions.

Grammar (whitespace insignificant, '^' right-associative):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?
    unary  := '-'? atom
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

Known functions: sin, cos, tan, atan2, sqrt, abs, exp, log.
Known constant: pi.  Angles are radians throughout.  No implicit
multiplication.  Evaluation is numpy-transparent: bindings may be floats
or ndarrays and broadcast like any ufunc expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ExprError(ValueError):
    """Base class for expression errors; carries a byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ExprSyntaxError(ExprError):
    pass


class ExprEvalError(ExprError):
    pass


_FUNCTIONS = {
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "tan": (1, np.tan),
    "atan2": (2, None),  # handled specially: atan2(0,0) is an error
    "sqrt": (1, None),
    "abs": (1, np.abs),
    "exp": (1, np.exp),
    "log": (1, None),
}

_CONSTANTS = {"pi": np.pi}


# ----------------------------------------------------------------------
# AST nodes.  `offset` is the source position for error reporting and is
# excluded from equality so that structural comparison ignores layout.

@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: object
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    offset: int = field(default=0, compare=False)


Expr = (Num, Var, Neg, BinOp, Call)


# ----------------------------------------------------------------------
# Tokenizer

_SINGLE = set("+-*/^(),")


def _tokenize(source):
    tokens = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
        elif ch in _SINGLE:
            tokens.append((ch, ch, i))
            i += 1
        elif ch.isdigit() or ch == ".":
            j = i
            while j < n and (source[j].isdigit() or source[j] == "."):
                j += 1
            # exponent part: 1e-3, 2.5E+10
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            try:
                value = float(text)
            except ValueError:
                raise ExprSyntaxError(f"bad number literal '{text}'", i) from None
            tokens.append(("num", value, i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(("ident", source[i:j], i))
            i = j
        else:
            raise ExprSyntaxError(f"unexpected character '{ch}'", i)
    tokens.append(("end", "", n))
    return tokens


# ----------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = frozenset(variables)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected '{kind}', found '{tok[1]}'", tok[2])
        return tok

    def parse_expr(self):
        node = self.parse_term()
        while self.peek()[0] in ("+", "-"):
            op, _, off = self.advance()
            node = BinOp(op, node, self.parse_term(), off)
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek()[0] in ("*", "/"):
            op, _, off = self.advance()
            node = BinOp(op, node, self.parse_factor(), off)
        return node

    def parse_factor(self):
        node = self.parse_unary()
        if self.peek()[0] == "^":
            _, _, off = self.advance()
            node = BinOp("^", node, self.parse_factor(), off)  # right-assoc
        return node

    def parse_unary(self):
        if self.peek()[0] == "-":
            _, _, off = self.advance()
            return Neg(self.parse_atom(), off)
        return self.parse_atom()

    def parse_atom(self):
        kind, text, off = self.advance()
        if kind == "num":
            return Num(text, off)
        if kind == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        if kind == "ident":
            if self.peek()[0] == "(":
                self.advance()
                args = [self.parse_expr()]
                while self.peek()[0] == ",":
                    self.advance()
                    args.append(self.parse_expr())
                self.expect(")")
                if text not in _FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function '{text}'", off)
                arity = _FUNCTIONS[text][0]
                if len(args) != arity:
                    raise ExprSyntaxError(
                        f"'{text}' takes {arity} argument(s), got {len(args)}", off)
                return Call(text, tuple(args), off)
            if text in _CONSTANTS:
                return Num(_CONSTANTS[text], off)
            if text not in self.variables:
                raise ExprSyntaxError(f"unknown identifier '{text}'", off)
            return Var(text, off)
        raise ExprSyntaxError(f"unexpected '{text}'" if text else "unexpected end of input", off)


def parse(source, variables=("x1", "x2")):
    """Parse `source` into an AST; `variables` is the allowed name set."""
    parser = _Parser(_tokenize(source), variables)
    node = parser.parse_expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ExprSyntaxError(f"unexpected trailing '{tok[1]}'", tok[2])
    return node


# ----------------------------------------------------------------------
# Evaluation

def evaluate(node, bindings):
    """Evaluate an AST with `bindings` mapping variable names to values.

    Values may be scalars or numpy arrays.  Raises ExprEvalError on
    domain failures (x/0, log of nonpositive, sqrt of negative,
    atan2(0,0), fractional power of a negative base).
    """
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return bindings[node.name]
        except KeyError:
            raise ExprEvalError(f"unbound variable '{node.name}'", node.offset) from None
    if isinstance(node, Neg):
        return -evaluate(node.operand, bindings)
    if isinstance(node, BinOp):
        left = evaluate(node.left, bindings)
        right = evaluate(node.right, bindings)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            if np.any(right == 0):
                raise ExprEvalError("division by zero", node.offset)
            return left / right
        if node.op == "^":
            with np.errstate(invalid="ignore", divide="ignore"):
                result = np.power(np.asarray(left, dtype=float), right)
            if np.any(np.isnan(result)):
                raise ExprEvalError("invalid power (negative base, fractional exponent?)",
                                    node.offset)
            if np.any(np.isinf(result)) and np.all(np.isfinite(left)) \
                    and np.all(np.isfinite(right)):
                raise ExprEvalError("power overflow or zero to negative power", node.offset)
            return result if result.ndim else float(result)
        raise ExprEvalError(f"unknown operator '{node.op}'", node.offset)
    if isinstance(node, Call):
        args = [evaluate(a, bindings) for a in node.args]
        if node.func == "atan2":
            y, x = args
            if np.any((np.asarray(y) == 0) & (np.asarray(x) == 0)):
                raise ExprEvalError("atan2(0, 0) is undefined", node.offset)
            return np.arctan2(y, x)
        if node.func == "sqrt":
            if np.any(np.asarray(args[0]) < 0):
                raise ExprEvalError("sqrt of negative value", node.offset)
            return np.sqrt(args[0])
        if node.func == "log":
            if np.any(np.asarray(args[0]) <= 0):
                raise ExprEvalError("log of nonpositive value", node.offset)
            return np.log(args[0])
        return _FUNCTIONS[node.func][1](*args)
    raise TypeError(f"not an expression node: {node!r}")


def to_source(node):
    """Canonical, fully parenthesized rendering; reparses to an equal tree."""
    if isinstance(node, Num):
        return f"{node.value:.17g}"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def compile_expression(source, variables=("x1", "x2")):
    """Parse once, return a callable evaluating with keyword bindings."""
    node = parse(source, variables)

    def fn(**bindings):
        return evaluate(node, bindings)

    fn.ast = node
    fn.source = source
    return fn
