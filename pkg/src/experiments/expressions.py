"""
Closed-form expression strings for coefficients, data and nonlinearities.

Expressions are parsed with sympy after a lexical whitelist and compiled to
numpy callables. Supported: numbers, + - * / ^, parentheses, the functions
abs, ln, log, exp, sqrt, min, max, cosh, sinh and the variables x1, x2, r
(= |x|) for fields or s for nonlinearities.
"""

import re
from tokenize import TokenError
from typing import Callable, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from common.exceptions import ConfigurationError


FUNCTIONS = {
    'abs': sympy.Abs,
    'ln': sympy.log,
    'log': sympy.log,
    'exp': sympy.exp,
    'sqrt': sympy.sqrt,
    'min': sympy.Min,
    'max': sympy.Max,
    'cosh': sympy.cosh,
    'sinh': sympy.sinh,
}

CONSTANTS = {'pi': sympy.pi, 'inf': sympy.oo}

FIELD_VARIABLES = ('x1', 'x2', 'r')
NONLINEARITY_VARIABLES = ('s',)

_CHARACTERS = re.compile(r'^[0-9A-Za-z_+\-*/^().,\s]*$')
_IDENTIFIER = re.compile(r'[A-Za-z_][A-Za-z_0-9]*')
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


def parse(text: Union[str, float, int], variables: tuple) -> sympy.Expr:
    if isinstance(text, (int, float)):
        return sympy.Float(text)
    if not isinstance(text, str) or not text.strip():
        raise ConfigurationError(f'expression must be a non-empty string, got {text!r}')
    if not _CHARACTERS.match(text):
        raise ConfigurationError(f'expression {text!r} contains unsupported characters')

    for name in _IDENTIFIER.findall(text):
        if name not in FUNCTIONS and name not in CONSTANTS and name not in variables:
            raise ConfigurationError(f'unknown name {name!r} in expression {text!r}')

    symbols = {name: sympy.Symbol(name, real=True) for name in variables}
    try:
        expression = parse_expr(
            text,
            local_dict={**symbols, **FUNCTIONS, **CONSTANTS},
            transformations=_TRANSFORMATIONS,
        )
    except (SyntaxError, TokenError, TypeError, ValueError) as error:
        raise ConfigurationError(f'cannot parse expression {text!r}: {error}')

    if not isinstance(expression, sympy.Expr):
        raise ConfigurationError(f'expression {text!r} is not a scalar expression')
    return expression


def compile_field(text: Union[str, float, int]) -> Union[float, Callable[[np.ndarray], np.ndarray]]:
    """A constant or a vectorized callable of the (N, n) node array."""
    expression = parse(text, FIELD_VARIABLES)
    if not expression.free_symbols:
        return float(expression)

    symbols = [sympy.Symbol(name, real=True) for name in FIELD_VARIABLES]
    function = sympy.lambdify(symbols, expression, modules='numpy')

    def field(points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        x1 = points[:, 0]
        x2 = points[:, 1] if points.shape[1] > 1 else np.zeros_like(x1)
        r = np.linalg.norm(points, axis=1)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.broadcast_to(function(x1, x2, r), x1.shape).astype(float)

    return field


def compile_vector(spec) -> Union[float, Callable[[np.ndarray], np.ndarray]]:
    """A scalar expression (1D or zero) or one expression per axis."""
    if not isinstance(spec, (list, tuple)):
        return compile_field(spec)

    components = [compile_field(item) for item in spec]
    if all(not callable(c) for c in components):
        return tuple(components)

    def field(points: np.ndarray) -> np.ndarray:
        count = np.atleast_2d(points).shape[0]
        return np.column_stack(
            [c(points) if callable(c) else np.full(count, c) for c in components]
        )

    return field


def compile_matrix(spec) -> Union[float, Callable[[np.ndarray], np.ndarray]]:
    """A scalar a(x)·I or a nested list of entry expressions."""
    if not isinstance(spec, (list, tuple)):
        return compile_field(spec)

    rows = [[compile_field(item) for item in row] for row in spec]
    if all(not callable(e) for row in rows for e in row):
        return tuple(tuple(row) for row in rows)

    def field(points: np.ndarray) -> np.ndarray:
        count = np.atleast_2d(points).shape[0]
        return np.stack(
            [
                np.column_stack([e(points) if callable(e) else np.full(count, e) for e in row])
                for row in rows
            ],
            axis=1,
        )

    return field


def compile_nonlinearity(text: str) -> Callable[[np.ndarray], np.ndarray]:
    expression = parse(text, NONLINEARITY_VARIABLES)
    function = sympy.lambdify(sympy.Symbol('s', real=True), expression, modules='numpy')

    def nonlinearity(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.broadcast_to(function(s), s.shape).astype(float)

    return nonlinearity
