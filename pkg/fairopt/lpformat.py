# Copyright © 2026 fairopt contributors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of this
# software and associated documentation files (the "Software"), to deal in the Software
# without restriction, including without limitation the rights to use, copy, modify,
# merge, publish, distribute, sublicense, and/or sell copies of the Software, and to
# permit persons to whom the Software is furnished to do so, subject to the following
# conditions:
#
# The above copyright notice and this permission notice shall be included in all copies
# or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED,
# INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A
# PARTICULAR PURPOSE AND NON-INFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT
# HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF
# CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE
# OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

"""A strict reader for the LP text written by `fairopt.oracle.export_ip()`.

The accepted dialect is a subset of the common LP format:

```
\\ comment
Maximize
 obj: 0.75 r_1 + 0.5 r_2 - 0.75 d_1_1 - ...
Subject To
 row_1: z_1_1 + z_1_2 = 1
 link_1_1: r_1 - d_1_1 - 5 z_1_1 - z_1_2 <= 0
Bounds
 r_1 free
 0 <= d_1_1 <= 10
Binaries
 z_1_1 z_1_2
End
```

Sections must come in this order; `Bounds` and `Binaries` are optional. Every
variable named in `Bounds` or `Binaries` must occur in the objective or in a
constraint, and constraint labels must be unique. The parsed `LpModel` evaluates
the objective and checks the constraints at a given point, so an exported model
can be verified without a MILP solver.
"""

__all__ = [
    "LpConstraint",
    "LpModel",
    "tokenize",
    "parse_lp",
    "read_lp",
]

import math
import os
import re
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Tuple, Union

from funcparserlib.lexer import LexerError, Token, TokenSpec, make_tokenizer
from funcparserlib.parser import (
    NoParseError,
    Parser,
    finished,
    many,
    maybe,
    some,
)

from fairopt.errors import LpSyntaxError

_tokenizer = make_tokenizer(
    [
        TokenSpec("space", r"[ \t\r\n]+"),
        TokenSpec("comment", r"\\[^\n]*"),
        TokenSpec(
            "kw",
            r"(maximize|subject[ \t]+to|bounds|binaries|end|free)(?![A-Za-z0-9_.])",
            flags=re.IGNORECASE,
        ),
        TokenSpec("name", r"[A-Za-z_][A-Za-z0-9_.]*"),
        TokenSpec("number", r"([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+\-]?[0-9]+)?"),
        TokenSpec("op", r"<=|>=|=<|=>|[=<>+\-:]"),
    ]
)

_RELATIONS = {
    "<=": "<=",
    "=<": "<=",
    "<": "<=",
    ">=": ">=",
    "=>": ">=",
    ">": ">=",
    "=": "=",
}


class LpConstraint(NamedTuple):
    name: str
    coefs: Dict[str, float]
    sense: str
    rhs: float
    line: int


class LpModel:
    """A maximization model read from LP text.

    Attributes:
        objective_name (str): Label of the objective
        objective (Dict[str, float]): Objective coefficients by variable
        constraints (List[LpConstraint]): Constraints in file order
        bounds (Dict[str, Tuple[float, float]]): Explicit variable bounds; other
            variables range over `[0, inf)`
        binaries (List[str]): Binary variables
    """

    def __init__(
        self,
        objective_name: str,
        objective: Dict[str, float],
        constraints: List[LpConstraint],
        bounds: Dict[str, Tuple[float, float]],
        binaries: List[str],
    ) -> None:
        self.objective_name = objective_name
        self.objective = objective
        self.constraints = constraints
        self.bounds = bounds
        self.binaries = binaries

    @property
    def variables(self) -> List[str]:
        """Variables in order of first occurrence."""
        seen: Dict[str, None] = {}
        for name in self.objective:
            seen.setdefault(name)
        for c in self.constraints:
            for name in c.coefs:
                seen.setdefault(name)
        return list(seen)

    def bound(self, var: str) -> Tuple[float, float]:
        if var in self.binaries:
            return 0.0, 1.0
        return self.bounds.get(var, (0.0, math.inf))

    def evaluate(self, point: Mapping[str, float]) -> float:
        """Return the objective value at `point`; missing variables are 0."""
        return math.fsum(c * point.get(v, 0.0) for v, c in self.objective.items())

    def violations(self, point: Mapping[str, float], tol: float = 1e-9) -> List[str]:
        """Return the names of the constraints, bounds and integrality requirements
        violated at `point`."""
        result = []
        for c in self.constraints:
            lhs = math.fsum(a * point.get(v, 0.0) for v, a in c.coefs.items())
            if c.sense == "<=" and lhs > c.rhs + tol:
                result.append(c.name)
            elif c.sense == ">=" and lhs < c.rhs - tol:
                result.append(c.name)
            elif c.sense == "=" and abs(lhs - c.rhs) > tol:
                result.append(c.name)
        for var in self.variables:
            x = point.get(var, 0.0)
            lo, hi = self.bound(var)
            if x < lo - tol or x > hi + tol:
                result.append("bound %s" % var)
            if var in self.binaries and min(abs(x), abs(x - 1.0)) > tol:
                result.append("binary %s" % var)
        return result

    def __repr__(self) -> str:
        return "LpModel(%d variables, %d constraints)" % (
            len(self.variables),
            len(self.constraints),
        )


class _Term(NamedTuple):
    sign: Optional[Token]
    coef: Optional[Token]
    var: Token


class _Signed(NamedTuple):
    sign: Optional[Token]
    value: Token


def tokenize(s: str) -> List[Token]:
    try:
        return [t for t in _tokenizer(s) if t.type not in ("space", "comment")]
    except LexerError as e:
        line, _ = e.place
        raise LpSyntaxError(line, "unexpected characters in %r" % e.msg)


def _line(t: Token) -> int:
    return t.start[0] if t.start is not None else 0


def _kw(name: str) -> Parser[Token, Token]:
    def pred(t: Token) -> bool:
        return t.type == "kw" and " ".join(t.value.lower().split()) == name

    return some(pred).named(repr(name))


def _op(value: str) -> Parser[Token, Token]:
    return some(lambda t: t.type == "op" and t.value == value).named(repr(value))


def _type(type: str) -> Parser[Token, Token]:
    return some(lambda t: t.type == type).named(type)


def _grammar() -> Parser[Token, Any]:
    name = _type("name")
    number = _type("number")
    sign = _op("+") | _op("-")
    relation = some(lambda t: t.type == "op" and t.value in _RELATIONS).named(
        "relation"
    )
    infinity = some(
        lambda t: t.type == "name" and t.value.lower() in ("inf", "infinity")
    ).named("inf")

    first_term = maybe(sign) + maybe(number) + name >> (lambda v: _Term(*v))
    next_term = sign + maybe(number) + name >> (lambda v: _Term(*v))
    expr = first_term + many(next_term)
    label = name + -_op(":")
    value = maybe(sign) + (number | infinity) >> (lambda v: _Signed(*v))

    objective = -_kw("maximize") + maybe(label) + expr
    constraint = maybe(label) + expr + relation + value
    free = name + -_kw("free")
    double = value + relation + name + relation + value
    upper = name + relation + value
    lower = value + relation + name
    bound = free | double | upper | lower
    document = (
        objective
        + -_kw("subject to")
        + many(constraint)
        + maybe(-_kw("bounds") + many(bound))
        + maybe(-_kw("binaries") + many(name))
        + -_kw("end")
        + -finished
    )
    return document


_document = _grammar()


def _number(s: _Signed) -> float:
    x = math.inf if s.value.type == "name" else float(s.value.value)
    return -x if s.sign is not None and s.sign.value == "-" else x


def _expr(parsed: Tuple[_Term, List[_Term]], where: str) -> Dict[str, float]:
    first, rest = parsed
    coefs: Dict[str, float] = {}
    for term in [first] + rest:
        var = term.var.value
        if var in coefs:
            raise LpSyntaxError(
                _line(term.var), "variable %s repeated in %s" % (var, where)
            )
        x = float(term.coef.value) if term.coef is not None else 1.0
        coefs[var] = -x if term.sign is not None and term.sign.value == "-" else x
    return coefs


def _relation(t: Token) -> str:
    return _RELATIONS[t.value]


def _set_bound(
    bounds: Dict[str, Tuple[float, float]],
    var: Token,
    sense: str,
    x: float,
) -> None:
    lo, hi = bounds.get(var.value, (0.0, math.inf))
    if sense == "<=":
        bounds[var.value] = (lo, x)
    elif sense == ">=":
        bounds[var.value] = (x, hi)
    else:
        bounds[var.value] = (x, x)


_FLIP = {"<=": ">=", ">=": "<=", "=": "="}


def _bound(entry: Any, bounds: Dict[str, Tuple[float, float]]) -> Token:
    if isinstance(entry, Token):
        bounds[entry.value] = (-math.inf, math.inf)
        return entry
    if len(entry) == 5:
        lo, rel1, var, rel2, hi = entry
        if _relation(rel1) != "<=" or _relation(rel2) != "<=":
            raise LpSyntaxError(_line(var), "a double bound must read lo <= x <= hi")
        bounds[var.value] = (_number(lo), _number(hi))
        return var
    if isinstance(entry[0], Token):
        var, rel, x = entry
        _set_bound(bounds, var, _relation(rel), _number(x))
        return var
    x, rel, var = entry
    _set_bound(bounds, var, _FLIP[_relation(rel)], _number(x))
    return var


def parse_lp(text: str) -> LpModel:
    """Parse LP text into an `LpModel`.

    Type: `(str) -> LpModel`

    Raises `LpSyntaxError` with the line of the first problem.
    """
    tokens = tokenize(text)
    try:
        obj_label, obj_expr, rows, bound_entries, binary_names = _document.parse(tokens)
    except NoParseError as e:
        if e.state.max < len(tokens):
            line = _line(tokens[e.state.max])
        elif tokens:
            line = _line(tokens[-1])
        else:
            line = 1
        raise LpSyntaxError(line, e.msg)

    objective = _expr(obj_expr, "the objective")
    constraints: List[LpConstraint] = []
    labels = set()
    for index, (label, expr, rel, rhs) in enumerate(rows):
        name = label.value if label is not None else "c%d" % (index + 1)
        line = _line(label) if label is not None else _line(rel)
        if name in labels:
            raise LpSyntaxError(line, "duplicate constraint label %s" % name)
        labels.add(name)
        coefs = _expr(expr, name)
        constraints.append(
            LpConstraint(name, coefs, _relation(rel), _number(rhs), line)
        )

    used = set(objective)
    for c in constraints:
        used.update(c.coefs)

    bounds: Dict[str, Tuple[float, float]] = {}
    for entry in bound_entries or []:
        var = _bound(entry, bounds)
        if var.value not in used:
            raise LpSyntaxError(
                _line(var), "undeclared variable %s in Bounds" % var.value
            )
    binaries: List[str] = []
    for var in binary_names or []:
        if var.value not in used:
            raise LpSyntaxError(
                _line(var), "undeclared variable %s in Binaries" % var.value
            )
        binaries.append(var.value)

    name = obj_label.value if obj_label is not None else "obj"
    return LpModel(name, objective, constraints, bounds, binaries)


def read_lp(path: Union[str, "os.PathLike[str]"]) -> LpModel:
    with open(path, encoding="utf-8") as f:
        return parse_lp(f.read())
