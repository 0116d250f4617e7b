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

"""Reading and writing instance files.

The format is line oriented:

```
fairopt-instance v1
kind matching
n 2
vertices 4
provenance d=0 seed=7
u
-1000 57 57
41 41
12
```

The `vertices` line is present for matching instances only and the `provenance`
line is optional. An assignment instance has `n` utility rows of `n` integers. A
matching instance has `2n - 1` rows, row `i` holding `u[i, i+1 .. 2n]`.

The reader is a `funcparserlib` grammar over the tokens of the file, so that every
error is reported with the line it occurs on.
"""

__all__ = [
    "tokenize",
    "parse",
    "loads",
    "dumps",
    "read_instance",
    "write_instance",
]

import os
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from funcparserlib.lexer import LexerError, Token, TokenSpec, make_tokenizer
from funcparserlib.parser import (
    NoParseError,
    Parser,
    finished,
    many,
    maybe,
    oneplus,
    some,
)

from fairopt.errors import InstanceParseError, ValidationError
from fairopt.instances import KINDS, Instance, Provenance

MAGIC = "fairopt-instance"
VERSION = "v1"

_Header = Tuple[
    Token,
    Token,
    Token,
    Optional[Token],
    Optional[Tuple[Token, Token]],
    List[List[Token]],
]

_tokenizer = make_tokenizer(
    [
        TokenSpec("space", r"[ \t]+"),
        TokenSpec("nl", r"\r?\n"),
        TokenSpec("name", r"[A-Za-z_][A-Za-z0-9_\-]*"),
        TokenSpec("int", r"[+\-]?[0-9]+"),
        TokenSpec("op", r"="),
    ]
)


def tokenize(s: str) -> List[Token]:
    if not s.endswith("\n"):
        s += "\n"
    try:
        return [t for t in _tokenizer(s) if t.type != "space"]
    except LexerError as e:
        line, _ = e.place
        raise InstanceParseError(line, "unexpected characters in %r" % e.msg)


def _line(t: Token) -> int:
    return t.start[0] if t.start is not None else 0


def _token(type: str, value: Optional[str] = None) -> Parser[Token, Token]:
    if value is None:
        return some(lambda t: t.type == type).named(type)
    return some(lambda t: t.type == type and t.value == value).named(repr(value))


def _grammar() -> Parser[Token, _Header]:
    nl = _token("nl")
    integer = _token("int")

    def kw(s: str) -> Parser[Token, Token]:
        return _token("name", s)

    header = -kw(MAGIC) + _token("name") + -nl
    kind = -kw("kind") + _token("name") + -nl
    size = -kw("n") + integer + -nl
    vertices = -kw("vertices") + integer + -nl
    provenance = (
        -kw("provenance")
        + -kw("d")
        + -_token("op", "=")
        + integer
        + -kw("seed")
        + -_token("op", "=")
        + integer
        + -nl
    )
    row = oneplus(integer) + -nl
    document = (
        header
        + kind
        + size
        + maybe(vertices)
        + maybe(provenance)
        + -kw("u")
        + -nl
        + many(row)
        + -many(nl)
        + -finished
    )
    return document


_document = _grammar()


def _int(t: Token) -> int:
    return int(t.value)


_INT64 = np.iinfo(np.int64)


def _utility(t: Token) -> int:
    x = int(t.value)
    if not _INT64.min <= x <= _INT64.max:
        raise InstanceParseError(
            _line(t), "utility %s is out of the int64 range" % t.value
        )
    return x


def _check_row(number: int, row: Sequence[Token], expected: int) -> None:
    if len(row) != expected:
        raise InstanceParseError(
            _line(row[0]),
            "utility row %d: expected %d values, got %d" % (number, expected, len(row)),
        )


def parse(tokens: Sequence[Token]) -> Instance:
    """Parse the tokens of an instance file into an `Instance`.

    Raises `InstanceParseError` with the line number of the first problem.
    """
    try:
        version, kind_tok, n_tok, vertices_tok, prov, rows = _document.parse(tokens)
    except NoParseError as e:
        if e.state.max < len(tokens):
            line = _line(tokens[e.state.max])
        elif tokens:
            line = _line(tokens[-1])
        else:
            line = 1
        raise InstanceParseError(line, e.msg)

    if version.value != VERSION:
        raise InstanceParseError(
            _line(version), "unsupported format version %r" % version.value
        )
    kind = kind_tok.value
    if kind not in KINDS:
        raise InstanceParseError(_line(kind_tok), "unsupported problem kind %r" % kind)
    n = _int(n_tok)
    if n < 1:
        raise InstanceParseError(_line(n_tok), "n must be positive, got %d" % n)
    end_line = _line(tokens[-1])

    if kind == "assignment":
        if vertices_tok is not None:
            raise InstanceParseError(
                _line(vertices_tok), "a vertices line is only valid for matching"
            )
        if len(rows) != n:
            raise InstanceParseError(
                end_line, "expected %d utility rows, got %d" % (n, len(rows))
            )
        for i, row in enumerate(rows):
            _check_row(i + 1, row, n)
        u = np.array([[_utility(t) for t in row] for row in rows], dtype=np.int64)
    else:
        if vertices_tok is None:
            raise InstanceParseError(_line(n_tok) + 1, "missing vertices line")
        if _int(vertices_tok) != 2 * n:
            raise InstanceParseError(
                _line(vertices_tok),
                "expected %d vertices for n = %d, got %s"
                % (2 * n, n, vertices_tok.value),
            )
        size = 2 * n
        if len(rows) != size - 1:
            raise InstanceParseError(
                end_line, "expected %d utility rows, got %d" % (size - 1, len(rows))
            )
        u = np.zeros((size, size), dtype=np.int64)
        for i, row in enumerate(rows):
            _check_row(i + 1, row, size - 1 - i)
            u[i, i + 1 :] = [_utility(t) for t in row]

    provenance = None
    if prov is not None:
        d_tok, seed_tok = prov
        if _int(d_tok) < 0 or _int(seed_tok) < 0:
            raise InstanceParseError(
                _line(d_tok), "provenance values must be non-negative"
            )
        provenance = Provenance(_int(d_tok), _int(seed_tok))
    return Instance(kind, n, u, provenance)


def loads(s: str) -> Instance:
    return parse(tokenize(s))


def dumps(inst: Instance) -> str:
    if inst.kind == "assignment" and not inst.square:
        raise ValidationError("instance files hold square assignment matrices only")
    lines = [
        "%s %s" % (MAGIC, VERSION),
        "kind %s" % inst.kind,
        "n %d" % inst.n,
    ]
    if inst.kind == "matching":
        lines.append("vertices %d" % (2 * inst.n))
    if inst.provenance is not None:
        lines.append(
            "provenance d=%d seed=%d" % (inst.provenance.d, inst.provenance.seed)
        )
    lines.append("u")
    if inst.kind == "assignment":
        rows = [inst.u[i] for i in range(inst.n)]
    else:
        rows = [inst.u[i, i + 1 :] for i in range(2 * inst.n - 1)]
    lines.extend(" ".join(str(int(x)) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def read_instance(path: Union[str, "os.PathLike[str]"]) -> Instance:
    with open(path, "rb") as f:
        data = f.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise InstanceParseError(line, "the file is not valid UTF-8")
    return loads(text)


def write_instance(inst: Instance, path: Union[str, "os.PathLike[str]"]) -> None:
    text = dumps(inst)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
