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

"""Exceptions raised by `fairopt`.

Every exception derives from `FairOptError`. Errors about bad arguments also
derive from `ValueError`, so callers that only care about "bad input" can keep
catching the built-in class.
"""

__all__ = [
    "FairOptError",
    "ValidationError",
    "CapacityError",
    "InfeasibleSolutionError",
    "DualFeasibilityError",
    "InstanceParseError",
    "LpSyntaxError",
]

from typing import Optional


class FairOptError(Exception):
    pass


class ValidationError(FairOptError, ValueError):
    """An argument violates its precondition.

    Attributes:
        msg (str): What is wrong
        index (Optional[int]): 1-based index of the offending entry, if any
    """

    def __init__(self, msg: str, index: Optional[int] = None) -> None:
        super().__init__(msg)
        self.msg = msg
        self.index = index

    def __str__(self) -> str:
        if self.index is None:
            return self.msg
        return "%s (at index %d)" % (self.msg, self.index)


class CapacityError(FairOptError):
    """The input is larger than an exact method can handle.

    Attributes:
        what (str): Name of the method that refused the input
        size (int): Size of the input
        cap (int): Largest accepted size
        advice (str): What to do instead
    """

    def __init__(self, what: str, size: int, cap: int, advice: str = "") -> None:
        super().__init__(what, size, cap)
        self.what = what
        self.size = size
        self.cap = cap
        self.advice = advice

    def __str__(self) -> str:
        s = "%s: size %d exceeds the cap of %d" % (self.what, self.size, self.cap)
        if self.advice:
            s = "%s; %s" % (s, self.advice)
        return s


class InfeasibleSolutionError(FairOptError, ValueError):
    def __init__(self, msg: str) -> None:
        super().__init__(msg)
        self.msg = msg

    def __str__(self) -> str:
        return "infeasible solution: %s" % self.msg


class DualFeasibilityError(FairOptError, ValueError):
    def __init__(self, msg: str, violation: float) -> None:
        super().__init__(msg, violation)
        self.msg = msg
        self.violation = violation

    def __str__(self) -> str:
        return "dual weights outside the polytope: %s (violation %.3g)" % (
            self.msg,
            self.violation,
        )


class InstanceParseError(FairOptError):
    """An instance file cannot be read.

    Attributes:
        line (int): 1-based line number of the problem
        msg (str): Description of the problem
    """

    def __init__(self, line: int, msg: str) -> None:
        super().__init__(line, msg)
        self.line = line
        self.msg = msg

    def __str__(self) -> str:
        return "cannot read instance: line %d: %s" % (self.line, self.msg)


class LpSyntaxError(FairOptError):
    def __init__(self, line: int, msg: str) -> None:
        super().__init__(line, msg)
        self.line = line
        self.msg = msg

    def __str__(self) -> str:
        return "invalid LP text: line %d: %s" % (self.line, self.msg)
