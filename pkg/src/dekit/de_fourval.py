# -*- coding: utf-8 -*-

#     dekit - hierarchical four-valued netlist toolkit
#
#     Copyright (C) 2024  dekit developers
#
#     This program is free software: you can redistribute it and/or modify
#     it under the terms of the GNU General Public License as published by
#     the Free Software Foundation, either version 3 of the License, or
#     (at your option) any later version.
#
#     This program is distributed in the hope that it will be useful,
#     but WITHOUT ANY WARRANTY; without even the implied warranty of
#     MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#     GNU General Public License for more details.
#
#     You should have received a copy of the GNU General Public License
#     along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
The four-valued signal domain.

Values are drawn from {T, F, X, Z}: T and F are the booleans, X is unknown and Z is floating.
X approximates every value; T, F and Z are pairwise incomparable.  Vectors are LSB-first, so
index 0 of a Vec4 (the leftmost character of its text form) is the least significant bit.

Primitive gates are defined once, by the monotone extension of their boolean truth tables:
Z inputs are read as X, every boolean completion of the unknown inputs is evaluated, and the
result is the common boolean if all completions agree, otherwise X.
"""

import itertools
import operator
from enum import Enum

from .de_errors import ContractError


class Value4(Enum):
    T = "T"
    F = "F"
    X = "X"
    Z = "Z"

    def __str__(self):
        return self.value

    @property
    def is_boolean(self) -> bool:
        return self is Value4.T or self is Value4.F

    @staticmethod
    def from_char(c: str) -> "Value4":
        """
        Decode a single value character, case-insensitively

        Raises:
            ValueError: if c is not one of T, F, X, Z
        """
        try:
            return _CHAR_VALUES[c.upper()]
        except (KeyError, AttributeError):
            raise ValueError(f"not a four-valued character: {c!r}")

    @staticmethod
    def from_bool(b: bool) -> "Value4":
        return Value4.T if b else Value4.F


T = Value4.T
F = Value4.F
X = Value4.X
Z = Value4.Z

_CHAR_VALUES = {v.value: v for v in Value4}


class Vec4(tuple):
    """
    An immutable, fixed-width, LSB-first vector of Value4

    Examples:
        >>> v = Vec4.from_str("TTF")
        >>> v.width
        3
        >>> str(v[0])
        'T'
    """

    def __new__(cls, values=()):
        values = tuple(values)
        for v in values:
            if not isinstance(v, Value4):
                raise ContractError(f"Vec4 elements must be Value4, got {v!r}")
        return super().__new__(cls, values)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Vec4(tuple.__getitem__(self, index))
        if not -len(self) <= index < len(self):
            raise ContractError(f"index {index} out of range for a vector of width {len(self)}")
        return tuple.__getitem__(self, index)

    def __add__(self, other):
        return Vec4(tuple.__add__(self, tuple(other)))

    def __str__(self):
        return "".join(v.value for v in self)

    def __repr__(self):
        return f"Vec4('{self}')"

    @property
    def width(self) -> int:
        return len(self)

    @property
    def is_boolean(self) -> bool:
        return all(v.is_boolean for v in self)

    @classmethod
    def from_str(cls, text: str) -> "Vec4":
        """
        Decode a contiguous string of value characters, index 0 = leftmost character = LSB

        Raises:
            ValueError: if any character is not a value character
        """
        return cls(Value4.from_char(c) for c in text)

    @classmethod
    def filled(cls, value: Value4, width: int) -> "Vec4":
        return cls((value,) * width)


def value_approx(a: Value4, b: Value4) -> bool:
    """True iff a approximates b, i.e. a is X or a equals b"""
    return a is X or a is b


def vec_approx(u, v) -> bool:
    """True iff u and v have equal width and u approximates v pointwise"""
    return len(u) == len(v) and all(a is X or a is b for (a, b) in zip(u, v))


def value_meet(a: Value4, b: Value4) -> Value4:
    """The agreement of two values: a boolean both sides share, otherwise X"""
    if a is b and a.is_boolean:
        return a
    return X


def vec_meet(u, v) -> Vec4:
    """Pointwise agreement of two vectors of equal width"""
    if len(u) != len(v):
        raise ContractError(f"cannot merge vectors of width {len(u)} and {len(v)}")
    return Vec4(value_meet(a, b) for (a, b) in zip(u, v))


def vec_to_nat(v) -> int:
    """
    Interpret a boolean vector as an unsigned number

    Returns:
        the sum of 2**i over positions holding T, or None if v is not boolean
    """
    n = 0
    for (i, b) in enumerate(v):
        if b is T:
            n |= 1 << i
        elif b is not F:
            return None
    return n


def nat_to_vec(n: int, width: int) -> Vec4:
    """LSB-first boolean vector of n modulo 2**width"""
    if n < 0 or width < 0:
        raise ContractError(f"nat_to_vec needs naturals, got n={n} width={width}")
    return Vec4(T if (n >> i) & 1 else F for i in range(width))


class GateId(Enum):
    VDD = "VDD"
    VSS = "VSS"
    BUF = "BUF"
    NOT = "NOT"
    AND2 = "AND2"
    OR2 = "OR2"
    NAND2 = "NAND2"
    NOR2 = "NOR2"
    XOR2 = "XOR2"
    XNOR2 = "XNOR2"
    MUX = "MUX"

    def __str__(self):
        return self.value

    @property
    def arity(self) -> int:
        return GATE_ARITY[self]


# boolean functions of the primitives; MUX takes (select, then, else)
BOOLEAN_FUNCTIONS = {
    GateId.VDD: lambda: True,
    GateId.VSS: lambda: False,
    GateId.BUF: lambda a: a,
    GateId.NOT: operator.not_,
    GateId.AND2: lambda a, b: a and b,
    GateId.OR2: lambda a, b: a or b,
    GateId.NAND2: lambda a, b: not (a and b),
    GateId.NOR2: lambda a, b: not (a or b),
    GateId.XOR2: lambda a, b: a != b,
    GateId.XNOR2: lambda a, b: a == b,
    GateId.MUX: lambda s, a, b: a if s else b,
}

GATE_ARITY = {
    GateId.VDD: 0,
    GateId.VSS: 0,
    GateId.BUF: 1,
    GateId.NOT: 1,
    GateId.AND2: 2,
    GateId.OR2: 2,
    GateId.NAND2: 2,
    GateId.NOR2: 2,
    GateId.XOR2: 2,
    GateId.XNOR2: 2,
    GateId.MUX: 3,
}


def monotone_extension(gate: GateId, args) -> Value4:
    """
    Evaluate a gate by enumerating the boolean completions of its unknown arguments

    This is the defining rule of gate semantics and doubles as the test oracle.
    """
    fn = BOOLEAN_FUNCTIONS[gate]
    choices = [(a is T,) if a.is_boolean else (True, False) for a in args]
    results = {fn(*completion) for completion in itertools.product(*choices)}
    if len(results) == 1:
        return Value4.from_bool(results.pop())
    return X


class GateTable:

    def __init__(self, overrides: dict = None):
        """
        The primitive gate table, tabulated over every four-valued argument tuple

        Args:
            overrides: optional mapping from (GateId, argument tuple) to a result, replacing table entries.
                       Used to plant faults when checking that the monotonicity harness is sensitive.

        Examples:
            >>> broken = GateTable({(GateId.AND2, (F, X)): T})
            >>> broken.eval(GateId.AND2, (F, X))
            <Value4.T: 'T'>
        """
        self.tables = {}
        for gate in GateId:
            self.tables[gate] = {args: monotone_extension(gate, args)
                                 for args in itertools.product(Value4, repeat=GATE_ARITY[gate])}
        self.overridden = bool(overrides)
        for ((gate, args), result) in (overrides or {}).items():
            args = tuple(args)
            if len(args) != GATE_ARITY[gate]:
                raise ContractError(f"override for {gate} has {len(args)} arguments")
            self.tables[gate][args] = result

    def eval(self, gate: GateId, args) -> Value4:
        args = tuple(args)
        if len(args) != GATE_ARITY[gate]:
            raise ContractError(f"{gate} takes {GATE_ARITY[gate]} inputs, {len(args)} given")
        return self.tables[gate][args]


DEFAULT_GATES = GateTable()


def gate_eval(gate: GateId, args, gates: GateTable = None) -> Value4:
    """
    Evaluate a primitive gate on four-valued arguments

    Args:
        gate: the primitive
        args: sequence of Value4, one per gate input
        gates: the gate table to use, defaults to the monotone table

    Returns:
        T, F or X (gates never drive Z)

    Raises:
        ContractError: if the number of arguments does not match the gate arity
    """
    return (gates or DEFAULT_GATES).eval(gate, args)
