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


class DEKitError(Exception):
    """Base class for all errors raised by dekit"""
    pass


class ContractError(DEKitError, ValueError):
    """
    Raised when a precondition of an operation is violated

    Examples are arity or width mismatches, a state tree that does not fit the shape of its module,
    reading a wire that has no value, or generator parameters outside the tool limits.
    """
    pass


class NetlistParseError(DEKitError, ValueError):

    def __init__(self, message: str, line: int = None, column: int = None):
        """
        A diagnostic produced while parsing netlist text

        Args:
            message: description of the problem, normally naming the line
            line: 1-based line number, if known
            column: 1-based column number, if known
        """
        super().__init__(message)
        self.line = line
        self.column = column


class UnresolvedReferenceError(DEKitError, LookupError):
    """Raised when a module reference cannot be resolved in the remainder of the netlist"""
    pass


class FormatError(DEKitError, ValueError):

    def __init__(self, message: str, line: int = None):
        """
        Malformed memory-image, stimulus, state or assembler text

        Args:
            message: description of the problem
            line: 1-based line number, if known
        """
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line
