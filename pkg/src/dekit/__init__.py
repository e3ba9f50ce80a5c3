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

VERSION = "0.1.0"

from .de_errors import DEKitError, ContractError, NetlistParseError, UnresolvedReferenceError, FormatError
from .de_fourval import Value4, Vec4, GateId, GateTable, T, F, X, Z
from .de_memory import MemKind, MemCell, MemNode
from .de_netlist import Netlist, ModuleDef, Occurrence, parse_netlist, print_netlist, check_wf
from .de_eval import Evaluator, BitLeaf, CellLeaf, Node, make_state, se, de, run
from .de_approx import s_approx, check_monotonic
from .de_genlib import Builder
