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
Tagged tree memories.

A memory is a binary tree whose tips are cells.  Each cell is a (kind, payload) pair: the kind flag
marks the location read-only (ROM), read-write (RAM) or unimplemented (STUB), and the payload is a
four-valued vector of the memory's width.  Address bit 0 selects the branch at the root, F going
left and T going right.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .de_errors import ContractError, FormatError
from .de_fourval import Vec4, Value4, T, F, X, vec_approx, vec_meet


class MemKind(Enum):
    ROM = "ROM"
    RAM = "RAM"
    STUB = "STUB"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MemCell:
    kind: MemKind
    payload: Vec4


@dataclass(frozen=True)
class MemNode:
    left: "MemTree"
    right: "MemTree"


MemTree = Union[MemCell, MemNode]


def mem_make(kind: MemKind, depth: int, width: int, fill: Vec4) -> MemTree:
    """
    Create a uniform memory tree

    Args:
        kind: the kind of every cell
        depth: number of address bits, the tree has 2**depth cells
        width: payload width
        fill: initial payload of every cell

    Returns:
        the memory tree (subtrees are shared, which is safe as trees are immutable)

    Raises:
        ContractError: if the fill width differs from width
    """
    fill = Vec4(fill)
    if fill.width != width:
        raise ContractError(f"fill vector has width {fill.width}, memory width is {width}")
    if depth < 0:
        raise ContractError(f"negative memory depth {depth}")
    tree = MemCell(kind, fill)
    for _ in range(depth):
        tree = MemNode(tree, tree)
    return tree


def mem_depth(m: MemTree) -> int:
    depth = 0
    while isinstance(m, MemNode):
        m = m.left
        depth += 1
    return depth


def mem_width(m: MemTree) -> int:
    while isinstance(m, MemNode):
        m = m.left
    return m.payload.width


def mem_cells(m: MemTree) -> list:
    """
    List the cells of a uniform tree in address order

    Cell i is the one reached by the address nat_to_vec(i, depth): bit 0 chooses at the root.
    """
    if isinstance(m, MemCell):
        return [m]
    left = mem_cells(m.left)
    right = mem_cells(m.right)
    # interleave: address bit 0 (the root choice) is the least significant
    cells = []
    for (a, b) in zip(left, right):
        cells.append(a)
        cells.append(b)
    return cells


def mem_from_cells(cells: list) -> MemTree:
    """Inverse of mem_cells; the number of cells must be a power of two"""
    if len(cells) == 0 or len(cells) & (len(cells) - 1):
        raise ContractError(f"a memory needs a power-of-two number of cells, got {len(cells)}")
    if len(cells) == 1:
        return cells[0]
    return MemNode(mem_from_cells(cells[0::2]), mem_from_cells(cells[1::2]))


def mem_wf(m, depth: int, width: int) -> bool:
    """True iff m is a uniform tree of the given depth whose cells all hold a valid kind and a payload of width"""
    if depth == 0:
        return (isinstance(m, MemCell) and isinstance(m.kind, MemKind)
                and isinstance(m.payload, Vec4) and m.payload.width == width)
    return isinstance(m, MemNode) and mem_wf(m.left, depth - 1, width) and mem_wf(m.right, depth - 1, width)


def _check_address(m: MemTree, addr) -> int:
    depth = mem_depth(m)
    if len(addr) != depth:
        raise ContractError(f"address has width {len(addr)}, memory depth is {depth}")
    return depth


def mem_read(m: MemTree, addr) -> Vec4:
    """
    Read a memory location

    With a boolean address the addressed payload is returned (all-X for a STUB cell).  Unknown (X or Z)
    address bits read both branches and keep only the bits on which every candidate agrees.

    Raises:
        ContractError: if the address width differs from the depth
    """
    _check_address(m, addr)
    return _read(m, addr, 0)


def _read(m, addr, level):
    if isinstance(m, MemCell):
        if m.kind is MemKind.STUB:
            return Vec4.filled(X, m.payload.width)
        return m.payload
    bit = addr[level]
    if bit is F:
        return _read(m.left, addr, level + 1)
    if bit is T:
        return _read(m.right, addr, level + 1)
    return vec_meet(_read(m.left, addr, level + 1), _read(m.right, addr, level + 1))


def mem_write(m: MemTree, addr, val, we: Value4) -> MemTree:
    """
    Write a memory location, returning a new tree that shares untouched branches

    Args:
        m: the memory
        addr: address vector, width equal to the depth
        val: data vector, width equal to the payload width
        we: write enable

    Returns:
        the updated tree.  With we=F the tree is returned unchanged.  With we=T and a boolean address
        the addressed RAM cell takes val.  If we or any address bit is unknown, every RAM cell that some
        boolean completion would write is set to all-X.  ROM and STUB cells never change.

    Raises:
        ContractError: on address or data width mismatch
    """
    _check_address(m, addr)
    width = mem_width(m)
    if len(val) != width:
        raise ContractError(f"data has width {len(val)}, memory width is {width}")
    if we is F:
        return m
    return _write(m, addr, Vec4(val), 0, we is not T)


def _write(m, addr, val, level, smear):
    if isinstance(m, MemCell):
        if m.kind is not MemKind.RAM:
            return m
        return MemCell(m.kind, Vec4.filled(X, val.width) if smear else val)
    bit = addr[level]
    if bit is F:
        return MemNode(_write(m.left, addr, val, level + 1, smear), m.right)
    if bit is T:
        return MemNode(m.left, _write(m.right, addr, val, level + 1, smear))
    return MemNode(_write(m.left, addr, val, level + 1, True), _write(m.right, addr, val, level + 1, True))


def mem_approx(m1, m2) -> bool:
    """True iff both trees have the same shape, the same kind in every cell and approximating payloads"""
    if isinstance(m1, MemCell) and isinstance(m2, MemCell):
        return m1.kind is m2.kind and vec_approx(m1.payload, m2.payload)
    if isinstance(m1, MemNode) and isinstance(m2, MemNode):
        return mem_approx(m1.left, m2.left) and mem_approx(m1.right, m2.right)
    return False


_RECORD = re.compile(r"^(\d+)\s+([TFXZtfxz]+)$")


def parse_mem_image(text: str, kind: MemKind, depth: int, width: int, fill: Vec4) -> MemTree:
    """
    Build a memory from memory-image text

    Each non-blank line is a record "<address-in-decimal> <Vec4 string>"; text after '#' is a comment.
    Unlisted addresses take the fill value.

    Raises:
        FormatError: for malformed records, addresses out of range, repeated addresses or wrong widths
    """
    cells = [MemCell(kind, Vec4(fill))] * (1 << depth)
    if Vec4(fill).width != width:
        raise ContractError(f"fill vector has width {len(fill)}, memory width is {width}")
    seen = set()
    for (lineno, line) in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        match = _RECORD.match(line)
        if not match:
            raise FormatError(f"malformed memory record {line!r}", lineno)
        address = int(match.group(1))
        value = Vec4.from_str(match.group(2))
        if address >= len(cells):
            raise FormatError(f"address {address} out of range for depth {depth}", lineno)
        if address in seen:
            raise FormatError(f"address {address} given twice", lineno)
        if value.width != width:
            raise FormatError(f"value {value} has width {value.width}, expected {width}", lineno)
        seen.add(address)
        cells[address] = MemCell(kind, value)
    return mem_from_cells(cells)


def format_mem_image(m: MemTree, fill: Vec4 = None) -> str:
    """
    Render a memory as memory-image text, omitting cells whose payload equals fill

    Returns:
        the text, one record per line
    """
    lines = []
    for (address, cell) in enumerate(mem_cells(m)):
        if fill is not None and cell.payload == fill:
            continue
        lines.append(f"{address} {cell.payload}")
    return "\n".join(lines) + ("\n" if lines else "")
