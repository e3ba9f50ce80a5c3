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
Parameterized circuit generators.

Each generator emits a flat, per-size module (ADDER_8, MUX_6, REG_8, ...) into a Builder and returns
its name.  Generating the same circuit twice returns the existing module.  Builder.netlist(top)
orders the modules a top module needs so that every callee follows its callers.
"""

import logging

from .de_errors import ContractError
from .de_fourval import GateId
from .de_memory import MemKind
from .de_netlist import FF, MemRef, ModuleDef, Occurrence, Netlist

logger = logging.getLogger(__name__)

MAX_WIDTH = 64
MAX_DECODER_INPUTS = 6
MAX_REGFILE_DEPTH = 8

POINTWISE_GATES = (GateId.BUF, GateId.NOT, GateId.AND2, GateId.OR2, GateId.XOR2)


def bus(prefix: str, n: int) -> list:
    """Wire names prefix_0 .. prefix_{n-1}"""
    return [f"{prefix}_{i}" for i in range(n)]


class Builder:

    def __init__(self):
        self.modules = {}
        self.memo = {}

    def unique(self, base: str) -> str:
        """base, or base with a numeric suffix if a module of that name exists already"""
        name = base
        suffix = 1
        while name in self.modules:
            name = f"{base}_{suffix}"
            suffix += 1
        return name

    def add(self, m: ModuleDef) -> str:
        """
        Add a module; every module it instantiates must already be in the builder

        Raises:
            ContractError: if the name is taken or a referenced module is unknown
        """
        if m.name in self.modules:
            raise ContractError(f"module {m.name} is already defined")
        for occ in m.occurrences:
            if isinstance(occ.ref, str) and occ.ref not in self.modules:
                raise ContractError(f"module {m.name} instantiates unknown module {occ.ref}")
        self.modules[m.name] = m
        logger.debug("generated %s", m.name)
        return m.name

    def generated(self, key, make) -> str:
        """Memoized generation: make() only runs the first time key is seen"""
        if key not in self.memo:
            self.memo[key] = make()
        return self.memo[key]

    def netlist(self, top: str) -> Netlist:
        """
        The netlist of top and everything it instantiates, top first and callees after callers

        Raises:
            ContractError: if top is unknown
        """
        if top not in self.modules:
            raise ContractError(f"no generated module called {top}")
        finished = []
        visited = set()

        def visit(name):
            visited.add(name)
            for occ in self.modules[name].occurrences:
                if isinstance(occ.ref, str) and occ.ref not in visited:
                    visit(occ.ref)
            finished.append(name)

        visit(top)
        return Netlist(tuple(self.modules[name] for name in reversed(finished)))


def _check_width(what: str, n: int, limit: int = MAX_WIDTH, low: int = 1):
    if not isinstance(n, int) or not low <= n <= limit:
        raise ContractError(f"{what} must be between {low} and {limit}, got {n}")


def gen_pointwise(b: Builder, gate: GateId, n: int) -> str:
    """
    n copies of a one- or two-input gate side by side

    Inputs are A_i (and B_i for two-input gates), outputs O_i.
    """
    if gate not in POINTWISE_GATES:
        raise ContractError(f"{gate} cannot be used pointwise")
    _check_width("width", n)

    def make():
        arity = gate.arity
        inputs = bus("A", n) + (bus("B", n) if arity == 2 else [])
        occurrences = [Occurrence(f"G_{i}", [f"O_{i}"], gate, [f"A_{i}", f"B_{i}"][:arity]) for i in range(n)]
        return b.add(ModuleDef(b.unique(f"{gate}_{n}"), inputs, bus("O", n), occurrences))

    return b.generated(("pointwise", gate, n), make)


def gen_adder(b: Builder, n: int) -> str:
    """
    Ripple-carry adder

    Inputs CIN, A_0..A_{n-1}, B_0..B_{n-1}; outputs S_0..S_{n-1}, COUT.  Each bit is a full adder made
    of two XOR2, two AND2 and one OR2.
    """
    _check_width("adder width", n)

    def make():
        occurrences = []
        carry = "CIN"
        for i in range(n):
            carry_out = "COUT" if i == n - 1 else f"C_{i + 1}"
            occurrences += [
                Occurrence(f"XP_{i}", [f"P_{i}"], GateId.XOR2, [f"A_{i}", f"B_{i}"]),
                Occurrence(f"XS_{i}", [f"S_{i}"], GateId.XOR2, [f"P_{i}", carry]),
                Occurrence(f"AG_{i}", [f"G_{i}"], GateId.AND2, [f"A_{i}", f"B_{i}"]),
                Occurrence(f"AP_{i}", [f"H_{i}"], GateId.AND2, [f"P_{i}", carry]),
                Occurrence(f"OC_{i}", [carry_out], GateId.OR2, [f"G_{i}", f"H_{i}"]),
            ]
            carry = carry_out
        return b.add(ModuleDef(b.unique(f"ADDER_{n}"), ["CIN"] + bus("A", n) + bus("B", n),
                               bus("S", n) + ["COUT"], occurrences))

    return b.generated(("adder", n), make)


def gen_mux(b: Builder, n: int) -> str:
    """n-bit two-way multiplexer: O_i = A_i if S else B_i"""
    _check_width("mux width", n)

    def make():
        occurrences = [Occurrence(f"M_{i}", [f"O_{i}"], GateId.MUX, ["S", f"A_{i}", f"B_{i}"]) for i in range(n)]
        return b.add(ModuleDef(b.unique(f"MUX_{n}"), ["S"] + bus("A", n) + bus("B", n), bus("O", n), occurrences))

    return b.generated(("mux", n), make)


def gen_decoder(b: Builder, n: int) -> str:
    """
    One-hot decoder with inputs A_0..A_{n-1} (LSB first) and outputs O_0..O_{2^n-1}

    Output j is the AND of the input literals selecting j.
    """
    _check_width("decoder width", n, MAX_DECODER_INPUTS)

    def make():
        occurrences = [Occurrence(f"N_{i}", [f"NA_{i}"], GateId.NOT, [f"A_{i}"]) for i in range(n)]
        for j in range(1 << n):
            literals = [f"A_{i}" if (j >> i) & 1 else f"NA_{i}" for i in range(n)]
            if n == 1:
                occurrences.append(Occurrence(f"D_{j}", [f"O_{j}"], GateId.BUF, literals))
                continue
            term = literals[0]
            for k in range(1, n):
                wire = f"O_{j}" if k == n - 1 else f"T_{j}_{k}"
                occurrences.append(Occurrence(f"D_{j}_{k}", [wire], GateId.AND2, [term, literals[k]]))
                term = wire
        return b.add(ModuleDef(b.unique(f"DEC_{n}"), bus("A", n), bus("O", 1 << n), occurrences))

    return b.generated(("decoder", n), make)


def gen_register(b: Builder, n: int) -> str:
    """
    Loadable register: inputs LD, D_i, outputs Q_i

    Each bit is a flip-flop fed by mux(LD, D_i, Q_i), so the state is a Node of n flip-flop leaves.
    """
    _check_width("register width", n)

    def make():
        occurrences = []
        for i in range(n):
            occurrences.append(Occurrence(f"FF_{i}", [f"Q_{i}"], FF, [f"N_{i}"]))
            occurrences.append(Occurrence(f"M_{i}", [f"N_{i}"], GateId.MUX, ["LD", f"D_{i}", f"Q_{i}"]))
        return b.add(ModuleDef(b.unique(f"REG_{n}"), ["LD"] + bus("D", n), bus("Q", n), occurrences))

    return b.generated(("register", n), make)


def _gen_memory_file(b: Builder, kind: MemKind, prefix: str, depth: int, width: int) -> str:
    _check_width("register file depth", depth, MAX_REGFILE_DEPTH, low=0)
    _check_width("register file width", width)

    def make():
        inputs = ["WE"] + bus("AD", depth) + bus("DI", width)
        occurrences = [Occurrence("MEM", bus("DO", width), MemRef(kind, depth, width), inputs)]
        return b.add(ModuleDef(b.unique(f"{prefix}_{depth}_{width}"), inputs, bus("DO", width), occurrences))

    return b.generated((prefix, depth, width), make)


def gen_regfile(b: Builder, depth: int, width: int) -> str:
    """
    Register file around one RAM: inputs WE, AD_0..AD_{depth-1}, DI_0..DI_{width-1}; outputs DO_i

    The read is combinational on AD; the write happens on the next state when WE is T.
    """
    return _gen_memory_file(b, MemKind.RAM, "REGFILE", depth, width)


def gen_romfile(b: Builder, depth: int, width: int) -> str:
    """As gen_regfile, but the memory is a ROM so writes are ignored"""
    return _gen_memory_file(b, MemKind.ROM, "ROMFILE", depth, width)


def gen_counter(b: Builder, n: int) -> str:
    """
    Free-running n-bit counter with synchronous reset

    Input RESET, outputs Q_i.  Built from REG_n (always loading) and ADDER_n (adding the carry-in).
    """
    _check_width("counter width", n)

    def make():
        register = gen_register(b, n)
        adder = gen_adder(b, n)
        occurrences = [
            Occurrence("LO", ["LO"], GateId.VSS, []),
            Occurrence("HI", ["HI"], GateId.VDD, []),
            Occurrence("NR", ["NRESET"], GateId.NOT, ["RESET"]),
            Occurrence("R", bus("Q", n), register, ["HI"] + bus("D", n)),
            Occurrence("INC", bus("N", n) + ["CO"], adder, ["HI"] + bus("Q", n) + ["LO"] * n),
        ]
        occurrences += [Occurrence(f"CL_{i}", [f"D_{i}"], GateId.AND2, ["NRESET", f"N_{i}"]) for i in range(n)]
        return b.add(ModuleDef(b.unique(f"COUNTER_{n}"), ["RESET"], bus("Q", n), occurrences))

    return b.generated(("counter", n), make)
