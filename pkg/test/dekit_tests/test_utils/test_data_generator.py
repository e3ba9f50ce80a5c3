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

import os.path
import numpy as np

from dekit.de_fourval import GateId
from dekit.de_memory import MemKind
from dekit.de_netlist import FF, MemRef, ModuleDef, Occurrence, Netlist


class TestDataGenerator:

    GATES = [GateId.BUF, GateId.NOT, GateId.AND2, GateId.OR2, GateId.NAND2, GateId.NOR2, GateId.XOR2,
             GateId.XNOR2, GateId.MUX, GateId.VDD, GateId.VSS]

    def __init__(self, seed=0):
        self.rng = np.random.default_rng(seed)

    def pick(self, wires, count):
        return [wires[int(i)] for i in self.rng.integers(0, len(wires), size=count)]

    def random_module(self, name, later):
        """
        A random well-formed module that may instantiate the modules in later

        :param name: the module name
        :param later: list of ModuleDef defined after this one

        :return: ModuleDef
        """
        inputs = [f"I{i}" for i in range(int(self.rng.integers(1, 4)))]
        wires = list(inputs)
        occurrences = []
        for index in range(int(self.rng.integers(2, 9))):
            choice = self.rng.random()
            out = f"W{index}"
            if choice < 0.15:
                occurrences.append(Occurrence(f"U{index}", [out], FF, self.pick(wires, 1)))
                wires.append(out)
            elif choice < 0.25:
                depth = int(self.rng.integers(0, 3))
                width = int(self.rng.integers(1, 3))
                kind = [MemKind.RAM, MemKind.ROM, MemKind.STUB][int(self.rng.integers(0, 3))]
                outs = [f"{out}_{i}" for i in range(width)]
                occurrences.append(Occurrence(f"U{index}", outs, MemRef(kind, depth, width),
                                              self.pick(wires, 1 + depth + width)))
                wires += outs
            elif choice < 0.4 and later:
                sub = later[int(self.rng.integers(0, len(later)))]
                outs = [f"{out}_{i}" for i in range(len(sub.outputs))]
                occurrences.append(Occurrence(f"U{index}", outs, sub.name, self.pick(wires, len(sub.inputs))))
                wires += outs
            else:
                gate = self.GATES[int(self.rng.integers(0, len(self.GATES)))]
                occurrences.append(Occurrence(f"U{index}", [out], gate, self.pick(wires, gate.arity)))
                wires.append(out)
        outputs = sorted(set(self.pick(wires[len(inputs):], int(self.rng.integers(1, 4)))))
        return ModuleDef(name, inputs, outputs, occurrences)

    def random_netlist(self, modules=3):
        """
        A random well-formed netlist of gates, flip-flops, memories and submodules

        :param modules: number of modules

        :return: Netlist, the first module being the top
        """
        defined = []
        for index in reversed(range(modules)):
            defined.insert(0, self.random_module(f"M{index}", list(defined)))
        return Netlist(tuple(defined))

    @staticmethod
    def get_tmp_folder():
        tmp_folder = os.path.join(os.path.split(__file__)[0], "..", "tmp")
        os.makedirs(tmp_folder, exist_ok=True)
        return tmp_folder
