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


import unittest

import numpy as np

from dekit.de_errors import ContractError, FormatError
from dekit.de_fourval import Vec4, T, F, X, nat_to_vec, vec_to_nat
from dekit.de_memory import MemKind, MemCell, mem_from_cells, mem_read
from dekit.de_netlist import check_wf
from dekit.de_eval import Evaluator, BitLeaf, Node, FF_BIT, MemShape, NodeShape, state_values
from dekit.de_approx import weaken, check_monotonic
from dekit.de_genlib import Builder
from dekit.de_minifm import ArchState, Instr, encode, encode_word, decode, isa_step, isa_run, build_cpu, \
    cpu_netlist, project, inject, equiv_check, assemble, disassemble, program_image, cpu_run, random_arch_state, \
    OP_ADD, OP_LDI, OP_BZ, PC_LEAF, Z_LEAF, C_LEAF, PHASE_LEAF


def regs(*values):
    return mem_from_cells([MemCell(MemKind.RAM, nat_to_vec(v, 8)) for v in values])


def arch(program, pc=0, registers=(0, 0, 0, 0), z=F, c=F):
    return ArchState(nat_to_vec(pc, 6), regs(*registers), z, c, program_image(program))


class TestMiniFM(unittest.TestCase):

    def test_encoding(self):
        self.assertEqual(0xCC, encode_word(Instr(OP_LDI, 1, 2)))
        self.assertEqual(Vec4.from_str("FFTTFFTT"), encode(Instr(OP_LDI, 1, 2)))
        self.assertEqual(Instr(OP_ADD, 3, 2), decode(encode(Instr(OP_ADD, 3, 2))))
        self.assertEqual(Instr(OP_BZ, offset=-2), decode(encode(Instr(OP_BZ, offset=-2))))
        for word in range(256):
            i = decode(nat_to_vec(word, 8))
            self.assertEqual(word & 0xFE, encode_word(i))
        with self.assertRaises(ContractError):
            decode(Vec4.from_str("TFTFTFTX"))
        with self.assertRaises(ContractError):
            decode(Vec4.from_str("TF"))
        with self.assertRaises(ContractError):
            encode(Instr(OP_ADD, 4, 0))
        with self.assertRaises(ContractError):
            encode(Instr(OP_BZ, offset=8))

    def test_add(self):
        a = arch([Instr(OP_ADD, 0, 1)], registers=(0xFF, 0x01, 0, 0))
        b = isa_step(a)
        self.assertEqual(0, vec_to_nat(b.reg(0)))
        self.assertIs(T, b.c)
        self.assertIs(T, b.z)
        self.assertEqual(1, vec_to_nat(b.pc))

    def test_ldi(self):
        self.assertEqual([Instr(OP_LDI, 1, 2)], assemble("LDI r1,#2"))
        self.assertEqual([Instr(OP_LDI, 0, 3), Instr(OP_LDI, 2, 1)],
                         assemble("# header\nLDI r0,#3 ; three\n  LDI r2, #1\n"))
        b = isa_step(arch(assemble("LDI r1,#2")))
        self.assertEqual(2, vec_to_nat(b.reg(1)))
        self.assertIs(F, b.z)

    def test_branch(self):
        program = [Instr(OP_LDI, 0, 0)] * 5 + [Instr(OP_BZ, offset=-2)]
        self.assertEqual(4, vec_to_nat(isa_step(arch(program, pc=5, z=T)).pc))
        not_taken = isa_step(arch(program, pc=5, registers=(1, 2, 3, 4), z=F))
        self.assertEqual(6, vec_to_nat(not_taken.pc))
        self.assertEqual([1, 2, 3, 4], [vec_to_nat(not_taken.reg(r)) for r in range(4)])
        wrap = [Instr(OP_BZ, offset=-8)]
        self.assertEqual(57, vec_to_nat(isa_step(arch(wrap, pc=0, z=T)).pc))

    def test_alu(self):
        program = assemble("AND r0,r1\nOR r0,r1\nXOR r0,r1\nNOT r0,r1\nMOV r0,r1")
        expected = [0x0C & 0x0A, 0x0C | 0x0A, 0x0C ^ 0x0A, 0xF5, 0x0A]
        for (pc, value) in enumerate(expected):
            b = isa_step(arch(program, pc=pc, registers=(0x0C, 0x0A, 0, 0), c=T))
            self.assertEqual(value, vec_to_nat(b.reg(0)))
            self.assertIs(T, b.c)
            self.assertIs(F, b.z)

    def test_not_boolean(self):
        a = arch([Instr(OP_ADD, 0, 1)])
        with self.assertRaises(ContractError):
            isa_step(ArchState(a.pc, a.regs, X, a.c, a.prog))

    def test_netlist(self):
        n = cpu_netlist()
        self.assertEqual("MINIFM", n[0].name)
        self.assertEqual([], check_wf(n))
        register = lambda width: NodeShape((FF_BIT,) * width)
        expected = NodeShape((FF_BIT, register(6), FF_BIT, FF_BIT, register(8), register(8),
                              MemShape(MemKind.ROM, 6, 8), MemShape(MemKind.RAM, 2, 8)))
        self.assertEqual(expected, Evaluator(n).state_shape(0))
        b = Builder()
        self.assertEqual(build_cpu(b), build_cpu(b))

    def test_projection(self):
        a = random_arch_state(np.random.default_rng(1))
        s = inject(a)
        self.assertEqual(a, project(s))
        children = list(s.children)
        children[PHASE_LEAF] = BitLeaf(T)
        with self.assertRaises(ContractError):
            project(Node(tuple(children)))
        with self.assertRaises(ContractError):
            project(Node(()))

    def test_two_cycles(self):
        evaluator = Evaluator(cpu_netlist())
        a = arch(assemble("LDI r1,#2"))
        _, s = evaluator.run(0, inject(a), [Vec4([F]), Vec4([F])])
        b = project(s)
        self.assertEqual(isa_step(a), b)
        self.assertEqual(2, vec_to_nat(b.reg(1)))

    def test_programs(self):
        evaluator = Evaluator(cpu_netlist(), check_state=False)
        text = "LDI r0,#1\nLDI r1,#3\nADD r2,r1\nNOT r3,r0\nXOR r3,r1\nADD r3,r3\nAND r3,r2\nBZ -7\nMOV r0,r3\n"
        a = arch(assemble(text), registers=(9, 9, 9, 9))
        s = inject(a)
        for _ in range(12):
            _, s = evaluator.run(0, s, [Vec4([F])] * 2)
            a = isa_step(a)
            self.assertEqual(a, project(s))

    def test_equiv_check(self):
        report = equiv_check(programs=4, steps=12, seed=5)
        self.assertTrue(report.passed, report.violations)
        first = report.to_json()
        second = equiv_check(programs=4, steps=12, seed=5, threads=2).to_json()
        del first["elapsed_ms"]
        del second["elapsed_ms"]
        self.assertEqual(first, second)
        self.assertEqual("cpu-equiv", first["command"])
        self.assertEqual({"command", "seed", "trials", "pass", "violations"}, set(first))

    def test_reset(self):
        evaluator = Evaluator(cpu_netlist(), check_state=False)
        rng = np.random.default_rng(2)
        for _ in range(10):
            s = weaken(inject(random_arch_state(rng)), 0.5, rng=rng)
            _, s = evaluator.run(0, s, [Vec4([T])] * 2)
            for leaf in (PHASE_LEAF, PC_LEAF, Z_LEAF, C_LEAF):
                self.assertTrue(all(v in (T, F) for v in state_values(s.children[leaf])))
            self.assertEqual(0, vec_to_nat(project(s).pc))

    def test_monotonic(self):
        report = check_monotonic(cpu_netlist(), 0, trials=20, p=0.3, seed=0)
        self.assertTrue(report.passed)

    def test_assembler(self):
        program = assemble("ADD r0,r1\n  ldi R2, #3 ; load\n\n# comment\nBZ -2\nNOT r3,r0\n")
        self.assertEqual([Instr(OP_ADD, 0, 1), Instr(OP_LDI, 2, 3), Instr(OP_BZ, offset=-2), Instr(4, 3, 0)], program)
        self.assertEqual(["ADD r0,r1", "LDI r2,#3", "BZ -2", "NOT r3,r0"], [disassemble(i) for i in program])
        for (text, line) in [("NOP", 1), ("ADD r0,r1\nADD r0", 2), ("LDI r0,#4", 1), ("BZ 9", 1), ("ADD r0,#1", 1),
                             ("MOV r4,r0", 1), ("BZ x", 1)]:
            with self.assertRaises(FormatError, msg=text) as cm:
                assemble(text)
            self.assertEqual(line, cm.exception.line, text)
        with self.assertRaises(FormatError):
            assemble("MOV r0,r0\n" * 65)

    def test_program_image(self):
        prog = program_image(assemble("LDI r1,#2"))
        self.assertEqual(0xCC, vec_to_nat(mem_read(prog, nat_to_vec(0, 6))))
        self.assertEqual(0, vec_to_nat(mem_read(prog, nat_to_vec(63, 6))))

    def test_cpu_run(self):
        outputs, final = cpu_run(program_image(assemble("LDI r1,#2\nADD r1,r1")), 5)
        self.assertEqual(["XXXXXX", "FFFFFF", "FFFFFF", "TFFFFF", "TFFFFF"], [str(o) for o in outputs])
        a = project(final)
        self.assertEqual(4, vec_to_nat(a.reg(1)))
        self.assertEqual(2, vec_to_nat(a.pc))
        self.assertEqual(isa_run(arch(assemble("LDI r1,#2\nADD r1,r1")), 2), a)


if __name__ == '__main__':
    unittest.main()
