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


import itertools
import unittest

import numpy as np

from dekit.de_fourval import Vec4, GateId, GateTable, T, F, X, vec_approx, vec_meet, nat_to_vec, vec_to_nat
from dekit.de_memory import MemKind, MemCell, mem_from_cells, mem_read, mem_write, mem_approx, mem_cells
from dekit.de_eval import Evaluator
from dekit.de_approx import s_approx, state_tail, weaken, random_state, random_inputs, check_monotonic
from dekit.de_genlib import Builder, gen_adder, gen_mux, gen_decoder, gen_register, gen_regfile, gen_pointwise
from dekit.de_minifm import cpu_netlist, equiv_check
from dekit.de_eval import Node, NodeShape, MemShape, FF_BIT


def generated(generator, *params):
    b = Builder()
    return b.netlist(generator(b, *params))


def random_memory(rng, depth, width, kinds=(MemKind.RAM,)):
    return mem_from_cells([MemCell(kinds[int(rng.integers(len(kinds)))], random_inputs(width, rng, (0.5, 0.5, 0.0)))
                           for _ in range(1 << depth)])


class TestAcceptance(unittest.TestCase):

    def test_state_order_fuzz(self):
        rng = np.random.default_rng(100)
        shapes = [NodeShape((FF_BIT, MemShape(MemKind.RAM, 2, 3), NodeShape((FF_BIT, FF_BIT)))),
                  NodeShape((MemShape(MemKind.ROM, 1, 2), MemShape(MemKind.STUB, 0, 4), FF_BIT)),
                  NodeShape((NodeShape(()), FF_BIT))]
        for trial in range(10000):
            shape = shapes[trial % len(shapes)]
            s3 = random_state(shape, rng)
            s2 = weaken(s3, 0.3, rng=rng)
            s1 = weaken(s2, 0.3, rng=rng)
            self.assertTrue(s_approx(s1, s1))
            self.assertTrue(s_approx(s1, s2) and s_approx(s2, s3) and s_approx(s1, s3))
            self.assertTrue(s_approx(state_tail(s1), state_tail(s2)))

    def test_memory_fuzz(self):
        rng = np.random.default_rng(101)
        for trial in range(10000):
            depth = int(rng.integers(0, 7))
            width = int(rng.integers(1, 5))
            m = random_memory(rng, depth, width)
            addr = random_inputs(depth, rng, (0.5, 0.5, 0.0))
            val = random_inputs(width, rng, (0.5, 0.5, 0.0))
            written = mem_write(m, addr, val, T)
            self.assertEqual(val, mem_read(written, addr))
            # weakened arguments give approximations of the boolean results
            weak_m = mem_from_cells([MemCell(c.kind, weaken(c.payload, 0.2, rng=rng)) for c in mem_cells(m)])
            weak_addr = weaken(addr, 0.2, rng=rng)
            weak_val = weaken(val, 0.2, rng=rng)
            weak_we = X if rng.random() < 0.2 else T
            self.assertTrue(mem_approx(mem_write(weak_m, weak_addr, weak_val, weak_we), written))
            self.assertTrue(vec_approx(mem_read(weak_m, weak_addr), mem_read(m, addr)))
            if depth:
                unknown = Vec4((X,) + tuple(addr)[1:])
                other = Vec4((T if addr[0] is F else F,) + tuple(addr)[1:])
                self.assertEqual(vec_meet(mem_read(m, addr), mem_read(m, other)), mem_read(m, unknown))

    def test_read_only_memories(self):
        rng = np.random.default_rng(102)
        for _ in range(1000):
            depth = int(rng.integers(0, 7))
            m = random_memory(rng, depth, 3, (MemKind.ROM, MemKind.STUB))
            addr = random_inputs(depth, rng)
            self.assertEqual(m, mem_write(m, addr, random_inputs(3, rng), T))

    def test_adder_exhaustive(self):
        for n in range(1, 7):
            evaluator = Evaluator(generated(gen_adder, n))
            for (cin, a, b) in itertools.product((0, 1), range(1 << n), range(1 << n)):
                inputs = nat_to_vec(cin, 1) + nat_to_vec(a, n) + nat_to_vec(b, n)
                self.assertEqual(a + b + cin, vec_to_nat(evaluator.se(0, inputs, Node(()))))

    def test_adder_random(self):
        evaluator = Evaluator(generated(gen_adder, 32))
        rng = np.random.default_rng(103)
        for _ in range(10000):
            a, b = (int(v) for v in rng.integers(0, 1 << 32, size=2))
            cin = int(rng.integers(0, 2))
            inputs = nat_to_vec(cin, 1) + nat_to_vec(a, 32) + nat_to_vec(b, 32)
            self.assertEqual(a + b + cin, vec_to_nat(evaluator.se(0, inputs, Node(()))))

    def test_monotonic_generators(self):
        netlists = [generated(gen_adder, 1), generated(gen_adder, 4), generated(gen_adder, 8),
                    generated(gen_mux, 8), generated(gen_decoder, 4), generated(gen_register, 8),
                    generated(gen_regfile, 2, 8), cpu_netlist()]
        for n in netlists:
            report = check_monotonic(n, 0, trials=1000, seed=0)
            self.assertTrue(report.passed, n[0].name)
            self.assertEqual(1000, report.trials)

    def test_harness_sensitivity(self):
        broken = GateTable({(GateId.AND2, (F, X)): T})
        report = check_monotonic(generated(gen_pointwise, GateId.AND2, 8), 0, trials=1000, seed=0, gates=broken)
        self.assertFalse(report.passed)
        self.assertTrue(report.violations[0].witness)

    def test_cpu_equivalence(self):
        report = equiv_check(programs=500, steps=64, seed=0)
        self.assertTrue(report.passed, report.violations[:3])


if __name__ == '__main__':
    unittest.main()
