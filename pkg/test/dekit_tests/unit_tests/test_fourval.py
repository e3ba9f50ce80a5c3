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

from dekit.de_errors import ContractError
from dekit.de_fourval import Value4, Vec4, T, F, X, Z, GateId, GateTable, GATE_ARITY, gate_eval, \
    monotone_extension, value_approx, vec_approx, value_meet, vec_meet, vec_to_nat, nat_to_vec


def approx_pairs(arity):
    """All (weak, strong) argument tuples with weak approximating strong pointwise"""
    for strong in itertools.product(Value4, repeat=arity):
        choices = [(X, v) if v is not X else (X,) for v in strong]
        for weak in itertools.product(*choices):
            yield weak, strong


class TestFourValued(unittest.TestCase):

    def test_partial_order(self):
        for a in Value4:
            self.assertTrue(value_approx(a, a))
            self.assertTrue(value_approx(X, a))
        for (a, b) in itertools.product(Value4, repeat=2):
            if value_approx(a, b) and value_approx(b, a):
                self.assertIs(a, b)
        for (a, b, c) in itertools.product(Value4, repeat=3):
            if value_approx(a, b) and value_approx(b, c):
                self.assertTrue(value_approx(a, c))
        self.assertFalse(value_approx(T, F))
        self.assertFalse(value_approx(Z, T))
        self.assertFalse(value_approx(T, X))

    def test_gate_monotonicity(self):
        for gate in GateId:
            for (weak, strong) in approx_pairs(GATE_ARITY[gate]):
                self.assertTrue(value_approx(gate_eval(gate, weak), gate_eval(gate, strong)),
                                f"{gate} {weak} {strong}")

    def test_gate_values(self):
        self.assertIs(F, gate_eval(GateId.AND2, (F, X)))
        self.assertIs(X, gate_eval(GateId.AND2, (T, X)))
        self.assertIs(T, gate_eval(GateId.OR2, (X, T)))
        self.assertIs(X, gate_eval(GateId.NOT, (Z,)))
        self.assertIs(X, gate_eval(GateId.XOR2, (X, X)))
        self.assertIs(T, gate_eval(GateId.MUX, (X, T, T)))
        self.assertIs(X, gate_eval(GateId.MUX, (X, T, F)))
        self.assertIs(F, gate_eval(GateId.MUX, (F, T, F)))
        self.assertIs(T, gate_eval(GateId.VDD, ()))
        self.assertIs(F, gate_eval(GateId.NAND2, (T, T)))

    def test_never_drives_z(self):
        for gate in GateId:
            for args in itertools.product(Value4, repeat=GATE_ARITY[gate]):
                self.assertIsNot(Z, gate_eval(gate, args))

    def test_z_reads_as_x(self):
        for gate in GateId:
            for args in itertools.product(Value4, repeat=GATE_ARITY[gate]):
                as_x = tuple(X if a is Z else a for a in args)
                self.assertIs(monotone_extension(gate, as_x), gate_eval(gate, args))

    def test_arity(self):
        with self.assertRaises(ContractError):
            gate_eval(GateId.AND2, (T,))

    def test_overrides(self):
        broken = GateTable({(GateId.AND2, (F, X)): T})
        self.assertIs(T, broken.eval(GateId.AND2, (F, X)))
        self.assertIs(F, broken.eval(GateId.AND2, (F, F)))
        self.assertTrue(broken.overridden)
        self.assertFalse(GateTable().overridden)
        with self.assertRaises(ContractError):
            GateTable({(GateId.NOT, (F, X)): T})

    def test_vectors(self):
        v = Vec4.from_str("tfXz")
        self.assertEqual("TFXZ", str(v))
        self.assertEqual(4, v.width)
        self.assertIs(T, v[0])
        self.assertEqual(Vec4.from_str("FX"), v[1:3])
        with self.assertRaises(ContractError):
            v[4]
        with self.assertRaises(ValueError):
            Vec4.from_str("T1")
        with self.assertRaises(ContractError):
            Vec4([T, True])
        self.assertFalse(v.is_boolean)
        self.assertTrue(Vec4.from_str("TF").is_boolean)

    def test_numbers(self):
        self.assertEqual(Vec4.from_str("TFT"), nat_to_vec(5, 3))
        self.assertEqual(Vec4.from_str("TF"), nat_to_vec(5, 2))
        self.assertEqual(6, vec_to_nat(Vec4.from_str("FTT")))
        self.assertEqual(0, vec_to_nat(Vec4()))
        self.assertIsNone(vec_to_nat(Vec4.from_str("TX")))
        for n in range(64):
            self.assertEqual(n, vec_to_nat(nat_to_vec(n, 6)))
        with self.assertRaises(ContractError):
            nat_to_vec(-1, 4)

    def test_meet(self):
        self.assertIs(T, value_meet(T, T))
        self.assertIs(X, value_meet(T, F))
        self.assertIs(X, value_meet(Z, Z))
        self.assertEqual(Vec4.from_str("TXX"), vec_meet(Vec4.from_str("TFX"), Vec4.from_str("TTF")))
        with self.assertRaises(ContractError):
            vec_meet(Vec4.from_str("T"), Vec4.from_str("TT"))
        for (a, b) in itertools.product(Value4, repeat=2):
            self.assertTrue(value_approx(value_meet(a, b), a))

    def test_vec_approx(self):
        self.assertTrue(vec_approx(Vec4.from_str("XT"), Vec4.from_str("FT")))
        self.assertFalse(vec_approx(Vec4.from_str("XT"), Vec4.from_str("FF")))
        self.assertFalse(vec_approx(Vec4.from_str("X"), Vec4.from_str("FF")))


if __name__ == '__main__':
    unittest.main()
