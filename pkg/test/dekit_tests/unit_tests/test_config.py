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


import json
import unittest

import numpy as np

from dekit.de_config import DEKitConfig, load_config, THREADS_VARIABLE
from dekit.de_fourval import Vec4, T, X
from dekit.de_report import REPORT_KEYS, decode4json, make_report, dumps


class TestConfig(unittest.TestCase):

    def test_defaults(self):
        config = load_config({})
        self.assertEqual(DEKitConfig(), config)
        self.assertEqual(0, config.seed)
        self.assertEqual(1000, config.trials)
        self.assertEqual(1, config.threads)
        self.assertAlmostEqual(1.0, sum(config.state_weights))

    def test_threads(self):
        self.assertEqual(4, load_config({THREADS_VARIABLE: "4"}).threads)
        with self.assertLogs("dekit.de_config", "WARNING"):
            self.assertEqual(1, load_config({THREADS_VARIABLE: "many"}).threads)
        with self.assertLogs("dekit.de_config", "WARNING"):
            self.assertEqual(1, load_config({THREADS_VARIABLE: "0"}).threads)


class TestReport(unittest.TestCase):

    def test_decode(self):
        decoded = decode4json({"v": Vec4.from_str("TX"), "b": T, 3: (np.int64(2), np.float32(0.5), np.bool_(True)),
                               "a": np.array([1, 2])})
        self.assertEqual({"v": "TX", "b": "T", "3": [2, 0.5, True], "a": [1, 2]}, decoded)
        self.assertEqual(decoded, json.loads(json.dumps(decoded)))

    def test_report(self):
        violation = {"trial": np.int64(4), "kind": "se", "module": "M", "position": 0,
                     "witness": {"weak_inputs": Vec4((X,))}}
        report = make_report("mono", 7, 10, [violation], 1.23456)
        self.assertEqual(set(REPORT_KEYS), set(report))
        self.assertFalse(report["pass"])
        self.assertEqual(1.235, report["elapsed_ms"])
        self.assertEqual("X", report["violations"][0]["witness"]["weak_inputs"])
        self.assertTrue(make_report("cpu-equiv", 0, 1, [], 0.0)["pass"])
        self.assertEqual(report, json.loads(dumps(report)))


if __name__ == '__main__':
    unittest.main()
