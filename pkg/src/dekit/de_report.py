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
import numpy as np

from .de_fourval import Value4, Vec4

REPORT_KEYS = ("command", "seed", "trials", "pass", "violations", "elapsed_ms")


def decode4json(o):
    """Convert numpy scalars and arrays, four-valued values and vectors and tuples to plain JSON types"""
    if isinstance(o, dict):
        return {str(key): decode4json(value) for (key, value) in o.items()}
    elif isinstance(o, (list, tuple)) and not isinstance(o, Vec4):
        return [decode4json(item) for item in o]
    elif isinstance(o, Vec4):
        return str(o)
    elif isinstance(o, Value4):
        return str(o)
    elif isinstance(o, np.bool_):
        return bool(o)
    elif isinstance(o, np.integer):
        return int(o)
    elif isinstance(o, np.floating):
        return float(o)
    elif isinstance(o, np.ndarray):
        return decode4json(o.tolist())
    else:
        return o


def make_report(command: str, seed: int, trials: int, violations: list, elapsed_ms: float) -> dict:
    """
    Build a harness report in the stable JSON schema

    Args:
        command: the subcommand that produced the report
        seed: the random seed used
        trials: the number of trials run
        violations: list of dicts with keys trial, kind, module, position and witness
        elapsed_ms: wall-clock time, the only field allowed to differ between identical runs

    Returns:
        a dict ready for json serialisation
    """
    report = {
        "command": command,
        "seed": seed,
        "trials": trials,
        "pass": len(violations) == 0,
        "violations": violations,
        "elapsed_ms": round(elapsed_ms, 3)
    }
    return decode4json(report)


def dumps(report: dict) -> str:
    return json.dumps(decode4json(report), indent=2, sort_keys=True)
