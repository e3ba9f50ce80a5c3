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

import logging
import os
from dataclasses import dataclass

logger = logging.getLogger(__name__)

THREADS_VARIABLE = "DEKIT_THREADS"


@dataclass(frozen=True)
class DEKitConfig:
    """
    Defaults shared by the library harnesses and the command line

    Attributes:
        seed: default random seed
        trials: default number of monotonicity trials
        p: default probability of weakening a value to X
        output_format: "text" or "json"
        state_weights: probabilities of drawing (T, F, X) for a random strong state or input
        threads: upper limit on worker threads used by the trial harnesses
    """
    seed: int = 0
    trials: int = 1000
    p: float = 0.3
    output_format: str = "text"
    state_weights: tuple = (0.45, 0.45, 0.10)
    threads: int = 1


def load_config(environ: dict = None) -> DEKitConfig:
    """
    Build the configuration, honouring the optional DEKIT_THREADS environment variable

    Args:
        environ: mapping to read variables from, defaults to os.environ

    Returns:
        a DEKitConfig instance
    """
    if environ is None:
        environ = os.environ
    threads = 1
    raw = environ.get(THREADS_VARIABLE)
    if raw:
        try:
            threads = int(raw)
            if threads < 1:
                raise ValueError(raw)
        except ValueError:
            logger.warning("ignoring invalid %s=%r", THREADS_VARIABLE, raw)
            threads = 1
    return DEKitConfig(threads=threads)
