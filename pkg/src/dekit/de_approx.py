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
The state approximation relation and the randomized monotonicity harness.

s_approx lifts value_approx (X below everything) to module states.  check_monotonic samples strong
states and inputs, weakens them towards X and checks that evaluation never becomes more defined on
the weaker side.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .de_errors import ContractError
from .de_config import DEKitConfig, load_config
from .de_fourval import Value4, Vec4, T, F, X, value_approx
from .de_memory import MemKind, MemCell, mem_approx, mem_cells
from .de_eval import StateTree, BitLeaf, CellLeaf, Node, Evaluator, make_state, state_values, state_with_values, \
    format_state
from .de_report import make_report

logger = logging.getLogger(__name__)

_DRAW = (T, F, X)


def _cell_kind(s) -> MemKind:
    if not isinstance(s, CellLeaf):
        return None
    m = s.mem
    while not isinstance(m, MemCell):
        m = m.left
    return m.kind


def s_approx(s1: StateTree, s2: StateTree) -> bool:
    """
    True iff state s1 approximates state s2

    Memory leaves are examined first (RAM, then ROM, then STUB): both sides must be memories of the
    same shape whose cells agree on kind and whose payloads approximate pointwise.  Nodes compare
    child by child and flip-flop leaves by value_approx.  Any difference in shape gives False.
    """
    for kind in (MemKind.RAM, MemKind.ROM, MemKind.STUB):
        if _cell_kind(s1) is kind or _cell_kind(s2) is kind:
            return isinstance(s1, CellLeaf) and isinstance(s2, CellLeaf) and mem_approx(s1.mem, s2.mem)
    if isinstance(s1, Node) or isinstance(s2, Node):
        return (isinstance(s1, Node) and isinstance(s2, Node) and len(s1.children) == len(s2.children)
                and all(s_approx(a, b) for (a, b) in zip(s1.children, s2.children)))
    return (isinstance(s1, BitLeaf) and isinstance(s2, BitLeaf)
            and isinstance(s1.value, Value4) and isinstance(s2.value, Value4) and value_approx(s1.value, s2.value))


def approx_counterexample(s1: StateTree, s2: StateTree):
    """
    Locate the first place where s_approx(s1, s2) fails

    Returns:
        None if s1 approximates s2, otherwise a list of child indices leading to the offending leaf,
        extended with the cell address when the leaf is a memory
    """
    if s_approx(s1, s2):
        return None
    if isinstance(s1, Node) and isinstance(s2, Node) and len(s1.children) == len(s2.children):
        for (index, (a, b)) in enumerate(zip(s1.children, s2.children)):
            path = approx_counterexample(a, b)
            if path is not None:
                return [index] + path
    if isinstance(s1, CellLeaf) and isinstance(s2, CellLeaf):
        cells1 = mem_cells(s1.mem)
        cells2 = mem_cells(s2.mem)
        if len(cells1) == len(cells2):
            for (address, (a, b)) in enumerate(zip(cells1, cells2)):
                if not mem_approx(a, b):
                    return [address]
    return []


def state_tail(s: StateTree) -> Node:
    """The state without its first child"""
    if not isinstance(s, Node) or not s.children:
        raise ContractError("state_tail needs a nonempty Node")
    return Node(s.children[1:])


def _rng(seed, rng):
    return rng if rng is not None else np.random.default_rng(seed)


def weaken(s, p: float, seed: int = 0, rng: np.random.Generator = None):
    """
    Replace values by X, each independently with probability p

    Args:
        s: a StateTree or a sequence of Value4
        p: probability of weakening each value, 0 <= p <= 1
        seed: seed for a fresh generator, ignored when rng is given
        rng: generator to draw from

    Returns:
        an object of the same shape that approximates s; memory cell kinds are preserved
    """
    if not 0 <= p <= 1:
        raise ContractError(f"weakening probability {p} is not in [0, 1]")
    rng = _rng(seed, rng)
    if isinstance(s, StateTree):
        values = state_values(s)
        mask = rng.random(len(values)) < p
        return state_with_values(s, [X if m else v for (v, m) in zip(values, mask)])
    values = list(s)
    mask = rng.random(len(values)) < p
    return Vec4(X if m else v for (v, m) in zip(values, mask))


def random_inputs(width: int, rng: np.random.Generator, weights=None) -> Vec4:
    """A vector of width values drawn from (T, F, X) with the given weights"""
    weights = weights or DEKitConfig().state_weights
    return Vec4(_DRAW[i] for i in rng.choice(len(_DRAW), size=width, p=weights))


def random_state(shape, rng: np.random.Generator, weights=None) -> StateTree:
    """A state of the given shape with every value drawn from (T, F, X); memory kinds follow the shape"""
    template = make_state(shape, X)
    return state_with_values(template, random_inputs(len(state_values(template)), rng, weights))


@dataclass
class MonoViolation:
    trial: int
    kind: str
    module: str
    position: object
    witness: dict

    def to_json(self) -> dict:
        return {"trial": self.trial, "kind": self.kind, "module": self.module, "position": self.position,
                "witness": self.witness}


@dataclass
class MonoReport:
    module: str
    seed: int
    trials: int
    violations: list = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return make_report("mono", self.seed, self.trials, [v.to_json() for v in self.violations],
                           self.elapsed_ms)


class _Trial:
    """One monotonicity trial: a strong input/state pair and its weakened counterpart"""

    def __init__(self, evaluator: Evaluator, pos: int, i1: Vec4, s1: StateTree, i2: Vec4, s2: StateTree):
        self.evaluator = evaluator
        self.pos = pos
        self.i2 = i2
        self.s2 = s2
        self.o2, self.n2 = evaluator.step(pos, i2, s2)
        self.i1 = i1
        self.s1 = s1

    def failure(self, kind, i1, s1):
        """Position of the se or de failure for the weak pair (i1, s1), or None"""
        o1, n1 = self.evaluator.step(self.pos, i1, s1)
        if kind == "se":
            return next((index for (index, (a, b)) in enumerate(zip(o1, self.o2)) if not value_approx(a, b)), None)
        return approx_counterexample(n1, self.n2)

    def minimize(self, kind):
        """
        Greedily restore weakened values to their strong counterparts while the failure persists

        Returns:
            the reduced weak inputs and state
        """
        width = len(self.i2)
        strong = list(self.i2) + state_values(self.s2)
        weak = list(self.i1) + state_values(self.s1)
        for index in range(len(weak)):
            if weak[index] is strong[index]:
                continue
            candidate = weak[:index] + [strong[index]] + weak[index + 1:]
            if self.failure(kind, Vec4(candidate[:width]), state_with_values(self.s1, candidate[width:])) is not None:
                weak = candidate
        return Vec4(weak[:width]), state_with_values(self.s1, weak[width:])

    def violations(self, trial, module):
        found = []
        for kind in ("se", "de"):
            position = self.failure(kind, self.i1, self.s1)
            if position is None:
                continue
            i1, s1 = self.minimize(kind)
            o1, n1 = self.evaluator.step(self.pos, i1, s1)
            witness = {
                "weak_inputs": i1, "strong_inputs": self.i2,
                "weak_state": format_state(s1), "strong_state": format_state(self.s2),
                "weak_outputs": o1, "strong_outputs": self.o2
            }
            if kind == "de":
                witness["weak_next_state"] = format_state(n1)
                witness["strong_next_state"] = format_state(self.n2)
            found.append(MonoViolation(trial, kind, module, self.failure(kind, i1, s1), witness))
        return found


def check_monotonic(n, at=0, trials: int = None, p: float = None, seed: int = None, gates=None,
                    threads: int = None, weights=None) -> MonoReport:
    """
    Randomized monotonicity test of one module

    Each trial draws a strong state and input vector (per-trial generator seeded by (seed, trial)),
    weakens both with probability p and checks that outputs and next state of the weak pair
    approximate those of the strong pair.  Failing pairs are shrunk before being reported.

    Args:
        n: a well-formed netlist
        at: module position or name
        trials: number of trials
        p: weakening probability
        seed: random seed
        gates: gate table, use an overridden table for fault injection
        threads: worker threads; trials are merged in trial order whatever the value
        weights: probabilities of drawing T, F and X for the strong pair

    Returns:
        a MonoReport
    """
    config = load_config()
    trials = config.trials if trials is None else trials
    p = config.p if p is None else p
    seed = config.seed if seed is None else seed
    threads = threads or config.threads
    weights = weights or config.state_weights
    if not 0 <= p <= 1:
        raise ContractError(f"weakening probability {p} is not in [0, 1]")
    evaluator = Evaluator(n, gates, check_state=False)
    pos = evaluator.position(at)
    module = n[pos].name
    shape = evaluator.state_shape(pos)
    width = len(n[pos].inputs)
    logger.info("checking monotonicity of %s: %d trials, p=%s, seed=%d", module, trials, p, seed)
    start = time.perf_counter()

    def run_trial(trial):
        rng = np.random.default_rng([seed, trial])
        s2 = random_state(shape, rng, weights)
        i2 = random_inputs(width, rng, weights)
        s1 = weaken(s2, p, rng=rng)
        i1 = weaken(i2, p, rng=rng)
        logger.debug("trial %d", trial)
        return _Trial(evaluator, pos, i1, s1, i2, s2).violations(trial, module)

    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run_trial, range(trials)))
    else:
        results = [run_trial(trial) for trial in range(trials)]

    report = MonoReport(module, seed, trials)
    for found in results:
        for violation in found:
            logger.warning("trial %d: %s violation in %s at %s", violation.trial, violation.kind, module,
                           violation.position)
            report.violations.append(violation)
    report.elapsed_ms = (time.perf_counter() - start) * 1000
    logger.info("%s: %d violations in %d trials (%.0f ms)", module, len(report.violations), trials,
                report.elapsed_ms)
    return report
