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
Evaluation of netlists.

Two functions define the semantics of a module: se computes the formal outputs from the inputs and the
current state, de computes the next state.  Both walk the occurrences in order, binding each
occurrence's output wires in an environment; there is one implicit clock, flip-flops expose their
state through se and latch their D input in de, and memories are read combinationally and written in
de.

The state of a module is a Node with one child per stateful occurrence, in occurrence order: a BitLeaf
for a flip-flop, a CellLeaf for a memory and a nested Node for a stateful submodule.  A module with no
stateful occurrences has the state Node(()).
"""

import abc
import logging
from dataclasses import dataclass
from typing import NamedTuple, Union

import pyparsing as pp

from .de_errors import ContractError, FormatError
from .de_fourval import Value4, Vec4, X, GateId, GateTable, DEFAULT_GATES
from .de_memory import MemKind, MemCell, mem_make, mem_read, mem_write, mem_wf, mem_cells, mem_from_cells
from .de_netlist import Netlist, FFRef, MemRef, MEM_MAX_DEPTH, MEM_MAX_WIDTH, check_wf

logger = logging.getLogger(__name__)


class StateTree(abc.ABC):
    """Base class of module states, do not instantiate directly"""
    pass


@dataclass(frozen=True)
class BitLeaf(StateTree):
    value: Value4

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class CellLeaf(StateTree):
    mem: object


@dataclass(frozen=True)
class Node(StateTree):
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class FFShape:
    pass


FF_BIT = FFShape()


@dataclass(frozen=True)
class MemShape:
    kind: MemKind
    depth: int
    width: int


@dataclass(frozen=True)
class NodeShape:
    children: tuple = ()


StateShape = Union[FFShape, MemShape, NodeShape]


def wf_state(s: StateTree, shape: StateShape) -> bool:
    """
    True iff s matches shape node for node

    Flip-flop leaves must hold a Value4; memory leaves must be uniform trees of the described depth and
    width whose cells all carry the described kind.
    """
    if isinstance(shape, FFShape):
        return isinstance(s, BitLeaf) and isinstance(s.value, Value4)
    if isinstance(shape, MemShape):
        return (isinstance(s, CellLeaf) and mem_wf(s.mem, shape.depth, shape.width)
                and all(cell.kind is shape.kind for cell in mem_cells(s.mem)))
    return (isinstance(s, Node) and len(s.children) == len(shape.children)
            and all(wf_state(child, child_shape) for (child, child_shape) in zip(s.children, shape.children)))


def make_state(shape: StateShape, value: Value4 = X) -> StateTree:
    """
    Build a state of the given shape with every flip-flop and memory bit set to value

    X gives the power-on (unknown) state, F a zeroed state.
    """
    if isinstance(shape, FFShape):
        return BitLeaf(value)
    if isinstance(shape, MemShape):
        return CellLeaf(mem_make(shape.kind, shape.depth, shape.width, Vec4.filled(value, shape.width)))
    return Node(tuple(make_state(child, value) for child in shape.children))


def state_values(s: StateTree) -> list:
    """All values held in a state, flattened depth first (memory cells in address order)"""
    values = []
    _collect(s, values)
    return values


def _collect(s, values):
    if isinstance(s, BitLeaf):
        values.append(s.value)
    elif isinstance(s, CellLeaf):
        for cell in mem_cells(s.mem):
            values.extend(cell.payload)
    else:
        for child in s.children:
            _collect(child, values)


def state_with_values(s: StateTree, values) -> StateTree:
    """
    Rebuild s with its values replaced, in the order used by state_values

    Shape and memory cell kinds are preserved.
    """
    it = iter(values)
    rebuilt = _rebuild(s, it)
    if next(it, None) is not None:
        raise ContractError("too many values for the state")
    return rebuilt


def _rebuild(s, it):
    try:
        if isinstance(s, BitLeaf):
            return BitLeaf(next(it))
        if isinstance(s, CellLeaf):
            return CellLeaf(mem_from_cells([MemCell(cell.kind, Vec4([next(it) for _ in cell.payload]))
                                            for cell in mem_cells(s.mem)]))
    except StopIteration:
        raise ContractError("too few values for the state")
    return Node(tuple(_rebuild(child, it) for child in s.children))


class _Kind:
    GATE = 0
    FF = 1
    MEM = 2
    SUB = 3


class _Step:
    __slots__ = ("kind", "name", "outs", "ins", "table", "sub", "child", "depth")

    def __init__(self, kind, name, outs, ins, table=None, sub=None, child=None, depth=0):
        self.kind = kind
        self.name = name
        self.outs = outs
        self.ins = ins
        self.table = table
        self.sub = sub
        self.child = child
        self.depth = depth


class _Plan:

    def __init__(self, name, wires, input_slots, output_slots, steps, cone_steps, stateful_steps, shape):
        self.name = name
        self.wires = wires
        self.input_slots = input_slots
        self.output_slots = output_slots
        self.steps = steps
        self.cone_steps = cone_steps
        self.stateful_steps = stateful_steps
        self.shape = shape


EMPTY_NODE = Node(())


class Evaluator:

    def __init__(self, netlist: Netlist, gates: GateTable = None, check_state: bool = True):
        """
        Compile a netlist for repeated evaluation

        Args:
            netlist: the netlist, which must pass check_wf
            gates: primitive gate table, defaults to the monotone table
            check_state: whether se/de/step validate the state against the module's shape on each call

        Raises:
            ContractError: if the netlist is not well formed
        """
        violations = check_wf(netlist)
        if violations:
            detail = "; ".join(str(v) for v in violations[:5])
            raise ContractError(f"netlist is not well formed ({len(violations)} violations): {detail}")
        self.netlist = netlist
        self.gates = gates or DEFAULT_GATES
        self.check_state = check_state
        self.plans = [None] * len(netlist)
        for pos in reversed(range(len(netlist))):
            self.plans[pos] = self._compile(pos)
        logger.debug("compiled %d modules", len(self.plans))

    def _compile(self, pos: int) -> _Plan:
        m = self.netlist[pos]
        slots = {}

        def slot(wire):
            if wire not in slots:
                slots[wire] = len(slots)
            return slots[wire]

        input_slots = [slot(w) for w in m.inputs]
        steps = []
        cone_steps = []
        stateful_steps = []
        child_shapes = []
        cone = self.netlist.cones[pos]
        for (index, occ) in enumerate(m.occurrences):
            outs = tuple(slot(w) for w in occ.outputs)
            ins = tuple(slot(w) for w in occ.inputs)
            ref = occ.ref
            if isinstance(ref, GateId):
                step = _Step(_Kind.GATE, occ.name, outs, ins, table=self.gates.tables[ref])
            elif isinstance(ref, FFRef):
                step = _Step(_Kind.FF, occ.name, outs, ins, child=len(child_shapes))
                child_shapes.append(FF_BIT)
            elif isinstance(ref, MemRef):
                step = _Step(_Kind.MEM, occ.name, outs, ins, child=len(child_shapes), depth=ref.depth)
                child_shapes.append(MemShape(ref.kind, ref.depth, ref.width))
            else:
                sub = self.netlist.resolve(pos, ref)
                step = _Step(_Kind.SUB, occ.name, outs, ins, sub=sub)
                if self.netlist.stateful[sub]:
                    step.child = len(child_shapes)
                    child_shapes.append(self.plans[sub].shape)
            steps.append(step)
            if index in cone.occurrences:
                cone_steps.append(step)
            if step.child is not None:
                stateful_steps.append(step)
        wires = [None] * len(slots)
        for (wire, index) in slots.items():
            wires[index] = wire
        output_slots = [slots[w] for w in m.outputs]
        return _Plan(m.name, wires, input_slots, output_slots, steps, cone_steps, stateful_steps,
                     NodeShape(tuple(child_shapes)))

    def position(self, at) -> int:
        """Accept a module position or a module name"""
        if isinstance(at, str):
            return self.netlist.position(at)
        if not 0 <= at < len(self.netlist):
            raise ContractError(f"no module at position {at}")
        return at

    def state_shape(self, at=0) -> NodeShape:
        return self.plans[self.position(at)].shape

    # -- checked entry points --

    def _enter(self, at, inputs, state):
        pos = self.position(at)
        plan = self.plans[pos]
        inputs = tuple(inputs)
        if len(inputs) != len(plan.input_slots):
            raise ContractError(f"module {plan.name} takes {len(plan.input_slots)} inputs, {len(inputs)} given")
        if not all(isinstance(v, Value4) for v in inputs):
            raise ContractError(f"inputs to {plan.name} must be Value4")
        if self.check_state and not wf_state(state, plan.shape):
            raise ContractError(f"state does not match the shape of module {plan.name}")
        return pos, inputs

    def se(self, at, inputs, state: StateTree) -> Vec4:
        """
        Outputs of a module for the given inputs and state

        Args:
            at: module position or name
            inputs: one Value4 per formal input
            state: current state, matching state_shape(at)

        Returns:
            one Value4 per formal output

        Raises:
            ContractError: if inputs or state do not fit the module
        """
        pos, inputs = self._enter(at, inputs, state)
        return Vec4(self._se(pos, inputs, state))

    def de(self, at, inputs, state: StateTree) -> StateTree:
        """Next state of a module for the given inputs and state"""
        pos, inputs = self._enter(at, inputs, state)
        return self._step(pos, inputs, state)[1]

    def step(self, at, inputs, state: StateTree) -> tuple:
        """Outputs and next state from a single evaluation of the wire environment"""
        pos, inputs = self._enter(at, inputs, state)
        outputs, next_state = self._step(pos, inputs, state)
        return Vec4(outputs), next_state

    def run(self, at, s0: StateTree, trace) -> tuple:
        """
        Step a module through a sequence of input vectors

        Args:
            at: module position or name
            s0: initial state
            trace: sequence of input sequences, one per cycle

        Returns:
            (list of per-cycle outputs, final state)
        """
        pos = self.position(at)
        outputs = []
        state = s0
        if self.check_state and not wf_state(state, self.plans[pos].shape):
            raise ContractError(f"state does not match the shape of module {self.plans[pos].name}")
        for (cycle, inputs) in enumerate(trace):
            plan = self.plans[pos]
            inputs = tuple(inputs)
            if len(inputs) != len(plan.input_slots):
                raise ContractError(f"cycle {cycle}: module {plan.name} takes {len(plan.input_slots)} inputs, "
                                    f"{len(inputs)} given")
            out, state = self._step(pos, inputs, state)
            outputs.append(Vec4(out))
        return outputs, state

    # -- unchecked evaluation --

    def _undefined(self, plan, step, slot):
        return ContractError(f"module {plan.name}, occurrence {step.name}: wire {plan.wires[slot]} has no value")

    def _env(self, plan, inputs, state, steps):
        env = [None] * len(plan.wires)
        for (slot, value) in zip(plan.input_slots, inputs):
            env[slot] = value
        children = state.children
        for step in steps:
            kind = step.kind
            ins = step.ins
            if kind == _Kind.GATE:
                try:
                    if len(ins) == 2:
                        value = step.table[(env[ins[0]], env[ins[1]])]
                    elif len(ins) == 1:
                        value = step.table[(env[ins[0]],)]
                    else:
                        value = step.table[tuple(env[i] for i in ins)]
                except KeyError:
                    missing = next((i for i in ins if env[i] is None), ins[0] if ins else 0)
                    raise self._undefined(plan, step, missing)
                env[step.outs[0]] = value
            elif kind == _Kind.FF:
                env[step.outs[0]] = children[step.child].value
            elif kind == _Kind.MEM:
                address = [env[i] for i in ins[1:1 + step.depth]]
                if None in address:
                    raise self._undefined(plan, step, ins[1 + address.index(None)])
                for (slot, value) in zip(step.outs, mem_read(children[step.child].mem, address)):
                    env[slot] = value
            else:
                sub_state = EMPTY_NODE if step.child is None else children[step.child]
                values = self._se(step.sub, [env[i] for i in ins], sub_state)
                for (slot, value) in zip(step.outs, values):
                    env[slot] = value
        return env

    def _se(self, pos, inputs, state):
        plan = self.plans[pos]
        env = self._env(plan, inputs, state, plan.cone_steps)
        return [env[slot] for slot in plan.output_slots]

    def _step(self, pos, inputs, state):
        plan = self.plans[pos]
        env = self._env(plan, inputs, state, plan.steps)
        outputs = [env[slot] for slot in plan.output_slots]
        if not plan.stateful_steps:
            return outputs, EMPTY_NODE
        children = state.children
        next_children = []
        for step in plan.stateful_steps:
            values = [env[i] for i in step.ins]
            if None in values:
                raise self._undefined(plan, step, step.ins[values.index(None)])
            if step.kind == _Kind.FF:
                next_children.append(BitLeaf(values[0]))
            elif step.kind == _Kind.MEM:
                address = values[1:1 + step.depth]
                data = values[1 + step.depth:]
                next_children.append(CellLeaf(mem_write(children[step.child].mem, address, data, values[0])))
            else:
                next_children.append(self._step(step.sub, values, children[step.child])[1])
        return outputs, Node(tuple(next_children))


def state_shape(n: Netlist, at=0) -> NodeShape:
    """
    The shape of the state of a module

    Returns:
        a NodeShape over the module's stateful occurrences: FF_BIT for a flip-flop, a MemShape for a
        memory and the submodule's own shape for a stateful submodule
    """
    return Evaluator(n, check_state=False).state_shape(at)


def se(n: Netlist, at, inputs, s: StateTree, gates: GateTable = None) -> Vec4:
    """Outputs of module at (position or name); see Evaluator.se"""
    return Evaluator(n, gates).se(at, inputs, s)


def de(n: Netlist, at, inputs, s: StateTree, gates: GateTable = None) -> StateTree:
    """Next state of module at (position or name); see Evaluator.de"""
    return Evaluator(n, gates).de(at, inputs, s)


def run(n: Netlist, at, s0: StateTree, trace, gates: GateTable = None) -> tuple:
    """Fold se/de over a trace of inputs; see Evaluator.run"""
    return Evaluator(n, gates).run(at, s0, trace)


# -- stimulus and state files --

def parse_stimulus(text: str, width: int) -> list:
    """
    Parse a stimulus file: one line per cycle, character i giving the i-th formal input

    Blank lines and text after '#' are ignored; a line holding a single '.' is an empty input vector.

    Raises:
        FormatError: for bad characters or lines of the wrong width
    """
    trace = []
    for (lineno, line) in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line == ".":
            line = ""
        try:
            values = Vec4.from_str(line)
        except ValueError as ex:
            raise FormatError(str(ex), lineno)
        if values.width != width:
            raise FormatError(f"expected {width} input values, got {values.width}", lineno)
        trace.append(values)
    return trace


def format_outputs(outputs) -> str:
    return "".join((str(Vec4(o)) or ".") + "\n" for o in outputs)


class _RawBit:

    def __init__(self, text, loc):
        self.text = text
        self.loc = loc


class _RawCell:

    def __init__(self, toks, loc):
        self.kind = toks[0]
        self.depth = int(toks[1])
        self.width = int(toks[2])
        self.fill = toks[3]
        self.records = [(int(a), v) for (a, v) in toks[4]] if len(toks) > 4 else []
        self.loc = loc


class _RawNode:

    def __init__(self, children, loc):
        self.children = children
        self.loc = loc


def _state_grammar():
    lpar = pp.Suppress("(")
    rpar = pp.Suppress(")")
    vec = pp.Regex(r"[TFXZtfxz]+")
    nat = pp.Word(pp.nums)
    kind = pp.MatchFirst([pp.CaselessKeyword(k.value) for k in MemKind])
    image = pp.Suppress("[") + pp.Group(pp.ZeroOrMore(pp.Group(nat + vec))) + pp.Suppress("]")
    cell = pp.Group(lpar + kind + nat + nat + rpar + vec + pp.Optional(image))
    cell.set_parse_action(lambda s, loc, toks: _RawCell(toks[0], loc))
    bit = pp.Regex(r"[TFXZtfxz](?![A-Za-z0-9])")
    bit.set_parse_action(lambda s, loc, toks: _RawBit(toks[0], loc))
    state = pp.Forward()
    node = pp.Group(lpar + pp.ZeroOrMore(state) + rpar)
    node.set_parse_action(lambda s, loc, toks: _RawNode(list(toks[0]), loc))
    state <<= cell | node | bit
    return state


_STATE_GRAMMAR = _state_grammar()


def parse_state(text: str) -> StateTree:
    """
    Parse a state-init file

    Grammar: a BitLeaf is a single value character; a CellLeaf is "(KIND depth width)" followed by a
    fill vector and an optional block "[addr VEC addr VEC ...]" of records; a Node is "(" children ")".
    Text after '#' is a comment.

    Raises:
        FormatError: for syntax errors, widths that do not match or addresses out of range
    """
    cleaned = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    try:
        raw = _STATE_GRAMMAR.parse_string(cleaned, parse_all=True)[0]
    except pp.ParseException as ex:
        raise FormatError(f"state syntax error at column {ex.column}", ex.lineno)
    return _convert_state(raw, cleaned)


def _convert_state(raw, text):
    if isinstance(raw, _RawBit):
        return BitLeaf(Value4.from_char(raw.text))
    if isinstance(raw, _RawNode):
        return Node(tuple(_convert_state(child, text) for child in raw.children))
    line = pp.lineno(raw.loc, text)
    if raw.depth > MEM_MAX_DEPTH or not 1 <= raw.width <= MEM_MAX_WIDTH:
        raise FormatError(f"memory parameters out of tool limits (depth <= {MEM_MAX_DEPTH}, "
                          f"1 <= width <= {MEM_MAX_WIDTH})", line)
    kind = MemKind(raw.kind.upper())
    fill = Vec4.from_str(raw.fill)
    if fill.width != raw.width:
        raise FormatError(f"fill {fill} does not have width {raw.width}", line)
    cells = [MemCell(kind, fill)] * (1 << raw.depth)
    for (address, value) in raw.records:
        value = Vec4.from_str(value)
        if address >= len(cells):
            raise FormatError(f"address {address} out of range for depth {raw.depth}", line)
        if value.width != raw.width:
            raise FormatError(f"value {value} does not have width {raw.width}", line)
        cells[address] = MemCell(kind, value)
    return CellLeaf(mem_from_cells(cells))


def format_state(s: StateTree) -> str:
    """
    Render a state in the state-init file syntax

    Memories are written with their most common payload as fill.

    Raises:
        ContractError: for a memory whose cells do not share one kind
    """
    if isinstance(s, BitLeaf):
        return str(s.value)
    if isinstance(s, Node):
        return "(" + " ".join(format_state(child) for child in s.children) + ")"
    cells = mem_cells(s.mem)
    kinds = {cell.kind for cell in cells}
    if len(kinds) != 1:
        raise ContractError("cannot write a memory with mixed cell kinds")
    payloads = [str(cell.payload) for cell in cells]
    fill = max(sorted(set(payloads)), key=payloads.count)
    depth = (len(cells) - 1).bit_length()
    records = " ".join(f"{a} {p}" for (a, p) in enumerate(payloads) if p != fill)
    text = f"({kinds.pop()} {depth} {len(fill)}) {fill}"
    if records:
        text += f" [{records}]"
    return text
