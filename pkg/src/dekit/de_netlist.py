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
The netlist language ("de-kit dialect 1").

A netlist is an ordered sequence of modules, the first being the default top module.  A module has
single-bit formal inputs and outputs and an ordered sequence of occurrences, each of which drives one
or more wires from a primitive gate, a flip-flop (FF), a memory (RAM/ROM/STUB) or a module defined
later in the sequence.

Text form (case-insensitive, folded to upper case, ';' starts a comment):

    (ID (A) (O) ((G (O) BUF (A))))
"""

import string
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Union

import pyparsing as pp

from .de_errors import NetlistParseError, UnresolvedReferenceError
from .de_fourval import GateId, GATE_ARITY
from .de_memory import MemKind

DIALECT = "de-kit dialect 1"

# tool limits for memory primitives
MEM_MAX_DEPTH = 16
MEM_MAX_WIDTH = 64


@dataclass(frozen=True)
class FFRef:
    """The flip-flop primitive: input D, output Q, one Value4 of state"""

    def __str__(self):
        return "FF"


FF = FFRef()


@dataclass(frozen=True)
class MemRef:
    """A memory primitive; inputs are write-enable, then depth address bits, then width data bits"""
    kind: MemKind
    depth: int
    width: int

    def __str__(self):
        return f"({self.kind} {self.depth} {self.width})"


Ref = Union[GateId, FFRef, MemRef, str]


@dataclass(frozen=True)
class Occurrence:
    name: str
    outputs: tuple
    ref: Ref
    inputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "inputs", tuple(self.inputs))


@dataclass(frozen=True)
class ModuleDef:
    name: str
    inputs: tuple
    outputs: tuple
    occurrences: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "occurrences", tuple(self.occurrences))


class Arity(NamedTuple):
    inputs: int
    outputs: int
    stateful: bool


class ModuleCone(NamedTuple):
    """The part of a module that output evaluation needs: occurrence indices and formal input positions"""
    occurrences: frozenset
    inputs: frozenset


class WFViolation(NamedTuple):
    code: str
    module: str
    occurrence: str
    detail: str

    def __str__(self):
        where = self.module if self.occurrence is None else f"{self.module}/{self.occurrence}"
        return f"[{self.code}] {where}: {self.detail}"


@dataclass(frozen=True)
class Netlist:
    modules: tuple

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))

    def __len__(self):
        return len(self.modules)

    def __getitem__(self, position: int) -> ModuleDef:
        return self.modules[position]

    @cached_property
    def positions(self) -> dict:
        """Map from module name to the (ascending) positions holding a module of that name"""
        positions = {}
        for (pos, m) in enumerate(self.modules):
            positions.setdefault(m.name, []).append(pos)
        return positions

    def position(self, name: str) -> int:
        """The first position holding a module called name"""
        if name not in self.positions:
            raise UnresolvedReferenceError(f"no module named {name}")
        return self.positions[name][0]

    def resolve(self, from_position: int, name: str) -> int:
        """The position of the first module called name strictly after from_position"""
        for pos in self.positions.get(name, ()):
            if pos > from_position:
                return pos
        raise UnresolvedReferenceError(f"module {name} is not defined after position {from_position}")

    @cached_property
    def stateful(self) -> tuple:
        """Per module, whether any FF or MEM is reachable through its occurrences"""
        flags = [False] * len(self.modules)
        for pos in reversed(range(len(self.modules))):
            for occ in self.modules[pos].occurrences:
                if isinstance(occ.ref, (FFRef, MemRef)):
                    flags[pos] = True
                elif isinstance(occ.ref, str):
                    try:
                        flags[pos] = flags[pos] or flags[self.resolve(pos, occ.ref)]
                    except UnresolvedReferenceError:
                        pass
        return tuple(flags)

    @cached_property
    def cones(self) -> tuple:
        """Per module, the ModuleCone of its formal outputs"""
        cones = [None] * len(self.modules)
        for pos in reversed(range(len(self.modules))):
            cones[pos] = self._cone(pos, cones)
        return tuple(cones)

    def _cone(self, pos: int, cones: list) -> ModuleCone:
        m = self.modules[pos]
        needed = set(m.outputs)
        occurrences = set()
        for (index, occ) in reversed(list(enumerate(m.occurrences))):
            if needed.isdisjoint(occ.outputs):
                continue
            occurrences.add(index)
            for (wire, read) in zip(occ.inputs, self._pass_read(pos, occ, cones)):
                if read:
                    needed.add(wire)
        inputs = frozenset(i for (i, wire) in enumerate(m.inputs) if wire in needed)
        return ModuleCone(frozenset(occurrences), inputs)

    def pass_read(self, pos: int, occ: Occurrence) -> list:
        """
        Flags, one per input wire of occ, telling whether output evaluation reads that wire

        Gate inputs and memory addresses are always read; flip-flop D inputs and memory write-enable
        and data inputs are only read when computing the next state.  A submodule reads the inputs in
        its output cone.  Inputs of unresolvable references count as read.
        """
        return self._pass_read(pos, occ, self.cones)

    def _pass_read(self, pos: int, occ: Occurrence, cones) -> list:
        ref = occ.ref
        count = len(occ.inputs)
        if isinstance(ref, FFRef):
            return [False] * count
        if isinstance(ref, MemRef):
            return [0 < i <= ref.depth for i in range(count)]
        if isinstance(ref, str):
            try:
                cone = cones[self.resolve(pos, ref)]
            except UnresolvedReferenceError:
                return [True] * count
            return [i in cone.inputs for i in range(count)]
        return [True] * count


def lookup(n: Netlist, from_position: int, name: str) -> ModuleDef:
    """
    Find the module called name among the modules after from_position

    Raises:
        UnresolvedReferenceError: if no such module exists later in the netlist
    """
    return n.modules[n.resolve(from_position, name)]


def ref_arity(n: Netlist, from_position: int, ref: Ref) -> Arity:
    """
    Input and output counts of a reference, and whether it holds state

    Raises:
        UnresolvedReferenceError: if ref names a module not defined after from_position
    """
    if isinstance(ref, GateId):
        return Arity(GATE_ARITY[ref], 1, False)
    if isinstance(ref, FFRef):
        return Arity(1, 1, True)
    if isinstance(ref, MemRef):
        return Arity(1 + ref.depth + ref.width, ref.width, True)
    pos = n.resolve(from_position, ref)
    m = n.modules[pos]
    return Arity(len(m.inputs), len(m.outputs), n.stateful[pos])


def check_wf(n: Netlist) -> list:
    """
    Check a netlist for well-formedness

    Args:
        n: the netlist

    Returns:
        a list of WFViolation records, empty iff the netlist is well formed.  Codes are
        duplicate-module, duplicate-input, duplicate-occurrence, duplicate-wire, use-before-def,
        undefined-wire, undefined-output, arity-mismatch, unresolved-reference and
        forward-reference-violation.
    """
    violations = []
    for (name, positions) in n.positions.items():
        for pos in positions[1:]:
            violations.append(WFViolation("duplicate-module", name, None, f"redefined at position {pos}"))
    for (pos, m) in enumerate(n.modules):
        violations += _check_module(n, pos, m)
    return violations


def _check_module(n: Netlist, pos: int, m: ModuleDef) -> list:
    violations = []

    def report(code, occ, detail):
        violations.append(WFViolation(code, m.name, None if occ is None else occ.name, detail))

    defined = set()
    for wire in m.inputs:
        if wire in defined:
            report("duplicate-input", None, f"formal input {wire} listed twice")
        defined.add(wire)
    all_defined = set(defined)
    for occ in m.occurrences:
        all_defined.update(occ.outputs)

    occurrence_names = set()
    for occ in m.occurrences:
        if occ.name in occurrence_names:
            report("duplicate-occurrence", occ, f"occurrence name {occ.name} used twice")
        occurrence_names.add(occ.name)

        arity = None
        if isinstance(occ.ref, str):
            if occ.ref not in n.positions:
                report("unresolved-reference", occ, f"no module named {occ.ref}")
            elif all(p <= pos for p in n.positions[occ.ref]):
                report("forward-reference-violation", occ,
                       f"module {occ.ref} is not defined after {m.name}")
            else:
                arity = ref_arity(n, pos, occ.ref)
        else:
            arity = ref_arity(n, pos, occ.ref)
        if arity is not None and (arity.inputs != len(occ.inputs) or arity.outputs != len(occ.outputs)):
            report("arity-mismatch", occ,
                   f"{occ.ref} expects {arity.inputs} inputs and {arity.outputs} outputs, "
                   f"given {len(occ.inputs)} and {len(occ.outputs)}")

        for (wire, read) in zip(occ.inputs, n.pass_read(pos, occ)):
            if read and wire not in defined:
                report("use-before-def", occ, f"wire {wire} read before it is defined")
            elif not read and wire not in all_defined:
                report("undefined-wire", occ, f"wire {wire} is never defined")
        for wire in occ.outputs:
            if wire in defined:
                report("duplicate-wire", occ, f"wire {wire} defined twice")
            defined.add(wire)

    for wire in m.outputs:
        if wire not in defined:
            report("undefined-output", None, f"formal output {wire} is never defined")
    return violations


# -- text form --

PRIMITIVE_NAMES = {g.value: g for g in GateId}
PRIMITIVE_NAMES["FF"] = FF
MEM_KINDS = {k.value: k for k in MemKind}

_NAME_CHARS = set(string.ascii_letters + string.digits + "_-")


class _Atom:

    def __init__(self, text, loc):
        self.text = text
        self.loc = loc


class _List:

    def __init__(self, items, loc):
        self.items = items
        self.loc = loc


def _grammar():
    lpar = pp.Suppress("(")
    rpar = pp.Suppress(")")
    atom = pp.Regex(r"[A-Za-z0-9_\-]+")
    atom.set_parse_action(lambda s, loc, toks: _Atom(toks[0].upper(), loc))
    sexp = pp.Forward()
    form = pp.Group(lpar + pp.ZeroOrMore(sexp) + rpar)
    form.set_parse_action(lambda s, loc, toks: _List(list(toks[0]), loc))
    sexp <<= atom | form
    forms = pp.ZeroOrMore(sexp)
    forms.ignore(";" + pp.rest_of_line)
    return forms


_GRAMMAR = _grammar()


class _Reader:

    def __init__(self, text: str):
        self.text = text

    def error(self, message, loc):
        line = pp.lineno(loc, self.text)
        column = pp.col(loc, self.text)
        return NetlistParseError(f"{message} at line {line}, column {column}", line, column)

    def scan(self):
        # characters and parenthesis balance outside comments
        open_locs = []
        in_comment = False
        for (loc, ch) in enumerate(self.text):
            if in_comment:
                in_comment = ch != "\n"
            elif ch == ";":
                in_comment = True
            elif ch == "(":
                open_locs.append(loc)
            elif ch == ")":
                if not open_locs:
                    raise self._unbalanced(loc)
                open_locs.pop()
            elif not (ch.isspace() or ch in _NAME_CHARS):
                raise self.error(f"lexical error: unexpected character {ch!r}", loc)
        if open_locs:
            raise self._unbalanced(open_locs[-1])

    def _unbalanced(self, loc):
        line = pp.lineno(loc, self.text)
        return NetlistParseError(f"unbalanced parentheses at line {line}", line, pp.col(loc, self.text))

    def read(self) -> Netlist:
        self.scan()
        try:
            forms = _GRAMMAR.parse_string(self.text, parse_all=True)
        except pp.ParseException as ex:
            raise NetlistParseError(f"syntax error at line {ex.lineno}, column {ex.column}", ex.lineno, ex.column)
        return Netlist(tuple(self.module(form) for form in forms))

    def name(self, form, what):
        if not isinstance(form, _Atom):
            raise self.error(f"expected {what} name", form.loc)
        return form.text

    def names(self, form, what):
        if not isinstance(form, _List):
            raise self.error(f"expected a parenthesised list of {what}", form.loc)
        return tuple(self.name(item, what) for item in form.items)

    def module(self, form) -> ModuleDef:
        if not isinstance(form, _List) or len(form.items) != 4:
            raise self.error("a module must have the form (name (inputs) (outputs) (occurrences))", form.loc)
        (name, inputs, outputs, body) = form.items
        name = self.name(name, "module")
        if name in PRIMITIVE_NAMES or name in MEM_KINDS:
            raise self.error(f"module name {name} is reserved", form.loc)
        if not isinstance(body, _List):
            raise self.error("expected a parenthesised list of occurrences", body.loc)
        return ModuleDef(name, self.names(inputs, "input"), self.names(outputs, "output"),
                         tuple(self.occurrence(occ) for occ in body.items))

    def occurrence(self, form) -> Occurrence:
        if not isinstance(form, _List) or len(form.items) != 4:
            raise self.error("an occurrence must have the form (name (outputs) ref (inputs))", form.loc)
        (name, outputs, ref, inputs) = form.items
        outputs_names = self.names(outputs, "output wire")
        if not outputs_names:
            raise self.error("an occurrence must drive at least one wire", outputs.loc)
        return Occurrence(self.name(name, "occurrence"), outputs_names, self.ref(ref),
                          self.names(inputs, "input wire"))

    def ref(self, form) -> Ref:
        if isinstance(form, _Atom):
            if form.text in MEM_KINDS:
                raise self.error(f"{form.text} needs parameters: ({form.text} depth width)", form.loc)
            return PRIMITIVE_NAMES.get(form.text, form.text)
        if len(form.items) != 3 or not all(isinstance(item, _Atom) for item in form.items) \
                or form.items[0].text not in MEM_KINDS:
            raise self.error("a memory reference must have the form (RAM|ROM|STUB depth width)", form.loc)
        (kind, depth, width) = form.items
        for param in (depth, width):
            if not param.text.isdigit():
                raise self.error(f"memory parameter {param.text} is not a natural number", param.loc)
        depth_value = int(depth.text)
        width_value = int(width.text)
        if depth_value > MEM_MAX_DEPTH or not 1 <= width_value <= MEM_MAX_WIDTH:
            raise self.error(f"memory parameters out of tool limits (depth <= {MEM_MAX_DEPTH}, "
                             f"1 <= width <= {MEM_MAX_WIDTH})", form.loc)
        return MemRef(MEM_KINDS[kind.text], depth_value, width_value)


def parse_netlist(text: str) -> Netlist:
    """
    Parse netlist text

    Parsing checks lexical and structural form only; use check_wf for well-formedness.

    Args:
        text: the netlist source

    Returns:
        the parsed Netlist

    Raises:
        NetlistParseError: with line and column, for lexical errors, unbalanced parentheses, forms with
                           the wrong number of parts and memory parameters outside the tool limits

    Examples:
        >>> n = parse_netlist("(ID (A) (O) ((G (O) BUF (A))))")
        >>> n[0].occurrences[0].ref
        <GateId.BUF: 'BUF'>
    """
    return _Reader(text).read()


def print_netlist(n: Netlist) -> str:
    """
    Print a netlist in canonical form: one occurrence per line, two-space indent

    parse_netlist(print_netlist(n)) == n for every netlist with upper-case names.
    """
    parts = [f"; {DIALECT}\n"]
    for m in n.modules:
        head = f"({m.name} ({' '.join(m.inputs)}) ({' '.join(m.outputs)})"
        if not m.occurrences:
            parts.append(head + " ())\n")
            continue
        lines = [head + " ("]
        for occ in m.occurrences:
            lines.append(f"  ({occ.name} ({' '.join(occ.outputs)}) {occ.ref} ({' '.join(occ.inputs)}))")
        lines.append("))")
        parts.append("\n".join(lines) + "\n")
    return "\n".join(parts)
