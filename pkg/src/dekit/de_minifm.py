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
MINIFM, a small two-phase processor.

The architecture has a 6-bit program counter, four 8-bit registers r0..r3, zero and carry flags and a
64-word ROM program store.  An instruction word holds the opcode in bits 7..5, rd in bits 4..3, ra in
bits 2..1 and F in bit 0; BZ uses bits 4..1 as a signed offset:

    0 ADD rd,ra   rd <- rd + ra, sets c and z
    1 AND rd,ra   rd <- rd & ra, sets z
    2 OR  rd,ra   rd <- rd | ra, sets z
    3 XOR rd,ra   rd <- rd ^ ra, sets z
    4 NOT rd,ra   rd <- ~ra, sets z
    5 MOV rd,ra   rd <- ra, sets z
    6 LDI rd,#k   rd <- k (0..3), sets z
    7 BZ  off     pc <- pc + 1 + off if z

isa_step is the behavioural model.  build_cpu emits the netlist implementation, which spends two
cycles per instruction: phase 0 latches the fetched word and the ra operand, phase 1 reads rd, writes
the result back and updates the flags and pc.  project and inject map between the two state spaces at
instruction boundaries and equiv_check tests that they commute.
"""

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .de_errors import ContractError, FormatError
from .de_config import load_config
from .de_fourval import Value4, Vec4, T, F, X, GateId, nat_to_vec, vec_to_nat
from .de_memory import MemKind, MemCell, mem_make, mem_read, mem_write, mem_cells, mem_from_cells
from .de_netlist import FF, MemRef, ModuleDef, Occurrence
from .de_genlib import Builder, bus, gen_adder, gen_decoder, gen_mux, gen_pointwise, gen_register
from .de_eval import BitLeaf, CellLeaf, Node, Evaluator, StateTree, make_state
from .de_report import make_report

logger = logging.getLogger(__name__)

PC_WIDTH = 6
WORD_WIDTH = 8
REG_DEPTH = 2
PROG_DEPTH = 6

OPCODES = ("ADD", "AND", "OR", "XOR", "NOT", "MOV", "LDI", "BZ")
OP_ADD, OP_AND, OP_OR, OP_XOR, OP_NOT, OP_MOV, OP_LDI, OP_BZ = range(8)

ARCH_FIELDS = ("pc", "regs", "z", "c", "prog")

# positions of the stateful occurrences of MINIFM in its state Node
PHASE_LEAF, PC_LEAF, Z_LEAF, C_LEAF, IR_LEAF, LATCH_LEAF, PROG_LEAF, REGS_LEAF = range(8)


@dataclass(frozen=True)
class ArchState:
    pc: Vec4
    regs: object
    z: Value4
    c: Value4
    prog: object

    def reg(self, r: int) -> Vec4:
        return mem_read(self.regs, nat_to_vec(r, REG_DEPTH))

    def to_json(self) -> dict:
        return {
            "pc": str(self.pc),
            "regs": [str(cell.payload) for cell in mem_cells(self.regs)],
            "z": str(self.z),
            "c": str(self.c),
            "prog": [str(cell.payload) for cell in mem_cells(self.prog)]
        }


@dataclass(frozen=True)
class Instr:
    op: int
    rd: int = 0
    ra: int = 0
    offset: int = 0


def zero_regs():
    return mem_make(MemKind.RAM, REG_DEPTH, WORD_WIDTH, nat_to_vec(0, WORD_WIDTH))


def encode_word(i: Instr) -> int:
    """The instruction word as a number"""
    if not 0 <= i.op < len(OPCODES):
        raise ContractError(f"opcode {i.op} out of range")
    if i.op == OP_BZ:
        if not -8 <= i.offset <= 7 or i.rd or i.ra:
            raise ContractError(f"bad branch {i}")
        return (i.op << 5) | ((i.offset & 0xF) << 1)
    if not (0 <= i.rd <= 3 and 0 <= i.ra <= 3) or i.offset:
        raise ContractError(f"bad operands in {i}")
    return (i.op << 5) | (i.rd << 3) | (i.ra << 1)


def encode(i: Instr) -> Vec4:
    return nat_to_vec(encode_word(i), WORD_WIDTH)


def decode(w) -> Instr:
    """
    Decode an 8-bit boolean word; bit 0 is ignored

    Raises:
        ContractError: for a word that is not boolean or not 8 bits wide
    """
    if len(w) != WORD_WIDTH:
        raise ContractError(f"instruction words have {WORD_WIDTH} bits, got {len(w)}")
    word = vec_to_nat(w)
    if word is None:
        raise ContractError(f"cannot decode non-boolean word {Vec4(w)}")
    op = word >> 5
    if op == OP_BZ:
        offset = (word >> 1) & 0xF
        return Instr(op, offset=offset - 16 if offset & 0x8 else offset)
    return Instr(op, (word >> 3) & 3, (word >> 1) & 3)


def _check_boolean(a: ArchState):
    if not (a.pc.is_boolean and a.z.is_boolean and a.c.is_boolean
            and all(cell.payload.is_boolean for cell in mem_cells(a.regs))):
        raise ContractError("the architectural state is not boolean")


def isa_step(a: ArchState) -> ArchState:
    """
    Execute one instruction

    Raises:
        ContractError: if the state (or the fetched word) is not boolean
    """
    _check_boolean(a)
    pc = vec_to_nat(a.pc)
    i = decode(mem_read(a.prog, a.pc))
    next_pc = nat_to_vec((pc + 1) % (1 << PC_WIDTH), PC_WIDTH)
    if i.op == OP_BZ:
        if a.z is T:
            next_pc = nat_to_vec((pc + 1 + i.offset) % (1 << PC_WIDTH), PC_WIDTH)
        return replace(a, pc=next_pc)
    rd = vec_to_nat(a.reg(i.rd))
    ra = vec_to_nat(a.reg(i.ra))
    c = a.c
    if i.op == OP_ADD:
        total = rd + ra
        c = Value4.from_bool(total > 0xFF)
        result = total & 0xFF
    elif i.op == OP_AND:
        result = rd & ra
    elif i.op == OP_OR:
        result = rd | ra
    elif i.op == OP_XOR:
        result = rd ^ ra
    elif i.op == OP_NOT:
        result = ~ra & 0xFF
    elif i.op == OP_MOV:
        result = ra
    else:
        result = i.ra
    regs = mem_write(a.regs, nat_to_vec(i.rd, REG_DEPTH), nat_to_vec(result, WORD_WIDTH), T)
    return ArchState(next_pc, regs, Value4.from_bool(result == 0), c, a.prog)


def isa_run(a: ArchState, steps: int) -> ArchState:
    for _ in range(steps):
        a = isa_step(a)
    return a


def build_cpu(b: Builder) -> str:
    """
    Emit the MINIFM netlist into b

    The top module has input RESET and outputs PC_0..PC_5.  Its stateful occurrences, in order, are
    the phase flip-flop, the pc register, the z and c flip-flops, the instruction register, the
    operand latch, the program ROM and the register file RAM.  RESET=T clears phase, pc, z and c on
    the next state.
    """
    return b.generated(("minifm",), lambda: _build_cpu(b))


def _build_cpu(b: Builder) -> str:
    reg6 = gen_register(b, PC_WIDTH)
    reg8 = gen_register(b, WORD_WIDTH)
    mux2 = gen_mux(b, REG_DEPTH)
    mux6 = gen_mux(b, PC_WIDTH)
    mux8 = gen_mux(b, WORD_WIDTH)
    dec3 = gen_decoder(b, 3)
    add8 = gen_adder(b, WORD_WIDTH)
    add6 = gen_adder(b, PC_WIDTH)
    and8 = gen_pointwise(b, GateId.AND2, WORD_WIDTH)
    or8 = gen_pointwise(b, GateId.OR2, WORD_WIDTH)
    xor8 = gen_pointwise(b, GateId.XOR2, WORD_WIDTH)
    not8 = gen_pointwise(b, GateId.NOT, WORD_WIDTH)

    pc = bus("PC", PC_WIDTH)
    ir = bus("IR", WORD_WIDTH)
    rv = bus("RV", WORD_WIDTH)
    latch = bus("L", WORD_WIDTH)
    res = bus("RES", WORD_WIDTH)
    lo8 = ["LO"] * WORD_WIDTH
    lo6 = ["LO"] * PC_WIDTH

    def occ(name, outputs, ref, inputs):
        return Occurrence(name, outputs, ref, inputs)

    occurrences = [
        # state
        occ("PH", ["PHASE"], FF, ["PHASE_D"]),
        occ("PCR", pc, reg6, ["PC_LD"] + bus("PCD", PC_WIDTH)),
        occ("ZF", ["Z"], FF, ["Z_D"]),
        occ("CF", ["C"], FF, ["C_D"]),
        occ("IRR", ir, reg8, ["IR_LD"] + bus("W", WORD_WIDTH)),
        occ("OPR", latch, reg8, ["IR_LD"] + rv),
        occ("LO", ["LO"], GateId.VSS, []),
        occ("HI", ["HI"], GateId.VDD, []),
        occ("NRES", ["NRESET"], GateId.NOT, ["RESET"]),
        occ("NPH", ["NPHASE"], GateId.NOT, ["PHASE"]),
        # fetch, and the register address: ra of the fetched word in phase 0, rd of the latched word in phase 1
        occ("PROG", bus("W", WORD_WIDTH), MemRef(MemKind.ROM, PROG_DEPTH, WORD_WIDTH), ["LO"] + pc + lo8),
        occ("AMUX", ["RA_0", "RA_1"], mux2, ["PHASE", "IR_3", "IR_4", "W_1", "W_2"]),
        occ("REGS", rv, MemRef(MemKind.RAM, REG_DEPTH, WORD_WIDTH), ["REG_WE", "RA_0", "RA_1"] + res),
        # alu
        occ("DEC", bus("OP", 8), dec3, ["IR_5", "IR_6", "IR_7"]),
        occ("ALU_ADD", bus("SUM", WORD_WIDTH) + ["CARRY"], add8, ["LO"] + rv + latch),
        occ("ALU_AND", bus("AV", WORD_WIDTH), and8, rv + latch),
        occ("ALU_OR", bus("OV", WORD_WIDTH), or8, rv + latch),
        occ("ALU_XOR", bus("XV", WORD_WIDTH), xor8, rv + latch),
        occ("ALU_NOT", bus("NV", WORD_WIDTH), not8, latch),
        occ("M01", bus("M01", WORD_WIDTH), mux8, ["IR_5"] + bus("AV", WORD_WIDTH) + bus("SUM", WORD_WIDTH)),
        occ("M23", bus("M23", WORD_WIDTH), mux8, ["IR_5"] + bus("XV", WORD_WIDTH) + bus("OV", WORD_WIDTH)),
        occ("M45", bus("M45", WORD_WIDTH), mux8, ["IR_5"] + latch + bus("NV", WORD_WIDTH)),
        occ("N0", bus("N0", WORD_WIDTH), mux8, ["IR_6"] + bus("M23", WORD_WIDTH) + bus("M01", WORD_WIDTH)),
        occ("N1", bus("N1", WORD_WIDTH), mux8, ["IR_6", "IR_1", "IR_2"] + lo6 + bus("M45", WORD_WIDTH)),
        occ("RESM", res, mux8, ["IR_7"] + bus("N1", WORD_WIDTH) + bus("N0", WORD_WIDTH)),
    ]
    # flags
    occurrences.append(occ("ZO_1", ["ZO_1"], GateId.OR2, ["RES_0", "RES_1"]))
    occurrences += [occ(f"ZO_{k}", [f"ZO_{k}"], GateId.OR2, [f"ZO_{k - 1}", f"RES_{k}"]) for k in range(2, WORD_WIDTH)]
    occurrences += [
        occ("ZERO", ["ISZERO"], GateId.NOT, [f"ZO_{WORD_WIDTH - 1}"]),
        occ("ZSEL", ["ZNEW"], GateId.MUX, ["OP_7", "Z", "ISZERO"]),
        occ("CSEL", ["CNEW"], GateId.MUX, ["OP_0", "CARRY", "C"]),
        occ("ZHOLD", ["ZNEXT"], GateId.MUX, ["PHASE", "ZNEW", "Z"]),
        occ("CHOLD", ["CNEXT"], GateId.MUX, ["PHASE", "CNEW", "C"]),
        occ("ZRES", ["Z_D"], GateId.AND2, ["NRESET", "ZNEXT"]),
        occ("CRES", ["C_D"], GateId.AND2, ["NRESET", "CNEXT"]),
        occ("PHN", ["PHASE_D"], GateId.AND2, ["NRESET", "NPHASE"]),
        # control
        occ("NBZ", ["NOTBZ"], GateId.NOT, ["OP_7"]),
        occ("WE1", ["WE_PH"], GateId.AND2, ["PHASE", "NOTBZ"]),
        occ("WE2", ["REG_WE"], GateId.AND2, ["WE_PH", "NRESET"]),
        occ("IRL", ["IR_LD"], GateId.BUF, ["NPHASE"]),
        occ("PCL", ["PC_LD"], GateId.OR2, ["PHASE", "RESET"]),
        # next pc
        occ("PCINC", bus("PI", PC_WIDTH) + ["PI_CO"], add6, ["HI"] + pc + lo6),
        occ("PCBR", bus("PB", PC_WIDTH) + ["PB_CO"], add6,
            ["LO"] + bus("PI", PC_WIDTH) + ["IR_1", "IR_2", "IR_3", "IR_4", "IR_4", "IR_4"]),
        occ("TAKE", ["TAKE"], GateId.AND2, ["OP_7", "Z"]),
        occ("PCM", bus("PN", PC_WIDTH), mux6, ["TAKE"] + bus("PB", PC_WIDTH) + bus("PI", PC_WIDTH)),
    ]
    occurrences += [occ(f"PCC_{i}", [f"PCD_{i}"], GateId.AND2, ["NRESET", f"PN_{i}"]) for i in range(PC_WIDTH)]
    return b.add(ModuleDef(b.unique("MINIFM"), ["RESET"], pc, occurrences))


def cpu_netlist():
    """The MINIFM netlist, top module first"""
    b = Builder()
    return b.netlist(build_cpu(b))


def _bits(s: StateTree) -> Vec4:
    return Vec4(leaf.value for leaf in s.children)


def project(s: StateTree) -> ArchState:
    """
    The architectural state held by a MINIFM state at an instruction boundary

    Raises:
        ContractError: if the phase flip-flop is not F (mid-instruction)
    """
    if not isinstance(s, Node) or len(s.children) != REGS_LEAF + 1:
        raise ContractError("not a MINIFM state")
    if s.children[PHASE_LEAF].value is not F:
        raise ContractError("cannot project a state in the middle of an instruction")
    return ArchState(pc=_bits(s.children[PC_LEAF]),
                     regs=s.children[REGS_LEAF].mem,
                     z=s.children[Z_LEAF].value,
                     c=s.children[C_LEAF].value,
                     prog=s.children[PROG_LEAF].mem)


def inject(a: ArchState) -> StateTree:
    """A MINIFM state at an instruction boundary holding a; instruction register and latch are F"""

    def register(values):
        return Node(tuple(BitLeaf(v) for v in values))

    return Node((BitLeaf(F),
                 register(a.pc),
                 BitLeaf(a.z),
                 BitLeaf(a.c),
                 register([F] * WORD_WIDTH),
                 register([F] * WORD_WIDTH),
                 CellLeaf(a.prog),
                 CellLeaf(a.regs)))


# -- assembler --

_OPERANDS = re.compile(r"^R([0-3])\s*,\s*(R([0-3])|#(\d+))$")


def _parse_instr(text: str, lineno: int) -> Instr:
    parts = text.upper().split(None, 1)
    mnemonic = parts[0]
    operands = parts[1].strip() if len(parts) > 1 else ""
    if mnemonic not in OPCODES:
        raise FormatError(f"unknown mnemonic {parts[0]}", lineno)
    op = OPCODES.index(mnemonic)
    if op == OP_BZ:
        try:
            offset = int(operands)
        except ValueError:
            raise FormatError(f"BZ needs a numeric offset, got {operands!r}", lineno)
        if not -8 <= offset <= 7:
            raise FormatError(f"branch offset {offset} is not in -8..7", lineno)
        return Instr(op, offset=offset)
    match = _OPERANDS.match(operands)
    if not match:
        raise FormatError(f"bad operands {operands!r} for {mnemonic}", lineno)
    rd = int(match.group(1))
    if op == OP_LDI:
        if match.group(4) is None or int(match.group(4)) > 3:
            raise FormatError("LDI needs an immediate #0..#3", lineno)
        return Instr(op, rd, int(match.group(4)))
    if match.group(3) is None:
        raise FormatError(f"{mnemonic} needs a register operand", lineno)
    return Instr(op, rd, int(match.group(3)))


def assemble(text: str) -> list:
    """
    Assemble program text, one instruction per line ("ADD r0,r1", "LDI r2,#3", "BZ -2")

    Text after ';' is a comment, as is a line starting with '#'.

    Raises:
        FormatError: for unknown mnemonics, bad operands or programs longer than the ROM
    """
    program = []
    for (lineno, line) in enumerate(text.splitlines(), start=1):
        line = line.split(";", 1)[0].strip()
        if line and not line.startswith("#"):
            program.append(_parse_instr(line, lineno))
    if len(program) > 1 << PROG_DEPTH:
        raise FormatError(f"program has {len(program)} instructions, the ROM holds {1 << PROG_DEPTH}")
    return program


def disassemble(i: Instr) -> str:
    if i.op == OP_BZ:
        return f"BZ {i.offset}"
    if i.op == OP_LDI:
        return f"LDI r{i.rd},#{i.ra}"
    return f"{OPCODES[i.op]} r{i.rd},r{i.ra}"


def program_image(program: list):
    """A program ROM holding the encoded instructions from address 0; the rest of the ROM is zero"""
    if len(program) > 1 << PROG_DEPTH:
        raise ContractError(f"program has {len(program)} instructions, the ROM holds {1 << PROG_DEPTH}")
    words = [encode(i) for i in program]
    words += [nat_to_vec(0, WORD_WIDTH)] * ((1 << PROG_DEPTH) - len(words))
    return mem_from_cells([MemCell(MemKind.ROM, w) for w in words])


# -- running the netlist --

def cpu_run(prog, cycles: int, regs=None, evaluator: Evaluator = None) -> tuple:
    """
    Run MINIFM from reset with the given program ROM

    The power-on state is all X apart from the program and the register file (zero unless regs is
    given).  The first cycle asserts RESET, the remaining cycles - 1 run the program.

    Returns:
        (per-cycle outputs, i.e. the pc, final state)
    """
    evaluator = evaluator or Evaluator(cpu_netlist(), check_state=False)
    state = make_state(evaluator.state_shape(0), X)
    children = list(state.children)
    children[PROG_LEAF] = CellLeaf(prog)
    children[REGS_LEAF] = CellLeaf(zero_regs() if regs is None else regs)
    trace = [(T,)] + [(F,)] * (cycles - 1) if cycles > 0 else []
    return evaluator.run(0, Node(tuple(children)), trace)


def random_arch_state(rng: np.random.Generator) -> ArchState:
    """A boolean architectural state with random pc, flags, registers and program"""
    words = rng.integers(0, 1 << WORD_WIDTH, size=(1 << PROG_DEPTH) + (1 << REG_DEPTH))
    flags = rng.integers(0, 2, size=2)
    prog = mem_from_cells([MemCell(MemKind.ROM, nat_to_vec(int(w), WORD_WIDTH)) for w in words[:1 << PROG_DEPTH]])
    regs = mem_from_cells([MemCell(MemKind.RAM, nat_to_vec(int(w), WORD_WIDTH)) for w in words[1 << PROG_DEPTH:]])
    pc = nat_to_vec(int(rng.integers(0, 1 << PC_WIDTH)), PC_WIDTH)
    return ArchState(pc, regs, Value4.from_bool(bool(flags[0])), Value4.from_bool(bool(flags[1])), prog)


@dataclass
class EquivReport:
    seed: int
    programs: int
    steps: int
    violations: list = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return make_report("cpu-equiv", self.seed, self.programs, self.violations, self.elapsed_ms)


def _equiv_trial(evaluator: Evaluator, seed: int, trial: int, steps: int) -> list:
    rng = np.random.default_rng([seed, trial])
    start = random_arch_state(rng)
    a = start
    state = inject(a)
    for step in range(steps):
        expected = isa_step(a)
        _, state = evaluator.run(0, state, [(F,), (F,)])
        try:
            actual = project(state)
        except ContractError as ex:
            return [{"trial": trial, "kind": "phase", "module": "MINIFM", "position": step,
                     "witness": {"start": start.to_json(), "steps": steps, "detail": str(ex)}}]
        if actual != expected:
            differing = [name for name in ARCH_FIELDS if getattr(actual, name) != getattr(expected, name)]
            instr = disassemble(decode(mem_read(a.prog, a.pc)))
            logger.warning("program %d step %d (%s): %s differ", trial, step, instr, ", ".join(differing))
            witness = {"start": start.to_json(), "steps": steps, "before": a.to_json(), "instruction": instr,
                       "expected": expected.to_json(), "actual": actual.to_json()}
            return [{"trial": trial, "kind": name, "module": "MINIFM", "position": step, "witness": witness}
                    for name in differing]
        a = expected
    logger.debug("program %d: %d steps agree", trial, steps)
    return []


def equiv_check(programs: int, steps: int, seed: int = None, threads: int = None) -> EquivReport:
    """
    Check that two netlist cycles followed by project equal isa_step, on random programs

    Each program starts from a random boolean architectural state (per-program generator seeded by
    (seed, program)); a program stops at its first mismatch, which is reported once per differing
    field with the instruction and the states involved.

    Returns:
        an EquivReport
    """
    config = load_config()
    seed = config.seed if seed is None else seed
    threads = threads or config.threads
    evaluator = Evaluator(cpu_netlist(), check_state=False)
    logger.info("cpu equivalence: %d programs x %d steps, seed=%d", programs, steps, seed)
    start = time.perf_counter()
    if threads > 1 and programs > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda trial: _equiv_trial(evaluator, seed, trial, steps), range(programs)))
    else:
        results = [_equiv_trial(evaluator, seed, trial, steps) for trial in range(programs)]
    report = EquivReport(seed, programs, steps, [v for found in results for v in found])
    report.elapsed_ms = (time.perf_counter() - start) * 1000
    logger.info("cpu equivalence: %d mismatches (%.0f ms)", len(report.violations), report.elapsed_ms)
    return report
