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

import argparse
import logging
import sys
from dataclasses import dataclass

from dekit import VERSION
from dekit.de_errors import DEKitError
from dekit.de_config import load_config
from dekit.de_fourval import GateId, GateTable, T, F, X
from dekit.de_memory import MemKind, parse_mem_image, format_mem_image
from dekit.de_netlist import parse_netlist, print_netlist, check_wf
from dekit.de_eval import Evaluator, make_state, parse_state, format_state, parse_stimulus, format_outputs
from dekit.de_approx import check_monotonic
from dekit.de_genlib import Builder, gen_adder, gen_mux, gen_decoder, gen_register, gen_regfile, gen_romfile, \
    gen_counter, gen_pointwise, POINTWISE_GATES
from dekit.de_minifm import build_cpu, assemble, program_image, cpu_run, project, equiv_check, WORD_WIDTH, \
    PROG_DEPTH
from dekit.de_report import dumps

logger = logging.getLogger("dekit")

FAULTS = {
    "and2-fx": {(GateId.AND2, (F, X)): T}
}

GENERATORS = ("adder", "mux", "decoder", "register", "regfile", "romfile", "counter", "pointwise", "cpu")


@dataclass
class RunConfig:
    subcommand: str
    paths: tuple = ()
    top: str = None
    seed: int = 0
    trials: int = 1000
    cycles: int = None
    p: float = 0.3
    output_format: str = "text"
    mem_init: str = None
    stimulus: str = None
    state: str = None
    output: str = None
    threads: int = 1

    @staticmethod
    def from_args(args) -> "RunConfig":
        defaults = load_config()
        return RunConfig(subcommand=args.subcommand,
                         paths=tuple(p for p in [getattr(args, "input_path", None)] if p),
                         top=getattr(args, "top", None),
                         seed=defaults.seed if getattr(args, "seed", None) is None else args.seed,
                         trials=defaults.trials if getattr(args, "trials", None) is None else args.trials,
                         cycles=getattr(args, "cycles", None),
                         p=defaults.p if getattr(args, "p", None) is None else args.p,
                         output_format=args.format or defaults.output_format,
                         mem_init=getattr(args, "mem_init", None),
                         stimulus=getattr(args, "stim", None),
                         state=getattr(args, "state", None),
                         output=getattr(args, "output_path", None),
                         threads=args.threads or defaults.threads)


def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeat for debug output)")
    common.add_argument("--format", choices=["text", "json"], default=None, help="report format")
    common.add_argument("--threads", type=int, default=None, help="worker threads for the trial harnesses")

    parser = argparse.ArgumentParser(prog="dekit",
                                     description="dekit: a toolkit for hierarchical four-valued netlists")
    parser.add_argument("--version", action="version", version=f"dekit {VERSION}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    check = subparsers.add_parser("check", parents=[common], help="report well-formedness violations")
    check.add_argument("input_path", help="path to a netlist (.de) file")

    sim = subparsers.add_parser("sim", parents=[common], help="simulate a module over a stimulus file")
    sim.add_argument("input_path", help="path to a netlist (.de) file")
    sim.add_argument("--top", help="module to simulate, defaults to the first")
    sim.add_argument("--stim", required=True, help="stimulus file, one input vector per line")
    sim.add_argument("--state", help="state-init file, defaults to the all-X state")

    mono = subparsers.add_parser("mono", parents=[common], help="randomized monotonicity check")
    mono.add_argument("input_path", help="path to a netlist (.de) file")
    mono.add_argument("--top", help="module to check, defaults to the first")
    mono.add_argument("--trials", type=int)
    mono.add_argument("--seed", type=int)
    mono.add_argument("--p", type=float, help="probability of weakening a value to X")
    mono.add_argument("--inject-fault", choices=sorted(FAULTS), help="plant a non-monotone gate table entry")

    gen = subparsers.add_parser("gen", parents=[common], help="generate a netlist")
    gen.add_argument("kind", choices=GENERATORS)
    gen.add_argument("--n", type=int, default=8, help="width")
    gen.add_argument("--depth", type=int, default=2, help="address bits (regfile, romfile)")
    gen.add_argument("--width", type=int, default=8, help="data width (regfile, romfile)")
    gen.add_argument("--gate", default="AND2", help="gate for pointwise: " + ", ".join(str(g) for g in POINTWISE_GATES))
    gen.add_argument("-o", "--output", dest="output_path", help="output file, defaults to standard output")

    equiv = subparsers.add_parser("cpu-equiv", parents=[common], help="MINIFM netlist against its instruction set")
    equiv.add_argument("--programs", type=int, default=500)
    equiv.add_argument("--steps", type=int, default=64)
    equiv.add_argument("--seed", type=int)

    asm = subparsers.add_parser("asm", parents=[common], help="assemble a MINIFM program to a memory image")
    asm.add_argument("input_path", help="path to an assembler file")
    asm.add_argument("-o", "--output", dest="output_path", help="output file, defaults to standard output")

    run = subparsers.add_parser("cpu-run", parents=[common], help="run MINIFM from reset on a program image")
    run.add_argument("--mem-init", required=True, help="program memory image")
    run.add_argument("--cycles", type=int, default=16)
    return parser


def read_text(path: str) -> str:
    with open(path) as f:
        return f.read()


def write_text(path: str, text: str):
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def do_check(config: RunConfig, args) -> int:
    n = parse_netlist(read_text(config.paths[0]))
    violations = check_wf(n)
    if config.output_format == "json":
        write_text(None, dumps({"command": "check", "modules": len(n), "pass": not violations,
                                "violations": [v._asdict() for v in violations]}) + "\n")
    else:
        for v in violations:
            print(v)
        print(f"{config.paths[0]}: {len(n)} modules, {len(violations)} violations")
    return 1 if violations else 0


def do_sim(config: RunConfig, args) -> int:
    n = parse_netlist(read_text(config.paths[0]))
    evaluator = Evaluator(n)
    at = config.top if config.top else 0
    pos = evaluator.position(at)
    trace = parse_stimulus(read_text(config.stimulus), len(n[pos].inputs))
    if config.state:
        state = parse_state(read_text(config.state))
    else:
        state = make_state(evaluator.state_shape(pos), X)
    outputs, final = evaluator.run(pos, state, trace)
    if config.output_format == "json":
        write_text(None, dumps({"command": "sim", "module": n[pos].name, "outputs": outputs,
                                "final_state": format_state(final)}) + "\n")
    else:
        write_text(None, format_outputs(outputs))
    return 0


def do_mono(config: RunConfig, args) -> int:
    n = parse_netlist(read_text(config.paths[0]))
    gates = GateTable(FAULTS[args.inject_fault]) if args.inject_fault else None
    report = check_monotonic(n, config.top if config.top else 0, trials=config.trials, p=config.p,
                             seed=config.seed, gates=gates, threads=config.threads)
    if config.output_format == "json":
        write_text(None, dumps(report.to_json()) + "\n")
    else:
        print(f"{report.module}: {report.trials} trials, {len(report.violations)} violations (seed {report.seed})")
        for v in report.violations:
            print(f"  trial {v.trial}: {v.kind} violation at {v.position}")
            for (key, value) in v.witness.items():
                print(f"    {key}: {value}")
    return 0 if report.passed else 1


def do_gen(config: RunConfig, args) -> int:
    b = Builder()
    if args.kind == "adder":
        top = gen_adder(b, args.n)
    elif args.kind == "mux":
        top = gen_mux(b, args.n)
    elif args.kind == "decoder":
        top = gen_decoder(b, args.n)
    elif args.kind == "register":
        top = gen_register(b, args.n)
    elif args.kind == "regfile":
        top = gen_regfile(b, args.depth, args.width)
    elif args.kind == "romfile":
        top = gen_romfile(b, args.depth, args.width)
    elif args.kind == "counter":
        top = gen_counter(b, args.n)
    elif args.kind == "pointwise":
        try:
            gate = GateId(args.gate.upper())
        except ValueError:
            raise DEKitError(f"unknown gate {args.gate}")
        top = gen_pointwise(b, gate, args.n)
    else:
        top = build_cpu(b)
    write_text(config.output, print_netlist(b.netlist(top)))
    logger.info("generated %s", top)
    return 0


def do_equiv(config: RunConfig, args) -> int:
    report = equiv_check(args.programs, args.steps, seed=config.seed, threads=config.threads)
    if config.output_format == "json":
        write_text(None, dumps(report.to_json()) + "\n")
    else:
        print(f"MINIFM: {report.programs} programs x {report.steps} steps, {len(report.violations)} mismatches "
              f"(seed {report.seed})")
        for v in report.violations:
            print(f"  program {v['trial']} step {v['position']}: {v['kind']} differs "
                  f"({v['witness'].get('instruction', '')})")
    return 0 if report.passed else 1


def do_asm(config: RunConfig, args) -> int:
    program = assemble(read_text(config.paths[0]))
    write_text(config.output, format_mem_image(program_image(program)))
    return 0


def do_cpu_run(config: RunConfig, args) -> int:
    zero = [F] * WORD_WIDTH
    prog = parse_mem_image(read_text(config.mem_init), MemKind.ROM, PROG_DEPTH, WORD_WIDTH, zero)
    outputs, final = cpu_run(prog, config.cycles)
    try:
        arch = project(final).to_json()
        del arch["prog"]
    except DEKitError:
        arch = None
    if config.output_format == "json":
        write_text(None, dumps({"command": "cpu-run", "cycles": config.cycles, "pc": outputs, "final": arch}) + "\n")
    else:
        write_text(None, format_outputs(outputs))
        if arch is None:
            print("final state is mid-instruction")
        else:
            print(f"pc={arch['pc']} z={arch['z']} c={arch['c']} " +
                  " ".join(f"r{i}={r}" for (i, r) in enumerate(arch["regs"])))
    return 0


COMMANDS = {
    "check": do_check,
    "sim": do_sim,
    "mono": do_mono,
    "gen": do_gen,
    "cpu-equiv": do_equiv,
    "asm": do_asm,
    "cpu-run": do_cpu_run
}


def main(argv=None) -> int:
    """
    Entry point of the dekit command

    Returns:
        0 on success, 1 when violations or mismatches are found, 2 on usage, parse or contract errors
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return ex.code

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)

    config = RunConfig.from_args(args)
    try:
        return COMMANDS[config.subcommand](config, args)
    except (DEKitError, OSError) as ex:
        logger.error("%s", ex)
        return 2


if __name__ == '__main__':
    sys.exit(main())
