"""Command-line interface: ``infer``, ``learn``, ``gen``, ``bench``.

Exit codes: 0 success, 1 parse/spec/usage errors, 2 inconsistent
program, 3 undefined conditional, 4 no learnable facts.  Probabilities
are printed with 6 decimals; ``--json`` payloads carry full doubles.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from . import __version__
from .credal import (
    conditional_flags,
    credal_conditional,
    credal_query,
    world_models,
)
from .datasets import FAMILIES, DatasetSpec, generate
from .errors import (
    CapExceeded,
    GenerationError,
    InconsistentWorld,
    NoLearnableFacts,
    PaspError,
    PaspSyntaxError,
    SpecOutOfRange,
    UndefinedConditional,
    UnsafeRule,
)
from .learning import LearnConfig, LearnResult, learn_em, learn_opt
from .model import Interpretation, Program, interpretation_query, query_from_literals
from .parsing import (
    interpretations_to_text,
    parse_interpretations,
    parse_program,
    parse_query,
    program_to_text,
)
from .sympoly import extract_poly, poly_from_world_flags, poly_to_text

_BACKENDS = {"gradient": "gradient", "dfree": "derivativeFree"}
_BENCH_METHODS = ("opt-gradient", "opt-dfree", "em")
_CSV_HEADER = (
    "family,size,n_interps,method,seed,final_ll,iterations,wall_seconds,converged"
)


@dataclass(frozen=True)
class RunReport:
    command: str
    wall_time_seconds: float
    payload: object
    tool_version: str = __version__


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _fail_fast_consistency(program: Program) -> None:
    wm = world_models(program)
    for i, masks in enumerate(wm.model_masks):
        if not masks:
            raise InconsistentWorld(i, wm.world(i).selection)


def _legend(program: Program) -> list[str]:
    return [
        f"# p{j} = {pf.atom}"
        for j, pf in enumerate(program.learnable_facts())
    ]


def cmd_infer(args) -> RunReport:
    t0 = time.perf_counter()
    program = parse_program(_read(args.program))
    q = query_from_literals(parse_query(args.query))
    if args.check:
        _fail_fast_consistency(program)
    equations: list[str] = []
    if args.evidence:
        e = query_from_literals(parse_query(args.evidence))
        if args.show_equations:
            flags = conditional_flags(world_models(program), q, e)
            names = ("low(q,e)", "up(q,e)", "low(not q,e)", "up(not q,e)")
            equations = _legend(program) + [
                f"{name} = {poly_to_text(poly_from_world_flags(program, fl))}"
                for name, fl in zip(names, flags)
            ]
        bounds = credal_conditional(program, q, e)
    else:
        if args.show_equations:
            equations = _legend(program) + [
                f"low(q) = {poly_to_text(extract_poly(program, q, 'lower'))}",
                f"up(q) = {poly_to_text(extract_poly(program, q, 'upper'))}",
            ]
        bounds = credal_query(program, q)
    payload = {"lower": bounds.lower, "upper": bounds.upper}
    if args.json:
        for line in equations:
            print(line, file=sys.stderr)
        print(json.dumps(payload))
    else:
        for line in equations:
            print(line)
        print(f"lower={bounds.lower:.6f} upper={bounds.upper:.6f}")
    return RunReport("infer", time.perf_counter() - t0, payload)


def _result_payload(program: Program, result: LearnResult) -> dict:
    return {
        "params": [
            {"atom": str(pf.atom), "prob": result.params[j]}
            for j, pf in enumerate(program.learnable_facts())
        ],
        "finalLL": result.final_ll,
        "iterations": result.iterations,
        "converged": result.converged,
        "llTrace": list(result.ll_trace),
    }


def cmd_learn(args) -> RunReport:
    t0 = time.perf_counter()
    program = parse_program(_read(args.program))
    interps = parse_interpretations(_read(args.interpretations))
    cfg = LearnConfig(
        target=args.target,
        method=args.method,
        eps_ll=args.eps_ll,
        max_iters=args.max_iters,
        floor_prob=args.floor_prob,
        restarts=args.restarts,
        seed=args.seed,
        opt_backend=_BACKENDS[args.backend],
        skip_undefined=args.skip_undefined,
    )
    equations: list[str] = []
    if args.show_equations:
        equations = _legend(program) + [
            f"{cfg.target}(I{k}) = "
            + poly_to_text(extract_poly(program, interpretation_query(i), cfg.target))
            for k, i in enumerate(interps)
        ]
    run = learn_opt if args.method == "opt" else learn_em
    result = run(program, interps, cfg)
    payload = _result_payload(program, result)
    if args.json:
        for line in equations:
            print(line, file=sys.stderr)
        print(json.dumps(payload))
    else:
        for line in equations:
            print(line)
        for entry in payload["params"]:
            print(f"{entry['atom']} {entry['prob']:.6f}")
        print(f"finalLL {result.final_ll:.6f}")
        print(f"iterations {result.iterations}")
        print(f"converged {'true' if result.converged else 'false'}")
    return RunReport("learn", time.perf_counter() - t0, payload)


def cmd_gen(args) -> RunReport:
    t0 = time.perf_counter()
    spec = DatasetSpec(
        family=args.family,
        size=args.size,
        num_interpretations=args.interpretations,
        seed=args.seed,
        init_prob=args.init_prob,
    )
    program, interps = generate(spec)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    pasp_path = outdir / "instance.pasp"
    int_path = outdir / "instance.int"
    pasp_path.write_text(program_to_text(program), encoding="utf-8")
    int_path.write_text(interpretations_to_text(interps), encoding="utf-8")
    print(pasp_path)
    print(int_path)
    return RunReport("gen", time.perf_counter() - t0, (str(pasp_path), str(int_path)))


def _bench_cell(cell: tuple[str, int, int, str, int]) -> list[str]:
    family, size, n_interps, method, seed = cell
    t0 = time.perf_counter()
    try:
        spec = DatasetSpec(
            family=family, size=size, num_interpretations=n_interps, seed=seed
        )
        program, interps = generate(spec)
        kind, _, backend = method.partition("-")
        cfg = LearnConfig(
            method=kind,
            seed=seed,
            opt_backend=_BACKENDS[backend or "gradient"],
        )
        run = learn_opt if kind == "opt" else learn_em
        result = run(program, interps, cfg)
        wall = time.perf_counter() - t0
        return [
            family,
            str(size),
            str(n_interps),
            method,
            str(seed),
            repr(result.final_ll),
            str(result.iterations),
            f"{wall:.3f}",
            "true" if result.converged else "false",
        ]
    except PaspError as exc:
        wall = time.perf_counter() - t0
        # Result columns stay empty; the status lands in `converged`.
        return [
            family,
            str(size),
            str(n_interps),
            method,
            str(seed),
            "",
            "",
            f"{wall:.3f}",
            type(exc).__name__,
        ]


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def cmd_bench(args) -> RunReport:
    t0 = time.perf_counter()
    families = [f for f in args.families.split(",") if f]
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}")
    methods = [m for m in args.methods.split(",") if m]
    for m in methods:
        if m not in _BENCH_METHODS:
            raise ValueError(
                f"unknown method {m!r}; choose from {', '.join(_BENCH_METHODS)}"
            )
    cells = list(
        product(
            families,
            _int_list(args.sizes),
            _int_list(args.interpretations),
            methods,
            _int_list(args.seeds),
        )
    )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(cell) for cell in cells]
    sink = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(sink)
        writer.writerow(_CSV_HEADER.split(","))
        writer.writerows(rows)
    finally:
        if args.out:
            sink.close()
    return RunReport("bench", time.perf_counter() - t0, len(rows))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pasplearn",
        description="Credal inference and parameter learning for "
        "probabilistic answer set programs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_infer = sub.add_parser("infer", help="query lower/upper probabilities")
    p_infer.add_argument("--program", required=True, help=".pasp program file")
    p_infer.add_argument("--query", required=True, help='e.g. "path(1,4)"')
    p_infer.add_argument("--evidence", help='e.g. "edge(2,4)"')
    p_infer.add_argument("--json", action="store_true")
    p_infer.add_argument(
        "--check",
        action="store_true",
        help="verify every world has an answer set before querying",
    )
    p_infer.add_argument("--show-equations", action="store_true")
    p_infer.set_defaults(func=cmd_infer)

    p_learn = sub.add_parser("learn", help="fit learnable probabilities")
    p_learn.add_argument("--program", required=True)
    p_learn.add_argument("--interpretations", required=True, help=".int data file")
    p_learn.add_argument("--method", choices=("opt", "em"), default="opt")
    p_learn.add_argument("--target", choices=("lower", "upper"), default="upper")
    p_learn.add_argument("--backend", choices=tuple(_BACKENDS), default="gradient")
    p_learn.add_argument("--eps-ll", type=float, default=5e-4)
    p_learn.add_argument("--max-iters", type=int, default=1000)
    p_learn.add_argument("--floor-prob", type=float, default=1e-12)
    p_learn.add_argument("--restarts", type=int, default=4)
    p_learn.add_argument("--seed", type=int, default=0)
    p_learn.add_argument("--skip-undefined", action="store_true")
    p_learn.add_argument("--show-equations", action="store_true")
    p_learn.add_argument("--json", action="store_true")
    p_learn.set_defaults(func=cmd_learn)

    p_gen = sub.add_parser("gen", help="generate a benchmark instance")
    p_gen.add_argument("--family", choices=FAMILIES, required=True)
    p_gen.add_argument("--size", type=int, required=True)
    p_gen.add_argument("--interpretations", type=int, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--init-prob", type=float, default=0.5)
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="sweep families × sizes × methods")
    p_bench.add_argument("--families", required=True, help="comma-separated")
    p_bench.add_argument("--sizes", required=True, help="comma-separated ints")
    p_bench.add_argument("--interpretations", required=True, help="comma-separated")
    p_bench.add_argument("--methods", required=True, help="opt-gradient,opt-dfree,em")
    p_bench.add_argument("--seeds", required=True, help="comma-separated ints")
    p_bench.add_argument("--out", help="CSV path (default: stdout)")
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        args.func(args)
    except (
        PaspSyntaxError,
        UnsafeRule,
        SpecOutOfRange,
        GenerationError,
        CapExceeded,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InconsistentWorld as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UndefinedConditional as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NoLearnableFacts as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
