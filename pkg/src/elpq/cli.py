"""Command-line interface: ``elpq <command> FILE [options]``.

Exit codes: 0 success, 1 parse or usage error, 2 semantic error,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from importlib import resources

from . import __version__
from .asp import DEFAULT_ATOM_BUDGET
from .elp import DEFAULT_GUESS_BUDGET, enumerate_world_views, solve_nonneg
from .errors import (BudgetExceeded, ConstraintViolated, ElpqError, InvalidDecomposition, ParseError,
                     ReservedNameError)
from .grounder import DEFAULT_GROUND_BUDGET, DOMAIN_PREDICATE, check_safety, domain_rewrite, ground
from .model import Literal, classify, is_nonneg
from .parser import parse_program, parse_query, serialize_rules
from .quant import probability_parts
from .reductions import encode, format_instance, parse_instance, random_instance
from .treewidth import bag_ground, decompose, make_nice, primal_graph, to_pace, validate

EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, EXIT_BUDGET = 0, 1, 2, 3

BUDGET_ENV = {
    "atom": ("ELPQ_ATOM_BUDGET", DEFAULT_ATOM_BUDGET),
    "guess": ("ELPQ_GUESS_BUDGET", DEFAULT_GUESS_BUDGET),
    "ground": ("ELPQ_GROUND_BUDGET", DEFAULT_GROUND_BUDGET),
}


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    input_digest: str | None
    budgets: dict
    result: dict = field(default_factory=dict)
    timing: dict | None = None
    error: dict | None = None

    def to_dict(self) -> dict:
        d = {"command": self.command, "input_digest": self.input_digest, "budgets": self.budgets}
        d.update(self.result)
        if self.timing is not None:
            d["timing"] = self.timing
        if self.error is not None:
            d["error"] = self.error
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("elpq").joinpath("schemas/report.schema.json").read_text("utf-8"))


def validate_report(data: dict) -> None:
    import jsonschema

    jsonschema.validate(data, load_schema())


def resolve_budgets(args, env=None) -> dict:
    """Flag value, else environment variable, else built-in default."""
    env = os.environ if env is None else env
    out = {}
    for key, (var, default) in BUDGET_ENV.items():
        flag = getattr(args, f"{key}_budget", None)
        if flag is not None:
            out[key] = flag
        elif env.get(var):
            try:
                out[key] = int(env[var])
            except ValueError:
                raise UsageError(f"{var} must be an integer, got {env[var]!r}") from None
        else:
            out[key] = default
    return out


def read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def decimal6(q: Fraction) -> str:
    return format(Decimal(q.numerator) / Decimal(q.denominator), ".6f")


def _engine(args, budgets) -> dict:
    return dict(strategy=args.strategy, method=args.method, guess_budget=budgets["guess"],
                atom_budget=budgets["atom"], jobs=args.jobs)


def _prepare(data: bytes):
    """Parse, then guard unsafe rules; returns (program, rewritten?)."""
    program = parse_program(data)
    if DOMAIN_PREDICATE in program.predicates():
        raise ReservedNameError(f"predicate {DOMAIN_PREDICATE!r} is reserved for domain rewriting")
    strict = check_safety(program, epistemic=True)
    if len(strict) != len(check_safety(program, epistemic=False)):
        print(f"elpq: warning: {len(strict)} rule(s) are unsafe only because of variables under "
              f"epistemic operators; adding {DOMAIN_PREDICATE}/1 guards", file=sys.stderr)
    rewritten = domain_rewrite(program)
    return rewritten, rewritten is not program


def _wvi_strings(wvi, hide_domain: bool) -> list[str]:
    lits = sorted(wvi, key=Literal.sort_key)
    if hide_domain:
        lits = [l for l in lits if l.atom.predicate != DOMAIN_PREDICATE]
    return [str(l) for l in lits]


# -- commands


def cmd_solve(args, data, budgets, count_only=False) -> dict:
    program, rewritten = _prepare(data)
    gp = ground(program, budgets["ground"])
    result = {"class": classify(gp.rules).value, "ground_rules": len(gp.rules), "atoms": len(gp.atoms)}
    if getattr(args, "fragment_fastpath", False) and is_nonneg(gp.rules):
        wv = solve_nonneg(gp)
        result["engine"] = "nonneg-fastpath"
        result["exists"] = wv is not None
        if not count_only:
            result["world_views"] = [] if wv is None else [
                {"literals": _wvi_strings(wv.wvi, rewritten), "answer_sets": wv.witness_count}]
        return result
    wvs = enumerate_world_views(gp, **_engine(args, budgets))
    result["engine"] = "guess-" + args.strategy
    result["count"] = len(wvs)
    if not count_only:
        result["world_views"] = [{"literals": _wvi_strings(wv.wvi, rewritten), "answer_sets": wv.witness_count}
                                 for wv in wvs]
    return result


def cmd_count(args, data, budgets) -> dict:
    return cmd_solve(args, data, budgets, count_only=True)


def cmd_prob(args, data, budgets) -> dict:
    program, _ = _prepare(data)
    query = parse_query(args.query or "")
    level, base, prob = probability_parts(program, query, ground_budget=budgets["ground"], **_engine(args, budgets))
    return {
        "query": str(query),
        "plausibility_level": level,
        "base_level": base,
        "probability": {"exact": f"{prob.numerator}/{prob.denominator}", "decimal": decimal6(prob)},
    }


def cmd_ground(args, data, budgets) -> dict:
    program = parse_program(data)
    gp = ground(program, budgets["ground"])
    text = serialize_rules(gp.rules)
    return {"ground_rules": len(gp.rules), "atoms": len(gp.atoms), "output_digest": digest(text.encode()),
            "program": text}


def cmd_classify(args, data, budgets) -> dict:
    program = parse_program(data)
    return {"class": classify(program).value, "rules": len(program.rules)}


def cmd_reduce(args, data, budgets) -> dict:
    if data is None:
        inst = random_instance(args.seed, kind=args.kind)
    else:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            raise UsageError("instance file is not valid UTF-8") from None
        inst = parse_instance(text, args.kind)
    program = encode(inst)
    text = serialize_rules(program.rules)
    return {
        "program": text,
        "kind": args.kind,
        "instance_digest": digest(format_instance(inst).encode()),
        "rules": len(program.rules),
        "class": classify(program).value,
        "output_digest": digest(text.encode()),
    }


def cmd_td(args, data, budgets) -> dict:
    program = parse_program(data)
    ground_mode = program.is_ground() and not args.predicate and not args.bag_ground
    mode = "ground" if ground_mode else "predicate"
    graph = primal_graph(program, mode)
    td = decompose(graph, args.heuristic)
    if args.nice:
        td = make_nice(td)
    problems = validate(td, graph)
    if problems:
        raise InvalidDecomposition("; ".join(problems))
    result = {
        "mode": mode,
        "vertices": len(graph.vertices),
        "edges": len(graph.edges),
        "heuristic": args.heuristic,
        "width": td.width,
        "nodes": len(td.bags),
        "nice": bool(args.nice),
    }
    if args.td_output:
        write_output(args.td_output, to_pace(td, graph))
    if args.bag_ground:
        gp, gtd = bag_ground(program, td, budgets["ground"])
        text = serialize_rules(gp.rules)
        write_output(args.bag_ground, text)
        result["ground_width"] = gtd.width
        result["ground_rules"] = len(gp.rules)
        result["output_digest"] = digest(text.encode())
    return result


COMMANDS = {
    "solve": cmd_solve,
    "count": cmd_count,
    "prob": cmd_prob,
    "ground": cmd_ground,
    "classify": cmd_classify,
    "reduce": cmd_reduce,
    "td": cmd_td,
}


# -- text rendering


def render_text(report: RunReport) -> str:
    d = report.result
    c = report.command
    lines = []
    if c in ("solve", "count"):
        lines.append(f"class: {d['class']}")
        if "count" in d:
            lines.append(f"world views: {d['count']}")
        else:
            lines.append(f"world view exists: {'yes' if d['exists'] else 'no'}")
        for wv in d.get("world_views", []):
            lines.append("{" + ", ".join(wv["literals"]) + "}" + f"  ({wv['answer_sets']} answer sets)")
    elif c == "prob":
        p = d["probability"]
        lines.append(f"query: {d['query'] or '(empty)'}")
        lines.append(f"plausibility level: {d['plausibility_level']} of {d['base_level']}")
        lines.append(f"probability: {p['exact']} = {p['decimal']}")
    elif c == "classify":
        lines.append(d["class"])
    elif c == "td":
        lines.append(f"{d['mode']} primal graph: {d['vertices']} vertices, {d['edges']} edges")
        lines.append(f"width: {d['width']} ({d['nodes']} nodes, {d['heuristic']})")
        if "ground_width" in d:
            lines.append(f"ground width: {d['ground_width']} ({d['ground_rules']} ground rules)")
    if report.timing is not None:
        lines.append(f"time: {report.timing['seconds']:.3f}s")
    return "".join(line + "\n" for line in lines)


# -- argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="elpq", description="Count and query world views of epistemic logic programs.")
    p.add_argument("--version", action="version", version=f"elpq {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    common.add_argument("--atom-budget", type=_positive, help=f"max atoms for subset enumeration "
                        f"(env ELPQ_ATOM_BUDGET, default {DEFAULT_ATOM_BUDGET})")
    common.add_argument("--guess-budget", type=_positive, help=f"max epistemic guess literals "
                        f"(env ELPQ_GUESS_BUDGET, default {DEFAULT_GUESS_BUDGET})")
    common.add_argument("--ground-budget", type=_positive, help=f"max rule instantiations "
                        f"(env ELPQ_GROUND_BUDGET, default {DEFAULT_GROUND_BUDGET})")
    engine = _Parser(add_help=False)
    engine.add_argument("--jobs", type=_positive, default=1, help="worker processes for guess enumeration")
    engine.add_argument("--strategy", choices=["pruned", "exhaustive"], default="pruned")
    engine.add_argument("--method", choices=["search", "enumerate"], default="search",
                        help="answer-set routine used per guess")

    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("solve", parents=[common, engine], help="enumerate world views")
    s.add_argument("file")
    s.add_argument("--fragment-fastpath", action="store_true",
                   help="use the least-model path for K/M-only programs without negation or disjunction")
    s = sub.add_parser("count", parents=[common, engine], help="count world views")
    s.add_argument("file")
    s.add_argument("--fragment-fastpath", action="store_true")
    s = sub.add_parser("prob", parents=[common, engine], help="plausibility level and probability of a query")
    s.add_argument("file")
    s.add_argument("--query", "-q", default="", help='e.g. "K a, M -b(c)"; empty for the empty query')
    s = sub.add_parser("ground", parents=[common], help="print the ground program")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s = sub.add_parser("classify", parents=[common], help="NonNeg, Tight, Normal or Disj")
    s.add_argument("file")
    s = sub.add_parser("reduce", parents=[common], help="encode a counting instance as an ELP")
    s.add_argument("kind", choices=["tight", "disj3"])
    s.add_argument("instance", nargs="?", help="instance file (omit with --seed)")
    s.add_argument("--seed", type=int, help="encode a reproducible random instance instead")
    s.add_argument("-o", "--output")
    s = sub.add_parser("td", parents=[common], help="tree decomposition of the primal graph")
    s.add_argument("file")
    s.add_argument("--heuristic", choices=["min-fill", "min-degree"], default="min-fill")
    s.add_argument("--predicate", action="store_true", help="use the predicate graph even for ground input")
    s.add_argument("--nice", action="store_true", help="convert to a nice decomposition")
    s.add_argument("--td-output", metavar="FILE", help="write the decomposition in PACE .td format")
    s.add_argument("--bag-ground", metavar="FILE", help="ground bag by bag and write the ground program")
    return p


def _error_code(exc: BaseException) -> int:
    if isinstance(exc, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, (ParseError, UsageError)):
        return EXIT_PARSE
    return EXIT_SEMANTIC


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = None
    report = None
    try:
        args = parser.parse_args(argv)
        budgets = resolve_budgets(args)
        data = None
        source = getattr(args, "file", None) or getattr(args, "instance", None)
        if args.command == "reduce" and (source is None) == (args.seed is None):
            raise UsageError("reduce needs exactly one of an instance file or --seed")
        if source is not None:
            data = read_input(source)
        report = RunReport(args.command, None if data is None else digest(data), budgets)
        start = time.perf_counter()
        report.result = COMMANDS[args.command](args, data, budgets)
        text = report.result.get("program")
        if text is not None and not (args.json and args.output in (None, "-")):
            # the program goes to its own file or to stdout; the JSON report embeds it otherwise
            del report.result["program"]
            write_output(args.output, text)
        if args.timing:
            report.timing = {"seconds": round(time.perf_counter() - start, 6)}
    except (ElpqError, UsageError, ConstraintViolated) as exc:
        code = _error_code(exc)
        msg = str(exc)
        print(f"elpq: error: {msg}", file=sys.stderr)
        if args is not None and getattr(args, "json", False):
            if report is None:
                report = RunReport(args.command, None, {})
            report.result = {}
            report.error = {"type": type(exc).__name__, "message": msg, "exit_code": code}
            sys.stdout.write(report.to_json())
        return code
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(render_text(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
