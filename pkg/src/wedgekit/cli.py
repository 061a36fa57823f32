"""``wedgekit`` command line: one verification per call, JSON report out.

Exit codes: 0 verified, 1 a mathematical claim failed, 2 usage or resource
error.  The report goes to stdout (or ``--output``), a one-line summary to
stderr.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from importlib.metadata import PackageNotFoundError, version

from .engine import ActionDomain, DomainCapExceeded, domain_cap_from_env, generate_group
from .exterior import compound, wedge_transvection
from .forms import build_form, form_to_json, numeric_invariance_check, symbolic_invariance_check
from .level import (
    HalfDimensionError,
    LevelError,
    LevelUndecided,
    OvergroupInstance,
    check_admissible,
    compute_level,
    generate_EwedgeE,
    normalizer_evidence,
    parse_net,
    sandwich_check,
    Net,
)
from .liealg import lie_dim
from .linalg import Matrix
from .ring import ideal_normalize, parse_ring

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _version() -> str:
    try:
        return version("wedgekit")
    except PackageNotFoundError:
        from . import __version__

        return __version__


def _finite_ring(spec: str):
    ring = parse_ring(spec)
    if not ring.is_finite:
        raise UsageError(f"ring {spec} is not finite")
    return ring


def _parse_adjoin(spec: str, ring, n: int, m: int) -> Matrix:
    """``"1,2;1,3;2"`` -> t_{{1,2},{1,3}}(2)."""
    try:
        I, J, xi = spec.split(";")
        I = tuple(int(x) for x in I.split(","))
        J = tuple(int(x) for x in J.split(","))
        xi = int(xi)
    except ValueError:
        raise UsageError(f"bad --adjoin {spec!r}, expected 'i1,..;j1,..;xi'") from None
    if len(I) != m or len(J) != m or I == J:
        raise UsageError(f"--adjoin {spec!r} needs two distinct {m}-subsets")
    return wedge_transvection(ring, n, m, I, J, xi)


def _net(args, ring) -> Net:
    if args.net is None:
        return Net((ideal_normalize(ring, 0),) * args.m)
    return parse_net(args.net, ring, args.m)


def _instance(args) -> OvergroupInstance:
    ring = _finite_ring(args.ring)
    net = _net(args, ring)
    inst = generate_EwedgeE(args.n, args.m, ring, net)
    extra = [_parse_adjoin(s, ring, args.n, args.m) for s in args.adjoin or []]
    return inst.adjoin(*extra, label=inst.label) if extra else inst


# ------------------------------------------------------------------ handlers


def cmd_compound(args):
    ring = parse_ring(args.ring)
    if args.matrix:
        g = Matrix.from_rows(ring, json.loads(args.matrix))
    else:
        rng = random.Random(args.seed)
        bound = ring.modulus if ring.is_finite else 10
        g = Matrix(ring, args.n, args.n, [ring.from_int(rng.randrange(bound)) for _ in range(args.n * args.n)])
    c = compound(g, args.m)
    return {"matrix": g.to_lists(), "compound": c.to_lists(), "det": ring.format(c.det().value)}, True


def cmd_form(args):
    V = [int(x) for x in args.V.split(",")] if args.V else None
    return form_to_json(build_form(args.n, args.m, V)), True


def cmd_invariance(args):
    if args.ring in ("Z", None):
        ok = symbolic_invariance_check(args.n, args.m)
        return {"mode": "symbolic", "ring": "Z", "identity": ok}, ok
    ring = _finite_ring(args.ring)
    failures = numeric_invariance_check(args.n, args.m, ring, args.samples, args.seed)
    return {
        "mode": "numeric",
        "ring": str(ring),
        "samples": args.samples,
        "failures": [g.to_lists() for g in failures],
        "identity": not failures,
    }, not failures


def cmd_lie_dim(args):
    report = lie_dim(args.n, args.m, args.field, args.group)
    return report.to_json(), report.within_bound


def cmd_group_order(args):
    inst = _instance(args)
    chain = generate_group(inst.generators, ActionDomain(inst.ring, inst.N, domain_cap_from_env()))
    return {
        "ring": str(inst.ring),
        "net": _net(args, inst.ring).generators(),
        "order": str(chain.order()),
        "orbit_sizes": chain.orbit_sizes,
        "base": chain.base,
    }, True


def _level_report(args, inst, net, sandwich=None):
    admissible, violations = check_admissible(net, inst.n, inst.m)
    doc = {
        "n": inst.n,
        "m": inst.m,
        "ring": str(inst.ring),
        "net": net.generators(),
        "admissible": admissible,
        "violations": violations,
        "seed": args.seed,
    }
    if sandwich is not None:
        doc["sandwich"] = {"lower": sandwich.lower, "upper": sandwich.upper, "upper_kind": sandwich.to_json()["upper_kind"]}
    return doc, admissible


def cmd_level(args):
    inst = _instance(args)
    net = compute_level(inst, args.method)
    return _level_report(args, inst, net)


def cmd_net_check(args):
    ring = _finite_ring(args.ring) if args.ring not in ("Z",) else parse_ring(args.ring)
    net = parse_net(args.net, ring, args.m)
    ok, violations = check_admissible(net, args.n, args.m)
    return {"net": net.generators(), "admissible": ok, "violations": violations}, True


def cmd_roundtrip(args):
    ring = _finite_ring(args.ring)
    net = parse_net(args.net, ring, args.m)
    ok, violations = check_admissible(net, args.n, args.m)
    if not ok:
        raise UsageError("inadmissible net: " + "; ".join(violations))
    out = compute_level(generate_EwedgeE(args.n, args.m, ring, net), args.method)
    equal = out == net
    return {"net_in": net.generators(), "net_out": out.generators(), "equal": equal}, equal


def cmd_normalizer(args):
    ring = _finite_ring(args.ring)
    A = ideal_normalize(ring, args.ideal)
    report = normalizer_evidence(args.n, args.m, ring, A, args.samples, args.seed, allow_half=args.allow_half)
    return report.to_json(), report.ok


def cmd_sandwich(args):
    inst = _instance(args)
    net = compute_level(inst, args.method)
    report = sandwich_check(inst, net, args.method)
    doc, admissible = _level_report(args, inst, net, report)
    return doc, admissible and report.lower and report.upper


COMMANDS = {
    "compound": cmd_compound,
    "form": cmd_form,
    "invariance": cmd_invariance,
    "lie-dim": cmd_lie_dim,
    "group-order": cmd_group_order,
    "level": cmd_level,
    "net-check": cmd_net_check,
    "roundtrip": cmd_roundtrip,
    "normalizer": cmd_normalizer,
    "sandwich": cmd_sandwich,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wedgekit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, ring="Z/4"):
        p = sub.add_parser(name, help=help)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--m", type=int, required=True)
        if ring is not None:
            p.add_argument("--ring", default=ring)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
        return p

    p = add("compound", "m-th compound of a matrix (random unless --matrix)")
    p.add_argument("--matrix", help="JSON list of rows")
    p = add("form", "the invariant form f_V", ring=None)
    p.add_argument("--V", help="comma-separated subset of [n], default all of [n]")
    p = add("invariance", "q(∧^m g x) = det(g) q(x): symbolic over Z, sampled otherwise", ring="Z")
    p.add_argument("--samples", type=int, default=500)
    p = add("lie-dim", "Lie algebra dimension of a form stabilizer", ring=None)
    p.add_argument("--field", default="Q")
    p.add_argument("--group", choices=("Gf", "GfBar", "GYBar"), required=True)
    for name, help in (
        ("group-order", "order of E∧E(R, net) plus adjoined transvections"),
        ("level", "level net of E∧E(R, net) plus adjoined transvections"),
        ("sandwich", "lower and upper inclusions around an overgroup"),
    ):
        p = add(name, help)
        p.add_argument("--net", help='e.g. "(2),(0)"; default the zero net')
        p.add_argument("--adjoin", action="append", help="extra t_{I,J}(xi) as 'i1,..;j1,..;xi', repeatable")
        if name != "group-order":
            p.add_argument("--method", choices=("chain", "closure"), default="chain")
    p = add("net-check", "admissibility relations of a net")
    p.add_argument("--net", required=True)
    p = add("roundtrip", "level(E∧E(R, net)) == net")
    p.add_argument("--net", required=True)
    p.add_argument("--method", choices=("chain", "closure"), default="chain")
    p = add("normalizer", "sampled normalizer evidence for E∧E(R, A)")
    p.add_argument("--ideal", type=int, default=0, help="generator of A")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument(
        "--allow-half", action="store_true",
        help="in half dimension accept the orthogonal/symplectic stabilizer as upper bound",
    )
    return parser


def run(argv: list[str] | None = None) -> tuple[int, dict | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_USAGE), None
    start = time.perf_counter()
    try:
        result, ok = COMMANDS[args.command](args)
    except LevelError as exc:
        result, ok = {"error": str(exc)}, False
    except (UsageError, ValueError, DomainCapExceeded, HalfDimensionError, LevelUndecided, KeyError) as exc:
        print(f"wedgekit {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    inputs = {k: v for k, v in vars(args).items() if k not in ("output", "command")}
    doc = {
        "command": args.command,
        "inputs": inputs,
        "result": result,
        "verified": ok,
        "seed": args.seed,
        "version": _version(),
        "elapsed_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"wedgekit {args.command}: {'verified' if ok else 'FAILED'}", file=sys.stderr)
    return (EXIT_OK if ok else EXIT_FAILED), doc


def main(argv: list[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
