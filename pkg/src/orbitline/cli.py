"""``orbitline`` command-line front end.

Exit status: 0 on success, 2 when a search or criterion finished without an
answer (NotFound / Inconclusive), 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .budget import Budget
from .decomposition import DecompositionWitness, LinearPairSolution, solve_linear_pair, solve_rigidity, verify_decomposition
from .errors import Inconclusive, OrbitlineError
from .heights import canonical_height_eigensystem, canonical_height_sequence, naive_height
from .io import SystemFile, dumps, parse_system, system_from_json
from .orbits import (
    Line,
    SequenceSpec,
    enumerate_semigroup_orbit,
    enumerate_sequence_orbit,
    intersect_with_line,
)
from .poly import LinearMap, Polynomial, format_rational, is_monomial_equivalent, parse_linear, parse_rational
from .theorems import (
    EqualityCertificate,
    check_common_word,
    conjugate_point,
    conjugate_system,
    degree_dominance_bound,
    height_sum_comparison,
    sample_integral_solutions,
    search_equality_certificate,
    witness_hash,
)


class UsageError(OrbitlineError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------ arg helpers

def _poly_arg(text: str) -> Polynomial:
    text = text.strip()
    if text.startswith(("{", "[")):
        return Polynomial.from_json(json.loads(text))
    return Polynomial([parse_rational(t) for t in text.split(",")])


def _point_arg(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"point must be 'x,y', got {text!r}")
    return parse_rational(parts[0]), parse_rational(parts[1])


def _need_system(args) -> SystemFile:
    if not args.system:
        raise UsageError("this subcommand needs --system FILE")
    return parse_system(args.system)


def _budget(args, sf: SystemFile | None = None) -> Budget:
    b = Budget()
    if sf is not None:
        b = Budget(
            max_words=sf.budgets.get("max_words", b.max_words),
            max_digits=sf.budgets.get("max_digits", b.max_digits),
        )
    if args.budget_words is not None:
        b.max_words = args.budget_words
    if args.budget_digits is not None:
        b = Budget(max_words=b.max_words, max_digits=args.budget_digits)
    args._budget = b
    return b


def _base(args, sf: SystemFile):
    if args.base:
        return _point_arg(args.base)
    if sf.base is None:
        raise UsageError("no base point: pass --base 'x,y' or put 'base' in the system file")
    return sf.base


def _seq(args, sf: SystemFile, name: str = "seq") -> SequenceSpec:
    text = getattr(args, name, None)
    if text:
        if text in sf.sequences:
            return sf.sequences[text]
        return SequenceSpec.parse(text)
    if sf.sequences:
        return sf.sequences[sorted(sf.sequences)[0]]
    raise UsageError(f"no sequence: pass --{name} 'pre:.../cyc:...'")


def _coord(sf: SystemFile, which: str):
    return sf.system.fs if which == "f" else sf.system.gs


def _exact_point(pt):
    return [format_rational(pt[0]), format_rational(pt[1])]


# ------------------------------------------------------------ subcommands

def cmd_orbit(args, out):
    sf = _need_system(args)
    budget = _budget(args, sf)
    base = _base(args, sf)
    line = Line.parse(args.line) if args.line else (sf.line or Line.diagonal())
    if args.mode == "semigroup":
        enum = enumerate_semigroup_orbit(sf.system, base, args.depth, dedup=not args.no_dedup, line=line, budget=budget)
    else:
        enum = enumerate_sequence_orbit(sf.system, _seq(args, sf), base, args.depth, mode=args.mode, line=line, budget=budget)
    records = enum.records
    if args.command == "intersect":
        records = intersect_with_line(records, line)
    for r in records:
        out.write(dumps(r.to_json()) + "\n")
    summary = {
        "summary": {
            "mode": args.mode,
            "records": len(records),
            "words_evaluated": enum.words_evaluated,
            "depth_reached": enum.depth_reached,
            "preperiodic": enum.preperiodic,
            "truncated": enum.truncated,
            "line": line.to_json(),
        }
    }
    out.write(dumps(summary) + "\n")
    return None


def cmd_height(args, out):
    hv = naive_height(parse_rational(args.x))
    return {"x": format_rational(parse_rational(args.x)), "height": hv.value, "log_arg": hv.log_arg, "exact": "log(log_arg)"}


def cmd_canonical_height(args, out):
    sf = _need_system(args)
    budget = _budget(args, sf)
    maps = _coord(sf, args.coord)
    x = parse_rational(args.x)
    if args.mode == "sequence":
        max_depth = args.max_depth if args.max_depth is not None else sf.budgets.get("max_depth", 32)
        est = canonical_height_sequence(maps, _seq(args, sf), x, args.target_error, max_depth, budget)
    else:
        depth = args.max_depth if args.max_depth is not None else 6
        est = canonical_height_eigensystem(maps, x, depth, budget)
    return {"mode": args.mode, "coord": args.coord, "x": format_rational(x), **est.to_json()}


def cmd_rigidity(args, out):
    A, B, C, D = (_poly_arg(t) for t in (args.A, args.B, args.C, args.D))
    w = solve_rigidity(A, B, C, D)
    payload = {"l": w.l.to_json()}
    return {
        "witness": payload,
        "verified": w.verify(A, B, C, D),
        "inputs": {"A": A.to_json(), "B": B.to_json(), "C": C.to_json(), "D": D.to_json()},
        "sha256": witness_hash(payload),
    }


def _linear_inputs(args):
    if args.F_i and args.F_j:
        return _poly_arg(args.F_i), _poly_arg(args.F_j)
    sf = _need_system(args)
    if args.i is None or args.j is None:
        raise UsageError("pass --i and --j (generator indices) or --F-i/--F-j polynomials")
    fi = sf.system[args.i].f if args.coord_i == "f" else sf.system[args.i].g
    fj = sf.system[args.j].f if args.coord_j == "f" else sf.system[args.j].g
    return fi, fj


def cmd_solve_linear(args, out):
    fi, fj = _linear_inputs(args)
    i = args.i if args.i is not None else 1
    j = args.j if args.j is not None else 2
    sols = solve_linear_pair(fi, fj, i, j)
    return {
        "F_i": fi.to_json(),
        "F_j": fj.to_json(),
        "solutions": [s.to_json() for s in sols],
        "count": len(sols),
        "verified": all(s.verify(fi, fj) for s in sols),
    }


def _load_json_arg(text: str):
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    with open(text, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_verify_decomposition(args, out):
    F, G = _poly_arg(args.F), _poly_arg(args.G)
    w = DecompositionWitness.from_json(_load_json_arg(args.witness))
    ok = verify_decomposition(F, G, w)
    return {"verified": ok, "witness": w.to_json(), "sha256": witness_hash(w.to_json())}


def cmd_monomial_equiv(args, out):
    P = _poly_arg(args.P)
    res = is_monomial_equivalent(P)
    payload = {"equivalent": res.equivalent, "degree": res.degree}
    if res.equivalent:
        payload.update({"u": res.u.to_json(), "v": res.v.to_json(), "certification": res.certification})
    return payload


def cmd_certificate(args, out):
    sf = _need_system(args)
    link = parse_linear(args.link) if args.link else None
    cert = search_equality_certificate(sf.system, args.max_k, link, _budget(args, sf))
    return {"certificate": cert.to_json(sf.system), "system": SystemFile(sf.system).to_json()}


def cmd_conjugate(args, out):
    sf = _need_system(args)
    l = parse_linear(args.l)
    conj = SystemFile(conjugate_system(sf.system, l))
    if sf.base is not None or args.base:
        conj.base = conjugate_point(_base(args, sf), l)
    if sf.line is not None and sf.line.link is not None:
        # X = m(Y) becomes X = (m ∘ l^-1)(Y) in the new coordinates.
        conj.line = Line(sf.line.link.then(l.inverse()))
    return {"system": conj.to_json(), "l": l.to_json()}


def cmd_common_word(args, out):
    sf = _need_system(args)
    maps = _coord(sf, args.coord)
    phi, psi = _seq(args, sf, "phi"), _seq(args, sf, "psi")
    link = parse_linear(args.link) if args.link else None
    m, k = check_common_word(phi, psi, maps, args.m_max, args.k_max, link)
    return {"m": m, "k": k, "phi": str(phi), "psi": str(psi), "coord": args.coord}


def cmd_finiteness(args, out):
    sf = _need_system(args)
    base = _base(args, sf)
    if args.criterion == "degree":
        rep = degree_dominance_bound(
            sf.system, _seq(args, sf), base[0], base[1],
            target_error=args.target_error, verify_depth=args.verify_depth, budget=_budget(args, sf),
        )
    else:
        rep = height_sum_comparison(sf.system, base[0], base[1], k_max=args.k_max)
    return {"report": rep.to_json()}


def cmd_integral_solutions(args, out):
    F, G = _poly_arg(args.F), _poly_arg(args.G)
    sols = sample_integral_solutions(F, G, args.bound)
    return {"bound": args.bound, "count": len(sols), "solutions": [list(p) for p in sols]}


def cmd_verify(args, out):
    """Re-verify the witness embedded in a saved report."""
    report = _load_json_arg(args.report)
    res = report.get("results", report)
    checks = {}
    if "certificate" in res:
        sf = _need_system(args) if args.system or "system" not in res else system_from_json(res["system"])
        c = res["certificate"]
        link = LinearMap.from_json(c["link"])
        cert = EqualityCertificate(tuple(c["word"]), None if link.is_identity() else link)
        checks["certificate"] = cert.verify(sf.system)
    if "witness" in res and "l" in res.get("witness", {}):
        from .decomposition import RigidityWitness

        inp = res["inputs"]
        A, B, C, D = (Polynomial.from_json(inp[k]) for k in "ABCD")
        checks["rigidity"] = RigidityWitness(LinearMap.from_json(res["witness"]["l"])).verify(A, B, C, D)
    if "solutions" in res and "F_i" in res:
        fi, fj = Polynomial.from_json(res["F_i"]), Polynomial.from_json(res["F_j"])
        checks["solve_linear"] = all(
            LinearPairSolution(LinearMap.from_json(s["a"]), LinearMap.from_json(s["b"])).verify(fi, fj)
            for s in res["solutions"]
        )
    if not checks:
        raise UsageError("report contains no verifiable witness")
    return {"checks": checks, "verified": all(checks.values())}


COMMANDS = {
    "orbit": cmd_orbit,
    "intersect": cmd_orbit,
    "height": cmd_height,
    "canonical-height": cmd_canonical_height,
    "rigidity": cmd_rigidity,
    "solve-linear": cmd_solve_linear,
    "verify-decomposition": cmd_verify_decomposition,
    "monomial-equiv": cmd_monomial_equiv,
    "certificate": cmd_certificate,
    "conjugate": cmd_conjugate,
    "common-word": cmd_common_word,
    "finiteness": cmd_finiteness,
    "integral-solutions": cmd_integral_solutions,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", help="system definition JSON file")
    common.add_argument("--budget-words", type=int, default=None)
    common.add_argument("--budget-digits", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", default=False, help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")

    parser = _Parser(prog="orbitline", description="Exact polynomial semigroup dynamics over Q.")
    parser.add_argument("--version", action="version", version=f"orbitline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("orbit", "intersect"):
        p = sub.add_parser(name, parents=[common], help="enumerate an orbit" if name == "orbit" else "orbit points on a line")
        p.add_argument("--base", help="'x,y'")
        p.add_argument("--mode", choices=["semigroup", "forward", "coherent"], default="semigroup")
        p.add_argument("--depth", type=int, default=4)
        p.add_argument("--seq", help="'pre:1,2/cyc:2,1' or a sequence name from the system file")
        p.add_argument("--line", help="'diag' or 'a/b,c/d' for X = (a/b)Y + (c/d)")
        p.add_argument("--no-dedup", action="store_true")

    p = sub.add_parser("height", parents=[common], help="naive logarithmic height")
    p.add_argument("--x", required=True)

    p = sub.add_parser("canonical-height", parents=[common], help="canonical height estimate with error bound")
    p.add_argument("--mode", choices=["sequence", "eigensystem"], default="sequence")
    p.add_argument("--coord", choices=["f", "g"], default="f")
    p.add_argument("--x", required=True)
    p.add_argument("--seq")
    p.add_argument("--target-error", type=float, default=1e-6)
    p.add_argument("--max-depth", type=int, default=None, help="depth cap (sequence) or depth (eigensystem)")

    p = sub.add_parser("rigidity", parents=[common], help="linear l with A = C∘l^-1, B = l∘D")
    for name in "ABCD":
        p.add_argument(f"--{name}", required=True, help="polynomial: JSON or ascending 'c0,c1,...'")

    p = sub.add_parser("solve-linear", parents=[common], help="all linear a, b with a∘F_i = F_j∘b")
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--coord-i", choices=["f", "g"], default="f")
    p.add_argument("--coord-j", choices=["f", "g"], default="f")
    p.add_argument("--F-i", dest="F_i")
    p.add_argument("--F-j", dest="F_j")

    p = sub.add_parser("verify-decomposition", parents=[common], help="check F = E∘H∘a, G = E∘c∘H∘b")
    p.add_argument("--F", required=True)
    p.add_argument("--G", required=True)
    p.add_argument("--witness", required=True, help="JSON object or file with E, H, a, b, c")

    p = sub.add_parser("monomial-equiv", parents=[common], help="is u∘P∘v a monomial for some linears")
    p.add_argument("--P", required=True)

    p = sub.add_parser("certificate", parents=[common], help="search a word with f = link∘g")
    p.add_argument("--max-k", type=int, required=True)
    p.add_argument("--link", help="'a/b,c/d'")

    p = sub.add_parser("conjugate", parents=[common], help="conjugate the g-coordinates by a linear map")
    p.add_argument("--l", required=True)
    p.add_argument("--base")

    p = sub.add_parser("common-word", parents=[common], help="least (m, k) with equal shifted windows")
    p.add_argument("--phi")
    p.add_argument("--psi")
    p.add_argument("--coord", choices=["f", "g"], default="f")
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--link")

    p = sub.add_parser("finiteness", parents=[common], help="degree-dominance or height-sum criterion")
    p.add_argument("--criterion", choices=["degree", "heightsum"], required=True)
    p.add_argument("--base")
    p.add_argument("--seq")
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--verify-depth", type=int, default=12)
    p.add_argument("--target-error", type=float, default=1e-3)

    p = sub.add_parser("integral-solutions", parents=[common], help="integer points of F(X) = G(Y) in a box")
    p.add_argument("--F", required=True)
    p.add_argument("--G", required=True)
    p.add_argument("--bound", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="re-verify a saved report's witness")
    p.add_argument("--report", required=True)
    return parser


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    report = {"command": argv, "version": __version__, "seed": args.seed}
    try:
        results = COMMANDS[args.command](args, out)
        status, code = "ok", 0
    except Inconclusive as exc:
        results = {"reason": str(exc), "kind": type(exc).__name__, "bounds": exc.bounds}
        partial = exc.partial
        if partial is not None:
            results["partial"] = partial.to_json() if hasattr(partial, "to_json") else partial
        status, code = "not_found" if type(exc).__name__ == "NotFound" else "inconclusive", 2
    except (OrbitlineError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"orbitline: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if results is None and code == 0:
        return 0
    report["status"] = status
    report["results"] = results
    budget = getattr(args, "_budget", None)
    report["budget"] = budget.usage() if budget is not None else None
    if args.timing:
        report["wall_time"] = time.perf_counter() - start
    out.write(dumps(report, pretty=args.pretty) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
