"""Command-line front end (``renorm``).

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import birkhoff as bk
from . import rgflow
from .characters import (
    GradeCapMismatch,
    LinMap,
    MissingGeneratorError,
    convolution_inverse,
    convolve,
    grading_map,
    is_character,
    is_infinitesimal,
)
from .connection import DIRECTIONS, equivariance_check, gauge_check
from .corpus import builtin_graphs
from .graphs import (
    GraphError,
    admissible_subgraphs,
    check_graph,
    contract,
    load_graphs,
    loop_number,
    superficial_degree,
)
from .hopf import (
    GeneratorRegistry,
    HopfAlgebra,
    HopfElement,
    UnknownGeneratorError,
    antipode_defect,
    builtin_registry,
    coassociativity_defect,
    counit_defect,
)
from .regalg import RegElement, as_fraction, pi_minus
from .samples import random_character, random_element, seed_from_env
from .toyrules import (
    CharacterFileError,
    ToyRuleConfig,
    bubble_cutoff_value,
    bubble_dimreg_value,
    character_to_json,
    dump_character,
    load_character,
    toy_pair,
)

OK, FAILED, BAD_INPUT = 0, 1, 2

INPUT_ERRORS = (
    OSError,
    GraphError,
    CharacterFileError,
    UnknownGeneratorError,
    MissingGeneratorError,
    GradeCapMismatch,
    json.JSONDecodeError,
    ValueError,
)


class Context:
    """Parsed options plus the lazily built registry and algebra."""

    def __init__(self, args: argparse.Namespace, out):
        self.args = args
        self.out = out
        self._registry: GeneratorRegistry | None = None
        self._file_graphs: list | None = None

    def print(self, text: str = "") -> None:
        print(text, file=self.out)

    @property
    def json(self) -> bool:
        return self.args.format == "json"

    def emit_json(self, data) -> None:
        self.print(json.dumps(data, indent=2, ensure_ascii=False))

    @property
    def file_graphs(self) -> list:
        if self._file_graphs is None:
            self._file_graphs = load_graphs(self.args.graphs) if self.args.graphs else []
        return self._file_graphs

    @property
    def registry(self) -> GeneratorRegistry:
        if self._registry is None:
            reg = builtin_registry()
            for g in self.file_graphs:
                reg.register(g, g.name)
            self._registry = reg
        return self._registry

    def algebra(self) -> HopfAlgebra:
        cap = self.args.grade_cap
        if self.args.graphs:
            return HopfAlgebra([g for g in self.file_graphs], cap, self.registry)
        return HopfAlgebra.builtin(cap, self.registry)

    def character(self, path: str | None = None, algebra: HopfAlgebra | None = None) -> LinMap:
        path = path or self.args.character
        if not path:
            raise ValueError("a --character file is required")
        f = load_character(path, algebra, self.registry)
        if self.args.grade_cap_given and f.grade_cap != self.args.grade_cap:
            raise GradeCapMismatch(f"{path} has grade cap {f.grade_cap}, --grade-cap is {self.args.grade_cap}")
        return f

    def toy_config(self) -> ToyRuleConfig:
        return ToyRuleConfig(self.args.m, self.args.angular, self.args.z_order)


# ---------------------------------------------------------------------------
# subcommands


def cmd_graph_check(ctx: Context) -> int:
    graphs = load_graphs(ctx.args.graphs, validate=False) if ctx.args.graphs else builtin_graphs(ctx.args.grade_cap)
    failed = False
    rows = []
    for g in graphs:
        problems = check_graph(g)
        row = {"graph": g.name, "problems": problems}
        if not problems:
            subs = admissible_subgraphs(g)
            lemma_bad = []
            for s in subs:
                quotient = contract(g, s)
                if superficial_degree(g) != s.superficial_degree() + superficial_degree(quotient):
                    lemma_bad.append(sorted(s.edge_subset))
            row.update(
                loops=loop_number(g),
                degree=superficial_degree(g),
                admissible_subgraphs=len(subs),
                degree_lemma_failures=lemma_bad,
            )
            if lemma_bad:
                problems = [f"degree additivity fails for edge subsets {lemma_bad}"]
                row["problems"] = problems
        failed = failed or bool(problems)
        rows.append(row)
    if ctx.json:
        ctx.emit_json(rows)
    else:
        for row in rows:
            if row["problems"]:
                ctx.print(f"FAIL {row['graph']}: {'; '.join(row['problems'])}")
            else:
                ctx.print(
                    f"PASS {row['graph']}: loops={row['loops']} omega={row['degree']} "
                    f"admissible={row['admissible_subgraphs']}"
                )
    return FAILED if failed else OK


def _parse_element(H: HopfAlgebra, text: str) -> HopfElement:
    if text == "1":
        return HopfElement.unit()
    return H.element(*text.split("."))


def cmd_coproduct(ctx: Context) -> int:
    H = ctx.algebra()
    for text in ctx.args.graph:
        t = H.coproduct(_parse_element(H, text))
        if ctx.json:
            ctx.emit_json({"element": text, "coproduct": H.render_tensor(t)})
        else:
            ctx.print(H.render_tensor(t))
    return OK


def cmd_antipode(ctx: Context) -> int:
    H = ctx.algebra()
    for text in ctx.args.graph:
        x = H.antipode(_parse_element(H, text))
        if ctx.json:
            ctx.emit_json({"element": text, "antipode": H.render(x)})
        else:
            ctx.print(H.render(x))
    return OK


def cmd_birkhoff(ctx: Context) -> int:
    phi = ctx.character()
    result = bk.birkhoff_decompose(phi)
    out = Path(ctx.args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_character(result.phi_minus, out / "minus.json")
    dump_character(result.phi_plus, out / "plus.json")
    dump_character(result.prepared, out / "prepared.json")
    mism = result.reconstruct().mismatches(phi)
    ranges = bk.range_violations(result)
    H = phi.algebra
    checks = [
        {
            "check": "reconstruction",
            "passed": not mism,
            "offending": [H.render_monomial(m) for m in mism],
        },
        {
            "check": "ranges",
            "passed": not ranges,
            "offending": [f"{side}:{H.render_monomial(m)}" for side, m in ranges],
        },
    ]
    if ctx.args.locality:
        loc = bk.check_locality(phi)
        checks.append(
            {
                "check": "locality",
                "passed": loc.passed,
                "offending": [f"{e.generator}: {'; '.join(e.offending)}" for e in loc.entries if not e.passed],
            }
        )
    report = {"files": ["minus.json", "plus.json", "prepared.json"], "checks": checks}
    (out / "report.json").write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    if ctx.json:
        ctx.emit_json(report)
    else:
        for c in checks:
            extra = f" [{', '.join(c['offending'])}]" if c["offending"] else ""
            ctx.print(f"{'PASS' if c['passed'] else 'FAIL'} {c['check']}{extra}")
        ctx.print(f"wrote minus.json, plus.json, prepared.json, report.json to {out}")
    return OK if all(c["passed"] for c in checks) else FAILED


def cmd_beta(ctx: Context) -> int:
    phi = ctx.character()
    b = rgflow.beta(phi, ctx.args.sigma)
    status = OK
    if ctx.args.limit:
        try:
            b = rgflow.limit_z0(b)
        except rgflow.NonLocalCharacterError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return FAILED
    if ctx.json:
        ctx.emit_json(character_to_json(b))
    else:
        ctx.print(b.render())
    if not is_infinitesimal(b):
        print("error: beta function is not infinitesimal", file=sys.stderr)
        status = FAILED
    return status


def _render_flow(psi: rgflow.FlowMap) -> list[dict]:
    H = psi.algebra
    return [{"monomial": H.render_monomial(m) or "1", "terms": v.to_json()} for m, v in psi.items()]


def cmd_rho_check(ctx: Context) -> int:
    phi = ctx.character()
    sigma = ctx.args.sigma
    b = rgflow.beta(phi, sigma)
    try:
        psi = rgflow.rho(b, sigma, ctx.args.z_order)
    except rgflow.DivergentFlowIntegral as exc:
        if ctx.json:
            ctx.emit_json({"sigma": sigma, "passed": False, "error": str(exc)})
        else:
            ctx.print(f"FAIL rho_{sigma}: {exc}")
        return FAILED
    mism = psi.at_zero().mismatches(phi)
    H = phi.algebra
    if ctx.json:
        data = {"sigma": sigma, "passed": not mism, "mismatches": [H.render_monomial(m) for m in mism]}
        if ctx.args.show_flow:
            data["flow"] = _render_flow(psi)
        ctx.emit_json(data)
    else:
        if ctx.args.show_flow:
            for m, v in psi.items():
                ctx.print(f"{H.render_monomial(m) or '1'}: {v}")
        if mism:
            ctx.print(f"FAIL rho_{sigma}(beta_{sigma}(phi)) at s=0 differs on {', '.join(map(H.render_monomial, mism))}")
        else:
            ctx.print(f"PASS rho_{sigma}(beta_{sigma}(phi)) at s=0 equals phi")
    return FAILED if mism else OK


def cmd_gauge_check(ctx: Context) -> int:
    if bool(ctx.args.dr) != bool(ctx.args.mc):
        raise ValueError("give both --dr and --mc, or neither to use the built-in bubble pair")
    if ctx.args.dr:
        f = ctx.character(ctx.args.dr)
        g = ctx.character(ctx.args.mc, f.algebra)
    else:
        f, g = toy_pair(ctx.toy_config(), ctx.args.grade_cap if ctx.args.grade_cap_given else 2)
    directions = ctx.args.direction or list(DIRECTIONS)
    report = gauge_check(f, g, directions)
    if ctx.json:
        ctx.emit_json(report.to_json())
    else:
        for e in report.entries:
            ctx.print(f"{'PASS' if e.equal else 'FAIL'} {e.identity} d{e.direction} {e.monomial}")
        ctx.print(f"max discrepancy: {report.max_discrepancy()}")
    return OK if report.passed else FAILED


def cmd_equivariance(ctx: Context) -> int:
    phi = ctx.character() if ctx.args.character else toy_pair(ctx.toy_config())[0 if ctx.args.sigma == "dr" else 1]
    report = equivariance_check(phi, ctx.args.sigma, as_fraction(ctx.args.u), m=ctx.args.m)
    if ctx.json:
        ctx.emit_json(
            {
                "sigma": report.sigma,
                "u": str(report.u),
                "tolerance": report.tolerance,
                "passed": report.passed,
                "entries": [e.__dict__ for e in report.entries],
            }
        )
    else:
        ctx.print(report.render())
    return OK if report.passed else FAILED


def cmd_toyrules_emit(ctx: Context) -> int:
    cfg = ctx.toy_config()
    cap = ctx.args.grade_cap if ctx.args.grade_cap_given else 2
    dr, mc = toy_pair(cfg, cap)
    out = Path(ctx.args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_character(dr, out / "bubble_dimreg.json")
    dump_character(mc, out / "bubble_cutoff.json")
    if ctx.json:
        ctx.emit_json({"files": ["bubble_dimreg.json", "bubble_cutoff.json"], "grade_cap": cap})
    else:
        ctx.print(f"dimreg bubble: {bubble_dimreg_value(cfg)}")
        ctx.print(f"cutoff bubble: {bubble_cutoff_value(cfg)}")
        ctx.print(f"wrote bubble_dimreg.json, bubble_cutoff.json to {out}")
    return OK


# ---------------------------------------------------------------------------
# selftest


def _selftest_checks(fault: str | None):
    """Yield (name, passed, detail) in a fixed order."""
    seed = seed_from_env()
    H = HopfAlgebra.builtin(3)
    basis = [m for m in H.basis]

    graphs = builtin_graphs(3)
    bad = []
    for g in graphs:
        if superficial_degree(g) != 4 - g.leg_count:
            bad.append(g.name)
        for s in admissible_subgraphs(g):
            if superficial_degree(g) != s.superficial_degree() + superficial_degree(contract(g, s)):
                bad.append(f"{g.name}/{sorted(s.edge_subset)}")
    yield "degree lemma", not bad, f"{len(graphs)} graphs" if not bad else ", ".join(bad[:5])

    bad = [H.render_monomial(m) for m in basis if coassociativity_defect(H, m)]
    yield "coassociativity", not bad, f"{len(basis)} monomials" if not bad else ", ".join(bad[:5])

    bad = [H.render_monomial(m) for m in basis if any(d.terms for d in counit_defect(H, m))]
    yield "counit axiom", not bad, f"{len(basis)} monomials" if not bad else ", ".join(bad[:5])

    antipode = H.antipode
    if fault == "antipode":
        # primitive-style antipode: wrong on anything with subdivergences
        antipode = HopfElement.__neg__
    bad = [H.render_monomial(m) for m in basis if any(d.terms for d in antipode_defect(H, m, antipode))]
    yield "antipode axiom", not bad, f"{len(basis)} monomials" if not bad else ", ".join(bad[:5])

    rng = random.Random(seed)
    bad_rb = 0
    for _ in range(200):
        x, y = random_element(rng), random_element(rng)
        px, py = pi_minus(x), pi_minus(y)
        if not px * py + pi_minus(x * y) == pi_minus(x * py) + pi_minus(px * y):
            bad_rb += 1
    yield "Rota-Baxter identity", not bad_rb, "200 pairs" if not bad_rb else f"{bad_rb} failing pairs"

    H2 = HopfAlgebra.builtin(2)
    chars = [random_character(H2, rng) for _ in range(3)] + [random_character(H2, rng, with_y=True)]
    bad = []
    for n, phi in enumerate(chars):
        res = bk.birkhoff_decompose(phi)
        if res.reconstruct().mismatches(phi) or bk.range_violations(res):
            bad.append(n)
    yield "Birkhoff decomposition", not bad, f"{len(chars)} characters" if not bad else f"samples {bad}"

    bad = []
    for n, phi in enumerate(chars):
        for sigma in rgflow.SIGMAS:
            b = rgflow.beta(phi, sigma)
            if not is_infinitesimal(b) or b.mismatches(rgflow.beta_from_flow(phi, sigma)):
                bad.append(f"{sigma}#{n}")
        z = RegElement.z()
        scaled = convolve(convolution_inverse(phi), grading_map(phi)).map_values(lambda m, v: v * z)
        if rgflow.beta_dr(phi).mismatches(scaled):
            bad.append(f"zY#{n}")
    yield "beta functions", not bad, "infinitesimal, flow-consistent" if not bad else ", ".join(bad)

    bad = []
    for n, phi in enumerate(chars[:3]):
        psi = rgflow.rho(rgflow.beta_dr(phi), rgflow.DR)
        if psi.at_zero().mismatches(phi) or not is_character(psi.at_zero()):
            bad.append(n)
    yield "inverse flow", not bad, "rho_dr(beta_dr(phi)) = phi" if not bad else f"samples {bad}"

    dr, mc = toy_pair()
    report = gauge_check(dr, mc)
    yield "gauge identities", report.passed, f"{len(report.entries)} entries, max discrepancy {report.max_discrepancy()}"

    ok = all(equivariance_check(phi, s, 3).passed for phi, s in ((dr, "dr"), (mc, "mc")))
    yield "equivariance", ok, "u=3"


def cmd_selftest(ctx: Context) -> int:
    first = None
    for name, passed, detail in _selftest_checks(ctx.args.inject_fault):
        ctx.print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        if not passed and first is None:
            first = name
    if first:
        ctx.print(f"selftest failed: first failing invariant is {first}")
        return FAILED
    ctx.print("selftest passed")
    return OK


# ---------------------------------------------------------------------------
# parser


def _fraction(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graphs", help="graph file (JSON); default: built-in corpus")
    common.add_argument("--character", help="character file (JSON)")
    common.add_argument("--grade-cap", type=int, default=None, help="grade cap N (default 3)")
    common.add_argument("--z-order", type=int, default=6, help="z truncation order Q (default 6)")
    common.add_argument("--m", type=_fraction, default=Fraction(1), help="mass m (default 1)")
    common.add_argument("--angular", type=_fraction, default=Fraction(1), help="angular factor (default 1)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out-dir", default=".", help="directory for written files")

    p = argparse.ArgumentParser(prog="renorm", description="Hopf-algebraic renormalization toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("graph-check", parents=[common], help="validate graphs and the degree lemma")
    for name, text in (("coproduct", "print the coproduct"), ("antipode", "print the antipode")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--graph", action="append", required=True, help="generator name or product like B1.B1")
    s = sub.add_parser("birkhoff", parents=[common], help="Birkhoff decomposition of a character")
    s.add_argument("--locality", action="store_true", help="also check locality of counterterms")
    s = sub.add_parser("beta", parents=[common], help="beta function of a character")
    s.add_argument("--sigma", choices=rgflow.SIGMAS, default="dr")
    s.add_argument("--limit", action="store_true", help="take the z -> 0 limit")
    s = sub.add_parser("rho-check", parents=[common], help="check that the inverse flow recovers a character")
    s.add_argument("--sigma", choices=rgflow.SIGMAS, default="dr")
    s.add_argument("--show-flow", action="store_true", help="print the flow terms")
    s = sub.add_parser("gauge-check", parents=[common], help="check the gauge identities")
    s.add_argument("--dr", help="dimensional-regularisation-type character file")
    s.add_argument("--mc", help="cutoff-type character file")
    s.add_argument("--direction", action="append", choices=DIRECTIONS)
    s = sub.add_parser("equivariance", parents=[common], help="equivariance of the flow connection")
    s.add_argument("--sigma", choices=rgflow.SIGMAS, default="dr")
    s.add_argument("--u", type=_fraction, default=Fraction(2))
    sub.add_parser("toyrules-emit", parents=[common], help="write the bubble characters")
    s = sub.add_parser("selftest", parents=[common], help="run the built-in invariant suite")
    s.add_argument("--inject-fault", choices=("antipode",), help=argparse.SUPPRESS)
    return p


COMMANDS = {
    "graph-check": cmd_graph_check,
    "coproduct": cmd_coproduct,
    "antipode": cmd_antipode,
    "birkhoff": cmd_birkhoff,
    "beta": cmd_beta,
    "rho-check": cmd_rho_check,
    "gauge-check": cmd_gauge_check,
    "equivariance": cmd_equivariance,
    "toyrules-emit": cmd_toyrules_emit,
    "selftest": cmd_selftest,
}


def run(argv: list[str] | None = None, out=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    args.grade_cap_given = args.grade_cap is not None
    if args.grade_cap is None:
        args.grade_cap = 3
    if args.grade_cap < 1 or args.z_order < 1:
        print("error: --grade-cap and --z-order must be at least 1", file=sys.stderr)
        return BAD_INPUT
    ctx = Context(args, out or sys.stdout)
    try:
        return COMMANDS[args.command](ctx)
    except INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return BAD_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
