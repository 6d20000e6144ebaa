"""``caudit`` command line.

Exit codes: 0 the property holds (or the command succeeded), 2 it fails,
1 usage, parse or validation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from caudit import checkers
from caudit.dsl import frame_spec_of, load, parse_proposition, parse_rational, print_model
from caudit.errors import CauditError, NoDisclosure, PreconditionViolated
from caudit.frames import AnalysisFrame, DatabaseFrame
from caudit.impossibility import (
    WITNESS_FOR_EVERY_OUTPUT,
    classify_impossibility,
    disclosure_witness,
    diversity_report,
    realizable_outputs,
)
from caudit.inference import INFINITE, ONE, QueryContext, probability
from caudit.prop import TRUE

EXIT_HOLDS, EXIT_ERROR, EXIT_FAILS = 0, 1, 2

PROPERTIES = ("noninterference", "causal", "assoc", "assoc-x", "dp", "rule80", "lipschitz")
EPS_TERMS = 40


class UsageError(CauditError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# -- bounds --------------------------------------------------------------------


def exp_lower_bound(x: Fraction, terms: int = EPS_TERMS) -> Fraction:
    """Rational lower bound on e^x for x >= 0: a Taylor partial sum, rounded down to 1e-12."""
    if x < 0:
        raise UsageError("--eps must be nonnegative")
    total, term = Fraction(0), Fraction(1)
    for n in range(terms):
        total += term
        term = term * x / (n + 1)
    scale = 10 ** 12
    return max(Fraction(1), Fraction(math.floor(total * scale), scale))


def resolve_bound(args) -> Fraction:
    if args.eps is not None:
        if args.bound is not None:
            raise UsageError("give --bound or --eps, not both")
        if args.eps_mode != "approx":
            raise UsageError("--eps needs --eps-mode approx (bounds are exact rationals k = e^eps)")
        try:
            x = Fraction(args.eps)
        except ValueError:
            raise UsageError(f"--eps must be a decimal or rational, got {args.eps!r}") from None
        return exp_lower_bound(x)
    if args.bound is None:
        return ONE
    k = parse_rational(args.bound)
    if k < 1:
        raise UsageError("--bound must be at least 1")
    return k


def load_metric(path) -> dict[tuple[str, str], Fraction]:
    """Lines ``x y : p/q`` giving k(x, y) = e^d(x, y); ``#`` starts a comment."""
    metric = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lhs, sep, rhs = line.partition(":")
        pair = lhs.split()
        if not sep or len(pair) != 2:
            raise UsageError(f"{path}:{n}: expected 'x y : p/q'")
        metric[(pair[0], pair[1])] = parse_rational(rhs.strip())
    return metric


# -- report documents ----------------------------------------------------------


def epsilon_display(r) -> str:
    if r is INFINITE:
        return "inf"
    r = Fraction(r)
    if r == 1:
        return "0"
    return f"{math.log(r.numerator) - math.log(r.denominator):.6f}"


def measured_text(r) -> str:
    if r is INFINITE:
        return "inf"
    eps = epsilon_display(r)
    return f"{checkers.ratio_text(r)} (ε=0)" if eps == "0" else f"{checkers.ratio_text(r)} (ε≈{eps})"


def _do_args(do) -> str:
    return "".join(f" --do {k}={v}" for k, v in do.items())


def recheck_command(model_path: str, side: checkers.Side) -> str:
    cmd = f"caudit prob {model_path} '{side.event}'"
    if side.given != TRUE:
        cmd += f" --given '{side.given}'"
    return cmd + _do_args(side.do)


def report_document(rep: checkers.PropertyReport, model_path: str) -> dict:
    doc = rep.to_dict()
    doc = {"name": rep.property, "verdict": "holds" if rep.holds else "fails", **doc,
           "epsilon_display": epsilon_display(rep.tightest_ratio)}
    if rep.witness is not None:
        doc["witness"]["recheck"] = [recheck_command(model_path, rep.witness.left),
                                     recheck_command(model_path, rep.witness.right)]
    return doc


def _side_text(side: checkers.Side) -> str:
    cond = []
    if side.do:
        cond.append("do(" + ", ".join(f"{k}={v}" for k, v in side.do.items()) + ")")
    if side.given != TRUE:
        cond.append(str(side.given))
    ctx = f" | {', '.join(cond)}" if cond else ""
    return f"Pr[{side.event}{ctx}] = {checkers.ratio_text(side.probability)}"


def print_report(rep: checkers.PropertyReport, model_path: str, out):
    print(f"property: {rep.property}", file=out)
    print(f"verdict: {'holds' if rep.holds else 'fails'} at bound {checkers.ratio_text(rep.bound)}", file=out)
    print(f"tightest ratio: {measured_text(rep.tightest_ratio)}", file=out)
    print(f"reading: {rep.reading}", file=out)
    w = rep.witness
    if w is not None:
        labels = " ".join(f"{k}=({', '.join(f'{a}={b}' for a, b in v.items())})" if isinstance(v, dict)
                          else f"{k}={v}" for k, v in w.labels.items())
        print(f"witness: {labels}", file=out)
        print(f"  {_side_text(w.left)}", file=out)
        print(f"  {_side_text(w.right)}", file=out)
        print(f"  recheck: {recheck_command(model_path, w.left)}", file=out)
        print(f"           {recheck_command(model_path, w.right)}", file=out)
    for n in rep.notes:
        print(f"note: {n}", file=out)


# -- commands --------------------------------------------------------------------


def _frame(doc):
    return doc.frame()


def run_property(frame, prop: str, bound: Fraction, positive=None, metric_path=None) -> checkers.PropertyReport:
    if prop == "dp":
        if not isinstance(frame, DatabaseFrame):
            raise UsageError("dp needs a model with a dbframe block")
        return checkers.check_differential_privacy(frame, bound)
    if not isinstance(frame, AnalysisFrame):
        raise UsageError(f"{prop} needs a model with a frame block")
    if prop == "noninterference":
        if bound == 1:
            return checkers.check_noninterference(frame)
        return checkers.measure_noninterference(frame, bound)
    if prop == "causal":
        return checkers.check_causal_irrelevance(frame, bound)
    if prop == "assoc":
        return checkers.check_assoc_independence(frame, bound)
    if prop == "assoc-x":
        return checkers.check_assoc_independence_on_X(frame, bound)
    if prop == "rule80":
        if positive is None:
            raise UsageError("rule80 needs --positive VALUE")
        return checkers.check_80_rule(frame, positive)
    if prop == "lipschitz":
        if metric_path is None:
            raise UsageError("lipschitz needs --metric FILE")
        return checkers.check_lipschitz(frame, load_metric(metric_path))
    raise UsageError(f"unknown property {prop!r}")


def cmd_check(args, out) -> int:
    bound = resolve_bound(args)
    rep = run_property(_frame(load(args.model)), args.property, bound, args.positive, args.metric)
    if args.json:
        print(json.dumps(report_document(rep, args.model), indent=2, ensure_ascii=False), file=out)
    else:
        print_report(rep, args.model, out)
    return EXIT_HOLDS if rep.holds else EXIT_FAILS


def cmd_measure(args, out) -> int:
    frame = _frame(load(args.model))
    prop = args.property
    if prop == "noninterference" and isinstance(frame, AnalysisFrame):
        rep = checkers.measure_noninterference(frame)
    else:
        rep = run_property(frame, prop, ONE, args.positive, args.metric)
    if args.json:
        doc = report_document(rep, args.model)
        doc.pop("verdict")
        doc.pop("holds")
        print(json.dumps(doc, indent=2, ensure_ascii=False), file=out)
    else:
        print(measured_text(rep.tightest_ratio), file=out)
    return EXIT_HOLDS


def _verdict_text(v) -> str:
    mass = "-" if v.mass is None else checkers.ratio_text(v.mass)
    return f"{v.status} (mass {mass})"


def cmd_witness(args, out) -> int:
    frame = _frame(load(args.model))
    if not isinstance(frame, AnalysisFrame):
        raise UsageError("witness needs a model with a frame block")
    phi = parse_proposition(args.phi)
    if args.diversity:
        o = args.output or (realizable_outputs(frame) or [None])[0]
        try:
            rec = diversity_report(frame, phi, o)
        except PreconditionViolated as e:
            if args.json:
                print(json.dumps({"diversity_loss": None, "reason": str(e)}, ensure_ascii=False), file=out)
            else:
                print(f"no diversity loss: {e}", file=out)
            return EXIT_FAILS
        if args.json:
            print(json.dumps({"diversity_loss": rec.to_dict()}, indent=2, ensure_ascii=False), file=out)
        else:
            kind = str(phi) if rec.kept_kind else f"!({phi})"
            print(f"subpopulation: {rec.subpopulation}", file=out)
            print(f"  has both kinds of {phi}: {_verdict_text(rec.before)}", file=out)
            print(f"  its {frame.output}={o} part is all {kind}: {_verdict_text(rec.after)}", file=out)
            print(f"the system loses diversity of {phi} in the {frame.output}={o} subpopulation of "
                  f"{rec.subpopulation}", file=out)
        return EXIT_HOLDS

    c = classify_impossibility(frame, phi)
    try:
        w = disclosure_witness(frame, phi)
    except NoDisclosure as e:
        w, why = None, str(e)
    if args.json:
        doc = {"classification": c.to_dict(), "disclosure": w.to_dict() if w else None}
        print(json.dumps(doc, indent=2, ensure_ascii=False), file=out)
        return EXIT_HOLDS
    print(f"case: {c.case}" + (f"({c.output})" if c.output else ""), file=out)
    print(f"phi: {phi}", file=out)
    if c.prior is not None:
        print(f"prior: {_verdict_text(c.prior)}", file=out)
    if c.case == WITNESS_FOR_EVERY_OUTPUT:
        for o, (before, after) in c.verdicts.items():
            print(f"output {o}: context {before.context}", file=out)
            print(f"  before: {_verdict_text(before)}", file=out)
            print(f"  after {frame.output}={o}: {_verdict_text(after)}", file=out)
    for n in c.notes:
        print(f"note: {n}", file=out)
    if w is not None:
        print(f"disclosure: background {w.background}, output {frame.output}={w.output}", file=out)
        print(f"  before: {_verdict_text(w.before)}", file=out)
        print(f"  after: {_verdict_text(w.after)}", file=out)
    else:
        print(f"no disclosure: {why}", file=out)
    return EXIT_HOLDS


def cmd_theorems(args, out) -> int:
    from caudit.harness import default_grid, full_grid, run_campaign, split_trials

    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    grid = (default_grid if args.grid == "default" else full_grid)(args.seed)
    report = run_campaign(grid, split_trials(args.trials, len(grid)), jobs=args.jobs)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2), file=out)
    else:
        print(report.to_text(), file=out)
    return EXIT_HOLDS if report.ok else EXIT_FAILS


def _parse_do(items) -> dict[str, str]:
    do = {}
    for item in items or []:
        var, sep, val = item.partition("=")
        if not sep or not var or not val:
            raise UsageError(f"--do expects VAR=value, got {item!r}")
        do[var] = val
    return do


def cmd_prob(args, out) -> int:
    doc = load(args.model)
    given = parse_proposition(args.given) if args.given else TRUE
    p = probability(doc.pm, QueryContext.of(_parse_do(args.do), given), parse_proposition(args.event))
    text = checkers.ratio_text(p)
    print(json.dumps({"probability": text}) if args.json else text, file=out)
    return EXIT_HOLDS


def export_corpus(directory) -> list[Path]:
    from caudit.mechlib import FIXTURES

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    expected = {}
    for name, spec in FIXTURES.items():
        f = spec.build()
        path = d / f"{name}.scm"
        header = f"# {spec.description}\n" if spec.description else ""
        path.write_text(header + print_model(f.pm, frame_spec_of(f)), encoding="utf-8")
        written.append(path)
        expected[path.name] = {"property": spec.property, "tightest_ratio": checkers.ratio_text(spec.nominal),
                               **({"positive": spec.positive} if spec.positive else {})}
    for k in (2, 3):
        p = d / f"rr_metric_{k}.metric"
        p.write_text(f"# exponentiated metric k(x, y) = {k} between distinct bits\n0 1 : {k}\n", encoding="utf-8")
        written.append(p)
    p = d / "EXPECTED.json"
    p.write_text(json.dumps(expected, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    written.append(p)
    return written


def cmd_export(args, out) -> int:
    for p in export_corpus(args.directory):
        print(p, file=out)
    return EXIT_HOLDS


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="caudit", description="Exact privacy and nondiscrimination checks for finite causal models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def bound_opts(sp):
        sp.add_argument("--bound", help="ratio bound k = e^eps as p/q (default 1)")
        sp.add_argument("--eps", help="epsilon; converted to a rational lower bound on e^eps")
        sp.add_argument("--eps-mode", choices=["approx"], help="required with --eps")

    def prop_opts(sp):
        sp.add_argument("model")
        sp.add_argument("property", choices=PROPERTIES)
        sp.add_argument("--positive", help="positive outcome for rule80")
        sp.add_argument("--metric", help="metric file for lipschitz (lines 'x y : p/q')")
        sp.add_argument("--json", action="store_true")

    c = sub.add_parser("check", help="decide a property at a bound")
    prop_opts(c)
    bound_opts(c)
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("measure", help="print the tightest ratio a frame satisfies")
    prop_opts(m)
    m.set_defaults(func=cmd_measure)

    w = sub.add_parser("witness", help="classify a proposition and build a disclosure witness")
    w.add_argument("model")
    w.add_argument("phi")
    w.add_argument("--diversity", action="store_true", help="nondiscrimination reading (diversity loss)")
    w.add_argument("--output", help="output value for --diversity (default: first realizable)")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_witness)

    t = sub.add_parser("theorems", help="run a seeded theorem campaign")
    t.add_argument("--trials", type=int, default=1000, help="total trials, spread over the config grid")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--grid", choices=["default", "full"], default="default")
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_theorems)

    q = sub.add_parser("prob", help="exact probability query")
    q.add_argument("model")
    q.add_argument("event")
    q.add_argument("--given")
    q.add_argument("--do", action="append", metavar="VAR=value")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_prob)

    e = sub.add_parser("export-corpus", help="write the fixture models as files")
    e.add_argument("directory")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (CauditError, OSError) as e:
        print(f"caudit: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
