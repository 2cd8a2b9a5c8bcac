"""Command line front end.

Subcommands: ``classify``, ``bound``, ``verdict``, ``run``, ``demo``,
``sweep``.  Human-readable tables go to standard output; ``--json PATH``
additionally writes a machine-readable document.  Exit codes: 0 on success,
2 on parse or usage errors, 3 when ``verdict`` finds a conversion impossible,
1 on other domain errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .convert import (
    IMPOSSIBLE,
    catalysis_verdict,
    default_rank_probe,
    splitting_bound,
)
from .errors import LoccSimError, ParseError, SemanticError
from .invariants import ProbeConfig, slocc_class
from .prebuilt import (
    bipartite_catalysis_pair,
    ghz_to_epr,
    intro_teleport,
    prop3,
    prop3_input,
    prop3_target,
    tripartite_catalysis_pair,
)
from .protocol import run_protocol
from .protofile import parse_protocol_file
from .states import load_state, schmidt, state_to_dict

OPTIMALITY_TOL = 1e-9


def _number(text: str) -> float:
    """Exact fraction or decimal, converted to float at the last step."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _prob(p: float) -> str:
    return f"{p:.12f}"


def _jprob(p: float) -> float:
    return float(f"{p:.12g}")


def _emit(args, doc: dict) -> None:
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def _leaf_rows(result) -> list[tuple[str, float, str]]:
    return [(leaf.record, leaf.prob, leaf.status) for leaf in result.leaves()]


def _print_branches(result) -> None:
    print("outcome  probability     status")
    for record, prob, status in _leaf_rows(result):
        print(f"{record:<8} {_prob(prob)}  {status}")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_classify(args) -> int:
    s = load_state(args.state)
    info = slocc_class(s)
    print(f"state: {s.fingerprint()}")
    print(f"class: {info.label}")
    ranks = " ".join(f"{p}={r}" for p, r in zip(info.parties, info.ranks))
    print(f"flattening ranks: {ranks}")
    print(f"three-tangle: {_prob(info.tangle)}")
    _emit(args, {"state": state_to_dict(s), **info.to_dict()})
    return 0


def _cmd_bound(args) -> int:
    src = load_state(args.source)
    dst = load_state(args.target)
    b = splitting_bound(src, dst, source_id=args.source, target_id=args.target)
    for cut, p in sorted(b.per_cut.items()):
        print(f"cut {cut:<8} P = {_prob(p)}")
    print(f"bound: {_prob(b.bound)}")
    _emit(args, b.to_dict())
    return 0


def _cmd_verdict(args) -> int:
    src = load_state(args.source)
    dst = load_state(args.target)
    probe = default_rank_probe(ProbeConfig(seed=args.seed))
    v = catalysis_verdict(src, dst, rank_probe=probe)
    _print_verdict(v)
    _emit(args, v.to_dict())
    return 3 if v.feasible == IMPOSSIBLE else 0


def _print_verdict(v) -> None:
    for party, rs, rt in v.party_ranks:
        print(f"rank({party}): source {rs}, target {rt}")
    if v.product_term_obstruction is not None:
        o = v.product_term_obstruction
        tag = " (heuristic)" if o.heuristic else ""
        print(f"product terms: source {o.source_terms}, target {o.target_terms}{tag}")
    for note in v.notes:
        print(f"note: {note}")
    print(f"verdict: {v.feasible}")


def _cmd_run(args) -> int:
    with open(args.protocol) as fh:
        text = fh.read()
    state, proto = parse_protocol_file(text, name=args.protocol)
    result = run_protocol(state, proto)
    _print_branches(result)
    print(f"success probability: {_prob(result.success_probability)}")
    _emit(
        args,
        {
            "protocol": proto.name,
            "success_probability": _jprob(result.success_probability),
            "tree": result.root.to_dict(),
        },
    )
    return 0


def _run_and_report(prepared, doc: dict, args) -> float:
    result = run_protocol(prepared.state, prepared.protocol)
    _print_branches(result)
    print(f"success probability: {_prob(result.success_probability)}")
    doc["success_probability"] = _jprob(result.success_probability)
    doc["tree"] = result.root.to_dict()
    return result.success_probability


def _demo_prop3(args) -> int:
    a = args.value if args.value is not None else 0.4
    prepared = prop3(a, args.placement)
    doc: dict = {"demo": "prop3", "a": a, "placement": args.placement}
    p = _run_and_report(prepared, doc, args)
    b = splitting_bound(
        prop3_input(a, args.placement),
        prop3_target(args.placement),
        source_id=f"prop3 input a={a}",
        target_id="prop3 target",
    )
    for cut, val in sorted(b.per_cut.items()):
        print(f"cut {cut:<8} P = {_prob(val)}")
    print(f"bound: {_prob(b.bound)}")
    achieved = abs(p - b.bound) <= OPTIMALITY_TOL
    print(f"optimal: {'achieved' if achieved else 'NOT matched'}")
    doc["bound"] = b.to_dict()
    doc["optimal"] = achieved
    _emit(args, doc)
    return 0


def _demo_prop1(args) -> int:
    src, dst = bipartite_catalysis_pair()
    probe = default_rank_probe(ProbeConfig(seed=args.seed))
    v = catalysis_verdict(src, dst, rank_probe=probe)
    _print_verdict(v)
    _emit(args, {"demo": "prop1", **v.to_dict()})
    return 0


def _demo_prop2(args) -> int:
    catalyst = args.value if args.value is not None else "w"
    if catalyst not in ("w", "ghz"):
        print(f"error: demo prop2 takes catalyst w or ghz, got {catalyst!r}", file=sys.stderr)
        return 2
    src, dst = tripartite_catalysis_pair(catalyst)
    probe = default_rank_probe(ProbeConfig(seed=args.seed))
    v = catalysis_verdict(src, dst, rank_probe=probe)
    print(f"catalyst: {catalyst}")
    _print_verdict(v)
    _emit(args, {"demo": "prop2", "catalyst": catalyst, **v.to_dict()})
    return 0


def _demo_intro(args) -> int:
    prepared = intro_teleport()
    doc: dict = {"demo": "intro"}
    _run_and_report(prepared, doc, args)
    _emit(args, doc)
    return 0


def _demo_ghz2epr(args) -> int:
    prepared = ghz_to_epr()
    result = run_protocol(prepared.state, prepared.protocol)
    _print_branches(result)
    print(f"success probability: {_prob(result.success_probability)}")
    spectra = {}
    for leaf in result.leaves():
        coeffs = schmidt(leaf.state, ["B"]).coeffs
        spectra[leaf.record] = [_jprob(x) for x in coeffs]
        pretty = ", ".join(_prob(x) for x in coeffs)
        print(f"outcome {leaf.record}: pair spectrum {{{pretty}}}")
    _emit(
        args,
        {
            "demo": "ghz2epr",
            "success_probability": _jprob(result.success_probability),
            "spectra": spectra,
            "tree": result.root.to_dict(),
        },
    )
    return 0


_DEMOS = {
    "prop1": _demo_prop1,
    "prop2": _demo_prop2,
    "prop3": _demo_prop3,
    "intro": _demo_intro,
    "ghz2epr": _demo_ghz2epr,
}


def _cmd_demo(args) -> int:
    if args.which == "prop3" and args.value is None:
        print("error: demo prop3 needs the weight parameter, e.g. demo prop3 0.4", file=sys.stderr)
        return 2
    return _DEMOS[args.which](args)


def _cmd_sweep(args) -> int:
    if args.family != "prop3":
        print(f"error: unknown sweep family {args.family!r}", file=sys.stderr)
        return 2
    grid = np.linspace(args.start, args.stop, args.points)
    rows = []
    print("a               engine          closed form 2a  bound")
    for a in grid:
        a = float(a)
        prepared = prop3(a, args.placement)
        p = run_protocol(prepared.state, prepared.protocol).success_probability
        b = splitting_bound(prop3_input(a, args.placement), prop3_target(args.placement))
        print(f"{_prob(a)}  {_prob(p)}  {_prob(2 * a)}  {_prob(b.bound)}")
        rows.append(
            {"a": _jprob(a), "engine": _jprob(p), "closed_form": _jprob(2 * a), "bound": _jprob(b.bound)}
        )
    _emit(args, {"sweep": "prop3", "placement": args.placement, "rows": rows})
    return 0


# ---------------------------------------------------------------------------
# wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loccsim",
        description="Local transformations of few-qubit entangled states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", metavar="PATH", help="also write a JSON report")
        p.add_argument(
            "--seed",
            type=int,
            default=ProbeConfig().seed,
            help="seed for the randomized rank probes",
        )

    p = sub.add_parser("classify", help="SLOCC class of a saved state")
    p.add_argument("state", help="state JSON file")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("bound", help="bipartite-splitting conversion bound")
    p.add_argument("source", help="source state JSON file")
    p.add_argument("target", help="target state JSON file")
    common(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("verdict", help="catalysis feasibility verdict")
    p.add_argument("source", help="source state JSON file")
    p.add_argument("target", help="target state JSON file")
    common(p)
    p.set_defaults(func=_cmd_verdict)

    p = sub.add_parser("run", help="run a protocol file")
    p.add_argument("protocol", help="protocol text file")
    common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("demo", help="bundled reproductions")
    p.add_argument("which", choices=sorted(_DEMOS))
    p.add_argument(
        "value",
        nargs="?",
        default=None,
        help="prop3: weight parameter (fractions allowed); prop2: catalyst w|ghz",
    )
    p.add_argument("--placement", choices=["BC", "AC"], default="BC")
    common(p)
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("sweep", help="tabulate a protocol family over a parameter grid")
    p.add_argument("family", help="only prop3 is available")
    p.add_argument("--from", dest="start", type=_number, required=True)
    p.add_argument("--to", dest="stop", type=_number, required=True)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--placement", choices=["BC", "AC"], default="BC")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "value", None) is not None and args.command == "demo" and args.which == "prop3":
        try:
            args.value = float(Fraction(args.value))
        except (ValueError, ZeroDivisionError):
            print(f"error: not a number: {args.value!r}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except (ParseError, SemanticError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LoccSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
