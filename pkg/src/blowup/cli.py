"""Command line: ``blowup <command> --spec NAME|FILE ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import algebra, verify
from .errors import BlowupError
from .io import PRESETS, load_spec, report_dict, write_report, write_tiles
from .render import RenderStyle, render_svg
from .symbolic import format_word, omega_level, parse_word
from .tiling import canonical_tiling, patch, pi_prefix


def _tiling_from_args(args, spec):
    if args.theta is not None:
        return pi_prefix(spec.pv.validate(parse_word(args.theta)), spec)
    return canonical_tiling(args.level, spec)


def _add_spec(p):
    p.add_argument("--spec", default="goldenb", help=f"preset ({', '.join(PRESETS)}) or JSON file")


def _add_target(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--level", type=int, help="canonical tiling T_k")
    g.add_argument("--theta", help="finite word, pi(theta)")


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="\n")


def cmd_omega(args) -> int:
    spec = load_spec(args.spec)
    for w in omega_level(args.k, spec.pv):
        print(format_word(w))
    return 0


def cmd_tiles(args) -> int:
    spec = load_spec(args.spec)
    tiling = _tiling_from_args(args, spec)
    out = _open_out(args.out)
    try:
        write_tiles(tiling, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_render(args) -> int:
    spec = load_spec(args.spec)
    tiling = _tiling_from_args(args, spec)
    style = RenderStyle(width=args.width, color_by=args.color_by, labels=args.labels)
    text = render_svg(tiling, style)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    return 0


def cmd_addresses(args) -> int:
    spec = load_spec(args.spec)
    tiling = _tiling_from_args(args, spec)
    print("index\taddress\tproto")
    for j, addr in enumerate(tiling.addresses):
        print(f"{j}\t{addr}\t{int(tiling.powers[j])}")
    return 0


def _check_nonoverlap(spec, tiling):
    rep = verify.nonoverlap_check(tiling)
    return {
        "name": "nonoverlap",
        "pass": rep.ok,
        "metrics": {
            "tiles": len(tiling),
            "max_overlap": rep.max_overlap,
            "worst_pair": rep.worst_pair,
            "threshold": rep.threshold,
            "authoritative": rep.authoritative,
        },
    }


def _check_selfsim(spec):
    results = []
    n = spec.n
    cases = [((), (1, 2)), ((1,), (2,))] if n >= 2 else []
    for alpha, beta in cases:
        rep = verify.self_similarity_check(alpha, beta, spec)
        results.append({
            "name": f"selfsim[{format_word(alpha) or 'empty'}|{format_word(beta)}]",
            "pass": rep.ok,
            "metrics": {"tiles": len(rep.decomposition), "failures": rep.failures, "prefix_length": rep.prefix_length},
        })
    return results


def _check_quasi(spec):
    host = canonical_tiling(4 + 2 * spec.a_max, spec)
    source = canonical_tiling(4, spec)
    centre = source.centroids.mean(axis=0)
    p = patch(source, centre, 0.25 * source.diameter)
    rep = verify.quasiperiodicity_probe(p, host)
    return {
        "name": "quasiperiodicity",
        "pass": rep.ok,
        "metrics": {"patch_tiles": len(p), "copies": len(rep.copies), "covering_radius": rep.covering_radius},
    }


def _check_inject(spec):
    rep = verify.injectivity_precondition(spec)
    return {"name": "injectivity_precondition", "pass": rep.ok, "metrics": {"pairs": rep.pairs, "note": rep.note}}


def cmd_verify(args) -> int:
    spec = load_spec(args.spec)
    picked = {k for k in ("nonoverlap", "selfsim", "quasi", "inject") if getattr(args, k)}
    if args.all or not picked:
        picked = {"nonoverlap", "selfsim", "quasi", "inject"}
    checks = []
    if "nonoverlap" in picked:
        target = _tiling_from_args(args, spec) if (args.level is not None or args.theta is not None) else canonical_tiling(8, spec)
        checks.append(_check_nonoverlap(spec, target))
    if "selfsim" in picked:
        checks.extend(_check_selfsim(spec))
    if "quasi" in picked:
        checks.append(_check_quasi(spec))
    if "inject" in picked:
        checks.append(_check_inject(spec))
    report = report_dict(spec.name, checks)
    for c in checks:
        verdict = {True: "PASS", False: "FAIL", None: "INCONCLUSIVE"}[c["pass"]]
        print(f"{verdict} {c['name']}")
    if args.report:
        write_report(report, args.report)
    return 1 if any(c["pass"] is False for c in checks) else 0


def cmd_rigidity(args) -> int:
    spec = load_spec(args.spec)
    check = algebra.strong_rigidity_check if args.strong else algebra.rigidity_check
    rep = check(spec)
    label = "strong rigidity" if args.strong else "rigidity"
    print(f"{label}: {rep.verdict}")
    if rep.reason:
        print(f"reason: {rep.reason}")
    if rep.witness is not None:
        w = rep.witness
        print(f"witness: matrix={w.ortho.ravel().tolist()} translation={w.trans.tolist()}")
    print(f"candidates checked: {rep.candidates_checked}")
    return 0 if rep.rigid else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blowup", description="Tilings of fractal blow-ups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("omega", help="list the words of Omega_k")
    _add_spec(p)
    p.add_argument("-k", type=int, required=True)
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("tiles", help="tile records as newline-delimited JSON")
    _add_spec(p)
    _add_target(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tiles)

    p = sub.add_parser("render", help="SVG picture of a tiling")
    _add_spec(p)
    _add_target(p)
    p.add_argument("--out")
    p.add_argument("--labels", action="store_true")
    p.add_argument("--color-by", choices=("proto", "depth"), default="proto")
    p.add_argument("--width", type=int, default=800)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("addresses", help="table of tile addresses")
    _add_spec(p)
    _add_target(p)
    p.set_defaults(func=cmd_addresses)

    p = sub.add_parser("verify", help="run verification checks")
    _add_spec(p)
    _add_target(p, required=False)
    for name in ("all", "nonoverlap", "selfsim", "quasi", "inject"):
        p.add_argument(f"--{name}", action="store_true")
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rigidity", help="rigidity search")
    _add_spec(p)
    p.add_argument("--strong", action="store_true")
    p.set_defaults(func=cmd_rigidity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BlowupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
