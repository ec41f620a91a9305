"""``grcob`` command line.

Exit status: 0 on success, 1 when violations or failed checks are reported,
2 on malformed input.  ``GRCOB_SEED`` overrides ``--seed``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import collapse_spine as cs
from .det_coeff import homology_bases, xi_compose_sign, xi_object
from .exact_linalg import IntMatrix
from .frobenius_eval import InvalidAlgebra, evaluate, load_algebra
from .gr_cat import SourceTargetMismatch, compose, homotopy_invariants, tensor
from .graph_core import Gaf, InvalidGaf, MarkedGaf, euler_char_rel, gaf_from_dict, gaf_to_dict, validate
from .pool import Bounds, pool_generate
from .suites import SUITES, run_suite


class InputError(Exception):
    """Malformed input; reported with exit status 2."""


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _load_gaf(path: str, *, check: bool = True) -> Gaf | MarkedGaf:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    try:
        g = gaf_from_dict(data)
    except InvalidGaf as exc:
        raise InputError(f"{path}: {exc}") from exc
    if check:
        bad = validate(g)
        if bad:
            raise InputError(f"{path}: invalid gaf: " + "; ".join(map(str, bad)))
    return g


def _marked(g: Gaf | MarkedGaf) -> MarkedGaf:
    return g if isinstance(g, MarkedGaf) else MarkedGaf(g, ())


def _matrix(m: IntMatrix) -> list[list[int]]:
    return m.to_lists()


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class _Out:
    def __init__(self, args):
        self.json = args.json or getattr(args, "json_global", False)
        self.path = getattr(args, "output", None)

    def emit(self, payload: Any, text: str) -> None:
        body = json.dumps(payload, indent=2, sort_keys=True) if self.json else text
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(body + "\n")
        else:
            print(body)


def _emit_gaf(out: _Out, g: Gaf | MarkedGaf) -> None:
    d = gaf_to_dict(g)
    text = json.dumps(d, indent=2)
    out.json = True if out.path else out.json
    out.emit(d, text)


# -- subcommands -----------------------------------------------------------------


def cmd_validate(args, out: _Out) -> int:
    g = _load_gaf(args.file, check=False)
    bad = validate(g)
    out.emit({"valid": not bad, "violations": [str(v) for v in bad]}, "\n".join(map(str, bad)) or "valid")
    return 1 if bad else 0


def cmd_compose(args, out: _Out) -> int:
    g, h = _marked(_load_gaf(args.g)), _marked(_load_gaf(args.h))
    _emit_gaf(out, compose(g, h))
    return 0


def cmd_tensor(args, out: _Out) -> int:
    g, h = _marked(_load_gaf(args.g)), _marked(_load_gaf(args.h))
    _emit_gaf(out, tensor(g, h))
    return 0


def cmd_chi(args, out: _Out) -> int:
    chi = euler_char_rel(_load_gaf(args.file))
    out.emit({"chi": chi}, str(chi))
    return 0


def cmd_invariants(args, out: _Out) -> int:
    g = _marked(_load_gaf(args.file))
    inv = homotopy_invariants(g)
    payload: dict[str, Any] = {"invariants": inv}
    lines = [json.dumps(inv, sort_keys=True)]
    if args.compare:
        h = _marked(_load_gaf(args.compare))
        same = homotopy_invariants(h) == inv
        zig = same and cs.zigzag_equivalent(g, h, args.zigzag_depth)
        verdict = "equivalent" if zig else ("distinct" if not same else "unknown")
        payload["compare"] = {"invariants_equal": same, "zigzag_depth": args.zigzag_depth, "verdict": verdict}
        lines.append(f"compare: {verdict}")
    out.emit(payload, "\n".join(lines))
    return 0


def cmd_xi(args, out: _Out) -> int:
    g = _load_gaf(args.file)
    obj = xi_object(g, args.d)
    hb = homology_bases(g)
    gaf = g.gaf if isinstance(g, MarkedGaf) else g
    payload: dict[str, Any] = {
        "degree": obj.degree,
        "d": args.d,
        "h0_basis": list(hb.reps),
        "h1_basis": [[list(gaf.edge_list[k]) for k, c in enumerate(z) if c] for z in hb.cycles],
        "h1_matrix": _matrix(obj.h1_basis),
    }
    lines = [f"degree {obj.degree}", f"H0 basis {list(hb.reps)}", f"H1 basis {[list(z) for z in hb.cycles]}"]
    if args.compose:
        h = _marked(_load_gaf(args.compose))
        s = xi_compose_sign(_marked(g), h, args.d)
        payload["compose_sign"] = s
        lines.append(f"compose sign {s:+d}")
    out.emit(payload, "\n".join(lines))
    return 0


def cmd_reduce(args, out: _Out) -> int:
    _emit_gaf(out, cs.reduce(_marked(_load_gaf(args.file))))
    return 0


def cmd_minimize(args, out: _Out) -> int:
    g, _ = cs.minimize(_load_gaf(args.file))
    _emit_gaf(out, g)
    return 0


def cmd_spine(args, out: _Out) -> int:
    if args.complex or args.homology:
        c = cs.spine_chain_complex(args.n, args.d, experimental=args.experimental)
        if args.complex:
            payload = c.to_dict()
            text = json.dumps(payload, sort_keys=True)
        else:
            betti = c.betti()
            payload = {"n": args.n, "d": args.d, "betti": betti}
            text = " ".join(map(str, betti))
        out.emit(payload, text)
        return 0
    objs = cs.enumerate_spine_objects(args.n)
    out.emit(
        {"n": args.n, "count": len(objs), "objects": [gaf_to_dict(g) for g in objs]},
        "\n".join(f"{len(g.vertices)}v {len(g.edge_list)}e {[list(g.endpoints(k)) for k in range(len(g.edge_list))]}" for g in objs),
    )
    return 0


def cmd_eval(args, out: _Out) -> int:
    g = _marked(_load_gaf(args.file))
    try:
        alg = load_algebra(args.algebra)
    except (OSError, json.JSONDecodeError, InvalidAlgebra, KeyError, ValueError) as exc:
        raise InputError(f"algebra {args.algebra}: {exc}") from exc
    m = evaluate(g, alg)
    names = alg.names
    entries = [
        {"out": [names[i] for i in o], "in": [names[i] for i in i_], "coeff": _frac(c)}
        for (o, i_), c in sorted(m.entries.items(), key=lambda kv: (kv[0][1], kv[0][0]))
    ]
    payload = {"algebra": alg.label, "source": m.source, "target": m.target, "degree": m.degree, "entries": entries}
    lines = [f"degree {m.degree}"]
    for e in entries:
        lines.append(f"{'(x)'.join(e['in']) or '1'} -> {e['coeff']} {'(x)'.join(e['out']) or '1'}")
    out.emit(payload, "\n".join(lines))
    return 0


def cmd_check(args, out: _Out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(name, args.seed, args.n) for name in names]
    payload = [{"suite": r.name, "checked": r.checked, "failures": r.failures} for r in results]
    lines = [r.summary() for r in results] + [f"  {f}" for r in results for f in r.failures]
    out.emit(payload, "\n".join(lines))
    return 0 if all(r.ok for r in results) else 1


def cmd_pool(args, out: _Out) -> int:
    if min(args.v_max, args.e_max, args.a_max, args.b_max) < 0 or args.size < 0:
        raise InputError("bounds must be non-negative")
    p = pool_generate(args.seed, args.size, Bounds(args.v_max, args.e_max, args.a_max, args.b_max))
    text = p.dumps()
    if out.path:
        with open(out.path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-o", "--output", help="write output to this file")

    p = argparse.ArgumentParser(prog="grcob", description="Graph cobordism workbench.")
    p.add_argument("--json", dest="json_global", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="list invariant violations")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    for name, fn, helptext in (("compose", cmd_compose, "g o h"), ("tensor", cmd_tensor, "disjoint union")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("g")
        s.add_argument("h")
        s.set_defaults(fn=fn)

    s = sub.add_parser("chi", parents=[common], help="relative Euler characteristic")
    s.add_argument("file")
    s.set_defaults(fn=cmd_chi)

    s = sub.add_parser("invariants", parents=[common], help="homotopy invariants")
    s.add_argument("file")
    s.add_argument("--compare", help="second morphism to compare against")
    s.add_argument("--zigzag-depth", type=int, default=2)
    s.set_defaults(fn=cmd_invariants)

    s = sub.add_parser("xi", parents=[common], help="determinant line data")
    s.add_argument("file")
    s.add_argument("-d", type=int, default=1)
    s.add_argument("--compose", help="h.json; print the composition sign of file o h")
    s.set_defaults(fn=cmd_xi)

    for name, fn in (("reduce", cmd_reduce), ("minimize", cmd_minimize)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("file")
        s.set_defaults(fn=fn)

    s = sub.add_parser("spine", parents=[common], help="spine objects and twisted homology")
    s.add_argument("-n", type=int, required=True)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--list", action="store_true")
    mode.add_argument("--complex", action="store_true")
    mode.add_argument("--homology", action="store_true")
    s.add_argument("-d", type=int, default=0)
    s.add_argument("--experimental", action="store_true", help="allow rank 4 complexes")
    s.set_defaults(fn=cmd_spine)

    s = sub.add_parser("eval", parents=[common], help="evaluate in a Frobenius algebra")
    s.add_argument("file")
    s.add_argument("--algebra", default="S2", help="bundled name (S2, T2, CP2, QX2) or JSON path")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("check", parents=[common], help="run a seeded property suite")
    s.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=100)
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("pool", parents=[common], help="dump a seeded random pool")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=int, default=10)
    s.add_argument("--v-max", type=int, default=2)
    s.add_argument("--e-max", type=int, default=3)
    s.add_argument("--a-max", type=int, default=2)
    s.add_argument("--b-max", type=int, default=2)
    s.set_defaults(fn=cmd_pool)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    env_seed = os.environ.get("GRCOB_SEED")
    if env_seed is not None and hasattr(args, "seed"):
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"grcob: GRCOB_SEED is not an integer: {env_seed!r}", file=sys.stderr)
            return 2
    out = _Out(args)
    try:
        return args.fn(args, out)
    except (InputError, SourceTargetMismatch, InvalidGaf) as exc:
        print(f"grcob: {exc}", file=sys.stderr)
        return 2
    except (cs.NotAForest, cs.TwoAttachPointsInOneTree, cs.DegenerateCircle, cs.RankTooLarge) as exc:
        print(f"grcob: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
