"""``homcirc`` command-line entry point.

Every command builds one JSON-serialisable payload; ``--format json`` prints
it as is and ``--format text`` flattens the same payload into ``key: value``
lines, so both formats always carry identical numbers.

Exit codes: 0 success, 1 infeasible (solve) or not homologous (check),
2 input or usage errors, 3 internal invariant failures.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .dual import build_dual, face_id
from .embedding import is_circulation
from .errors import (
    BadParams,
    BipartiteInput,
    BoxTooLarge,
    GenusCapExceeded,
    HomcircError,
    InternalInconsistency,
    InvalidInput,
    InvalidInstance,
)
from .homology import Surface, check_homologous, homology_basis, homology_witness
from .instances.families import FAMILIES, gen_family
from .instances.io import (
    VERSION,
    circulation_to_json,
    dumps_canonical,
    format_rational,
    instance_to_json,
    read_circulation,
    read_instance,
    write_instance,
)
from .instances.sat import parse_dimacs, sat_to_circulation
from .linalg import det
from .oracle import EtaBox, oracle_enumerate_class, oracle_homologous, oracle_solve
from .solver import DEFAULT_GENUS_CAP, OPTIMAL, solve

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def surface_name(genus: int, orientable: bool) -> str:
    if orientable:
        return {0: "sphere", 2: "torus"}.get(genus, f"orientable surface of Euler genus {genus}")
    return {1: "projective plane", 2: "Klein bottle"}.get(genus, f"non-orientable surface of Euler genus {genus}")


def _faces_json(vec):
    return {face_id(f): int(v) for f, v in enumerate(vec)}


def _walk_json(G, W):
    return W.describe(G)


# -- commands ----------------------------------------------------------------------


def cmd_info(args):
    inst = read_instance(args.instance)
    S = Surface.of(inst.graph)
    G = inst.graph
    return {
        "command": "info",
        "nodes": G.n_nodes,
        "arcs": G.n_arcs,
        "faces": S.n_faces,
        "euler_genus": S.genus,
        "orientable": S.orientable,
        "surface": surface_name(S.genus, S.orientable),
        "y_is_circulation": is_circulation(G, inst.y),
        "total_cost": format_rational(sum(G.cost, Fraction(0))),
    }, EXIT_OK


def cmd_faces(args):
    inst = read_instance(args.instance)
    S = Surface.of(inst.graph)
    faces = [
        {"id": face_id(f), "length": len(W), "walk": _walk_json(inst.graph, W)}
        for f, W in enumerate(S.faces.walks)
    ]
    return {"command": "faces", "count": len(faces), "faces": faces}, EXIT_OK


def cmd_dual(args):
    inst = read_instance(args.instance)
    D = build_dual(inst.graph).instance
    obj = instance_to_json(D)
    if args.output:
        Path(args.output).write_text(dumps_canonical(obj), encoding="utf-8")
        return {"command": "dual", "output": str(args.output), "nodes": D.n_nodes, "arcs": D.n_arcs}, EXIT_OK
    return obj, EXIT_OK


def cmd_basis(args):
    inst = read_instance(args.instance)
    G = inst.graph
    S = Surface.of(G)
    B = homology_basis(S, args.seed)
    D = S.dual.instance
    out = {"command": "basis", "euler_genus": S.genus, "orientable": S.orientable}
    if S.orientable:
        out["generators"] = [G.arc_ids[a] for a in B.generators]
        out["cycles"] = [
            {"walk": _walk_json(D, C), "vector": circulation_to_json(G, v)}
            for C, v in zip(B.cycles, B.vectors)
        ]
    else:
        out["one_sided_cycle"] = {
            "walk": _walk_json(D, B.one_sided_cycle),
            "faces": [face_id(f) for f in B.cycle_faces],
            "determinant": format_rational(det(B.cycle_block(S.boundary))),
        }
        out["extra_arcs"] = [G.arc_ids[a] for a in B.extra_arcs]
        out["walks"] = [
            {"walk": _walk_json(D, W), "vector": circulation_to_json(G, v)}
            for W, v in zip(B.walks, B.vectors)
        ]
        out["parity_arcs"] = [G.arc_ids[a] for a, h in enumerate(B.parity) if h]
    return out, EXIT_OK


def cmd_check(args):
    inst = read_instance(args.instance)
    G = inst.graph
    x = read_circulation(args.x, G)
    y = read_circulation(args.y, G)
    S = Surface.of(G)
    for name, v in (("x", x), ("y", y)):
        if not is_circulation(G, v):
            raise InvalidInput(f"{name} is not a circulation")
    B = homology_basis(S, args.seed)
    ok = check_homologous(x, y, B, S)
    out = {"command": "check", "homologous": ok}
    if args.witness:
        eta = homology_witness(x, y, B, S) if ok else None
        out["eta"] = _faces_json(eta) if eta is not None else None
    return out, EXIT_OK if ok else EXIT_FALSE


def cmd_solve(args):
    inst = read_instance(args.instance)
    res = solve(
        inst.graph,
        inst.y,
        witness=args.witness,
        tube_radius=args.tube_radius,
        genus_cap=args.genus_cap,
        threads=args.threads,
        seed=args.seed,
    )
    out = {
        "command": "solve",
        "status": res.status,
        "objective": format_rational(res.objective) if res.objective is not None else None,
        "x": circulation_to_json(inst.graph, res.x) if res.x is not None else None,
        "stats": res.stats,
    }
    if args.witness:
        out["eta"] = _faces_json(res.witness) if res.witness is not None else None
    return out, EXIT_OK if res.status == OPTIMAL else EXIT_FALSE


def cmd_oracle(args):
    inst = read_instance(args.instance)
    G = inst.graph
    S = Surface.of(G)
    box = EtaBox(args.box, S.n_faces)
    out = {"command": "oracle", "box": args.box}
    if args.check:
        x = read_circulation(args.check[0], G)
        y = read_circulation(args.check[1], G)
        r = oracle_homologous(x, y, S, box)
        out.update(mode="check", verdict=r.verdict, refuted=r.refuted,
                   eta=_faces_json(r.eta) if r.eta is not None else None)
        return out, EXIT_OK if r.verdict == "Yes" else EXIT_FALSE
    if args.solve:
        r = oracle_solve(inst.y, S, box)
        out.update(
            mode="solve",
            status=r.status,
            objective=format_rational(r.objective) if r.objective is not None else None,
            x=circulation_to_json(G, r.x) if r.x is not None else None,
            eta=_faces_json(r.eta) if r.eta is not None else None,
            conclusive=r.conclusive,
            lp_feasible=r.lp_feasible,
        )
        return out, EXIT_OK if r.status == "Optimal" else EXIT_FALSE
    members = oracle_enumerate_class(inst.y, S, box)
    out.update(mode="class", size=len(members), circulations=[circulation_to_json(G, m) for m in members])
    return out, EXIT_OK


def _family_params(pairs):
    params = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise BadParams(f"family parameter {item!r} is not key=value")
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                raise BadParams(f"parameter {key} needs a number") from None
    return params


def cmd_gen(args):
    out = {"command": "gen", "family": args.family, "output": str(args.output)}
    if args.family == "sat":
        if not args.cnf:
            raise BadParams("gen sat needs --cnf FILE")
        try:
            text = Path(args.cnf).read_text(encoding="utf-8")
        except OSError as exc:
            raise BadParams(f"cannot read {args.cnf}: {exc.strerror}") from None
        ci = sat_to_circulation(parse_dimacs(text), seed=args.seed or 0)
        G, y = ci.graph, list(ci.y)
        meta = {"budget": format_rational(ci.budget)}
        out["budget"] = meta["budget"]
    else:
        params = _family_params(args.params)
        if args.family == "random_scheme" and args.seed is not None:
            params.setdefault("seed", args.seed)
        G, y, meta = gen_family(args.family, **params), None, None
    write_instance(args.output, G, y, meta)
    S = Surface.of(G)
    out.update(nodes=G.n_nodes, arcs=G.n_arcs, euler_genus=S.genus, orientable=S.orientable)
    return out, EXIT_OK


# -- parser and output ------------------------------------------------------------


def _threads_default():
    env = os.environ.get("HOMCIRC_THREADS")
    return int(env) if env and env.isdigit() else None


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _pos_int(text):
    v = _nonneg_int(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=None, help="seed for randomised trees / generators")

    p = argparse.ArgumentParser(prog="homcirc", description="Homology-constrained minimum-cost circulations on embedded digraphs.")
    p.add_argument("--version", action="version", version=f"homcirc {__version__} ({VERSION})")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("info", parents=[common], help="surface type and sizes")
    s.add_argument("instance")
    s.set_defaults(run=cmd_info)

    s = sub.add_parser("faces", parents=[common], help="list facial walks")
    s.add_argument("instance")
    s.set_defaults(run=cmd_faces)

    s = sub.add_parser("dual", parents=[common], help="write the dual as a v1 instance")
    s.add_argument("instance")
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_dual)

    s = sub.add_parser("basis", parents=[common], help="homology basis")
    s.add_argument("instance")
    s.set_defaults(run=cmd_basis)

    s = sub.add_parser("check", parents=[common], help="decide whether two circulations are homologous")
    s.add_argument("instance")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--witness", action="store_true")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("solve", parents=[common], help="minimum-cost homologous circulation")
    s.add_argument("instance")
    s.add_argument("--witness", action="store_true")
    s.add_argument("--tube-radius", type=_nonneg_int, default=None)
    s.add_argument("--genus-cap", type=_nonneg_int, default=DEFAULT_GENUS_CAP)
    s.add_argument("--threads", type=_pos_int, default=_threads_default())
    s.set_defaults(run=cmd_solve)

    s = sub.add_parser("oracle", parents=[common], help="brute-force search over a box of face coefficients")
    s.add_argument("instance")
    s.add_argument("--box", type=_nonneg_int, required=True)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--solve", action="store_true")
    mode.add_argument("--check", nargs=2, metavar=("X", "Y"))
    s.set_defaults(run=cmd_oracle)

    s = sub.add_parser("gen", parents=[common], help="generate an instance file")
    s.add_argument("family", choices=sorted(FAMILIES) + ["sat"])
    s.add_argument("params", nargs="*", help="key=value family parameters")
    s.add_argument("--cnf", help="DIMACS CNF input for the sat family")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(run=cmd_gen)
    return p


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render_text(payload) -> str:
    lines = []
    for key, value in _flatten(payload):
        if isinstance(value, list):
            value = " ".join(str(v) for v in value)
        elif isinstance(value, bool) or value is None:
            value = json.dumps(value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_INPUT
    try:
        payload, code = args.run(args)
    except (InvalidInstance, InvalidInput, BadParams, BoxTooLarge, GenusCapExceeded, BipartiteInput) as exc:
        print(f"homcirc: error: {exc}", file=stderr)
        return EXIT_INPUT
    except InternalInconsistency as exc:
        print(f"homcirc: internal error: {exc}", file=stderr)
        return EXIT_INTERNAL
    except HomcircError as exc:
        print(f"homcirc: error: {exc}", file=stderr)
        return EXIT_INPUT
    if args.format == "json" or payload.get("version") == VERSION:
        stdout.write(dumps_canonical(payload))
    else:
        stdout.write(render_text(payload))
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
