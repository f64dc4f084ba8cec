"""Command-line interface.

Subcommands: ``algebra check``, ``graphs enum``, ``graphs contract``,
``weights z``, ``verify <suite>``, ``psi check``.  All reports are JSON on
stdout (or ``--out``); output is deterministic (sorted keys, no timestamps)
and independent of the parallelism degree.

Exit codes: 0 all checks hold, 1 a mathematical identity is violated,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import graded, io, oddop, psi, weights
from .graphs import (IsoClass, canonical_or_word, contract_edge,
                     enumerate_stable, surface_type)
from .scalars import is_zero, parse_rational

USAGE_ERROR = 2
IDENTITY_ERROR = 1


class CliError(Exception):
    pass


def _parse_lambdas(text, n=None):
    vals = [parse_rational(p) for p in text.split(",") if p.strip()]
    if n is not None and len(vals) != n:
        raise CliError(f"expected {n} lambda values, got {len(vals)}")
    return vals


def _builtin(spec, n=None, lam=None):
    if spec == "E":
        return graded.make_E()
    if spec == "QN":
        if n is None:
            raise CliError("--N is required for the QN algebra")
        if lam is None:
            lam = [Fraction(i + 1) for i in range(n)]
        return graded.make_QN(n, lam)
    raise CliError(f"unknown builtin algebra {spec!r}")


def _load_algebra(args):
    if getattr(args, "json", None):
        with open(args.json) as fp:
            alg = io.algebra_from_json(json.load(fp))
        return alg, None, None
    lam = _parse_lambdas(args.lam, args.N) if args.lam else None
    return _builtin(args.builtin, args.N, lam)


def _load_graph(spec):
    if spec in ("theta", "figure8", "fig1"):
        return io.load_fixture(spec)
    with open(spec) as fp:
        return io.graph_from_json(json.load(fp))


def _emit(report, out):
    text = io.dump_json(report)
    if out:
        with open(out, "w") as fp:
            fp.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands

def cmd_algebra_check(args):
    alg, imat, itil = _load_algebra(args)
    rep = {"algebra": graded.check_algebra(alg)}
    ok = all(rep["algebra"].values())
    if imat is not None:
        rep["derivation"] = graded.check_derivation(alg, imat)
        d = dict(rep["derivation"])
        d.pop("square_zero")  # informational: the square may be nonzero
        ok = ok and all(d.values())
        rep["homotopy_inverse"] = {
            "odd": all(
                is_zero(itil[i][j]) or (alg.parity[i] + alg.parity[j]) % 2 == 1
                for i in range(alg.dim) for j in range(alg.dim)),
            "self_adjoint": graded.is_self_adjoint(alg, itil),
            "commutator_is_identity": graded.is_identity(
                alg, graded.anticommutator(imat, itil)),
        }
        ok = ok and all(rep["homotopy_inverse"].values())
    _emit(rep, args.out)
    return 0 if ok else IDENTITY_ERROR


def cmd_graphs_enum(args):
    type_filter = None
    if args.g is not None or args.n is not None:
        if args.g is None or args.n is None:
            raise CliError("--g and --n must be given together")
        type_filter = (args.g, args.n)
    classes = enumerate_stable(
        args.edges, gamma_max=args.gamma_max, odd_only=args.odd_cycles,
        ordinary=args.ordinary, trivalent=args.trivalent,
        type_filter=type_filter)
    rep = []
    for cls in classes:
        g = cls.graph
        gg, nn = surface_type(g)
        rep.append({
            "graph": io.graph_to_json(g, canonical_or_word(g)),
            "type": [gg, nn],
            "edges": len(g.edge_list()),
            "autOrder": cls.aut_order,
            "orientationReversing": cls.orientation_reversing,
        })
    _emit(rep, args.out)
    return 0


def cmd_graphs_contract(args):
    g, word = _load_graph(args.graph)
    edges = g.edge_list()
    if not 0 <= args.edge < len(edges):
        raise CliError(f"edge index outside 0..{len(edges) - 1}")
    res = contract_edge(g, edges[args.edge], word)
    if res is None:
        _emit({"result": "empty"}, args.out)
        return 0
    child, cword, sign = res
    _emit({"result": "graph", "sign": sign,
           "graph": io.graph_to_json(child, cword)}, args.out)
    return 0


def cmd_weights_z(args):
    alg, imat, itil = _load_algebra(args)
    if imat is None:
        raise CliError("weights need a builtin algebra with its operators")
    ctx = weights.WeightContext(alg, imat, itil)
    g, word = _load_graph(args.graph)
    cls = IsoClass(g)
    val = weights.partition_function(ctx, g, word)
    gg, nn = surface_type(g)
    _emit({
        "graph": io.graph_to_json(g, word),
        "type": [gg, nn],
        "edges": len(g.edge_list()),
        "autOrder": cls.aut_order,
        "value": io.scalar_to_json(val),
    }, args.out)
    return 0


def _verify_items(suite, ctx, max_edges, gamma_max):
    """Yield (label, holds) for the small non-parallel suites."""
    if suite == "counterexample":
        g, w = io.load_fixture("fig1")
        bv = weights.boundary_value(ctx, g, w, ordinary=True)
        yield ("fig1:boundary-nonzero", not is_zero(bv))
        for e in g.edge_list():
            if g.vertex_of[e[0]] == g.vertex_of[e[1]]:
                continue
            child, cword, sign = contract_edge(g, e, w)
            valences = sorted(len(child.vertex_flags(v)) for v in range(child.nv))
            z = weights.partition_function(ctx, child, cword)
            if valences == [4, 4]:
                yield (f"fig1:contract{e}:valence44-zero", is_zero(z))
            else:
                yield (f"fig1:contract{e}:valence35-nonzero", not is_zero(z))
        return
    if suite == "coboundary":
        from .scalars import DualNumber
        alg = ctx.alg
        lift = lambda x: DualNumber(x, x - x)
        dalg = weights.lift_algebra(alg, lift)
        dI = weights.lift_matrix(ctx.imat, lift)
        dT = weights.lift_matrix(ctx.itil, lift)
        eps = DualNumber(alg.zero, alg.zero + 1)
        for name, xmat in _deformation_choices(alg, ctx):
            dX = weights.lift_matrix(xmat, lift)
            dTeps = weights.deformed_inverse(dalg, dI, dT, dX, eps)
            ctx0 = weights.WeightContext(dalg, dI, dT)
            ctxE = weights.WeightContext(dalg, dI, dTeps)
            for e in range(1, max_edges + 1):
                for cls in enumerate_stable(e, gamma_max=gamma_max):
                    g = cls.graph
                    w = canonical_or_word(g)
                    lhs = weights.partition_function(ctxE, g, w) \
                        - weights.partition_function(ctx0, g, w)
                    dW = weights.boundary_of(
                        lambda c, cw: weights.deformation_cochain(ctx, xmat, c, cw),
                        g, w, alg.zero)
                    rhs = eps * lift(dW)
                    yield (f"coboundary:{name}:{cls.key}", lhs == rhs)
        return
    raise CliError(f"unknown suite {suite!r}")


def _deformation_choices(alg, ctx):
    """Odd operators X with [I, X] anti-self-adjoint, including X = Itil I Y
    (trivial for the built-in algebras, where Y = 0 is the only odd
    self-adjoint operator commuting with both I and Itil)."""
    zero = [[alg.zero] * alg.dim for _ in range(alg.dim)]
    out = [("zero", zero), ("I", ctx.imat)]
    two_i = [[x + x for x in row] for row in ctx.imat]
    out.append(("2I", two_i))
    cand = _antisym_choice(alg)
    if cand is not None:
        out.append(("antisym", cand))
    checked = []
    for name, xmat in out:
        comm = weights.supercommutator(alg, ctx.imat, 1, xmat, 1)
        if graded.is_anti_self_adjoint(alg, comm, op_parity=0):
            checked.append((name, xmat))
    return checked


def _antisym_choice(alg):
    """For the odd matrix algebras: send E12 -> pE12, E21 -> -pE21."""
    names = list(alg.names)
    try:
        a, b = names.index("E12"), names.index("E21")
        pa, pb = names.index("pE12"), names.index("pE21")
    except ValueError:
        return None
    cand = [[alg.zero] * alg.dim for _ in range(alg.dim)]
    cand[pa][a] = alg.one
    cand[pb][b] = -alg.one
    return cand


_WORKER_STATE = {}


def _worker_init(builtin, n, lam_text):
    lam = _parse_lambdas(lam_text, n) if lam_text else None
    alg, imat, itil = _builtin(builtin, n, lam)
    _WORKER_STATE["ctx"] = weights.WeightContext(alg, imat, itil)


def _worker_eval(task):
    from .graphs import d_squared_is_zero

    suite, key, g, word = task
    ctx = _WORKER_STATE["ctx"]
    if suite == "d-squared":
        return key, d_squared_is_zero(g, word)
    if suite == "cocycle":
        return key, is_zero(weights.boundary_value(ctx, g, word))
    if suite == "loop-defect":
        val = weights.boundary_value(ctx, g, word, ordinary=True) \
            + weights.loop_defect(ctx, g, word)
        return key, is_zero(val)
    raise RuntimeError(f"suite {suite} is not parallelizable")


def cmd_verify(args):
    alg, imat, itil = _load_algebra(args)
    ctx = weights.WeightContext(alg, imat, itil) if imat is not None else None
    if args.suite in ("d-squared", "cocycle", "loop-defect"):
        tasks = []
        ordinary = args.suite == "loop-defect"
        for e in range(1, args.max_edges + 1):
            classes = enumerate_stable(
                e, gamma_max=(0 if ordinary else args.gamma_max),
                ordinary=ordinary)
            for cls in classes:
                g = cls.graph
                tasks.append((args.suite, f"{args.suite}:{cls.key}", g,
                              canonical_or_word(g)))
        if args.jobs > 1:
            import multiprocessing as mp
            with mp.Pool(args.jobs, initializer=_worker_init,
                         initargs=(args.builtin, args.N, args.lam)) as pool:
                items = pool.map(_worker_eval, tasks, chunksize=16)
        else:
            _worker_init(args.builtin, args.N, args.lam)
            items = [_worker_eval(t) for t in tasks]
    else:
        items = list(_verify_items(args.suite, ctx, args.max_edges,
                                   args.gamma_max))
    report = {
        "suite": args.suite,
        "checked": len(items),
        "violations": sorted(str(label) for label, ok in items if not ok),
    }
    _emit(report, args.out)
    return 0 if not report["violations"] else IDENTITY_ERROR


def cmd_psi(args):
    lam = _parse_lambdas(args.lam, args.n) if args.lam else None
    rep = psi.psi_check(args.g, args.n, args.d)
    per_graph = []
    for cls, w in rep["classes"]:
        g = cls.graph
        gg, nn = surface_type(g)
        entry = {
            "graph": io.graph_to_json(g, canonical_or_word(g)),
            "type": [gg, nn],
            "edges": len(g.edge_list()),
            "autOrder": cls.aut_order,
            "weight": io.scalar_to_json(w),
        }
        per_graph.append(entry)
    out = {
        "g": args.g,
        "n": args.n,
        "d": args.d,
        "match": bool(rep["match"]),
        "lhs": io.scalar_to_json(rep["lhs"]),
        "rhs": io.scalar_to_json(rep["rhs"]),
        "perGraph": per_graph,
    }
    if lam is not None:
        point = {i + 1: v for i, v in enumerate(lam)}
        out["lhsAt"] = io.scalar_to_json(rep["lhs"].eval(point))
        out["rhsAt"] = io.scalar_to_json(rep["rhs"].eval(point))
    _emit(out, args.out)
    return 0 if rep["match"] else IDENTITY_ERROR


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="srgc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_algebra_opts(sp):
        sp.add_argument("--builtin", default="E", choices=["E", "QN"])
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--lambda", dest="lam", default=None,
                        help="comma-separated rational values")
        sp.add_argument("--json", default=None, help="algebra JSON path")

    alg = sub.add_parser("algebra", help="algebra axioms and operators")
    alg_sub = alg.add_subparsers(dest="subcommand", required=True)
    ac = alg_sub.add_parser("check")
    add_algebra_opts(ac)
    ac.add_argument("--out")
    ac.set_defaults(func=cmd_algebra_check)

    gr = sub.add_parser("graphs", help="enumeration and contraction")
    gr_sub = gr.add_subparsers(dest="subcommand", required=True)
    ge = gr_sub.add_parser("enum")
    ge.add_argument("--edges", type=int, required=True)
    ge.add_argument("--g", type=int, default=None)
    ge.add_argument("--n", type=int, default=None)
    ge.add_argument("--gamma-max", type=int, default=0)
    ge.add_argument("--ordinary", action="store_true")
    ge.add_argument("--trivalent", action="store_true")
    ge.add_argument("--odd-cycles", action="store_true")
    ge.add_argument("--out")
    ge.set_defaults(func=cmd_graphs_enum)
    gc = gr_sub.add_parser("contract")
    gc.add_argument("--graph", required=True)
    gc.add_argument("--edge", type=int, required=True)
    gc.add_argument("--out")
    gc.set_defaults(func=cmd_graphs_contract)

    wz = sub.add_parser("weights", help="partition-function values")
    wz_sub = wz.add_subparsers(dest="subcommand", required=True)
    zz = wz_sub.add_parser("z")
    add_algebra_opts(zz)
    zz.add_argument("--graph", required=True)
    zz.add_argument("--out")
    zz.set_defaults(func=cmd_weights_z)

    vf = sub.add_parser("verify", help="identity suites")
    vf.add_argument("suite", choices=["cocycle", "counterexample",
                                      "loop-defect", "coboundary",
                                      "d-squared"])
    add_algebra_opts(vf)
    vf.add_argument("--max-edges", type=int, default=3)
    vf.add_argument("--gamma-max", type=int, default=1)
    vf.add_argument("--jobs", type=int, default=1)
    vf.add_argument("--out")
    vf.set_defaults(func=cmd_verify)

    ps = sub.add_parser("psi", help="psi-class identity")
    ps_sub = ps.add_subparsers(dest="subcommand", required=True)
    pc = ps_sub.add_parser("check")
    pc.add_argument("--g", type=int, required=True)
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--d", type=int, required=True)
    pc.add_argument("--lambda", dest="lam", default=None)
    pc.add_argument("--out")
    pc.set_defaults(func=cmd_psi)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
