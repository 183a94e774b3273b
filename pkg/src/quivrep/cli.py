"""Command-line interface: ``quivrep <subcommand> ...``.

Exit codes: 0 success / property holds, 1 property fails, 2 input errors.
"""

import argparse
import json
import sys

from . import __version__, fmodule, io
from .constructions import (
    ConstructionError,
    ConstructionTrace,
    cogenerator_construct,
    flat_cot_pair,
    injective_hull_cogenerator,
    gf_pgf_cot_triple,
    trivial_objects_construct,
    verify_trace,
)
from .quiver import QuiverError, QuiverParseError, load_quiver, v_sequence
from .representation import (
    RepresentationError,
    count_reps,
    enumerate_reps,
    hovey_membership,
    in_phi_class,
    is_flat_rep,
    is_gorenstein_flat_rep,
    is_pgf_rep,
    is_projective_rep,
    phi,
    phi_failure,
    psi,
)
from .tensor import char_dual_rep, tensor_rep, verify_adjunction
from .verify import QUIVERS, SUITES, replay, run_suite


class UsageError(Exception):
    pass


def _emit(args, obj, text):
    if args.json:
        sys.stdout.write(io.dumps(obj))
    else:
        print(text)


def _fmt_set(s):
    return "∅" if not s else "{" + ",".join(sorted(s)) + "}"


# ------------------------------------------------------------ commands


def cmd_rooted(args):
    q = load_quiver(args.quiver)
    seq = v_sequence(q)
    shown = seq.stages[:-1] if seq.left_rooted else seq.stages
    obj = {"left_rooted": seq.left_rooted, "stages": [sorted(s) for s in shown]}
    text = "\n".join(f"V_{k} = {_fmt_set(s)}" for k, s in enumerate(shown))
    _emit(args, obj, text)
    return 0 if seq.left_rooted else 1


def _load_rep(path, ring=None):
    x = io.load_representation(path)
    if ring is not None and x.ring.n != ring:
        raise UsageError(f"{path} is over {x.ring}, not Z/{ring}")
    return x


def cmd_analyze(args):
    x = _load_rep(args.rep, args.ring)
    if not v_sequence(x.quiver).left_rooted:
        raise UsageError("analysis needs a left rooted quiver")
    vertices = {}
    for i in x.quiver.vertices:
        f = phi(x, i)
        gens = f.kernel_generators()
        g = psi(x, i)
        vertices[i] = {
            "module": str(x.modules[i]),
            "phi_injective": len(gens) == 0,
            "phi_kernel_witness": gens[0].tolist() if len(gens) else None,
            "C": str(fmodule.cokernel(f)[0]),
            "psi_surjective": g.is_surjective(),
            "K": str(fmodule.kernel(g)[0]),
        }
    flags = {
        "flat": is_flat_rep(x),
        "gorenstein_flat": is_gorenstein_flat_rep(x),
        "pgf": is_pgf_rep(x),
        "projective": is_projective_rep(x),
    }
    hovey = hovey_membership(x)
    witnesses = {}
    for tag, key in (("Flat", "flat"), ("GF", "gorenstein_flat"), ("Prj", "projective")):
        fail = phi_failure(x, tag)
        if fail is not None:
            witnesses[key] = {"vertex": fail[0], "reason": fail[1], "detail": fail[2]}
    obj = {"ring": x.ring.n, "vertices": vertices, "flags": flags, "hovey": hovey, "witnesses": witnesses}
    lines = [f"ring Z/{x.ring.n}"]
    for i, d in vertices.items():
        line = (
            f"vertex {i}: {d['module']}  phi injective={d['phi_injective']}  C={d['C']}"
            f"  psi surjective={d['psi_surjective']}  K={d['K']}"
        )
        if d["phi_kernel_witness"] is not None:
            line += f"  kernel element {d['phi_kernel_witness']}"
        lines.append(line)
    for k, v in flags.items():
        lines.append(f"{k}: {str(v).lower()}")
    for k, v in hovey.items():
        lines.append(f"hovey {k}: {str(v).lower()}")
    for k, w in witnesses.items():
        lines.append(f"not {k}: vertex {w['vertex']} ({w['reason']}: {w['detail']})")
    _emit(args, obj, "\n".join(lines))
    return 0


def cmd_tensor(args):
    y = _load_rep(args.y, args.ring)
    x = _load_rep(args.x, args.ring)
    t = tensor_rep(y, x)
    obj = {"module": list(t.value.orders), "order": t.value.order, "text": str(t.value)}
    _emit(args, obj, str(t.value))
    return 0


def cmd_dual(args):
    x = _load_rep(args.rep, args.ring)
    d = char_dual_rep(x)
    _emit(args, io.rep_to_json(d), io.format_representation(d, args.quiver_path).rstrip())
    return 0


def cmd_adjunction(args):
    y = _load_rep(args.y, args.ring)
    x = _load_rep(args.x, args.ring)
    g = io.parse_module(args.module, x.ring)
    rep = verify_adjunction(y, x, g)
    obj = {
        "lhs_order": rep.lhs_order,
        "rhs_order": rep.rhs_order,
        "natural": rep.natural,
        "injective": rep.injective,
        "elementwise": rep.elementwise,
        "ok": rep.ok,
    }
    text = (
        f"|Hom(Y (x) X, G)| = {rep.lhs_order}\n|Hom(Y, Hom(X, G))| = {rep.rhs_order}\n"
        f"canonical map natural={rep.natural} injective={rep.injective} "
        f"(elementwise={rep.elementwise})\n{'bijection' if rep.ok else 'NOT a bijection'}"
    )
    _emit(args, obj, text)
    return 0 if rep.ok else 1


def cmd_construct(args):
    x = _load_rep(args.rep, args.ring)
    r = x.ring
    if args.kind == "cogenerator":
        ses, trace = cogenerator_construct(
            x, flat_cot_pair(r, args.variant or "degenerate"), injective_hull_cogenerator(r)
        )
    else:
        ses, trace = trivial_objects_construct(x, gf_pgf_cot_triple(r, args.variant or "padded"))
    problems = verify_trace(trace)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.dumps(trace.to_json()))
    _, mid, right = ses.terms
    obj = {
        "kind": args.kind,
        "stages": len(trace.stages),
        "middle": {v: str(m) for v, m in mid.modules.items()},
        "right": {v: str(m) for v, m in right.modules.items()},
        "verified": not problems,
        "problems": problems,
    }
    lines = [f"{args.kind} construction: {len(trace.stages)} stages"]
    lines += [f"  vertex {v}: {mid.modules[v]} -> {right.modules[v]}" for v in mid.quiver.vertices]
    lines.append("trace verified" if not problems else "trace FAILED:\n  " + "\n  ".join(problems))
    _emit(args, obj, "\n".join(lines))
    return 0 if not problems else 1


def cmd_verify_trace(args):
    with open(args.trace, encoding="utf-8") as fh:
        data = json.load(fh)
    if "check" in data:
        ok = replay(data)
        obj = {"check": data["check"], "passes": ok}
        _emit(args, obj, f"{data['check']}: {'passes' if ok else 'failure reproduced'}")
        return 0 if ok else 1
    if "records" in data:
        results = []
        for rec in data["records"]:
            if rec.get("counterexample"):
                results.append((rec["name"], replay(rec["counterexample"])))
        ok = all(p for _, p in results)
        obj = {"replayed": [{"name": n, "passes": p} for n, p in results], "passes": ok}
        text = "\n".join(f"{n}: {'passes' if p else 'failure reproduced'}" for n, p in results) or "no counterexamples"
        _emit(args, obj, text)
        return 0 if ok else 1
    trace = ConstructionTrace.from_json(data)
    problems = verify_trace(trace)
    obj = {"kind": trace.kind, "stages": len(trace.stages), "verified": not problems, "problems": problems}
    text = f"{trace.kind} trace with {len(trace.stages)} stages: " + (
        "verified" if not problems else "FAILED\n  " + "\n  ".join(problems)
    )
    _emit(args, obj, text)
    return 0 if not problems else 1


def cmd_verify(args):
    if args.json and args.seed is None:
        raise UsageError("--json requires an explicit --seed")
    seed = 0 if args.seed is None else args.seed
    params = {"max_order": args.max_order, "ring": args.ring, "trials": args.trials}
    if args.quiver:
        params["quiver"] = args.quiver
    report = run_suite(args.suite, seed, **params)
    obj = report.to_json(timings=args.timings)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.dumps(obj))
    _emit(args, obj, report.to_text())
    return 0 if report.passed else 1


def cmd_enumerate(args):
    q = QUIVERS[args.quiver]() if args.quiver in QUIVERS else load_quiver(args.quiver)
    ring = args.ring or 4
    max_order = args.max_order or 4
    total = count_reps(q, fmodule.ring(ring), max_order)
    if args.count and not args.phi_class:
        _emit(args, {"count": total}, str(total))
        return 0
    if args.limit is not None and total > args.limit:
        raise UsageError(f"{total} representations; raise --limit or use --count")
    out = []
    for x in enumerate_reps(q, ring, max_order, limit=None):
        if args.phi_class and not in_phi_class(x, args.phi_class):
            continue
        out.append(io.rep_to_json(x))
    if args.count:
        _emit(args, {"count": len(out)}, str(len(out)))
        return 0
    if args.json:
        sys.stdout.write(io.dumps({"count": len(out), "reps": out}))
    else:
        for d in out:
            print(json.dumps(d, sort_keys=True))
    return 0


# ------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--max-order", type=int, default=None, help="bound on vertex module orders")
    common.add_argument("--ring", type=int, default=None, help="coefficient ring Z/N")

    p = argparse.ArgumentParser(prog="quivrep", description="Representations of quivers over Z/n.")
    p.add_argument("--version", action="version", version=f"quivrep {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rooted", parents=[common], help="print the rootedness filtration")
    s.add_argument("quiver")
    s.set_defaults(fn=cmd_rooted)

    s = sub.add_parser("analyze", parents=[common], help="vertexwise analysis and class memberships")
    s.add_argument("rep")
    s.set_defaults(fn=cmd_analyze)

    s = sub.add_parser("tensor", parents=[common], help="tensor product Y (x) X")
    s.add_argument("y", help="representation of the opposite quiver")
    s.add_argument("x")
    s.set_defaults(fn=cmd_tensor)

    s = sub.add_parser("dual", parents=[common], help="character dual X^+")
    s.add_argument("rep")
    s.add_argument("--quiver-path", default="opposite.quiver", help="quiver path written in the output")
    s.set_defaults(fn=cmd_dual)

    s = sub.add_parser("adjunction-check", parents=[common], help="verify the tensor-Hom adjunction")
    s.add_argument("y")
    s.add_argument("x")
    s.add_argument("--module", required=True, help='test module G, e.g. "Z/4 + Z/2"')
    s.set_defaults(fn=cmd_adjunction)

    s = sub.add_parser("construct", parents=[common], help="run a stagewise construction")
    s.add_argument("kind", choices=["cogenerator", "trivial"])
    s.add_argument("rep")
    s.add_argument("--out", help="write the trace (JSON) here")
    s.add_argument("--variant", choices=["degenerate", "padded", "hull"], default=None)
    s.set_defaults(fn=cmd_construct)

    s = sub.add_parser("verify-trace", parents=[common], help="re-verify a trace or replay a counterexample")
    s.add_argument("trace")
    s.set_defaults(fn=cmd_verify_trace)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=sorted(SUITES) + ["all"])
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--quiver", choices=sorted(QUIVERS), default=None)
    s.add_argument("--timings", action="store_true", help="include wall-clock timings in JSON")
    s.add_argument("--out", help="also write the JSON report here")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("enumerate", parents=[common], help="enumerate representations")
    s.add_argument("--quiver", default="example", help="built-in name or quiver file")
    s.add_argument("--count", action="store_true", help="only print the number of representations")
    s.add_argument("--limit", type=int, default=100_000)
    s.add_argument("--phi-class", default=None, help="keep only members of Phi(class)")
    s.set_defaults(fn=cmd_enumerate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (QuiverParseError, io.ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, QuiverError, RepresentationError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
