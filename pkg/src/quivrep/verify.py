"""Verification suites: deterministic, seeded, with replayable counterexamples.

Each suite yields :class:`CheckRecord` entries.  A failing record carries a
JSON counterexample ``{"check": family, "data": ...}`` that
:func:`replay` re-evaluates from scratch.
"""

import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import classes, fmodule, io
from .constructions import (
    core_equality_check,
    cogenerator_construct,
    flat_cot_pair,
    injective_hull_cogenerator,
    gf_pgf_cot_triple,
    trivial_objects_construct,
    verify_trace,
)
from .exhaustive import duality_chain, verdicts_of
from .pathring import ext1_rep_order, projective_cover, splits_over_path_ring
from .quiver import (
    a2_quiver,
    example_quiver,
    is_acyclic,
    loop_quiver,
    opposite,
    random_quiver,
    two_cycle_quiver,
    v_sequence,
)
from .representation import (
    enumerate_reps,
    in_phi_class,
    in_rep_class,
    is_flat_rep,
    is_projective_rep,
    random_phi_rep,
    random_rep,
)
from .tensor import double_dual_matches, flat_iff_tensor_exact, verify_adjunction

# "appendix" is kept as a command-line alias of the four-vertex example quiver.
QUIVERS = {"example": example_quiver, "appendix": example_quiver, "a2": a2_quiver}


@dataclass
class CheckRecord:
    name: str
    anchor: str
    instances: int = 0
    passed: bool = True
    counterexample: dict = None
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self, timings=False):
        out = {
            "name": self.name,
            "anchor": self.anchor,
            "instances": self.instances,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "details": self.details,
        }
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class VerificationReport:
    suite: str
    seed: int
    records: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    def sorted_records(self):
        return sorted(self.records, key=lambda r: r.name)

    def to_json(self, timings=False):
        return {
            "schema": io.SCHEMA_VERSION,
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "records": [r.to_json(timings) for r in self.sorted_records()],
        }

    def to_text(self):
        lines = [f"suite {self.suite} (seed {self.seed})"]
        for r in self.sorted_records():
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"  {mark}  {r.name}  [{r.instances} instances]  {r.anchor}")
        lines.append("passed" if self.passed else "FAILED")
        return "\n".join(lines)


def _rng(seed, name):
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


class _Runner:
    """Accumulates one record; stops collecting after the first failure."""

    def __init__(self, name, anchor, family):
        self.rec = CheckRecord(name, anchor)
        self.family = family
        self.start = time.perf_counter()

    def check(self, ok, data):
        self.rec.instances += 1
        if not ok and self.rec.passed:
            self.rec.passed = False
            self.rec.counterexample = {"check": self.family, "data": data}

    def done(self, **details):
        self.rec.seconds = time.perf_counter() - self.start
        self.rec.details.update(details)
        return self.rec


# ------------------------------------------------------------- predicates


def _rep(d):
    return io.rep_from_json(d)


def _pred_rooted_iff_acyclic(data):
    q = io.quiver_from_json(data["quiver"])
    return v_sequence(q).left_rooted == is_acyclic(q)


def _pred_duality_chain(data):
    v = verdicts_of(_rep(data["rep"]))
    return len(set(v)) == 1


def _pred_flat_iff_split(data):
    x = _rep(data["rep"])
    return is_flat_rep(x) == splits_over_path_ring(x)


def _pred_adjunction(data):
    y, x = _rep(data["y"]), _rep(data["x"])
    r = x.ring
    g = fmodule.module(r, data["g"])
    u = None
    if data.get("u") is not None:
        g2 = fmodule.module(r, data["g2"])
        u = fmodule.ModuleMap(g, g2, np.array(data["u"], dtype=np.int64).reshape(g2.rank, g.rank))
    rep = verify_adjunction(y, x, g, u)
    return rep.ok and rep.elementwise


def _pred_flat_tensor_exact(data):
    return flat_iff_tensor_exact(_rep(data["rep"])).agree


def _pred_cogenerator(data):
    x = _rep(data["rep"])
    r = x.ring
    ses, trace = cogenerator_construct(x, flat_cot_pair(r), injective_hull_cogenerator(r))
    return (
        not verify_trace(trace)
        and ses.is_exact()
        and in_phi_class(ses.terms[1], "Flat")
        and in_phi_class(ses.terms[2], "GF")
    )


def _pred_trivial(data):
    x = _rep(data["rep"])
    ses, trace = trivial_objects_construct(x, gf_pgf_cot_triple(x.ring, data.get("variant", "padded")))
    return (
        not verify_trace(trace)
        and ses.is_exact()
        and in_rep_class(ses.terms[1], "Prj")
        and is_projective_rep(ses.terms[2])
    )


def _pred_ext_orthogonal(data):
    return ext1_rep_order(_rep(data["x"]), _rep(data["y"])) == 1


def _pred_core(data):
    x = _rep(data["rep"])
    left = in_phi_class(x, "GF") and in_rep_class(x, "GFperp")
    right = in_phi_class(x, "Flat") and in_rep_class(x, "Cot")
    return left == right == splits_over_path_ring(x)


def _pred_double_dual_rep(data):
    return double_dual_matches(_rep(data["rep"]))


def _pred_double_dual_module(data):
    r = fmodule.ring(data["ring"])
    return double_dual_brute_force(fmodule.module(r, data["orders"]))


def _pred_hovey_trivially_cofibrant(data):
    x = _rep(data["rep"])
    tc = in_phi_class(x, "GF") and in_rep_class(x, "PGFperp")
    return tc == splits_over_path_ring(x)


def _pred_hovey_fibrant(data):
    return in_rep_class(_rep(data["rep"]), "Cot")


def _pred_hovey_cores(data):
    x = _rep(data["rep"])
    r = x.ring
    c, w, f = (classes.oracle(t, r) for t in ("GF", "PGFperp", "Cot"))
    left = in_phi_class(x, c) and in_rep_class(x, lambda m: w(m) and f(m))
    right = in_phi_class(x, lambda m: c(m) and w(m)) and in_rep_class(x, f)
    return left == right


PREDICATES = {
    "rooted-iff-acyclic": _pred_rooted_iff_acyclic,
    "duality-chain": _pred_duality_chain,
    "flat-iff-split": _pred_flat_iff_split,
    "adjunction": _pred_adjunction,
    "flat-tensor-exact": _pred_flat_tensor_exact,
    "cogenerator": _pred_cogenerator,
    "trivial": _pred_trivial,
    "ext-orthogonal": _pred_ext_orthogonal,
    "core": _pred_core,
    "double-dual-rep": _pred_double_dual_rep,
    "double-dual-module": _pred_double_dual_module,
    "hovey-trivially-cofibrant": _pred_hovey_trivially_cofibrant,
    "hovey-fibrant": _pred_hovey_fibrant,
    "hovey-cores": _pred_hovey_cores,
}


def replay(counterexample):
    """Re-evaluate a counterexample; returns True when the check now passes."""
    return bool(PREDICATES[counterexample["check"]](counterexample["data"]))


def double_dual_brute_force(m):
    """``m -> m^{++}`` is a bijection, checked with explicit characters.

    Characters ``m -> Z/n`` are enumerated by brute force; evaluation
    separates points and the number of characters of ``m^+`` equals
    ``|m|``.
    """
    r = m.ring
    zn = fmodule.module(r, (r.n,))
    chars = list(fmodule.HomSpace(m, zn).elements())
    if len(chars) != m.order:
        return False
    seen = set()
    for x in m.elements():
        sig = tuple(int(chi(x)[0]) if m.rank else 0 for chi in chars)
        seen.add(sig)
    if len(seen) != m.order:
        return False
    dual = fmodule.dual_plus(m)
    return len(list(fmodule.HomSpace(dual, zn).elements())) == m.order


# -------------------------------------------------------------- suites


def suite_rooted(seed, n_random=1000, max_vertices=8, **_):
    out = []
    run = _Runner("rooted/example-v-sequence", "rootedness filtration of the four-vertex example", "rooted-iff-acyclic")
    seq = v_sequence(example_quiver())
    expected = [set(), {"1", "2"}, {"1", "2", "3"}, {"1", "2", "3", "4"}]
    ok = [set(s) for s in seq.stages[:-1]] == expected and seq.left_rooted
    run.check(ok, {"quiver": io.quiver_to_json(example_quiver())})
    out.append(run.done(stages=[sorted(s) for s in seq.stages]))
    for name, make in (("loop", loop_quiver), ("two-cycle", two_cycle_quiver)):
        run = _Runner(f"rooted/{name}-rejected", "a quiver with a cycle is not left rooted", "rooted-iff-acyclic")
        run.check(not v_sequence(make()).left_rooted, {"quiver": io.quiver_to_json(make())})
        out.append(run.done())
    run = _Runner("rooted/random-iff-acyclic", "left rooted iff no directed cycle", "rooted-iff-acyclic")
    rng = _rng(seed, run.rec.name)
    for _ in range(n_random):
        q = random_quiver(rng, max_vertices)
        data = {"quiver": io.quiver_to_json(q)}
        run.check(_pred_rooted_iff_acyclic(data), data)
    out.append(run.done())
    return out


def suite_gf_duality_chain(seed, ring=4, quiver="example", max_order=8, **_):
    run = _Runner(
        f"theorem-a/{quiver}/Z{ring}/order<={max_order}",
        "Gorenstein flat iff phi injective iff dual psi surjective iff dual Gorenstein injective",
        "duality-chain",
    )
    rep = duality_chain(QUIVERS[quiver](), ring, max_order)
    run.rec.instances = rep.total
    if not rep.ok:
        run.rec.passed = False
        if rep.counterexample is not None:
            run.rec.counterexample = {"check": "duality-chain", "data": {"rep": io.rep_to_json(rep.counterexample)}}
    return [run.done(backend=rep.backend, true_counts=rep.true_counts, disagreements=rep.disagreements)]


def suite_flat(seed, max_order=4, **_):
    out = []
    for qname in ("a2", "example"):
        for n in (2, 4):
            run = _Runner(f"flat/{qname}/Z{n}", "Phi(Flat) equals the projectives of the path ring", "flat-iff-split")
            for x in enumerate_reps(QUIVERS[qname](), n, max_order):
                ok = is_flat_rep(x) == splits_over_path_ring(x)
                run.check(ok, {"rep": io.rep_to_json(x)} if not ok else None)
            out.append(run.done())
    return out


def _random_module(r, rng, max_order, nonzero=True):
    mods = [m for m in fmodule.all_modules(r, max_order) if not (nonzero and m.is_zero)]
    return mods[int(rng.integers(len(mods)))]


def _random_map(src, tgt, rng):
    hs = fmodule.HomSpace(src, tgt)
    return hs.from_coords([int(rng.integers(d)) for d in hs.module.orders])


def suite_adjunction(seed, trials=200, ring=4, max_order=4, **_):
    out = []
    r = fmodule.ring(ring)
    per = {"a2": trials // 2, "example": trials - trials // 2}
    for qname, count in per.items():
        run = _Runner(f"adjunction/{qname}", "tensor is left adjoint to Hom(X, -)", "adjunction")
        rng = _rng(seed, run.rec.name)
        q = QUIVERS[qname]()
        for _ in range(count):
            y = random_rep(opposite(q), r, rng, max_order)
            x = random_rep(q, r, rng, max_order)
            g = _random_module(r, rng, max_order)
            g2 = _random_module(r, rng, max_order)
            u = _random_map(g, g2, rng)
            data = {
                "y": io.rep_to_json(y),
                "x": io.rep_to_json(x),
                "g": list(g.orders),
                "g2": list(g2.orders),
                "u": u.matrix.tolist(),
            }
            run.check(_pred_adjunction(data), data)
        out.append(run.done())
    return out


def suite_flat_exact(seed, ring=4, max_order=4, quivers=("a2", "example"), **_):
    out = []
    for qname in quivers:
        run = _Runner(
            f"flat-exact/{qname}/Z{ring}",
            "flat iff tensoring is exact iff the character dual is injective",
            "flat-tensor-exact",
        )
        for x in enumerate_reps(QUIVERS[qname](), ring, max_order):
            ok = flat_iff_tensor_exact(x).agree
            run.check(ok, {"rep": io.rep_to_json(x)} if not ok else None)
        out.append(run.done())
    return out


def suite_cogenerator(seed, trials=100, ring=4, **_):
    run = _Runner("cogenerator/example", "stagewise construction of 0 -> X -> W -> Y -> 0", "cogenerator")
    rng = _rng(seed, run.rec.name)
    r = fmodule.ring(ring)
    q = example_quiver()
    for _ in range(trials):
        x = random_phi_rep(q, r, rng, "GF", max_order=4)
        data = {"rep": io.rep_to_json(x)}
        run.check(_pred_cogenerator(data), data)
    return [run.done()]


def suite_trivial(seed, trials=100, ring=4, **_):
    run = _Runner("trivial/example", "stagewise construction of 0 -> X -> A' -> B' -> 0", "trivial")
    rng = _rng(seed, run.rec.name)
    r = fmodule.ring(ring)
    inj = [m for m in fmodule.all_modules(r, 16) if classes.oracle("Inj", r)(m)]
    q = example_quiver()
    for _ in range(trials):
        x = random_rep(q, r, rng, modules=inj)
        data = {"rep": io.rep_to_json(x), "variant": "padded"}
        run.check(_pred_trivial(data), data)
    return [run.done()]


def suite_cotorsion(seed, ring=4, max_order=4, quivers=("a2", "example"), **_):
    out = []
    r = fmodule.ring(ring)
    for qname in quivers:
        q = QUIVERS[qname]()
        reps = list(enumerate_reps(q, r, max_order))
        xs = [x for x in reps if in_phi_class(x, "GF")]
        ys = [y for y in reps if in_rep_class(y, "GFperp")]
        run = _Runner(f"cotorsion/{qname}/ext-orthogonal", "Ext^1(Phi(GF), Rep(GF-perp)) = 0", "ext-orthogonal")
        for x in xs:
            cov = projective_cover(x)
            for y in ys:
                ok = ext1_rep_order(x, y, cov) == 1
                run.check(ok, {"x": io.rep_to_json(x), "y": io.rep_to_json(y)} if not ok else None)
        out.append(run.done(phi_gf=len(xs), rep_gfperp=len(ys)))
        run = _Runner(
            f"cotorsion/{qname}/core-equality",
            "Phi(GF) cap Rep(GF-perp) = Phi(Flat) cap Rep(Cot) = projective representations",
            "core",
        )
        report = core_equality_check(("GF", "GFperp"), ("Flat", "Cot"), q, r, reps=reps, reference=splits_over_path_ring)
        run.rec.instances = report.checked
        if not report.equal:
            run.rec.passed = False
            run.rec.counterexample = {"check": "core", "data": {"rep": io.rep_to_json(report.counterexamples[0])}}
        out.append(run.done(core_size=len(report.left)))
    return out


def suite_duality(seed, ring=4, module_order=16, max_order=4, quivers=("a2", "example"), **_):
    out = []
    r = fmodule.ring(ring)
    run = _Runner(f"duality/modules/Z{ring}", "M -> M^{++} is an isomorphism", "double-dual-module")
    for m in fmodule.all_modules(r, module_order):
        data = {"ring": ring, "orders": list(m.orders)}
        run.check(_pred_double_dual_module(data), data)
    out.append(run.done())
    for qname in quivers:
        run = _Runner(f"duality/reps/{qname}", "(X^+)^+ = X with equal arrow matrices", "double-dual-rep")
        for x in enumerate_reps(QUIVERS[qname](), r, max_order):
            ok = double_dual_matches(x)
            run.check(ok, {"rep": io.rep_to_json(x)} if not ok else None)
        out.append(run.done())
    return out


def suite_hovey(seed, ring=4, max_order=4, quiver="example", **_):
    r = fmodule.ring(ring)
    q = QUIVERS[quiver]()
    reps = list(enumerate_reps(q, r, max_order))
    out = []
    for family, name, anchor in (
        ("hovey-trivially-cofibrant", "trivially-cofibrant", "trivially cofibrant = projective representations"),
        ("hovey-fibrant", "fibrant", "every representation is fibrant"),
        ("hovey-cores", "cores", "cores of the two induced pairs coincide"),
    ):
        run = _Runner(f"hovey/{quiver}/{name}", anchor, family)
        pred = PREDICATES[family]
        for x in reps:
            data = {"rep": io.rep_to_json(x)}
            run.check(pred(data), data)
        out.append(run.done())
    return out


SUITES = {
    "rooted": suite_rooted,
    "theorem-a": suite_gf_duality_chain,
    "flat": suite_flat,
    "adjunction": suite_adjunction,
    "flat-exact": suite_flat_exact,
    "cogenerator": suite_cogenerator,
    "trivial": suite_trivial,
    "cotorsion": suite_cotorsion,
    "duality": suite_duality,
    "hovey": suite_hovey,
}


def run_suite(name, seed=0, **params):
    """Run one suite (or ``all``) and return a :class:`VerificationReport`."""
    report = VerificationReport(name, seed)
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {sorted(SUITES)} or 'all'")
        accepted = {k: v for k, v in params.items() if v is not None}
        report.records.extend(SUITES[n](seed, **accepted))
    return report
