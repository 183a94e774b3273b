import json

import numpy as np
import pytest

from quivrep import classes, fmodule, io
from quivrep.constructions import (
    ConstructionError,
    ConstructionTrace,
    check_cogenerator_preconditions,
    cogenerator_construct,
    colimit_stage,
    core_equality_check,
    extend_along,
    flat_cot_pair,
    identity_ses,
    injective_hull_cogenerator,
    nine_lemma,
    padded_ses,
    gf_pgf_cot_triple,
    trivial_objects_construct,
    truncate,
    verify_trace,
    w_witness,
)
from quivrep.fmodule import ModuleMap, ModuleSES, module
from quivrep.pathring import splits_over_path_ring
from quivrep.quiver import a2_quiver, example_quiver, loop_quiver, QuiverError
from quivrep.representation import (
    in_phi_class,
    in_rep_class,
    is_projective_rep,
    random_phi_rep,
    random_rep,
    zero_rep,
)

from helpers import example_rep_injective_phi

R4 = fmodule.ring(4)


def _z2_z4_z2():
    z2, z4 = module(R4, (2,)), module(R4, (4,))
    return ModuleSES(ModuleMap(z2, z4, [[2]]), ModuleMap(z4, z2, [[1]]))


def test_nine_lemma_with_injective_hulls():
    ses = _z2_z4_z2()
    hull = fmodule.injective_hull(module(R4, (2,)))
    d = nine_lemma(ses, hull, hull)
    assert d.check() == []
    assert d.middle.f.target.orders == (4, 4)
    assert d.center.f.is_injective()
    assert (d.extension @ ses.f) == hull.f


def test_nine_lemma_zero_ends():
    z = fmodule.zero_module(R4)
    ses = identity_ses(z)
    d = nine_lemma(ses, identity_ses(z), identity_ses(z))
    assert d.check() == [] and d.middle.f.target.is_zero


def test_nine_lemma_split_is_sum_of_approximations():
    z2, z4 = module(R4, (2,)), module(R4, (4,))
    ses = padded_ses(z2, z4)
    a1 = fmodule.injective_hull(z2)
    a3 = identity_ses(z4)
    d = nine_lemma(ses, a1, a3)
    assert d.check() == []
    assert d.center.f.target.isomorphic(module(R4, (4, 4)))
    assert d.bottom.f.source.isomorphic(module(R4, (2,))) and d.bottom.g.target.is_zero


def test_nine_lemma_reports_ext_obstruction():
    ses = _z2_z4_z2()
    with pytest.raises(ConstructionError) as err:
        nine_lemma(ses, identity_ses(module(R4, (2,))), fmodule.injective_hull(module(R4, (2,))))
    assert err.value.witness["ext1"] == "Z/2"


def test_extend_along():
    ses = _z2_z4_z2()
    assert extend_along(ses.f, fmodule.identity(module(R4, (2,)))) is None
    e = extend_along(ses.f, ModuleMap(module(R4, (2,)), module(R4, (4,)), [[2]]))
    assert e is not None and (e @ ses.f).matrix.tolist() == [[2]]


def test_cogenerator_example_on_example():
    x = example_rep_injective_phi()
    ses, trace = cogenerator_construct(x, flat_cot_pair(R4), injective_hull_cogenerator(R4))
    assert [s.alpha for s in trace.stages] == [0, 1, 2, 3]
    assert trace.stages[1].ses.terms[1].modules["1"].orders == (4,)
    assert trace.stages[1].ses.f.maps["1"].matrix.tolist() == [[2]]
    assert verify_trace(trace) == []
    assert ses.is_exact()
    assert in_phi_class(ses.terms[1], "Flat") and in_phi_class(ses.terms[2], "GF")


def test_cogenerator_zero_rep():
    ses, trace = cogenerator_construct(zero_rep(example_quiver(), R4), flat_cot_pair(R4), injective_hull_cogenerator(R4))
    assert len(trace.stages) == 4
    assert ses.terms[1].is_zero and ses.terms[2].is_zero
    assert verify_trace(trace) == []


@pytest.mark.parametrize("variant", ["degenerate", "padded", "hull"])
def test_cogenerator_random_inputs(variant):
    rng = np.random.default_rng(41)
    for q in (a2_quiver(), example_quiver()):
        for _ in range(10):
            x = random_phi_rep(q, R4, rng, "GF")
            ses, trace = cogenerator_construct(x, flat_cot_pair(R4, variant), injective_hull_cogenerator(R4))
            assert verify_trace(trace) == []


def test_cogenerator_rejects_bad_input():
    from helpers import example_rep_noninjective_phi

    with pytest.raises(ConstructionError):
        cogenerator_construct(example_rep_noninjective_phi(), flat_cot_pair(R4), injective_hull_cogenerator(R4))
    with pytest.raises(QuiverError):
        cogenerator_construct(zero_rep(loop_quiver(), R4), flat_cot_pair(R4), injective_hull_cogenerator(R4))


def test_verify_trace_detects_tampering():
    x = example_rep_injective_phi()
    _, trace = cogenerator_construct(x, flat_cot_pair(R4), injective_hull_cogenerator(R4))
    trace.stages.pop(2)
    assert verify_trace(trace)
    _, trace = cogenerator_construct(x, flat_cot_pair(R4), injective_hull_cogenerator(R4))
    trace.classes["W"] = "Prj"
    trace.classes["X"] = "Flat"
    assert verify_trace(trace)


def test_trace_json_roundtrip():
    x = example_rep_injective_phi()
    _, trace = cogenerator_construct(x, flat_cot_pair(R4, "padded"), injective_hull_cogenerator(R4))
    text = io.dumps(trace.to_json())
    back = ConstructionTrace.from_json(json.loads(text))
    assert verify_trace(back) == []
    assert io.dumps(back.to_json()) == text
    inj = [m for m in fmodule.all_modules(R4, 16) if classes.oracle("Inj", R4)(m)]
    y = random_rep(example_quiver(), R4, np.random.default_rng(3), modules=inj)
    _, trace = trivial_objects_construct(y, gf_pgf_cot_triple(R4))
    back = ConstructionTrace.from_json(json.loads(io.dumps(trace.to_json())))
    assert verify_trace(back) == []


def test_trivial_objects_random():
    rng = np.random.default_rng(42)
    inj = [m for m in fmodule.all_modules(R4, 16) if classes.oracle("Inj", R4)(m)]
    for variant in ("padded", "degenerate"):
        for _ in range(10):
            x = random_rep(example_quiver(), R4, rng, modules=inj)
            ses, trace = trivial_objects_construct(x, gf_pgf_cot_triple(R4, variant))
            assert verify_trace(trace) == []
            assert in_rep_class(ses.terms[1], "Prj") and is_projective_rep(ses.terms[2])


def test_trivial_objects_degenerate_witnesses():
    """Projective values with injective phi: identity witnesses, B' = 0."""
    z4 = module(R4, (4,))
    from quivrep.representation import Representation

    x = Representation(a2_quiver(), R4, {"1": z4, "2": module(R4, (4, 4))}, {"a": [[1], [0]]})
    ses, trace = trivial_objects_construct(x, gf_pgf_cot_triple(R4, "degenerate"))
    assert verify_trace(trace) == []
    assert ses.terms[2].is_zero


def test_trivial_objects_rejects_input_outside_w():
    from quivrep.representation import stalk

    with pytest.raises(ConstructionError):
        trivial_objects_construct(stalk(a2_quiver(), "1", module(R4, (2,))), gf_pgf_cot_triple(R4))


def test_trivial_ladder_is_vertexwise_only():
    """The inter-stage maps commute with k and h but can fail naturality."""
    rng = np.random.default_rng(43)
    inj = [m for m in fmodule.all_modules(R4, 16) if classes.oracle("Inj", R4)(m)]
    seen_non_natural = False
    for _ in range(20):
        x = random_rep(example_quiver(), R4, rng, modules=inj)
        _, trace = trivial_objects_construct(x, gf_pgf_cot_triple(R4))
        for s in trace.stages[2:]:
            assert all(m.is_injective() for m in s.ladder)
            seen_non_natural |= any(m.naturality_defects() for m in s.ladder)
    assert seen_non_natural


def test_w_witness_examples():
    inj = classes.oracle("Inj", R4)
    every = lambda m: True
    assert w_witness(module(R4, (2,)), (every, inj, every)) is None
    z4 = module(R4, (4,))
    s = w_witness(z4, (every, inj, every))
    assert s.f == fmodule.identity(z4)
    assert w_witness(fmodule.zero_module(R4), (every, inj, every)).f.source.is_zero


def test_w_witness_finds_nontrivial_witness():
    """With C = Prj the witness must embed into a projective with projective quotient."""
    prj = classes.oracle("Prj", R4)
    every = lambda m: True
    s = w_witness(module(R4, (2,)), (every, every, prj))
    assert s is not None and s.is_exact() and prj(s.f.target)


def test_colimit_of_repeated_stages():
    x = example_rep_injective_phi()
    _, trace = cogenerator_construct(x, flat_cot_pair(R4), injective_hull_cogenerator(R4))
    assert colimit_stage(trace.stages) is trace.stages[-1]
    assert colimit_stage(trace.stages + [trace.stages[-1]]).ses is trace.stages[-1].ses
    with pytest.raises(ValueError):
        colimit_stage([])


def test_truncate():
    x = example_rep_injective_phi()
    t = truncate(x, {"1", "2"})
    assert t.modules["3"].is_zero and t.modules["1"] == x.modules["1"]


def test_cogenerator_preconditions_hold_over_z4():
    assert check_cogenerator_preconditions(R4, "GF", "Flat", "Cot", max_order=4) == []


def test_core_equality_examples():
    rep = core_equality_check(("GF", "GFperp"), ("Flat", "Cot"), a2_quiver(), R4, reference=splits_over_path_ring)
    assert rep.equal and rep.checked == 49
    r6 = fmodule.ring(6)
    rep = core_equality_check(("GF", "GFperp"), ("Flat", "Cot"), a2_quiver(), r6, max_order=6)
    assert rep.equal
    from quivrep.representation import enumerate_reps, phi

    phi_ok = {i for i, x in enumerate(enumerate_reps(a2_quiver(), r6, 6)) if phi(x, "2").is_injective()}
    assert rep.left == phi_ok
    assert 0 in rep.left  # the zero representation is enumerated first


def test_core_equality_detects_a_mismatch():
    rep = core_equality_check(("GF", "Cot"), ("Flat", "Cot"), a2_quiver(), R4)
    assert not rep.equal and rep.counterexamples


def test_module_sequences():
    z2 = module(R4, (2,))
    assert identity_ses(z2).is_exact()
    assert padded_ses(z2, module(R4, (4,))).is_exact()
