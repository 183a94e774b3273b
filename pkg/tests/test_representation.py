from math import prod

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivrep import fmodule, io
from quivrep.fmodule import module
from quivrep.quiver import QuiverError, a2_quiver, example_quiver, loop_quiver, quiver
from quivrep.representation import (
    HoveyTripleSpec,
    RepHom,
    RepMorphism,
    Representation,
    RepresentationError,
    RepSES,
    coker_c,
    cokernel_rep,
    count_reps,
    direct_sum_rep,
    enumerate_reps,
    hovey_membership,
    identity_morphism,
    in_phi_class,
    in_psi_class,
    in_rep_class,
    is_flat_rep,
    is_gorenstein_flat_rep,
    is_pgf_rep,
    is_projective_rep,
    kernel_rep,
    ker_k,
    phi,
    phi_failure,
    psi,
    random_phi_rep,
    random_rep,
    stalk,
    zero_rep,
)
from quivrep.pathring import indecomposable_projective

from helpers import example_rep_injective_phi, example_rep_noninjective_phi, brute_hom_count


def test_phi_at_source_is_zero_map():
    x = example_rep_injective_phi()
    f = phi(x, "1")
    assert f.source.is_zero and f.is_injective()


def test_phi_injective_example():
    x = example_rep_injective_phi()
    assert phi(x, "3").is_injective()
    assert coker_c(x, "3")[0].orders == (2,)


def test_phi_noninjective_example():
    x = example_rep_noninjective_phi()
    f = phi(x, "3")
    assert not f.is_injective()
    assert not f([2, 1]).any()
    assert phi_failure(x, "GF")[:2] == ("3", "phi not injective")


def test_psi_examples():
    x = example_rep_injective_phi()
    k, _ = ker_k(x, "4")
    assert k == x.modules["4"]
    assert psi(x, "4").target.is_zero
    r = fmodule.ring(4)
    s = stalk(a2_quiver(), "1", module(r, (2,)))
    assert psi(s, "1").is_zero and ker_k(s, "1")[0].isomorphic(module(r, (2,)))


def test_class_memberships():
    r = fmodule.ring(4)
    z = zero_rep(example_quiver(), r)
    for tag in ("Flat", "GF", "Prj", "Cot"):
        assert in_phi_class(z, tag) and in_psi_class(z, tag) and in_rep_class(z, tag)
    x = example_rep_injective_phi()
    assert in_phi_class(x, "GF") and is_gorenstein_flat_rep(x)
    assert not in_phi_class(x, "Flat") and not is_flat_rep(x)
    assert not is_projective_rep(x) and is_pgf_rep(x)
    bad = example_rep_noninjective_phi()
    for tag in ("GF", "Flat", "Prj", "Cot"):
        assert not in_phi_class(bad, tag)


def test_projective_and_non_projective_examples():
    r = fmodule.ring(4)
    for v in "1234":
        assert is_projective_rep(indecomposable_projective(example_quiver(), r, v)[0])
    x = Representation(example_quiver(), r, {"1": module(r, (4,)), "3": module(r, (4,))}, {"a": [[1]]})
    assert not phi(x, "4").is_injective()
    assert not is_projective_rep(x)


def test_semisimple_ring_gf_iff_phi_injective():
    q = a2_quiver()
    for x in enumerate_reps(q, 6, 6):
        assert is_gorenstein_flat_rep(x) == phi(x, "2").is_injective()


def test_cycle_rejected_by_rooted_predicates():
    x = zero_rep(loop_quiver(), fmodule.ring(4))
    with pytest.raises(QuiverError):
        is_gorenstein_flat_rep(x)


def test_construction_errors():
    r = fmodule.ring(4)
    with pytest.raises(RepresentationError):
        Representation(a2_quiver(), r, {"1": module(r, (2,))}, {"zz": [[1]]})
    with pytest.raises(QuiverError):
        Representation(a2_quiver(), r, {"9": module(r, (2,))})
    with pytest.raises(fmodule.RingMismatch):
        Representation(a2_quiver(), r, {"1": module(8, (2,))})
    x = Representation(a2_quiver(), r, {"1": module(r, (4,)), "2": module(r, (4,))}, {"a": [[1]]})
    y = Representation(a2_quiver(), r, {"1": module(r, (4,)), "2": module(r, (4,))}, {"a": [[2]]})
    with pytest.raises(RepresentationError):
        RepMorphism(x, y, {"1": [[1]], "2": [[1]]})


def test_enumeration_counts():
    reps = list(enumerate_reps(a2_quiver(), 2, 2))
    assert len(reps) == 5 == count_reps(a2_quiver(), fmodule.ring(2), 2)
    assert len(set(reps)) == 5
    assert [x.is_zero for x in enumerate_reps(example_quiver(), 4, 1)] == [True]
    app = list(enumerate_reps(example_quiver(), 2, 2))
    # 16 vertex patterns; each arrow between two copies of Z/2 doubles the count
    brute = 0
    for bits in np.ndindex(2, 2, 2, 2):
        b = dict(zip("1234", bits))
        brute += 2 ** sum(b[s] * b[t] for s, t in (("1", "3"), ("2", "3"), ("3", "4")))
    assert len(app) == brute == count_reps(example_quiver(), fmodule.ring(2), 2)


def test_enumeration_limit():
    with pytest.raises(RepresentationError):
        list(enumerate_reps(example_quiver(), 4, 8, limit=100))


@pytest.mark.parametrize("n,qf", [(2, a2_quiver), (4, a2_quiver), (4, example_quiver), (6, a2_quiver)])
def test_rep_hom_order_matches_brute_force(n, qf):
    rng = np.random.default_rng(11)
    q = qf()
    for _ in range(25):
        x = random_rep(q, n, rng, max_order=4)
        y = random_rep(q, n, rng, max_order=4)
        h = RepHom(x, y)
        assert h.order == brute_hom_count(x, y)
        for f in h.elements():
            assert f.is_natural()


def test_fast_and_reference_defect_maps_agree():
    rng = np.random.default_rng(12)
    quivers = [a2_quiver(), example_quiver(), loop_quiver(), quiver("12", [("a", "1", "2"), ("b", "2", "1"), ("c", "1", "2")])]
    for n in (4, 6, 8, 12):
        for q in quivers:
            for _ in range(10):
                x = random_rep(q, n, rng, max_order=16)
                y = random_rep(q, n, rng, max_order=16)
                h = RepHom(x, y)
                assert h.defect == h._defect_map_slow()


def test_random_phi_rep_members():
    rng = np.random.default_rng(13)
    for pred in ("GF", "Flat", "Prj"):
        for _ in range(10):
            x = random_phi_rep(example_quiver(), fmodule.ring(4), rng, pred)
            assert in_phi_class(x, pred)


def test_kernel_and_cokernel_reps_form_exact_sequence():
    rng = np.random.default_rng(14)
    q = example_quiver()
    for _ in range(20):
        x = random_rep(q, 4, rng, max_order=4)
        y = random_rep(q, 4, rng, max_order=4)
        fams = list(RepHom(x, y).elements())
        f = fams[int(rng.integers(len(fams)))]
        k, inc = kernel_rep(f)
        c, proj = cokernel_rep(f)
        assert inc.is_natural() and proj.is_natural()
        assert (f @ inc).is_zero and (proj @ f).is_zero
        for v in q.vertices:
            img = fmodule.image_order(f.maps[v])
            assert k.modules[v].order * img == x.modules[v].order
            assert c.modules[v].order * img == y.modules[v].order


def test_direct_sum_and_identity():
    x = example_rep_injective_phi()
    s, _ = direct_sum_rep(x, example_rep_noninjective_phi())
    assert s.order == x.order * example_rep_noninjective_phi().order
    assert not in_phi_class(s, "GF")
    ses = RepSES(identity_morphism(x), RepMorphism(x, zero_rep(x.quiver, x.ring), {}, check=False))
    assert ses.is_exact()


def test_hovey_flags():
    r = fmodule.ring(4)
    assert hovey_membership(zero_rep(example_quiver(), r)) == {"cofibrant": True, "trivial": True, "fibrant": True}
    rng = np.random.default_rng(15)
    for _ in range(30):
        assert hovey_membership(random_rep(example_quiver(), r, rng))["fibrant"]
    flags = hovey_membership(example_rep_injective_phi(), HoveyTripleSpec.gf_pgf_cot())
    assert flags["cofibrant"] and not flags["trivial"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_json_roundtrip(seed):
    x = random_rep(example_quiver(), 12, np.random.default_rng(seed), max_order=12)
    assert io.rep_from_json(io.rep_to_json(x)) == x
