import itertools

import numpy as np
import pytest

from quivrep import fmodule
from quivrep.exhaustive import duality_chain, hom_matrices, verdicts_of
from quivrep.quiver import a2_quiver, example_quiver
from quivrep.representation import count_reps, enumerate_reps


@pytest.mark.parametrize("src,tgt", [((2,), (4,)), ((2, 4), (4, 2)), ((), (4,)), ((4,), ()), ((3, 6), (2, 6))])
def test_hom_matrices_match_hom_space(src, tgt):
    n = 12 if 3 in src + tgt or 6 in src + tgt else 4
    r = fmodule.ring(n)
    a, b = fmodule.module(r, src), fmodule.module(r, tgt)
    mats = hom_matrices(src, tgt)
    got = {m.tobytes() for m in mats}
    want = {f.matrix.astype(np.int64).tobytes() for f in fmodule.HomSpace(a, b).elements()}
    assert len(mats) == len(got) == len(want)
    assert got == want


@pytest.mark.parametrize("qf", [a2_quiver, example_quiver])
def test_duality_chain_matches_per_rep_verdicts(qf):
    q = qf()
    rep = duality_chain(q, 4, 4)
    assert rep.ok
    assert rep.total == count_reps(q, fmodule.ring(4), 4)
    counts = [0, 0, 0, 0]
    for x in enumerate_reps(q, 4, 4):
        v = verdicts_of(x)
        assert len(set(v)) == 1
        for k in range(4):
            counts[k] += v[k]
    assert counts == rep.true_counts


def test_duality_chain_flags_a_wrong_class():
    """Pairing Phi(Flat) with Psi(GI) disagrees on Z/2 at a source vertex."""
    rep = duality_chain(a2_quiver(), 4, 2, phi_class="Flat", psi_class="GI")
    assert not rep.ok and rep.disagreements > 0
    v = verdicts_of(rep.counterexample, "Flat", "GI")
    assert len(set(v)) > 1


def test_duality_chain_over_semisimple_ring():
    rep = duality_chain(example_quiver(), 6, 6)
    assert rep.ok and rep.total == count_reps(example_quiver(), fmodule.ring(6), 6)
