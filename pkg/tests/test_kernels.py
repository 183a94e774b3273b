import numpy as np
import pytest

from quivrep import _accel, fmodule, kernels

from oracles import map_image_size, map_kernel_size, random_hom_matrix


def _batch(rng, src, tgt, count=20):
    return np.stack([random_hom_matrix(rng, src, tgt) for _ in range(count)])


@pytest.mark.parametrize("src,tgt", [((2, 4), (4,)), ((4,), (2, 4)), ((2, 2), (2, 4)), ((4, 4), (4, 4))])
def test_kernel_and_image_sizes(src, tgt):
    rng = np.random.default_rng(1)
    mats = _batch(rng, src, tgt)
    s, t = np.array(src), np.array(tgt)
    want_k = [map_kernel_size(m, src, tgt) for m in mats]
    want_i = [map_image_size(m, src, tgt) for m in mats]
    for impl_k, impl_i in ((kernels.kernel_sizes_nb, kernels.image_sizes_nb), (kernels.kernel_sizes_np, kernels.image_sizes_np)):
        assert impl_k(mats, s, t).tolist() == want_k
        assert impl_i(mats, s, t).tolist() == want_i


@pytest.mark.parametrize("src,tgt,n", [((2, 4), (4,), 4), ((2,), (2, 4), 4), ((3, 6), (6, 2), 6), ((4,), (2, 4), 8)])
def test_coker_invariants_match_library(src, tgt, n):
    rng = np.random.default_rng(2)
    mats = _batch(rng, src, tgt)
    r = fmodule.ring(n)
    a, b = fmodule.module(r, src), fmodule.module(r, tgt)
    got_nb = kernels.coker_invariants_nb(mats, np.array(tgt), n)
    got_np = kernels.coker_invariants_np(mats, np.array(tgt), n)
    assert np.array_equal(got_nb, got_np)
    for m, row in zip(mats, got_nb):
        c, _ = fmodule.cokernel(fmodule.ModuleMap(a, b, m))
        assert sorted(int(d) for d in row if d > 1) == sorted(c.orders)
        assert int(np.prod(row)) * map_image_size(m, src, tgt) == int(np.prod(tgt))


def test_combine_verdicts_backends_agree_with_product():
    rng = np.random.default_rng(3)
    sizes = np.array([3, 4, 2, 5])
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    bits = rng.integers(0, 16, size=int(sizes.sum()))
    bits[:3] = 15
    expected_counts = np.zeros(4, dtype=np.int64)
    bad, first = 0, -1
    for e, idx in enumerate(np.ndindex(*sizes)):
        m = 15
        for v, c in enumerate(idx):
            m &= int(bits[starts[v] + c])
        for b in range(4):
            expected_counts[b] += (m >> b) & 1
        if m not in (0, 15):
            bad += 1
            first = e if first < 0 else first
    for impl in (kernels.combine_verdicts_nb, kernels.combine_verdicts_np):
        counts, got_bad, got_first = impl(bits, starts, sizes, 15)
        assert np.array_equal(counts, expected_counts)
        assert (int(got_bad), int(got_first)) == (bad, first)
    counts, _, _ = kernels.combine_verdicts_np(bits, starts, sizes, 15, chunk=4)
    assert np.array_equal(counts, expected_counts)


def test_backend_flag_reported():
    assert _accel.backend() in ("numba", "numpy")
    assert (_accel.backend() == "numpy") == (not _accel.USE_NUMBA)


@pytest.mark.parametrize("sizes", [[7], [1, 1], [3, 1, 4], [2, 2, 2, 2, 2]])
def test_combine_verdicts_shapes(sizes):
    rng = np.random.default_rng(sum(sizes))
    sizes = np.array(sizes, dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    bits = rng.choice([0, 15, 15, 3, 12], size=int(sizes.sum())).astype(np.int64)
    a = kernels.combine_verdicts_nb(bits, starts, sizes, 15)
    b = kernels.combine_verdicts_np(bits, starts, sizes, 15)
    assert np.array_equal(a[0], b[0]) and int(a[1]) == int(b[1]) and int(a[2]) == int(b[2])
