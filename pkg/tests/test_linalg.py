import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivrep import kernels
from quivrep.linalg import DimensionError, ModularMatrix, howell_form, howell_rows, kernel, row_span, solve

from oracles import null_vectors, span


def test_howell_already_canonical():
    h, u = howell_form(ModularMatrix(4, [[2]]))
    assert h.tolist()[0] == [2]
    assert h.entries[1:].sum() == 0
    assert int(u.entries[0, 0]) == 1


def test_howell_identity_led_row():
    h, _ = howell_form(ModularMatrix(6, [[1, 1], [0, 0]]))
    assert h.tolist()[0] == [1, 1]
    assert not h.entries[1:].any()


def test_howell_span_of_22_mod_4():
    m = ModularMatrix(4, [[2, 2]])
    assert span(howell_rows(m), 4, 2) == {(0, 0), (2, 2)}


def test_howell_transform_relation():
    m = ModularMatrix(12, [[4, 6, 3], [2, 0, 9]])
    h, u = howell_form(m)
    padded = np.vstack([m.entries, np.zeros((3, 3), dtype=np.int64)])
    assert (u @ ModularMatrix(12, padded)) == h


def test_solve_examples():
    x, ker = solve(ModularMatrix(4, [[2]]), [2])
    assert int(x[0]) in (1, 3)
    assert span(ker.entries, 4, 1) == {(0,), (2,)}
    x, ker = solve(ModularMatrix(5, [[1]]), [0])
    assert int(x[0]) == 0 and span(ker.entries, 5, 1) == {(0,)}
    assert solve(ModularMatrix(4, [[2]]), [1]) is None


def test_solve_dimension_error():
    with pytest.raises(DimensionError):
        solve(ModularMatrix(4, [[1, 2]]), [1, 2])


def test_kernel_examples():
    k = kernel(ModularMatrix(4, [[2, 2]]))
    assert span(k.entries, 4, 2) == {(x, y) for x in range(4) for y in range(4) if (x + y) % 2 == 0}
    assert span(kernel(ModularMatrix.identity(6, 3)).entries, 6, 3) == {(0, 0, 0)}
    assert span(kernel(ModularMatrix.zeros(4, 1, 1)).entries, 4, 1) == {(0,), (1,), (2,), (3,)}


def test_modulus_bounds():
    with pytest.raises(ValueError):
        ModularMatrix(1, [[0]])


matrices = st.integers(2, 8).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.integers(1, 3).flatmap(
            lambda r: st.integers(1, 3).flatmap(
                lambda c: st.lists(st.lists(st.integers(0, n - 1), min_size=c, max_size=c), min_size=r, max_size=r)
            )
        ),
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_howell_preserves_span(nm):
    n, rows = nm
    m = ModularMatrix(n, rows)
    k = m.cols
    assert span(howell_rows(m), n, k) == span(m.entries, n, k)
    assert row_span(m) == span(m.entries, n, k)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_howell_is_canonical(nm):
    """Two matrices with equal span have identical Howell bases."""
    n, rows = nm
    m = ModularMatrix(n, rows)
    shuffled = ModularMatrix(n, np.vstack([m.entries[::-1], (3 * m.entries[:1]) % n]))
    assert np.array_equal(howell_rows(m), howell_rows(shuffled))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_kernel_matches_brute_force(nm):
    n, rows = nm
    a = ModularMatrix(n, rows)
    assert span(kernel(a).entries, n, a.cols) == null_vectors(a.entries, n)


@settings(max_examples=150, deadline=None)
@given(matrices, st.data())
def test_solve_matches_brute_force(nm, data):
    n, rows = nm
    a = ModularMatrix(n, rows)
    b = np.array(data.draw(st.lists(st.integers(0, n - 1), min_size=a.rows, max_size=a.rows)))
    res = solve(a, b)
    solvable = any(not ((a.entries @ np.array(x) - b) % n).any() for x in np.ndindex(*([n] * a.cols)))
    assert (res is not None) == solvable
    if res is not None:
        x, ker = res
        assert not ((a.entries @ x - b) % n).any()
        assert span(ker.entries, n, a.cols) == null_vectors(a.entries, n)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_quotient_order(nm):
    """The Smith diagonal gives the order of (Z/n)^k / rowspan."""
    n, rows = nm
    a = np.array(rows, dtype=np.int64)
    d, V, Vi = kernels.smith(a, n)
    k = a.shape[1]
    assert int(np.prod(d)) * len(span(a, n, k)) == n**k
    assert not ((V @ Vi) % n - np.eye(k, dtype=np.int64)).any()


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_numba_and_numpy_kernels_agree(nm):
    n, rows = nm
    a = np.array(rows, dtype=np.int64)
    h1, u1 = kernels.howell_nb(a, n)
    h2, u2 = kernels.howell_np(a, n)
    assert np.array_equal(h1[h1.any(axis=1)], h2[h2.any(axis=1)])
    assert np.array_equal(kernels.smith_nb(a, n)[0], kernels.smith_np(a, n)[0])
