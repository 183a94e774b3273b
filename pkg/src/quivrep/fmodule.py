"""Finite modules over Z/n and the maps between them.

A module is stored as an explicit cyclic decomposition ``Z/d_1 + ... + Z/d_k``
with every ``d_j > 1`` dividing ``n``.  Modules produced by kernels,
cokernels, Hom and tensor are normalised to invariant-factor form
(``d_1 | d_2 | ...``); direct sums keep the summands side by side so that
summand inclusions are identity blocks.

Elements are integer vectors with ``x_j`` read modulo ``d_j``.  A map
``M -> N`` is a ``len(N) x len(M)`` integer matrix whose column ``j`` is the
image of the ``j``-th generator of ``M``.

Most linear algebra goes through the embedding ``M -> (Z/n)^k`` that sends
``x`` to ``(n/d_j) x_j``; there Howell kernels and Smith diagonalisation over
Z/n do the work.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import gcd, prod

import numpy as np

from . import kernels, linalg
from .linalg import ModularMatrix

SEMISIMPLE = "semisimple"
QUASI_FROBENIUS = "quasi-Frobenius"


class RingMismatch(ValueError):
    pass


def factorize(n):
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class RingSpec:
    """The coefficient ring Z/n."""

    n: int

    def __post_init__(self):
        if not 2 <= self.n <= kernels.MAX_MODULUS:
            raise ValueError(f"unsupported modulus {self.n}")

    @property
    def factorization(self):
        return factorize(self.n)

    @property
    def family(self):
        if all(e == 1 for e in self.factorization.values()):
            return SEMISIMPLE
        return QUASI_FROBENIUS

    @property
    def divisors(self):
        return [d for d in range(1, self.n + 1) if self.n % d == 0]

    def __str__(self):
        return f"Z/{self.n}"


@lru_cache(maxsize=None)
def ring(n):
    return RingSpec(int(n))


def invariant_factors(orders):
    """Invariant factors (ascending divisibility chain) of ``sum Z/d``."""
    by_prime = {}
    for d in orders:
        for p, e in factorize(d).items():
            by_prime.setdefault(p, []).append(p**e)
    if not by_prime:
        return ()
    length = max(len(v) for v in by_prime.values())
    chain = [1] * length
    for powers in by_prime.values():
        powers.sort()
        for k, q in enumerate(powers):
            chain[length - len(powers) + k] *= q
    return tuple(chain)


@dataclass(frozen=True)
class FiniteModule:
    ring: RingSpec
    orders: tuple

    def __post_init__(self):
        orders = tuple(int(d) for d in self.orders)
        for d in orders:
            if d <= 1 or self.ring.n % d:
                raise ValueError(f"cyclic order {d} is not a divisor > 1 of {self.ring.n}")
        object.__setattr__(self, "orders", orders)

    @property
    def rank(self):
        return len(self.orders)

    @property
    def order(self):
        return prod(self.orders)

    @property
    def invariants(self):
        return invariant_factors(self.orders)

    @property
    def is_normalized(self):
        return all(b % a == 0 for a, b in zip(self.orders, self.orders[1:]))

    @property
    def exponent(self):
        e = 1
        for d in self.orders:
            e = e * d // gcd(e, d)
        return e

    @property
    def is_zero(self):
        return not self.orders

    def orders_array(self):
        return np.array(self.orders, dtype=np.int64)

    def reduce(self, x):
        x = np.asarray(x, dtype=np.int64).reshape(-1)
        return x % self.orders_array() if self.orders else x[:0]

    def elements(self):
        """Array with one row per element (row-major over the generators)."""
        return kernels._enumerate_elements_np(self.orders)

    def zero(self):
        return np.zeros(self.rank, dtype=np.int64)

    def isomorphic(self, other):
        return self.ring == other.ring and self.invariants == other.invariants

    def __str__(self):
        if not self.orders:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.orders)

    def __repr__(self):
        return f"FiniteModule({self.ring}, {list(self.orders)})"


def module(ring_or_n, orders=()):
    r = ring_or_n if isinstance(ring_or_n, RingSpec) else ring(ring_or_n)
    return FiniteModule(r, tuple(orders))


def zero_module(r):
    return module(r, ())


def free_module(r, rank):
    r = r if isinstance(r, RingSpec) else ring(r)
    return FiniteModule(r, (r.n,) * rank)


def _check_ring(*mods):
    if not mods:
        return
    n = mods[0].ring.n
    for m in mods:
        if m.ring.n != n:
            rings = sorted({str(x.ring) for x in mods})
            raise RingMismatch(f"modules over different rings: {rings}")


def _rows(x, k):
    """View ``x`` as a matrix with ``k`` columns (tolerating ``k == 0``)."""
    x = np.asarray(x, dtype=np.int64)
    if k == 0:
        return np.zeros((x.shape[0] if x.ndim == 2 else 0, 0), dtype=np.int64)
    return x.reshape(-1, k)


def _scale(m):
    """Column vector n/d_j used by the embedding into (Z/n)^k."""
    return np.array([m.ring.n // d for d in m.orders], dtype=np.int64)


class ModuleMap:
    """Homomorphism ``source -> target`` given by its matrix on generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix, check=True):
        _check_ring(source, target)
        a = np.array(matrix, dtype=np.int64).reshape(target.rank, source.rank)
        if target.rank:
            a %= target.orders_array()[:, None]
        if check and source.rank and target.rank:
            d = source.orders_array()[None, :]
            if ((a * d) % target.orders_array()[:, None]).any():
                raise ValueError("matrix does not define a homomorphism")
        a.setflags(write=False)
        self.source = source
        self.target = target
        self.matrix = a

    @property
    def ring(self):
        return self.source.ring

    def __call__(self, x):
        return self.target.reduce(self.matrix @ np.asarray(x, dtype=np.int64).reshape(-1))

    def apply_rows(self, xs):
        xs = _rows(xs, self.source.rank)
        out = xs @ self.matrix.T
        return out % self.target.orders_array() if self.target.rank else out

    def __matmul__(self, other):
        if other.target != self.source:
            raise ValueError(f"cannot compose {other.target} -> ... with {self.source} -> ...")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other):
        self._same_shape(other)
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        self._same_shape(other)
        return ModuleMap(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self):
        return ModuleMap(self.source, self.target, -self.matrix, check=False)

    def scale(self, k):
        return ModuleMap(self.source, self.target, k * self.matrix, check=False)

    def _same_shape(self, other):
        if other.source != self.source or other.target != self.target:
            raise ValueError("maps have different source or target")

    def __eq__(self, other):
        return (
            isinstance(other, ModuleMap)
            and self.source == other.source
            and self.target == other.target
            and bool((self.matrix == other.matrix).all())
        )

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def __repr__(self):
        return f"ModuleMap({self.source} -> {self.target}, {self.matrix.tolist()})"

    @property
    def is_zero(self):
        return not self.matrix.any()

    def ring_matrix(self):
        """Matrix over Z/n of the map between the embedded modules."""
        return (self.matrix * _scale(self.target)[:, None]) % self.ring.n

    def kernel_generators(self):
        if not self.source.rank:
            return np.zeros((0, 0), dtype=np.int64)
        ker = linalg.kernel(ModularMatrix(self.ring.n, self.ring_matrix()))
        gens = ker.entries % self.source.orders_array()
        return gens[gens.any(axis=1)]

    def is_injective(self):
        return len(self.kernel_generators()) == 0

    def is_surjective(self):
        return image_order(self) == self.target.order

    def is_iso(self):
        return self.source.order == self.target.order and self.is_injective()


def zero_map(source, target):
    return ModuleMap(source, target, np.zeros((target.rank, source.rank), dtype=np.int64), check=False)


def identity(m):
    return ModuleMap(m, m, np.eye(m.rank, dtype=np.int64), check=False)


# --------------------------------------------------------- sub/quotients


def _present(r, relations, k):
    """Normalise ``(Z/n)^k / rowspan(relations)``.

    Returns ``(orders, proj, gens)``: ``proj`` is the ``len(orders) x k``
    coordinate change and ``gens`` the ``len(orders) x k`` matrix of new
    generators written in the old coordinates.
    """
    n = r.n
    rel = _rows(relations, k)
    if k == 0:
        return (), np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64)
    if len(rel) == 0:
        rel = np.zeros((1, k), dtype=np.int64)
    d, V, Vi = kernels.smith(rel, n)
    keep = [t for t in range(k) if d[t] > 1]
    orders = tuple(int(d[t]) for t in keep)
    proj = V[:, keep].T.copy()
    gens = Vi[keep].copy()
    return orders, proj, gens


def subgenerated(m, gens):
    """The submodule of ``m`` generated by the rows of ``gens``.

    Returns ``(K, inclusion)`` with ``K`` in invariant-factor form.
    """
    r = m.ring
    gens = _rows(gens, m.rank)
    if m.rank:
        gens = gens % m.orders_array()
    gens = gens[gens.any(axis=1)] if m.rank else gens[:0]
    if len(gens) == 0:
        k = zero_module(r)
        return k, zero_map(k, m)
    emb = (gens.T * _scale(m)[:, None]) % r.n
    rel = linalg.kernel(ModularMatrix(r.n, emb)).entries
    orders, _, newgens = _present(r, rel, len(gens))
    k = FiniteModule(r, orders)
    incl = ModuleMap(k, m, (newgens @ gens).T, check=False)
    return k, incl


def quotient(m, rels):
    """``m`` modulo the submodule generated by the rows of ``rels``."""
    r = m.ring
    rels = _rows(rels, m.rank)
    if not m.rank:
        return m, identity(m)
    full = np.vstack([rels, np.diag(m.orders_array())])
    orders, proj, _ = _present(r, full, m.rank)
    q = FiniteModule(r, orders)
    return q, ModuleMap(m, q, proj, check=False)


def normalize(m):
    """Isomorphism ``m -> N`` with ``N`` in invariant-factor form."""
    q, proj = quotient(m, np.zeros((0, m.rank), dtype=np.int64))
    return q, proj


def kernel(f):
    """``(K, inclusion)`` for the kernel of ``f``."""
    return subgenerated(f.source, f.kernel_generators())


def image(f):
    return subgenerated(f.target, f.matrix.T)


def cokernel(f):
    """``(C, projection)`` for the cokernel of ``f``."""
    return quotient(f.target, f.matrix.T)


def submodule_order(m, gens):
    gens = _rows(gens, m.rank)
    if not m.rank or len(gens) == 0:
        return 1
    full = np.vstack([gens, np.diag(m.orders_array())])
    orders, _, _ = _present(m.ring, full, m.rank)
    return m.order // prod(orders)


def image_order(f):
    return submodule_order(f.target, f.matrix.T)


def lift(f, y):
    """Some ``x`` with ``f(x) == y``, or ``None``."""
    y = f.target.reduce(y)
    if not f.target.rank:
        return f.source.zero()
    if not f.source.rank:
        return f.source.zero() if not y.any() else None
    n = f.ring.n
    rhs = (y * _scale(f.target)) % n
    res = linalg.solve(ModularMatrix(n, f.ring_matrix()), rhs)
    if res is None:
        return None
    return f.source.reduce(res[0])


def lift_through(f, g):
    """Map ``h`` with ``f @ h == g`` (``g`` and ``f`` share a target), or ``None``."""
    cols = []
    for j in range(g.source.rank):
        x = lift(f, g.matrix[:, j])
        if x is None:
            return None
        cols.append(x)
    mat = np.array(cols, dtype=np.int64).T.reshape(f.source.rank, g.source.rank)
    return ModuleMap(g.source, f.source, mat)


# ----------------------------------------------------------- direct sums


class DirectSum:
    """A direct sum with its (lazily built) inclusions and projections."""

    __slots__ = ("module", "summands", "_maps")

    def __init__(self, module, summands):
        self.module = module
        self.summands = tuple(summands)
        self._maps = None

    def _build(self):
        incs, projs = [], []
        off = 0
        for m in self.summands:
            e = np.zeros((self.module.rank, m.rank), dtype=np.int64)
            e[off:off + m.rank, :] = np.eye(m.rank, dtype=np.int64)
            incs.append(ModuleMap(m, self.module, e, check=False))
            projs.append(ModuleMap(self.module, m, e.T, check=False))
            off += m.rank
        self._maps = (tuple(incs), tuple(projs))

    @property
    def inclusions(self):
        if self._maps is None:
            self._build()
        return self._maps[0]

    @property
    def projections(self):
        if self._maps is None:
            self._build()
        return self._maps[1]


def direct_sum(mods, r=None):
    mods = tuple(mods)
    if not mods:
        if r is None:
            raise ValueError("empty direct sum needs an explicit ring")
        return DirectSum(zero_module(r), ())
    _check_ring(*mods)
    total = FiniteModule(mods[0].ring, sum((m.orders for m in mods), ()))
    return DirectSum(total, mods)


def block_map(source_sum, target_sum, blocks):
    """Assemble a map between direct sums from ``blocks[i][j]: S_j -> T_i``."""
    mat = np.zeros((target_sum.module.rank, source_sum.module.rank), dtype=np.int64)
    ro = 0
    for i, t in enumerate(target_sum.summands):
        co = 0
        for j, s in enumerate(source_sum.summands):
            b = blocks[i][j]
            if b is not None:
                mat[ro:ro + t.rank, co:co + s.rank] = b.matrix
            co += s.rank
        ro += t.rank
    return ModuleMap(source_sum.module, target_sum.module, mat, check=False)


def hstack_maps(maps, target, source_sum):
    """Map ``sum S_j -> target`` restricting to ``maps[j]`` on each summand."""
    mat = np.zeros((target.rank, source_sum.module.rank), dtype=np.int64)
    co = 0
    for f, s in zip(maps, source_sum.summands):
        mat[:, co:co + s.rank] = f.matrix
        co += s.rank
    return ModuleMap(source_sum.module, target, mat, check=False)


def vstack_maps(maps, source, target_sum):
    """Map ``source -> prod T_i`` with components ``maps[i]``."""
    mat = np.zeros((target_sum.module.rank, source.rank), dtype=np.int64)
    ro = 0
    for f, t in zip(maps, target_sum.summands):
        mat[ro:ro + t.rank, :] = f.matrix
        ro += t.rank
    return ModuleMap(source, target_sum.module, mat, check=False)


# --------------------------------------------------------------- Hom, tensor


class HomSpace:
    """``Hom(M, N)`` with the elementary basis ``E_ij : g_j -> (e_i/c_ij) g'_i``."""

    def __init__(self, source, target):
        _check_ring(source, target)
        self.source = source
        self.target = target
        cells, orders, steps = [], [], []
        for i, e in enumerate(target.orders):
            for j, d in enumerate(source.orders):
                c = gcd(d, e)
                if c > 1:
                    cells.append((i, j))
                    orders.append(c)
                    steps.append(e // c)
        self.cells = cells
        self.steps = np.array(steps, dtype=np.int64)
        self.module = FiniteModule(source.ring, tuple(orders))

    def from_coords(self, c):
        c = np.asarray(c, dtype=np.int64).reshape(-1)
        mat = np.zeros((self.target.rank, self.source.rank), dtype=np.int64)
        for (i, j), s, v in zip(self.cells, self.steps, c):
            mat[i, j] = s * v
        return ModuleMap(self.source, self.target, mat, check=False)

    def to_coords(self, f):
        if not self.cells:
            return np.zeros(0, dtype=np.int64)
        idx = tuple(np.array(self.cells).T)
        vals = f.matrix[idx]
        if (vals % self.steps).any():
            raise ValueError("matrix is not a homomorphism")
        return self.module.reduce(vals // self.steps)

    def basis(self):
        eye = np.eye(self.module.rank, dtype=np.int64)
        return [self.from_coords(row) for row in eye]

    def elements(self):
        for c in self.module.elements():
            yield self.from_coords(c)

    def induced(self, other, fn):
        """``ModuleMap`` between Hom modules given by a linear ``fn`` on maps."""
        cols = [other.to_coords(fn(b)) for b in self.basis()]
        mat = np.array(cols, dtype=np.int64).T.reshape(other.module.rank, self.module.rank)
        return ModuleMap(self.module, other.module, mat, check=False)


def hom_module(m, n):
    """``(H, basis)``: ``H`` in invariant-factor form and one map per generator."""
    hs = HomSpace(m, n)
    h, iso = normalize(hs.module)
    inv = lift_through(iso, identity(h))
    basis = [hs.from_coords(inv.matrix[:, t]) for t in range(h.rank)]
    return h, basis


class TensorSpace:
    """``M (x) N`` on the generators ``g_j (x) g'_i`` of order ``gcd(d_j, e_i)``."""

    def __init__(self, left, right):
        _check_ring(left, right)
        self.left = left
        self.right = right
        cells, orders = [], []
        for j, d in enumerate(left.orders):
            for i, e in enumerate(right.orders):
                c = gcd(d, e)
                if c > 1:
                    cells.append((j, i))
                    orders.append(c)
        self.cells = cells
        self.index = {cell: k for k, cell in enumerate(cells)}
        self.module = FiniteModule(left.ring, tuple(orders))

    def pure(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return self.module.reduce(np.array([x[j] * y[i] for j, i in self.cells], dtype=np.int64))


def tensor_module(m, n):
    """``(T, evaluator)`` with ``T`` normalised and ``evaluator(x, y)`` giving ``x (x) y``."""
    ts = TensorSpace(m, n)
    t, iso = normalize(ts.module)
    return t, (lambda x, y: iso(ts.pure(x, y)))


def tensor_maps(f, g, src=None, dst=None):
    """``f (x) g`` between elementary tensor spaces."""
    src = src or TensorSpace(f.source, g.source)
    dst = dst or TensorSpace(f.target, g.target)
    mat = np.zeros((dst.module.rank, src.module.rank), dtype=np.int64)
    for col, (j, i) in enumerate(src.cells):
        fj = f.matrix[:, j]
        gi = g.matrix[:, i]
        for row, (r, s) in enumerate(dst.cells):
            mat[row, col] = fj[r] * gi[s]
    return ModuleMap(src.module, dst.module, mat, check=False)


# ------------------------------------------------------------------- Ext


def free_presentation(m, steps=2):
    """Differentials ``F_steps -> ... -> F_0`` of a free resolution of ``m``.

    ``F_0 = (Z/n)^rank`` maps onto the generators; each further kernel is
    computed by a Howell kernel, with no attempt at minimality.
    """
    n = m.ring.n
    # F_0 -> m is the identity on coordinates; its kernel is generated by d_j e_j
    k0 = np.diag(np.array(m.orders, dtype=np.int64)).reshape(m.rank, m.rank) % n
    diffs = []
    rel = k0[k0.any(axis=1)] if m.rank else k0
    for _ in range(steps):
        d = rel.T.copy()  # columns: images of the new free generators
        diffs.append(d)
        if d.shape[1] == 0:
            rel = np.zeros((0, 0), dtype=np.int64)
            continue
        ker = linalg.kernel(ModularMatrix(n, d)).entries
        rel = ker[ker.any(axis=1)] if len(ker) else ker.reshape(0, d.shape[1])
    return diffs


def _hom_free(d, target):
    """``Hom(F_b, N) -> Hom(F_c, N)`` induced by ``d : F_c -> F_b`` (a ``b x c`` matrix)."""
    b, c = d.shape
    src = direct_sum([target] * b, target.ring)
    dst = direct_sum([target] * c, target.ring)
    blocks = [[identity(target).scale(int(d[s, t])) for s in range(b)] for t in range(c)]
    return block_map(src, dst, blocks)


def homology(alpha, beta):
    """``ker beta / im alpha`` as a normalised module."""
    k, inc = kernel(beta)
    lifted = lift_through(inc, alpha)
    if lifted is None:
        raise ValueError("image of alpha is not inside the kernel of beta")
    h, _ = cokernel(lifted)
    return h


def ext1(m, n):
    """``Ext^1(m, n)`` from a free resolution of ``m``."""
    _check_ring(m, n)
    d1, d2 = free_presentation(m, 2)
    alpha = _hom_free(d1, n)  # Hom(F0,N) -> Hom(F1,N)
    beta = _hom_free(d2, n)  # Hom(F1,N) -> Hom(F2,N)
    if alpha.target != beta.source:
        raise AssertionError("resolution shapes disagree")
    return homology(alpha, beta)


# --------------------------------------------------------------- duality


def dual_plus(m):
    """Character module ``Hom(m, Z/n)`` on the dual generators ``chi_j``."""
    return FiniteModule(m.ring, m.orders)


def dual_matrices(mats, src_orders, tgt_orders):
    """Matrices of ``f^+`` for a batch ``(B, t, s)`` of maps ``f``.

    ``chi_i o f = sum_j f_ij (d_j / e_i) chi_j``; the division is exact
    because ``f`` is well defined.
    """
    mats = np.asarray(mats, dtype=np.int64)
    d = np.asarray(src_orders, dtype=np.int64)
    e = np.asarray(tgt_orders, dtype=np.int64)
    out = np.swapaxes(mats, -1, -2)
    if out.size == 0:
        return out.copy()
    return (out * d[:, None]) // e[None, :]


def dual_plus_map(f):
    """``f^+ : target^+ -> source^+``."""
    mat = dual_matrices(f.matrix, f.source.orders_array(), f.target.orders_array())
    return ModuleMap(dual_plus(f.target), dual_plus(f.source), mat, check=False)


def character_value(m, chi, x):
    """``chi(x)`` in Z/n for ``chi`` in ``m^+`` and ``x`` in ``m``."""
    n = m.ring.n
    return int(np.sum(np.asarray(chi) * np.asarray(x) * _scale(m)) % n)


def double_dual_evaluation(m):
    return ModuleMap(m, dual_plus(dual_plus(m)), np.eye(m.rank, dtype=np.int64), check=False)


# --------------------------------------------------- exact sequences etc.


@dataclass(frozen=True, eq=False)
class ModuleSES:
    """``0 -> A --f--> B --g--> C -> 0``."""

    f: ModuleMap
    g: ModuleMap

    @property
    def terms(self):
        return self.f.source, self.f.target, self.g.target

    def check(self):
        a, b, c = self.terms
        problems = []
        if self.g.source != b:
            problems.append("maps are not composable")
            return problems
        if not (self.g @ self.f).is_zero:
            problems.append("g o f != 0")
        if not self.f.is_injective():
            problems.append("f not injective")
        if not self.g.is_surjective():
            problems.append("g not surjective")
        if a.order * c.order != b.order:
            problems.append("ker g != im f")
        return problems

    def is_exact(self):
        return not self.check()


def injective_hull(m):
    """``0 -> m -> E(m) -> E(m)/m -> 0`` raising each cyclic p-part to full exponent."""
    fac = m.ring.factorization
    hull = []
    for d in m.orders:
        full = prod(p**fac[p] for p in factorize(d))
        hull.append(full)
    e = FiniteModule(m.ring, tuple(hull))
    emb = ModuleMap(m, e, np.diag([h // d for h, d in zip(hull, m.orders)]).reshape(e.rank, m.rank))
    _, proj = cokernel(emb)
    return ModuleSES(emb, proj)


def pushout(f, g):
    """Pushout of ``A <-f- C -g-> B``: ``(P, inA, inB)``."""
    if f.source != g.source:
        raise ValueError("pushout needs maps out of the same module")
    s = direct_sum([f.target, g.target])
    into = vstack_maps([f, -g], f.source, s)
    p, proj = cokernel(into)
    return p, proj @ s.inclusions[0], proj @ s.inclusions[1]


def all_modules(r, max_order):
    """Every normalised module over ``r`` of order at most ``max_order``."""
    divs = [d for d in r.divisors if d > 1]
    out = [zero_module(r)]

    def rec(chain, size):
        for d in divs:
            if (not chain or d % chain[-1] == 0) and size * d <= max_order:
                c = chain + (d,)
                out.append(FiniteModule(r, c))
                rec(c, size * d)

    rec((), 1)
    return out
