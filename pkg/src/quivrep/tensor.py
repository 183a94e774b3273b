"""Hom into a module, the quiver tensor product, and character duality.

For ``Y`` a representation of the opposite quiver and ``X`` one of ``Q``, the
tensor product is presented as the coend

    coker( sum_{a: i -> j} Y(j) (x) X(i)  -->  sum_i Y(i) (x) X(i) )

with ``y (x) x  |->  [Y(a^op) y (x) x]_i - [y (x) X(a) x]_j``.  Its adequacy is
certified by :func:`verify_adjunction`, which checks the adjunction with
``Hom(X, -)`` elementwise.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from . import fmodule
from .fmodule import HomSpace, ModuleMap, TensorSpace
from .quiver import Arrow, Quiver, is_left_rooted, opposite
from .representation import (
    RepHom,
    RepMorphism,
    RepSES,
    Representation,
    RepresentationError,
    in_phi_class,
    is_flat_rep,
    phi,
    psi,
    stalk,
)


def _check_pair(y, x):
    if y.quiver != opposite(x.quiver):
        raise RepresentationError("first argument must live on the opposite quiver")
    if y.ring != x.ring:
        raise fmodule.RingMismatch(f"{y.ring} vs {x.ring}")


# ------------------------------------------------------------- Hom(X, G)


@dataclass(frozen=True, eq=False)
class HomRep:
    """``Hom(X, G)`` on the opposite quiver with the elementary Hom coordinates."""

    rep: Representation
    spaces: dict


def hom_rep(x, g):
    q = x.quiver
    spaces = {v: HomSpace(x.modules[v], g) for v in q.vertices}
    mods = {v: hs.module for v, hs in spaces.items()}
    maps = {}
    for a in q.arrows:
        # a: i -> j becomes a^op: j -> i, acting by precomposition with X(a)
        src, dst = spaces[a.target], spaces[a.source]
        xa = x.maps[a.name]
        maps[a.name] = src.induced(dst, lambda h, xa=xa: h @ xa)
    return HomRep(Representation(opposite(q), x.ring, mods, maps), spaces)


def hom_rep_map(x, u, source=None, target=None):
    """``Hom(X, u): Hom(X, G) -> Hom(X, G')`` for a module map ``u: G -> G'``."""
    source = source or hom_rep(x, u.source)
    target = target or hom_rep(x, u.target)
    fam = {
        v: source.spaces[v].induced(target.spaces[v], lambda h: u @ h) for v in x.quiver.vertices
    }
    return RepMorphism(source.rep, target.rep, fam, check=False)


# ------------------------------------------------------------- tensor


@dataclass(frozen=True, eq=False)
class TensorResult:
    value: fmodule.FiniteModule
    projection: ModuleMap  # slot sum -> value
    slots: fmodule.DirectSum  # sum_i Y(i) (x) X(i) on elementary tensor generators
    spaces: dict  # vertex -> TensorSpace(Y(i), X(i))
    relations: np.ndarray  # rows: relation vectors in the slot sum

    def slot_element(self, i, y, x):
        k = list(self.spaces).index(i)
        return self.slots.inclusions[k](self.spaces[i].pure(y, x))

    def pure(self, i, y, x):
        """Class of ``y (x) x`` placed in slot ``i``."""
        return self.projection(self.slot_element(i, y, x))


def _unit(rank, j):
    e = np.zeros(rank, dtype=np.int64)
    e[j] = 1
    return e


def tensor_rep(y, x):
    _check_pair(y, x)
    q = x.quiver
    spaces = {v: TensorSpace(y.modules[v], x.modules[v]) for v in q.vertices}
    slots = fmodule.direct_sum([spaces[v].module for v in q.vertices], x.ring)
    idx = {v: k for k, v in enumerate(q.vertices)}
    rels = []
    for a in q.arrows:
        i, j = a.source, a.target
        ya = y.maps[a.name]  # Y(j) -> Y(i)
        xa = x.maps[a.name]  # X(i) -> X(j)
        ym, xm = y.modules[j], x.modules[i]
        for s in range(ym.rank):
            for t in range(xm.rank):
                if gcd(ym.orders[s], xm.orders[t]) == 1:
                    continue
                ey, ex = _unit(ym.rank, s), _unit(xm.rank, t)
                left = slots.inclusions[idx[i]](spaces[i].pure(ya(ey), ex))
                right = slots.inclusions[idx[j]](spaces[j].pure(ey, xa(ex)))
                rels.append(left - right)
    rels = np.array(rels, dtype=np.int64).reshape(len(rels), slots.module.rank)
    value, proj = fmodule.quotient(slots.module, rels)
    return TensorResult(value, proj, slots, spaces, rels)


def tensor_order(y, x):
    _check_pair(y, x)
    t = tensor_rep(y, x)
    return t.value.order


def tensor_map(u, x, src=None, dst=None):
    """``u (x) X: Y' (x) X -> Y (x) X`` induced by ``u: Y' -> Y``."""
    src = src or tensor_rep(u.source, x)
    dst = dst or tensor_rep(u.target, x)
    cols = []
    q = x.quiver
    for k in range(src.value.rank):
        pre = fmodule.lift(src.projection, _unit(src.value.rank, k))
        img = np.zeros(dst.slots.module.rank, dtype=np.int64)
        for vi, v in enumerate(q.vertices):
            piece = src.slots.projections[vi](pre)
            ts_src, ts_dst = src.spaces[v], dst.spaces[v]
            f = fmodule.tensor_maps(u.maps[v], fmodule.identity(x.modules[v]), ts_src, ts_dst)
            img = img + dst.slots.inclusions[vi](f(piece))
        cols.append(dst.projection(img))
    mat = np.array(cols, dtype=np.int64).T.reshape(dst.value.rank, src.value.rank)
    return ModuleMap(src.value, dst.value, mat)


# ---------------------------------------------------------- adjunction


@dataclass
class AdjunctionReport:
    lhs_order: int
    rhs_order: int
    natural: bool
    injective: bool
    naturality_in_g: bool = True
    elementwise: bool = True

    @property
    def ok(self):
        return (
            self.lhs_order == self.rhs_order
            and self.natural
            and self.injective
            and self.naturality_in_g
        )


def adjunction_map(t, x, g, hr, rh):
    """Linear map ``Hom(Y (x) X, G) -> sum_i Hom(Y(i), Hom(X(i), G))``.

    ``h`` goes to the family ``f(i)(y)(x) = h([y (x) x]_i)``.
    """
    lhs = HomSpace(t.value, g)
    q = x.quiver
    cols = []
    for b in lhs.basis():
        fam = {}
        for v in q.vertices:
            ym, xm = rh.x.modules[v], x.modules[v]
            hs = hr.spaces[v]
            mat = np.zeros((hs.module.rank, ym.rank), dtype=np.int64)
            for s in range(ym.rank):
                mx = np.zeros((g.rank, xm.rank), dtype=np.int64)
                for k in range(xm.rank):
                    mx[:, k] = b(t.pure(v, _unit(ym.rank, s), _unit(xm.rank, k)))
                mat[:, s] = hs.to_coords(ModuleMap(xm, g, mx, check=False))
            fam[v] = ModuleMap(ym, hs.module, mat, check=False)
        cols.append(rh.encode(RepMorphism(rh.x, rh.y, fam, check=False)))
    total = rh.total.module
    mat = np.array(cols, dtype=np.int64).T.reshape(total.rank, lhs.module.rank)
    return lhs, ModuleMap(lhs.module, total, mat, check=False)


def verify_adjunction(y, x, g, g_map=None, elementwise_cap=1 << 16):
    """Check ``Hom(Y (x) X, G) = Hom(Y, Hom(X, G))`` via the canonical map.

    Every element of the left side is sent to a family; each family must be
    natural, the families must be pairwise distinct, and both sides must have
    the same size.  With ``g_map: G -> G'`` the naturality square in ``G`` is
    checked on every element too.
    """
    _check_pair(y, x)
    t = tensor_rep(y, x)
    hr = hom_rep(x, g)
    rh = RepHom(y, hr.rep)
    lhs, can = adjunction_map(t, x, g, hr, rh)
    report = AdjunctionReport(lhs.module.order, rh.order, True, True)
    if lhs.module.order <= elementwise_cap:
        elems = lhs.module.elements()
        images = can.apply_rows(elems)
        defects = rh.defect.apply_rows(images)
        report.natural = not defects.any()
        report.injective = len({row.tobytes() for row in images}) == len(elems)
    else:
        report.elementwise = False
        report.natural = (rh.defect @ can).is_zero
        report.injective = can.is_injective()
    if g_map is not None:
        report.naturality_in_g = _check_naturality_in_g(t, y, x, g_map, lhs, can, hr, rh)
    return report


def _check_naturality_in_g(t, y, x, u, lhs, can, hr, rh):
    g2 = u.target
    hr2 = hom_rep(x, g2)
    rh2 = RepHom(y, hr2.rep)
    lhs2, can2 = adjunction_map(t, x, g2, hr2, rh2)
    push = hom_rep_map(x, u, hr, hr2)
    for c in lhs.module.elements():
        h = lhs.from_coords(c)
        left = can2(lhs2.to_coords(u @ h))
        fam = rh.decode(can(c))
        moved = RepMorphism(y, hr2.rep, {v: push.maps[v] @ fam.maps[v] for v in y.quiver.vertices}, check=False)
        if not np.array_equal(rh2.total.module.reduce(left), rh2.total.module.reduce(rh2.encode(moved))):
            return False
    return True


# ----------------------------------------------------------------- swap


def swap_map(y, x, g):
    """``zeta: Hom(Y, Hom(X, G)) -> Hom(X, Hom(Y, G))``, ``f'(i)(x)(y) = f(i)(y)(x)``.

    Returns ``(source RepHom, target RepHom, linear map between their
    vertexwise totals)``.
    """
    _check_pair(y, x)
    hx = hom_rep(x, g)
    hy = hom_rep(y, g)
    src = RepHom(y, hx.rep)
    dst = RepHom(x, hy.rep)
    cols = []
    q = x.quiver
    for c in np.eye(src.total.module.rank, dtype=np.int64):
        f = src.decode(c)
        fam = {}
        for v in q.vertices:
            xm, ym = x.modules[v], y.modules[v]
            hs = hy.spaces[v]
            mat = np.zeros((hs.module.rank, xm.rank), dtype=np.int64)
            for k in range(xm.rank):
                my = np.zeros((g.rank, ym.rank), dtype=np.int64)
                for s in range(ym.rank):
                    phi_s = hx.spaces[v].from_coords(f.maps[v](_unit(ym.rank, s)))
                    my[:, s] = phi_s(_unit(xm.rank, k))
                mat[:, k] = hs.to_coords(ModuleMap(ym, g, my, check=False))
            fam[v] = ModuleMap(xm, hs.module, mat, check=False)
        cols.append(dst.encode(RepMorphism(x, hy.rep, fam, check=False)))
    mat = np.array(cols, dtype=np.int64).T.reshape(dst.total.module.rank, src.total.module.rank)
    return src, dst, ModuleMap(src.total.module, dst.total.module, mat, check=False)


def verify_swap(y, x, g):
    src, dst, zeta = swap_map(y, x, g)
    if src.order != dst.order:
        return False
    k, inc = src.module()
    elems = inc.apply_rows(k.elements())
    images = zeta.apply_rows(elems)
    if dst.defect.apply_rows(images).any():
        return False
    return len({r.tobytes() for r in images}) == len(elems)


# --------------------------------------------------------------- duality


def char_dual_rep(x):
    """``X^+`` on the opposite quiver: ``X^+(i) = X(i)^+``, ``X^+(a^op) = X(a)^+``."""
    q = x.quiver
    mods = {v: fmodule.dual_plus(m) for v, m in x.modules.items()}
    maps = {a.name: fmodule.dual_plus_map(x.maps[a.name]) for a in q.arrows}
    return Representation(opposite(q), x.ring, mods, maps)


def psi_of_dual_matches(x, i):
    """``psi_i`` of ``X^+`` equals the dual of ``phi_i`` of ``X`` as matrices."""
    return psi(char_dual_rep(x), i) == fmodule.dual_plus_map(phi(x, i))


def double_dual_matches(x):
    xx = char_dual_rep(char_dual_rep(x))
    if xx.quiver != x.quiver:
        return False
    return all(xx.modules[v] == x.modules[v] for v in x.quiver.vertices) and all(
        xx.maps[k] == x.maps[k] for k in x.maps
    )


# -------------------------------------------------- flatness vs exactness


@dataclass(frozen=True, eq=False)
class TestSequence:
    """A short exact sequence of opposite-quiver representations with a label."""

    label: str
    ses: RepSES


def _free_projective_op(qop, r, i):
    from .pathring import indecomposable_projective

    return indecomposable_projective(qop, r, i)[0]


@lru_cache(maxsize=None)
def generating_family(q, n):
    """Short exact sequences of ``Q^op`` representations used to test exactness.

    * for each vertex ``i`` and prime ``p | n``: ``0 -> Omega -> P_i -> S(i, Z/p) -> 0``
      with ``P_i`` the indecomposable projective at ``i``;
    * for each vertex ``i`` and divisor ``1 < d < n``: the stalk sequence
      ``0 -> Z/(n/d) -> Z/n -> Z/d -> 0`` at ``i``.
    """
    from .representation import kernel_rep

    r = fmodule.ring(n)
    qop = opposite(q)
    fam = []
    for i in q.vertices:
        p_i = _free_projective_op(qop, r, i)
        for p in sorted(r.factorization):
            s = stalk(qop, i, fmodule.module(r, (p,)))
            maps = {}
            for v in qop.vertices:
                mat = np.zeros((s.modules[v].rank, p_i.modules[v].rank), dtype=np.int64)
                if v == i:
                    mat[0, 0] = 1  # the trivial path e_i is listed first
                maps[v] = ModuleMap(p_i.modules[v], s.modules[v], mat)
            g = RepMorphism(p_i, s, maps)
            omega, inc = kernel_rep(g)
            fam.append(TestSequence(f"simple S({i}, Z/{p})", RepSES(inc, g)))
        for d in r.divisors:
            if 1 < d < n:
                a = fmodule.module(r, (n // d,))
                b = fmodule.module(r, (n,))
                c = fmodule.module(r, (d,))
                f = ModuleMap(a, b, [[d]])
                g = ModuleMap(b, c, [[1]])
                xa, xb, xc = stalk(qop, i, a), stalk(qop, i, b), stalk(qop, i, c)
                fam.append(
                    TestSequence(
                        f"stalk 0->Z/{n // d}->Z/{n}->Z/{d} at {i}",
                        RepSES(RepMorphism(xa, xb, {i: f}), RepMorphism(xb, xc, {i: g})),
                    )
                )
    return tuple(fam)


def simple_reps(q, n):
    r = fmodule.ring(n)
    return [stalk(q, i, fmodule.module(r, (p,))) for i in q.vertices for p in sorted(r.factorization)]


@dataclass
class FlatnessCertificate:
    flat: bool
    tensor_exact: bool
    dual_injective: bool
    witness: dict = field(default_factory=dict)

    @property
    def agree(self):
        return self.flat == self.tensor_exact == self.dual_injective


def tensor_defect(seq, x):
    """``|ker(Y' (x) X -> Y (x) X)|`` for an exact ``0 -> Y' -> Y -> Y'' -> 0``.

    Tensoring is right exact, so the sequence stays exact iff this is 1,
    and the defect equals ``|Y' (x) X| |Y'' (x) X| / |Y (x) X|``.
    """
    a, b, c = seq.ses.terms
    return tensor_order(a, x) * tensor_order(c, x) // tensor_order(b, x)


def flat_iff_tensor_exact(x):
    if not is_left_rooted(x.quiver):
        raise RepresentationError("quiver is not left rooted")
    from .pathring import ext1_rep_order

    flat = is_flat_rep(x)
    witness = {}
    exact = True
    for seq in generating_family(x.quiver, x.ring.n):
        defect = tensor_defect(seq, x)
        if defect != 1:
            exact = False
            witness["sequence"] = seq.label
            witness["kernel_order"] = defect
            break
    dual = char_dual_rep(x)
    injective = True
    for s in simple_reps(dual.quiver, x.ring.n):
        e = ext1_rep_order(s, dual)
        if e != 1:
            injective = False
            witness["ext_test"] = repr(s)
            witness["ext_order"] = e
            break
    return FlatnessCertificate(flat, exact, injective, witness)
