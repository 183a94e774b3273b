"""Representations as modules over the path ring, and Ext^1 of representations.

A representation ``X`` corresponds to the ``RQ``-module ``sum_i X(i)`` on which
a path ``p`` from ``i`` to ``j`` acts by ``X(p)`` from the ``i``-component to the
``j``-component (and by zero elsewhere).  The indecomposable projectives are
``P_i = RQ e_i``: ``P_i(j)`` is free on the paths from ``i`` to ``j`` and an arrow
acts by extending a path.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import prod

import numpy as np

from . import fmodule
from .fmodule import ModuleMap
from .quiver import Path, PathRing, QuiverError, all_paths, is_acyclic, path_ring
from .representation import (
    RepHom,
    RepMorphism,
    Representation,
    RepresentationError,
    kernel_rep,
)


@dataclass(frozen=True, eq=False)
class RQModule:
    """A module over a path ring: underlying group plus one action per basis path."""

    algebra: PathRing
    module: fmodule.FiniteModule
    blocks: tuple  # per vertex: (offset, rank) inside ``module``
    actions: tuple  # ModuleMap per basis path, aligned with algebra.basis

    def act(self, coeffs, x):
        out = self.module.zero()
        for c, f in zip(coeffs, self.actions):
            if c:
                out = out + c * f(x)
        return self.module.reduce(out)

    def check_axioms(self):
        """Unit and associativity on generators; returns a list of failures."""
        alg = self.algebra
        problems = []
        one = fmodule.zero_map(self.module, self.module)
        for c, f in zip(alg.one(), self.actions):
            one = one + f.scale(int(c))
        if one != fmodule.identity(self.module):
            problems.append("sum of idempotents does not act as the identity")
        dim = alg.dimension
        for i in range(dim):
            for j in range(dim):
                prod_vec = alg.table[i, j]
                lhs = self.actions[i] @ self.actions[j]
                rhs = fmodule.zero_map(self.module, self.module)
                for k in np.nonzero(prod_vec)[0]:
                    rhs = rhs + self.actions[k].scale(int(prod_vec[k]))
                if lhs != rhs:
                    problems.append(f"action not multiplicative at ({alg.basis[i]}, {alg.basis[j]})")
        return problems


def to_rq_module(x, algebra=None):
    algebra = algebra or path_ring(x.quiver, x.ring)
    q = x.quiver
    s = fmodule.direct_sum([x.modules[v] for v in q.vertices], x.ring)
    idx = {v: k for k, v in enumerate(q.vertices)}
    blocks, off = [], 0
    for v in q.vertices:
        blocks.append((off, x.modules[v].rank))
        off += x.modules[v].rank
    actions = []
    for p in algebra.basis:
        f = x.path_map(p.arrows, p.start)
        actions.append(s.inclusions[idx[p.end]] @ f @ s.projections[idx[p.start]])
    return RQModule(algebra, s.module, tuple(blocks), tuple(actions))


def from_rq_module(m):
    """Recover the representation: ``X(i) = e_i M`` and ``X(a)`` = action of ``a``."""
    alg = m.algebra
    q = alg.quiver
    mods, incs, projs = {}, {}, {}
    for v in q.vertices:
        e = m.actions[alg.index(Path(v, v))]
        img, inc = fmodule.image(e)
        mods[v] = img
        incs[v] = inc
        projs[v] = fmodule.lift_through(inc, e)
    maps = {}
    for a in q.arrows:
        act = m.actions[alg.index(Path(a.source, a.target, (a.name,)))]
        maps[a.name] = projs[a.target] @ act @ incs[a.source]
    return Representation(q, m.module.ring, mods, maps)


# ------------------------------------------------------- projectives


def _paths_from(q, i):
    return [p for p in all_paths(q) if p.start == i]


def indecomposable_projective(q, r, i):
    """``P_i = RQ e_i`` as a representation; basis of ``P_i(j)`` = paths i -> j."""
    r = r if isinstance(r, fmodule.RingSpec) else fmodule.ring(r)
    return _indecomposable_projective(q, r, i)


@lru_cache(maxsize=256)
def _indecomposable_projective(q, r, i):
    paths = _paths_from(q, i)
    by_end = {v: [p for p in paths if p.end == v] for v in q.vertices}
    mods = {v: fmodule.free_module(r, len(ps)) for v, ps in by_end.items()}
    maps = {}
    for a in q.arrows:
        src, dst = by_end[a.source], by_end[a.target]
        mat = np.zeros((len(dst), len(src)), dtype=np.int64)
        for c, p in enumerate(src):
            mat[dst.index(Path(p.start, a.target, p.arrows + (a.name,))), c] = 1
        maps[a.name] = ModuleMap(mods[a.source], mods[a.target], mat, check=False)
    return Representation(q, r, mods, maps), by_end


@dataclass(frozen=True, eq=False)
class ProjectiveCover:
    """``0 -> K -> P -> X -> 0`` with ``P = sum_k P_{v_k}``."""

    tops: tuple  # vertex of each indecomposable summand
    generators: tuple  # element of X(v_k) that e_{v_k} maps to
    cover: Representation
    epi: RepMorphism
    kernel: Representation
    inclusion: RepMorphism


def projective_cover(x, free=False):
    """Projective presentation of ``x``.

    The summands are indexed by lifts of generators of ``C_i(X)`` (a small
    cover); with ``free=True`` every vertex instead contributes one summand
    per generator of ``X(i)``.
    """
    q = x.quiver
    if not is_acyclic(q):
        raise QuiverError("path-ring computations need an acyclic quiver")
    from .representation import coker_c

    tops, gens = [], []
    for v in q.vertices:
        if free:
            for j in range(x.modules[v].rank):
                e = np.zeros(x.modules[v].rank, dtype=np.int64)
                e[j] = 1
                tops.append(v)
                gens.append(e)
        else:
            c, proj = coker_c(x, v)
            for j in range(c.rank):
                e = np.zeros(c.rank, dtype=np.int64)
                e[j] = 1
                tops.append(v)
                gens.append(fmodule.lift(proj, e))
    pieces = [indecomposable_projective(q, x.ring, v) for v in tops]
    mods, maps, sums = {}, {}, {}
    for v in q.vertices:
        s = fmodule.direct_sum([p.modules[v] for p, _ in pieces], x.ring)
        sums[v] = s
        mods[v] = s.module
    for a in q.arrows:
        blocks = [[None] * len(pieces) for _ in pieces]
        for k, (p, _) in enumerate(pieces):
            blocks[k][k] = p.maps[a.name]
        maps[a.name] = fmodule.block_map(sums[a.source], sums[a.target], blocks)
    cover = Representation(q, x.ring, mods, maps)
    epi = {}
    for v in q.vertices:
        cols = []
        for (p, by_end), top, g in zip(pieces, tops, gens):
            for path in by_end[v]:
                cols.append(x.path_map(path.arrows, top)(g))
        mat = np.array(cols, dtype=np.int64).T.reshape(x.modules[v].rank, len(cols))
        epi[v] = ModuleMap(cover.modules[v], x.modules[v], mat)
    epi = RepMorphism(cover, x, epi)
    if not epi.is_surjective():
        raise RepresentationError("cover is not surjective")
    k, inc = kernel_rep(epi)
    return ProjectiveCover(tuple(tops), tuple(gens), cover, epi, k, inc)


# ------------------------------------------------------------------ Ext


def _yoneda(cov, y, hom_k):
    """``Hom(P, Y) = sum_k Y(v_k) -> Hom(K, Y)`` by restriction, in ``hom_k`` coordinates."""
    q = y.quiver
    src = fmodule.direct_sum([y.modules[v] for v in cov.tops], y.ring)
    pieces = [indecomposable_projective(q, y.ring, v)[1] for v in cov.tops]
    cols = []
    for k, top in enumerate(cov.tops):
        for j in range(y.modules[top].rank):
            e = np.zeros(y.modules[top].rank, dtype=np.int64)
            e[j] = 1
            fam = {}
            for v in q.vertices:
                # the morphism P -> Y hitting e at summand k, evaluated on P(v)
                width = cov.cover.modules[v].rank
                mat = np.zeros((y.modules[v].rank, width), dtype=np.int64)
                off = sum(len(pieces[t][v]) for t in range(k))
                for c, path in enumerate(pieces[k][v]):
                    mat[:, off + c] = y.path_map(path.arrows, top)(e)
                f = ModuleMap(cov.cover.modules[v], y.modules[v], mat, check=False)
                fam[v] = f @ cov.inclusion.maps[v]
            cols.append(hom_k.encode(RepMorphism(cov.kernel, y, fam, check=False)))
    mat = np.array(cols, dtype=np.int64).T.reshape(hom_k.total.module.rank, src.module.rank)
    return ModuleMap(src.module, hom_k.total.module, mat, check=False)


def ext1_rep(x, y, cover=None):
    """``Ext^1(X, Y)`` as ``Hom(K, Y) / im Hom(P, Y)`` for a projective cover of ``X``."""
    if x.quiver != y.quiver:
        raise RepresentationError("representations live on different quivers")
    fmodule._check_ring(*x.modules.values(), *y.modules.values())
    cov = cover or projective_cover(x)
    hom_k = RepHom(cov.kernel, y)
    h, inc = hom_k.module()
    restrict = _yoneda(cov, y, hom_k)
    lifted = fmodule.lift_through(inc, restrict)
    if lifted is None:
        raise AssertionError("restricted maps are not natural")
    ext, _ = fmodule.cokernel(lifted)
    return ext


def ext1_rep_order(x, y, cover=None):
    """``|Ext^1(X, Y)|`` from ``0 -> Hom(X,Y) -> Hom(P,Y) -> Hom(K,Y) -> Ext^1 -> 0``."""
    cov = cover or projective_cover(x)
    hom_p = prod(y.modules[v].order for v in cov.tops)
    num = RepHom(cov.kernel, y).order * RepHom(x, y).order
    if num % hom_p:
        raise AssertionError("Hom orders are inconsistent with a projective presentation")
    return num // hom_p


@lru_cache(maxsize=1 << 16)
def splits_over_path_ring(x):
    """``X`` is projective iff its projective cover splits iff ``Ext^1(X, K) = 0``.

    Results are memoised per representation (representations are immutable
    and hash by value).
    """
    cov = projective_cover(x)
    return ext1_rep_order(x, cov.kernel, cov) == 1
