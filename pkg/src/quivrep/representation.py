"""Representations of finite quivers in finite Z/n-modules.

Summands of the coproduct into a vertex and of the product out of it are
ordered like the arrows in the quiver's declaration.
"""

from dataclasses import dataclass
from itertools import product
from math import prod

import numpy as np

from . import classes, fmodule
from .fmodule import FiniteModule, ModuleMap, ModuleSES
from .quiver import Quiver, QuiverError, is_left_rooted


class RepresentationError(ValueError):
    pass


class Representation:
    """A functor from a quiver to finite modules over ``ring``.

    ``modules`` maps vertex ids to :class:`FiniteModule` and ``maps`` maps
    arrow ids to :class:`ModuleMap`; missing vertices default to zero and
    missing arrows to zero maps.
    """

    __slots__ = ("quiver", "ring", "modules", "maps")

    def __init__(self, quiver, ring, modules=None, maps=None):
        ring = ring if isinstance(ring, fmodule.RingSpec) else fmodule.ring(ring)
        modules = dict(modules or {})
        maps = dict(maps or {})
        for v in modules:
            quiver.check_vertex(v)
        mods = {v: modules.get(v, fmodule.zero_module(ring)) for v in quiver.vertices}
        for v, m in mods.items():
            if m.ring != ring:
                raise fmodule.RingMismatch(f"module at vertex {v} is over {m.ring}, not {ring}")
        names = {a.name for a in quiver.arrows}
        for k in maps:
            if k not in names:
                raise RepresentationError(f"unknown arrow {k!r}")
        arrows = {}
        for a in quiver.arrows:
            s, t = mods[a.source], mods[a.target]
            f = maps.get(a.name)
            if f is None:
                f = fmodule.zero_map(s, t)
            elif not isinstance(f, ModuleMap):
                f = ModuleMap(s, t, f)
            if f.source != s or f.target != t:
                raise RepresentationError(f"map for arrow {a.name} has the wrong source or target")
            arrows[a.name] = f
        self.quiver = quiver
        self.ring = ring
        self.modules = mods
        self.maps = arrows

    def __getitem__(self, key):
        if key in self.modules:
            return self.modules[key]
        return self.maps[key]

    @property
    def order(self):
        return prod(m.order for m in self.modules.values())

    @property
    def is_zero(self):
        return all(m.is_zero for m in self.modules.values())

    def key(self):
        """Hashable description (modules and matrices)."""
        return (
            tuple(self.modules[v].orders for v in self.quiver.vertices),
            tuple(self.maps[a.name].matrix.tobytes() for a in self.quiver.arrows),
        )

    def __eq__(self, other):
        return (
            isinstance(other, Representation)
            and self.quiver == other.quiver
            and self.ring == other.ring
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.quiver, self.ring, self.key()))

    def __repr__(self):
        mods = ", ".join(f"{v}: {m}" for v, m in self.modules.items())
        maps = ", ".join(f"{k}: {f.matrix.tolist()}" for k, f in self.maps.items())
        return f"Representation({self.ring}; {mods}; {maps})"

    def path_map(self, arrow_names, start):
        """Composite of the arrow maps along a path starting at ``start``."""
        f = fmodule.identity(self.modules[start])
        for name in arrow_names:
            f = self.maps[name] @ f
        return f


def zero_rep(q, r):
    return Representation(q, r)


def stalk(q, v, m):
    """``m`` at vertex ``v`` and zero elsewhere."""
    return Representation(q, m.ring, {v: m})


def direct_sum_rep(x, y):
    q = x.quiver
    mods, maps = {}, {}
    sums = {}
    for v in q.vertices:
        s = fmodule.direct_sum([x.modules[v], y.modules[v]])
        sums[v] = s
        mods[v] = s.module
    for a in q.arrows:
        maps[a.name] = fmodule.block_map(
            sums[a.source], sums[a.target], [[x.maps[a.name], None], [None, y.maps[a.name]]]
        )
    return Representation(q, x.ring, mods, maps), sums


# ------------------------------------------------------ canonical maps


def phi_sum(x, i):
    """The coproduct ``sum_{a: * -> i} X(s(a))`` as a :class:`fmodule.DirectSum`."""
    x.quiver.check_vertex(i)
    return fmodule.direct_sum([x.modules[a.source] for a in x.quiver.incoming(i)], x.ring)


def phi(x, i):
    s = phi_sum(x, i)
    return fmodule.hstack_maps([x.maps[a.name] for a in x.quiver.incoming(i)], x.modules[i], s)


def psi_sum(x, i):
    x.quiver.check_vertex(i)
    return fmodule.direct_sum([x.modules[a.target] for a in x.quiver.outgoing(i)], x.ring)


def psi(x, i):
    s = psi_sum(x, i)
    return fmodule.vstack_maps([x.maps[a.name] for a in x.quiver.outgoing(i)], x.modules[i], s)


def coker_c(x, i):
    return fmodule.cokernel(phi(x, i))


def ker_k(x, i):
    return fmodule.kernel(psi(x, i))


# -------------------------------------------------------------- classes


def as_predicate(pred, r):
    if isinstance(pred, str):
        return classes.oracle(pred, r)
    return pred


def in_phi_class(x, pred):
    pred = as_predicate(pred, x.ring)
    for i in x.quiver.vertices:
        f = phi(x, i)
        if not f.is_injective():
            return False
        if not pred(x.modules[i]):
            return False
        if not pred(fmodule.cokernel(f)[0]):
            return False
    return True


def in_psi_class(x, pred):
    pred = as_predicate(pred, x.ring)
    for i in x.quiver.vertices:
        f = psi(x, i)
        if not f.is_surjective():
            return False
        if not pred(x.modules[i]):
            return False
        if not pred(fmodule.kernel(f)[0]):
            return False
    return True


def in_rep_class(x, pred):
    pred = as_predicate(pred, x.ring)
    return all(pred(m) for m in x.modules.values())


def phi_failure(x, pred):
    """First reason ``x`` is not in ``Phi(pred)``: ``(vertex, what, detail)`` or None."""
    pred = as_predicate(pred, x.ring)
    for i in x.quiver.vertices:
        f = phi(x, i)
        gens = f.kernel_generators()
        if len(gens):
            return i, "phi not injective", gens[0].tolist()
        if not pred(x.modules[i]):
            return i, "vertex module", str(x.modules[i])
        c = fmodule.cokernel(f)[0]
        if not pred(c):
            return i, "cokernel", str(c)
    return None


def _require_rooted(x):
    if not is_left_rooted(x.quiver):
        raise QuiverError("quiver is not left rooted")


def is_flat_rep(x):
    _require_rooted(x)
    return in_phi_class(x, "Flat")


def is_gorenstein_flat_rep(x):
    _require_rooted(x)
    return in_phi_class(x, "GF")


def is_pgf_rep(x):
    _require_rooted(x)
    return in_phi_class(x, "PGF")


def is_projective_rep(x):
    _require_rooted(x)
    return in_phi_class(x, "Prj")


# ------------------------------------------------------------ morphisms


class RepMorphism:
    """Vertexwise maps ``f(i): X(i) -> Y(i)``."""

    __slots__ = ("source", "target", "maps")

    def __init__(self, source, target, maps, check=True):
        self.source = source
        self.target = target
        self.maps = {}
        for v in source.quiver.vertices:
            f = maps.get(v) if maps else None
            if f is None:
                f = fmodule.zero_map(source.modules[v], target.modules[v])
            elif not isinstance(f, ModuleMap):
                f = ModuleMap(source.modules[v], target.modules[v], f)
            self.maps[v] = f
        if check and not self.is_natural():
            raise RepresentationError("vertex maps are not natural")

    def __getitem__(self, v):
        return self.maps[v]

    def naturality_defects(self):
        bad = []
        for a in self.source.quiver.arrows:
            lhs = self.target.maps[a.name] @ self.maps[a.source]
            rhs = self.maps[a.target] @ self.source.maps[a.name]
            if lhs != rhs:
                bad.append(a.name)
        return bad

    def is_natural(self):
        for v, f in self.maps.items():
            if f.source != self.source.modules[v] or f.target != self.target.modules[v]:
                return False
        return not self.naturality_defects()

    def __matmul__(self, other):
        return RepMorphism(
            other.source, self.target, {v: self.maps[v] @ other.maps[v] for v in self.maps}, check=False
        )

    def __eq__(self, other):
        return isinstance(other, RepMorphism) and all(self.maps[v] == other.maps[v] for v in self.maps)

    def __hash__(self):
        return hash(tuple(self.maps[v] for v in self.source.quiver.vertices))

    def is_injective(self):
        return all(f.is_injective() for f in self.maps.values())

    def is_surjective(self):
        return all(f.is_surjective() for f in self.maps.values())

    @property
    def is_zero(self):
        return all(f.is_zero for f in self.maps.values())


def identity_morphism(x):
    return RepMorphism(x, x, {v: fmodule.identity(m) for v, m in x.modules.items()}, check=False)


@dataclass(frozen=True, eq=False)
class RepSES:
    """``0 -> X' --f--> X --g--> X'' -> 0`` of representations."""

    f: RepMorphism
    g: RepMorphism

    @property
    def terms(self):
        return self.f.source, self.f.target, self.g.target

    def at(self, v):
        return ModuleSES(self.f.maps[v], self.g.maps[v])

    def check(self):
        problems = []
        for name, m in (("f", self.f), ("g", self.g)):
            for a in m.naturality_defects():
                problems.append(f"{name} not natural at arrow {a}")
        for v in self.f.source.quiver.vertices:
            for p in self.at(v).check():
                problems.append(f"vertex {v}: {p}")
        return problems

    def is_exact(self):
        return not self.check()


def sub_representation(x, gens):
    """Subrepresentation with ``K(i)`` generated by ``gens[i]``; caller ensures stability.

    Returns the subrepresentation and its inclusion morphism.
    """
    mods, incs = {}, {}
    for v in x.quiver.vertices:
        k, inc = fmodule.subgenerated(x.modules[v], gens.get(v, np.zeros((0, x.modules[v].rank))))
        mods[v] = k
        incs[v] = inc
    maps = {}
    for a in x.quiver.arrows:
        h = fmodule.lift_through(incs[a.target], x.maps[a.name] @ incs[a.source])
        if h is None:
            raise RepresentationError(f"generators are not stable under arrow {a.name}")
        maps[a.name] = h
    k = Representation(x.quiver, x.ring, mods, maps)
    return k, RepMorphism(k, x, incs, check=False)


def kernel_rep(f):
    gens = {v: m.kernel_generators() for v, m in f.maps.items()}
    return sub_representation(f.source, gens)


def cokernel_rep(f):
    y = f.target
    mods, projs = {}, {}
    for v in y.quiver.vertices:
        c, p = fmodule.cokernel(f.maps[v])
        mods[v] = c
        projs[v] = p
    maps = {}
    for a in y.quiver.arrows:
        # projections are surjective: push each cokernel generator through a preimage
        src = mods[a.source]
        cols = []
        for j in range(src.rank):
            e = np.zeros(src.rank, dtype=np.int64)
            e[j] = 1
            pre = fmodule.lift(projs[a.source], e)
            cols.append(projs[a.target](y.maps[a.name](pre)))
        mat = np.array(cols, dtype=np.int64).T.reshape(mods[a.target].rank, src.rank)
        maps[a.name] = ModuleMap(src, mods[a.target], mat)
    c = Representation(y.quiver, y.ring, mods, maps)
    return c, RepMorphism(y, c, projs, check=False)


# -------------------------------------------------------------- Hom(X, Y)


class RepHom:
    """``Hom(X, Y)`` as the kernel of the naturality defect map.

    ``D: sum_i Hom(X(i), Y(i)) -> sum_a Hom(X(s a), Y(t a))`` sends a family
    ``f`` to ``Y(a) f(s a) - f(t a) X(a)``.
    """

    def __init__(self, x, y):
        if x.quiver != y.quiver:
            raise RepresentationError("representations live on different quivers")
        fmodule._check_ring(*x.modules.values(), *y.modules.values())
        self.x = x
        self.y = y
        q = x.quiver
        self.vertex_spaces = [fmodule.HomSpace(x.modules[v], y.modules[v]) for v in q.vertices]
        self.arrow_spaces = [fmodule.HomSpace(x.modules[a.source], y.modules[a.target]) for a in q.arrows]
        self.total = fmodule.direct_sum([h.module for h in self.vertex_spaces], x.ring)
        self.defect_target = fmodule.direct_sum([h.module for h in self.arrow_spaces], x.ring)
        self.defect = self._defect_map()

    def _defect_map(self):
        q = self.x.quiver
        m = self.total.module
        t = self.defect_target.module
        mat = np.zeros((t.rank, m.rank), dtype=np.int64)
        col_off = np.concatenate([[0], np.cumsum([h.module.rank for h in self.vertex_spaces])])
        vidx = {v: k for k, v in enumerate(q.vertices)}
        row = 0
        for a, ahs in zip(q.arrows, self.arrow_spaces):
            nr = ahs.module.rank
            if not nr:
                continue
            cells = np.array(ahs.cells, dtype=np.int64)
            p, c = cells[:, 0], cells[:, 1]
            tord = self.y.modules[a.target].orders_array()[p][:, None]
            for sign, v in ((1, a.source), (-1, a.target)):
                k = vidx[v]
                hs = self.vertex_spaces[k]
                if not hs.module.rank:
                    continue
                vc = np.array(hs.cells, dtype=np.int64)
                i, j = vc[:, 0], vc[:, 1]
                if sign > 0:
                    # (Y(a) E_ij)[p, c] = Y(a)[p, i] * step if c == j
                    g = self.y.maps[a.name].matrix[np.ix_(p, i)] * hs.steps[None, :] * (c[:, None] == j[None, :])
                else:
                    # (E_ij X(a))[p, c] = step * X(a)[j, c] if p == i
                    g = -(hs.steps[None, :] * (p[:, None] == i[None, :]) * self.x.maps[a.name].matrix[np.ix_(j, c)].T)
                g %= tord
                mat[row:row + nr, col_off[k]:col_off[k] + hs.module.rank] += g // ahs.steps[:, None]
            mat[row:row + nr] %= ahs.module.orders_array()[:, None]
            row += nr
        return ModuleMap(m, t, mat, check=False)

    def _defect_map_slow(self):
        """Reference assembly through explicit basis maps (used in tests)."""
        q = self.x.quiver
        cols = []
        for k, hs in enumerate(self.vertex_spaces):
            v = q.vertices[k]
            for b in hs.basis():
                col = []
                for a, ahs in zip(q.arrows, self.arrow_spaces):
                    g = fmodule.zero_map(ahs.source, ahs.target)
                    if a.source == v:
                        g = g + self.y.maps[a.name] @ b
                    if a.target == v:
                        g = g - b @ self.x.maps[a.name]
                    col.append(ahs.to_coords(g))
                cols.append(np.concatenate(col) if col else np.zeros(0, dtype=np.int64))
        m = self.total.module
        t = self.defect_target.module
        mat = np.array(cols, dtype=np.int64).T.reshape(t.rank, m.rank)
        return ModuleMap(m, t, mat, check=False)

    @property
    def order(self):
        return self.total.module.order // fmodule.image_order(self.defect)

    def module(self):
        """``(H, inclusion into the vertexwise Hom sum)``."""
        return fmodule.kernel(self.defect)

    def decode(self, coords):
        """Family of vertex maps for a point of the vertexwise Hom sum."""
        coords = np.asarray(coords, dtype=np.int64)
        maps, off = {}, 0
        for v, hs in zip(self.x.quiver.vertices, self.vertex_spaces):
            r = hs.module.rank
            maps[v] = hs.from_coords(coords[off:off + r])
            off += r
        return RepMorphism(self.x, self.y, maps, check=False)

    def encode(self, f):
        return np.concatenate(
            [hs.to_coords(f.maps[v]) for v, hs in zip(self.x.quiver.vertices, self.vertex_spaces)]
            + [np.zeros(0, dtype=np.int64)]
        )

    def elements(self):
        h, inc = self.module()
        for c in h.elements():
            yield self.decode(inc(c))


def hom_rep_order(x, y):
    return RepHom(x, y).order


# ----------------------------------------------------------- enumeration


def count_reps(q, r, max_order):
    mods = fmodule.all_modules(fmodule.ring(r) if isinstance(r, int) else r, max_order)
    total = 0
    for assign in product(mods, repeat=len(q.vertices)):
        mv = dict(zip(q.vertices, assign))
        total += prod(fmodule.HomSpace(mv[a.source], mv[a.target]).module.order for a in q.arrows)
    return total


def enumerate_reps(q, r, max_order, limit=2_000_000):
    """Every representation whose vertex modules have order at most ``max_order``.

    Vertex modules are taken in invariant-factor form; the order of the
    stream is deterministic.  ``limit`` guards against accidental blowups.
    """
    r = r if isinstance(r, fmodule.RingSpec) else fmodule.ring(r)
    n_total = count_reps(q, r, max_order)
    if limit is not None and n_total > limit:
        raise RepresentationError(f"{n_total} representations exceed the limit {limit}")
    mods = fmodule.all_modules(r, max_order)
    for assign in product(mods, repeat=len(q.vertices)):
        mv = dict(zip(q.vertices, assign))
        spaces = [fmodule.HomSpace(mv[a.source], mv[a.target]) for a in q.arrows]
        for choice in product(*[list(hs.elements()) for hs in spaces]):
            yield Representation(q, r, mv, {a.name: f for a, f in zip(q.arrows, choice)})


def random_rep(q, r, rng, max_order=4, modules=None):
    r = r if isinstance(r, fmodule.RingSpec) else fmodule.ring(r)
    mods = modules if modules is not None else fmodule.all_modules(r, max_order)
    mv = {v: mods[int(rng.integers(len(mods)))] for v in q.vertices}
    maps = {}
    for a in q.arrows:
        hs = fmodule.HomSpace(mv[a.source], mv[a.target])
        c = [int(rng.integers(d)) for d in hs.module.orders]
        maps[a.name] = hs.from_coords(c)
    return Representation(q, r, mv, maps)


def random_phi_rep(q, r, rng, pred="GF", max_order=4, max_vertex_order=64, tries=100):
    """Random member of ``Phi(pred)`` built along a topological order.

    Vertices without incoming arrows get a random module of order
    ``<= max_order`` in the class; at other vertices a random map out of the
    incoming sum is drawn until it is injective with value and cokernel in the
    class, falling back to the inclusion into ``sum + (random extra)``.
    """
    from .quiver import topological_order

    r = r if isinstance(r, fmodule.RingSpec) else fmodule.ring(r)
    pred = as_predicate(pred, r)
    small = [m for m in fmodule.all_modules(r, max_order) if pred(m)]
    pool = [m for m in fmodule.all_modules(r, max_vertex_order) if pred(m)]
    mv, maps = {}, {}
    for i in topological_order(q):
        inc = q.incoming(i)
        if not inc:
            mv[i] = small[int(rng.integers(len(small)))]
            continue
        s = fmodule.direct_sum([mv[a.source] for a in inc], r)
        found = None
        cands = [m for m in pool if s.module.order <= m.order <= s.module.order * max_order]
        for _ in range(tries if cands else 0):
            m = cands[int(rng.integers(len(cands)))]
            hs = fmodule.HomSpace(s.module, m)
            f = hs.from_coords([int(rng.integers(d)) for d in hs.module.orders])
            if f.is_injective() and pred(fmodule.cokernel(f)[0]):
                found = f
                break
        if found is None:
            extra = small[int(rng.integers(len(small)))]
            t = fmodule.direct_sum([s.module, extra])
            found = t.inclusions[0]
        mv[i] = found.target
        for k, a in enumerate(inc):
            maps[a.name] = found @ s.inclusions[k]
    x = Representation(q, r, mv, maps)
    if not in_phi_class(x, pred):
        raise RepresentationError("random Phi representation failed its own check")
    return x


# ---------------------------------------------------------- Hovey flags


@dataclass(frozen=True)
class HoveyTripleSpec:
    """Cofibrant / trivial / fibrant classes at representation level."""

    cofibrant: object
    trivial: object
    fibrant: object

    @classmethod
    def gf_pgf_cot(cls):
        return cls(
            cofibrant=lambda x: in_phi_class(x, "GF"),
            trivial=lambda x: in_rep_class(x, "PGFperp"),
            fibrant=lambda x: in_rep_class(x, "Cot"),
        )


def hovey_membership(x, spec=None):
    _require_rooted(x)
    spec = spec or HoveyTripleSpec.gf_pgf_cot()
    return {
        "cofibrant": bool(spec.cofibrant(x)),
        "trivial": bool(spec.trivial(x)),
        "fibrant": bool(spec.fibrant(x)),
    }
