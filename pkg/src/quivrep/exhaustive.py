"""Exhaustive check of the duality chain on every representation up to a bound.

For each representation ``X`` four verdicts are compared:

0. ``X in Phi(phi_class)`` computed with the library (Smith-form cokernels);
1. every ``phi_i`` injective, by enumerating kernels element by element;
2. every ``psi_i`` of ``X^+`` surjective, by enumerating images;
3. ``X^+ in Psi(psi_class)`` computed with the library.

All verdicts are conjunctions over vertices of conditions on the *incoming*
data at that vertex (``psi_i`` of ``X^+`` only involves the arrows into
``i``), so each vertex gets a table of 4-bit masks indexed by its local
choice of arrow maps.  The combine kernel then visits every representation,
ANDs the masks and counts disagreements.
"""

import time
from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod

import numpy as np

from . import classes, fmodule, kernels
from ._accel import backend
from .fmodule import FiniteModule, ModuleMap
from .representation import Representation

FULL = 0b1111
VERDICTS = ("library Phi", "phi injective (brute force)", "dual psi surjective (brute force)", "library dual Psi")


def hom_matrices(src_orders, tgt_orders):
    """Every homomorphism ``sum Z/d_j -> sum Z/e_i`` as a ``(N, t, s)`` array.

    Entry ``(i, j)`` runs over the multiples of ``e_i / gcd(d_j, e_i)`` in
    ``[0, e_i)``; the last entry (row-major) varies fastest.
    """
    s, t = len(src_orders), len(tgt_orders)
    counts, steps = [], []
    for e in tgt_orders:
        for d in src_orders:
            g = gcd(d, e)
            counts.append(g)
            steps.append(e // g)
    if not counts:
        return np.zeros((1, t, s), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(c, dtype=np.int64) for c in counts], indexing="ij")
    flat = np.stack([g.ravel() for g in grids], axis=1) * np.array(steps, dtype=np.int64)
    return flat.reshape(-1, t, s)


@dataclass
class LocalTable:
    sources: tuple  # module per incoming arrow
    target: FiniteModule
    mats: np.ndarray  # (N, t, s) maps out of the incoming sum
    masks: np.ndarray  # (N,) uint8 verdict masks


class _ModulePred:
    """Class predicate cached by invariants."""

    def __init__(self, orc):
        self.orc = orc
        self.cache = {}

    def __call__(self, r, orders):
        key = tuple(sorted(int(d) for d in orders if d > 1))
        if key not in self.cache:
            self.cache[key] = bool(self.orc(fmodule.module(r, key)))
        return self.cache[key]


def local_table(r, sources, target, phi_pred, psi_pred, psi_total):
    """Verdict masks for all maps ``sum sources -> target``."""
    src_orders = tuple(d for m in sources for d in m.orders)
    tgt_orders = target.orders
    mats = hom_matrices(src_orders, tgt_orders)
    n_src = prod(src_orders)
    n_tgt = prod(tgt_orders)
    s_inv = np.array(src_orders, dtype=np.int64)
    t_inv = np.array(tgt_orders, dtype=np.int64)
    masks = np.zeros(len(mats), dtype=np.uint8)

    # 0: library cokernel of phi (Smith form); injective iff |im| = |source|
    coker = kernels.coker_invariants(mats, t_inv, r.n)
    coker_size = np.prod(coker, axis=1)
    lib_inj = coker_size * n_src == n_tgt
    tgt_ok = phi_pred(r, tgt_orders)
    lib_phi = lib_inj & tgt_ok
    if tgt_ok:
        for b in np.nonzero(lib_inj)[0]:
            if not phi_pred(r, coker[b]):
                lib_phi[b] = False
    masks |= lib_phi.astype(np.uint8)

    # 1: brute-force kernel
    masks |= (kernels.kernel_sizes(mats, s_inv, t_inv) == 1).astype(np.uint8) << 1

    # 2, 3: psi_i of the dual is the dual of phi_i
    duals = fmodule.dual_matrices(mats, s_inv, t_inv)
    masks |= (kernels.image_sizes(duals, t_inv, s_inv) == n_src).astype(np.uint8) << 2
    dual_coker = np.prod(kernels.coker_invariants(duals, s_inv, r.n), axis=1)
    lib_psi = (dual_coker == 1) & psi_pred(r, tgt_orders)
    if not psi_total:
        dsrc = fmodule.dual_plus(target)
        dtgt = fmodule.module(r, src_orders)
        for b in np.nonzero(lib_psi)[0]:
            k = fmodule.kernel(ModuleMap(dsrc, dtgt, duals[b], check=False))[0]
            lib_psi[b] = psi_pred(r, k.orders)
    masks |= lib_psi.astype(np.uint8) << 3
    return LocalTable(tuple(sources), target, mats, masks)


def _is_total(orc, r, max_order):
    return all(orc(m) for m in fmodule.all_modules(r, max_order))


@dataclass
class ExhaustiveReport:
    quiver: str
    ring: int
    max_order: int
    backend: str
    total: int = 0
    disagreements: int = 0
    true_counts: list = field(default_factory=lambda: [0, 0, 0, 0])
    counterexample: Representation = None
    elapsed: float = 0.0
    table_sizes: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.disagreements == 0 and self.total > 0

    def to_json(self):
        from . import io

        return {
            "quiver": self.quiver,
            "ring": self.ring,
            "max_order": self.max_order,
            "backend": self.backend,
            "total": self.total,
            "disagreements": self.disagreements,
            "true_counts": dict(zip(VERDICTS, self.true_counts)),
            "counterexample": io.rep_to_json(self.counterexample) if self.counterexample else None,
            "ok": self.ok,
        }


def duality_chain(q, r, max_order, phi_class="GF", psi_class="GI", progress=None):
    """Evaluate the four verdicts on every representation of ``q`` over ``r``.

    Vertex modules range over all modules of order ``<= max_order`` in
    invariant-factor form and arrow maps over all homomorphisms.
    """
    r = r if isinstance(r, fmodule.RingSpec) else fmodule.ring(r)
    start = time.perf_counter()
    phi_pred = _ModulePred(classes.oracle(phi_class, r))
    psi_orc = classes.oracle(psi_class, r)
    psi_pred = _ModulePred(psi_orc)
    psi_total = _is_total(psi_orc, r, max(r.n ** 3, max_order ** 2))
    mods = fmodule.all_modules(r, max_order)
    verts = q.vertices
    incoming = {v: q.incoming(v) for v in verts}
    tables = {}
    report = ExhaustiveReport(q.to_text() if hasattr(q, "to_text") else str(q), r.n, max_order, backend())
    for assign in product(mods, repeat=len(verts)):
        mv = dict(zip(verts, assign))
        local = []
        for v in verts:
            key = (tuple(mv[a.source].orders for a in incoming[v]), mv[v].orders)
            if key not in tables:
                tables[key] = local_table(
                    r, [mv[a.source] for a in incoming[v]], mv[v], phi_pred, psi_pred, psi_total
                )
            local.append(tables[key])
        sizes = np.array([len(t.masks) for t in local], dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        bits = np.concatenate([t.masks for t in local]).astype(np.int64)
        counts, bad, first = kernels.combine_verdicts(bits, starts, sizes, FULL)
        report.total += int(np.prod(sizes))
        report.disagreements += int(bad)
        for b in range(4):
            report.true_counts[b] += int(counts[b])
        if bad and report.counterexample is None:
            report.counterexample = _decode(q, r, mv, local, sizes, int(first))
        if progress is not None:
            progress(report)
    report.table_sizes = {"tables": len(tables), "configs": sum(len(t.masks) for t in tables.values())}
    report.elapsed = time.perf_counter() - start
    return report


def _decode(q, r, mv, local, sizes, e):
    idx = []
    for s in reversed(sizes):
        idx.append(e % int(s))
        e //= int(s)
    idx.reverse()
    maps = {}
    for v, t, c in zip(q.vertices, local, idx):
        mat = t.mats[c]
        off = 0
        for a in q.incoming(v):
            k = mv[a.source].rank
            maps[a.name] = ModuleMap(mv[a.source], mv[v], mat[:, off:off + k])
            off += k
    return Representation(q, r, mv, maps)


def verdicts_of(x, phi_class="GF", psi_class="GI"):
    """The four verdicts for one representation, straight from the library."""
    from .representation import in_phi_class, in_psi_class, phi, psi
    from .tensor import char_dual_rep

    xp = char_dual_rep(x)
    v0 = in_phi_class(x, phi_class)
    v1 = all(
        kernels.kernel_sizes(
            phi(x, i).matrix[None], phi(x, i).source.orders_array(), phi(x, i).target.orders_array()
        )[0] == 1
        for i in x.quiver.vertices
    )
    v2 = True
    for i in x.quiver.vertices:
        p = psi(xp, i)
        size = kernels.image_sizes(p.matrix[None], p.source.orders_array(), p.target.orders_array())[0]
        v2 = v2 and size == p.target.order
    v3 = in_psi_class(xp, psi_class)
    return v0, v1, v2, bool(v3)
