"""Finite quivers, the rootedness filtration and path rings."""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .fmodule import RingSpec, ring as make_ring


class QuiverError(ValueError):
    pass


class QuiverParseError(QuiverError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    """Vertices and arrows in declaration order; loops and parallel arrows allowed."""

    vertices: tuple
    arrows: tuple

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        arrows = tuple(a if isinstance(a, Arrow) else Arrow(*map(str, a)) for a in self.arrows)
        if len(set(verts)) != len(verts):
            raise QuiverError("duplicate vertex id")
        if len({a.name for a in arrows}) != len(arrows):
            raise QuiverError("duplicate arrow id")
        vs = set(verts)
        for a in arrows:
            if a.source not in vs or a.target not in vs:
                raise QuiverError(f"arrow {a.name} has an undeclared endpoint")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "arrows", arrows)

    def arrow(self, name):
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    def incoming(self, i):
        """Arrows ending at ``i``, in declaration order."""
        return [a for a in self.arrows if a.target == i]

    def outgoing(self, i):
        return [a for a in self.arrows if a.source == i]

    def check_vertex(self, i):
        if i not in self.vertices:
            raise QuiverError(f"unknown vertex {i!r}")

    def to_text(self):
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"arrow {a.name} {a.source} {a.target}" for a in self.arrows]
        return "\n".join(lines) + "\n"


def quiver(vertices, arrows=()):
    return Quiver(tuple(vertices), tuple(arrows))


def example_quiver():
    """The 4-vertex quiver 1 -a-> 3 <-b- 2, 3 -c-> 4."""
    return quiver("1234", [("a", "1", "3"), ("b", "2", "3"), ("c", "3", "4")])


def a2_quiver():
    return quiver("12", [("a", "1", "2")])


def loop_quiver():
    return quiver("1", [("l", "1", "1")])


def two_cycle_quiver():
    return quiver("12", [("a", "1", "2"), ("b", "2", "1")])


def parse_quiver(text):
    verts, arrows, seen = [], [], set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            if parts[1] in seen:
                raise QuiverParseError(lineno, f"duplicate id {parts[1]!r}")
            seen.add(parts[1])
            verts.append(parts[1])
        elif parts[0] == "arrow" and len(parts) == 4:
            if parts[1] in seen:
                raise QuiverParseError(lineno, f"duplicate id {parts[1]!r}")
            seen.add(parts[1])
            arrows.append((lineno, Arrow(*parts[1:])))
        else:
            raise QuiverParseError(lineno, f"cannot parse {raw.strip()!r}")
    vs = set(verts)
    for lineno, a in arrows:
        for end in (a.source, a.target):
            if end not in vs:
                raise QuiverParseError(lineno, f"arrow {a.name} refers to unknown vertex {end!r}")
    return Quiver(tuple(verts), tuple(a for _, a in arrows))


def load_quiver(path):
    with open(path, encoding="utf-8") as fh:
        return parse_quiver(fh.read())


# ------------------------------------------------------------- rootedness


@dataclass(frozen=True)
class VSequence:
    """``V_0 = {} <= V_1 <= ...`` stopped at the first repetition."""

    stages: tuple
    left_rooted: bool

    @property
    def stabilization_index(self):
        return len(self.stages) - 2

    def stage_of(self, v):
        """Least ``alpha`` with ``v`` in ``V_alpha`` (None when never reached)."""
        for k, s in enumerate(self.stages):
            if v in s:
                return k
        return None


def v_sequence(q):
    stages = [frozenset()]
    while True:
        prev = stages[-1]
        nxt = frozenset(
            i for i in q.vertices if all(a.source in prev for a in q.incoming(i))
        )
        stages.append(nxt)
        if nxt == prev:
            break
    return VSequence(tuple(stages), stages[-1] == frozenset(q.vertices))


def is_left_rooted(q):
    return v_sequence(q).left_rooted


def is_acyclic(q):
    """Independent check by Kahn's algorithm."""
    indeg = {v: 0 for v in q.vertices}
    for a in q.arrows:
        indeg[a.target] += 1
    ready = [v for v, k in indeg.items() if k == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for a in q.outgoing(v):
            indeg[a.target] -= 1
            if indeg[a.target] == 0:
                ready.append(a.target)
    return seen == len(q.vertices)


def topological_order(q):
    seq = v_sequence(q)
    if not seq.left_rooted:
        raise QuiverError("quiver is not left rooted")
    order = []
    for s in seq.stages:
        order += [v for v in q.vertices if v in s and v not in order]
    return order


def opposite(q):
    return Quiver(q.vertices, tuple(Arrow(a.name, a.target, a.source) for a in q.arrows))


def random_quiver(rng, max_vertices=8, max_arrows=None):
    nv = int(rng.integers(1, max_vertices + 1))
    na = int(rng.integers(0, (max_arrows if max_arrows is not None else 2 * nv) + 1))
    verts = [str(k) for k in range(nv)]
    arrows = [(f"a{k}", str(rng.integers(nv)), str(rng.integers(nv))) for k in range(na)]
    return quiver(verts, arrows)


# --------------------------------------------------------------- path ring


@dataclass(frozen=True)
class Path:
    """A path: its start, end and arrow names in traversal order."""

    start: str
    end: str
    arrows: tuple = ()

    @property
    def length(self):
        return len(self.arrows)

    def __str__(self):
        return "e" + self.start if not self.arrows else "".join(reversed(self.arrows))


def all_paths(q):
    if not is_acyclic(q):
        raise QuiverError("path ring of a quiver with a cycle has infinite basis")
    paths = [Path(v, v) for v in q.vertices]
    frontier = [p for p in paths]
    while frontier:
        nxt = []
        for p in frontier:
            for a in q.outgoing(p.end):
                nxt.append(Path(p.start, a.target, p.arrows + (a.name,)))
        paths += nxt
        frontier = nxt
    return paths


@dataclass(frozen=True, eq=False)
class PathRing:
    """``RQ`` with the concatenation product ``q * p`` = ``p`` followed by ``q``."""

    quiver: Quiver
    ring: RingSpec
    basis: tuple = field(default=())
    table: np.ndarray = field(default=None, repr=False)

    @property
    def dimension(self):
        return len(self.basis)

    @property
    def order(self):
        return self.ring.n ** len(self.basis)

    def index(self, p):
        return self.basis.index(p)

    def product(self, u, v):
        """Product of coefficient vectors ``u * v``."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        out = np.einsum("i,j,ijk->k", u, v, self.table)
        return out % self.ring.n

    def one(self):
        out = np.zeros(self.dimension, dtype=np.int64)
        for k, p in enumerate(self.basis):
            if p.length == 0:
                out[k] = 1
        return out


def path_ring(q, r):
    r = r if isinstance(r, RingSpec) else make_ring(r)
    basis = tuple(all_paths(q))
    idx = {p: k for k, p in enumerate(basis)}
    dim = len(basis)
    table = np.zeros((dim, dim, dim), dtype=np.int64)
    for (i, p), (j, s) in product(enumerate(basis), repeat=2):
        # p * s: first traverse s, then p
        if s.end == p.start:
            table[i, j, idx[Path(s.start, p.end, s.arrows + p.arrows)]] = 1
    return PathRing(q, r, basis, table)
