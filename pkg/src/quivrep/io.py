"""Text formats: module literals, representation files and JSON documents."""

import json
import os
import re

import numpy as np

from . import fmodule
from .fmodule import ModuleMap
from .quiver import Quiver, load_quiver, parse_quiver
from .representation import RepMorphism, RepSES, Representation

SCHEMA_VERSION = 1


class ParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)
        self.lineno = lineno


_TERM = re.compile(r"^Z/(\d+)$")


def parse_module(text, r):
    """Parse ``Z/4 + Z/2`` (or ``0``) into a module over ``r``."""
    r = r if isinstance(r, fmodule.RingSpec) else fmodule.ring(r)
    text = text.strip()
    if text in ("0", ""):
        return fmodule.zero_module(r)
    orders = []
    for term in text.split("+"):
        m = _TERM.match(term.strip())
        if not m:
            raise ValueError(f"bad module term {term.strip()!r}")
        d = int(m.group(1))
        if d <= 1 or r.n % d:
            raise ValueError(f"Z/{d} is not a nonzero cyclic module over {r}")
        orders.append(d)
    return fmodule.module(r, orders)


def format_module(m):
    return str(m)


def parse_matrix(text, rows, cols):
    """``[[1,0],[0,2]]`` or ``1 0; 0 2``; empty matrices may be written ``[]``."""
    text = text.strip()
    if rows == 0 or cols == 0:
        if text not in ("[]", "[[]]", "", "0"):
            vals = text.replace("[", " ").replace("]", " ").replace(",", " ").replace(";", " ").split()
            if vals:
                raise ValueError(f"expected an empty {rows}x{cols} matrix")
        return np.zeros((rows, cols), dtype=np.int64)
    if text.startswith("["):
        data = json.loads(text)
    else:
        data = [[int(v) for v in row.split()] for row in text.split(";")]
    a = np.array(data, dtype=np.int64)
    if a.shape != (rows, cols):
        raise ValueError(f"expected a {rows}x{cols} matrix, got shape {a.shape}")
    return a


# --------------------------------------------------------- rep files


def parse_representation(text, base_dir=".", quiver=None):
    """Parse a representation file.

    Lines: ``quiver <path>`` (relative to the file), ``ring <n>``,
    ``module <vertex> <literal>`` and ``map <arrow> <matrix>``.
    """
    q, n, mods, maps = quiver, None, {}, {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "quiver":
            try:
                q = load_quiver(os.path.join(base_dir, rest))
            except OSError as exc:
                raise ParseError(lineno, f"cannot read quiver file: {exc}") from exc
        elif head == "ring":
            try:
                n = int(rest)
                fmodule.ring(n)
            except ValueError as exc:
                raise ParseError(lineno, f"bad ring: {rest!r}") from exc
        elif head == "module":
            v, _, lit = rest.partition(" ")
            pending.append((lineno, "module", v, lit))
        elif head == "map":
            a, _, mat = rest.partition(" ")
            pending.append((lineno, "map", a, mat))
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")
    if q is None:
        raise ParseError(0, "missing 'quiver' line")
    if n is None:
        raise ParseError(0, "missing 'ring' line")
    r = fmodule.ring(n)
    for lineno, kind, key, val in pending:
        if kind != "module":
            continue
        if key not in q.vertices:
            raise ParseError(lineno, f"unknown vertex {key!r}")
        if key in mods:
            raise ParseError(lineno, f"vertex {key!r} given twice")
        try:
            mods[key] = parse_module(val, r)
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from exc
    full = {v: mods.get(v, fmodule.zero_module(r)) for v in q.vertices}
    for lineno, kind, key, val in pending:
        if kind != "map":
            continue
        try:
            arrow = q.arrow(key)
        except KeyError:
            raise ParseError(lineno, f"unknown arrow {key!r}") from None
        if key in maps:
            raise ParseError(lineno, f"arrow {key!r} given twice")
        s, t = full[arrow.source], full[arrow.target]
        try:
            maps[key] = ModuleMap(s, t, parse_matrix(val, t.rank, s.rank))
        except (ValueError, json.JSONDecodeError) as exc:
            raise ParseError(lineno, str(exc)) from exc
    return Representation(q, r, full, maps)


def load_representation(path):
    with open(path, encoding="utf-8") as fh:
        return parse_representation(fh.read(), os.path.dirname(os.path.abspath(path)))


def format_representation(x, quiver_path="quiver.txt"):
    lines = [f"quiver {quiver_path}", f"ring {x.ring.n}"]
    for v in x.quiver.vertices:
        lines.append(f"module {v} {x.modules[v]}")
    for a in x.quiver.arrows:
        lines.append(f"map {a.name} {json.dumps(x.maps[a.name].matrix.tolist())}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- JSON


def quiver_to_json(q):
    return {"vertices": list(q.vertices), "arrows": [[a.name, a.source, a.target] for a in q.arrows]}


def quiver_from_json(d):
    return Quiver(tuple(d["vertices"]), tuple(tuple(a) for a in d["arrows"]))


def rep_to_json(x):
    return {
        "ring": x.ring.n,
        "quiver": quiver_to_json(x.quiver),
        "modules": {v: list(m.orders) for v, m in x.modules.items()},
        "maps": {k: f.matrix.tolist() for k, f in x.maps.items()},
    }


def rep_from_json(d):
    q = quiver_from_json(d["quiver"])
    r = fmodule.ring(d["ring"])
    mods = {v: fmodule.module(r, o) for v, o in d["modules"].items()}
    maps = {
        k: ModuleMap(mods[q.arrow(k).source], mods[q.arrow(k).target], _matrix(m, mods[q.arrow(k).target].rank, mods[q.arrow(k).source].rank))
        for k, m in d["maps"].items()
    }
    return Representation(q, r, mods, maps)


def _matrix(data, rows, cols):
    a = np.array(data, dtype=np.int64)
    return a.reshape(rows, cols)


def morphism_to_json(f):
    return {v: m.matrix.tolist() for v, m in f.maps.items()}


def morphism_from_json(d, source, target):
    maps = {
        v: ModuleMap(source.modules[v], target.modules[v], _matrix(m, target.modules[v].rank, source.modules[v].rank))
        for v, m in d.items()
    }
    return RepMorphism(source, target, maps, check=False)


def ses_to_json(s):
    a, b, c = s.terms
    return {
        "terms": [rep_to_json(a), rep_to_json(b), rep_to_json(c)],
        "f": morphism_to_json(s.f),
        "g": morphism_to_json(s.g),
    }


def ses_from_json(d):
    a, b, c = (rep_from_json(t) for t in d["terms"])
    return RepSES(morphism_from_json(d["f"], a, b), morphism_from_json(d["g"], b, c))


def dumps(obj):
    """Deterministic JSON (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")
