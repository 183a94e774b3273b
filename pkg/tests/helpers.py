"""Small fixtures shared by the unit tests."""

import itertools

import numpy as np

from quivrep import fmodule
from quivrep.fmodule import ModuleMap, module
from quivrep.quiver import example_quiver
from quivrep.representation import RepMorphism, Representation


def example_rep_injective_phi():
    """X(1)=Z/2, X(2)=0, X(3)=Z/4 with a = x2, X(4)=Z/4 with c = id, over Z/4."""
    r = fmodule.ring(4)
    return Representation(
        example_quiver(),
        r,
        {"1": module(r, (2,)), "3": module(r, (4,)), "4": module(r, (4,))},
        {"a": [[2]], "c": [[1]]},
    )


def example_rep_noninjective_phi():
    """X(1)=Z/4, X(2)=Z/2, X(3)=Z/4 with a = id, b = x2, over Z/4."""
    r = fmodule.ring(4)
    return Representation(
        example_quiver(),
        r,
        {"1": module(r, (4,)), "2": module(r, (2,)), "3": module(r, (4,))},
        {"a": [[1]], "b": [[2]]},
    )


def brute_hom_count(x, y):
    """Count natural families by enumerating every tuple of vertex maps."""
    q = x.quiver
    choices = [list(fmodule.HomSpace(x.modules[v], y.modules[v]).elements()) for v in q.vertices]
    count = 0
    for fam in itertools.product(*choices):
        f = RepMorphism(x, y, dict(zip(q.vertices, fam)), check=False)
        if not f.naturality_defects():
            count += 1
    return count
