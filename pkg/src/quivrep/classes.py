"""Decidable module classes over Z/n.

Theory table (commutative Z/n, finite modules):

=============  ======================  =====================================
class          semisimple n            non-squarefree n (quasi-Frobenius)
=============  ======================  =====================================
Prj, Inj, Flat all modules             sums of Z/d with gcd(d, n/d) = 1
Cot            all modules             all modules (finite => pure-injective)
GF, GI, PGF    all modules             all modules (QF: every module is
                                       a syzygy of a totally acyclic
                                       complex of projective-injectives)
GFperp,        all modules             Inj (right orthogonal of all
PGFperp                                 modules is the injectives)
=============  ======================  =====================================

Over Z/n a cyclic summand Z/d is projective exactly when it is a direct
factor of the ring, i.e. when each prime power of d is the full prime power
of n.  Over an artinian ring finite flat modules are projective, and Z/n is
self-injective, so the three classes coincide.
"""

from dataclasses import dataclass
from math import gcd

from . import fmodule

TAGS = ("Prj", "Inj", "Flat", "Cot", "GF", "GI", "PGF", "GFperp", "PGFperp")


class UnsupportedRing(ValueError):
    pass


def is_projective_module(m):
    """Closed-form rule: every cyclic summand is a ring factor."""
    n = m.ring.n
    return all(gcd(d, n // d) == 1 for d in m.orders)


def _all(m):
    return True


_RULES = {
    fmodule.SEMISIMPLE: {tag: _all for tag in TAGS},
    fmodule.QUASI_FROBENIUS: {
        "Prj": is_projective_module,
        "Inj": is_projective_module,
        "Flat": is_projective_module,
        "Cot": _all,
        "GF": _all,
        "GI": _all,
        "PGF": _all,
        "GFperp": is_projective_module,
        "PGFperp": is_projective_module,
    },
}


@dataclass(frozen=True)
class ClassOracle:
    """Membership predicate for one of the classes in ``TAGS`` over a fixed ring."""

    tag: str
    ring: fmodule.RingSpec

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown class {self.tag!r}; expected one of {TAGS}")
        if self.ring.family not in _RULES:
            raise UnsupportedRing(f"no theory table for {self.ring}")

    def __call__(self, m):
        if m.ring != self.ring:
            raise fmodule.RingMismatch(f"{m} is not over {self.ring}")
        return _RULES[self.ring.family][self.tag](m)

    def __str__(self):
        return f"{self.tag}({self.ring})"


def oracle(tag, r):
    r = r if isinstance(r, fmodule.RingSpec) else fmodule.ring(r)
    return ClassOracle(tag, r)


def class_membership(orc, m):
    return orc(m)


def baer_injective(m):
    """Independent injectivity test: ``Ext^1(Z/n / (d), m) = 0`` for all ``d | n``."""
    r = m.ring
    for d in r.divisors:
        if d > 1 and not fmodule.ext1(fmodule.module(r, (d,)), m).is_zero:
            return False
    return True
