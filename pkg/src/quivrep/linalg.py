"""Dense linear algebra over Z/n: Howell form, kernels and linear solving."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import MAX_MODULUS


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ModularMatrix:
    """A dense matrix with entries in Z/modulus."""

    modulus: int
    entries: np.ndarray

    def __post_init__(self):
        n = int(self.modulus)
        if not 2 <= n <= MAX_MODULUS:
            raise ValueError(f"modulus must lie in [2, {MAX_MODULUS}], got {n}")
        a = np.array(self.entries, dtype=np.int64)
        if a.ndim != 2:
            a = a.reshape(-1, a.shape[-1] if a.ndim else 0)
        a %= n
        a.setflags(write=False)
        object.__setattr__(self, "modulus", n)
        object.__setattr__(self, "entries", a)

    @classmethod
    def zeros(cls, modulus, rows, cols):
        return cls(modulus, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, modulus, size):
        return cls(modulus, np.eye(size, dtype=np.int64))

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other):
        if isinstance(other, ModularMatrix):
            if other.modulus != self.modulus:
                raise ValueError("modulus mismatch")
            other = other.entries
        other = np.asarray(other, dtype=np.int64)
        if self.cols != other.shape[0]:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        out = (self.entries @ other) % self.modulus
        if out.ndim == 1:
            return out
        return ModularMatrix(self.modulus, out)

    def __eq__(self, other):
        return (
            isinstance(other, ModularMatrix)
            and self.modulus == other.modulus
            and self.shape == other.shape
            and bool((self.entries == other.entries).all())
        )

    def __hash__(self):
        return hash((self.modulus, self.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"ModularMatrix(mod {self.modulus}, {self.entries.tolist()})"

    def tolist(self):
        return self.entries.tolist()


def _mat(m, modulus=None):
    if isinstance(m, ModularMatrix):
        return m
    return ModularMatrix(modulus, m)


def howell_form(m):
    """Howell form ``h`` of ``m`` together with a transform ``u``.

    The input is padded with ``m.cols`` zero rows before elimination, so
    ``u`` is square of size ``m.rows + m.cols`` and ``u @ [m; 0] == h``.
    The nonzero rows of ``h`` come first and are the canonical Howell basis
    of the row span of ``m``.
    """
    h, u = kernels.howell(m.entries, m.modulus)
    return ModularMatrix(m.modulus, h), ModularMatrix(m.modulus, u)


def howell_rows(m):
    """Nonzero rows of the Howell form of ``m``."""
    h, _ = kernels.howell(m.entries, m.modulus)
    return h[h.any(axis=1)]


def kernel(a):
    """Matrix whose rows generate ``{x : a @ x == 0}``."""
    n = a.modulus
    m, c = a.shape
    aug = np.zeros((c, m + c), dtype=np.int64)
    aug[:, :m] = a.entries.T
    aug[:, m:] = np.eye(c, dtype=np.int64)
    h = howell_rows(ModularMatrix(n, aug))
    gens = h[~h[:, :m].any(axis=1), m:]
    return ModularMatrix(n, gens.reshape(-1, c))


def solve(a, b):
    """Solve ``a @ x == b`` over Z/n.

    Returns ``(x, kernel_rows)`` or ``None`` when there is no solution.
    """
    n = a.modulus
    m, c = a.shape
    b = np.asarray(b, dtype=np.int64).reshape(-1) % n
    if b.shape[0] != m:
        raise DimensionError(f"right-hand side has length {b.shape[0]}, expected {m}")
    aug = np.zeros((c + 1, m + 1 + c), dtype=np.int64)
    aug[:c, :m] = a.entries.T
    aug[:c, m + 1:] = np.eye(c, dtype=np.int64)
    aug[c, :m] = (-b) % n
    aug[c, m] = 1
    h = howell_rows(ModularMatrix(n, aug))
    free = h[~h[:, :m].any(axis=1)]
    sol = free[free[:, m] != 0]
    if len(sol) == 0 or sol[0, m] != 1:
        return None
    ker = free[free[:, m] == 0][:, m + 1:]
    return sol[0, m + 1:].copy(), ModularMatrix(n, ker.reshape(-1, c))


def row_span(m):
    """Every vector in the row span (brute force; small inputs only)."""
    n = m.modulus
    rows = howell_rows(m)
    span = {tuple([0] * m.cols)}
    for r in rows:
        mult = {tuple(((k * r) % n).tolist()) for k in range(n)}
        span = {tuple((np.add(s, v) % n).tolist()) for s in span for v in mult}
    return span
