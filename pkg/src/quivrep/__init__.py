"""Representations of quivers over Z/n: Gorenstein flat classes, duality,
tensor products and stagewise constructions, all checked computationally."""

__version__ = "0.1.0"

from ._accel import backend
from .fmodule import (
    FiniteModule,
    ModuleMap,
    ModuleSES,
    RingSpec,
    direct_sum,
    ext1,
    free_module,
    hom_module,
    module,
    ring,
    tensor_module,
    zero_module,
)
from .linalg import ModularMatrix, howell_form, kernel, solve
from .quiver import (
    Quiver,
    a2_quiver,
    example_quiver,
    is_acyclic,
    is_left_rooted,
    load_quiver,
    parse_quiver,
    quiver,
    v_sequence,
)
from .representation import (
    RepMorphism,
    RepSES,
    Representation,
    in_phi_class,
    in_psi_class,
    in_rep_class,
    is_flat_rep,
    is_gorenstein_flat_rep,
    is_pgf_rep,
    is_projective_rep,
    phi,
    psi,
)

__all__ = [
    "FiniteModule",
    "ModularMatrix",
    "ModuleMap",
    "ModuleSES",
    "Quiver",
    "RepMorphism",
    "RepSES",
    "Representation",
    "RingSpec",
    "a2_quiver",
    "example_quiver",
    "backend",
    "direct_sum",
    "ext1",
    "free_module",
    "hom_module",
    "howell_form",
    "in_phi_class",
    "in_psi_class",
    "in_rep_class",
    "is_acyclic",
    "is_flat_rep",
    "is_gorenstein_flat_rep",
    "is_left_rooted",
    "is_pgf_rep",
    "is_projective_rep",
    "kernel",
    "load_quiver",
    "module",
    "parse_quiver",
    "phi",
    "psi",
    "quiver",
    "ring",
    "solve",
    "tensor_module",
    "v_sequence",
    "zero_module",
]
