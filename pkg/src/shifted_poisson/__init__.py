"""Exact computer algebra for shifted Poisson structures on Lie N-algebras.

Layers, bottom to top: :mod:`graded_core` (graded spaces, Koszul signs,
shuffles), :mod:`polyvector` (multilinear maps, projector, composition,
Maurer-Cartan residual), :mod:`linfty` (Lie N-algebras), :mod:`examples`
(catalog), :mod:`classify` (hand-listed identities, linear solver), and the
:mod:`io` / :mod:`cli` front end.
"""

from __future__ import annotations

from .graded_core import GradedSpace, Permutation, koszul_sign, shuffles
from .linfty import LieNAlgebra, check_linfty
from .polyvector import (
    MultiMap,
    PolyvectorFamily,
    compose_tilde,
    enumerate_components,
    hom_differential,
    mc_residual,
    project_symmetries,
    schouten_bracket,
)

__all__ = [
    "GradedSpace",
    "LieNAlgebra",
    "MultiMap",
    "Permutation",
    "PolyvectorFamily",
    "check_linfty",
    "compose_tilde",
    "enumerate_components",
    "hom_differential",
    "koszul_sign",
    "mc_residual",
    "project_symmetries",
    "schouten_bracket",
    "shuffles",
]
