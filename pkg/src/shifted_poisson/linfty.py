"""Lie N-algebras: L-infinity structures on complexes concentrated in degrees -N+1..0.

Brackets ``l_l`` are stored as ``(1,l)`` maps of degree ``2-l`` with
graded-antisymmetric inputs.  The weight-one components used by the
Maurer-Cartan machinery are ``pi^(1,l) = (-1)^(l-1) l_l``; the sign is applied
only in :func:`weight_one_components`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .graded_core import GradedSpace, as_rational
from .polyvector import (
    Key,
    MultiMap,
    PolyvectorFamily,
    ResidualReport,
    compose_tilde,
    is_projected,
    mc_residual,
    project_symmetries,
)


def extend_by_symmetry(space: GradedSpace, arity_in: int, arity_out: int, degree: int, n: int, entries) -> MultiMap:
    """Fill whole orbits from representative entries.

    ``entries`` is a sequence of ``(input names, output names, coeff)``.  Each
    entry fixes the value on its entire orbit under input permutations (graded
    antisymmetric) and output permutations (graded symmetric for even ``n``,
    antisymmetric for odd ``n``).  Entries given for several members of one
    orbit must agree; a nonzero value forced to equal its own negative is an
    error.
    """
    degs = space.degrees
    values: dict[Key, Fraction] = {}
    in_perms = list(permutations(range(arity_in)))
    out_perms = list(permutations(range(arity_out)))

    def sign(items, images, graded_only):
        s = 1
        k = len(images)
        for i in range(k):
            for j in range(i + 1, k):
                if images[i] > images[j]:
                    if not graded_only:
                        s = -s
                    if degs[items[images[i]]] & 1 and degs[items[images[j]]] & 1:
                        s = -s
        return s

    for ins_names, outs_names, c in entries:
        ins = tuple(space.index(x) for x in ins_names)
        outs = tuple(space.index(x) for x in outs_names)
        c = as_rational(c)
        orbit: dict[Key, Fraction] = {}
        for pi in in_perms:
            si = sign(ins, pi, False)
            new_in = tuple(ins[i] for i in pi)
            for po in out_perms:
                so = sign(outs, po, n % 2 == 0)
                key = (new_in, tuple(outs[i] for i in po))
                v = c * si * so
                if key in orbit and orbit[key] != v:
                    if c:
                        raise ValueError(
                            f"entry {list(ins_names)}->{list(outs_names)} is incompatible with the required symmetry"
                        )
                orbit[key] = v
        for key, v in orbit.items():
            if key in values and values[key] != v:
                raise ValueError(f"conflicting values given for the orbit of {list(ins_names)}->{list(outs_names)}")
            values[key] = v
    return MultiMap(space, arity_in, arity_out, degree, values)


@dataclass(frozen=True)
class LieNAlgebra:
    """A graded space in degrees ``-N+1..0`` with brackets ``{l: l_l}``."""

    space: GradedSpace
    brackets: Mapping[int, MultiMap]
    name: str = ""

    def __post_init__(self):
        degs = self.space.degrees
        if degs and (max(degs) > 0):
            raise ValueError("a Lie N-algebra lives in non-positive degrees")
        N = self.N
        clean = {}
        for l, B in sorted(self.brackets.items()):
            if B.space != self.space:
                raise ValueError(f"bracket l_{l} lives on a different space")
            if B.arity != (1, l):
                raise ValueError(f"bracket l_{l} has arity {B.arity}, expected (1,{l})")
            if B.degree != 2 - l and not B.is_zero():
                raise ValueError(f"bracket l_{l} has degree {B.degree}, expected {2 - l}")
            if l < 2:
                raise ValueError("brackets start at l=2; the differential plays the role of l_1")
            if l > N + 1 and not B.is_zero():
                raise ValueError(f"bracket l_{l} must vanish on an {N}-term complex")
            if not is_projected(B, 0):
                raise ValueError(f"bracket l_{l} is not graded antisymmetric")
            if not B.is_zero():
                clean[l] = B
        object.__setattr__(self, "brackets", clean)

    @property
    def N(self) -> int:
        degs = self.space.degrees
        return 1 - min(degs) if degs else 1

    @classmethod
    def from_structure_constants(cls, space: GradedSpace, brackets: Mapping[int, Sequence], name: str = "") -> "LieNAlgebra":
        """Build from unprojected full tables ``{l: [(inputs, outputs, coeff), ...]}`` by projecting."""
        maps = {}
        for l, entries in brackets.items():
            raw = MultiMap.from_names(space, l, 1, 2 - l, entries)
            maps[l] = project_symmetries(raw, 0)
        return cls(space, maps, name)

    @classmethod
    def from_representatives(cls, space: GradedSpace, brackets: Mapping[int, Sequence], name: str = "") -> "LieNAlgebra":
        """Build from one representative entry per orbit, e.g. ``[e,f] = h`` only."""
        maps = {l: extend_by_symmetry(space, l, 1, 2 - l, 0, entries) for l, entries in brackets.items()}
        return cls(space, maps, name)

    def bracket(self, l: int) -> MultiMap:
        return self.brackets.get(l) or MultiMap.zero(self.space, l, 1, 2 - l)


def weight_one_components(alg: LieNAlgebra) -> dict[tuple[int, int], MultiMap]:
    """``pi^(1,l) = (-1)^(l-1) l_l``."""
    return {(1, l): (B if l % 2 == 1 else -B) for l, B in alg.brackets.items()}


def check_linfty(alg: LieNAlgebra) -> ResidualReport:
    """Homotopy Jacobi identities: the weight-one rows ``(1,l)``, ``2 <= l <= 2N+1``.

    The shift does not enter weight-one rows, so ``n = 0`` is used.
    """
    family = PolyvectorFamily(0, weight_one_components(alg))
    report = mc_residual(family, 1)
    rows = {(1, l): report.rows.get((1, l), MultiMap.zero(alg.space, l, 1, 3 - l)) for l in range(2, 2 * alg.N + 2)}
    extra = [k for k in report.rows if k not in rows and not report.rows[k].is_zero()]
    if extra:
        raise AssertionError(f"unexpected nonzero rows {extra}")
    return ResidualReport(rows)


def ternary_square_autovanish(alg: LieNAlgebra) -> bool:
    """For a Lie 2-algebra, the ``(1,5)`` row (the self-composition of ``pi^(1,3)``) vanishes identically."""
    if alg.N != 2:
        raise ValueError("only defined for Lie 2-algebras")
    p13 = weight_one_components(alg).get((1, 3))
    if p13 is None:
        return True
    return compose_tilde(p13, p13, 0).is_zero()


def _element(space: GradedSpace, x) -> dict[int, Fraction]:
    if isinstance(x, str):
        return {space.index(x): Fraction(1)}
    return {space.index(k): as_rational(v) for k, v in dict(x).items() if as_rational(v)}


def _degree_zero_only(alg: LieNAlgebra, x: dict[int, Fraction]):
    if any(alg.space.degrees[i] != 0 for i in x):
        raise ValueError("the adjoint action is taken along degree-0 elements")


def adjoint_action(alg: LieNAlgebra, x) -> MultiMap:
    """``ad_x = l_2(x, .)`` as a degree-0 ``(1,1)`` map on the degree-0 part."""
    xv = _element(alg.space, x)
    _degree_zero_only(alg, xv)
    acc: dict[Key, Fraction] = {}
    for ((a, y), (z,)), c in alg.bracket(2).coeffs.items():
        if a in xv and alg.space.degrees[y] == 0:
            acc[((y,), (z,))] = acc.get(((y,), (z,)), 0) + xv[a] * c
    return MultiMap(alg.space, 1, 1, 0, acc)


def dual_space(space: GradedSpace, suffix: str = "*") -> GradedSpace:
    """The graded dual: basis ``name*`` in degree ``-degree`` (differential dropped)."""
    graded: dict[int, list[str]] = {}
    for name, d in zip(space.names, space.degrees):
        graded.setdefault(-d, []).append(name + suffix)
    return GradedSpace.from_degrees(graded)


def coadjoint_action(alg: LieNAlgebra, x) -> MultiMap:
    """``ad*_x`` on the dual of the degree-0 part: ``<ad*_x theta, y> = -<theta, ad_x y>``."""
    ad = adjoint_action(alg, x)
    dual = dual_space(alg.space)
    acc: dict[Key, Fraction] = {}
    for ((y,), (z,)), c in ad.coeffs.items():
        # (ad_x)^z_y = c, so ad*_x theta^z = sum_y -c theta^y
        src = dual.index(alg.space.names[z] + "*")
        tgt = dual.index(alg.space.names[y] + "*")
        acc[((src,), (tgt,))] = acc.get(((src,), (tgt,)), 0) - c
    return MultiMap(dual, 1, 1, 0, acc)
