"""Specialized identity lists for shifted Poisson structures, and a linear solver.

The specialized identities are stored as data: each identity lists a
``d``-term coefficient and signed two-vertex diagrams ``(coeff, lower, upper)``
in which the first output of ``upper`` feeds the last input of ``lower``.  They
are evaluated by a small tensor evaluator (:func:`evaluate_diagram`) that acts
on pure tensors directly and shares no code with
:func:`shifted_poisson.polyvector.compose_tilde`.  Every verifier compares its
verdict with the generic Maurer-Cartan residual and raises
:class:`ConsistencyError` on disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .graded_core import GradedSpace, Permutation, as_rational, koszul_sign, shuffles
from .linfty import LieNAlgebra, check_linfty, weight_one_components
from .polyvector import (
    MultiMap,
    PolyvectorFamily,
    ResidualReport,
    compose_tilde,
    component_degree,
    is_projected,
    mc_residual,
    project_symmetries,
)


class ConsistencyError(RuntimeError):
    """A specialized verifier disagrees with the generic residual."""


# ---------------------------------------------------------------------------
# Identity tables


@dataclass(frozen=True)
class Identity:
    """``d_coeff * d pi^row = sum coeff * D(lower | upper)``."""

    row: tuple[int, int]
    d_coeff: int
    terms: tuple[tuple[int, tuple[int, int], tuple[int, int]], ...]

    @property
    def label(self) -> str:
        return f"({self.row[0]},{self.row[1]})"


def _ids(*specs) -> tuple[Identity, ...]:
    return tuple(Identity(row, d, tuple(terms)) for row, d, terms in specs)


# Lie algebras, n = 2: invariance of the symmetric tensor.
LIE_N2 = _ids(((2, 1), 0, [(1, (1, 2), (2, 0))]))

# Lie algebras, n = 1: cocycle condition, co-Jacobi up to the trivector, invariance of the trivector.
LIE_N1 = _ids(
    ((2, 2), 0, [(1, (2, 1), (1, 2)), (-1, (1, 2), (2, 1))]),
    ((3, 1), 0, [(1, (2, 1), (2, 1)), (1, (1, 2), (3, 0))]),
    ((4, 0), 0, [(1, (2, 1), (3, 0))]),
)

LIE2_N4 = _ids(
    ((2, 0), 1, []),
    ((2, 1), 0, [(1, (1, 2), (2, 0))]),
)

LIE2_N3 = _ids(
    ((2, 0), 1, []),
    ((2, 1), -1, [(1, (1, 2), (2, 0))]),
    ((2, 2), 0, [(1, (2, 1), (1, 2)), (-1, (1, 2), (2, 1)), (1, (1, 3), (2, 0))]),
    ((3, 0), 0, [(1, (2, 1), (2, 0))]),
)

LIE2_N2 = _ids(
    ((2, 1), -1, [(1, (1, 2), (2, 0))]),
    ((2, 2), -1, [(1, (2, 1), (1, 2)), (-1, (1, 2), (2, 1)), (1, (1, 3), (2, 0))]),
    ((2, 3), 0, [(1, (2, 1), (1, 3)), (1, (1, 2), (2, 2)), (1, (2, 2), (1, 2)), (1, (1, 3), (2, 1))]),
    ((3, 0), -1, [(1, (2, 1), (2, 0))]),
    ((3, 1), -1, [(1, (2, 1), (2, 1)), (1, (1, 2), (3, 0)), (1, (2, 2), (2, 0))]),
    ((3, 2), 0, [(1, (3, 1), (1, 2)), (1, (2, 1), (2, 2)), (-1, (1, 2), (3, 1)), (-1, (2, 2), (2, 1)), (1, (1, 3), (3, 0))]),
    ((4, 0), -1, [(1, (3, 1), (2, 0)), (1, (2, 1), (3, 0))]),
    ((4, 1), 0, [(1, (3, 1), (2, 1)), (1, (2, 1), (3, 1)), (1, (1, 2), (4, 0)), (1, (2, 2), (3, 0))]),
    ((5, 0), 0, [(1, (3, 1), (3, 0)), (1, (2, 1), (4, 0))]),
)

# Homotopy Jacobi identities of a Lie 2-algebra and the Jacobi identity of a Lie algebra.
LINFTY_N2 = _ids(
    ((1, 2), 1, []),
    ((1, 3), -1, [(1, (1, 2), (1, 2))]),
    ((1, 4), 0, [(-1, (1, 3), (1, 2)), (1, (1, 2), (1, 3))]),
)
LINFTY_N1 = _ids(((1, 3), 0, [(1, (1, 2), (1, 2))]))

IDENTITY_TABLES: dict[tuple[int, int], tuple[Identity, ...]] = {
    (1, 2): LIE_N2,
    (1, 1): LIE_N1,
    (2, 4): LIE2_N4,
    (2, 3): LIE2_N3,
    (2, 2): LIE2_N2,
}

ALLOWED_COMPONENTS: dict[tuple[int, int], frozenset] = {
    (1, 2): frozenset({(2, 0)}),
    (1, 1): frozenset({(2, 1), (3, 0)}),
    (2, 4): frozenset({(2, 0)}),
    (2, 3): frozenset({(2, 0), (2, 1)}),
    (2, 2): frozenset({(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (4, 0)}),
}


# ---------------------------------------------------------------------------
# Tensor evaluator

Tensor = dict[tuple[int, ...], Fraction]


def _by_inputs(M: MultiMap) -> dict[tuple[int, ...], list[tuple[tuple[int, ...], Fraction]]]:
    out: dict = {}
    for (ins, outs), c in M.coeffs.items():
        out.setdefault(ins, []).append((outs, c))
    return out


def _apply_at(space: GradedSpace, M: MultiMap, index, tensor: Tensor, start: int) -> Tensor:
    """``(id^start (x) M (x) id)`` on a tensor, with the Koszul sign of M passing the prefix."""
    degs = space.degrees
    l = M.arity_in
    acc: Tensor = {}
    for t, c in tensor.items():
        prefix, block, suffix = t[:start], t[start:start + l], t[start + l:]
        hits = index.get(block)
        if not hits:
            continue
        if M.degree & 1 and sum(degs[x] for x in prefix) & 1:
            c = -c
        for outs, cm in hits:
            key = prefix + outs + suffix
            acc[key] = acc.get(key, 0) + c * cm
    return acc


def _braid(space: GradedSpace, tensor: Tensor, perm: Permutation, coeff: int) -> Tensor:
    degs = space.degrees
    acc: Tensor = {}
    for t, c in tensor.items():
        s = koszul_sign([degs[x] for x in t], perm) * coeff
        key = perm.apply(t)
        acc[key] = acc.get(key, 0) + s * c
    return acc


def _add_into(acc: Tensor, tensor: Tensor, coeff=1):
    for k, v in tensor.items():
        acc[k] = acc.get(k, 0) + coeff * v


def _input_tuples(space: GradedSpace, l: int, degree_sum: int | None = None):
    for t in product(range(space.dim), repeat=l):
        if degree_sum is None or sum(space.degrees[x] for x in t) == degree_sum:
            yield t


def evaluate_diagram(lower: MultiMap, upper: MultiMap, n: int) -> dict:
    """The two-vertex diagram with unshuffled inputs and shuffled outputs, as a table.

    Inputs: ``sum over (l1-1, l2)``-shuffles with signature sign, applied as
    the braiding.  Outputs: ``sum over (m1, m2-1)``-shuffles with sign
    ``(+-1)^|rho|`` (``+`` for even n), the outputs of ``lower`` being moved to
    the shuffle positions.
    """
    space = lower.space
    l1, m1 = lower.arity_in, lower.arity_out
    l2, m2 = upper.arity_in, upper.arity_out
    if l1 < 1 or m2 < 1:
        return {}
    idx_lower, idx_upper = _by_inputs(lower), _by_inputs(upper)
    in_sh = shuffles(l1 - 1, l2)
    out_sh = [(perm.inverse(), sgn if n % 2 else 1) for perm, sgn in shuffles(m1, m2 - 1)]
    table: dict = {}
    for y in _input_tuples(space, l1 - 1 + l2):
        result: Tensor = {}
        for perm, sgn in in_sh:
            t = _braid(space, {y: Fraction(1)}, perm, sgn)
            t = _apply_at(space, upper, idx_upper, t, l1 - 1)
            t = _apply_at(space, lower, idx_lower, t, 0)
            for operm, osgn in out_sh:
                _add_into(result, _braid(space, t, operm, osgn))
        for outs, c in result.items():
            if c:
                table[(y, outs)] = c
    return table


def evaluate_differential(M: MultiMap) -> dict:
    """``d M - (-1)^|M| M d`` evaluated on every input tuple."""
    space = M.space
    degs = space.degrees
    d = space.d_out()
    index = _by_inputs(M)

    def d_tensor(tensor: Tensor) -> Tensor:
        acc: Tensor = {}
        for t, c in tensor.items():
            before = 0
            for i, x in enumerate(t):
                for tgt, dc in d.get(x, ()):
                    key = t[:i] + (tgt,) + t[i + 1:]
                    v = c * dc
                    acc[key] = acc.get(key, 0) + (-v if before & 1 else v)
                before += degs[x]
        return acc

    table: dict = {}
    if not d:
        return table
    for y in _input_tuples(space, M.arity_in):
        first = d_tensor(_apply_at(space, M, index, {y: Fraction(1)}, 0))
        second = _apply_at(space, M, index, d_tensor({y: Fraction(1)}), 0)
        acc: Tensor = dict(first)
        _add_into(acc, second, -1 if M.degree % 2 == 0 else 1)
        for outs, c in acc.items():
            if c:
                table[(y, outs)] = c
    return table


def evaluate_identity(identity: Identity, comps: Mapping[tuple[int, int], MultiMap], n: int) -> dict:
    """``d_coeff * d pi^row - sum coeff * D(lower|upper)``; zero table iff the identity holds."""
    acc: dict = {}
    if identity.d_coeff and identity.row in comps:
        for k, v in evaluate_differential(comps[identity.row]).items():
            acc[k] = acc.get(k, 0) + identity.d_coeff * v
    for coeff, lower, upper in identity.terms:
        if lower in comps and upper in comps:
            for k, v in evaluate_diagram(comps[lower], comps[upper], n).items():
                acc[k] = acc.get(k, 0) - coeff * v
    return {k: v for k, v in acc.items() if v}


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Verdict:
    valid: bool
    specialized: bool
    generic: bool
    failed: tuple[str, ...] = ()
    report: ResidualReport | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.valid


def _generic(alg: LieNAlgebra, comps: Mapping[tuple[int, int], MultiMap], n: int) -> tuple[bool, ResidualReport | None]:
    if not all(is_projected(M, n) for M in comps.values()):
        return False, None
    family = PolyvectorFamily(n, {**weight_one_components(alg), **comps})
    report = mc_residual(family, 2 * alg.N + 2)
    return report.is_zero, report


def _settle(specialized: bool, failed: list[str], alg, comps, n, what: str) -> Verdict:
    generic, report = _generic(alg, comps, n)
    if generic != specialized:
        raise ConsistencyError(
            f"{what}: specialized identities say {'valid' if specialized else 'invalid'} "
            f"(failed: {failed or 'none'}) but the generic residual says {'zero' if generic else 'nonzero'}"
        )
    return Verdict(specialized, specialized, generic, tuple(failed), report)


def _run_table(table, comps, n, failed: list[str]) -> bool:
    ok = True
    for ident in table:
        if evaluate_identity(ident, comps, n):
            failed.append(ident.label)
            ok = False
    return ok


def _check_shape(M: MultiMap, m: int, l: int, n: int, what: str):
    if M.arity != (m, l):
        raise ValueError(f"{what} must have arity ({m},{l}), got {M.arity}")
    if M.degree != component_degree(m, l, n) and not M.is_zero():
        raise ValueError(f"{what} must have degree {component_degree(m, l, n)}, got {M.degree}")


def _require_lie(alg: LieNAlgebra):
    if alg.N != 1:
        raise ValueError("expected a Lie algebra (N = 1)")


def _pi_components(alg: LieNAlgebra) -> dict:
    return weight_one_components(alg)


def verify_2shifted_lie(alg: LieNAlgebra, T: MultiMap) -> Verdict:
    """Symmetric degree-0 tensor ``T`` on a Lie algebra: symmetry plus invariance."""
    _require_lie(alg)
    _check_shape(T, 2, 0, 2, "T")
    failed: list[str] = []
    symmetric = project_symmetries(T, 2) == T
    if not symmetric:
        failed.append("symmetry")
    comps = {**_pi_components(alg), (2, 0): T}
    ok = _run_table(LIE_N2, comps, 2, failed) and symmetric
    return _settle(ok, failed, alg, {(2, 0): T}, 2, "2-shifted structure on a Lie algebra")


def verify_1shifted_lie(alg: LieNAlgebra, cobracket: MultiMap, trivector: MultiMap) -> Verdict:
    """Cobracket ``(2,1)`` and trivector ``(3,0)`` on a Lie algebra at shift 1."""
    _require_lie(alg)
    _check_shape(cobracket, 2, 1, 1, "cobracket")
    _check_shape(trivector, 3, 0, 1, "trivector")
    failed: list[str] = []
    sym = True
    for label, M in (("cobracket antisymmetry", cobracket), ("trivector antisymmetry", trivector)):
        if project_symmetries(M, 1) != M:
            failed.append(label)
            sym = False
    comps = {**_pi_components(alg), (2, 1): cobracket, (3, 0): trivector}
    ok = _run_table(LIE_N1, comps, 1, failed) and sym
    return _settle(ok, failed, alg, {(2, 1): cobracket, (3, 0): trivector}, 1, "1-shifted structure on a Lie algebra")


def verify_lie2_shifted(alg: LieNAlgebra, pi: PolyvectorFamily | Mapping[tuple[int, int], MultiMap], n: int) -> Verdict:
    """Shifted Poisson candidates on a Lie 2-algebra for ``n`` in {2, 3, 4}."""
    if alg.N != 2:
        raise ValueError("expected a Lie 2-algebra (N = 2)")
    if n not in (2, 3, 4):
        raise ValueError("specialized identities exist for n = 2, 3, 4")
    comps = dict(pi.components if isinstance(pi, PolyvectorFamily) else pi)
    allowed = ALLOWED_COMPONENTS[(2, n)]
    for key, M in comps.items():
        if key not in allowed:
            raise ValueError(f"component {key} is not admissible for a Lie 2-algebra at n={n}")
        _check_shape(M, key[0], key[1], n, f"component {key}")
    linfty = check_linfty(alg)
    if not linfty.is_zero:
        raise ValueError(f"not a Lie 2-algebra: homotopy Jacobi rows {linfty.nonzero_rows()} fail")
    failed: list[str] = []
    sym = True
    for key, M in sorted(comps.items()):
        if project_symmetries(M, n) != M:
            failed.append(f"symmetry {key}")
            sym = False
    full = {**_pi_components(alg), **comps}
    ok = _run_table(IDENTITY_TABLES[(2, n)], full, n, failed) and sym
    return _settle(ok, failed, alg, comps, n, f"{n}-shifted structure on a Lie 2-algebra")


def check_linfty_specialized(alg: LieNAlgebra) -> bool:
    """Hand-listed homotopy Jacobi identities for N = 1, 2 (an independent route to check_linfty)."""
    table = {1: LINFTY_N1, 2: LINFTY_N2}.get(alg.N)
    if table is None:
        raise ValueError("specialized identities exist for N = 1, 2")
    return _run_table(table, _pi_components(alg), 0, [])


SPECIALIZED_CASES = tuple(sorted(IDENTITY_TABLES))


def verify_specialized(alg: LieNAlgebra, family: PolyvectorFamily) -> Verdict:
    """Dispatch to the verifier matching ``(N, n)``."""
    key = (alg.N, family.n)
    comps = family.nonzero()
    if key not in IDENTITY_TABLES:
        raise ValueError(f"no specialized identity list for N={alg.N}, n={family.n}")
    space = alg.space
    if key == (1, 2):
        return verify_2shifted_lie(alg, comps.get((2, 0), MultiMap.zero(space, 0, 2, 0)))
    if key == (1, 1):
        return verify_1shifted_lie(
            alg, comps.get((2, 1), MultiMap.zero(space, 1, 2, 0)), comps.get((3, 0), MultiMap.zero(space, 0, 3, 0))
        )
    return verify_lie2_shifted(alg, comps, family.n)


# ---------------------------------------------------------------------------
# Example-specific reduced conditions


def _structure_constants(h: LieNAlgebra) -> dict[tuple[int, int], dict[int, Fraction]]:
    out: dict = {}
    for ((x, y), (z,)), c in h.bracket(2).coeffs.items():
        out.setdefault((x, y), {})[z] = c
    return out


def _vector(space: GradedSpace, v: Mapping[str, object]) -> dict[int, Fraction]:
    return {space.index(k): as_rational(c) for k, c in v.items() if as_rational(c)}


def string_conditions(h: LieNAlgebra, kappa: MultiMap, one: Mapping[str, object], form: Mapping[str, object]) -> list[str]:
    """Failed reduced conditions: ``[x,1] = 0``, ``<1> = 0``, ``<[x,y]> = -kappa(x,y,1)``."""
    space = h.space
    br = _structure_constants(h)
    u = _vector(space, one)
    f = _vector(space, form)
    k = {ins: c for (ins, _), c in kappa.coeffs.items()}
    dim = space.dim
    failed = []
    central = all(
        sum(c * br.get((x, i), {}).get(z, 0) for i, c in u.items()) == 0 for x in range(dim) for z in range(dim)
    )
    if not central:
        failed.append("central")
    if sum(f.get(i, 0) * c for i, c in u.items()) != 0:
        failed.append("form kills 1")
    twist = all(
        sum(f.get(z, 0) * c for z, c in br.get((x, y), {}).items())
        == -sum(c * k.get((x, y, i), 0) for i, c in u.items())
        for x in range(dim)
        for y in range(dim)
    )
    if not twist:
        failed.append("form on brackets")
    return failed


def verify_string_3shifted(h: LieNAlgebra, kappa: MultiMap, one: Mapping[str, object], form: Mapping[str, object]) -> Verdict:
    """Reduced conditions for 3-shifted structures on a string Lie 2-algebra, cross-checked."""
    from .examples import make_string, string_components

    hk = make_string(h, kappa)  # raises when kappa is not a cocycle
    failed = string_conditions(h, kappa, one, form)
    assembled = verify_lie2_shifted(hk, string_components(hk, one, form), 3)
    if assembled.valid != (not failed):
        raise ConsistencyError(
            f"string conditions (failed: {failed or 'none'}) disagree with the Lie 2-algebra identities"
        )
    return Verdict(not failed, not failed, assembled.generic, tuple(failed), assembled.report)


def cotangent_conditions(
    h: LieNAlgebra, r: Mapping[tuple[str, str], object], q: Mapping[str, Mapping[tuple[str, str], object]]
) -> list[str]:
    """Failed conditions among invariance of r, the q-compatibility, and the mixed symmetrization."""
    space = h.space
    dim = space.dim
    br = _structure_constants(h)
    R = {(space.index(i), space.index(j)): as_rational(c) for (i, j), c in r.items() if as_rational(c)}
    Q = {
        space.index(j): {(space.index(a), space.index(b)): as_rational(c) for (a, b), c in t.items() if as_rational(c)}
        for j, t in q.items()
    }

    def c(x, y, z):
        return br.get((x, y), {}).get(z, 0)

    failed = []
    # (ad*_x (x) id + id (x) ad_x) r = 0, with ad*_x theta^i = -sum_p c(x,p,i) theta^p
    inv_ok = True
    for x in range(dim):
        acc: dict = {}
        for (i, j), v in R.items():
            for p in range(dim):
                if c(x, p, i):
                    acc[(p, j)] = acc.get((p, j), 0) - v * c(x, p, i)
            for z in range(dim):
                if c(x, j, z):
                    acc[(i, z)] = acc.get((i, z), 0) + v * c(x, j, z)
        if any(acc.values()):
            inv_ok = False
    if not inv_ok:
        failed.append("invariance of r")

    def coad2(x, table):
        acc: dict = {}
        for (a, b), v in table.items():
            for p in range(dim):
                if c(x, p, a):
                    acc[(p, b)] = acc.get((p, b), 0) - v * c(x, p, a)
                if c(x, p, b):
                    acc[(a, p)] = acc.get((a, p), 0) - v * c(x, p, b)
        return acc

    comp_ok = True
    for x in range(dim):
        for y in range(dim):
            acc: dict = {}
            for z, v in br.get((x, y), {}).items():
                for k2, w in Q.get(z, {}).items():
                    acc[k2] = acc.get(k2, 0) + v * w
            for k2, w in coad2(x, Q.get(y, {})).items():
                acc[k2] = acc.get(k2, 0) - w
            for k2, w in coad2(y, Q.get(x, {})).items():
                acc[k2] = acc.get(k2, 0) + w
            if any(acc.values()):
                comp_ok = False
    if not comp_ok:
        failed.append("q compatibility")

    sym_ok = True
    for a, b, cc in product(range(dim), repeat=3):
        total = sum(
            Q.get(j, {}).get((a, b), 0) * R.get((cc, j), 0)
            + Q.get(j, {}).get((a, cc), 0) * R.get((b, j), 0)
            + Q.get(j, {}).get((b, cc), 0) * R.get((a, j), 0)
            for j in range(dim)
        )
        if total:
            sym_ok = False
    if not sym_ok:
        failed.append("mixed symmetrization")
    return failed


def verify_cotangent_3shifted(
    h: LieNAlgebra, r: Mapping[tuple[str, str], object], q: Mapping[str, Mapping[tuple[str, str], object]]
) -> Verdict:
    """Reduced conditions for 3-shifted structures on a shifted cotangent Lie 2-algebra, cross-checked."""
    from .examples import coev_component, cotangent_q_component, make_cotangent

    cot = make_cotangent(h)
    failed = cotangent_conditions(h, r, q)
    comps = {(2, 0): coev_component(cot, r), (2, 1): cotangent_q_component(cot, q)}
    assembled = verify_lie2_shifted(cot, comps, 3)
    if assembled.valid != (not failed):
        raise ConsistencyError(
            f"cotangent conditions (failed: {failed or 'none'}) disagree with the Lie 2-algebra identities"
        )
    return Verdict(not failed, not failed, assembled.generic, tuple(failed), assembled.report)


# ---------------------------------------------------------------------------
# Linear strata


@dataclass(frozen=True)
class SolutionSpace:
    """Solutions ``offset + span(basis)`` in the coordinates ``slots``.

    Each slot ``(m, l, inputs, outputs)`` names the coefficient of one orbit
    representative (sorted multi-indices) of the projected component; the
    matching ``generators`` are the projected maps with value 1 there.
    """

    n: int
    slots: tuple[tuple[int, int, tuple[str, ...], tuple[str, ...]], ...]
    generators: tuple[MultiMap, ...] = field(repr=False)
    basis: tuple[tuple[Fraction, ...], ...]
    affine_offset: tuple[Fraction, ...] | None
    consistent: bool = True
    dropped_rows: tuple[tuple[int, int], ...] = ()

    @property
    def relaxed(self) -> bool:
        """True when quadratic rows were dropped: the space then contains every true solution."""
        return bool(self.dropped_rows)

    @property
    def dimension(self) -> int:
        return len(self.basis) if self.consistent else -1

    def components(self, vector: Sequence[Fraction]) -> dict[tuple[int, int], MultiMap]:
        out: dict[tuple[int, int], MultiMap] = {}
        for (m, l, _, _), gen, c in zip(self.slots, self.generators, vector):
            if c:
                out[(m, l)] = out[(m, l)] + gen.scale(c) if (m, l) in out else gen.scale(c)
        return out


def admissible_basis(space: GradedSpace, m: int, l: int, n: int) -> list[tuple[tuple[int, ...], tuple[int, ...], MultiMap]]:
    """Projected elementary maps, one per orbit of sorted multi-indices, normalized at the representative."""
    from itertools import combinations_with_replacement

    degs = space.degrees
    target = component_degree(m, l, n)
    out = []
    for ins in combinations_with_replacement(range(space.dim), l):
        din = sum(degs[i] for i in ins)
        for outs in combinations_with_replacement(range(space.dim), m):
            if sum(degs[o] for o in outs) - din != target:
                continue
            P = project_symmetries(MultiMap(space, l, m, target, {(ins, outs): 1}), n)
            v = P[(ins, outs)]
            if v:
                out.append((ins, outs, P.scale(1 / v)))
    return out


class NonlinearSystemError(ValueError):
    pass


def _flatten(report: ResidualReport) -> dict:
    flat = {}
    for key, R in report.rows.items():
        for (ins, outs), c in R.coeffs.items():
            flat[(key, ins, outs)] = c
    return flat


def solve_linear_stratum(
    alg: LieNAlgebra,
    n: int,
    fixed: PolyvectorFamily | Mapping[tuple[int, int], MultiMap] | None,
    unknowns,
    weight_cap: int | None = None,
    relax: bool = False,
) -> SolutionSpace:
    """Solve the Maurer-Cartan rows for the unknown components, linear in the unknowns.

    Raises :class:`NonlinearSystemError` when two unknown components compose to
    something nonzero.  With ``relax=True`` the rows receiving quadratic terms
    are dropped instead; the result is then a linear space containing every
    solution, and only a zero-dimensional answer is conclusive.  Returned
    solutions are re-verified with :func:`mc_residual` (on the kept rows when
    relaxed; the zero/offset point always on all rows when the space is a point).
    """
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    space = alg.space
    fixed_comps = dict(fixed.components if isinstance(fixed, PolyvectorFamily) else (fixed or {}))
    unknowns = sorted(set(unknowns))
    for key in unknowns:
        if key in fixed_comps:
            raise ValueError(f"component {key} is both fixed and unknown")
        if key[0] < 2:
            raise ValueError(f"unknown {key} must have weight at least 2")
    cap = weight_cap or 2 * alg.N + 2
    names = space.names
    slots, gens = [], []
    for m, l in unknowns:
        for ins, outs, P in admissible_basis(space, m, l, n):
            slots.append((m, l, tuple(names[i] for i in ins), tuple(names[o] for o in outs)))
            gens.append(P)

    # quadratic coupling between unknowns
    offending = set()
    for i, A in enumerate(gens):
        for B in gens:
            if A.arity_in >= 1 and B.arity_out >= 1 and A.arity_out + B.arity_out - 1 <= cap:
                if not compose_tilde(A, B, n).is_zero():
                    offending.add((A.arity_out + B.arity_out - 1, A.arity_in + B.arity_in - 1))
    if offending and not relax:
        rows = ", ".join(f"({m},{l})" for m, l in sorted(offending))
        raise NonlinearSystemError(f"nonlinear system: unknowns couple quadratically in rows {rows}")
    dropped = tuple(sorted(offending))

    base_comps = {**weight_one_components(alg), **fixed_comps}

    def residual(extra: Mapping) -> ResidualReport:
        comps = dict(base_comps)
        for k, M in extra.items():
            comps[k] = comps[k] + M if k in comps else M
        return mc_residual(PolyvectorFamily(n, comps), cap)

    def kept(flat: dict) -> dict:
        return {k: v for k, v in flat.items() if k[0] not in dropped}

    r0 = kept(_flatten(residual({})))
    columns = []
    for (m, l, _, _), gen in zip(slots, gens):
        # the odd part of x -> R(x g) is the exact linear term, even without coupling
        rp = kept(_flatten(residual({(m, l): gen})))
        rm = kept(_flatten(residual({(m, l): -gen})))
        col = {k: (rp.get(k, 0) - rm.get(k, 0)) / 2 for k in set(rp) | set(rm)}
        columns.append({k: v for k, v in col.items() if v})
    row_keys = sorted(set(r0).union(*[set(c) for c in columns]) if columns else set(r0))
    nvar = len(slots)
    if not row_keys:
        basis = [tuple(Fraction(int(i == j)) for j in range(nvar)) for i in range(nvar)]
        return _verified(SolutionSpace(n, tuple(slots), tuple(gens), tuple(basis), None, True, dropped), residual)
    rows = [[QQ(columns[j].get(k, 0).numerator, columns[j].get(k, 0).denominator) if k in columns[j] else QQ(0) for j in range(nvar)] + [QQ(-r0.get(k, 0).numerator, r0.get(k, 0).denominator) if k in r0 else QQ(0)] for k in row_keys]
    aug = DomainMatrix(rows, (len(row_keys), nvar + 1), QQ)
    rref, pivots = aug.rref()
    if nvar in pivots:
        return SolutionSpace(n, tuple(slots), tuple(gens), (), None, False, dropped)
    dense = rref.to_Matrix()
    free = [j for j in range(nvar) if j not in pivots]
    basis = []
    for fj in free:
        vec = [Fraction(0)] * nvar
        vec[fj] = Fraction(1)
        for r, pj in enumerate(pivots):
            v = dense[r, fj]
            vec[pj] = -Fraction(int(v.p), int(v.q))
        basis.append(tuple(vec))
    offset = None
    if r0:
        vec = [Fraction(0)] * nvar
        for r, pj in enumerate(pivots):
            v = dense[r, nvar]
            vec[pj] = Fraction(int(v.p), int(v.q))
        offset = tuple(vec)
    return _verified(SolutionSpace(n, tuple(slots), tuple(gens), tuple(basis), offset, True, dropped), residual)


def _verified(sol: SolutionSpace, residual) -> SolutionSpace:
    start = sol.affine_offset or tuple(Fraction(0) for _ in sol.slots)
    candidates = [start] + [tuple(a + b for a, b in zip(start, v)) for v in sol.basis]
    for vec in candidates:
        rows = residual(sol.components(vec)).rows
        if any(not R.is_zero() for key, R in rows.items() if key not in sol.dropped_rows):
            raise ConsistencyError("a computed solution does not satisfy the Maurer-Cartan rows")
    if sol.relaxed and not sol.basis and not residual(sol.components(start)).is_zero:
        # the only candidate left by the linear rows fails a quadratic row: no solutions
        return replace(sol, consistent=False)
    return sol
