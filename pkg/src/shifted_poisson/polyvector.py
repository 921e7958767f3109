"""Shifted polyvectors in the multilinear-map representation.

A component ``pi^(m,l)`` is a homogeneous map ``g^{(x)l} -> g^{(x)m}`` stored
as a sparse coefficient table over pure tensors of basis vectors (all index
orderings stored explicitly).  This module provides the symmetry projector,
the internal-hom differential, the composition operation whose graded
commutator is the Schouten bracket, and Maurer-Cartan residuals.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import comb, factorial
from typing import Mapping

from .graded_core import GradedSpace, as_rational, interleavings

Key = tuple[tuple[int, ...], tuple[int, ...]]

THREADS_ENV = "SHIFTED_POISSON_THREADS"
_PARALLEL_MIN_TERMS = 4000


def thread_cap() -> int:
    """Worker cap from ``SHIFTED_POISSON_THREADS`` (default 1, i.e. sequential)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    return max(1, value)


@dataclass(frozen=True, eq=False)
class MultiMap:
    """Homogeneous map ``g^{(x)arity_in} -> g^{(x)arity_out}`` of a given degree.

    ``coeffs`` maps ``(inputs, outputs)`` tuples of global basis ids to nonzero
    Fractions.  Every entry must satisfy
    ``sum deg(outputs) - sum deg(inputs) == degree``.
    """

    space: GradedSpace
    arity_in: int
    arity_out: int
    degree: int
    coeffs: Mapping[Key, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        degs = self.space.degrees
        clean: dict[Key, Fraction] = {}
        for (ins, outs), c in self.coeffs.items():
            ins, outs = tuple(ins), tuple(outs)
            if len(ins) != self.arity_in or len(outs) != self.arity_out:
                raise ValueError(f"entry {ins}->{outs} does not have arity ({self.arity_out},{self.arity_in})")
            if sum(degs[o] for o in outs) - sum(degs[i] for i in ins) != self.degree:
                raise ValueError(
                    f"entry {self._fmt(ins)}->{self._fmt(outs)} is not homogeneous of degree {self.degree}"
                )
            c = as_rational(c)
            if c:
                clean[(ins, outs)] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def _trusted(cls, space, arity_in, arity_out, degree, coeffs) -> "MultiMap":
        obj = object.__new__(cls)
        object.__setattr__(obj, "space", space)
        object.__setattr__(obj, "arity_in", arity_in)
        object.__setattr__(obj, "arity_out", arity_out)
        object.__setattr__(obj, "degree", degree)
        object.__setattr__(obj, "coeffs", {k: v for k, v in coeffs.items() if v})
        return obj

    @classmethod
    def zero(cls, space: GradedSpace, arity_in: int, arity_out: int, degree: int) -> "MultiMap":
        return cls._trusted(space, arity_in, arity_out, degree, {})

    @classmethod
    def from_names(cls, space, arity_in, arity_out, degree, entries) -> "MultiMap":
        """Build from ``[(input names, output names, coeff), ...]``; repeated keys add up."""
        acc: dict[Key, Fraction] = {}
        for ins, outs, c in entries:
            key = (tuple(space.index(x) for x in ins), tuple(space.index(x) for x in outs))
            acc[key] = acc.get(key, Fraction(0)) + as_rational(c)
        return cls(space, arity_in, arity_out, degree, acc)

    # -- queries -----------------------------------------------------------

    @property
    def arity(self) -> tuple[int, int]:
        """``(m, l)``: outputs first, as in the component labels ``pi^(m,l)``."""
        return (self.arity_out, self.arity_in)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, key: Key) -> Fraction:
        return self.coeffs.get(key, Fraction(0))

    def _fmt(self, ids) -> str:
        return "[" + ",".join(self.space.names[i] for i in ids) + "]"

    def items(self):
        """Entries in lexicographic multi-index order."""
        return sorted(self.coeffs.items())

    def named_entries(self) -> list[tuple[tuple[str, ...], tuple[str, ...], Fraction]]:
        names = self.space.names
        return [(tuple(names[i] for i in ins), tuple(names[o] for o in outs), c) for (ins, outs), c in self.items()]

    def __repr__(self) -> str:
        return (
            f"MultiMap(arity=({self.arity_out},{self.arity_in}), degree={self.degree}, "
            f"entries={len(self.coeffs)})"
        )

    # -- linear structure --------------------------------------------------

    def _check_compatible(self, other: "MultiMap"):
        if not isinstance(other, MultiMap):
            raise TypeError("can only combine MultiMaps")
        if other.space != self.space:
            raise ValueError("maps live on different graded spaces")
        if (self.arity_in, self.arity_out) != (other.arity_in, other.arity_out):
            raise ValueError("maps have different arities")
        if self.degree != other.degree and self.coeffs and other.coeffs:
            raise ValueError("maps have different degrees")

    def _result_degree(self, other: "MultiMap") -> int:
        return self.degree if self.coeffs or not other.coeffs else other.degree

    def __add__(self, other: "MultiMap") -> "MultiMap":
        self._check_compatible(other)
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return MultiMap._trusted(self.space, self.arity_in, self.arity_out, self._result_degree(other), acc)

    def __neg__(self) -> "MultiMap":
        return self.scale(-1)

    def __sub__(self, other: "MultiMap") -> "MultiMap":
        return self + (-other)

    def scale(self, factor) -> "MultiMap":
        f = as_rational(factor)
        return MultiMap._trusted(
            self.space, self.arity_in, self.arity_out, self.degree, {k: v * f for k, v in self.coeffs.items()}
        )

    def __rmul__(self, factor) -> "MultiMap":
        return self.scale(factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiMap):
            return NotImplemented
        if other.space != self.space or self.arity != other.arity:
            return False
        if self.coeffs != other.coeffs:
            return False
        return self.degree == other.degree or not self.coeffs

    __hash__ = None


# ---------------------------------------------------------------------------
# Symmetry projector


def _perm_table(k: int) -> list[tuple[tuple[int, ...], int, tuple[tuple[int, int], ...]]]:
    """For every permutation (pull convention): images, signature parity, inverted position pairs."""
    out = []
    for images in permutations(range(k)):
        inv = tuple((i, j) for i in range(k) for j in range(i + 1, k) if images[i] > images[j])
        out.append((images, len(inv) & 1, inv))
    return out


def _koszul_parity_of(odd: tuple[bool, ...], images, inv_pairs) -> int:
    p = 0
    for i, j in inv_pairs:
        if odd[images[i]] and odd[images[j]]:
            p ^= 1
    return p


def project_symmetries(L: MultiMap, n: int) -> MultiMap:
    """Project onto maps with graded-antisymmetric inputs and parity-of-n symmetric outputs.

    Inputs are antisymmetrized with Koszul signs; outputs are symmetrized for
    even ``n`` and antisymmetrized for odd ``n`` (again with Koszul signs).
    """
    l, m = L.arity_in, L.arity_out
    parity_odd = [d & 1 == 1 for d in L.space.degrees]
    in_perms = _perm_table(l)
    out_perms = _perm_table(m)
    norm = Fraction(1, factorial(l) * factorial(m))
    n_odd = n & 1
    acc: dict[Key, Fraction] = {}
    for (ins, outs), c in L.coeffs.items():
        odd_in = tuple(parity_odd[i] for i in ins)
        odd_out = tuple(parity_odd[o] for o in outs)
        new_ins = []
        for images, sgn, inv in in_perms:
            p = sgn ^ _koszul_parity_of(odd_in, images, inv)
            new_ins.append((tuple(ins[i] for i in images), p))
        new_outs = []
        for images, sgn, inv in out_perms:
            p = (sgn & n_odd) ^ _koszul_parity_of(odd_out, images, inv)
            new_outs.append((tuple(outs[i] for i in images), p))
        base = c * norm
        neg = -base
        for ni, pi in new_ins:
            for no, po in new_outs:
                key = (ni, no)
                acc[key] = acc.get(key, 0) + (neg if pi ^ po else base)
    return MultiMap._trusted(L.space, l, m, L.degree, acc)


def is_projected(L: MultiMap, n: int) -> bool:
    return project_symmetries(L, n) == L


# ---------------------------------------------------------------------------
# Internal-hom differential


def hom_differential(L: MultiMap) -> MultiMap:
    """``dL - (-1)^|L| L d`` with ``d`` acting on tensor powers as a graded derivation."""
    space = L.space
    degs = space.degrees
    d_out = space.d_out()
    d_in = space.d_in()
    acc: dict[Key, Fraction] = {}
    if d_out:
        sign_L = -1 if L.degree & 1 else 1
        for (ins, outs), c in L.coeffs.items():
            # d applied to the outputs
            before = 0
            for i, o in enumerate(outs):
                for t, dc in d_out.get(o, ()):
                    key = (ins, outs[:i] + (t,) + outs[i + 1:])
                    v = c * dc
                    acc[key] = acc.get(key, 0) + (-v if before & 1 else v)
                before += degs[o]
            # -(-1)^|L| L(d y): the entry at ins is hit by inputs whose i-th factor maps onto ins[i]
            before = 0
            for i, y in enumerate(ins):
                for s, dc in d_in.get(y, ()):
                    key = (ins[:i] + (s,) + ins[i + 1:], outs)
                    v = c * dc * (-sign_L)
                    acc[key] = acc.get(key, 0) + (-v if before & 1 else v)
                before += degs[y]
    return MultiMap._trusted(space, L.arity_in, L.arity_out, L.degree + 1, acc)


# ---------------------------------------------------------------------------
# Composition and Schouten bracket


def shifted_degree(L: MultiMap, n: int) -> int:
    """Degree of the polyvector represented by an ``(m,l)`` map: ``|L| + (m-1)n + l - 1``."""
    return L.degree + (L.arity_out - 1) * n + L.arity_in - 1


def compose_prefactor(L: MultiMap, Lp: MultiMap, n: int) -> int:
    m_p, l_p = Lp.arity_out, Lp.arity_in
    e = L.degree * ((m_p - 1) * n + l_p - 1) + n * (m_p - 1) * (L.arity_in - 1)
    return -1 if e & 1 else 1


def _plug_terms(L: MultiMap, Lp: MultiMap) -> dict[Key, Fraction]:
    """``(L (x) id) o (id (x) L')`` with the first output of ``L'`` fed into the last input of ``L``.

    Keys are ``(A + B, U + W)`` where ``A`` are the remaining inputs of L,
    ``B`` the inputs of L', ``U`` the outputs of L and ``W`` the outputs of
    L' after the first.
    """
    degs = L.space.degrees
    by_first_out: dict[int, list[tuple[tuple[int, ...], tuple[int, ...], Fraction]]] = {}
    for (ins, outs), c in Lp.coeffs.items():
        by_first_out.setdefault(outs[0], []).append((ins, outs[1:], c))
    odd_Lp = Lp.degree & 1
    acc: dict[Key, Fraction] = {}
    for (ins, outs), c in L.coeffs.items():
        partners = by_first_out.get(ins[-1])
        if not partners:
            continue
        A = ins[:-1]
        flip = odd_Lp and (sum(degs[a] for a in A) & 1)
        cc = -c if flip else c
        for B, W, cp in partners:
            key = (A + B, outs + W)
            acc[key] = acc.get(key, 0) + cc * cp
    return acc


def _expand_shuffles(chunk, k_a, k_b, m_u, m_w, odd, n_odd):
    ins_merges = interleavings(k_a, k_b)
    out_merges = interleavings(m_u, m_w)
    acc: dict[Key, Fraction] = {}
    len_in = k_a + k_b
    len_out = m_u + m_w
    for (ins, outs), c in chunk:
        A, B = ins[:k_a], ins[k_a:]
        U, W = outs[:m_u], outs[m_u:]
        in_variants = []
        for mg in ins_merges:
            slots = [0] * len_in
            for i, p in enumerate(mg.pos_a):
                slots[p] = A[i]
            for j, p in enumerate(mg.pos_b):
                slots[p] = B[j]
            par = mg.parity
            for i, j in mg.crossings:
                if odd[A[i]] and odd[B[j]]:
                    par ^= 1
            in_variants.append((tuple(slots), par))
        out_variants = []
        for mg in out_merges:
            slots = [0] * len_out
            for i, p in enumerate(mg.pos_a):
                slots[p] = U[i]
            for j, p in enumerate(mg.pos_b):
                slots[p] = W[j]
            par = mg.parity & n_odd
            for i, j in mg.crossings:
                if odd[U[i]] and odd[W[j]]:
                    par ^= 1
            out_variants.append((tuple(slots), par))
        neg = -c
        for ni, pi in in_variants:
            for no, po in out_variants:
                key = (ni, no)
                acc[key] = acc.get(key, 0) + (neg if pi ^ po else c)
    return acc


def compose_tilde(L: MultiMap, Lp: MultiMap, n: int) -> MultiMap:
    """The composition operation on map components.

    Plugs the first output of ``Lp`` into the last input of ``L``, sums over
    input unshuffles (signature sign) and output shuffles (signature sign to
    the power ``n``) with Koszul signs, and multiplies by the prefactor
    ``(-1)^{|L|((m'-1)n+l'-1)} (-1)^{n(m'-1)(l-1)}``.  The output shuffles
    place the outputs of ``L`` at every possible set of positions, so the
    result already lies in the image of :func:`project_symmetries` when both
    arguments do.
    """
    if L.space != Lp.space:
        raise ValueError("compose_tilde needs maps on the same graded space")
    l, m = L.arity_in, L.arity_out
    lp, mp = Lp.arity_in, Lp.arity_out
    degree = L.degree + Lp.degree
    if l == 0 or mp == 0:
        return MultiMap.zero(L.space, max(l + lp - 1, 0), max(m + mp - 1, 0), degree)
    res_in, res_out = l + lp - 1, m + mp - 1
    terms = _plug_terms(L, Lp)
    odd = tuple(bool(d & 1) for d in L.space.degrees)
    args = (l - 1, lp, m, mp - 1, odd, n & 1)
    items = sorted(terms.items())
    workers = thread_cap()
    n_expanded = len(items) * comb(res_in, l - 1) * comb(res_out, m)
    if workers > 1 and n_expanded >= _PARALLEL_MIN_TERMS and len(items) > 1:
        size = -(-len(items) // workers)
        chunks = [items[i:i + size] for i in range(0, len(items), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_expand_chunk, [(ch,) + args for ch in chunks]))
        acc: dict[Key, Fraction] = {}
        for part in parts:  # fixed chunk order; exact arithmetic makes the sum order-independent anyway
            for k, v in part.items():
                acc[k] = acc.get(k, 0) + v
    else:
        acc = _expand_shuffles(items, *args)
    if compose_prefactor(L, Lp, n) < 0:
        acc = {k: -v for k, v in acc.items()}
    return MultiMap._trusted(L.space, res_in, res_out, degree, acc)


def _expand_chunk(packed):
    return _expand_shuffles(*packed)


def schouten_bracket(P: MultiMap, Q: MultiMap, n: int) -> MultiMap:
    """Graded commutator ``P*Q - (-1)^{sd(P) sd(Q)} Q*P`` of :func:`compose_tilde`.

    ``sd`` is :func:`shifted_degree`.  Brackets of maps with different
    arities land in the same arity ``(m+m'-1, l+l'-1)``.
    """
    first = compose_tilde(P, Q, n)
    second = compose_tilde(Q, P, n)
    if (shifted_degree(P, n) * shifted_degree(Q, n)) & 1:
        return first + second
    return first - second


# ---------------------------------------------------------------------------
# Polyvector families and Maurer-Cartan residuals


def component_degree(m: int, l: int, n: int) -> int:
    return (1 - m) * n + 2 - l


@dataclass(frozen=True)
class PolyvectorFamily:
    """Shift ``n`` and components ``(m,l) -> MultiMap`` (weight-1 components allowed)."""

    n: int
    components: Mapping[tuple[int, int], MultiMap]

    def __post_init__(self):
        comps = {}
        spaces = set()
        for (m, l), M in sorted(self.components.items()):
            if M.arity != (m, l):
                raise ValueError(f"component ({m},{l}) has arity {M.arity}")
            if M.degree != component_degree(m, l, self.n) and not M.is_zero():
                raise ValueError(
                    f"component ({m},{l}) has degree {M.degree}, expected {component_degree(m, l, self.n)}"
                )
            spaces.add(M.space)
            comps[(m, l)] = M
        if len(spaces) > 1:
            raise ValueError("components live on different graded spaces")
        object.__setattr__(self, "components", comps)

    @property
    def space(self) -> GradedSpace | None:
        for M in self.components.values():
            return M.space
        return None

    @property
    def max_weight(self) -> int:
        return max((m for (m, _), M in self.components.items() if not M.is_zero()), default=0)

    def nonzero(self) -> dict[tuple[int, int], MultiMap]:
        return {k: M for k, M in self.components.items() if not M.is_zero()}

    def with_components(self, extra: Mapping[tuple[int, int], MultiMap]) -> "PolyvectorFamily":
        comps = dict(self.components)
        for k, M in extra.items():
            comps[k] = comps[k] + M if k in comps else M
        return PolyvectorFamily(self.n, comps)


@dataclass(frozen=True)
class ResidualReport:
    """Maurer-Cartan residual rows ``(m,l) -> MultiMap`` and the resulting verdict."""

    rows: Mapping[tuple[int, int], MultiMap]

    @property
    def is_zero(self) -> bool:
        return all(R.is_zero() for R in self.rows.values())

    @property
    def verdict(self) -> str:
        return "zero" if self.is_zero else "nonzero"

    def nonzero_rows(self) -> list[tuple[int, int]]:
        return [k for k in sorted(self.rows) if not self.rows[k].is_zero()]

    @property
    def worst_entry(self):
        """``(coeff, (m,l), inputs, outputs)`` of largest magnitude; earliest in row/index order on ties."""
        best = None
        for key in sorted(self.rows):
            for (ins, outs), c in self.rows[key].items():
                if best is None or abs(c) > abs(best[0]):
                    best = (c, key, ins, outs)
        return best


def mc_residual(pi: PolyvectorFamily, weight_cap: int, check_projected: bool = True) -> ResidualReport:
    """Rows ``(m,l)``, ``1 <= m <= weight_cap``, of the Maurer-Cartan identity tower.

    Row ``(m,l)`` is ``(-1)^{(m-1)n+l-1} d pi^(m,l)`` plus the sum of
    ``compose_tilde(pi^(m1,l1), pi^(m2,l2))`` over ``m1+m2-1 = m``,
    ``l1+l2-1 = l``.  Every row that receives a contribution is reported.
    """
    n = pi.n
    comps = pi.nonzero()
    for (m, l), M in comps.items():
        if m > weight_cap:
            raise ValueError(f"component ({m},{l}) exceeds the weight cap {weight_cap}")
        if m < 1:
            raise ValueError(f"component ({m},{l}) has weight below 1")
        if check_projected and not is_projected(M, n):
            raise ValueError(f"component ({m},{l}) is not in the image of the symmetry projector")
    rows: dict[tuple[int, int], MultiMap] = {}

    def add(key, M):
        rows[key] = rows[key] + M if key in rows else M

    for (m, l), M in sorted(comps.items()):
        if M.space.has_differential:
            dM = hom_differential(M)
            add((m, l), dM if ((m - 1) * n + l - 1) % 2 == 0 else -dM)
    for (m1, l1), L in sorted(comps.items()):
        if l1 < 1:
            continue
        for (m2, l2), Lp in sorted(comps.items()):
            m = m1 + m2 - 1
            if m > weight_cap:
                continue
            add((m, l1 + l2 - 1), compose_tilde(L, Lp, n))
    return ResidualReport({k: rows[k] for k in sorted(rows)})


def enumerate_components(N: int, n: int, m_max: int, l_max: int) -> list[tuple[int, int, int]]:
    """Component labels ``(m, l, degree)`` allowed by the degree bound for an N-term complex."""
    if N < 1:
        raise ValueError("N must be at least 1")
    out = []
    for m in range(2, m_max + 1):
        for l in range(0, l_max + 1):
            deg = component_degree(m, l, n)
            if m * (1 - N) <= deg <= l * (N - 1):
                out.append((m, l, deg))
    return out


def default_caps(N: int, n: int) -> tuple[int, int]:
    """Safety caps for :func:`enumerate_components`; generous enough to be inert for n >= N."""
    return 2 * N + 2, 2 * N + 2
