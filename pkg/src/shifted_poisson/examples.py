"""Built-in Lie algebras, Lie 2-algebras and shifted Poisson candidates.

Lie algebra brackets ``l_2`` are the usual commutator-type brackets in the
documented bases (``[h,e] = 2e``, ``[h,f] = -2f``, ``[e,f] = h`` for sl2).

The string and cotangent Lie 2-algebras are defined through their weight-one
components: ``pi^(1,2)`` restricts to the Lie bracket ``[x,y]`` of ``h``
(and to the coadjoint action on ``h*[1]``), and for string algebras
``pi^(1,3)(x,y,z) = kappa(x,y,z) a``.  Since ``l_l = (-1)^(l-1) pi^(1,l)``,
their stored ``l_2`` is minus that bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

from .graded_core import GradedSpace, as_rational
from .linfty import LieNAlgebra, check_linfty, extend_by_symmetry
from .polyvector import MultiMap, PolyvectorFamily, project_symmetries

# ---------------------------------------------------------------------------
# Lie algebras (N = 1)


def _lie_algebra(names: Sequence[str], table: Mapping[tuple[str, str], Mapping[str, int]], name: str) -> LieNAlgebra:
    space = GradedSpace.from_degrees({0: list(names)})
    entries = []
    for (x, y), value in table.items():
        for z, c in value.items():
            entries.append(((x, y), (z,), c))
    return LieNAlgebra.from_representatives(space, {2: entries}, name)


def make_sl2() -> LieNAlgebra:
    """sl2 with basis e, h, f."""
    return _lie_algebra(
        ["e", "h", "f"],
        {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}},
        "sl2",
    )


def make_gl(k: int) -> LieNAlgebra:
    """gl_k with matrix units ``Eij``: ``[Eij, Ekl] = d_jk Eil - d_li Ekj``."""
    if k < 1:
        raise ValueError("k must be positive")
    units = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1)]
    nm = {u: f"E{u[0]}{u[1]}" for u in units}
    table: dict[tuple[str, str], dict[str, int]] = {}
    for a, b in product(range(len(units)), repeat=2):
        if a >= b:
            continue
        (i, j), (kk, l) = units[a], units[b]
        value: dict[str, int] = {}
        if j == kk:
            value[nm[(i, l)]] = value.get(nm[(i, l)], 0) + 1
        if l == i:
            value[nm[(kk, j)]] = value.get(nm[(kk, j)], 0) - 1
        value = {z: c for z, c in value.items() if c}
        if value:
            table[(nm[units[a]], nm[units[b]])] = value
    return _lie_algebra([nm[u] for u in units], table, f"gl{k}")


def make_heisenberg() -> LieNAlgebra:
    """Heisenberg algebra: ``[x,y] = z`` with ``z`` central."""
    return _lie_algebra(["x", "y", "z"], {("x", "y"): {"z": 1}}, "heisenberg")


def make_2dim_nonabelian() -> LieNAlgebra:
    """The affine algebra aff(1): ``[x,y] = y``."""
    return _lie_algebra(["x", "y"], {("x", "y"): {"y": 1}}, "aff1")


def make_abelian_lie(dim: int) -> LieNAlgebra:
    return LieNAlgebra(GradedSpace.from_degrees({0: [f"x{i}" for i in range(1, dim + 1)]}), {}, f"abelian-lie{dim}")


# ---------------------------------------------------------------------------
# Lie 2-algebras


def make_abelian_shifted(dim: int) -> LieNAlgebra:
    """``K^dim[1]``: dim copies of K in degree -1, zero brackets and differential."""
    if dim < 1:
        raise ValueError("dim must be positive")
    names = ["a"] if dim == 1 else [f"a{i}" for i in range(1, dim + 1)]
    space = GradedSpace.from_degrees({-1: names, 0: []})
    return LieNAlgebra(space, {}, f"abelian{dim}")


def _structure(h: LieNAlgebra) -> dict[tuple[str, str], dict[str, Fraction]]:
    """``[x,y] = sum c z`` as a name table over all ordered pairs."""
    names = h.space.names
    out: dict[tuple[str, str], dict[str, Fraction]] = {}
    for ((x, y), (z,)), c in h.bracket(2).coeffs.items():
        out.setdefault((names[x], names[y]), {})[names[z]] = c
    return out


def _require_lie_algebra(h: LieNAlgebra):
    if h.N != 1 or any(d != 0 for d in h.space.degrees):
        raise ValueError("expected an ordinary Lie algebra (all basis vectors in degree 0)")


def cocycle_residual(h: LieNAlgebra, kappa: MultiMap) -> dict[tuple[int, ...], Fraction]:
    """Chevalley-Eilenberg coboundary of a trilinear form, on all basis quadruples."""
    _require_lie_algebra(h)
    dim = h.space.dim
    br: dict[tuple[int, int], dict[int, Fraction]] = {}
    for ((x, y), (z,)), c in h.bracket(2).coeffs.items():
        br.setdefault((x, y), {})[z] = c
    k = {ins: c for (ins, _), c in kappa.coeffs.items()}
    out = {}
    for w in product(range(dim), repeat=4):
        total = Fraction(0)
        for i in range(4):
            for j in range(i + 1, 4):
                rest = [w[t] for t in range(4) if t not in (i, j)]
                sign = -1 if (i + j) % 2 else 1
                for z, c in br.get((w[i], w[j]), {}).items():
                    total += sign * c * k.get((z, rest[0], rest[1]), 0)
        if total:
            out[w] = total
    return out


def make_string(h: LieNAlgebra, kappa: MultiMap, name: str = "") -> LieNAlgebra:
    """String Lie 2-algebra ``K[1] + h`` built from a 3-cocycle ``kappa`` (a (0,3) map)."""
    _require_lie_algebra(h)
    if kappa.space != h.space or kappa.arity != (0, 3):
        raise ValueError("kappa must be a trilinear form on h")
    if "a" in h.space.names:
        raise ValueError("the basis name 'a' is reserved for the K[1] generator")
    space = GradedSpace.from_degrees({-1: ["a"], 0: list(h.space.names)})
    names = h.space.names
    l2 = []
    for (x, y), value in _structure(h).items():
        for z, c in value.items():
            l2.append(((x, y), (z,), -c))
    l3 = [
        (tuple(names[i] for i in ins), ("a",), c)
        for (ins, _), c in kappa.coeffs.items()
    ]
    brackets = {2: MultiMap.from_names(space, 2, 1, 0, l2), 3: MultiMap.from_names(space, 3, 1, -1, l3)}
    alg = LieNAlgebra(space, brackets, name or f"string-{h.name}")
    report = check_linfty(alg)
    if not report.is_zero:
        raise ValueError(f"kappa is not a 3-cocycle; residual rows {report.nonzero_rows()}")
    return alg


def killing_form(h: LieNAlgebra) -> dict[tuple[int, int], Fraction]:
    """``Tr(ad_x ad_y)`` on basis pairs."""
    _require_lie_algebra(h)
    dim = h.space.dim
    ad = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]  # ad[x][z][y]: coefficient of z in [x,y]
    for ((x, y), (z,)), c in h.bracket(2).coeffs.items():
        ad[x][z][y] += c
    out = {}
    for x in range(dim):
        for y in range(dim):
            t = sum(ad[x][i][k] * ad[y][k][i] for i in range(dim) for k in range(dim))
            if t:
                out[(x, y)] = t
    return out


def killing_cocycle(h: LieNAlgebra) -> MultiMap:
    """``kappa(x,y,z) = <[x,y], z>`` with the trace form ``<u,v> = Tr(ad_u ad_v)``."""
    K = killing_form(h)
    acc: dict = {}
    for ((x, y), (w,)), c in h.bracket(2).coeffs.items():
        for z in range(h.space.dim):
            v = c * K.get((w, z), 0)
            if v:
                acc[((x, y, z), ())] = acc.get(((x, y, z), ()), 0) + v
    return MultiMap(h.space, 3, 0, 0, acc)


def gl_trace_cocycle(h: LieNAlgebra) -> MultiMap:
    """``kappa(x,y,z) = Tr([x,y] z)`` on gl_k in the matrix-unit basis."""
    names = h.space.names
    k = int(round(len(names) ** 0.5))

    def unit(i):
        return int(names[i][1]), int(names[i][2])

    acc: dict = {}
    for ((x, y), (w,)), c in h.bracket(2).coeffs.items():
        i, j = unit(w)
        for z in range(len(names)):
            p, q = unit(z)
            # Tr(E_ij E_pq) = d_jp d_qi
            if j == p and q == i:
                acc[((x, y, z), ())] = acc.get(((x, y, z), ()), 0) + c
    if k * k != len(names):
        raise ValueError("expected gl_k in the matrix-unit basis")
    return MultiMap(h.space, 3, 0, 0, acc)


def make_cotangent(h: LieNAlgebra, name: str = "") -> LieNAlgebra:
    """Shifted cotangent Lie 2-algebra ``h*[1] + h`` with ``pi^(1,3) = 0``."""
    _require_lie_algebra(h)
    names = h.space.names
    duals = [x + "*" for x in names]
    space = GradedSpace.from_degrees({-1: duals, 0: list(names)})
    entries = []
    for (x, y), value in _structure(h).items():
        for z, c in value.items():
            # pi(x,y) = [x,y]
            entries.append(((x, y), (z,), -c))
            # pi(x, z*) = ad*_x z*, and <ad*_x z*, y> = -<z*, [x,y]> = -c
            entries.append(((x, z + "*"), (y + "*",), c))
    alg = LieNAlgebra(space, {2: extend_by_symmetry(space, 2, 1, 0, 0, _merge(entries))}, name or f"cotangent-{h.name}")
    return alg


def make_inner_derivations(h: LieNAlgebra, name: str = "") -> LieNAlgebra:
    """Strict Lie 2-algebra ``h[1] --id--> h`` (a test substrate with nonzero differential)."""
    _require_lie_algebra(h)
    names = h.space.names
    shifted = [x + "'" for x in names]
    space = GradedSpace.from_degrees({-1: shifted, 0: list(names)}, [(x + "'", x, 1) for x in names])
    entries = []
    for (x, y), value in _structure(h).items():
        for z, c in value.items():
            entries.append(((x, y), (z,), c))
            entries.append(((x, y + "'"), (z + "'",), c))
    return LieNAlgebra(space, {2: extend_by_symmetry(space, 2, 1, 0, 0, _merge(entries))}, name or f"inner-{h.name}")


def _merge(entries):
    acc: dict = {}
    for ins, outs, c in entries:
        acc[(tuple(ins), tuple(outs))] = acc.get((tuple(ins), tuple(outs)), 0) + as_rational(c)
    return [(i, o, c) for (i, o), c in acc.items()]


# ---------------------------------------------------------------------------
# Candidate components


def killing_tensor(h: LieNAlgebra) -> MultiMap:
    """Symmetric (2,0) tensor dual to the trace form, scaled to integer coefficients."""
    K = killing_form(h)
    dim = h.space.dim
    import sympy

    mat = sympy.Matrix(dim, dim, lambda i, j: sympy.Rational(K.get((i, j), 0)))
    if mat.det() == 0:
        raise ValueError("the trace form is degenerate")
    inv = mat.inv()
    acc = {}
    for i in range(dim):
        for j in range(dim):
            v = Fraction(int(inv[i, j].p), int(inv[i, j].q))
            if v:
                acc[((), (i, j))] = v
    from math import lcm

    scale = lcm(*(v.denominator for v in acc.values()))
    return MultiMap(h.space, 0, 2, 0, {k: v * scale for k, v in acc.items()})


def antisymmetric_pairing(alg: LieNAlgebra, first: str, second: str, n: int = 4) -> MultiMap:
    """``first (x) second -/+ second (x) first`` as a (2,0) component for shift ``n``."""
    space = alg.space
    degree = space.degrees[space.index(first)] + space.degrees[space.index(second)]
    return extend_by_symmetry(space, 0, 2, degree, n, [((), (first, second), 1)])


def coev_component(cot: LieNAlgebra, r: Mapping[tuple[str, str], object] | None = None, n: int = 3) -> MultiMap:
    """``pi^(2,0)`` on a cotangent Lie 2-algebra from ``r = sum r[(i, j)] theta^i (x) x_j``.

    With ``r = None`` this is the coevaluation ``sum_i theta^i (x) x_i``.
    """
    space = cot.space
    if r is None:
        r = {(x, x): 1 for x in space.basis_names(0)}
    entries = [((), (i + "*", j), c) for (i, j), c in r.items() if as_rational(c)]
    return extend_by_symmetry(space, 0, 2, -1, n, entries)


def cotangent_q_component(cot: LieNAlgebra, q: Mapping[str, Mapping[tuple[str, str], object]], n: int = 3) -> MultiMap:
    """``pi^(2,1)(x_j) = sum q[j][(a, b)] theta^a (x) theta^b`` (q symmetric in a, b)."""
    space = cot.space
    entries = []
    for j, table in q.items():
        for (a, b), c in table.items():
            c = as_rational(c)
            if as_rational(table.get((b, a), 0)) != c:
                raise ValueError(f"q({j}) must be symmetric")
            if c:
                entries.append(((j,), (a + "*", b + "*"), c))
    return extend_by_symmetry(space, 1, 2, -2, n, entries)


def string_components(hk: LieNAlgebra, one: Mapping[str, object], form: Mapping[str, object], n: int = 3) -> dict:
    """The components encoding a central element ``1`` and a linear form ``<.>``.

    Both are the symmetry projections of the evident tensors:
    ``pi^(2,0) = P(1 (x) a) = (1 (x) a - a (x) 1)/2`` and
    ``pi^(2,1)(x) = <x> a (x) a``.  With this normalisation the Maurer-Cartan
    rows reduce to ``[x,1] = 0``, ``<1> = 0`` and ``<[x,y]> = -kappa(x,y,1)``.
    """
    space = hk.space
    e20 = {((), (space.index(x), space.index("a"))): as_rational(c) for x, c in one.items()}
    a = space.index("a")
    e21 = {((space.index(x),), (a, a)): as_rational(c) for x, c in form.items()}
    return {
        (2, 0): project_symmetries(MultiMap(space, 0, 2, -1, e20), n),
        (2, 1): project_symmetries(MultiMap(space, 1, 2, -2, e21), n),
    }


# ---------------------------------------------------------------------------
# Catalog


@dataclass(frozen=True)
class ExampleDescriptor:
    name: str
    description: str
    build: Callable[[], LieNAlgebra] = field(repr=False)
    parameters: Mapping[str, object] = field(default_factory=dict)


def _named(alg: LieNAlgebra, name: str) -> LieNAlgebra:
    return LieNAlgebra(alg.space, alg.brackets, name)


def _string_sl2():
    h = make_sl2()
    return make_string(h, killing_cocycle(h), "string-sl2")


def _string_gl2():
    h = make_gl(2)
    return make_string(h, gl_trace_cocycle(h), "string-gl2-trace")


CATALOG: dict[str, ExampleDescriptor] = {
    d.name: d
    for d in [
        ExampleDescriptor("abelian1", "K[1]: one generator in degree -1, zero brackets", lambda: make_abelian_shifted(1), {"dim": 1}),
        ExampleDescriptor("abelian2", "K^2[1]: two generators in degree -1, zero brackets", lambda: make_abelian_shifted(2), {"dim": 2}),
        ExampleDescriptor("sl2", "sl2 with [h,e]=2e, [h,f]=-2f, [e,f]=h", make_sl2),
        ExampleDescriptor("gl2", "gl2 in the matrix-unit basis E11,E12,E21,E22", lambda: make_gl(2), {"k": 2}),
        ExampleDescriptor("heisenberg", "Heisenberg algebra [x,y]=z", make_heisenberg),
        ExampleDescriptor("aff1", "2-dim nonabelian algebra [x,y]=y", make_2dim_nonabelian),
        ExampleDescriptor("string-sl2", "string Lie 2-algebra of sl2, kappa(x,y,z)=<[x,y],z> (trace form)", _string_sl2),
        ExampleDescriptor("string-gl2-trace", "string Lie 2-algebra of gl2, kappa(x,y,z)=Tr([x,y]z)", _string_gl2),
        ExampleDescriptor("cotangent-sl2", "shifted cotangent Lie 2-algebra of sl2", lambda: make_cotangent(make_sl2(), "cotangent-sl2")),
        ExampleDescriptor(
            "cotangent-heisenberg",
            "shifted cotangent Lie 2-algebra of the Heisenberg algebra",
            lambda: make_cotangent(make_heisenberg(), "cotangent-heisenberg"),
        ),
    ]
}


def builtin(name: str) -> LieNAlgebra:
    try:
        desc = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown built-in example {name!r}; known: {', '.join(CATALOG)}") from None
    return _named(desc.build(), name)


def empty_family(alg: LieNAlgebra, n: int) -> PolyvectorFamily:
    return PolyvectorFamily(n, {})
