from __future__ import annotations

from itertools import product

import pytest

from shifted_poisson.examples import (
    CATALOG,
    antisymmetric_pairing,
    builtin,
    coev_component,
    cocycle_residual,
    cotangent_q_component,
    empty_family,
    gl_trace_cocycle,
    killing_cocycle,
    killing_form,
    killing_tensor,
    make_2dim_nonabelian,
    make_abelian_lie,
    make_abelian_shifted,
    make_cotangent,
    make_gl,
    make_heisenberg,
    make_sl2,
    make_string,
    string_components,
)
from shifted_poisson.graded_core import GradedSpace
from shifted_poisson.linfty import LieNAlgebra, check_linfty, extend_by_symmetry
from shifted_poisson.polyvector import MultiMap, is_projected

EXPECTED_NAMES = [
    "abelian1",
    "abelian2",
    "sl2",
    "gl2",
    "heisenberg",
    "aff1",
    "string-sl2",
    "string-gl2-trace",
    "cotangent-sl2",
    "cotangent-heisenberg",
]


# --- 2x2 matrix oracle ------------------------------------------------------


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def commutator(a, b):
    ab, ba = mat_mul(a, b), mat_mul(b, a)
    return [[ab[i][j] - ba[i][j] for j in range(2)] for i in range(2)]


def unit(i, j):
    m = [[0, 0], [0, 0]]
    m[i][j] = 1
    return m


SL2_MATRICES = {"e": unit(0, 1), "h": [[1, 0], [0, -1]], "f": unit(1, 0)}
GL2_MATRICES = {f"E{i + 1}{j + 1}": unit(i, j) for i in range(2) for j in range(2)}


def decompose(m, basis):
    """Coordinates of a matrix in a basis of matrix units / sl2 basis (small, direct solve)."""
    if set(basis) == set(GL2_MATRICES):
        return {f"E{i + 1}{j + 1}": m[i][j] for i in range(2) for j in range(2) if m[i][j]}
    out = {"e": m[0][1], "f": m[1][0], "h": m[0][0]}
    assert m[0][0] == -m[1][1]
    return {k: v for k, v in out.items() if v}


def bracket_table(alg):
    names = alg.space.names
    out = {}
    for ((x, y), (z,)), c in alg.bracket(2).coeffs.items():
        out.setdefault((names[x], names[y]), {})[names[z]] = c
    return out


@pytest.mark.parametrize("maker,mats", [(make_sl2, SL2_MATRICES), (lambda: make_gl(2), GL2_MATRICES)])
def test_matrix_algebras_match_commutators(maker, mats):
    alg = maker()
    table = bracket_table(alg)
    for x, y in product(mats, repeat=2):
        expect = decompose(commutator(mats[x], mats[y]), mats)  # [DERIVED]
        assert table.get((x, y), {}) == expect


def test_catalog_names_and_lookup():
    assert list(CATALOG) == EXPECTED_NAMES
    for name in EXPECTED_NAMES:
        assert builtin(name).name == name
    with pytest.raises(ValueError):
        builtin("so3")


@pytest.mark.parametrize(
    "name,N,dims",
    [
        ("abelian1", 2, {-1: 1, 0: 0}),
        ("abelian2", 2, {-1: 2, 0: 0}),
        ("sl2", 1, {0: 3}),
        ("gl2", 1, {0: 4}),
        ("heisenberg", 1, {0: 3}),
        ("aff1", 1, {0: 2}),
        ("string-sl2", 2, {-1: 1, 0: 3}),
        ("string-gl2-trace", 2, {-1: 1, 0: 4}),
        ("cotangent-sl2", 2, {-1: 3, 0: 3}),
        ("cotangent-heisenberg", 2, {-1: 3, 0: 3}),
    ],
)
def test_catalog_shapes(name, N, dims):
    alg = builtin(name)
    assert alg.N == N
    assert {d: k for d, k in alg.space.dims.items() if k} == {d: k for d, k in dims.items() if k}
    assert check_linfty(alg).is_zero


def test_small_algebras():
    assert bracket_table(make_heisenberg()) == {("x", "y"): {"z": 1}, ("y", "x"): {"z": -1}}
    assert bracket_table(make_2dim_nonabelian()) == {("x", "y"): {"y": 1}, ("y", "x"): {"y": -1}}
    assert make_abelian_lie(2).brackets == {}
    assert make_abelian_shifted(1).space.names == ("a",)
    with pytest.raises(ValueError):
        make_abelian_shifted(0)
    with pytest.raises(ValueError):
        make_gl(0)


def test_killing_form_of_sl2():
    K = killing_form(make_sl2())
    names = ("e", "h", "f")
    named = {(names[a], names[b]): v for (a, b), v in K.items()}
    assert named == {("e", "f"): 4, ("f", "e"): 4, ("h", "h"): 8}  # [DERIVED] Tr(ad ad)


def test_killing_tensor_is_inverse_form_scaled():
    T = killing_tensor(make_sl2())
    assert T.named_entries() == [((), ("e", "f"), 2), ((), ("h", "h"), 1), ((), ("f", "e"), 2)]
    with pytest.raises(ValueError):
        killing_tensor(make_heisenberg())


@pytest.mark.parametrize("h,kappa", [(make_sl2, killing_cocycle), (lambda: make_gl(2), gl_trace_cocycle)])
def test_cocycles_close(h, kappa):
    alg = h()
    k = kappa(alg)
    assert not k.is_zero()
    assert cocycle_residual(alg, k) == {}
    # total antisymmetry
    for (ins, _), c in k.coeffs.items():
        a, b, cc = ins
        assert k[((b, a, cc), ())] == -c and k[((a, cc, b), ())] == -c


def test_gl_trace_cocycle_matches_matrix_trace():
    h = make_gl(2)
    k = gl_trace_cocycle(h)
    names = h.space.names
    for x, y, z in product(range(4), repeat=3):
        comm = commutator(GL2_MATRICES[names[x]], GL2_MATRICES[names[y]])
        prod_ = mat_mul(comm, GL2_MATRICES[names[z]])
        assert k[((x, y, z), ())] == prod_[0][0] + prod_[1][1]  # [DERIVED]


def test_make_string_rejects_non_cocycles():
    h = make_heisenberg()
    bad = MultiMap.from_names(h.space, 3, 0, 0, [])
    assert make_string(h, bad).N == 2
    sl2 = make_sl2()
    # aff1 + K^2 is not unimodular, so y^u^v is not closed: d(y^u^v)(x,y,u,v) = -1
    h4 = LieNAlgebra.from_representatives(GradedSpace.from_degrees({0: ["x", "y", "u", "v"]}), {2: [(("x", "y"), ("y",), 1)]})
    k = extend_by_symmetry(h4.space, 3, 0, 0, 0, [(("y", "u", "v"), (), 1)])
    assert cocycle_residual(h4, k)
    with pytest.raises(ValueError):
        make_string(h4, k)
    assert make_string(sl2, killing_cocycle(sl2)).bracket(3).arity == (1, 3)


def test_cotangent_brackets():
    cot = make_cotangent(make_2dim_nonabelian())
    table = bracket_table(cot)
    # l_2 = -pi with pi(x,y) = [x,y] = y and pi(u, t) = ad*_u t;
    # <ad*_y y*, x> = -y*([y,x]) = 1 gives ad*_y y* = x*, and ad*_x y* = -y*
    assert table[("x", "y")] == {"y": -1}
    assert table[("y", "y*")] == {"x*": -1}
    assert table[("x", "y*")] == {"y*": 1}


def test_candidate_components_are_projected():
    cot = builtin("cotangent-sl2")
    assert is_projected(coev_component(cot), 3)
    q = cotangent_q_component(cot, {"e": {("e", "f"): 1, ("f", "e"): 1}})
    assert is_projected(q, 3)
    with pytest.raises(ValueError):
        cotangent_q_component(cot, {"e": {("e", "f"): 1}})
    ab2 = builtin("abelian2")
    P = antisymmetric_pairing(ab2, "a1", "a2", 4)
    assert P.named_entries() == [((), ("a1", "a2"), 1), ((), ("a2", "a1"), -1)]
    s = string_components(builtin("string-sl2"), {"h": 1}, {"e": 2}, 3)
    assert all(is_projected(M, 3) for M in s.values())
    assert s[(2, 1)].named_entries() == [(("e",), ("a", "a"), 2)]
    assert empty_family(ab2, 4).components == {}
