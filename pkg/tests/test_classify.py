from __future__ import annotations

import random
from fractions import Fraction

import pytest

from helpers import invariant_symmetric_tensors, random_map
from shifted_poisson.classify import (
    ALLOWED_COMPONENTS,
    IDENTITY_TABLES,
    ConsistencyError,
    NonlinearSystemError,
    admissible_basis,
    cotangent_conditions,
    evaluate_identity,
    solve_linear_stratum,
    string_conditions,
    verify_1shifted_lie,
    verify_2shifted_lie,
    verify_cotangent_3shifted,
    verify_lie2_shifted,
    verify_specialized,
    verify_string_3shifted,
)
from shifted_poisson.examples import (
    antisymmetric_pairing,
    builtin,
    coev_component,
    gl_trace_cocycle,
    killing_cocycle,
    killing_tensor,
    make_2dim_nonabelian,
    make_abelian_lie,
    make_gl,
    make_heisenberg,
    make_sl2,
    string_components,
)
from shifted_poisson.graded_core import GradedSpace
from shifted_poisson.linfty import LieNAlgebra, extend_by_symmetry, weight_one_components
from shifted_poisson.polyvector import (
    MultiMap,
    PolyvectorFamily,
    component_degree,
    default_caps,
    enumerate_components,
    mc_residual,
)

ALGEBRAS = {1: ["sl2", "gl2", "heisenberg", "aff1"], 2: [
    "abelian1", "abelian2", "string-sl2", "string-gl2-trace", "cotangent-sl2", "cotangent-heisenberg"]}


# --- identity tables --------------------------------------------------------


def test_tables_cover_exactly_the_admissible_rows():
    for (N, n), table in IDENTITY_TABLES.items():
        allowed = {(m, l) for m, l, _ in enumerate_components(N, n, *default_caps(N, n))}
        assert ALLOWED_COMPONENTS[(N, n)] == allowed
        for ident in table:
            for _, lower, upper in ident.terms:
                for key in (lower, upper):
                    assert key[0] == 1 or key in allowed


@pytest.mark.parametrize("case", sorted(IDENTITY_TABLES))
def test_failed_identities_are_exactly_the_nonzero_rows(case):
    # stronger than verdict agreement: each hand-listed identity is its residual row
    N, n = case
    rng = random.Random(hash(case) % 1000)
    for _ in range(25):
        alg = builtin(rng.choice(ALGEBRAS[N]))
        comps = {
            (m, l): random_map(rng, alg.space, m, l, n, component_degree(m, l, n), terms=rng.randint(1, 3))
            for m, l in sorted(ALLOWED_COMPONENTS[case])
            if rng.random() < 0.6
        }
        v = verify_specialized(alg, PolyvectorFamily(n, comps))
        rows = sorted(f"({m},{l})" for m, l in v.report.nonzero_rows())
        assert rows == sorted(v.failed)


def test_evaluate_identity_on_zero_family_is_zero():
    alg = builtin("string-sl2")
    comps = weight_one_components(alg)
    for ident in IDENTITY_TABLES[(2, 2)]:
        assert evaluate_identity(ident, comps, 2) == {}


def test_verify_specialized_rejects_unknown_cases():
    with pytest.raises(ValueError):
        verify_specialized(builtin("sl2"), PolyvectorFamily(5, {}))


# --- Lie algebras -----------------------------------------------------------


def test_2shifted_sl2():
    sl2 = make_sl2()
    assert verify_2shifted_lie(sl2, killing_tensor(sl2)).valid
    ee = extend_by_symmetry(sl2.space, 0, 2, 0, 2, [((), ("e", "e"), 1)])
    v = verify_2shifted_lie(sl2, ee)
    assert not v.valid and v.failed == ("(2,1)",)


def test_2shifted_flags_asymmetric_tensor():
    sl2 = make_sl2()
    T = MultiMap.from_names(sl2.space, 0, 2, 0, [((), ("e", "f"), 1)])
    v = verify_2shifted_lie(sl2, T)
    assert not v.valid and "symmetry" in v.failed


@pytest.mark.parametrize("maker", [make_sl2, make_heisenberg, make_2dim_nonabelian, lambda: make_gl(2), lambda: make_abelian_lie(2)])
def test_2shifted_solution_dimension_matches_invariant_tensors(maker):
    h = maker()
    sol = solve_linear_stratum(h, 2, None, [(2, 0)])
    assert sol.dimension == invariant_symmetric_tensors(h)  # [DERIVED]


def test_1shifted_sl2():
    sl2 = make_sl2()
    sp = sl2.space
    cob = extend_by_symmetry(sp, 1, 2, 0, 1, [(("e",), ("e", "h"), 1), (("f",), ("f", "h"), 1)])
    zero3 = MultiMap.zero(sp, 0, 3, 0)
    assert verify_1shifted_lie(sl2, cob, zero3).valid
    tri = extend_by_symmetry(sp, 0, 3, 0, 1, [((), ("e", "h", "f"), 1)])
    assert verify_1shifted_lie(sl2, MultiMap.zero(sp, 1, 2, 0), tri).valid
    gl2 = make_gl(2)
    tri = extend_by_symmetry(gl2.space, 0, 3, 0, 1, [((), ("E12", "E21", "E22"), 1)])
    v = verify_1shifted_lie(gl2, MultiMap.zero(gl2.space, 1, 2, 0), tri)
    assert not v.valid and v.failed == ("(3,1)",)


def test_lie_verifiers_need_lie_algebras():
    ab = builtin("abelian2")
    with pytest.raises(ValueError):
        verify_2shifted_lie(ab, MultiMap.zero(ab.space, 0, 2, 0))
    sl2 = make_sl2()
    with pytest.raises(ValueError):
        verify_2shifted_lie(sl2, MultiMap.zero(sl2.space, 1, 2, 0))


# --- Lie 2-algebras ---------------------------------------------------------


def test_lie2_examples():
    cot = builtin("cotangent-sl2")
    assert verify_lie2_shifted(cot, {(2, 0): coev_component(cot)}, 3).valid
    ab2 = builtin("abelian2")
    assert verify_lie2_shifted(ab2, {(2, 0): antisymmetric_pairing(ab2, "a1", "a2")}, 4).valid
    with pytest.raises(ValueError):
        verify_lie2_shifted(ab2, {(2, 1): MultiMap.zero(ab2.space, 1, 2, -2)}, 4)
    with pytest.raises(ValueError):
        verify_lie2_shifted(ab2, {}, 5)
    with pytest.raises(ValueError):
        verify_lie2_shifted(make_sl2(), {}, 3)


def test_lie2_requires_valid_structure():
    # trivial-coefficient l_3 = y^u^v on the non-unimodular aff1 + K^2 is not a cocycle
    sp = GradedSpace.from_degrees({-1: ["a"], 0: ["x", "y", "u", "v"]})
    b2 = extend_by_symmetry(sp, 2, 1, 0, 0, [(("x", "y"), ("y",), 1)])
    b3 = extend_by_symmetry(sp, 3, 1, -1, 0, [(("y", "u", "v"), ("a",), 1)])
    broken = LieNAlgebra(sp, {2: b2, 3: b3})
    with pytest.raises(ValueError, match="homotopy Jacobi"):
        verify_lie2_shifted(broken, {}, 3)


# --- string Lie 2-algebras --------------------------------------------------


def test_string_gl2_trace_form():
    h = make_gl(2)
    kappa = gl_trace_cocycle(h)
    v = verify_string_3shifted(h, kappa, {}, {"E11": 1, "E22": 1})
    assert v.valid and v.generic


@pytest.mark.parametrize("one,form", [({"h": 1}, {}), ({}, {"e": 1}), ({"h": 1}, {"h": 1}), ({"e": 2}, {"f": 1})])
def test_string_sl2_nonzero_data_is_invalid(one, form):
    h = make_sl2()
    v = verify_string_3shifted(h, killing_cocycle(h), one, form)
    assert not v.valid and not v.generic


def test_string_twisted_example_with_central_unit():
    # heisenberg + central w, kappa = x^y^w: <[x,y]> = -kappa(x,y,1) forces t = -1
    sp_h = LieNAlgebra.from_representatives(
        GradedSpace.from_degrees({0: ["x", "y", "z", "w"]}),
        {2: [(("x", "y"), ("z",), 1)]},
    )
    kappa = extend_by_symmetry(sp_h.space, 3, 0, 0, 0, [(("x", "y", "w"), (), 1)])
    assert verify_string_3shifted(sp_h, kappa, {"w": 1}, {"z": -1}).valid
    v = verify_string_3shifted(sp_h, kappa, {"w": 1}, {"z": 1})
    assert not v.valid and v.failed == ("form on brackets",)


def test_string_conditions_labels():
    h = make_sl2()
    assert string_conditions(h, killing_cocycle(h), {}, {}) == []
    assert "central" in string_conditions(h, killing_cocycle(h), {"h": 1}, {})


@pytest.mark.parametrize("seed", range(10))
def test_string_random_data_agrees(seed):
    rng = random.Random(seed)
    for make, cocycle, names in ((make_sl2, killing_cocycle, "ehf"), (lambda: make_gl(2), gl_trace_cocycle, None)):
        h = make()
        basis = list(names) if names else list(h.space.names)
        one = {x: rng.choice([-1, 0, 0, 1]) for x in basis}
        form = {x: rng.choice([-1, 0, 0, 1]) for x in basis}
        verify_string_3shifted(h, cocycle(h), one, form)  # raises on disagreement


def test_string_components_map_to_generic_rows():
    hk = builtin("string-gl2-trace")
    comps = string_components(hk, {}, {"E11": 1, "E22": 1})
    fam = PolyvectorFamily(3, {**weight_one_components(hk), **comps})
    assert mc_residual(fam, 6).is_zero


# --- cotangent Lie 2-algebras -----------------------------------------------


def test_cotangent_coev():
    h = make_sl2()
    r = {(x, x): 1 for x in "ehf"}
    v = verify_cotangent_3shifted(h, r, {})
    assert v.valid and v.generic


def test_cotangent_aff1_incompatible_q():
    h = make_2dim_nonabelian()
    r = {("x", "x"): 1, ("y", "y"): 1}
    v = verify_cotangent_3shifted(h, r, {"y": {("x", "x"): 1}})
    assert not v.valid and "q compatibility" in v.failed


def test_cotangent_abelian_only_mixed_symmetrization_matters():
    h = make_abelian_lie(2)
    r = {("x1", "x1"): 1, ("x2", "x2"): 1}
    q = {"x1": {("x1", "x1"): 1}}
    assert cotangent_conditions(h, r, q) == ["mixed symmetrization"]
    assert not verify_cotangent_3shifted(h, r, q).valid
    q2 = {"x2": {("x1", "x1"): 2}, "x1": {("x1", "x2"): -1, ("x2", "x1"): -1}}
    assert cotangent_conditions(h, r, q2) == []
    assert verify_cotangent_3shifted(h, r, q2).valid


# --- solver -----------------------------------------------------------------


def test_admissible_basis_normalization():
    sl2 = make_sl2()
    basis = admissible_basis(sl2.space, 2, 0, 2)
    assert len(basis) == 6
    for ins, outs, P in basis:
        assert P[(ins, outs)] == 1


def test_solver_known_dimensions():
    assert solve_linear_stratum(make_sl2(), 2, None, [(2, 0)]).dimension == 1
    assert solve_linear_stratum(builtin("abelian2"), 4, None, [(2, 0)]).dimension == 1
    assert solve_linear_stratum(builtin("cotangent-sl2"), 4, None, [(2, 0)]).dimension == 0
    for n in range(1, 5):
        a = builtin("abelian1")
        unknowns = [(m, l) for m, l, _ in enumerate_components(2, n, *default_caps(2, n))]
        assert solve_linear_stratum(a, n, None, unknowns).dimension == 0


def test_solver_basis_elements_are_solutions():
    sl2 = make_sl2()
    sol = solve_linear_stratum(sl2, 2, None, [(2, 0)])
    (vec,) = sol.basis
    comps = sol.components(vec)
    assert comps[(2, 0)].scale(Fraction(1, comps[(2, 0)][((), (0, 2))])) == killing_tensor(sl2).scale(Fraction(1, 2))


def test_solver_with_fixed_components_gives_affine_space():
    cot = builtin("cotangent-sl2")
    sol = solve_linear_stratum(cot, 3, {(2, 0): coev_component(cot)}, [(2, 1)])
    assert sol.consistent
    assert sol.affine_offset is None or not any(sol.affine_offset)


def test_solver_inconsistent_fixed_part():
    # delta(h) = e^f is not a 1-cocycle; no choice of trivector repairs that
    sl2 = make_sl2()
    delta = extend_by_symmetry(sl2.space, 1, 2, 0, 1, [(("h",), ("e", "f"), 1)])
    sol = solve_linear_stratum(sl2, 1, {(2, 1): delta}, [(3, 0)])
    assert not sol.consistent and sol.dimension == -1


def test_solver_detects_quadratic_coupling():
    ssl2 = builtin("string-sl2")
    with pytest.raises(NonlinearSystemError, match=r"\(3,0\)"):
        solve_linear_stratum(ssl2, 3, None, [(2, 0), (2, 1)])
    relaxed = solve_linear_stratum(ssl2, 3, None, [(2, 0), (2, 1)], relax=True)
    assert relaxed.relaxed and relaxed.dropped_rows == ((3, 0),)
    assert relaxed.dimension == 0


def test_solver_argument_checks():
    sl2 = make_sl2()
    with pytest.raises(ValueError):
        solve_linear_stratum(sl2, 2, {(2, 0): killing_tensor(sl2)}, [(2, 0)])
    with pytest.raises(ValueError):
        solve_linear_stratum(sl2, 2, None, [(1, 2)])


def test_consistency_error_is_raised_on_disagreement(monkeypatch):
    import shifted_poisson.classify as cl

    sl2 = make_sl2()
    monkeypatch.setattr(cl, "_run_table", lambda *a, **k: False)
    with pytest.raises(ConsistencyError):
        verify_2shifted_lie(sl2, killing_tensor(sl2))
