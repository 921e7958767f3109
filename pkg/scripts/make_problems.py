"""Write the example problem documents under problems/ (canonical form).

    python3 scripts/make_problems.py [OUTDIR]
"""

from __future__ import annotations

import sys
from pathlib import Path

from shifted_poisson import io
from shifted_poisson.examples import (
    antisymmetric_pairing,
    builtin,
    coev_component,
    cotangent_q_component,
    killing_tensor,
    make_2dim_nonabelian,
    make_cotangent,
    make_sl2,
    string_components,
)
from shifted_poisson.linfty import LieNAlgebra, extend_by_symmetry
from shifted_poisson.polyvector import MultiMap


def perturbed_sl2() -> io.Problem:
    """sl2 with [h,e] = 3e instead of 2e: the Jacobi identity fails."""
    h = make_sl2()
    sp = h.space
    B = extend_by_symmetry(sp, 2, 1, 0, 0, [(("e", "h"), ("e",), -3), (("e", "f"), ("h",), 1), (("h", "f"), ("f",), -2)])
    return io.Problem(LieNAlgebra(sp, {2: B}, "sl2-perturbed"), "sl2-perturbed")


def problems() -> dict[str, io.Problem]:
    out: dict[str, io.Problem] = {}
    out["sl2-perturbed"] = perturbed_sl2()

    sl2 = builtin("sl2")
    sp = sl2.space
    out["sl2-killing-n2"] = io.Problem(sl2, "sl2-killing-n2", 2, {(2, 0): killing_tensor(sl2)})
    ee = MultiMap.from_names(sp, 0, 2, 0, [((), ("e", "e"), 1)])
    out["sl2-ee-n2"] = io.Problem(sl2, "sl2-ee-n2", 2, {(2, 0): ee})
    out["sl2-solve-n2"] = io.Problem(sl2, "sl2-solve-n2", 2, unknowns=[(2, 0)])
    cob = extend_by_symmetry(sp, 1, 2, 0, 1, [(("e",), ("e", "h"), 1), (("f",), ("f", "h"), 1)])
    out["sl2-bialgebra-n1"] = io.Problem(sl2, "sl2-bialgebra-n1", 1, {(2, 1): cob})
    tri = extend_by_symmetry(sp, 0, 3, 0, 1, [((), ("e", "h", "f"), 1)])
    out["sl2-trivector-n1"] = io.Problem(sl2, "sl2-trivector-n1", 1, {(3, 0): tri})

    gl2 = builtin("gl2")
    tri = extend_by_symmetry(gl2.space, 0, 3, 0, 1, [((), ("E12", "E21", "E22"), 1)])
    out["gl2-trivector-n1"] = io.Problem(gl2, "gl2-trivector-n1", 1, {(3, 0): tri})

    ab2 = builtin("abelian2")
    out["abelian2-pairing-n4"] = io.Problem(ab2, "abelian2-pairing-n4", 4, {(2, 0): antisymmetric_pairing(ab2, "a1", "a2", 4)})
    out["abelian2-solve-n4"] = io.Problem(ab2, "abelian2-solve-n4", 4, unknowns=[(2, 0)])

    cot = builtin("cotangent-sl2")
    out["cotangent-sl2-coev-n3"] = io.Problem(cot, "cotangent-sl2-coev-n3", 3, {(2, 0): coev_component(cot)})

    aff = make_cotangent(make_2dim_nonabelian(), "cotangent-aff1")
    q = {"y": {("x", "x"): 1}}
    out["cotangent-aff1-q-n3"] = io.Problem(
        aff, "cotangent-aff1-q-n3", 3, {(2, 0): coev_component(aff), (2, 1): cotangent_q_component(aff, q)}
    )

    ssl2 = builtin("string-sl2")
    out["string-sl2-nonzero-n3"] = io.Problem(
        ssl2, "string-sl2-nonzero-n3", 3, string_components(ssl2, {"h": 1}, {"h": 1}, 3)
    )
    sgl2 = builtin("string-gl2-trace")
    out["string-gl2-trace-n3"] = io.Problem(
        sgl2, "string-gl2-trace-n3", 3, string_components(sgl2, {}, {"E11": 1, "E22": 1}, 3)
    )
    out["string-sl2-solve-n3"] = io.Problem(ssl2, "string-sl2-solve-n3", 3, unknowns=[(2, 0), (2, 1)])
    return out


def main(outdir: str = "problems") -> None:
    root = Path(outdir)
    root.mkdir(parents=True, exist_ok=True)
    for name, problem in problems().items():
        (root / f"{name}.json").write_text(io.serialize(problem), encoding="utf-8")
        print(f"wrote {root / name}.json")


if __name__ == "__main__":
    main(*sys.argv[1:])
