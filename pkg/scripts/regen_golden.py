"""Regenerate tests/golden/: one report per CLI case plus manifest.json (argv, exit code).

    python3 scripts/regen_golden.py        # run from the repository root
"""

from __future__ import annotations

import io as _io
import json
from pathlib import Path

from shifted_poisson.cli import main
from shifted_poisson.examples import CATALOG

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"


def cases() -> dict[str, list[str]]:
    out: dict[str, list[str]] = {"builtin-list": ["builtin", "--list"]}
    for name in CATALOG:
        out[f"check-linfty-{name}"] = ["check-linfty", "--builtin", name]
        out[f"dump-{name}"] = ["builtin", name]
    for N, n in [(1, 1), (1, 2), (2, 2), (2, 3), (2, 4), (2, 6)]:
        out[f"enumerate-N{N}-n{n}"] = ["enumerate", "--N", str(N), "--n", str(n)]
    for k in range(1, 5):
        out[f"solve-abelian1-n{k}"] = ["solve", "--builtin", "abelian1", "--n", str(k), "--all", "--verify"]
    for path in sorted((ROOT / "problems").glob("*.json")):
        rel = f"problems/{path.name}"
        stem = path.stem
        if "perturbed" in stem:
            out[f"linfty-{stem}"] = ["check-linfty", rel]
        elif "solve" in stem:
            out[f"solve-{stem}"] = ["solve", rel, "--relax", "--verify"]
        else:
            out[f"poisson-{stem}"] = ["check-poisson", "--specialized", rel]
    return out


def run(argv: list[str]) -> tuple[int, str]:
    buf = _io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def main_regen() -> None:
    import os

    os.chdir(ROOT)
    GOLDEN.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for case, argv in cases().items():
        code, text = run(argv)
        (GOLDEN / f"{case}.txt").write_text(text, encoding="utf-8")
        manifest[case] = {"argv": argv, "exit": code}
        print(f"{case}: exit {code}")
    (GOLDEN / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main_regen()
