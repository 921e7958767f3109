"""Problem documents: versioned UTF-8 JSON, parsed into graded spaces, algebras and candidates.

See ``docs/format.md`` for the schema.  :func:`serialize` emits the canonical
form (fixed key order, entries in basis order, one entry per line), and
``serialize(parse(text)) == text`` for canonical documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .graded_core import GradedSpace
from .linfty import LieNAlgebra
from .polyvector import MultiMap, component_degree, project_symmetries

SCHEMA = "shifted-poisson/1"
TOP_KEYS = ("schema", "name", "space", "brackets", "shift", "components", "unknowns", "max_weight")


class DocumentError(ValueError):
    """Invalid problem document; ``location`` points into the JSON structure."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


@dataclass
class Problem:
    algebra: LieNAlgebra
    name: str = ""
    shift: int | None = None
    components: dict[tuple[int, int], MultiMap] = field(default_factory=dict)
    unknowns: list[tuple[int, int]] = field(default_factory=list)
    max_weight: int | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def space(self) -> GradedSpace:
        return self.algebra.space


# ---------------------------------------------------------------------------
# parsing


def _rational(value, loc: str) -> Fraction:
    if not isinstance(value, str):
        raise DocumentError(loc, f"coefficients must be strings like \"3\" or \"-1/2\", got {json.dumps(value)}")
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise DocumentError(loc, f"not a rational number: {value!r}") from None


def _label(text, loc: str) -> tuple[int, int]:
    if not isinstance(text, str):
        raise DocumentError(loc, "component labels are strings \"m,l\"")
    try:
        m, l = (int(p) for p in text.split(","))
    except ValueError:
        raise DocumentError(loc, f"component label {text!r} is not of the form \"m,l\"") from None
    return m, l


def _entries(space: GradedSpace, raw, loc: str, l: int, m: int) -> dict:
    if not isinstance(raw, list):
        raise DocumentError(loc, "expected a list of entries")
    acc: dict = {}
    for k, entry in enumerate(raw):
        eloc = f"{loc}[{k}]"
        if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[0], list) and isinstance(entry[1], list)):
            raise DocumentError(eloc, "an entry is [[inputs...], [outputs...], \"coeff\"]")
        ins, outs, c = entry
        if len(ins) != l or len(outs) != m:
            raise DocumentError(eloc, f"expected {l} inputs and {m} outputs")
        try:
            key = (tuple(space.index(x) for x in ins), tuple(space.index(x) for x in outs))
        except (ValueError, TypeError) as exc:
            raise DocumentError(eloc, str(exc)) from None
        if key in acc:
            raise DocumentError(eloc, "duplicate entry")
        acc[key] = _rational(c, eloc + "[2]")
    return acc


def _map(space, raw, loc, l, m, degree) -> MultiMap:
    acc = _entries(space, raw, loc, l, m)
    degs = space.degrees
    for k, ((ins, outs), _) in enumerate(acc.items()):
        d = sum(degs[o] for o in outs) - sum(degs[i] for i in ins)
        if d != degree:
            raise DocumentError(f"{loc}[{k}]", f"entry has degree {d}, expected {degree}")
    return MultiMap(space, l, m, degree, acc)


def _space(raw) -> GradedSpace:
    if not isinstance(raw, dict):
        raise DocumentError("space", "expected an object")
    extra = set(raw) - {"graded_basis", "differential"}
    if extra:
        raise DocumentError("space", f"unknown keys {sorted(extra)}")
    blocks = raw.get("graded_basis")
    if not isinstance(blocks, list) or not blocks:
        raise DocumentError("space.graded_basis", "expected a non-empty list of {\"degree\", \"basis\"} blocks")
    graded: dict[int, list[str]] = {}
    for k, block in enumerate(blocks):
        loc = f"space.graded_basis[{k}]"
        if not isinstance(block, dict) or set(block) != {"degree", "basis"}:
            raise DocumentError(loc, "a block is {\"degree\": int, \"basis\": [names]}")
        deg, names = block["degree"], block["basis"]
        if not isinstance(deg, int) or isinstance(deg, bool):
            raise DocumentError(loc + ".degree", "degrees are integers")
        if deg in graded:
            raise DocumentError(loc + ".degree", f"degree {deg} listed twice")
        if not isinstance(names, list) or not all(isinstance(x, str) and x for x in names):
            raise DocumentError(loc + ".basis", "basis names are non-empty strings")
        graded[deg] = names
    diff = raw.get("differential", [])
    try:
        bare = GradedSpace.from_degrees(graded)
    except ValueError as exc:
        raise DocumentError("space.graded_basis", str(exc)) from None
    d_entries = _entries(bare, diff, "space.differential", 1, 1)
    try:
        return GradedSpace(bare.names, bare.degrees, tuple((i[0], o[0], c) for (i, o), c in d_entries.items()))
    except ValueError as exc:
        raise DocumentError("space.differential", str(exc)) from None


def parse(text: str) -> Problem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", f"invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document", "expected a JSON object")
    if doc.get("schema") != SCHEMA:
        raise DocumentError("schema", f"expected \"{SCHEMA}\", got {json.dumps(doc.get('schema'))}")
    extra = set(doc) - set(TOP_KEYS)
    if extra:
        raise DocumentError("document", f"unknown keys {sorted(extra)}")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise DocumentError("name", "expected a string")
    space = _space(doc.get("space"))
    warnings: list[str] = []

    raw_brackets = doc.get("brackets", {})
    if not isinstance(raw_brackets, dict):
        raise DocumentError("brackets", "expected an object keyed by arity")
    brackets = {}
    for key in raw_brackets:
        loc = f"brackets[{json.dumps(key)}]"
        if not key.isdigit() or int(key) < 2:
            raise DocumentError(loc, "bracket arities are integers >= 2")
        l = int(key)
        M = _map(space, raw_brackets[key], loc, l, 1, 2 - l)
        P = project_symmetries(M, 0)
        if P != M:
            warnings.append(f"{loc} was not graded antisymmetric; projected (coefficients changed)")
        brackets[l] = P
    try:
        algebra = LieNAlgebra(space, brackets, name)
    except ValueError as exc:
        raise DocumentError("brackets", str(exc)) from None

    shift = doc.get("shift")
    if shift is not None and (not isinstance(shift, int) or isinstance(shift, bool)):
        raise DocumentError("shift", "expected an integer")

    comps = {}
    raw_comps = doc.get("components", {})
    if not isinstance(raw_comps, dict):
        raise DocumentError("components", "expected an object keyed by \"m,l\"")
    if raw_comps and shift is None:
        raise DocumentError("components", "candidate components need a \"shift\"")
    for key in raw_comps:
        loc = f"components[{json.dumps(key)}]"
        m, l = _label(key, loc)
        if m < 2 or l < 0:
            raise DocumentError(loc, "components have weight m >= 2 and l >= 0 inputs")
        d, N = component_degree(m, l, shift), algebra.N
        if not m * (1 - N) <= d <= l * (N - 1):
            raise DocumentError(
                loc,
                f"degree {d} lies outside the window m(1-N) <= deg <= l(N-1) = [{m * (1 - N)}, {l * (N - 1)}] "
                f"for N={N}; such a component vanishes identically",
            )
        M = _map(space, raw_comps[key], loc, l, m, component_degree(m, l, shift))
        P = project_symmetries(M, shift)
        if P != M:
            warnings.append(f"{loc} was not in the image of the symmetry projector; projected (coefficients changed)")
        comps[(m, l)] = P

    unknowns = []
    raw_unknowns = doc.get("unknowns", [])
    if not isinstance(raw_unknowns, list):
        raise DocumentError("unknowns", "expected a list of \"m,l\" labels")
    for k, u in enumerate(raw_unknowns):
        unknowns.append(_label(u, f"unknowns[{k}]"))

    max_weight = doc.get("max_weight")
    if max_weight is not None and (not isinstance(max_weight, int) or isinstance(max_weight, bool) or max_weight < 1):
        raise DocumentError("max_weight", "expected a positive integer")
    return Problem(algebra, name, shift, dict(sorted(comps.items())), unknowns, max_weight, warnings)


# ---------------------------------------------------------------------------
# serialization


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _dump(x) -> str:
    return json.dumps(x, ensure_ascii=False)


def _entry_lines(M: MultiMap, indent: str) -> list[str]:
    return [
        f"{indent}{_dump([list(i), list(o), format_rational(c)])}" for i, o, c in M.named_entries()
    ]


def _block(lines: list[str], open_: str, close: str, indent: str) -> str:
    if not lines:
        return open_ + close
    return open_ + "\n" + ",\n".join(lines) + "\n" + indent + close


def serialize(problem: Problem) -> str:
    space = problem.space
    out = ["{", f'  "schema": {_dump(SCHEMA)}']
    if problem.name:
        out.append(f'  "name": {_dump(problem.name)}')
    blocks = []
    for deg in sorted(space.dims):
        blocks.append(f'      {{"degree": {deg}, "basis": {_dump(list(space.basis_names(deg)))}}}')
    diff = [
        f"      {_dump([[space.names[s]], [space.names[t]], format_rational(c)])}" for s, t, c in space.differential
    ]
    out.append(
        '  "space": {\n'
        f'    "graded_basis": {_block(blocks, "[", "]", "    ")},\n'
        f'    "differential": {_block(diff, "[", "]", "    ")}\n'
        "  }"
    )
    br = [
        f'    "{l}": {_block(_entry_lines(B, "      "), "[", "]", "    ")}'
        for l, B in sorted(problem.algebra.brackets.items())
    ]
    out.append(f'  "brackets": {_block(br, "{", "}", "  ")}')
    if problem.shift is not None:
        out.append(f'  "shift": {problem.shift}')
    if problem.components:
        cs = [
            f'    "{m},{l}": {_block(_entry_lines(M, "      "), "[", "]", "    ")}'
            for (m, l), M in sorted(problem.components.items())
        ]
        out.append(f'  "components": {_block(cs, "{", "}", "  ")}')
    if problem.unknowns:
        out.append(f'  "unknowns": {_dump([f"{m},{l}" for m, l in sorted(problem.unknowns)])}')
    if problem.max_weight is not None:
        out.append(f'  "max_weight": {problem.max_weight}')
    return out[0] + "\n" + ",\n".join(out[1:]) + "\n}\n"
