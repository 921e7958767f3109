"""Random generators and brute-force oracles shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product

import sympy

from shifted_poisson.graded_core import GradedSpace
from shifted_poisson.linfty import LieNAlgebra
from shifted_poisson.polyvector import MultiMap, project_symmetries


# ---------------------------------------------------------------------------
# oracles


def koszul_by_transpositions(degrees, images) -> int:
    """Sign of the pull ``new[i] = old[images[i]]``, by bubble-sorting adjacent swaps.

    Each swap of neighbouring letters of degrees p, q costs (-1)^(pq).
    """
    word = list(images)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                if degrees[word[i]] % 2 and degrees[word[i + 1]] % 2:
                    sign = -sign
                word[i], word[i + 1] = word[i + 1], word[i]
                changed = True
    return sign


def signature_by_cycles(images) -> int:
    seen = set()
    sign = 1
    for start in range(len(images)):
        if start in seen:
            continue
        length, j = 0, start
        while j not in seen:
            seen.add(j)
            j = images[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def brute_force_project(L: MultiMap, n: int) -> MultiMap:
    """Average over all input/output permutations, signs from adjacent transpositions."""
    degs = L.space.degrees
    l, m = L.arity_in, L.arity_out
    in_perms = list(permutations(range(l)))
    out_perms = list(permutations(range(m)))
    acc: dict = {}
    for (ins, outs), c in L.coeffs.items():
        for p in in_perms:
            s_in = signature_by_cycles(p) * koszul_by_transpositions([degs[x] for x in ins], p)
            new_ins = tuple(ins[i] for i in p)
            for q in out_perms:
                s_out = (signature_by_cycles(q) if n % 2 else 1) * koszul_by_transpositions([degs[x] for x in outs], q)
                key = (new_ins, tuple(outs[i] for i in q))
                acc[key] = acc.get(key, 0) + c * s_in * s_out
    total = len(in_perms) * len(out_perms)
    return MultiMap(L.space, l, m, L.degree, {k: v / total for k, v in acc.items()})


def is_shuffle(images, k1: int) -> bool:
    """A (k1, k2)-shuffle keeps the relative order inside each block."""
    inv = [0] * len(images)
    for pos, src in enumerate(images):
        inv[src] = pos
    return all(inv[i] < inv[i + 1] for i in range(k1 - 1)) and all(
        inv[i] < inv[i + 1] for i in range(k1, len(images) - 1)
    )


# ---------------------------------------------------------------------------
# generators


def random_space(rng: random.Random, max_dim: int = 3, degrees=(-2, -1, 0, 1)) -> GradedSpace:
    dim = rng.randint(1, max_dim)
    degs = sorted(rng.choice(degrees) for _ in range(dim))
    return GradedSpace(tuple(f"v{i}" for i in range(dim)), tuple(degs))


def random_complex(rng: random.Random, max_dim: int = 4, degrees=(-2, -1, 0, 1)) -> GradedSpace:
    """A random cochain complex with a nonzero differential (d^2 = 0 by rejection)."""
    while True:
        dim = rng.randint(2, max_dim)
        degs = sorted(rng.choice(degrees) for _ in range(dim))
        names = tuple(f"v{i}" for i in range(dim))
        pairs = [(i, j) for i in range(dim) for j in range(dim) if degs[j] == degs[i] + 1]
        if not pairs:
            continue
        chosen = rng.sample(pairs, rng.randint(1, len(pairs)))
        diff = tuple((i, j, Fraction(rng.choice([-2, -1, 1, 2]))) for i, j in chosen)
        try:
            return GradedSpace(names, tuple(degs), diff)
        except ValueError:
            continue


def _tuples_of_degree(space: GradedSpace, l: int, m: int, degree: int | None, rng: random.Random):
    degs = space.degrees
    ids = range(space.dim)
    pool = [(i, o) for i in product(ids, repeat=l) for o in product(ids, repeat=m)]
    by_degree: dict[int, list] = {}
    for i, o in pool:
        by_degree.setdefault(sum(degs[x] for x in o) - sum(degs[x] for x in i), []).append((i, o))
    if degree is None:
        degree = rng.choice(sorted(by_degree))
    return degree, by_degree.get(degree, [])


def random_map(
    rng: random.Random, space: GradedSpace, m: int, l: int, n: int | None = None, degree: int | None = None, terms: int = 2
) -> MultiMap:
    """Sparse random homogeneous map; projected for shift ``n`` unless ``n`` is None."""
    degree, pool = _tuples_of_degree(space, l, m, degree, rng)
    coeffs = {k: Fraction(rng.choice([-3, -2, -1, 1, 2, 3])) for k in rng.sample(pool, min(len(pool), terms))}
    M = MultiMap(space, l, m, degree, coeffs)
    return M if n is None else project_symmetries(M, n)


def unshuffle_blocks(k1: int, k2: int):
    """All ways to choose the positions of the first block, as sorted tuples."""
    return list(combinations(range(k1 + k2), k1))


def invariant_symmetric_tensors(h: LieNAlgebra) -> int:
    """Kernel-rank oracle: dim of ad-invariant symmetric 2-tensors, by direct linear algebra."""
    dim = h.space.dim
    pairs = list(combinations_with_replacement(range(dim), 2))
    br: dict = {}
    for ((x, y), (z,)), c in h.bracket(2).coeffs.items():
        br.setdefault((x, y), {})[z] = c
    rows = []
    for x in range(dim):
        # (ad_x (x) 1 + 1 (x) ad_x) applied to the symmetric basis tensor of each pair
        image: dict = {}
        for col, (i, j) in enumerate(pairs):
            terms = [(i, j), (j, i)] if i != j else [(i, i)]
            for a, b in terms:
                for z, c in br.get((x, a), {}).items():
                    image[(z, b, col)] = image.get((z, b, col), 0) + c
                for z, c in br.get((x, b), {}).items():
                    image[(a, z, col)] = image.get((a, z, col), 0) + c
        for u, v in product(range(dim), repeat=2):
            rows.append([image.get((u, v, col), 0) for col in range(len(pairs))])
    M = sympy.Matrix(rows)
    return len(pairs) - M.rank()
