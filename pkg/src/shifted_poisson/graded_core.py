"""Exact graded linear algebra.

Graded vector spaces with a named homogeneous basis and a differential,
Koszul signs, permutations and shuffles, and the signed action of
permutations on tensor powers.

Basis vectors are addressed internally by a *global id*: the position in the
space's basis, ordered by ascending degree and then by the order in which the
names were given.  All coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Iterator, Mapping, Sequence

Degree = int


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction (never floats)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {value!r} as an exact rational coefficient")


# ---------------------------------------------------------------------------
# Permutations, Koszul signs, shuffles


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``k`` slots, acting by *pulling*.

    Applied to a sequence ``v``, the result at position ``i`` is
    ``v[images[i]]``.
    """

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        object.__setattr__(self, "images", images)

    def __len__(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(k)))

    def apply(self, seq: Sequence) -> tuple:
        if len(seq) != len(self.images):
            raise ValueError("length mismatch between permutation and sequence")
        return tuple(seq[i] for i in self.images)

    def after(self, first: "Permutation") -> "Permutation":
        """The permutation obtained by applying ``first`` and then ``self``."""
        if len(first) != len(self):
            raise ValueError("length mismatch")
        return Permutation(tuple(first.images[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for pos, src in enumerate(self.images):
            inv[src] = pos
        return Permutation(tuple(inv))

    def inversions(self) -> list[tuple[int, int]]:
        """Pairs of original items ``(a, b)`` with ``a < b`` that end up with ``b`` before ``a``."""
        im = self.images
        return [(im[j], im[i]) for i in range(len(im)) for j in range(i + 1, len(im)) if im[i] > im[j]]

    def signature(self) -> int:
        return -1 if len(self.inversions()) % 2 else 1


def _inversion_parity(degrees: Sequence[int], images: Sequence[int]) -> int:
    parity = 0
    k = len(images)
    for i in range(k):
        di = degrees[images[i]]
        if not di & 1:
            continue
        for j in range(i + 1, k):
            if images[i] > images[j] and degrees[images[j]] & 1:
                parity ^= 1
    return parity


def koszul_sign(degrees: Sequence[Degree], perm: Permutation) -> int:
    """Koszul sign of rearranging factors of the given degrees by ``perm``.

    Every pair of factors whose relative order is inverted contributes
    ``(-1)^(|v||w|)``.
    """
    if len(degrees) != len(perm):
        raise ValueError(f"{len(degrees)} degrees but a permutation of {len(perm)} letters")
    return -1 if _inversion_parity(degrees, perm.images) else 1


def all_permutations(k: int) -> Iterator[Permutation]:
    for images in permutations(range(k)):
        yield Permutation(images)


def shuffles(k1: int, k2: int) -> list[tuple[Permutation, int]]:
    """All (k1,k2)-shuffles with their signatures, in lexicographic order of images.

    A shuffle keeps ``images[0] < ... < images[k1-1]`` and
    ``images[k1] < ... < images[k1+k2-1]``.
    """
    if k1 < 0 or k2 < 0:
        raise ValueError("shuffle block sizes must be non-negative")
    k = k1 + k2
    out = []
    for first in combinations(range(k), k1):
        chosen = set(first)
        images = first + tuple(i for i in range(k) if i not in chosen)
        perm = Permutation(images)
        out.append((perm, perm.signature()))
    return out


@dataclass(frozen=True)
class Interleaving:
    """Placement of a block ``A`` (size k1) and block ``B`` (size k2) into k1+k2 slots.

    ``pos_a``/``pos_b`` are the slot positions of the items of each block;
    ``crossings`` lists the pairs ``(i, j)`` (item ``i`` of A, item ``j`` of B)
    where B's item lands before A's item.  This is the data of a shuffle
    permutation viewed as a merge of two ordered blocks.
    """

    pos_a: tuple[int, ...]
    pos_b: tuple[int, ...]
    crossings: tuple[tuple[int, int], ...]

    @property
    def parity(self) -> int:
        return len(self.crossings) & 1


def interleavings(k1: int, k2: int) -> list[Interleaving]:
    """The merges of two ordered blocks, in the same order as :func:`shuffles`."""
    out = []
    for perm, _ in shuffles(k1, k2):
        pos_a = perm.images[:k1]
        pos_b = perm.images[k1:]
        crossings = tuple((i, j) for i in range(k1) for j in range(k2) if pos_b[j] < pos_a[i])
        out.append(Interleaving(pos_a, pos_b, crossings))
    return out


# ---------------------------------------------------------------------------
# Graded spaces


@dataclass(frozen=True)
class BasisVector:
    degree: Degree
    index: int


@dataclass(frozen=True)
class GradedSpace:
    """A bounded graded vector space with a named homogeneous basis and a differential.

    ``differential`` holds triples ``(source id, target id, coefficient)``
    meaning ``d(source) = sum coefficient * target``.
    """

    names: tuple[str, ...]
    degrees: tuple[int, ...]
    differential: tuple[tuple[int, int, Fraction], ...] = ()
    _index: Mapping[str, int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        names = tuple(self.names)
        degrees = tuple(int(d) for d in self.degrees)
        if len(names) != len(degrees):
            raise ValueError("names and degrees must have equal length")
        if len(set(names)) != len(names):
            raise ValueError("basis names must be distinct")
        order = sorted(range(len(names)), key=lambda i: degrees[i])
        if order != list(range(len(names))):
            raise ValueError("basis must be listed in ascending degree order")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(names)})
        merged: dict[tuple[int, int], Fraction] = {}
        for src, tgt, c in self.differential:
            if not (0 <= src < len(names) and 0 <= tgt < len(names)):
                raise ValueError("differential entry references a foreign basis vector")
            if degrees[tgt] != degrees[src] + 1:
                raise ValueError(
                    f"differential maps {names[src]} (degree {degrees[src]}) to "
                    f"{names[tgt]} (degree {degrees[tgt]}); degrees must increase by one"
                )
            merged[(src, tgt)] = merged.get((src, tgt), Fraction(0)) + as_rational(c)
        entries = tuple(sorted((s, t, c) for (s, t), c in merged.items() if c))
        object.__setattr__(self, "differential", entries)
        if not self._d_squares_to_zero():
            raise ValueError("differential does not square to zero")

    @classmethod
    def from_degrees(
        cls,
        graded_names: Mapping[int, Sequence[str]],
        differential: Iterable[tuple[str, str, object]] = (),
    ) -> "GradedSpace":
        """Build from ``{degree: [names...]}`` and ``(source, target, coeff)`` name triples."""
        names: list[str] = []
        degrees: list[int] = []
        for deg in sorted(graded_names):
            for name in graded_names[deg]:
                names.append(name)
                degrees.append(int(deg))
        index = {n: i for i, n in enumerate(names)}
        try:
            d = tuple((index[s], index[t], as_rational(c)) for s, t, c in differential)
        except KeyError as exc:
            raise ValueError(f"differential references unknown basis name {exc.args[0]!r}") from None
        return cls(tuple(names), tuple(degrees), d)

    # -- basic queries -----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def dims(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def basis_names(self, degree: int) -> tuple[str, ...]:
        return tuple(n for n, d in zip(self.names, self.degrees) if d == degree)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown basis name {name!r}") from None

    def global_id(self, v: BasisVector) -> int:
        ids = [i for i, d in enumerate(self.degrees) if d == v.degree]
        if not 0 <= v.index < len(ids):
            raise ValueError(f"{v} does not belong to this space")
        return ids[v.index]

    def basis_vector(self, gid: int) -> BasisVector:
        deg = self.degrees[gid]
        return BasisVector(deg, sum(1 for i in range(gid) if self.degrees[i] == deg))

    @property
    def has_differential(self) -> bool:
        return bool(self.differential)

    def d_out(self) -> dict[int, list[tuple[int, Fraction]]]:
        """``source -> [(target, coeff)]``."""
        out: dict[int, list[tuple[int, Fraction]]] = {}
        for s, t, c in self.differential:
            out.setdefault(s, []).append((t, c))
        return out

    def d_in(self) -> dict[int, list[tuple[int, Fraction]]]:
        """``target -> [(source, coeff)]``."""
        out: dict[int, list[tuple[int, Fraction]]] = {}
        for s, t, c in self.differential:
            out.setdefault(t, []).append((s, c))
        return out

    def _d_squares_to_zero(self) -> bool:
        d = self.d_out()
        for s in d:
            acc: dict[int, Fraction] = {}
            for t, c in d[s]:
                for u, c2 in d.get(t, ()):
                    acc[u] = acc.get(u, Fraction(0)) + c * c2
            if any(acc.values()):
                return False
        return True


def braiding_action(
    perm: Permutation, factors: Sequence[BasisVector]
) -> tuple[int, tuple[BasisVector, ...]]:
    """Apply the symmetric braiding ``gamma_perm`` to a pure tensor of basis vectors."""
    sign = koszul_sign([f.degree for f in factors], perm)
    return sign, perm.apply(factors)


def dual_pairing(space: GradedSpace, theta: BasisVector, x: BasisVector) -> Fraction:
    """Pairing of the dual basis vector ``theta`` with the basis vector ``x``."""
    space.global_id(theta)
    space.global_id(x)
    return Fraction(1) if theta == x else Fraction(0)
