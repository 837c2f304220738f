"""Symmetric backbone cuts and the slice-swap construction.

A cut collects the images of one covalent gap under the rotation that
maps an R-symmetric structure onto itself.  Removing an admissible cut
splits the circle into R congruent slices; swapping one slice between
two structures that share a cut builds an asymmetric hybrid whose
energy is pinned between theirs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .energy import ComplementRule
from .errors import StructureError
from .strands import Ordering, divisors, symmetry_profile
from .structures import (Loop, SecondaryStructure, is_connected,
                         is_unpseudoknotted, polymer_faces,
                         rotational_symmetry, segment_length)


@dataclass(frozen=True)
class SymmetricCut:
    """The orbit of one covalent gap under rotation by N/order bases."""

    order: int
    bonds: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.order < 2 or len(self.bonds) != self.order:
            raise StructureError(f"cut needs order >= 2 bonds, got {self.bonds}")
        step = self.bonds[1] - self.bonds[0]
        for a, b in zip(self.bonds, self.bonds[1:]):
            if b - a != step:
                raise StructureError(f"cut bonds {self.bonds} are not evenly spaced")

    @property
    def generator(self) -> int:
        return self.bonds[0]

    @property
    def key(self) -> tuple[int, int]:
        return (self.order, self.bonds[0])


@dataclass(frozen=True)
class Slice:
    """One of the R intervals between consecutive cut bonds."""

    start: int
    length: int
    pairs: tuple[tuple[int, int], ...]

    def contains(self, base: int, n: int) -> bool:
        return (base - self.start) % n < self.length


def cut_from_bond(ordering: Ordering, order: int, gap: int) -> SymmetricCut:
    """The cut of the given order generated by one covalent gap."""
    n = ordering.length
    if order < 2 or n % order:
        raise StructureError(f"order {order} does not divide {n} bases")
    step = n // order
    rep = (gap - 1) % step + 1
    bonds = tuple(rep + k * step for k in range(order))
    for b in bonds:
        if ordering.is_nick(b):
            raise StructureError(f"gap {b} is a nick, not a covalent bond")
    return SymmetricCut(order, bonds)


def enumerate_cuts(ordering: Ordering) -> tuple[SymmetricCut, ...]:
    """Every cut of every order dividing the ordering's symmetry order."""
    n = ordering.length
    v = symmetry_profile(ordering).order
    out = []
    for r in divisors(v):
        if r == 1:
            continue
        step = n // r
        for g in range(1, step + 1):
            bonds = tuple(g + k * step for k in range(r))
            nicked = sum(1 for b in bonds if ordering.is_nick(b))
            if nicked:
                # nick gaps of a symmetric ordering form whole orbits
                assert nicked == len(bonds)
                continue
            out.append(SymmetricCut(r, bonds))
    return tuple(out)


def cut_count(n: int, c: int, v: int) -> int:
    """Closed form for len(enumerate_cuts): (N-c)/v times (sigma(v)-v)."""
    return (n - c) // v * (sum(divisors(v)) - v)


def blocked_gaps(ordering: Ordering, structure: SecondaryStructure) -> frozenset[int]:
    """Gaps inside some pair's shorter arc; no cut bond may land here."""
    n = ordering.length
    blocked: set[int] = set()
    for a, b in structure.pairs:
        if 2 * (b - a) <= n:
            blocked.update(range(a, b))
        else:
            blocked.update(range(b, n + 1))
            blocked.update(range(1, a))
    return frozenset(blocked)


def is_admissible(ordering: Ordering, structure: SecondaryStructure,
                  cut: SymmetricCut) -> bool:
    """True when no bond of the cut falls inside any pair's shorter arc."""
    inside = blocked_gaps(ordering, structure)
    return not any(b in inside for b in cut.bonds)


def admissible_cuts(ordering: Ordering, structure: SecondaryStructure,
                    order: int | None = None) -> tuple[SymmetricCut, ...]:
    """All admissible cuts whose order is the structure's symmetry order."""
    r = order if order is not None else rotational_symmetry(ordering, structure)
    if r < 2:
        return ()
    n = ordering.length
    inside = blocked_gaps(ordering, structure)
    step = n // r
    out = []
    for g in range(1, step + 1):
        bonds = tuple(g + k * step for k in range(r))
        if any(ordering.is_nick(b) for b in bonds):
            continue
        if any(b in inside for b in bonds):
            continue
        out.append(SymmetricCut(r, bonds))
    return tuple(out)


def find_admissible_cut(ordering: Ordering, structure: SecondaryStructure,
                        order: int | None = None) -> SymmetricCut:
    """An admissible cut, built beside the pair with the widest short arc.

    A gap just outside that arc cannot sit inside the arc of any other
    pair, and neither can its rotated images, so the cut it generates is
    always admissible.
    """
    r = order if order is not None else rotational_symmetry(ordering, structure)
    if r < 2:
        raise StructureError("structure has no rotational symmetry to cut")
    if not structure.pairs:
        raise StructureError("structure without pairs cannot anchor a cut")
    n = ordering.length
    i, j = min(structure.pairs,
               key=lambda p: (-segment_length(p[0], p[1], n), p))
    if 2 * (j - i) <= n:
        outside = (i - 1 if i > 1 else n, j)
    else:
        outside = (j - 1, i)
    for g in outside:
        if not ordering.is_nick(g):
            cut = cut_from_bond(ordering, r, g)
            break
    else:
        raise StructureError("both gaps beside the widest pair are nicks; "
                             "the structure cannot be connected")
    assert is_admissible(ordering, structure, cut)
    return cut


def slices(ordering: Ordering, structure: SecondaryStructure,
           cut: SymmetricCut) -> tuple[Slice, ...]:
    """Split a symmetric structure along an admissible cut.

    Every pair falls inside exactly one of the R equal intervals between
    consecutive cut bonds, and consecutive intervals carry rotated
    copies of the same pair set.
    """
    n = ordering.length
    r = cut.order
    if n % r or cut.bonds[-1] > n:
        raise StructureError(f"cut {cut.bonds} does not fit {n} bases")
    step = n // r
    g = cut.generator
    buckets: list[list[tuple[int, int]]] = [[] for _ in range(r)]
    for a, b in structure.sorted_pairs():
        k = (a - 1 - g) % n // step
        if (b - 1 - g) % n // step != k:
            raise StructureError(f"pair ({a}, {b}) crosses cut {cut.bonds}")
        buckets[k].append((a, b))
    out = []
    for k in range(r):
        start = (g + k * step) % n + 1
        out.append(Slice(start, step, tuple(buckets[k])))
    for k in range(r):
        rotated = {tuple(sorted(((a - 1 + step) % n + 1, (b - 1 + step) % n + 1)))
                   for a, b in out[k].pairs}
        if rotated != set(out[(k + 1) % r].pairs):
            raise StructureError("cut slices are not rotated copies; "
                                 "structure lacks the cut's symmetry")
    return tuple(out)


def central_loop(ordering: Ordering, structure: SecondaryStructure,
                 cut: SymmetricCut) -> Loop:
    """The face carrying all the cut's bonds.

    It is a multiloop whenever the cut order exceeds 2; a 2-fold cut may
    also sit on an interior loop or a stack, never on anything else.
    """
    n = ordering.length
    want = set(cut.bonds)
    stack: list[tuple[int, int]] = []
    owners = set()
    for g in range(1, n + 1):
        p = structure.partner(g)
        if p and p < g:
            stack.pop()
        elif p:
            stack.append((g, p))
        if g in want:
            owners.add(stack[-1] if stack else None)
    if len(owners) != 1:
        raise StructureError(f"cut bonds {cut.bonds} do not share one face")
    closing = owners.pop()
    if closing is None:
        raise StructureError("cut bonds lie on the outside face")
    loop = next(f for f in polymer_faces(ordering, structure)
                if f.closing == closing)
    allowed = ("multiloop",) if cut.order > 2 else ("multiloop", "interior", "stack")
    if loop.kind not in allowed:
        raise StructureError(
            f"{loop.kind} face cannot carry a {cut.order}-fold cut")
    return loop


def central_pair_key(loop: Loop) -> frozenset[tuple[int, int]]:
    """Identity of a two-pair central face: the pairs that border it."""
    if loop.closing is None or len(loop.inner) != 1:
        raise StructureError("central key needs exactly two bordering pairs")
    return frozenset((loop.closing, loop.inner[0]))


def slice_and_swap(ordering: Ordering, first: SecondaryStructure,
                   second: SecondaryStructure,
                   cut: SymmetricCut) -> SecondaryStructure:
    """Hybrid of two distinct symmetric structures sharing one cut.

    The interval just past the cut's generator comes from ``second``,
    the rest from ``first``.  The result is connected, unpseudoknotted
    and asymmetric, with naive energy between the inputs' naive
    energies.
    """
    if first == second:
        raise StructureError("slice swap needs two distinct structures")
    donor = slices(ordering, second, cut)
    kept = slices(ordering, first, cut)
    merged = list(donor[0].pairs)
    for part in kept[1:]:
        merged.extend(part.pairs)
    hybrid = SecondaryStructure(ordering.length, merged)
    if not is_unpseudoknotted(hybrid):
        raise StructureError("slice swap produced crossing pairs")
    if not is_connected(ordering, hybrid):
        raise StructureError("slice swap produced a disconnected structure")
    if rotational_symmetry(ordering, hybrid) != 1:
        raise StructureError("slice swap produced a symmetric structure")
    return hybrid


def upper_bound(ordering: Ordering, rule: ComplementRule) -> int:
    """How many symmetric structures can all carry distinct certificates.

    One slot per backbone cut of every order, plus, when the symmetry
    order is even, one slot per complementary base pairing drawn from a
    single strand of the first half of the circle (the anchors a
    two-pair central face can have).
    """
    v = symmetry_profile(ordering).order
    if v == 1:
        return 0
    total = cut_count(ordering.length, ordering.strand_count, v)
    if v % 2 == 0:
        for strand in ordering.strands[:ordering.strand_count // 2]:
            counts = Counter(strand.sequence)
            letters = sorted(counts)
            for x in letters:
                for y in letters:
                    if x < y and rule.complementary(x, y):
                        total += counts[x] * counts[y]
    return total
