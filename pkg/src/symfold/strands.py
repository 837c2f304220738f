"""Strand systems and their circular orderings.

A system is a multiset of strand types; an ordering is one circular
arrangement of all strand copies, stored as its canonical linear
representative (the lexicographically least rotation of the type string).
Bases are indexed 1..N around the circle.  The gap between base p and
base p+1 is addressed by the integer p ("gap p"); gap 0 and gap N both
name the wrap-around gap, which is always a nick.  Interior nicks sit at
the ends of strands 1..c-1.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .errors import ParseError, SymfoldError

DNA_BASES = frozenset("ACGT")
RNA_BASES = frozenset("ACGU")

DEFAULT_MAX_STRANDS = 12

# Distinct linear arrangements tolerated before ordering enumeration bails.
MAX_ARRANGEMENTS = 2_000_000


@dataclass(frozen=True)
class Strand:
    name: str
    sequence: str

    def __post_init__(self) -> None:
        if not self.sequence:
            raise ParseError(f"strand {self.name!r} has an empty sequence")

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class StrandSystem:
    """A multiset of strand types with repetition counts."""

    types: tuple[tuple[Strand, int], ...]
    alphabet: str  # "DNA" or "RNA"

    @property
    def strand_count(self) -> int:
        return sum(n for _, n in self.types)

    @property
    def total_bases(self) -> int:
        return sum(len(s) * n for s, n in self.types)

    def type_by_name(self, name: str) -> int:
        for t, (s, _) in enumerate(self.types):
            if s.name == name:
                return t
        raise KeyError(name)


def _detect_alphabet(seqs: list[str]) -> str:
    letters = set("".join(seqs))
    has_t = "T" in letters
    has_u = "U" in letters
    if has_t and has_u:
        raise ParseError("sequences mix T and U; DNA and RNA cannot be combined")
    if has_u:
        return "RNA"
    return "DNA"


def parse_system(text: str, merge: bool = True,
                 max_strands: int = DEFAULT_MAX_STRANDS) -> StrandSystem:
    """Parse strand-file text: one ``<name> <sequence> <repetition>`` per line.

    ``#`` starts a comment, blank lines are skipped.  Identical sequences
    are merged into one type (repetitions added) unless ``merge`` is False.
    """
    entries: list[tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected '<name> <sequence> <repetition>'")
        name, seq, rep_s = fields
        seq = seq.upper()
        try:
            rep = int(rep_s)
        except ValueError:
            raise ParseError(f"line {lineno}: repetition {rep_s!r} is not an integer") from None
        if rep < 1:
            raise ParseError(f"line {lineno}: repetition must be >= 1")
        bad = set(seq) - (DNA_BASES | RNA_BASES)
        if bad:
            raise ParseError(f"line {lineno}: illegal characters {sorted(bad)} in sequence")
        entries.append((name, seq, rep))
    if not entries:
        raise ParseError("no strands found")

    alphabet = _detect_alphabet([seq for _, seq, _ in entries])

    merged: list[list] = []  # [name, seq, rep]
    for name, seq, rep in entries:
        hit = None
        for ent in merged:
            if ent[0] == name:
                if ent[1] != seq:
                    raise ParseError(f"strand name {name!r} reused with a different sequence")
                hit = ent
                break
            if merge and ent[1] == seq:
                hit = ent
                break
        if hit is None:
            merged.append([name, seq, rep])
        else:
            hit[2] += rep

    total = sum(rep for _, _, rep in merged)
    if total > max_strands:
        raise ParseError(
            f"system has {total} strands; the configured maximum is {max_strands}")
    types = tuple((Strand(name, seq), rep) for name, seq, rep in merged)
    return StrandSystem(types=types, alphabet=alphabet)


class Ordering:
    """One circular arrangement of all strand copies, in canonical rotation.

    Exposes 1-based global base indexing, per-gap nick tests, and range
    nick counts.
    """

    def __init__(self, system: StrandSystem, type_ids: tuple[int, ...]):
        self.system = system
        self.type_ids = type_ids
        self.strands = tuple(system.types[t][0] for t in type_ids)
        self.type_names = tuple(s.name for s in self.strands)
        self.sequence = "".join(s.sequence for s in self.strands)
        self.length = len(self.sequence)
        offsets = []
        pos = 1
        for s in self.strands:
            offsets.append(pos)
            pos += len(s)
        self.offsets = tuple(offsets)
        # interior nick gaps: after strands 1..c-1
        self._nick_gaps = frozenset(off + len(s) - 1
                                    for off, s in zip(self.offsets[:-1], self.strands[:-1])
                                    ) if len(self.strands) > 1 else frozenset()
        prefix = [0] * (self.length + 1)
        for p in range(1, self.length):
            prefix[p] = prefix[p - 1] + (1 if p in self._nick_gaps else 0)
        prefix[self.length] = prefix[self.length - 1]
        self._nick_prefix = prefix

    @property
    def strand_count(self) -> int:
        return len(self.strands)

    def base(self, g: int) -> str:
        return self.sequence[g - 1]

    def is_nick(self, gap: int) -> bool:
        """True if the gap between base ``gap`` and ``gap+1`` is a nick.

        Gap 0 and gap N are the wrap-around gap, always a nick.
        """
        if gap % self.length == 0:
            return True
        return gap in self._nick_gaps

    def nick_count(self, lo: int, hi: int) -> int:
        """Number of nicks among gaps lo..hi inclusive (empty range gives 0).

        Gap 0 and gap N name the same wrap-around gap; it contributes one
        nick even when the range touches both ends.
        """
        if hi < lo:
            return 0
        if lo < 0 or hi > self.length:
            raise ValueError(f"gap range [{lo}, {hi}] outside [0, {self.length}]")
        wrap = lo == 0 or hi == self.length
        if lo == 0:
            lo = 1
        if hi == self.length:
            hi = self.length - 1
        count = 1 if wrap else 0
        if hi >= lo:
            count += self._nick_prefix[hi] - self._nick_prefix[lo - 1]
        return count

    def interior_nicks(self) -> tuple[int, ...]:
        """Sorted interior nick gaps (strand ends except the last)."""
        return tuple(sorted(self._nick_gaps))

    def rotate_base(self, g: int, shift: int) -> int:
        return (g - 1 + shift) % self.length + 1

    def strand_index(self, g: int) -> int:
        """0-based position, within this ordering, of the strand holding base g."""
        if not 1 <= g <= self.length:
            raise ValueError(f"base {g} outside 1..{self.length}")
        return bisect_right(self.offsets, g) - 1

    def __repr__(self) -> str:
        return f"Ordering({''.join(self.type_names)})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Ordering)
                and self.system is other.system
                and self.type_ids == other.type_ids)

    def __hash__(self) -> int:
        return hash((id(self.system), self.type_ids))


def _least_rotation(seq: tuple) -> tuple:
    return min(tuple(seq[r:] + seq[:r]) for r in range(len(seq)))


def _multiset_arrangements(counts: list[int]):
    """Yield every distinct linear arrangement of type ids with the given counts."""
    total = sum(counts)
    arrangement = [0] * total

    def rec(pos: int):
        if pos == total:
            yield tuple(arrangement)
            return
        for t, n in enumerate(counts):
            if n > 0:
                counts[t] -= 1
                arrangement[pos] = t
                yield from rec(pos + 1)
                counts[t] += 1

    yield from rec(0)


def arrangement_count(system: StrandSystem) -> int:
    import math
    n = math.factorial(system.strand_count)
    for _, rep in system.types:
        n //= math.factorial(rep)
    return n


def circular_permutations(system: StrandSystem) -> list[Ordering]:
    """All distinct circular orderings, each as its canonical representative.

    Two linear arrangements related by rotation are the same ordering.
    The result is sorted by type-name tuple for deterministic ranks.
    """
    if arrangement_count(system) > MAX_ARRANGEMENTS:
        raise SymfoldError(
            "too many strand arrangements to enumerate; reduce strand count")
    counts = [rep for _, rep in system.types]
    seen: set[tuple[int, ...]] = set()
    for arr in _multiset_arrangements(counts):
        seen.add(_least_rotation(arr))
    name_of = {t: system.types[t][0].name for t in range(len(system.types))}
    ordered = sorted(seen, key=lambda ids: tuple(name_of[t] for t in ids))
    return [Ordering(system, ids) for ids in ordered]


def ordering_from_names(system: StrandSystem, names: list[str]) -> Ordering:
    """Build the canonical ordering for an explicit strand-name sequence."""
    ids = tuple(system.type_by_name(n) for n in names)
    from collections import Counter
    want = Counter()
    for t, (_, rep) in enumerate(system.types):
        want[t] = rep
    if Counter(ids) != want:
        raise ParseError("ordering does not use each strand copy exactly once")
    return Ordering(system, _least_rotation(ids))


def divisors(n: int) -> list[int]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


@dataclass(frozen=True)
class SymmetryProfile:
    """Repetition structure of an ordering's type string."""

    order: int                      # v: maximal n with type string == x^n
    fundamental: tuple[str, ...]    # x, the shortest repeating prefix
    degrees: tuple[int, ...]        # all divisors of v, ascending


def symmetry_profile(ordering: Ordering) -> SymmetryProfile:
    names = ordering.type_names
    c = len(names)
    for p in range(1, c + 1):
        if c % p == 0 and names == names[:p] * (c // p):
            v = c // p
            return SymmetryProfile(order=v, fundamental=names[:p],
                                   degrees=tuple(divisors(v)))
    raise AssertionError("unreachable: every string repeats itself once")
