"""Secondary structures over a circular strand ordering.

A structure is a set of base pairs (i, j) with 1 <= i < j <= N on the
ordering's global indexing.  Everything downstream assumes pairs are
non-crossing (checked by :func:`assert_unpseudoknotted`); connectivity is
a separate property and is not assumed here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, StructureError
from .strands import Ordering


class SecondaryStructure:
    """An immutable set of base pairs on N bases."""

    __slots__ = ("n", "pairs", "_partner")

    def __init__(self, n: int, pairs) -> None:
        self.n = n
        partner = [0] * (n + 1)
        norm = set()
        for a, b in pairs:
            if a > b:
                a, b = b, a
            if not (1 <= a < b <= n):
                raise StructureError(f"pair ({a}, {b}) outside 1..{n}")
            if partner[a] or partner[b]:
                raise StructureError(f"base in pair ({a}, {b}) is already paired")
            partner[a] = b
            partner[b] = a
            norm.add((a, b))
        self.pairs = frozenset(norm)
        self._partner = tuple(partner)

    def partner(self, g: int) -> int:
        """Partner of base g, or 0 if unpaired."""
        return self._partner[g]

    def is_paired(self, g: int) -> bool:
        return self._partner[g] != 0

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SecondaryStructure)
                and self.n == other.n and self.pairs == other.pairs)

    def __hash__(self) -> int:
        return hash((self.n, self.pairs))

    def __repr__(self) -> str:
        return f"SecondaryStructure(n={self.n}, pairs={self.sorted_pairs()})"


def is_unpseudoknotted(structure: SecondaryStructure) -> bool:
    try:
        assert_unpseudoknotted(structure)
    except StructureError:
        return False
    return True


def assert_unpseudoknotted(structure: SecondaryStructure) -> None:
    """Raise StructureError on any two crossing pairs (i < d < j < e)."""
    stack: list[int] = []
    for g in range(1, structure.n + 1):
        p = structure.partner(g)
        if p == 0:
            continue
        if p > g:
            stack.append(g)
        else:
            if not stack or stack[-1] != p:
                raise StructureError(
                    f"pair ({p}, {g}) crosses pair opened at {stack[-1] if stack else '?'}")
            stack.pop()


def is_connected(ordering: Ordering, structure: SecondaryStructure) -> bool:
    """True if the pairs link every strand into one component."""
    c = ordering.strand_count
    if c == 1:
        return True
    root = list(range(c))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    merged = 0
    for a, b in structure.pairs:
        ra, rb = find(ordering.strand_index(a)), find(ordering.strand_index(b))
        if ra != rb:
            root[ra] = rb
            merged += 1
    return merged == c - 1


@dataclass(frozen=True)
class Loop:
    """One face of the circular-polymer diagram.

    ``closing`` is the pair whose chord bounds the face from outside, or
    None for the face touching the wrap-around gap.  ``inner`` holds the
    face's remaining pairs in 5'-to-3' order.  ``nicks`` counts strand
    breaks on the face; any nick makes the loop exterior.
    """

    kind: str
    closing: tuple[int, int] | None
    inner: tuple[tuple[int, int], ...]
    unpaired: int
    nicks: int

    @property
    def pair_count(self) -> int:
        return len(self.inner) + (1 if self.closing else 0)

    def interior_sides(self) -> tuple[int, int]:
        """Unpaired run lengths flanking the single inner pair."""
        if self.closing is None or len(self.inner) != 1:
            raise StructureError(f"{self.kind} loop has no two-sided geometry")
        i, j = self.closing
        d, e = self.inner[0]
        return d - i - 1, j - e - 1


def _classify(closing, inner, unpaired, nicks) -> str:
    if nicks > 0:
        return "exterior"
    if closing is None:
        raise StructureError("face without closing pair must touch the wrap gap")
    if not inner:
        return "hairpin"
    if len(inner) == 1:
        s1 = inner[0][0] - closing[0] - 1
        s2 = closing[1] - inner[0][1] - 1
        if s1 == 0 and s2 == 0:
            return "stack"
        if s1 == 0 or s2 == 0:
            return "bulge"
        return "interior"
    return "multiloop"


class _Face:
    __slots__ = ("inner", "unpaired", "nicks")

    def __init__(self):
        self.inner = []
        self.unpaired = 0
        self.nicks = 0


def polymer_faces(ordering: Ordering, structure: SecondaryStructure) -> list[Loop]:
    """Faces of the circular diagram, connectivity not required.

    Returns the wrap-gap face first, then one loop per pair in sorted
    order, so the list always has len(pairs) + 1 entries.  Raises
    StructureError if the structure is pseudoknotted or N mismatches.
    """
    n = structure.n
    if n != ordering.length:
        raise StructureError(f"structure on {n} bases, ordering has {ordering.length}")
    root = _Face()
    faces: dict[tuple[int, int], _Face] = {p: _Face() for p in structure.pairs}
    stack: list[tuple[int, int]] = []
    for g in range(1, n + 1):
        p = structure.partner(g)
        if p and p < g:
            if not stack or stack[-1] != (p, g):
                raise StructureError(f"pair ({p}, {g}) crosses an open pair")
            stack.pop()
        elif p:
            owner = faces[stack[-1]] if stack else root
            owner.inner.append((g, p))
            stack.append((g, p))
        else:
            owner = faces[stack[-1]] if stack else root
            owner.unpaired += 1
        if g < n and ordering.is_nick(g):
            owner = faces[stack[-1]] if stack else root
            owner.nicks += 1
    root.nicks += 1  # the wrap-around gap

    out = [Loop(kind=_classify(None, tuple(root.inner), root.unpaired, root.nicks),
                closing=None, inner=tuple(root.inner),
                unpaired=root.unpaired, nicks=root.nicks)]
    for pair in structure.sorted_pairs():
        f = faces[pair]
        out.append(Loop(kind=_classify(pair, tuple(f.inner), f.unpaired, f.nicks),
                        closing=pair, inner=tuple(f.inner),
                        unpaired=f.unpaired, nicks=f.nicks))
    return out


def loop_decomposition(ordering: Ordering, structure: SecondaryStructure) -> list[Loop]:
    """The loop decomposition of a connected, unpseudoknotted structure.

    A lone strand with no pairs decomposes into nothing.  Disconnected
    or pseudoknotted input raises StructureError.
    """
    if structure.n != ordering.length:
        raise StructureError(
            f"structure on {structure.n} bases, ordering has {ordering.length}")
    if not is_connected(ordering, structure):
        raise StructureError("structure does not connect all strands")
    if ordering.strand_count == 1 and not structure.pairs:
        return []
    return polymer_faces(ordering, structure)


def max_nicks_per_loop(ordering: Ordering, structure: SecondaryStructure) -> int:
    return max(l.nicks for l in polymer_faces(ordering, structure))


def rotational_symmetry(ordering: Ordering, structure: SecondaryStructure,
                        order: int | None = None) -> int:
    """Largest R such that rotating by N/R bases maps the structure to itself.

    ``order`` caps the search at the ordering's own repetition order; it
    is recomputed when not supplied.
    """
    if order is None:
        from .strands import symmetry_profile
        order = symmetry_profile(ordering).order
    n = ordering.length
    for r in _divisors_desc(order):
        if r == 1:
            return 1
        shift = n // r
        ok = True
        for a, b in structure.pairs:
            a2 = (a - 1 + shift) % n + 1
            b2 = (b - 1 + shift) % n + 1
            if a2 > b2:
                a2, b2 = b2, a2
            if (a2, b2) not in structure.pairs:
                ok = False
                break
        if ok:
            return r
    return 1


def _divisors_desc(v: int) -> list[int]:
    return [d for d in range(v, 0, -1) if v % d == 0]


def segment_length(i: int, j: int, n: int) -> int:
    """Bases on the shorter circular arc from i to j, endpoints included."""
    d = abs(i - j)
    return min(d + 1, n - d + 1)


def shorter_arc(i: int, j: int, n: int) -> tuple[int, ...]:
    """The bases of the shorter arc between i < j, in walking order.

    Ties go to the ascending arc i..j.
    """
    if i >= j:
        raise StructureError(f"arc endpoints must satisfy i < j, got ({i}, {j})")
    if 2 * (j - i) <= n:
        return tuple(range(i, j + 1))
    return tuple(range(j, n + 1)) + tuple(range(1, i + 1))


def serialize_dotbracket(structure: SecondaryStructure, ordering: Ordering,
                         energy: int | None = None) -> str:
    """Render pairs as ``(``/``)``/``.`` with ``+`` at interior nicks.

    ``energy`` appends a ``# energy=<int>`` comment.
    """
    chars = []
    for g in range(1, structure.n + 1):
        p = structure.partner(g)
        chars.append("." if p == 0 else "(" if p > g else ")")
        if g < structure.n and ordering.is_nick(g):
            chars.append("+")
    if energy is not None:
        chars.append(f"  # energy={energy}")
    return "".join(chars)


def from_dotbracket(text: str) -> tuple[int, list[tuple[int, int]], list[int]]:
    """Parse ``(``/``)``/``.``/``+`` notation without an ordering.

    Returns (total bases, pairs, per-segment base counts).  Pairing may
    reach across ``+`` separators; a trailing ``#`` comment is ignored.
    """
    pairs = []
    stack = []
    seg_lengths = []
    seg = 0
    g = 0
    for ch in text.split("#", 1)[0].strip():
        if ch == "+":
            if seg == 0:
                raise ParseError("empty segment in dot-bracket string")
            seg_lengths.append(seg)
            seg = 0
            continue
        g += 1
        seg += 1
        if ch == "(":
            stack.append(g)
        elif ch == ")":
            if not stack:
                raise ParseError(f"unmatched ')' at position {g}")
            pairs.append((stack.pop(), g))
        elif ch != ".":
            raise ParseError(f"illegal character {ch!r} in dot-bracket string")
    if seg == 0:
        raise ParseError("empty segment in dot-bracket string")
    seg_lengths.append(seg)
    if stack:
        raise ParseError(f"unmatched '(' at position {stack[-1]}")
    return g, pairs, seg_lengths


def parse_dotbracket(text: str, ordering: Ordering,
                     rule=None) -> SecondaryStructure:
    """Parse dot-bracket text against an ordering.

    Segment lengths must match the ordering's strands.  When ``rule`` is
    given, every pair must be complementary under it.
    """
    n, pairs, segs = from_dotbracket(text)
    want = [len(s) for s in ordering.strands]
    if segs != want:
        raise ParseError(
            f"segment lengths {segs} do not match the ordering's strands {want}")
    s = SecondaryStructure(n, pairs)  # bracket matching already forbids crossings
    if rule is not None:
        for a, b in s.pairs:
            if not rule.complementary(ordering.base(a), ordering.base(b)):
                raise ParseError(
                    f"pair ({a}, {b}) joins non-complementary bases "
                    f"{ordering.base(a)}-{ordering.base(b)}")
    return s
