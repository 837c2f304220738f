"""Loop-based free energy in integer centi-units.

Energies are exact integers (hundredths of the working unit) so that
optimization and tie-breaking never touch floating point.  Only the
thermal scale ``kbt_centi`` is real-valued, entering through the
symmetry correction ``kbt * ln(R)``.  ``INF`` marks forbidden states and
is absorbing under :func:`sat_add`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ParseError, StructureError
from .strands import Ordering
from .structures import Loop, SecondaryStructure, polymer_faces, rotational_symmetry

INF = 2 ** 62


def sat_add(*values: int) -> int:
    """Integer sum that saturates at INF instead of overflowing past it."""
    total = 0
    for v in values:
        if v >= INF:
            return INF
        total += v
    return min(total, INF)


class ComplementRule:
    """Which base letters may pair."""

    def __init__(self, pairs) -> None:
        self._ok = frozenset(frozenset(p) for p in pairs)

    def complementary(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self._ok

    def __repr__(self) -> str:
        inner = sorted("".join(sorted(p)) for p in self._ok)
        return f"ComplementRule({inner})"


def complement_rule(alphabet: str, wobble: bool = False) -> ComplementRule:
    if alphabet == "DNA":
        pairs = [("A", "T"), ("C", "G")]
        if wobble:
            pairs.append(("G", "T"))
    elif alphabet == "RNA":
        pairs = [("A", "U"), ("C", "G")]
        if wobble:
            pairs.append(("G", "U"))
    else:
        raise ValueError(f"unknown alphabet {alphabet!r}")
    return ComplementRule(pairs)


@dataclass(frozen=True)
class SimpleLoopModel:
    """Sequence-independent loop energies, linear in loop size.

    Interior-type loops collapse to ``stack`` when both sides are empty.
    Exterior loops always contribute zero.
    """

    hairpin_base: int = 300
    hairpin_per_nt: int = 10
    stack: int = -200
    interior_base: int = 100
    interior_per_nt: int = 30
    multi_init: int = 340
    multi_bp: int = 40
    multi_nt: int = 10
    assoc: int = 196
    kbt_centi: float = 61.6
    min_hairpin: int = 3

    def hairpin_energy(self, i: int, j: int) -> int:
        s = j - i - 1
        if s < self.min_hairpin:
            return INF
        return self.hairpin_base + self.hairpin_per_nt * s

    def interior_energy(self, i: int, d: int, e: int, j: int) -> int:
        s1 = d - i - 1
        s2 = j - e - 1
        if s1 == 0 and s2 == 0:
            return self.stack
        return self.interior_base + self.interior_per_nt * (s1 + s2)

    def multiloop_energy(self, pairs: int, unpaired: int) -> int:
        return self.multi_init + self.multi_bp * pairs + self.multi_nt * unpaired

    def loop_energy(self, loop: Loop) -> int:
        if loop.kind == "exterior":
            return 0
        if loop.kind == "hairpin":
            i, j = loop.closing
            return self.hairpin_energy(i, j)
        if loop.kind in ("stack", "bulge", "interior"):
            i, j = loop.closing
            d, e = loop.inner[0]
            return self.interior_energy(i, d, e, j)
        if loop.kind == "multiloop":
            return self.multiloop_energy(loop.pair_count, loop.unpaired)
        raise ValueError(f"unknown loop kind {loop.kind!r}")

    def symmetry_term(self, r: int) -> float:
        return self.kbt_centi * math.log(r)


TEST_MODEL = SimpleLoopModel()

_INT_KEYS = {
    "hairpin_base", "hairpin_per_nt", "stack", "interior_base",
    "interior_per_nt", "multi_init", "multi_bp", "multi_nt", "assoc",
    "min_hairpin",
}
_REAL_KEYS = {"kbt_centi"}


def load_params(text: str) -> SimpleLoopModel:
    """Parse ``key=value`` lines, overriding the built-in defaults.

    Whitespace-separated ``key value`` is tolerated too.  Unknown keys
    are rejected rather than ignored so typos surface.
    """
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("=", 1) if "=" in line else line.split()
        parts = [p.strip() for p in parts if p.strip()]
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'key=value'")
        key, value = parts
        if key in _INT_KEYS:
            try:
                overrides[key] = int(value)
            except ValueError:
                raise ParseError(f"line {lineno}: {key} needs an integer") from None
        elif key in _REAL_KEYS:
            try:
                overrides[key] = float(value)
            except ValueError:
                raise ParseError(f"line {lineno}: {key} needs a number") from None
        else:
            raise ParseError(f"line {lineno}: unknown parameter {key!r}")
    model = replace(TEST_MODEL, **overrides)
    if model.min_hairpin < 0:
        raise ParseError("min_hairpin must be >= 0")
    if not model.kbt_centi > 0:
        raise ParseError("kbt_centi must be positive")
    return model


def assert_compatible(ordering: Ordering, structure: SecondaryStructure,
                      rule: ComplementRule) -> None:
    for a, b in structure.pairs:
        if not rule.complementary(ordering.base(a), ordering.base(b)):
            raise StructureError(
                f"pair ({a}, {b}) joins non-complementary bases "
                f"{ordering.base(a)}-{ordering.base(b)}")


def loop_sum(ordering: Ordering, structure: SecondaryStructure,
             model: SimpleLoopModel) -> int:
    """Sum of loop energies alone; caller guarantees connectivity."""
    faces = polymer_faces(ordering, structure)
    return sat_add(*(model.loop_energy(l) for l in faces))


def naive_free_energy(ordering: Ordering, structure: SecondaryStructure,
                      model: SimpleLoopModel) -> int:
    """Loop-sum energy plus the association penalty, symmetry ignored."""
    return sat_add(loop_sum(ordering, structure, model),
                   model.assoc * (ordering.strand_count - 1))


@dataclass(frozen=True)
class EnergyBreakdown:
    loop_sum: int               # centi-units
    association: int            # (c-1) * assoc, centi-units
    symmetry_order: int         # R
    symmetry_term: float        # kbt * ln(R), centi-units
    total: float                # naive + symmetry_term

    @property
    def naive(self) -> int:
        return sat_add(self.loop_sum, self.association)

    def __str__(self) -> str:
        return (f"loops={self.loop_sum} assoc={self.association} "
                f"R={self.symmetry_order} symmetry={self.symmetry_term:.4f} "
                f"total={self.total:.4f}")


def free_energy(ordering: Ordering, structure: SecondaryStructure,
                model: SimpleLoopModel, order: int | None = None) -> EnergyBreakdown:
    """Full free energy including the rotational-symmetry correction."""
    loops = loop_sum(ordering, structure, model)
    association = model.assoc * (ordering.strand_count - 1)
    naive = sat_add(loops, association)
    r = rotational_symmetry(ordering, structure, order=order)
    term = model.symmetry_term(r)
    total = float(naive) + term if naive < INF else float(INF)
    return EnergyBreakdown(loop_sum=loops, association=association,
                           symmetry_order=r, symmetry_term=term, total=total)
