"""Exhaustive reference enumeration for small systems.

Everything here is deliberately independent of the dynamic program: its
own recursion, its own connectivity bookkeeping, its own filters.  It
exists so the optimized code has something honest to be checked against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .energy import (INF, ComplementRule, EnergyBreakdown, SimpleLoopModel,
                     free_energy, naive_free_energy)
from .errors import EnumerationCapError, InfeasibleError
from .strands import Ordering, StrandSystem, circular_permutations, symmetry_profile
from .structures import SecondaryStructure

HARD_MAX_N = 24


@dataclass(frozen=True)
class EnumerationConfig:
    max_n: int = 18
    max_structures: int = 2_000_000

    def __post_init__(self) -> None:
        if self.max_n > HARD_MAX_N:
            raise ValueError(f"max_n above the hard limit {HARD_MAX_N}")


DEFAULT_CONFIG = EnumerationConfig()


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise EnumerationCapError("structure enumeration budget exhausted")


def _comp_table(ordering: Ordering, rule: ComplementRule) -> list[list[bool]]:
    n = ordering.length
    seq = ordering.sequence
    return [[False] * (n + 1)] + [
        [False] + [rule.complementary(seq[a - 1], seq[b - 1]) for b in range(1, n + 1)]
        for a in range(1, n + 1)
    ]


def _hairpins_ok(pairs: list[tuple[int, int]], ordering: Ordering,
                 min_hairpin: int) -> bool:
    """Every pair with nothing inside must enclose enough nick-free room."""
    for a, b in pairs:
        if b - a - 1 >= min_hairpin:
            continue
        if ordering.nick_count(a, b - 1) > 0:
            continue
        if any(a < x < b for p in pairs for x in p):
            continue
        return False
    return True


def _connected(pairs: list[tuple[int, int]], strand_of: list[int], c: int) -> bool:
    if c == 1:
        return True
    root = list(range(c))

    def find(x: int) -> int:
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    merged = 0
    for a, b in pairs:
        ra, rb = find(strand_of[a]), find(strand_of[b])
        if ra != rb:
            root[ra] = rb
            merged += 1
    return merged == c - 1


def enumerate_structures(ordering: Ordering, rule: ComplementRule,
                         min_hairpin: int = 3, connected_only: bool = True,
                         config: EnumerationConfig = DEFAULT_CONFIG):
    """Yield every admissible structure exactly once.

    Admissible: complementary non-crossing pairs, tight loops forbidden,
    and (by default) all strands linked into one complex.
    """
    n = ordering.length
    if n > config.max_n:
        raise EnumerationCapError(
            f"ordering has {n} bases; enumeration is capped at {config.max_n}")
    comp = _comp_table(ordering, rule)
    strand_of = [0] + [ordering.strand_index(g) for g in range(1, n + 1)]
    c = ordering.strand_count
    budget = _Budget(config.max_structures)

    def gen(i: int, j: int):
        # all non-crossing complementary pair sets on [i, j]
        if j <= i:
            yield []
            return
        yield from gen(i, j - 1)
        for d in range(i, j):
            if not comp[d][j]:
                continue
            for left in gen(i, d - 1):
                for right in gen(d + 1, j - 1):
                    yield left + [(d, j)] + right

    for pairs in gen(1, n):
        if not _hairpins_ok(pairs, ordering, min_hairpin):
            continue
        if connected_only and not _connected(pairs, strand_of, c):
            continue
        budget.spend()
        yield SecondaryStructure(n, pairs)


def enumerate_structures_subsets(ordering: Ordering, rule: ComplementRule,
                                 min_hairpin: int = 3, connected_only: bool = True,
                                 max_candidate_pairs: int = 20):
    """Same admissible set, built by filtering subsets of candidate pairs.

    Exponential in the candidate-pair count; a cross-check for the
    recursive enumerator on tiny inputs only.
    """
    n = ordering.length
    comp = _comp_table(ordering, rule)
    candidates = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)
                  if comp[a][b]]
    if len(candidates) > max_candidate_pairs:
        raise EnumerationCapError(
            f"{len(candidates)} candidate pairs; subset filter is capped at "
            f"{max_candidate_pairs}")
    strand_of = [0] + [ordering.strand_index(g) for g in range(1, n + 1)]
    c = ordering.strand_count

    def crossing(pairs: list[tuple[int, int]]) -> bool:
        for idx, (a, b) in enumerate(pairs):
            for a2, b2 in pairs[idx + 1:]:
                if a < a2 < b < b2 or a2 < a < b2 < b:
                    return True
        return False

    for mask in range(1 << len(candidates)):
        pairs = [candidates[k] for k in range(len(candidates)) if mask >> k & 1]
        used = [x for p in pairs for x in p]
        if len(used) != len(set(used)):
            continue
        if crossing(pairs):
            continue
        if not _hairpins_ok(pairs, ordering, min_hairpin):
            continue
        if connected_only and not _connected(pairs, strand_of, c):
            continue
        yield SecondaryStructure(n, pairs)


def brute_snmfe(ordering: Ordering, model: SimpleLoopModel, rule: ComplementRule,
                config: EnumerationConfig = DEFAULT_CONFIG
                ) -> tuple[int, SecondaryStructure | None]:
    """Minimum symmetry-ignoring energy over connected structures.

    Returns (INF, None) when no connected structure exists.
    """
    best = INF
    witness = None
    for s in enumerate_structures(ordering, rule, model.min_hairpin,
                                  connected_only=True, config=config):
        e = naive_free_energy(ordering, s, model)
        if e < best:
            best, witness = e, s
    return best, witness


@dataclass(frozen=True)
class BruteResult:
    total: float
    ordering: Ordering
    structure: SecondaryStructure
    breakdown: EnergyBreakdown


def brute_mfe(system: StrandSystem, model: SimpleLoopModel, rule: ComplementRule,
              config: EnumerationConfig = DEFAULT_CONFIG) -> BruteResult:
    """True minimum free energy over all orderings, symmetry penalty included."""
    best: BruteResult | None = None
    for ordering in circular_permutations(system):
        order = symmetry_profile(ordering).order
        for s in enumerate_structures(ordering, rule, model.min_hairpin,
                                      connected_only=True, config=config):
            bd = free_energy(ordering, s, model, order=order)
            if best is None or bd.total < best.total:
                best = BruteResult(total=bd.total, ordering=ordering,
                                   structure=s, breakdown=bd)
    if best is None:
        raise InfeasibleError("no connected secondary structure exists")
    return best
