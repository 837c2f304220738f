"""Minimum free energy tables for one circular strand ordering.

The fill sweeps every base range and records the best energy of a
connected assembly on it, of a fragment closed by a pair, and of a
partial multiloop.  Optional restriction tensors remember placement
minima at every cutoff so a search can peel candidate loops off a
range later without rescanning it.  Two engines produce identical
tables: a portable one that asks the model for every loop energy, and
a compiled one specialized to SimpleLoopModel.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .energy import INF, ComplementRule, SimpleLoopModel, sat_add
from .errors import SymfoldError
from .strands import Ordering


@dataclass
class DPState:
    """Filled energy tables for one ordering under one parameter set.

    ``W[i, j]`` is the best energy over structures on bases ``i..j``
    that leave the fragment in one piece, ``V[i, j]`` the best given
    that ``i`` pairs with ``j`` (INF when they cannot pair), and
    ``WM[i, j]`` the best nonempty multiloop part, charged per pair
    and per unpaired base but without the closing initiation.
    Indexing is 1-based; the empty diagonal ``W[i, i-1]`` is 0.

    ``VI[i, j, k]`` and ``VM[i, j, k]`` restrict the interior and
    multiloop placements under a closing pair (i, j) to inner pairs
    ending at or before ``k``; ``WM2[i, j, k]`` restricts multiloop
    parts with two or more pairs to a final pair ending at or before
    ``k``.  All three are monotone nonincreasing in ``k`` and are
    ``None`` when the fill was asked to skip them.
    """

    ordering: Ordering
    model: SimpleLoopModel
    rule: ComplementRule
    W: np.ndarray
    V: np.ndarray
    WM: np.ndarray
    VI: np.ndarray | None = None
    VM: np.ndarray | None = None
    WM2: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.ordering.length

    @property
    def has_aux(self) -> bool:
        return self.VI is not None


def _comp_matrix(ordering: Ordering, rule: ComplementRule) -> np.ndarray:
    n = ordering.length
    seq = ordering.sequence
    comp = np.zeros((n + 1, n + 1), dtype=np.uint8)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if rule.complementary(seq[i - 1], seq[j - 1]):
                comp[i, j] = 1
    return comp


def _nick_prefix(ordering: Ordering) -> np.ndarray:
    # pref[g] = number of interior nicks among gaps 1..g
    marks = np.zeros(ordering.length + 1, dtype=np.int64)
    for g in ordering.interior_nicks():
        marks[g] = 1
    return np.cumsum(marks)


def _hairpin_table(ordering: Ordering, model) -> np.ndarray:
    n = ordering.length
    hp = np.full((n + 1, n + 1), INF, dtype=np.int64)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            hp[i, j] = model.hairpin_energy(i, j)
    return hp


def fill(ordering: Ordering, model, rule: ComplementRule,
         with_aux: bool = True, engine: str = "auto") -> DPState:
    """Fill all tables for one ordering.

    ``engine`` picks the implementation: "fast" requires a
    SimpleLoopModel, "generic" accepts any model exposing
    hairpin_energy, interior_energy, and the three multi_* fields,
    "auto" uses the fast path whenever it applies.  ``with_aux=False``
    drops the three restriction tensors, shrinking memory from one
    cell per (i, j, k) triple to one per (i, j) pair.
    """
    n = ordering.length
    W = np.full((n + 2, n + 2), INF, dtype=np.int64)
    V = np.full((n + 2, n + 2), INF, dtype=np.int64)
    WM = np.full((n + 2, n + 2), INF, dtype=np.int64)
    if with_aux:
        VI = np.full((n + 1, n + 1, n + 1), INF, dtype=np.int64)
        VM = np.full((n + 1, n + 1, n + 1), INF, dtype=np.int64)
        WM2 = np.full((n + 1, n + 1, n + 1), INF, dtype=np.int64)
    else:
        VI = VM = WM2 = None

    if engine == "auto":
        engine = "fast" if isinstance(model, SimpleLoopModel) else "generic"
    if engine == "fast":
        if not isinstance(model, SimpleLoopModel):
            raise ValueError("the fast engine only handles SimpleLoopModel")
        dummy = np.zeros((1, 1, 1), dtype=np.int64)
        _get_kernel()(
            n, _comp_matrix(ordering, rule), _hairpin_table(ordering, model),
            _nick_prefix(ordering), model.stack, model.interior_base,
            model.interior_per_nt, model.multi_init, model.multi_bp,
            model.multi_nt, W, V, WM,
            VI if with_aux else dummy, VM if with_aux else dummy,
            WM2 if with_aux else dummy, with_aux)
    elif engine == "generic":
        _fill_generic(ordering, model, _comp_matrix(ordering, rule),
                      W, V, WM, VI, VM, WM2)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return DPState(ordering=ordering, model=model, rule=rule,
                   W=W, V=V, WM=WM, VI=VI, VM=VM, WM2=WM2)


def _fill_generic(ordering, model, comp, W, V, WM, VI, VM, WM2) -> None:
    n = ordering.length
    nc = ordering.nick_count
    nick = ordering.is_nick
    mi, mbp, mnt = model.multi_init, model.multi_bp, model.multi_nt
    for i in range(1, n + 2):
        W[i, i - 1] = 0
    for l in range(1, n + 1):
        for i in range(1, n - l + 2):
            j = i + l - 1
            nick_free = nc(i, j - 1) == 0
            cij = bool(comp[i, j])
            best_v = model.hairpin_energy(i, j) if cij and nick_free else INF

            # inner pair (d, e) closing an interior loop or finishing a
            # multiloop under (i, j); minima roll over growing e
            min_int = INF
            min_mul = INF
            for e in range(i + 2, j):
                for d in range(i + 1, e):
                    if nc(e, j - 1) == 0:
                        if nc(i, d - 1) == 0:
                            cand = sat_add(int(V[d, e]),
                                           model.interior_energy(i, d, e, j))
                            if cand < min_int:
                                min_int = cand
                        if not nick(i) and not nick(d - 1):
                            cand = sat_add(int(WM[i + 1, d - 1]), int(V[d, e]),
                                           mi + 2 * mbp + mnt * (j - e - 1))
                            if cand < min_mul:
                                min_mul = cand
                if VI is not None:
                    VI[i, j, e] = min_int
                    VM[i, j, e] = min_mul

            if cij:
                best_v = min(best_v, min_int, min_mul)
                # the pair may instead close across a nick at gap x; the
                # face then carries exactly that one nick
                for x in range(i, j):
                    if not nick(x):
                        continue
                    if ((not nick(i) and not nick(j - 1)) or i == j - 1
                            or (x == i and not nick(j - 1))
                            or (x == j - 1 and not nick(i))):
                        cand = sat_add(int(W[i + 1, x]), int(W[x + 1, j - 1]))
                        if cand < best_v:
                            best_v = cand
                V[i, j] = best_v

            best_w = 0 if nick_free else INF
            best_wm = INF
            min_m2 = INF
            for e in range(i + 1, j + 1):
                if nc(e, j - 1) == 0:
                    for d in range(i, e):
                        vde = int(V[d, e])
                        # (d, e) is the rightmost pair; tail e+1..j unpaired
                        if d == i or not nick(d - 1):
                            cand = sat_add(int(W[i, d - 1]), vde)
                            if cand < best_w:
                                best_w = cand
                        if nc(i, d - 1) == 0:
                            cand = sat_add(vde, mbp + mnt * ((d - i) + (j - e)))
                            if cand < best_wm:
                                best_wm = cand
                        if not nick(d - 1):
                            cand = sat_add(int(WM[i, d - 1]), vde,
                                           mbp + mnt * (j - e))
                            if cand < best_wm:
                                best_wm = cand
                            if cand < min_m2:
                                min_m2 = cand
                if WM2 is not None:
                    WM2[i, j, e] = min_m2
            W[i, j] = best_w
            WM[i, j] = best_wm


_KERNEL = None


def _get_kernel():
    global _KERNEL
    if _KERNEL is None:
        from numba import njit

        @njit(cache=True, nogil=True)
        def kern(n, comp, hp, pref, stack_e, int_base, int_nt, mi, mbp, mnt,
                 W, V, WM, VI, VM, WM2, want_aux):
            for i in range(1, n + 2):
                W[i, i - 1] = 0
            for l in range(1, n + 1):
                for i in range(1, n - l + 2):
                    j = i + l - 1
                    n_ij = pref[j - 1] - pref[i - 1]
                    cij = comp[i, j] != 0
                    best_v = INF
                    if cij and n_ij == 0:
                        best_v = hp[i, j]
                    min_int = INF
                    min_mul = INF
                    for e in range(i + 2, j):
                        tail_ok = pref[j - 1] - pref[e - 1] == 0
                        if tail_ok:
                            for d in range(i + 1, e):
                                vde = V[d, e]
                                if vde >= INF:
                                    continue
                                if pref[d - 1] - pref[i - 1] == 0:
                                    s1 = d - i - 1
                                    s2 = j - e - 1
                                    if s1 == 0 and s2 == 0:
                                        le = stack_e
                                    else:
                                        le = int_base + int_nt * (s1 + s2)
                                    cand = vde + le
                                    if cand < min_int:
                                        min_int = cand
                                if (pref[i] - pref[i - 1] == 0
                                        and pref[d - 1] - pref[d - 2] == 0):
                                    wmv = WM[i + 1, d - 1]
                                    if wmv < INF:
                                        cand = (wmv + vde + mi + 2 * mbp
                                                + mnt * (j - e - 1))
                                        if cand < min_mul:
                                            min_mul = cand
                        if want_aux:
                            VI[i, j, e] = min_int
                            VM[i, j, e] = min_mul
                    if cij:
                        if min_int < best_v:
                            best_v = min_int
                        if min_mul < best_v:
                            best_v = min_mul
                        ni_flank = pref[i] - pref[i - 1]
                        nj_flank = pref[j - 1] - pref[j - 2] if j >= 2 else 0
                        for x in range(i, j):
                            if pref[x] - pref[x - 1] == 0:
                                continue
                            if ((ni_flank == 0 and nj_flank == 0) or i == j - 1
                                    or (x == i and nj_flank == 0)
                                    or (x == j - 1 and ni_flank == 0)):
                                wl = W[i + 1, x]
                                wr = W[x + 1, j - 1]
                                if wl < INF and wr < INF:
                                    cand = wl + wr
                                    if cand < best_v:
                                        best_v = cand
                        V[i, j] = best_v
                    best_w = INF
                    if n_ij == 0:
                        best_w = 0
                    best_wm = INF
                    min_m2 = INF
                    for e in range(i + 1, j + 1):
                        tail_ok = pref[j - 1] - pref[e - 1] == 0
                        if tail_ok:
                            for d in range(i, e):
                                vde = V[d, e]
                                if vde >= INF:
                                    continue
                                if d == i:
                                    if vde < best_w:
                                        best_w = vde
                                elif pref[d - 1] - pref[d - 2] == 0:
                                    wl = W[i, d - 1]
                                    if wl < INF:
                                        cand = wl + vde
                                        if cand < best_w:
                                            best_w = cand
                                if pref[d - 1] - pref[i - 1] == 0:
                                    cand = vde + mbp + mnt * ((d - i) + (j - e))
                                    if cand < best_wm:
                                        best_wm = cand
                                if (d >= i + 2
                                        and pref[d - 1] - pref[d - 2] == 0):
                                    wmv = WM[i, d - 1]
                                    if wmv < INF:
                                        cand = wmv + vde + mbp + mnt * (j - e)
                                        if cand < best_wm:
                                            best_wm = cand
                                        if cand < min_m2:
                                            min_m2 = cand
                        if want_aux:
                            WM2[i, j, e] = min_m2
                    W[i, j] = best_w
                    WM[i, j] = best_wm

        _KERNEL = kern
    return _KERNEL


def snmfe(dp: DPState) -> int:
    """Best total energy ignoring rotational symmetry, INF if none exists."""
    o = dp.ordering
    return sat_add(int(dp.W[1, o.length]),
                   dp.model.assoc * (o.strand_count - 1))


_AUX_RANGES = {
    "b:int": (2, -1),
    "b:mul": (2, -1),
    "m:2": (1, 0),
}


def aux_lookup(dp: DPState, kind: str, i: int, j: int, k: int) -> int:
    """Read one restriction tensor cell with its range contract enforced.

    ``kind`` selects the tensor: "b:int" and "b:mul" hold placement
    minima under a closing pair and accept i+2 <= k <= j-1; "m:2"
    holds multiloop chain minima and accepts i+1 <= k <= j.
    """
    if kind not in _AUX_RANGES:
        raise ValueError(f"unknown restriction kind {kind!r}")
    if not dp.has_aux:
        raise ValueError("tables were filled without restriction tensors")
    lo_off, hi_off = _AUX_RANGES[kind]
    if not (1 <= i <= j <= dp.n):
        raise ValueError(f"range ({i}, {j}) outside 1..{dp.n}")
    if not (i + lo_off <= k <= j + hi_off):
        raise ValueError(
            f"cutoff {k} outside [{i + lo_off}, {j + hi_off}] for {kind!r}")
    tensor = dp.VI if kind == "b:int" else dp.VM if kind == "b:mul" else dp.WM2
    return int(tensor[i, j, k])


def _state_key(ordering: Ordering, model, rule: ComplementRule,
               with_aux: bool) -> str:
    text = "|".join([
        ordering.sequence,
        ",".join(ordering.type_names),
        ",".join(map(str, ordering.interior_nicks())),
        repr(rule),
        repr(model),
        f"aux={with_aux}",
    ])
    return hashlib.sha256(text.encode()).hexdigest()


def save_state(dp: DPState, path: str) -> None:
    """Write the filled tables to ``path`` as a compressed archive."""
    arrays = {"W": dp.W, "V": dp.V, "WM": dp.WM}
    if dp.has_aux:
        arrays.update(VI=dp.VI, VM=dp.VM, WM2=dp.WM2)
    key = _state_key(dp.ordering, dp.model, dp.rule, dp.has_aux)
    np.savez_compressed(path, key=np.array(key), **arrays)


def load_state(path: str, ordering: Ordering, model,
               rule: ComplementRule) -> DPState:
    """Reload tables saved by save_state, refusing a stale archive.

    The archive records a fingerprint of the ordering, model, and
    pairing rule it was built from; any mismatch raises rather than
    returning tables for the wrong inputs.
    """
    with np.load(path) as data:
        arrays = {name: data[name] for name in data.files if name != "key"}
        stored = str(data["key"])
    with_aux = "VI" in arrays
    expect = _state_key(ordering, model, rule, with_aux)
    if stored != expect:
        raise SymfoldError(
            "cached tables were built for different inputs; refill instead")
    return DPState(ordering=ordering, model=model, rule=rule,
                   W=arrays["W"], V=arrays["V"], WM=arrays["WM"],
                   VI=arrays.get("VI"), VM=arrays.get("VM"),
                   WM2=arrays.get("WM2"))
