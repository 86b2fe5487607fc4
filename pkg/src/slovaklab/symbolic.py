"""Clopen partitions, names, complexity and the equicontinuity detector.

A :class:`ClopenPartition` is a finite partition into cylinder-style atoms
(prefix cylinders on the Cantor set, central blocks on shift windows,
embedding intervals on the compactified integers).  Names of points under a
system drive the complexity function, the periodic-recurrence test and the
equicontinuity detector.

The detector and the recurrence test are evidence-grade: they return
explicit witnesses and horizons, never bare booleans, because the limit
properties they probe are not decidable from finite data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from .spaces import CantorWord, CompactifiedInteger
from .systems import SystemHandle, ShiftWindow, orbit, sample_points


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClopenPartition:
    """Finite clopen partition given by a total atom-index function.

    ``atom_of`` maps any point of the space to an index in [0, size);
    totality makes the atoms automatically disjoint and covering.  ``mesh``
    is the declared diameter bound of the atoms and ``min_gap`` the declared
    minimum distance between points of distinct atoms (both analytic
    properties of the builders, spot-checked in tests via
    :func:`measured_mesh`).
    """

    space_id: str
    label: str
    size: int
    atom_of: Callable
    mesh: float
    min_gap: float = 0.0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("partition must have at least one atom")


def measured_mesh(part: ClopenPartition, points: Sequence,
                  metric: Callable) -> float:
    """Largest observed same-atom distance over a finite sample."""
    by_atom: dict = {}
    for p in points:
        by_atom.setdefault(part.atom_of(p), []).append(p)
    worst = 0.0
    for group in by_atom.values():
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                worst = max(worst, metric(a, b))
    return worst


def cantor_prefix_partition(prefix_len: int, depth: int) -> ClopenPartition:
    """2**prefix_len prefix cylinders; diameter 2**-prefix_len."""
    if not (1 <= prefix_len <= depth):
        raise ValueError("prefix length out of range")

    def atom_of(w: CantorWord) -> int:
        return sum(b << i for i, b in enumerate(w.bits[:prefix_len]))

    return ClopenPartition("cantor", f"prefix:{prefix_len}", 1 << prefix_len,
                           atom_of, 2.0 ** (-prefix_len),
                           2.0 ** (-(prefix_len - 1)))


def shift_central_partition(radius: int, window_radius: int) -> ClopenPartition:
    """Central-block cylinders on coordinates [-radius, radius].

    Two windows in the same atom agree on the central block, so their
    distance is at most 2**-(radius+1); two in different atoms differ at
    some |i| <= radius, so their distance is at least 2**-radius.
    """
    if radius > window_radius:
        raise ValueError("central block exceeds the window")
    width = 2 * radius + 1

    def atom_of(w: ShiftWindow) -> int:
        lo = w.radius - radius
        return sum(b << i for i, b in enumerate(w.cells[lo:lo + width]))

    return ClopenPartition("fullshift", f"central:{radius}", 1 << width,
                           atom_of, 2.0 ** (-(radius + 1)), 2.0 ** (-radius))


def compactint_partition(k_max: int) -> ClopenPartition:
    """Singletons {-k_max..k_max} plus one tail atom around infinity.

    Atom 0 is the tail {|k| > k_max} + {inf}; atom index for finite k in
    range is k + k_max + 1.  The tail has diameter 2/(k_max+2); singletons
    have diameter 0.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")

    def atom_of(p: CompactifiedInteger) -> int:
        if p.is_infinite or abs(p.value) > k_max:
            return 0
        return p.value + k_max + 1

    mesh = 2.0 / (k_max + 2)
    # closest distinct-atom pair: k_max vs k_max+1 (tail)
    gap = 1.0 / (k_max + 1) - 1.0 / (k_max + 2)
    return ClopenPartition("compactint", f"intatoms:{k_max}",
                           2 * k_max + 2, atom_of, mesh, gap)


def partition_for(handle: SystemHandle, eps: float) -> ClopenPartition:
    """Coarsest builder partition with mesh <= eps for the handle's space."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if handle.space_id == "cantor":
        p = 1
        while 2.0 ** (-p) > eps:
            p += 1
        return cantor_prefix_partition(min(p, handle.depth), handle.depth)
    if handle.space_id == "fullshift":
        r = 0
        while 2.0 ** (-(r + 1)) > eps:
            r += 1
        return shift_central_partition(min(r, handle.depth), handle.depth)
    if handle.space_id == "compactint":
        k = 1
        while 2.0 / (k + 2) > eps:
            k += 1
        return compactint_partition(k)
    raise ValueError(f"no partition builder for space {handle.space_id!r} "
                     "(zero-dimensional spaces only)")


# ---------------------------------------------------------------------------
# names and complexity
# ---------------------------------------------------------------------------


def p_name(handle: SystemHandle, x, part: ClopenPartition, n: int) -> tuple:
    """(atom(x), atom(Tx), ..., atom(T**(n-1) x))."""
    if part.space_id != handle.space_id:
        raise ValueError("partition/system space mismatch")
    return tuple(part.atom_of(p) for p in orbit(handle, x, n))


@dataclass(frozen=True)
class LanguageSource:
    """A supplier of length-n names for the complexity function."""

    label: str
    names: Callable  # n -> iterable of tuples


def system_language(handle: SystemHandle, part: ClopenPartition,
                    sample: Optional[Sequence] = None,
                    sample_size: int = 256) -> LanguageSource:
    """Names observed along a deterministic sample of starting points."""
    pts = list(sample) if sample is not None else sample_points(handle, sample_size)

    def names(n: int):
        return {p_name(handle, x, part, n) for x in pts}

    return LanguageSource(f"{handle.label()}/{part.label}", names)


def factor_language(factors: Callable, label: str) -> LanguageSource:
    """Wrap a factor enumerator (e.g. Sturmian factors) as a source."""
    return LanguageSource(label, lambda n: set(factors(n)))


def complexity(source: LanguageSource, n: int) -> int:
    """Number of distinct length-n names the source exhibits."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return len(set(source.names(n)))


# ---------------------------------------------------------------------------
# periodic recurrence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceVerdict:
    kind: str  # "yes-witnessed" | "no-witnessed" | "inconclusive"
    eps: float
    horizon: int
    period: Optional[int] = None
    escapes: dict = field(default_factory=dict)  # k -> first escaping multiple

    def __str__(self) -> str:
        if self.kind == "yes-witnessed":
            return f"yes-witnessed(k={self.period})"
        return self.kind


def is_periodically_recurrent(handle: SystemHandle, x, eps: float,
                              horizon: int = 256) -> RecurrenceVerdict:
    """Three-valued test for returns of x along an arithmetic progression.

    yes-witnessed(k): all multiples k*m <= horizon land strictly within eps
    of x (smallest such k <= horizon reported).  no-witnessed: every
    k <= sqrt(horizon) has an escaping multiple (reported).  Otherwise
    inconclusive.
    """
    if eps <= 0 or horizon < 1:
        raise ValueError("need eps > 0 and horizon >= 1")
    pts = orbit(handle, x, horizon + 1)  # pts[j] = T**j x
    within = [handle.metric(x, p) < eps for p in pts]
    for k in range(1, horizon + 1):
        if all(within[k * m] for m in range(1, horizon // k + 1)):
            return RecurrenceVerdict("yes-witnessed", eps, horizon, period=k)
    escapes = {}
    sqrt_h = int(math.isqrt(horizon))
    for k in range(1, sqrt_h + 1):
        esc = next((k * m for m in range(1, horizon // k + 1)
                    if not within[k * m]), None)
        if esc is None:
            return RecurrenceVerdict("inconclusive", eps, horizon)
        escapes[k] = esc
    return RecurrenceVerdict("no-witnessed", eps, horizon, escapes=escapes)


# ---------------------------------------------------------------------------
# equicontinuity detector
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetectorVerdict:
    kind: str  # "equicontinuous-evidence" | "not-equicontinuous"
    horizon: int
    counts: dict  # eps -> (c(horizon//2), c(horizon))
    witness: Optional[ClopenPartition] = None

    def __str__(self) -> str:
        if self.witness is not None:
            return f"not-equicontinuous(witness={self.witness.label})"
        return self.kind


def equicontinuity_detector(handle: SystemHandle,
                            mesh_ladder: Sequence[float] = (0.5, 0.25),
                            horizon: int = 12,
                            sample_size: int = 256) -> DetectorVerdict:
    """Name-count growth test over a ladder of partition meshes.

    For each mesh, counts distinct names at lengths horizon//2 and horizon
    over a deterministic sample.  Stable counts at every mesh are evidence
    of equicontinuity; a count still growing at full length yields a
    not-equicontinuous verdict with the witnessing partition.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    counts: dict = {}
    witness = None
    pts = sample_points(handle, sample_size)
    for eps in mesh_ladder:
        part = partition_for(handle, eps)
        names = [p_name(handle, x, part, horizon) for x in pts]
        c_half = len({nm[:horizon // 2] for nm in names})
        c_full = len(set(names))
        counts[eps] = (c_half, c_full)
        if c_full > c_half and witness is None:
            witness = part
    kind = "not-equicontinuous" if witness else "equicontinuous-evidence"
    return DetectorVerdict(kind, horizon, counts, witness)
