"""Functional envelopes: self-maps under left composition by T.

Maps are represented by tabulation over a finite domain net
(:class:`TabulatedMap`); the uniform metric becomes a finite max, exact for
constants and cylinder permutations, approximate for general tabulations.
The envelope step is left composition, ``phi -> T o phi``.

Provides the constant-map embedding check (separated constants = separated
points, exactly), the staged cylinder-permutation families whose count
drives the log-factorial entropy lower bound, and the power-separation
sampler for the lifted graph map.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .entropy import (
    elementwise_distance,
    pairwise_matrix,
    rho_running,
    sep_from_matrix,
    SepResult,
    DEFAULT_EXACT_THRESHOLD,
)
from .spaces import (
    CantorWord,
    CompactifiedInteger,
    cantor_distance,
    compactified_distance,
    epsilon_net,
    graph_distance,
    solenoid_distance,
)
from .symbolic import ClopenPartition, partition_for
from .systems import ShiftWindow, SystemHandle, sample_points, shift_distance

SPACE_METRICS = {
    "cantor": cantor_distance,
    "fullshift": shift_distance,
    "compactint": compactified_distance,
    "solenoid": solenoid_distance,
    "graph": graph_distance,
}

#: largest m for which all m! permutations are materialized
FULL_FAMILY_CAP = 6


class NetMismatchError(ValueError):
    """Two tabulated maps over different domain nets were compared."""


# ---------------------------------------------------------------------------
# tabulated maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TabulatedMap:
    """A self-map tabulated over a finite domain net.

    kind "constant" additionally stores the constant in ``payload[0]``;
    kind "cylinder-permutation" stores (rule, inverse_rule, descriptor) so
    the bijection and its inverse stay available after tabulation.
    """

    space_id: str
    net: tuple
    values: tuple
    kind: str = "general"
    payload: tuple = ()

    def __post_init__(self):
        if len(self.net) != len(self.values):
            raise ValueError("every net point needs a value")

    @property
    def constant(self):
        if self.kind != "constant":
            raise ValueError("not a constant map")
        return self.payload[0]


def tabulate(space_id: str, net: Sequence, rule: Callable,
             kind: str = "general", payload: tuple = ()) -> TabulatedMap:
    return TabulatedMap(space_id, tuple(net), tuple(rule(x) for x in net),
                        kind, payload)


def constant_map(space_id: str, net: Sequence, x) -> TabulatedMap:
    return TabulatedMap(space_id, tuple(net), (x,) * len(net),
                        "constant", (x,))


def identity_map(space_id: str, net: Sequence) -> TabulatedMap:
    return TabulatedMap(space_id, tuple(net), tuple(net), "general")


def uniform_distance(phi: TabulatedMap, psi: TabulatedMap) -> float:
    """sup over the domain net of the base distance of images.

    Exact for two constants (independent of the net); otherwise the finite
    max over the shared net.
    """
    if phi.space_id != psi.space_id:
        raise NetMismatchError("space mismatch")
    if phi.kind == "constant" and psi.kind == "constant":
        return SPACE_METRICS[phi.space_id](phi.constant, psi.constant)
    if phi.net != psi.net:
        raise NetMismatchError("domain nets differ")
    if not phi.net:
        return 0.0
    return float(elementwise_distance(phi.space_id, phi.values, psi.values).max())


def envelope_step(handle: SystemHandle, phi: TabulatedMap) -> TabulatedMap:
    """Left composition with T: the envelope map F_T(phi) = T o phi.

    Constants stay constant (the embedded copy of the base system); every
    other kind degrades to general.
    """
    values = tuple(handle.step(v) for v in phi.values)
    if phi.kind == "constant":
        return TabulatedMap(phi.space_id, phi.net, values, "constant",
                            (handle.step(phi.constant),))
    return TabulatedMap(phi.space_id, phi.net, values, "general")


def envelope_rho_matrix(handle: SystemHandle, maps: Sequence[TabulatedMap],
                        n: int) -> np.ndarray:
    """Pairwise rho_n matrix of maps in the uniform metric under F_T.

    Constant families collapse to the point computation (the metric
    identification); general families take the running max of per-iterate
    uniform distances.
    """
    maps = list(maps)
    if n < 1:
        raise ValueError("n must be >= 1")
    if all(m.kind == "constant" for m in maps):
        d = None
        for _, mat in rho_running(handle, [m.constant for m in maps], n):
            d = mat
        return d.copy()
    net = maps[0].net
    for m in maps:
        if m.net != net:
            raise NetMismatchError("domain nets differ")
    vals = [list(m.values) for m in maps]
    k = len(maps)
    out = np.zeros((k, k), dtype=np.float32)
    for _ in range(n):
        for i in range(k):
            for j in range(i + 1, k):
                d = float(elementwise_distance(handle.space_id,
                                               vals[i], vals[j]).max())
                if d > out[i, j]:
                    out[i, j] = out[j, i] = d
        vals = [[handle.step(v) for v in col] for col in vals]
    return out


def envelope_sep_count(handle: SystemHandle, maps: Sequence[TabulatedMap],
                       n: int, eps: float,
                       exact_threshold: int = DEFAULT_EXACT_THRESHOLD) -> SepResult:
    return sep_from_matrix(envelope_rho_matrix(handle, maps, n), eps,
                           exact_threshold)


# ---------------------------------------------------------------------------
# constant-map embedding
# ---------------------------------------------------------------------------


def constant_embedding_check(handle: SystemHandle, K: Sequence,
                             ladder: Sequence,
                             exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
                             generic_crosscheck: int = 0) -> dict:
    """Separated-count equality between points under T and constants under F_T.

    The constant fast path realizes the metric identification exactly; with
    ``generic_crosscheck = j > 0`` the first j constants are additionally
    tabulated over the net and pushed through the generic envelope path,
    asserting the same rho_n matrix.
    """
    K = list(K)
    rows = []
    consts = [constant_map(handle.space_id, (), x) for x in K]
    for n, eps in sorted(set(ladder)):
        pres = sep_from_matrix(_rho_final(handle, K, n), eps, exact_threshold)
        eres = envelope_sep_count(handle, consts, n, eps, exact_threshold)
        rows.append({"n": n, "eps": eps, "point_count": pres.count,
                     "envelope_count": eres.count,
                     "equal": pres.count == eres.count})
    ok = all(r["equal"] for r in rows)
    result = {"system": handle.label(), "net_size": len(K),
              "rows": rows, "all_equal": ok}
    if generic_crosscheck > 0:
        j = min(generic_crosscheck, len(K))
        net = tuple(K[:j])
        tab = [tabulate(handle.space_id, net, lambda _x, c=x: c) for x in K[:j]]
        n_max = max(n for n, _ in ladder)
        gen = envelope_rho_matrix(handle, tab, n_max)
        pts = _rho_final(handle, K[:j], n_max)
        result["generic_crosscheck"] = {
            "size": j,
            "max_matrix_gap": float(np.abs(gen - pts).max()),
        }
    return result


def _rho_final(handle: SystemHandle, K: Sequence, n: int) -> np.ndarray:
    d = None
    for _, mat in rho_running(handle, list(K), n):
        d = mat
    return d


# ---------------------------------------------------------------------------
# cylinder-permutation families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomeoFamily:
    members: tuple  # TabulatedMap, kind cylinder-permutation
    provenance: dict

    @property
    def size_exact(self) -> int:
        return self.provenance["size_exact"]

    def verify_identity_composition(self) -> bool:
        """Each member's rule o inverse_rule is the identity on the net."""
        for m in self.members:
            rule, inv, _ = m.payload
            if any(inv(rule(x)) != x or rule(inv(x)) != x for x in m.net):
                return False
        return True


class FamilyParameterError(ValueError):
    """Not enough separated points in one atom (parameters, not a bug)."""


def _shift_block_rule(points: Sequence[ShiftWindow], perm: Sequence[int],
                      radius: int):
    """Swap [-radius, radius] blocks per the permutation; identity off them."""
    width = 2 * radius + 1
    blocks = []
    for p in points:
        lo = p.radius - radius
        blocks.append(p.cells[lo:lo + width])
    table = {blocks[i]: blocks[perm[i]] for i in range(len(points))}

    def rule(w: ShiftWindow) -> ShiftWindow:
        lo = w.radius - radius
        blk = w.cells[lo:lo + width]
        new = table.get(blk)
        if new is None:
            return w
        return ShiftWindow(w.cells[:lo] + new + w.cells[lo + width:],
                           w.fill, w.period)

    return rule, ("shift-block", radius, tuple(blocks))


def _cantor_prefix_rule(points: Sequence[CantorWord], perm: Sequence[int],
                        length: int):
    blocks = [p.bits[:length] for p in points]
    table = {blocks[i]: blocks[perm[i]] for i in range(len(points))}

    def rule(w: CantorWord) -> CantorWord:
        new = table.get(w.bits[:length])
        if new is None:
            return w
        return CantorWord(new + w.bits[length:])

    return rule, ("prefix-block", length, tuple(blocks))


def _isolated_point_rule(points: Sequence[CompactifiedInteger],
                         perm: Sequence[int]):
    table = {points[i]: points[perm[i]] for i in range(len(points))}

    def rule(p: CompactifiedInteger) -> CompactifiedInteger:
        return table.get(p, p)

    return rule, ("isolated-points", tuple(p.value for p in points))


def _distinguishing_radius(points: Sequence[ShiftWindow], start: int) -> int:
    for r in range(start, points[0].radius + 1):
        width = 2 * r + 1
        blocks = {p.cells[p.radius - r:p.radius - r + width] for p in points}
        if len(blocks) == len(points):
            return r
    raise FamilyParameterError("selected windows not distinguished "
                               "within the window radius")


def _distinguishing_prefix(points: Sequence[CantorWord], start: int) -> int:
    for ln in range(start, points[0].depth + 1):
        if len({p.bits[:ln] for p in points}) == len(points):
            return ln
    raise FamilyParameterError("selected words share all prefixes")


def build_permutation_family(handle: SystemHandle, k: int, delta_k: float,
                             n_k: int, eps: Optional[float] = None,
                             K: Optional[Sequence] = None,
                             sample_cap: int = 24,
                             seed: int = 0) -> HomeoFamily:
    """Cylinder-permutation homeomorphisms supported in one partition atom.

    Selects n_k (n_k, eps)-separated points from the working set, pigeonholes
    them into the atoms of the mesh-delta_k partition, takes
    m = n_k // (2 q_k) points from the fullest atom, and returns the
    permutations of those points realized as cylinder swaps (shift / Cantor)
    or isolated-point swaps (compactified integers).  All m! members are
    materialized for m <= 6; above that a seeded sample of ``sample_cap``
    permutations is returned and m! reported analytically.

    eps defaults to 90% of the partition's minimum inter-atom gap (the
    proof's "smallest distance between the atoms", pulled strictly inside).
    """
    part = partition_for(handle, delta_k)
    q_k = part.size
    if n_k < 2 * q_k:
        raise FamilyParameterError(f"need n_k >= 2 q_k = {2 * q_k}")
    if eps is None:
        eps = 0.9 * part.min_gap
    if K is None:
        K = sample_points(handle, max(4 * n_k, 32))
    K = list(K)

    sep = sep_from_matrix(_rho_final(handle, K, n_k), eps)
    if sep.count < n_k:
        raise FamilyParameterError(
            f"only {sep.count} ({n_k},{eps:g})-separated points available")
    chosen = [K[i] for i in sep.indices[:n_k]]

    by_atom: dict = {}
    for p in chosen:
        by_atom.setdefault(part.atom_of(p), []).append(p)
    atom, group = max(by_atom.items(), key=lambda kv: len(kv[1]))
    m = n_k // (2 * q_k)
    if m < 1 or len(group) < m:
        raise FamilyParameterError(
            f"fullest atom holds {len(group)} < m = {m} points")
    targets = group[:m]

    if m <= FULL_FAMILY_CAP:
        perms = list(itertools.permutations(range(m)))
        sampled = False
    else:
        rng = random.Random(seed)
        perms = [tuple(rng.sample(range(m), m)) for _ in range(sample_cap)]
        sampled = True

    members = []
    if handle.space_id == "fullshift":
        radius = _distinguishing_radius(targets, _part_radius(part))
        for perm in perms:
            inv = _invert(perm)
            rule, desc = _shift_block_rule(targets, perm, radius)
            irule, _ = _shift_block_rule(targets, inv, radius)
            members.append(tabulate("fullshift", K, rule,
                                    "cylinder-permutation",
                                    (rule, irule, desc)))
    elif handle.space_id == "cantor":
        length = _distinguishing_prefix(targets, _part_radius(part))
        for perm in perms:
            inv = _invert(perm)
            rule, desc = _cantor_prefix_rule(targets, perm, length)
            irule, _ = _cantor_prefix_rule(targets, inv, length)
            members.append(tabulate("cantor", K, rule,
                                    "cylinder-permutation",
                                    (rule, irule, desc)))
    elif handle.space_id == "compactint":
        for perm in perms:
            inv = _invert(perm)
            rule, desc = _isolated_point_rule(targets, perm)
            irule, _ = _isolated_point_rule(targets, inv)
            members.append(tabulate("compactint", K, rule,
                                    "cylinder-permutation",
                                    (rule, irule, desc)))
    else:
        raise ValueError(f"no family builder for space {handle.space_id!r}")

    family = HomeoFamily(tuple(members), {
        "k": k, "n_k": n_k, "q_k": q_k, "delta_k": delta_k, "eps": eps,
        "atom": atom, "m": m, "size_exact": math.factorial(m),
        "sampled": sampled, "partition": part.label,
    })
    _verify_family(handle, family, delta_k)
    return family


def _part_radius(part: ClopenPartition) -> int:
    """Block radius / prefix length encoded in the partition label."""
    return int(part.label.split(":")[1])


def _invert(perm: Sequence[int]) -> tuple:
    inv = [0] * len(perm)
    for i, v in enumerate(perm):
        inv[v] = i
    return tuple(inv)


def _verify_family(handle: SystemHandle, family: HomeoFamily,
                   delta_k: float) -> None:
    ident = identity_map(handle.space_id, family.members[0].net)
    seen = set()
    for m in family.members:
        if uniform_distance(m, ident) > delta_k + 1e-12:
            raise FamilyParameterError("member strays beyond delta_k")
        seen.add(m.values)
    if len(seen) != len(family.members):
        raise FamilyParameterError("members not pairwise distinct")
    if not family.verify_identity_composition():
        raise FamilyParameterError("member rule/inverse mismatch")


# ---------------------------------------------------------------------------
# entropy lower bound table
# ---------------------------------------------------------------------------


def _log_factorial(m: int) -> float:
    return sum(math.log(i) for i in range(2, m + 1))


def envelope_entropy_lower_bound(stages: Sequence) -> List[dict]:
    """Per-stage log-factorial rate h_k = log(m!)/n_k vs the analytic bound
    (1/4q)(log n - log 4q), with m = n // (2q).  Pure arithmetic; pair with
    build_permutation_family to realize the stages on an actual system.
    """
    rows = []
    for k, delta_k, n_k, q_k in stages:
        if n_k < 2 * q_k:
            raise ValueError(f"stage {k}: need n_k >= 2 q_k")
        m = n_k // (2 * q_k)
        h_k = _log_factorial(m) / n_k
        bound = (math.log(n_k) - math.log(4 * q_k)) / (4 * q_k)
        rows.append({"k": k, "delta_k": delta_k, "n_k": n_k, "q_k": q_k,
                     "m": m, "h_k": h_k, "analytic_bound": bound,
                     "meets_bound": h_k >= bound})
    return rows


# ---------------------------------------------------------------------------
# power separation on the lifted graph map
# ---------------------------------------------------------------------------


def power_separation(model, m: int, n: int, sample_size: int = 200) -> float:
    """Lower bound on the uniform distance between lifted-map powers.

    Samples graph points along the marked composant and takes the max of
    d(Tilde^m z, Tilde^n z); powers act on on-graph samples by parameter
    translation.
    """
    if m == n:
        return 0.0
    worst = 0.0
    for t in _param_grid(sample_size):
        a = model.graph_point(t + m)
        b = model.graph_point(t + n)
        worst = max(worst, graph_distance(a, b))
    return worst


def discreteness_table(model, max_exp: int = 5,
                       sample_size: int = 200) -> dict:
    """power_separation over all pairs |m|, |n| <= max_exp."""
    exps = range(-max_exp, max_exp + 1)
    entries = {}
    for m in exps:
        for n in exps:
            if m < n:
                entries[(m, n)] = power_separation(model, m, n, sample_size)
    positive = all(v > 0 for v in entries.values())
    return {"max_exp": max_exp, "sample_size": sample_size,
            "min_off_diagonal": min(entries.values()),
            "all_positive": positive,
            "pairs": {f"{m},{n}": v for (m, n), v in entries.items()}}


def _param_grid(size: int):
    """Deterministic parameter sample avoiding the marked orbit (integers)."""
    for i in range(size):
        t = -4.0 + 8.0 * (i + 0.5) / size + 0.0137
        if abs(t - round(t)) < 1e-3:
            t += 5e-3
        yield t
