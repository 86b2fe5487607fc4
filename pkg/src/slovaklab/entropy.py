"""(n, eps)-separated-set counting and entropy-rate estimation.

``rho_n`` is the Bowen metric: the max of the base distance along the first
n iterates.  ``sep_count`` computes the maximal cardinality of an
(n, eps)-separated subset (strict inequality) of a finite set, exactly via
the branch-and-bound kernel up to ``exact_threshold`` points and greedily
(flagged) above it.  ``entropy_estimate`` assembles a
:class:`SeparationReport` over an (n, eps) ladder with a least-squares
rate extrapolation per eps.

Pairwise base-distance matrices are computed by vectorized per-space
kernels so the hot loop stays in numpy / the compiled kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from . import sepkernel
from .spaces import compactified_phi
from .systems import SystemHandle

DEFAULT_EXACT_THRESHOLD = 4096


class InvariantViolation(AssertionError):
    """A report row broke a monotonicity or certificate invariant."""


# ---------------------------------------------------------------------------
# vectorized pairwise base distances
# ---------------------------------------------------------------------------


def _prefix_block(codes_a: np.ndarray, codes_b: np.ndarray) -> np.ndarray:
    """2**-(trailing zeros of xor), 0 on equality.

    Works for any encoding where the k-th compared symbol sits at bit k:
    the lowest set xor bit is 2**k and the distance is its reciprocal.
    """
    x = codes_a[:, None] ^ codes_b[None, :]
    low = (x & (np.uint64(0) - x)).astype(np.float64)
    with np.errstate(divide="ignore"):
        d = np.where(x == 0, 0.0, 1.0 / low)
    return d.astype(np.float32)


def _encode_cantor(points) -> np.ndarray:
    return np.array([w.to_int() for w in points], dtype=np.uint64)


def _pairwise_cantor(points) -> np.ndarray:
    c = _encode_cantor(points)
    return _prefix_block(c, c)


_SHIFT_QMAP: dict = {}


def _shift_qmap(radius: int) -> np.ndarray:
    """Bit position per cell so that lower xor bits mean coordinates closer
    to 0:  coord 0 -> bit 0, coord -i -> bit 2i-1, coord +i -> bit 2i."""
    if radius not in _SHIFT_QMAP:
        q = np.empty(2 * radius + 1, dtype=np.int64)
        for cell in range(2 * radius + 1):
            i = cell - radius
            q[cell] = 0 if i == 0 else (2 * i if i > 0 else -2 * i - 1)
        _SHIFT_QMAP[radius] = q
    return _SHIFT_QMAP[radius]


def _encode_shift(points) -> Tuple[np.ndarray, int]:
    radius = points[0].radius
    qmap = _shift_qmap(radius)
    cells = np.array([p.cells for p in points], dtype=np.uint64)
    codes = np.zeros(len(points), dtype=np.uint64)
    for cell in range(2 * radius + 1):
        codes |= cells[:, cell] << np.uint64(qmap[cell])
    return codes, radius


def _pairwise_shift(points) -> np.ndarray:
    codes, _ = _encode_shift(points)
    x = codes[:, None] ^ codes[None, :]
    low = (x & (np.uint64(0) - x)).astype(np.float64)
    with np.errstate(divide="ignore"):
        q = np.floor(np.log2(low, where=x != 0, out=np.zeros_like(low)))
    k = np.ceil(q / 2.0)  # bit q maps back to |coord| = ceil(q/2)
    d = np.where(x == 0, 0.0, np.exp2(-k))
    return d.astype(np.float32)


def _pairwise_compactint(points) -> np.ndarray:
    phi = np.array([compactified_phi(p) for p in points], dtype=np.float64)
    return np.abs(phi[:, None] - phi[None, :]).astype(np.float32)


def _pairwise_solenoid(points) -> np.ndarray:
    depth = points[0].depth
    codes = np.array([p.base.to_int() for p in points], dtype=np.uint64)
    hcodes = (codes + np.uint64(1)) & np.uint64((1 << depth) - 1)
    s = np.array([float(p.s) for p in points], dtype=np.float32)
    d0 = _prefix_block(codes, codes)
    dh = _prefix_block(hcodes, codes)  # dh[i, j] = cantor(h(b_i), b_j)
    direct = np.abs(s[:, None] - s[None, :]) + d0
    fwd = (1.0 - s[:, None] + s[None, :]) + dh
    bwd = (1.0 - s[None, :] + s[:, None]) + dh.T
    return np.minimum(direct, np.minimum(fwd, bwd)).astype(np.float32)


def _pairwise_graph(points) -> np.ndarray:
    base = _pairwise_solenoid([g.x for g in points])
    v = np.array([g.v for g in points], dtype=np.float32)
    return np.maximum(base, np.abs(v[:, None] - v[None, :]))


_PAIRWISE = {
    "cantor": _pairwise_cantor,
    "fullshift": _pairwise_shift,
    "compactint": _pairwise_compactint,
    "solenoid": _pairwise_solenoid,
    "graph": _pairwise_graph,
}


def pairwise_matrix(space_id: str, points: Sequence) -> np.ndarray:
    """Symmetric float32 matrix of base distances."""
    try:
        kernel = _PAIRWISE[space_id]
    except KeyError:
        raise ValueError(f"no pairwise kernel for space {space_id!r}") from None
    return kernel(list(points))


def _prefix_elem(codes_a: np.ndarray, codes_b: np.ndarray) -> np.ndarray:
    x = codes_a ^ codes_b
    low = (x & (np.uint64(0) - x)).astype(np.float64)
    with np.errstate(divide="ignore"):
        return np.where(x == 0, 0.0, 1.0 / low).astype(np.float32)


def elementwise_distance(space_id: str, a_points: Sequence,
                         b_points: Sequence) -> np.ndarray:
    """Vector of base distances d(a_i, b_i) (same-length sequences)."""
    a, b = list(a_points), list(b_points)
    if len(a) != len(b):
        raise ValueError("length mismatch")
    if space_id == "cantor":
        return _prefix_elem(_encode_cantor(a), _encode_cantor(b))
    if space_id == "fullshift":
        ca, _ = _encode_shift(a)
        cb, _ = _encode_shift(b)
        x = ca ^ cb
        low = (x & (np.uint64(0) - x)).astype(np.float64)
        with np.errstate(divide="ignore"):
            q = np.floor(np.log2(low, where=x != 0, out=np.zeros_like(low)))
        return np.where(x == 0, 0.0, np.exp2(-np.ceil(q / 2.0))).astype(np.float32)
    if space_id == "compactint":
        pa = np.array([compactified_phi(p) for p in a])
        pb = np.array([compactified_phi(p) for p in b])
        return np.abs(pa - pb).astype(np.float32)
    if space_id == "solenoid":
        depth = a[0].depth
        mask = np.uint64((1 << depth) - 1)
        ca = np.array([p.base.to_int() for p in a], dtype=np.uint64)
        cb = np.array([p.base.to_int() for p in b], dtype=np.uint64)
        sa = np.array([float(p.s) for p in a], dtype=np.float32)
        sb = np.array([float(p.s) for p in b], dtype=np.float32)
        direct = np.abs(sa - sb) + _prefix_elem(ca, cb)
        fwd = (1.0 - sa + sb) + _prefix_elem((ca + np.uint64(1)) & mask, cb)
        bwd = (1.0 - sb + sa) + _prefix_elem((cb + np.uint64(1)) & mask, ca)
        return np.minimum(direct, np.minimum(fwd, bwd))
    if space_id == "graph":
        base = elementwise_distance("solenoid", [g.x for g in a], [g.x for g in b])
        va = np.array([g.v for g in a], dtype=np.float32)
        vb = np.array([g.v for g in b], dtype=np.float32)
        return np.maximum(base, np.abs(va - vb))
    raise ValueError(f"no elementwise kernel for space {space_id!r}")


# ---------------------------------------------------------------------------
# Bowen metric
# ---------------------------------------------------------------------------


def rho_n(handle: SystemHandle, x, y, n: int) -> float:
    """max of the base distance over the first n iterates (n >= 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    best = 0.0
    for _ in range(n):
        best = max(best, handle.metric(x, y))
        x = handle.step(x)
        y = handle.step(y)
    return best


def rho_running(handle: SystemHandle, points: Sequence, n_max: int):
    """Yield (n, D) for n = 1..n_max where D is the running rho_n matrix.

    D is updated in place; snapshot it if you need to keep a copy.
    """
    pts = list(points)
    d = pairwise_matrix(handle.space_id, pts)
    yield 1, d
    for n in range(2, n_max + 1):
        pts = [handle.step(p) for p in pts]
        np.maximum(d, pairwise_matrix(handle.space_id, pts), out=d)
        yield n, d


# ---------------------------------------------------------------------------
# separated sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SepResult:
    count: int
    exact: bool
    indices: tuple

    def verify_pairwise(self, dist: np.ndarray, eps: float) -> bool:
        """Certificate: the returned subset is pairwise separated."""
        idx = np.array(self.indices, dtype=np.intp)
        if len(idx) <= 1:
            return True
        sub = dist[np.ix_(idx, idx)]
        np.fill_diagonal(sub, np.inf)
        return bool((sub > eps).all())


def sep_from_matrix(dist: np.ndarray, eps: float,
                    exact_threshold: int = DEFAULT_EXACT_THRESHOLD) -> SepResult:
    adj = dist > eps
    n = adj.shape[0]
    if n <= exact_threshold:
        idx = sepkernel.max_separated_indices(adj)
        res = SepResult(len(idx), True, tuple(idx))
    else:
        idx = sepkernel.greedy_separated_indices(adj)
        res = SepResult(len(idx), False, tuple(idx))
    if not res.verify_pairwise(dist, eps):
        raise InvariantViolation("returned subset is not pairwise separated")
    return res


def sep_count(handle: SystemHandle, K: Sequence, n: int, eps: float,
              exact_threshold: int = DEFAULT_EXACT_THRESHOLD) -> SepResult:
    """Maximal cardinality of an (n, eps)-separated subset of K.

    Exact (branch and bound) for |K| <= exact_threshold; greedy lower bound
    above it, flagged via ``exact=False``.
    """
    if len(K) == 0:
        raise ValueError("K must be nonempty")
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = None
    for m, mat in rho_running(handle, K, n):
        d = mat
    return sep_from_matrix(d, eps, exact_threshold)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SepRow:
    n: int
    eps: float
    count: int
    exact: bool

    @property
    def rate(self) -> float:
        return math.log(self.count) / self.n


@dataclass
class SeparationReport:
    rows: List[SepRow]
    rates: dict
    metadata: dict = field(default_factory=dict)

    def check_invariants(self) -> None:
        """Counts >= 1, nonincreasing in eps, nondecreasing in n."""
        for row in self.rows:
            if row.count < 1:
                raise InvariantViolation(f"count < 1 at {row}")
        by_n: dict = {}
        by_eps: dict = {}
        for row in self.rows:
            by_n.setdefault(row.n, []).append(row)
            by_eps.setdefault(row.eps, []).append(row)
        for n, rows in by_n.items():
            rows = sorted(rows, key=lambda r: -r.eps)
            for a, b in zip(rows, rows[1:]):
                if b.count < a.count:
                    raise InvariantViolation(
                        f"count decreased as eps shrank at n={n}")
        for eps, rows in by_eps.items():
            rows = sorted(rows, key=lambda r: r.n)
            for a, b in zip(rows, rows[1:]):
                if b.count < a.count:
                    raise InvariantViolation(
                        f"count decreased as n grew at eps={eps}")

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "rows": [
                {"n": r.n, "eps": r.eps, "count": r.count,
                 "exact": r.exact, "rate": r.rate}
                for r in self.rows
            ],
            "rates": {f"{eps:g}": rate for eps, rate in self.rates.items()},
        }

    def to_csv_lines(self) -> List[str]:
        lines = ["n,eps,count,exact,rate"]
        for r in self.rows:
            lines.append(f"{r.n},{r.eps:g},{r.count},{int(r.exact)},{r.rate:.10g}")
        return lines


def _slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) == 1:
        return float(ys[0] / xs[0])
    xm, ym = xs.mean(), ys.mean()
    denom = ((xs - xm) ** 2).sum()
    if denom == 0:
        return 0.0
    return float(((xs - xm) * (ys - ym)).sum() / denom)


def entropy_estimate(handle: SystemHandle, K: Sequence,
                     ladder: Iterable[Tuple[int, float]],
                     exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
                     metadata: dict | None = None) -> SeparationReport:
    """Separation report over an (n, eps) ladder on the compact set K.

    The extrapolated rate per eps is the least-squares slope of
    log sep(n, eps) over the top half of the n values (the limsup is not
    computable; this is the rate at scale).
    """
    ladder = sorted(set(ladder))
    if not ladder:
        raise ValueError("ladder must be nonempty")
    n_values = sorted({n for n, _ in ladder})
    eps_by_n: dict = {}
    for n, eps in ladder:
        eps_by_n.setdefault(n, []).append(eps)
    rows: List[SepRow] = []
    for n, d in rho_running(handle, K, n_values[-1]):
        for eps in eps_by_n.get(n, ()):
            res = sep_from_matrix(d, eps, exact_threshold)
            rows.append(SepRow(n, eps, res.count, res.exact))
    rates: dict = {}
    for eps in sorted({eps for _, eps in ladder}):
        sub = sorted((r for r in rows if r.eps == eps), key=lambda r: r.n)
        top = sub[len(sub) // 2:]
        rates[eps] = _slope([r.n for r in top],
                            [math.log(r.count) for r in top])
    meta = {"system": handle.label(), "net_size": len(K),
            "depth": handle.depth}
    meta.update(metadata or {})
    report = SeparationReport(rows, rates, meta)
    report.check_invariants()
    return report
