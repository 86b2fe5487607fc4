"""The graph-closure construction over the generalized solenoid.

Builds, at finite truncation, the oscillating potential ``F = sum a_n f o T^n``
along the marked orbit of the time-t0 map, the closure fibers ``W_n`` over
that orbit, the lifted homeomorphism of the graph closure, the
uniform-continuity modulus recipe, and the purely topological successor
relation on the closed-end points.

Every numeric output carries the truncation tail of the coefficient scheme
as an explicit error budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .spaces import CantorWord, GraphPoint, SolenoidPoint, graph_distance, solenoid_distance
from .systems import GOLDEN_T0, SystemHandle, make_solenoid


class OnOrbitError(ValueError):
    """F was evaluated on (or too close to) the marked orbit."""


class SchemeError(ValueError):
    """Coefficient scheme violates positivity, normalization or ratios."""


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientScheme:
    """Two-sided summable coefficients a_n = 2**-|n| / 3.

    Positive, sums to 1 exactly, and both consecutive-ratio bounds equal
    the declared A = 2.  All values are Fractions, so partial sums and
    tails are exact.
    """

    ratio_bound: int = 2
    label: str = "dyadic"

    def a(self, n: int) -> Fraction:
        return Fraction(1, 3 * (1 << abs(n)))

    def tail(self, N: int) -> Fraction:
        """sum of a_n over |n| > N (geometric tail, exact)."""
        if N < 0:
            raise ValueError("N must be >= 0")
        return Fraction(2, 3 * (1 << N))

    def verify(self, N: int) -> None:
        total = sum(self.a(n) for n in range(-N, N + 1))
        if total + self.tail(N) != 1:
            raise SchemeError("partial sum + tail != 1")
        for n in range(-N, N + 1):
            if self.a(n) <= 0:
                raise SchemeError(f"a_{n} <= 0")
            r = self.a(n - 1) / self.a(n)
            if r > self.ratio_bound or 1 / r > self.ratio_bound:
                raise SchemeError(f"ratio bound violated at n={n}")


# ---------------------------------------------------------------------------
# the oscillator g
# ---------------------------------------------------------------------------


def g_eval(x: float) -> float:
    """(1 - cos(pi/x))/2 on [-1/2, 0), 0 on [0, 1/2]."""
    if not (-0.5 <= x <= 0.5):
        raise ValueError(f"g domain is [-1/2, 1/2], got {x}")
    if x >= 0:
        return 0.0
    return 0.5 * (1.0 - math.cos(math.pi / x))


def _g_vec(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    neg = x < 0
    out[neg] = 0.5 * (1.0 - np.cos(math.pi / x[neg]))
    return out


def _prefix_dist_to(codes: np.ndarray, word: int) -> np.ndarray:
    """Vector of prefix distances from each code to a fixed word code."""
    x = codes ^ np.uint64(word)
    low = (x & (np.uint64(0) - x)).astype(np.float64)
    with np.errstate(divide="ignore"):
        return np.where(x == 0, 0.0, 1.0 / low)


# ---------------------------------------------------------------------------
# fibers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fiber:
    """Closure interval over the n-th marked orbit point.

    Spans [v_lo, v_lo + length]; the top endpoint is the closed end (the
    distinguished Z-point).  v_lo carries the truncation tail as error.
    """

    n: int
    base: SolenoidPoint
    v_lo: float
    length: Fraction
    tail: float

    @property
    def v_hi(self) -> float:
        return self.v_lo + float(self.length)

    def top(self) -> GraphPoint:
        return GraphPoint(self.base, min(self.v_hi, 1.0))

    def bottom(self) -> GraphPoint:
        return GraphPoint(self.base, self.v_lo)


@dataclass(frozen=True)
class SuccessorResult:
    n: int
    traced: GraphPoint
    expected: GraphPoint
    distance: float

    def matches(self, tol: float = 1e-6) -> bool:
        return self.distance <= tol


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------


class SlovakModel:
    """Finite-truncation model of the graph closure.

    depth: word length of the solenoid base.  N: truncation of the
    coefficient sum (fibers are declared for |n| <= N).  t0: flow time of
    the base homeomorphism.  The extension of the arc potential off the
    parametrized arc uses a nearest-point linear ramp of radius
    r0 = 2**-depth.
    """

    def __init__(self, depth: int = 4, N: int = 12, t0: float = GOLDEN_T0,
                 scheme: Optional[CoefficientScheme] = None,
                 arm_grid: int = 2400):
        if depth < 2:
            raise ValueError("depth must be >= 2")
        if N < 1:
            raise ValueError("N must be >= 1")
        self.depth = depth
        self.N = N
        self.t0 = float(t0)
        self.scheme = scheme or CoefficientScheme()
        self.scheme.verify(N)
        self.handle: SystemHandle = make_solenoid(depth, self.t0)
        self.x0 = SolenoidPoint(CantorWord.zeros(depth), 0.0)
        self.r0 = 2.0 ** (-depth)
        self.tail = float(self.scheme.tail(N))
        self._mask = (1 << depth) - 1
        self._arm_word = self._mask  # h**-1 of the all-zeros word
        self._build_arm(arm_grid)
        self._orbit: dict = {0: self.x0}
        self._fibers: dict = {}
        self._coeffs = np.array([float(self.scheme.a(n))
                                 for n in range(-N, N + 1)])

    # -- geometry helpers ---------------------------------------------------

    def _build_arm(self, grid: int) -> None:
        """Sample the negative arc arm u in [-1/2, 0): parameters, interval
        coordinates and g values.  (The positive arm has g = 0 everywhere,
        exactly the off-arc default, so it needs no samples.)"""
        us = set(np.linspace(-0.5, -0.002, grid))
        us.update(-1.0 / k for k in range(2, 801))
        u = np.array(sorted(us))
        self._arm_u = u
        self._arm_s = 1.0 + u * self.t0
        self._arm_g = _g_vec(u)

    def orbit_point(self, j: int) -> SolenoidPoint:
        """T**j(x0), built iteratively so orbit and step stay consistent."""
        if j not in self._orbit:
            if j > 0:
                prev = self.orbit_point(j - 1)
                self._orbit[j] = self.handle.step(prev)
            else:
                nxt = self.orbit_point(j + 1)
                self._orbit[j] = self.handle.inverse(nxt)
        return self._orbit[j]

    def composant_param(self, t: float) -> SolenoidPoint:
        """p(t): the flow applied to x0 for time t*t0 (integer t hits the
        cached orbit exactly)."""
        if isinstance(t, int) or (isinstance(t, float) and t.is_integer()):
            return self.orbit_point(int(t))
        from .systems import suspension_flow

        return suspension_flow(self.x0, t * self.t0)

    # -- the potential ------------------------------------------------------

    def _f_core(self, words: np.ndarray, s: np.ndarray) -> np.ndarray:
        """Vectorized f over points given as (word codes, interval coords).

        Exact on the parametrized arc (both arms); nearest-arm-point linear
        ramp of radius r0 elsewhere; 0 beyond the ramp.
        """
        out = np.zeros_like(s)
        half = self.t0 / 2.0
        pos_arc = (words == 0) & (s > 0) & (s <= half + 1e-15)
        neg_arc = (words == self._arm_word) & (s >= 1.0 - half - 1e-15)
        out[neg_arc] = _g_vec((s[neg_arc] - 1.0) / self.t0)
        rest = ~(pos_arc | neg_arc)
        if rest.any():
            w = words[rest].astype(np.uint64)
            si = s[rest]
            hw = (w + np.uint64(1)) & np.uint64(self._mask)
            cd_direct = _prefix_dist_to(w, self._arm_word)
            cd_fwd = _prefix_dist_to(hw, self._arm_word)
            cd_bwd = _prefix_dist_to(w, 0)  # h(arm word) = all-zeros word
            sj = self._arm_s[None, :]
            direct = np.abs(si[:, None] - sj) + cd_direct[:, None]
            fwd = (1.0 - si[:, None] + sj) + cd_fwd[:, None]
            bwd = (1.0 - sj + si[:, None]) + cd_bwd[:, None]
            dmat = np.minimum(direct, np.minimum(fwd, bwd))
            idx = dmat.argmin(axis=1)
            dmin = dmat[np.arange(len(si)), idx]
            val = (1.0 - dmin / self.r0) * self._arm_g[idx]
            out[rest] = np.where(dmin < self.r0, val, 0.0)
        return out

    def f_eval(self, x: SolenoidPoint) -> float:
        """The extended arc potential at a single point (undefined at x0)."""
        if solenoid_distance(x, self.x0) < 1e-12:
            raise OnOrbitError("f is undefined at the base point")
        words = np.array([x.base.to_int()], dtype=np.uint64)
        s = np.array([float(x.s)])
        return float(self._f_core(words, s)[0])

    def _f_points(self, pts: Sequence[SolenoidPoint]) -> np.ndarray:
        words = np.array([p.base.to_int() for p in pts], dtype=np.uint64)
        s = np.array([float(p.s) for p in pts])
        return self._f_core(words, s)

    def _orbit_segment(self, x: SolenoidPoint) -> List[SolenoidPoint]:
        """[T**-N x, ..., x, ..., T**N x] via the handle's step/inverse."""
        fwd = [x]
        for _ in range(self.N):
            fwd.append(self.handle.step(fwd[-1]))
        bwd = [x]
        for _ in range(self.N):
            bwd.append(self.handle.inverse(bwd[-1]))
        return bwd[:0:-1] + fwd

    def check_off_orbit(self, x: SolenoidPoint, tol: float = 1e-9) -> None:
        for j in range(-self.N, self.N + 1):
            if solenoid_distance(x, self.orbit_point(j)) < tol:
                raise OnOrbitError(f"point lies on the marked orbit (j={j})")

    def F_eval(self, x: SolenoidPoint, N: Optional[int] = None) -> Tuple[float, float]:
        """(truncated sum, tail error) of F at a point off the marked orbit.

        The sum runs f over T**n x for |n| <= N; the tail of the scheme is
        returned as the explicit truncation error.
        """
        if N is not None and N != self.N:
            model = SlovakModel(self.depth, N, self.t0, self.scheme)
            return model.F_eval(x)
        self.check_off_orbit(x)
        # f(T**n x) weighted by a_n; note the segment index runs n = -N..N
        fs = self._f_points(self._orbit_segment(x))
        return float(np.dot(self._coeffs, fs)), self.tail

    def graph_point(self, t: float) -> GraphPoint:
        """(p(t), F(p(t))) for a non-integer parameter t."""
        x = self.composant_param(t)
        value, _ = self.F_eval(x)
        return GraphPoint(x, min(max(value, 0.0), 1.0))

    # -- fibers and Z -------------------------------------------------------

    def fiber(self, n: int) -> Fiber:
        """W_n over T**n x0: [v_n, v_n + a_{-n}] with the tail attached."""
        if abs(n) > self.N:
            raise ValueError(f"fibers are declared for |n| <= {self.N}")
        if n not in self._fibers:
            seg = self._orbit_segment(self.orbit_point(n))
            skip = self.N - n  # segment slot of T**-n (T**n x0) = x0,
            # where f is undefined; its coefficient a_{-n} is exactly the
            # fiber length and stays out of v_n
            fs = self._f_points(seg[:skip] + seg[skip + 1:])
            v_lo = float(np.dot(np.delete(self._coeffs, skip), fs))
            self._fibers[n] = Fiber(n, self.orbit_point(n), v_lo,
                                    self.scheme.a(-n), self.tail)
        return self._fibers[n]

    def z_point(self, n: int) -> GraphPoint:
        """The closed-end (top) endpoint of W_n."""
        return self.fiber(n).top()

    def fiber_index_of(self, x: SolenoidPoint, tol: float = 1e-9) -> Optional[int]:
        for j in range(-self.N, self.N + 1):
            if solenoid_distance(x, self.orbit_point(j)) < tol:
                return j
        return None

    # -- the lifted homeomorphism -------------------------------------------

    def lifted_step(self, gp: GraphPoint) -> GraphPoint:
        return self._lift(gp, +1)

    def lifted_inverse(self, gp: GraphPoint) -> GraphPoint:
        return self._lift(gp, -1)

    def _lift(self, gp: GraphPoint, direction: int) -> GraphPoint:
        j = self.fiber_index_of(gp.x)
        if j is not None:
            if abs(j + direction) > self.N:
                raise ValueError("lifted image leaves the declared fibers; "
                                 "increase the truncation N")
            src, dst = self.fiber(j), self.fiber(j + direction)
            lam = (gp.v - src.v_lo) / float(src.length)
            if lam < -1e-6 or lam > 1.0 + 1e-6:
                raise ValueError(f"value {gp.v} outside fiber W_{j}")
            lam = min(max(lam, 0.0), 1.0)
            return GraphPoint(dst.base,
                              min(dst.v_lo + lam * float(dst.length), 1.0))
        value, tail = self.F_eval(gp.x)
        if abs(gp.v - value) > tail + 1e-6:
            raise ValueError("point is neither on the sampled graph nor in "
                             "a declared fiber")
        nxt = self.handle.step(gp.x) if direction > 0 else self.handle.inverse(gp.x)
        nval, _ = self.F_eval(nxt)
        return GraphPoint(nxt, min(max(nval, 0.0), 1.0))

    # -- oscillation --------------------------------------------------------

    def oscillation_profile(self, center: float,
                            windows: Sequence[float] = (0.3, 0.15, 0.08, 0.04),
                            samples: int = 80) -> List[Tuple[float, float]]:
        """(window, observed oscillation of F) along the composant around
        p(center), the center itself excluded.

        At integer centers -n the singular term a_n g dominates and the
        oscillation converges to a_n; off the orbit it shrinks to 0.
        """
        rows = []
        for w in windows:
            us: List[float] = []
            k0 = max(2, math.ceil(1.0 / w))
            us.extend(-1.0 / k for k in range(k0 + 1, k0 + samples + 1))
            us.extend(w * (i + 1) / 8.0 * 0.9 for i in range(7))
            vals = []
            for u in us:
                try:
                    vals.append(self.graph_point(center + u).v)
                except OnOrbitError:
                    continue
            rows.append((w, max(vals) - min(vals)))
        return rows

    # -- uniform-continuity modulus -----------------------------------------

    def uc_modulus_check(self, eps_ladder: Sequence[float],
                         sample_size: int = 120) -> List[dict]:
        """Realize the delta recipe per epsilon and verify it by sampling.

        n0 is minimal with scheme tail < eps/(5A); r keeps 2r-balls around
        the length-n0 orbit window disjoint; delta starts at min(r, eps/5A)
        and is halved until the sampled per-term oscillation of f o T**n
        stays below eps/(5A(2 n0 + 1)).  Graph pairs at distance < delta are
        then pushed through the lifted map and the worst image distance is
        reported.
        """
        A = self.scheme.ratio_bound
        rows = []
        for eps in eps_ladder:
            if eps <= 0:
                raise ValueError("eps must be positive")
            n0 = 0
            while float(self.scheme.tail(n0)) >= eps / (5 * A):
                n0 += 1
            pts = [self.orbit_point(j) for j in range(-n0, n0 + 1)]
            gap = min(solenoid_distance(p, q)
                      for i, p in enumerate(pts) for q in pts[i + 1:])
            r = gap / 5.0
            margin = r / self.t0 + 1e-3
            ts = [t for t in np.linspace(-3.0, 3.0, sample_size)
                  if abs(t - round(t)) > margin]
            b = eps / (5 * A * (2 * n0 + 1))
            delta = min(r, eps / (5 * A))
            while delta > 1e-9:
                if self._fn_oscillation_ok(ts, n0, delta, b):
                    break
                delta /= 2.0
            worst, used = self._verify_delta(ts, delta, eps)
            rows.append({"eps": eps, "n0": n0, "r": r, "delta": delta,
                         "pairs": used, "worst_image_distance": worst,
                         "passed": worst <= eps})
        return rows

    def _fn_oscillation_ok(self, ts: Sequence[float], n0: int,
                           delta: float, bound: float) -> bool:
        eta = delta / (2.0 * self.t0)
        for t in ts:
            a = self._f_along(t, n0)
            b = self._f_along(t + eta, n0)
            if np.abs(a - b).max() > bound:
                return False
        return True

    def _f_along(self, t: float, n0: int) -> np.ndarray:
        pts = [self.composant_param(t + n) for n in range(-n0, n0 + 1)]
        return self._f_points(pts)

    def _verify_delta(self, ts: Sequence[float], delta: float,
                      eps: float) -> Tuple[float, int]:
        worst, used = 0.0, 0
        for t in ts:
            gp1 = self.graph_point(t)
            eta = 0.4 * delta / self.t0
            gp2 = None
            for _ in range(25):
                cand = self.graph_point(t + eta)
                d = graph_distance(gp1, cand)
                if d < delta:
                    gp2 = cand
                    break
                eta *= 0.35 * delta / d
            if gp2 is None:
                continue
            im = graph_distance(self.lifted_step(gp1), self.lifted_step(gp2))
            worst = max(worst, im)
            used += 1
        return worst, used

    # -- the successor relation ---------------------------------------------

    def successor(self, n: int, j_lo: int = 60, j_hi: int = 160) -> SuccessorResult:
        """Topological successor of the Z-point at W_n.

        Traces n's path-component along the sine arm into its accumulation
        interval over T**(n+1) x0 and takes the supremum of the traced
        values: the closed end of W_{n+1}.  The result is compared against
        the lifted map applied to the source Z-point.
        """
        z = self.z_point(n)
        expected = self.lifted_step(z)
        best = 0.0
        for j in range(j_lo, j_hi, 2):
            u = -1.0 / (2 * j + 1)  # g = 1 exactly at these parameters
            best = max(best, self.graph_point((n + 1) + u).v)
        traced = GraphPoint(self.orbit_point(n + 1), min(best, 1.0))
        return SuccessorResult(n, traced, expected,
                               graph_distance(traced, expected))

    # -- export --------------------------------------------------------------

    def graph_rows(self, ts: Sequence[float]) -> List[tuple]:
        """CSV-ready rows (t, s, word, F, tail-error) along the composant."""
        rows = []
        for t in ts:
            x = self.composant_param(t)
            value, tail = self.F_eval(x)
            rows.append((t, float(x.s), str(x.base), value, tail))
        return rows

    def summary(self) -> dict:
        fibers = [self.fiber(n) for n in range(-5, 6)]
        return {
            "depth": self.depth,
            "N": self.N,
            "t0": self.t0,
            "scheme": self.scheme.label,
            "tail": self.tail,
            "r0": self.r0,
            "fibers": [{"n": f.n, "v_lo": f.v_lo,
                        "length": str(f.length), "v_hi": f.v_hi}
                       for f in fibers],
        }
