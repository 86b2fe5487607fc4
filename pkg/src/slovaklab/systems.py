"""The named dynamical systems: odometer, full shift, Sturmian words,
"+1" on the compactified integers, the suspension flow and its time-t0 map.

Every system is packaged as a :class:`SystemHandle` bundling the phase
space id, the step map, its inverse (when available), the depth parameter
and the metric.  All step maps are pure functions over immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .spaces import (
    CantorWord,
    CompactifiedInteger,
    INF_POINT,
    SolenoidPoint,
    cantor_distance,
    compactified_distance,
    register_net,
    solenoid_distance,
)

#: golden-ratio conjugate (default irrational time step for the flow)
GOLDEN_T0 = (math.sqrt(5.0) - 1.0) / 2.0

#: rational surrogate of the golden-ratio conjugate, 16 decimal digits
GOLDEN_ALPHA = Fraction(6180339887498949, 10**16)


# ---------------------------------------------------------------------------
# odometer
# ---------------------------------------------------------------------------


def odometer_step(w: CantorWord, steps: int = 1) -> CantorWord:
    """Binary add-with-carry, least-significant bit first; carry past the
    depth is dropped (addition mod 2**depth)."""
    return CantorWord.from_int((w.to_int() + steps) % (1 << w.depth), w.depth)


def odometer_inverse(w: CantorWord) -> CantorWord:
    return odometer_step(w, -1)


# ---------------------------------------------------------------------------
# full shift on finite windows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftWindow:
    """{0,1} window indexed over [-d, d] with a tail-fill convention.

    fill "zero" refills vacated cells with 0; fill "periodic" continues the
    window periodically with the declared period.
    """

    cells: tuple
    fill: str = "zero"
    period: int = 0

    def __post_init__(self):
        if len(self.cells) % 2 != 1:
            raise ValueError("window length must be odd (2d+1)")
        if self.fill not in ("zero", "periodic"):
            raise ValueError(f"unknown fill rule {self.fill!r}")
        if self.fill == "periodic" and self.period < 1:
            raise ValueError("periodic fill needs period >= 1")

    @property
    def radius(self) -> int:
        return len(self.cells) // 2

    def at(self, i: int) -> int:
        """Cell at coordinate i in [-d, d]."""
        return self.cells[i + self.radius]

    @classmethod
    def from_coords(cls, radius: int, ones: tuple = (), fill: str = "zero",
                    period: int = 0) -> "ShiftWindow":
        cells = tuple(1 if i - radius in ones else 0
                      for i in range(2 * radius + 1))
        return cls(cells, fill, period)


def shift_step(w: ShiftWindow) -> ShiftWindow:
    """Left shift; the rightmost cell is refilled per the fill rule."""
    shifted = list(w.cells[1:])
    if w.fill == "zero":
        shifted.append(0)
    else:
        shifted.append(shifted[len(shifted) - w.period])
    return ShiftWindow(tuple(shifted), w.fill, w.period)


def shift_inverse(w: ShiftWindow) -> ShiftWindow:
    """Right shift; the leftmost cell is refilled per the fill rule."""
    shifted = list(w.cells[:-1])
    if w.fill == "zero":
        shifted.insert(0, 0)
    else:
        shifted.insert(0, shifted[w.period - 1])
    return ShiftWindow(tuple(shifted), w.fill, w.period)


def shift_distance(a: ShiftWindow, b: ShiftWindow) -> float:
    """2**-|i| at the mismatch closest to coordinate 0."""
    if len(a.cells) != len(b.cells):
        raise ValueError("window length mismatch")
    d = a.radius
    best = None
    for i in range(-d, d + 1):
        if a.at(i) != b.at(i):
            if best is None or abs(i) < best:
                best = abs(i)
    return 0.0 if best is None else 2.0 ** (-best)


# ---------------------------------------------------------------------------
# Sturmian words
# ---------------------------------------------------------------------------


def sturmian_word(alpha, length: int, offset: int = 0) -> tuple:
    """bit i = floor((offset+i+1)*alpha) - floor((offset+i)*alpha).

    alpha should be an irrational surrogate (a high-precision Fraction);
    floats are accepted for quick experiments.
    """
    if length <= 0:
        raise ValueError("length must be positive")
    return tuple(
        int(math.floor((offset + i + 1) * alpha)) - int(math.floor((offset + i) * alpha))
        for i in range(length)
    )


def sturmian_factors(alpha, n: int, horizon: int = 2048) -> set:
    """All length-n factors observed in a long prefix of the word."""
    word = sturmian_word(alpha, horizon + n)
    return {word[i:i + n] for i in range(horizon)}


# ---------------------------------------------------------------------------
# "+1" on the compactified integers
# ---------------------------------------------------------------------------


def plus_one_step(k: CompactifiedInteger) -> CompactifiedInteger:
    if k.is_infinite:
        return k
    return CompactifiedInteger(k.value + 1)


def plus_one_inverse(k: CompactifiedInteger) -> CompactifiedInteger:
    if k.is_infinite:
        return k
    return CompactifiedInteger(k.value - 1)


# ---------------------------------------------------------------------------
# suspension flow over the odometer and its time-t0 map
# ---------------------------------------------------------------------------


def suspension_flow(p: SolenoidPoint, t) -> SolenoidPoint:
    """phi_t(y, s) = (h**floor(t+s)(y), frac(t+s)) with h the odometer.

    Exact when both s and t are Fractions; float otherwise.
    """
    total = p.s + t
    n = math.floor(total)
    frac = total - n
    if not isinstance(frac, Fraction):
        frac = float(frac)
        if frac >= 1.0:  # guard against floating roundup at the seam
            frac -= 1.0
            n += 1
        if frac < 0.0:
            frac += 1.0
            n -= 1
    return SolenoidPoint(odometer_step(p.base, int(n)), frac)


def time_t0_map(p: SolenoidPoint, t0=GOLDEN_T0) -> SolenoidPoint:
    return suspension_flow(p, t0)


# ---------------------------------------------------------------------------
# handles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SystemHandle:
    """A system: phase-space id, step oracle, optional inverse, metric."""

    space_id: str
    step: Callable
    metric: Callable
    inverse: Optional[Callable] = None
    depth: int = 4
    params: dict = field(default_factory=dict)

    def label(self) -> str:
        return self.params.get("label", self.space_id)


def make_odometer(depth: int = 10) -> SystemHandle:
    return SystemHandle("cantor", odometer_step, cantor_distance,
                        odometer_inverse, depth, {"label": "odometer"})


def make_fullshift(depth: int = 10) -> SystemHandle:
    return SystemHandle("fullshift", shift_step, shift_distance,
                        shift_inverse, depth, {"label": "fullshift"})


def make_plusone(depth: int = 10) -> SystemHandle:
    return SystemHandle("compactint", plus_one_step, compactified_distance,
                        plus_one_inverse, depth, {"label": "plusone"})


def make_solenoid(depth: int = 4, t0: float = GOLDEN_T0) -> SystemHandle:
    step = lambda p: suspension_flow(p, t0)
    inv = lambda p: suspension_flow(p, -t0)
    return SystemHandle("solenoid", step, solenoid_distance, inv, depth,
                        {"t0": t0, "label": f"solenoid:{t0:.6g}"})


def make_identity(space_id: str, metric: Callable, depth: int = 4) -> SystemHandle:
    ident = lambda p: p
    return SystemHandle(space_id, ident, metric, ident, depth,
                        {"label": f"identity:{space_id}"})


def make_system(system_id: str, depth: int = 10, t0: float = GOLDEN_T0) -> SystemHandle:
    """Parse a CLI system identifier into a handle.

    Accepted: odometer, fullshift, plusone, solenoid:<t0|golden>.
    (sturmian:<digits> is a language source, see :func:`sturmian_factors`.)
    """
    if system_id == "odometer":
        return make_odometer(depth)
    if system_id == "fullshift":
        return make_fullshift(depth)
    if system_id == "plusone":
        return make_plusone(depth)
    if system_id.startswith("solenoid"):
        _, _, arg = system_id.partition(":")
        if arg in ("", "golden"):
            return make_solenoid(depth, t0)
        return make_solenoid(depth, float(arg))
    raise ValueError(f"unknown system id {system_id!r}")


def parse_alpha(system_id: str) -> Fraction:
    """sturmian:<digits> -> Fraction 0.<digits>."""
    _, _, digits = system_id.partition(":")
    if not digits or digits == "golden":
        return GOLDEN_ALPHA
    return Fraction(int(digits), 10 ** len(digits))


def orbit(handle: SystemHandle, start, n: int) -> list:
    """[start, T(start), ..., T**(n-1)(start)]."""
    if n < 0:
        raise ValueError("n must be >= 0")
    points = []
    p = start
    for _ in range(n):
        points.append(p)
        p = handle.step(p)
    return points


def sample_points(handle: SystemHandle, size: int = 256) -> list:
    """Deterministic sample of starting points for language enumeration."""
    d = handle.depth
    if handle.space_id == "cantor":
        return [CantorWord.from_int(v % (1 << d), d) for v in range(min(size, 1 << d))]
    if handle.space_id == "fullshift":
        b = min(d + 1, max(1, size.bit_length() - 1))
        out = []
        for v in range(min(size, 1 << b)):
            ones = tuple(i for i in range(b) if (v >> i) & 1)
            out.append(ShiftWindow.from_coords(d, ones))
        return out
    if handle.space_id == "compactint":
        half = size // 2
        pts = [CompactifiedInteger(k) for k in range(-half, size - half)]
        pts.append(INF_POINT)
        return pts
    if handle.space_id == "solenoid":
        words = 1 << d
        per_word = max(1, size // words)
        return [
            SolenoidPoint(CantorWord.from_int(v, d), j / per_word)
            for v in range(words)
            for j in range(per_word)
        ][:size]
    raise ValueError(f"no sampler for space {handle.space_id!r}")


def orbit_density_horizon(handle: SystemHandle, start, eps: float,
                          net: list, max_steps: int = 2000) -> Optional[int]:
    """Smallest M <= max_steps such that the first M iterates come within
    eps of every net point; None if the horizon is not reached (minimality
    heuristic, not a proof)."""
    remaining = list(range(len(net)))
    p = start
    for step_idx in range(1, max_steps + 1):
        remaining = [i for i in remaining if handle.metric(p, net[i]) > eps]
        if not remaining:
            return step_idx
        p = handle.step(p)
    return None


# ---------------------------------------------------------------------------
# full-shift epsilon net (registered into the shared net registry)
# ---------------------------------------------------------------------------


def _fullshift_net(eps: float, depth: int):
    """Windows free on coordinates [-m, depth] and zero elsewhere, where m
    is minimal with 2**-(m+1) <= eps.  Covers: a mismatch confined to
    coordinates below -m contributes at most 2**-(m+1)."""
    m = 0
    while 2.0 ** (-(m + 1)) > eps:
        m += 1
    coords = list(range(-min(m, depth), depth + 1))
    out = []
    for v in range(1 << len(coords)):
        ones = tuple(coords[i] for i in range(len(coords)) if (v >> i) & 1)
        out.append(ShiftWindow.from_coords(depth, ones))
    return out


register_net("fullshift", _fullshift_net)
