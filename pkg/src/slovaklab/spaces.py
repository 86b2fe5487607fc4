"""Finite representations of the compact spaces used throughout.

Four point types with exact, computable metrics:

* :class:`CantorWord` -- depth-``d`` binary word, a cylinder of the Cantor
  set, with the standard ``2**-k`` ultrametric (``k`` = longest common
  prefix).
* :class:`CompactifiedInteger` -- an integer or the point at infinity, with
  the pullback metric of an explicit embedding into ``[-1, 1]``.
* :class:`SolenoidPoint` -- pair (word, fractional coordinate) on the
  quotient of ``[0,1] x Cantor`` identifying ``(1, c)`` with ``(0, h(c))``
  for the dyadic odometer ``h``.  The metric is a one-step chain metric:
  at most one crossing of the identification seam.
* :class:`GraphPoint` -- solenoid point plus a value in ``[0, 1]``.

All values are immutable.  ``epsilon_net`` produces deterministic finite
nets; extra spaces (e.g. the full-shift window space) register their net
builders into :data:`NET_BUILDERS`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Sequence, Union

Scalar = Union[int, float, Fraction]


class DepthMismatchError(ValueError):
    """Two words (or solenoid points) of different depth were compared."""


class UnsupportedSpaceError(ValueError):
    """epsilon_net was asked for a space it does not know."""


# ---------------------------------------------------------------------------
# point types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CantorWord:
    """Depth-d binary word; bit 0 is the first (most significant for the
    metric, least significant for the odometer carry)."""

    bits: tuple

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ValueError("depth must be >= 1")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0/1")

    @property
    def depth(self) -> int:
        return len(self.bits)

    @classmethod
    def from_int(cls, value: int, depth: int) -> "CantorWord":
        return cls(tuple((value >> i) & 1 for i in range(depth)))

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    @classmethod
    def zeros(cls, depth: int) -> "CantorWord":
        return cls((0,) * depth)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


#: marker for the point at infinity of the compactified integers
INFINITY = "inf"


@dataclass(frozen=True)
class CompactifiedInteger:
    """An integer, or the point at infinity (``value is None``)."""

    value: int | None = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return INFINITY if self.value is None else str(self.value)


INF_POINT = CompactifiedInteger(None)


@dataclass(frozen=True)
class SolenoidPoint:
    """Point of the generalized solenoid: (base word, s) with 0 <= s < 1."""

    base: CantorWord
    s: Scalar

    def __post_init__(self):
        if not (0 <= self.s < 1):
            raise ValueError(f"s out of range [0,1): {self.s}")

    @property
    def depth(self) -> int:
        return self.base.depth


@dataclass(frozen=True)
class GraphPoint:
    """Sample of the graph closure: solenoid point plus value v in [0,1]."""

    x: SolenoidPoint
    v: float

    def __post_init__(self):
        if not (0 <= self.v <= 1):
            raise ValueError(f"v out of range [0,1]: {self.v}")


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def cantor_distance(a: CantorWord, b: CantorWord) -> float:
    """2**-k where k is the length of the longest common prefix."""
    if a.depth != b.depth:
        raise DepthMismatchError(f"depth {a.depth} != {b.depth}")
    for k, (x, y) in enumerate(zip(a.bits, b.bits)):
        if x != y:
            return 2.0 ** (-k)
    return 0.0


def _phi(p: CompactifiedInteger) -> Fraction:
    """Injective embedding of the compactified integers into [-1, 1].

    phi(k) = 1/(k+1) for k >= 0, -1/(|k|+1) for k < 0, phi(inf) = 0.
    (The naive sign(k)/(|k|+1) is not injective at 0; mapping 0 to 1
    restores injectivity while keeping phi(k) -> 0 = phi(inf).)
    """
    if p.is_infinite:
        return Fraction(0)
    k = p.value
    if k >= 0:
        return Fraction(1, k + 1)
    return Fraction(-1, -k + 1)


def compactified_distance(a: CompactifiedInteger, b: CompactifiedInteger) -> float:
    return float(abs(_phi(a) - _phi(b)))


def compactified_phi(p: CompactifiedInteger) -> float:
    """Float value of the embedding (exposed for vectorized kernels)."""
    return float(_phi(p))


def _odometer_word(w: CantorWord, steps: int = 1) -> CantorWord:
    """Add ``steps`` with carry, truncated at depth (duplicated here to keep
    the metric module free of a systems import)."""
    return CantorWord.from_int((w.to_int() + steps) % (1 << w.depth), w.depth)


def solenoid_distance(p: SolenoidPoint, q: SolenoidPoint) -> float:
    """One-step chain metric on the quotient: the direct term or a single
    crossing of the seam (1, c) ~ (0, h(c)) in either direction."""
    if p.depth != q.depth:
        raise DepthMismatchError(f"depth {p.depth} != {q.depth}")
    sp, sq = float(p.s), float(q.s)
    direct = abs(sp - sq) + cantor_distance(p.base, q.base)
    fwd = (1.0 - sp + sq) + cantor_distance(_odometer_word(p.base), q.base)
    bwd = (1.0 - sq + sp) + cantor_distance(_odometer_word(q.base), p.base)
    return min(direct, fwd, bwd)


def graph_distance(a: GraphPoint, b: GraphPoint) -> float:
    """Max metric on the product: base distance vs value gap."""
    return max(solenoid_distance(a.x, b.x), abs(a.v - b.v))


# ---------------------------------------------------------------------------
# epsilon nets
# ---------------------------------------------------------------------------

NET_BUILDERS: Dict[str, Callable] = {}


def register_net(space_id: str, builder: Callable) -> None:
    NET_BUILDERS[space_id] = builder


def _cantor_net(eps: float, depth: int):
    return [CantorWord.from_int(v, depth) for v in range(1 << depth)]


def _interval_net(eps: float, depth: int):
    m = max(1, math.ceil(1.0 / eps))
    return [j / m for j in range(m + 1)]


def _s_grid(eps: float):
    m = max(1, math.ceil(1.0 / eps))
    return [j / m for j in range(m)]


def _solenoid_net(eps: float, depth: int):
    return [
        SolenoidPoint(CantorWord.from_int(v, depth), s)
        for v in range(1 << depth)
        for s in _s_grid(eps)
    ]


def _compactint_net(eps: float, depth: int):
    k_max = max(1, math.ceil(2.0 / eps))
    pts = [CompactifiedInteger(k) for k in range(-k_max, k_max + 1)]
    pts.append(INF_POINT)
    return pts


register_net("cantor", _cantor_net)
register_net("interval", _interval_net)
register_net("solenoid", _solenoid_net)
register_net("compactint", _compactint_net)


def epsilon_net(space_id: str, eps: float, depth: int = 4) -> list:
    """Deterministic finite eps-net of the named space.

    Every representable point of the space (at the given depth) is within
    eps of some net point; the net may be finer than needed.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    try:
        builder = NET_BUILDERS[space_id]
    except KeyError:
        raise UnsupportedSpaceError(space_id) from None
    return builder(eps, depth)


# ---------------------------------------------------------------------------
# serialization:  b:0010   s:0010@0.625   g:0010@0.625#0.41
# ---------------------------------------------------------------------------


def format_point(p) -> str:
    if isinstance(p, CantorWord):
        return f"b:{p}"
    if isinstance(p, SolenoidPoint):
        return f"s:{p.base}@{float(p.s):.12g}"
    if isinstance(p, GraphPoint):
        return f"g:{p.x.base}@{float(p.x.s):.12g}#{p.v:.12g}"
    raise TypeError(f"cannot serialize {type(p).__name__}")


def _parse_word(text: str) -> CantorWord:
    return CantorWord(tuple(int(c) for c in text))


def parse_point(text: str):
    kind, _, body = text.partition(":")
    if kind == "b":
        return _parse_word(body)
    if kind == "s":
        word, _, s = body.partition("@")
        return SolenoidPoint(_parse_word(word), float(s))
    if kind == "g":
        word, _, rest = body.partition("@")
        s, _, v = rest.partition("#")
        return GraphPoint(SolenoidPoint(_parse_word(word), float(s)), float(v))
    raise ValueError(f"unknown point syntax: {text!r}")
