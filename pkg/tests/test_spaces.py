import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from slovaklab.spaces import (
    CantorWord,
    CompactifiedInteger,
    DepthMismatchError,
    GraphPoint,
    INF_POINT,
    SolenoidPoint,
    UnsupportedSpaceError,
    cantor_distance,
    compactified_distance,
    epsilon_net,
    format_point,
    graph_distance,
    parse_point,
    solenoid_distance,
    _phi,
)

words = st.integers(0, 255).map(lambda v: CantorWord.from_int(v, 8))
compact_ints = st.one_of(st.just(INF_POINT),
                         st.integers(-50, 50).map(CompactifiedInteger))


def sol(v, s):
    return SolenoidPoint(CantorWord.from_int(v, 4), s)


class TestCantorWord:
    def test_roundtrip(self):
        for v in range(16):
            assert CantorWord.from_int(v, 4).to_int() == v

    def test_validation(self):
        with pytest.raises(ValueError):
            CantorWord(())
        with pytest.raises(ValueError):
            CantorWord((0, 2))

    def test_distance_values(self):
        a = CantorWord((0, 0, 0, 0))
        assert cantor_distance(a, CantorWord((1, 0, 0, 0))) == 1.0
        assert cantor_distance(a, CantorWord((0, 0, 1, 0))) == 0.25
        assert cantor_distance(a, a) == 0.0

    def test_depth_mismatch(self):
        with pytest.raises(DepthMismatchError):
            cantor_distance(CantorWord((0,)), CantorWord((0, 1)))

    @given(words, words, words)
    @settings(max_examples=60)
    def test_ultrametric(self, a, b, c):
        assert cantor_distance(a, c) <= max(cantor_distance(a, b),
                                            cantor_distance(b, c)) + 1e-15

    @given(words, words)
    @settings(max_examples=60)
    def test_metric_axioms(self, a, b):
        d = cantor_distance(a, b)
        assert d == cantor_distance(b, a)
        assert (d == 0) == (a == b)


class TestCompactified:
    def test_phi_injective_near_zero(self):
        values = [_phi(CompactifiedInteger(k)) for k in range(-3, 4)]
        values.append(_phi(INF_POINT))
        assert len(set(values)) == len(values)

    def test_infinity_limit(self):
        assert compactified_distance(CompactifiedInteger(10 ** 6),
                                     INF_POINT) < 1e-5

    @given(compact_ints, compact_ints, compact_ints)
    @settings(max_examples=60)
    def test_triangle(self, a, b, c):
        assert compactified_distance(a, c) <= (
            compactified_distance(a, b) + compactified_distance(b, c) + 1e-15)

    @given(compact_ints, compact_ints)
    @settings(max_examples=60)
    def test_identity_of_indiscernibles(self, a, b):
        assert (compactified_distance(a, b) == 0) == (a == b)


class TestSolenoid:
    def test_seam_identification(self):
        # approaching the seam from below matches the odometer image above
        c = CantorWord.from_int(5, 4)
        h_c = CantorWord.from_int(6, 4)
        d = solenoid_distance(SolenoidPoint(c, 0.9), SolenoidPoint(h_c, 0.0))
        assert d == pytest.approx(0.1)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            SolenoidPoint(CantorWord.zeros(4), 1.0)

    def test_metric_axioms_exhaustive(self):
        pts = [sol(v, s / 8) for v in range(16) for s in range(8)]
        import numpy as np

        from slovaklab.entropy import pairwise_matrix

        d = pairwise_matrix("solenoid", pts).astype(float)
        assert np.allclose(d, d.T)
        assert (np.diag(d) == 0).all()
        off = d + np.eye(len(pts)) * 10
        assert off.min() > 0
        # triangle inequality over the full grid
        n = len(pts)
        viol = (d[:, :, None] > d[:, None, :] + d[None, :, :] + 1e-6)
        assert not viol.any()

    def test_graph_distance_is_max(self):
        a = GraphPoint(sol(0, 0.0), 0.2)
        b = GraphPoint(sol(0, 0.1), 0.9)
        assert graph_distance(a, b) == pytest.approx(0.7)


class TestNets:
    def test_cantor_net_complete(self):
        net = epsilon_net("cantor", 0.3, 4)
        assert len(net) == 16

    def test_fullshift_net_size(self):
        net = epsilon_net("fullshift", 0.4, 10)
        assert len(net) == 4096  # free coordinates -1..10

    def test_compactint_net_covers(self):
        net = epsilon_net("compactint", 0.25, 4)
        assert INF_POINT in net
        # every representable point is within eps of a net point
        for k in range(-200, 201):
            p = CompactifiedInteger(k)
            assert min(compactified_distance(p, q) for q in net) <= 0.25

    def test_unknown_space(self):
        with pytest.raises(UnsupportedSpaceError):
            epsilon_net("banach", 0.5)

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            epsilon_net("cantor", 0.0)


class TestSerialization:
    @pytest.mark.parametrize("p", [
        CantorWord((0, 1, 1, 0)),
        SolenoidPoint(CantorWord((1, 0, 1, 0)), 0.625),
        GraphPoint(SolenoidPoint(CantorWord((0, 0, 1, 1)), 0.25), 0.41),
    ])
    def test_roundtrip(self, p):
        q = parse_point(format_point(p))
        assert type(q) is type(p)
        if isinstance(p, CantorWord):
            assert q == p
        elif isinstance(p, SolenoidPoint):
            assert solenoid_distance(p, q) < 1e-9
        else:
            assert graph_distance(p, q) < 1e-9

    def test_bad_syntax(self):
        with pytest.raises(ValueError):
            parse_point("x:123")
