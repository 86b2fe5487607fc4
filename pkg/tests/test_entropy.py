import math

import numpy as np
import pytest

from slovaklab.entropy import (
    InvariantViolation,
    SepRow,
    SeparationReport,
    elementwise_distance,
    entropy_estimate,
    pairwise_matrix,
    rho_n,
    rho_running,
    sep_count,
    sep_from_matrix,
)
from slovaklab.spaces import CantorWord, epsilon_net
from slovaklab.systems import (
    ShiftWindow,
    make_fullshift,
    make_odometer,
    make_plusone,
    make_solenoid,
    sample_points,
)


class TestPairwiseKernels:
    @pytest.mark.parametrize("system,maker", [
        ("cantor", make_odometer), ("fullshift", make_fullshift),
        ("compactint", make_plusone), ("solenoid", make_solenoid),
    ])
    def test_matches_scalar_metric(self, system, maker):
        h = maker(5)
        pts = sample_points(h, 24)
        mat = pairwise_matrix(h.space_id, pts)
        for i in range(0, len(pts), 5):
            for j in range(0, len(pts), 7):
                assert mat[i, j] == pytest.approx(
                    h.metric(pts[i], pts[j]), abs=1e-6)

    def test_elementwise_matches_pairwise(self):
        for maker in (make_odometer, make_fullshift, make_plusone,
                      make_solenoid):
            h = maker(5)
            pts = sample_points(h, 16)
            last = len(pts) - 1
            mat = pairwise_matrix(h.space_id, pts)
            vec = elementwise_distance(h.space_id, pts, list(reversed(pts)))
            for i in range(len(pts)):
                assert vec[i] == pytest.approx(mat[i, last - i], abs=1e-6)

    def test_unknown_space(self):
        with pytest.raises(ValueError):
            pairwise_matrix("banach", [1, 2])


class TestRho:
    def test_rho_1_is_base_metric(self):
        h = make_fullshift(6)
        a = ShiftWindow.from_coords(6, ones=(3,))
        b = ShiftWindow.from_coords(6, ones=())
        assert rho_n(h, a, b, 1) == h.metric(a, b)

    def test_rho_grows_as_mismatch_shifts_in(self):
        h = make_fullshift(6)
        a = ShiftWindow.from_coords(6, ones=(3,))
        b = ShiftWindow.from_coords(6, ones=())
        assert rho_n(h, a, b, 4) == 1.0  # coord 3 reaches 0 after 3 steps

    def test_running_is_monotone(self):
        h = make_fullshift(5)
        pts = sample_points(h, 32)
        prev = None
        for n, d in rho_running(h, pts, 6):
            if prev is not None:
                assert (d >= prev - 1e-9).all()
            prev = d.copy()

    def test_validation(self):
        h = make_odometer(4)
        with pytest.raises(ValueError):
            rho_n(h, CantorWord.zeros(4), CantorWord.zeros(4), 0)


class TestSepCount:
    def test_fullshift_exact_counts(self):
        h = make_fullshift(6)
        K = epsilon_net("fullshift", 0.4, 6)  # 256 windows, coords -1..6
        for n in (4, 5, 6):
            res = sep_count(h, K, n, 0.4)
            assert res.exact
            assert res.count == min(2 ** (n + 2), len(K))

    def test_odometer_constant_counts(self):
        h = make_odometer(8)
        K = epsilon_net("cantor", 0.3, 8)
        counts = {sep_count(h, K, n, 0.3).count for n in (1, 4, 8)}
        assert counts == {4}

    def test_greedy_flagged_above_threshold(self):
        h = make_odometer(6)
        K = epsilon_net("cantor", 0.3, 6)
        res = sep_count(h, K, 2, 0.3, exact_threshold=10)
        assert not res.exact
        assert res.count >= 1

    def test_certificate_rejects_bad_subset(self):
        d = np.array([[0, 0.1], [0.1, 0]], dtype=np.float32)
        res = sep_from_matrix(d, 0.05)
        assert res.count == 2
        assert not res.verify_pairwise(d, 0.2)

    def test_validation(self):
        h = make_odometer(4)
        with pytest.raises(ValueError):
            sep_count(h, [], 2, 0.1)
        with pytest.raises(ValueError):
            sep_count(h, [CantorWord.zeros(4)], 2, 0.0)


class TestEntropyEstimate:
    def test_fullshift_rate_log2(self):
        h = make_fullshift(6)
        K = epsilon_net("fullshift", 0.4, 6)
        report = entropy_estimate(h, K, [(n, 0.4) for n in range(2, 7)])
        assert report.rates[0.4] == pytest.approx(math.log(2), rel=1e-9)

    def test_odometer_rate_zero(self):
        h = make_odometer(8)
        K = epsilon_net("cantor", 0.3, 8)
        report = entropy_estimate(h, K, [(n, 0.3) for n in (2, 4, 6, 8)])
        assert abs(report.rates[0.3]) < 1e-12

    def test_report_invariants_raise(self):
        rows = [SepRow(2, 0.4, 8, True), SepRow(4, 0.4, 4, True)]
        rep = SeparationReport(rows, {})
        with pytest.raises(InvariantViolation):
            rep.check_invariants()

    def test_eps_monotonicity_checked(self):
        rows = [SepRow(2, 0.4, 8, True), SepRow(2, 0.2, 4, True)]
        rep = SeparationReport(rows, {})
        with pytest.raises(InvariantViolation):
            rep.check_invariants()

    def test_csv_shape(self):
        h = make_odometer(6)
        K = epsilon_net("cantor", 0.3, 6)
        report = entropy_estimate(h, K, [(2, 0.3), (4, 0.3)])
        lines = report.to_csv_lines()
        assert lines[0] == "n,eps,count,exact,rate"
        assert len(lines) == 3
