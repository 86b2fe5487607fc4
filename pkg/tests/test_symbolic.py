import pytest

from slovaklab.spaces import CantorWord, CompactifiedInteger, INF_POINT, cantor_distance
from slovaklab.symbolic import (
    cantor_prefix_partition,
    compactint_partition,
    complexity,
    equicontinuity_detector,
    factor_language,
    is_periodically_recurrent,
    measured_mesh,
    p_name,
    partition_for,
    shift_central_partition,
    system_language,
)
from slovaklab.systems import (
    GOLDEN_ALPHA,
    make_fullshift,
    make_identity,
    make_odometer,
    make_plusone,
    sample_points,
    shift_distance,
    compactified_distance,
    sturmian_factors,
)


class TestPartitions:
    def test_cantor_prefix_counts(self):
        part = cantor_prefix_partition(2, 8)
        atoms = {part.atom_of(CantorWord.from_int(v, 8)) for v in range(256)}
        assert atoms == set(range(4))

    def test_measured_mesh_within_declared(self):
        h = make_fullshift(8)
        part = shift_central_partition(1, 8)
        pts = sample_points(h, 128)
        assert measured_mesh(part, pts, shift_distance) <= part.mesh + 1e-12

    def test_cantor_mesh_measured(self):
        part = cantor_prefix_partition(3, 6)
        pts = [CantorWord.from_int(v, 6) for v in range(64)]
        assert measured_mesh(part, pts, cantor_distance) == part.mesh

    def test_min_gap_holds(self):
        part = cantor_prefix_partition(2, 6)
        pts = [CantorWord.from_int(v, 6) for v in range(64)]
        worst = min(cantor_distance(a, b)
                    for i, a in enumerate(pts) for b in pts[i + 1:]
                    if part.atom_of(a) != part.atom_of(b))
        assert worst >= part.min_gap

    def test_compactint_tail_atom(self):
        part = compactint_partition(3)
        assert part.atom_of(INF_POINT) == 0
        assert part.atom_of(CompactifiedInteger(99)) == 0
        assert part.atom_of(CompactifiedInteger(-3)) == 1
        assert part.atom_of(CompactifiedInteger(3)) == 7
        assert part.size == 8

    def test_partition_for_meets_mesh(self):
        for sid, eps in (("odometer", 0.2), ("fullshift", 0.3),
                         ("plusone", 0.25)):
            from slovaklab.systems import make_system

            h = make_system(sid, depth=8)
            part = partition_for(h, eps)
            assert part.mesh <= eps

    def test_partition_for_rejects_solenoid(self):
        from slovaklab.systems import make_solenoid

        with pytest.raises(ValueError):
            partition_for(make_solenoid(4), 0.5)


class TestNamesAndComplexity:
    def test_p_name_length(self):
        h = make_odometer(6)
        part = partition_for(h, 0.5)
        nm = p_name(h, CantorWord.zeros(6), part, 5)
        assert nm == (0, 1, 0, 1, 0)

    def test_sturmian_complexity(self):
        src = factor_language(lambda n: sturmian_factors(GOLDEN_ALPHA, n),
                              "sturmian")
        assert [complexity(src, n) for n in range(1, 9)] == list(range(2, 10))

    def test_full_shift_complexity_doubles(self):
        h = make_fullshift(8)
        src = system_language(h, partition_for(h, 0.5), sample_size=256)
        assert complexity(src, 3) == 8
        assert complexity(src, 6) == 64

    def test_odometer_complexity_stabilizes(self):
        h = make_odometer(8)
        src = system_language(h, partition_for(h, 0.5), sample_size=64)
        assert complexity(src, 4) == complexity(src, 8) == 2

    def test_space_mismatch(self):
        h = make_odometer(6)
        with pytest.raises(ValueError):
            p_name(h, CantorWord.zeros(6), shift_central_partition(1, 6), 3)


class TestRecurrence:
    def test_odometer_prefix_period(self):
        h = make_odometer(8)
        v = is_periodically_recurrent(h, CantorWord.zeros(8), 0.3, 64)
        assert v.kind == "yes-witnessed" and v.period == 4

    def test_identity_period_one(self):
        h = make_identity("cantor", cantor_distance, 6)
        v = is_periodically_recurrent(h, CantorWord.zeros(6), 0.3, 32)
        assert v.kind == "yes-witnessed" and v.period == 1

    def test_plusone_escapes(self):
        h = make_plusone(8)
        v = is_periodically_recurrent(h, CompactifiedInteger(0), 0.3, 100)
        assert v.kind == "no-witnessed"
        assert all(k in v.escapes for k in range(1, 11))

    def test_infinity_is_fixed(self):
        h = make_plusone(8)
        v = is_periodically_recurrent(h, INF_POINT, 0.1, 64)
        assert v.kind == "yes-witnessed" and v.period == 1

    def test_validation(self):
        h = make_odometer(4)
        with pytest.raises(ValueError):
            is_periodically_recurrent(h, CantorWord.zeros(4), -1.0, 10)


class TestDetector:
    def test_odometer_equicontinuous_evidence(self):
        v = equicontinuity_detector(make_odometer(10))
        assert v.kind == "equicontinuous-evidence"
        assert v.witness is None
        for c_half, c_full in v.counts.values():
            assert c_half == c_full

    def test_fullshift_not_equicontinuous(self):
        v = equicontinuity_detector(make_fullshift(10))
        assert v.kind == "not-equicontinuous"
        assert v.witness is not None

    def test_plusone_not_equicontinuous(self):
        v = equicontinuity_detector(make_plusone(10))
        assert v.kind == "not-equicontinuous"
        assert v.witness.space_id == "compactint"
