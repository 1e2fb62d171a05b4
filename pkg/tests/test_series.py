"""Aggregation into fixed bins and series validation."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from flowcast.errors import EmptyInput, RecordBeforeStart
from flowcast.pcu import ClassifiedCount, PcuTable, VehicleClass, to_pcu
from flowcast.series import FlowSeries, aggregate, validate_series

TABLE = PcuTable.default()


def test_single_record_single_bin():
    series = aggregate([ClassifiedCount(0, VehicleClass.BUS, 1)], TABLE, 300)
    assert series.values == (3.0,)
    assert series.start_time == 0
    assert series.bin_duration == 300


def test_two_records_same_half_open_bin():
    records = [
        ClassifiedCount(0, VehicleClass.PRIVATE_CAR, 2),
        ClassifiedCount(299, VehicleClass.BICYCLE, 2),
    ]
    assert aggregate(records, TABLE, 300).values == (3.0,)


def test_boundary_timestamp_opens_next_bin():
    records = [
        ClassifiedCount(0, VehicleClass.BUS, 1),
        ClassifiedCount(300, VehicleClass.BUS, 1),
    ]
    assert aggregate(records, TABLE, 300).values == (3.0, 3.0)


def test_start_time_truncates_down_to_bin_boundary():
    series = aggregate([ClassifiedCount(750, VehicleClass.BUS, 1)], TABLE, 300)
    assert series.start_time == 600


def test_interior_bins_zero_filled():
    records = [
        ClassifiedCount(0, VehicleClass.BUS, 1),
        ClassifiedCount(950, VehicleClass.BUS, 2),
    ]
    assert aggregate(records, TABLE, 300).values == (3.0, 0.0, 0.0, 6.0)


def test_explicit_start_time_excluding_record_fails():
    records = [ClassifiedCount(100, VehicleClass.BUS, 1)]
    with pytest.raises(RecordBeforeStart) as excinfo:
        aggregate(records, TABLE, 300, start_time=300)
    assert excinfo.value.timestamp == 100


def test_empty_records_rejected():
    with pytest.raises(EmptyInput):
        aggregate([], TABLE, 300)


def test_bad_bin_duration_rejected():
    with pytest.raises(ValueError):
        aggregate([ClassifiedCount(0, VehicleClass.BUS, 1)], TABLE, 0)
    with pytest.raises(ValueError):
        FlowSeries(0, 0, (1.0,))


record_lists = st.lists(
    st.builds(
        ClassifiedCount,
        st.integers(min_value=0, max_value=20_000),
        st.sampled_from(list(VehicleClass)),
        st.integers(min_value=0, max_value=500),
    ),
    min_size=1,
    max_size=60,
)


@given(record_lists)
def test_aggregation_conserves_total_pcu(records):
    series = aggregate(records, TABLE, 300)
    total = 0.0
    for r in records:
        total += to_pcu(TABLE, {r.vehicle_class: r.count})
    assert math.isclose(sum(series.values), total, rel_tol=1e-9, abs_tol=1e-9)


@given(record_lists, st.integers(min_value=0, max_value=2**32))
def test_aggregation_order_independent(records, seed):
    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    assert aggregate(records, TABLE, 300) == aggregate(shuffled, TABLE, 300)


@given(record_lists.filter(lambda rs: max(r.timestamp for r in rs) < 19_800))
def test_pairwise_summed_bins_match_double_bin(records):
    fine = aggregate(records, TABLE, 300, start_time=0)
    coarse = aggregate(records, TABLE, 600, start_time=0)
    padded = list(fine.values) + [0.0] * (2 * len(coarse.values) - len(fine.values))
    for i, coarse_value in enumerate(coarse.values):
        assert math.isclose(padded[2 * i] + padded[2 * i + 1], coarse_value, rel_tol=1e-9, abs_tol=1e-9)


def test_validate_accepts_well_formed_series():
    assert validate_series(FlowSeries(0, 300, (225.0, 927.0))) == []


def test_validate_reports_zero_length():
    issues = validate_series(FlowSeries(0, 300, ()))
    assert [i.kind for i in issues] == ["zero_length"]


def test_validate_reports_negative_value_with_index():
    issues = validate_series(FlowSeries(0, 300, (-1.0,)))
    assert [(i.kind, i.index) for i in issues] == [("negative_value", 0)]


def test_validate_reports_non_finite():
    issues = validate_series(FlowSeries(0, 300, (1.0, float("nan"), float("inf"))))
    assert [(i.kind, i.index) for i in issues] == [
        ("non_finite_value", 1),
        ("non_finite_value", 2),
    ]


def test_tail_drops_first_bin():
    series = FlowSeries(600, 300, (1.0, 2.0, 3.0))
    tail = series.tail()
    assert tail.start_time == 900
    assert tail.values == (2.0, 3.0)
