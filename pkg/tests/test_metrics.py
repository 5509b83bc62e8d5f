import dataclasses

import pytest
from hypothesis import given, strategies as st

from netimmune.engine import run
from netimmune.experiments import reference
from netimmune.metrics import (
    FIELDS, MetricsRecord, csv_text, elimination_step, json_text, read_csv, summarize, write_outputs,
)


def rows(infected, malware=None):
    """Hand-built series; ``malware`` holds (sent, delivered, blocked) per row."""
    malware = malware or [(0, 0, 0)] * len(infected)
    return [MetricsRecord(step=i + 1, infected_count=n, malware_sent=s, malware_delivered=d, malware_blocked=b,
                          legit_sent=10 * (i + 1), legit_blocked=i, control_packets=i, securityware_packets=1)
            for i, (n, (s, d, b)) in enumerate(zip(infected, malware))]


def test_hand_built_summary():
    ts = rows([1, 3, 2, 0, 0], [(2, 1, 0), (6, 3, 1), (8, 5, 3), (8, 5, 3), (8, 5, 3)])
    s = summarize(ts, cooldown=2)
    assert s.prevalence_auc == 6 and s.peak_prevalence == 3
    assert s.eliminated and s.time_to_elimination == 4 and s.status == "eliminated"
    assert s.fnr == pytest.approx(5 / 8)
    assert s.fpr == pytest.approx(4 / 50)
    total = 50 + 8 + 4 + 1
    assert s.overhead == pytest.approx(5 / total)


def test_in_flight_malware_blocks_elimination():
    ts = rows([1, 0, 0, 0], [(2, 0, 0), (2, 1, 0), (2, 2, 0), (2, 2, 0)])
    assert elimination_step(ts, cooldown=2) == 3
    assert elimination_step(ts, cooldown=3) is None
    assert summarize(ts, cooldown=3).time_to_elimination == "none"


def test_all_zero_series_eliminated_at_first_row():
    assert elimination_step(rows([0, 0]), cooldown=10) == 1


def test_empty_series_not_run():
    s = summarize([])
    assert s.status == "not run" and not s.eliminated


def test_csv_header_and_round_trip(tmp_path):
    ts = rows([1, 2, 0])
    text = csv_text(ts)
    assert text.splitlines()[0] == ",".join(FIELDS)
    assert FIELDS[0] == "step" and "reports_filed" in FIELDS
    csv_path, json_path = write_outputs(ts, summarize(ts), tmp_path / "sub" / "out")
    assert read_csv(csv_path) == ts
    assert json_path.read_text() == json_text(summarize(ts))


def test_summary_recomputed_from_csv(tmp_path):
    res = run(reference(**{"world.endpoints": 30, "world.routers": 5, "run.horizon": 30,
                           "defense.architectures": ["router_filter"]}))
    csv_path, _ = write_outputs(res.timeseries, res.summary, tmp_path / "r")
    assert summarize(read_csv(csv_path)) == res.summary


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=30))
def test_rates_stay_in_unit_interval(counts):
    ts, sent, deliv, blocked = [], 0, 0, 0
    for i, (n, d, b) in enumerate(counts):
        sent += d + b + 1
        deliv += d
        blocked += b
        ts.append(MetricsRecord(step=i + 1, infected_count=n, malware_sent=sent, malware_delivered=deliv,
                                malware_blocked=blocked, legit_sent=sent, legit_blocked=blocked))
    s = summarize(ts)
    assert 0.0 <= s.fpr <= 1.0 and 0.0 <= s.fnr <= 1.0 and 0.0 <= s.overhead <= 1.0
    if s.eliminated:
        assert s.time_to_elimination <= len(ts)


def test_record_fields_are_non_negative_in_a_run():
    res = run(reference(**{"world.endpoints": 30, "world.routers": 5, "run.horizon": 20,
                           "defense.architectures": ["endpoint", "p2p_securityware"]}))
    for rec in res.timeseries:
        assert all(v >= 0 for v in dataclasses.astuple(rec))
        assert rec.malware_delivered + rec.malware_blocked <= rec.malware_sent
