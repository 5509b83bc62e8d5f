"""Per-step metrics, run summaries and the CSV/JSON output contract."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass
from pathlib import Path


@dataclass
class MetricsRecord:
    step: int = 0
    infected_count: int = 0
    quarantined_count: int = 0
    adopter_count: int = 0
    legit_sent: int = 0
    legit_delivered: int = 0
    legit_blocked: int = 0
    spam_sent: int = 0
    spam_delivered: int = 0
    spam_blocked: int = 0
    malware_sent: int = 0
    malware_delivered: int = 0
    malware_blocked: int = 0
    securityware_packets: int = 0
    control_packets: int = 0
    detectors_naive: int = 0
    detectors_effector: int = 0
    detectors_memory: int = 0
    distinct_strains_alive: int = 0
    reports_filed: int = 0

    @property
    def malware_in_flight(self) -> int:
        return self.malware_sent - self.malware_delivered - self.malware_blocked

    @property
    def total_sent(self) -> int:
        return (self.legit_sent + self.spam_sent + self.malware_sent
                + self.securityware_packets + self.control_packets)


FIELDS = [f.name for f in dataclasses.fields(MetricsRecord)]


@dataclass
class Summary:
    eliminated: bool
    time_to_elimination: int | str
    prevalence_auc: int
    fpr: float
    fnr: float
    overhead: float
    peak_prevalence: int
    status: str


def _ratio(num, den):
    return num / den if den else 0.0


def elimination_step(timeseries, cooldown=10, start=0):
    """Step of the first row (at index ``start`` or later) opening a zero run
    of at least ``cooldown`` rows, or None.  Zero means no infected host and
    no malware in flight.  A series that is entirely zero counts as
    eliminated at its first row."""
    rows = timeseries[start:]
    if rows and all(r.infected_count == 0 and r.malware_in_flight == 0 for r in rows):
        return rows[0].step
    run_start, length = None, 0
    for r in rows:
        if r.infected_count == 0 and r.malware_in_flight == 0:
            if length == 0:
                run_start = r.step
            length += 1
            if length >= cooldown:
                return run_start
        else:
            length = 0
    return None


def summarize(timeseries, cooldown: int = 10) -> Summary:
    if not timeseries:
        return Summary(False, "none", 0, 0.0, 0.0, 0.0, 0, "not run")
    last = timeseries[-1]
    when = elimination_step(timeseries, cooldown)
    return Summary(
        eliminated=when is not None,
        time_to_elimination=when if when is not None else "none",
        prevalence_auc=sum(r.infected_count for r in timeseries),
        fpr=_ratio(last.legit_blocked, last.legit_sent),
        fnr=_ratio(last.malware_delivered, last.malware_sent),
        overhead=_ratio(last.securityware_packets + last.control_packets, last.total_sent),
        peak_prevalence=max(r.infected_count for r in timeseries),
        status="eliminated" if when is not None else "persisting",
    )


def csv_text(timeseries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDS)
    for rec in timeseries:
        writer.writerow(dataclasses.astuple(rec))
    return buf.getvalue()


def json_text(summary: Summary) -> str:
    return json.dumps(dataclasses.asdict(summary), indent=2, sort_keys=False) + "\n"


def write_outputs(timeseries, summary: Summary, out_path) -> tuple:
    out = Path(out_path)
    csv_path = out.with_name(out.name + ".csv")
    json_path = out.with_name(out.name + ".json")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(csv_text(timeseries), encoding="utf-8", newline="")
        json_path.write_text(json_text(summary), encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write outputs at {out}: {exc}") from exc
    return csv_path, json_path


def read_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [MetricsRecord(**{k: int(v) for k, v in row.items()}) for row in rows]
