"""
Descriptive statistics of the sanctions list and emission of every
analysis as plot-ready CSV/JSON tables with a checksummed manifest.

Row order is fixed by documented sort keys so repeated runs are
byte-identical:

* dataset_stats: section order (country, violation, kind, timeline, currency), then key
* flow_metrics: entity_id, then window in PreSanction/Post7/Post30/UpToDate order
* violation_table: violation code in taxonomy order, codes without entities omitted
* balance_histogram: stage, then bucket from Zero upwards
* activity_counts: window order
* behaviour_report: category in taxonomy order, then Labelled and Unlabelled totals
* behaviour_by_entity: entity_id, steps, category
* subgraph edge lists: (src, dst, kind, value)
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Sequence

from .behaviour import BehaviourReport
from .flow import BalanceBucket, EntityFlow, ViolationRow, WindowLabel
from .graph import EDGE_COLUMNS, edge_rows
from .ingest import BehaviourCategory, EntityKind, SanctionedEntity, ViolationCode

CENT = Decimal("0.01")


class EmitError(OSError):
    pass


@dataclass
class DatasetStats:
    entities_per_country: dict[str, int] = field(default_factory=dict)
    entities_per_violation: dict[ViolationCode, int] = field(default_factory=dict)
    sanction_timeline: list[tuple[date, ViolationCode, int]] = field(default_factory=list)
    addresses_per_entity_kind: dict[EntityKind, tuple[int, int]] = field(default_factory=dict)
    # all currencies of the raw list: currency -> (entities, addresses)
    currencies: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def n_entities(self) -> int:
        return sum(self.entities_per_country.values())


def dataset_stats(
    entities: Sequence[SanctionedEntity], currencies: dict[str, tuple[int, int]] | None = None
) -> DatasetStats:
    """Entity counts per country, violation, kind and sanction date.

    An entity carrying k violation codes is counted once under each of them.
    """
    countries = Counter(e.country for e in entities)
    violations = Counter(code for e in entities for code in e.violations)
    timeline = Counter((e.sanction_date, code) for e in entities for code in e.violations)
    kinds: dict[EntityKind, tuple[int, int]] = {}
    for e in entities:
        n_ent, n_addr = kinds.get(e.kind, (0, 0))
        kinds[e.kind] = (n_ent + 1, n_addr + len(e.addresses))
    return DatasetStats(
        entities_per_country=dict(sorted(countries.items())),
        entities_per_violation={c: violations[c] for c in ViolationCode if violations[c]},
        sanction_timeline=[(d, c, n) for (d, c), n in sorted(timeline.items())],
        addresses_per_entity_kind={k: kinds[k] for k in EntityKind if k in kinds},
        currencies=dict(currencies or {}),
    )


def usd(value: Decimal) -> str:
    return str(value.quantize(CENT, rounding=ROUND_HALF_EVEN))


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()

    def json_text(self) -> str:
        records = [dict(zip(self.columns, row)) for row in self.rows]
        return json.dumps(records, indent=2, default=str) + "\n"


# -- table builders -----------------------------------------------------------

STATS_COLUMNS = ("section", "key", "detail", "n_entities", "n_addresses")
FLOW_COLUMNS = (
    "entity_id",
    "window",
    "window_start",
    "window_end",
    "n_tx_in",
    "n_tx_out",
    "received_sat",
    "sent_sat",
    "received_usd",
    "sent_usd",
    "balance_end_sat",
)
VIOLATION_COLUMNS = (
    "violation",
    "n_entities",
    "tx_count_pre",
    "tx_count_uptodate",
    "usd_volume_pre",
    "usd_volume_uptodate",
)
HISTOGRAM_COLUMNS = ("stage", "bucket", "n_entities")
ACTIVITY_COLUMNS = ("window", "n_entities_receiving", "n_entities_sending")
BY_ENTITY_COLUMNS = ("entity_id", "steps", "category", "distinct_entities", "distinct_addresses")


def stats_table(stats: DatasetStats | None) -> Table:
    t = Table("dataset_stats", STATS_COLUMNS)
    if stats is None:
        return t
    for country, n in stats.entities_per_country.items():
        t.rows.append(("country", country, "", n, ""))
    for code, n in stats.entities_per_violation.items():
        t.rows.append(("violation", code.value, "", n, ""))
    for kind, (n_ent, n_addr) in stats.addresses_per_entity_kind.items():
        t.rows.append(("kind", kind.value, "", n_ent, n_addr))
    for day, code, n in stats.sanction_timeline:
        t.rows.append(("timeline", day.isoformat(), code.value, n, ""))
    for currency, (n_ent, n_addr) in stats.currencies.items():
        t.rows.append(("currency", currency, "", n_ent, n_addr))
    return t


def flow_table(flows: Sequence[EntityFlow]) -> Table:
    t = Table("flow_metrics", FLOW_COLUMNS)
    for flow in sorted(flows, key=lambda f: f.entity.entity_id):
        for label in WindowLabel:
            m = flow.metrics.get(label)
            if m is None:
                continue
            w = flow.windows[label]
            t.rows.append(
                (
                    flow.entity.entity_id,
                    label.value,
                    w.start,
                    w.end,
                    m.n_tx_in,
                    m.n_tx_out,
                    m.received_sat,
                    m.sent_sat,
                    usd(m.received_usd),
                    usd(m.sent_usd),
                    m.balance_end_sat,
                )
            )
    return t


def violation_table(rows: dict[ViolationCode, ViolationRow] | None) -> Table:
    t = Table("violation_table", VIOLATION_COLUMNS)
    for code in ViolationCode:
        row = (rows or {}).get(code)
        if row is None or not row.n_entities:
            continue
        t.rows.append(
            (
                code.value,
                row.n_entities,
                row.tx_count_pre,
                row.tx_count_uptodate,
                usd(row.usd_volume_pre),
                usd(row.usd_volume_uptodate),
            )
        )
    return t


def histogram_table(histograms: dict[WindowLabel, dict[BalanceBucket, int]] | None) -> Table:
    t = Table("balance_histogram", HISTOGRAM_COLUMNS)
    for stage in WindowLabel:
        if histograms is None or stage not in histograms:
            continue
        for bucket in BalanceBucket:
            t.rows.append((stage.value, bucket.value, histograms[stage].get(bucket, 0)))
    return t


def activity_table(counts: dict[WindowLabel, tuple[int, int]] | None) -> Table:
    t = Table("activity_counts", ACTIVITY_COLUMNS)
    for label in WindowLabel:
        if counts is None or label not in counts:
            continue
        receiving, sending = counts[label]
        t.rows.append((label.value, receiving, sending))
    return t


def behaviour_table(reports: Sequence[BehaviourReport]) -> Table:
    """Side-by-side category counts, one column pair per step count."""
    reports = sorted(reports, key=lambda r: r.steps)
    columns = ["category"]
    for r in reports:
        columns += [f"distinct_entities_{r.steps}step", f"distinct_addresses_{r.steps}step"]
    t = Table("behaviour_report", tuple(columns))
    for cat in BehaviourCategory:
        row: list = [cat.value]
        for r in reports:
            c = r.categories[cat]
            row += [c.distinct_entities, c.distinct_addresses]
        t.rows.append(tuple(row))
    labelled: list = ["Labelled"]
    unlabelled: list = ["Unlabelled"]
    for r in reports:
        labelled += [r.distinct_label_entities, r.labelled_total]
        unlabelled += ["", r.unlabelled_total]
    t.rows += [tuple(labelled), tuple(unlabelled)]
    return t


def behaviour_by_entity_table(reports: Sequence[BehaviourReport]) -> Table:
    t = Table("behaviour_by_entity", BY_ENTITY_COLUMNS)
    rows = []
    for r in reports:
        for entity_id, cats in r.per_entity.items():
            for cat in BehaviourCategory:
                c = cats[cat]
                if c.distinct_addresses:
                    rows.append((entity_id, r.steps, cat.value, c.distinct_entities, c.distinct_addresses))
    order = {c.value: i for i, c in enumerate(BehaviourCategory)}
    t.rows = sorted(rows, key=lambda row: (row[0], row[1], order[row[2]]))
    return t


_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


def subgraph_tables(reports: Sequence[BehaviourReport]) -> list[Table]:
    tables = []
    for r in sorted(reports, key=lambda r: r.steps):
        for entity_id in sorted(r.subgraphs):
            name = f"subgraphs/{_UNSAFE.sub('_', entity_id)}_{r.steps}step"
            tables.append(Table(name, EDGE_COLUMNS, edge_rows(r.subgraphs[entity_id])))
    return tables


@dataclass
class Analyses:
    stats: DatasetStats | None = None
    flows: list[EntityFlow] = field(default_factory=list)
    violations: dict[ViolationCode, ViolationRow] | None = None
    histograms: dict[WindowLabel, dict[BalanceBucket, int]] | None = None
    activity: dict[WindowLabel, tuple[int, int]] | None = None
    behaviour: list[BehaviourReport] = field(default_factory=list)

    def tables(self) -> list[Table]:
        tables = [
            stats_table(self.stats),
            flow_table(self.flows),
            violation_table(self.violations),
            histogram_table(self.histograms),
            activity_table(self.activity),
        ]
        if self.behaviour:
            tables += [behaviour_table(self.behaviour), behaviour_by_entity_table(self.behaviour)]
            tables += subgraph_tables(self.behaviour)
        else:
            tables.append(Table("behaviour_report", ("category",)))
        return tables


# -- emission -------------------------------------------------------------------

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ManifestEntry:
    filename: str
    rows: int
    sha256: str


def emit_tables(tables: Sequence[Table], out_dir: str | Path, formats: Sequence[str] = ("csv",)) -> list[ManifestEntry]:
    """Write tables and ``manifest.json``; return the manifest entries."""
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown formats {sorted(unknown)}")
    out = Path(out_dir)
    payloads: list[tuple[str, int, bytes]] = []
    for table in tables:
        for fmt in FORMATS:
            if fmt not in formats:
                continue
            text = table.csv_text() if fmt == "csv" else table.json_text()
            payloads.append((f"{table.name}.{fmt}", len(table.rows), text.encode("utf-8")))
    manifest = [ManifestEntry(name, rows, hashlib.sha256(data).hexdigest()) for name, rows, data in payloads]
    manifest.sort(key=lambda m: m.filename)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, _, data in payloads:
            path = out / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        doc = {"files": [{"filename": m.filename, "rows": m.rows, "sha256": m.sha256} for m in manifest]}
        (out / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise EmitError(f"cannot write outputs to {out}: {exc}") from exc
    return manifest


def emit_all(analyses: Analyses, out_dir: str | Path, formats: Sequence[str] = ("csv",)) -> list[ManifestEntry]:
    return emit_tables(analyses.tables(), out_dir, formats)
