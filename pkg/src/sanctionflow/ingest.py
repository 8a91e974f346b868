"""
Parsers and in-memory indexes for the four analysis inputs.

Inputs are line-delimited JSON transactions, an SDN-style sanctions CSV,
a daily BTC/USD price CSV and a label tagpack CSV.  Everything downstream
works on the validated structures produced here.
"""

from __future__ import annotations

import contextlib
import csv
import gc
import json
import os
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, timedelta
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple, Union

Source = Union[str, os.PathLike, IO[str], Iterable[str]]

SATOSHI_PER_BTC = 100_000_000
_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()


class IngestError(ValueError):
    """Raised for any malformed or inconsistent input record."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = [source] if source else []
        if line is not None:
            where.append(f"line {line}")
        super().__init__(": ".join(where + [message]))


class ViolationCode(str, Enum):
    CYBER2 = "CYBER2"
    DPRK3 = "DPRK3"
    DPRK4 = "DPRK4"
    ELECTION = "ELECTION"
    IFSR = "IFSR"
    ILLICIT_DRUGS = "ILLICIT_DRUGS"
    IRGC = "IRGC"
    NPWMD = "NPWMD"
    RUSSIA = "RUSSIA"
    SDGT = "SDGT"
    SDNTK = "SDNTK"

    @classmethod
    def parse(cls, text: str) -> "ViolationCode":
        # OFAC program tags are written with hyphens (ILLICIT-DRUGS)
        key = text.strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown violation code {text!r}") from None


class EntityKind(str, Enum):
    INDIVIDUAL = "Individual"
    COMPANY = "Company"

    @classmethod
    def parse(cls, text: str) -> "EntityKind":
        key = text.strip().lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown entity kind {text!r}")


class BehaviourCategory(str, Enum):
    EXCHANGE = "Exchange"
    GAMBLING = "Gambling"
    MARKETPLACE = "Marketplace"
    MINING_POOL = "MiningPool"
    MIXER = "Mixer"
    SERVICE = "Service"
    TRADING = "Trading"
    EWALLET = "EWallet"
    RANSOMWARE = "Ransomware"
    SEXTORTION = "Sextortion"
    EXTREMISM = "Extremism"
    OFAC_SANCTIONED = "OfacSanctioned"

    @classmethod
    def parse(cls, text: str) -> "BehaviourCategory":
        key = "".join(ch for ch in text.lower() if ch.isalnum())
        for cat in cls:
            if cat.value.lower() == key:
                return cat
        aliases = {
            "exchanges": cls.EXCHANGE,
            "marketplaces": cls.MARKETPLACE,
            "miningpools": cls.MINING_POOL,
            "mixers": cls.MIXER,
            "services": cls.SERVICE,
            "tradingplatform": cls.TRADING,
            "tradingplatforms": cls.TRADING,
            "extremist": cls.EXTREMISM,
        }
        if key in aliases:
            return aliases[key]
        raise ValueError(f"unknown behaviour category {text!r}")


class Role(str, Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class TxRecord:
    txid: str
    timestamp: int
    inputs: tuple[tuple[str, int], ...]
    outputs: tuple[tuple[str, int], ...]

    @property
    def is_coinbase(self) -> bool:
        return not self.inputs

    @property
    def fee(self) -> int:
        if not self.inputs:
            return 0
        return sum(v for _, v in self.inputs) - sum(v for _, v in self.outputs)


@dataclass(frozen=True)
class SanctionedEntity:
    entity_id: str
    name: str
    kind: EntityKind
    country: str
    sanction_date: date
    violations: frozenset[ViolationCode]
    addresses: frozenset[str]


@dataclass
class PriceTable:
    """Daily USD/BTC prices keyed by UTC calendar date, gap-free over its range."""

    prices: dict[date, Decimal]
    filled: list[date] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.prices)

    @property
    def first_day(self) -> date | None:
        return min(self.prices) if self.prices else None

    @property
    def last_day(self) -> date | None:
        return max(self.prices) if self.prices else None

    def price_on(self, day: date) -> Decimal:
        try:
            return self.prices[day]
        except KeyError:
            raise MissingPriceError(day) from None

    def price_at(self, timestamp: int) -> Decimal:
        return self.price_on(utc_day(timestamp))

    def missing_days(self, records: Iterable[TxRecord]) -> list[date]:
        """Transaction days in `records` that have no price."""
        days = {utc_day(r.timestamp) for r in records}
        return sorted(d for d in days if d not in self.prices)


class MissingPriceError(KeyError):
    def __init__(self, day: date):
        self.day = day
        super().__init__(f"no BTC/USD price for {day.isoformat()}")

    def __str__(self) -> str:
        return self.args[0]


class Label(NamedTuple):
    entity: str
    category: BehaviourCategory


@dataclass
class LabelSet:
    labels: dict[str, Label]
    # addresses found both in the tagpack and the sanctions list
    overlaps: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, address: str) -> bool:
        return address in self.labels

    def get(self, address: str) -> Label | None:
        return self.labels.get(address)


class IndexEntry(NamedTuple):
    timestamp: int
    txid: str
    role: Role
    value: int


class TxIndex:
    """Transaction lookup by txid and by address.

    ``by_address[a]`` holds one :class:`IndexEntry` per (txid, role) that
    touches ``a``, sorted by (timestamp, txid, role).  Repeated outputs (or
    inputs) of one address inside a transaction are merged into a single
    entry carrying the summed value.  Instances are treated as immutable once
    built.
    """

    def __init__(self, by_txid: dict[str, TxRecord], by_address: dict[str, list[IndexEntry]]):
        self.by_txid = by_txid
        self.by_address = by_address
        self.timeline: list[tuple[int, str]] = sorted((r.timestamp, r.txid) for r in by_txid.values())

    def __len__(self) -> int:
        return len(self.by_txid)

    @property
    def first_timestamp(self) -> int | None:
        return self.timeline[0][0] if self.timeline else None

    @property
    def last_timestamp(self) -> int | None:
        return self.timeline[-1][0] if self.timeline else None

    def entries(self, address: str, start: int | None = None, end: int | None = None) -> list[IndexEntry]:
        """Entries of `address` with start <= timestamp < end."""
        entries = self.by_address.get(address)
        if not entries:
            return []
        lo = 0 if start is None else bisect_left(entries, start, key=_entry_ts)
        hi = len(entries) if end is None else bisect_left(entries, end, key=_entry_ts)
        return entries[lo:hi]

    def txids_between(self, start: int, end: int) -> list[str]:
        lo = bisect_left(self.timeline, (start, ""))
        hi = bisect_left(self.timeline, (end, ""))
        return [txid for _, txid in self.timeline[lo:hi]]

    def legs(self, txid: str) -> tuple[dict[str, int], dict[str, int]]:
        """Merged (inputs, outputs) of a transaction as address -> value maps."""
        record = self.by_txid[txid]
        return merge_legs(record.inputs), merge_legs(record.outputs)


def _entry_ts(entry: IndexEntry) -> int:
    return entry.timestamp


def merge_legs(legs: Iterable[tuple[str, int]]) -> dict[str, int]:
    merged: dict[str, int] = {}
    for address, value in legs:
        merged[address] = merged.get(address, 0) + value
    return merged


def utc_day(timestamp: int) -> date:
    return date.fromordinal(_EPOCH_ORDINAL + timestamp // 86400)


def day_start(day: date) -> int:
    """Unix timestamp of 00:00:00 UTC on `day`."""
    return (day.toordinal() - _EPOCH_ORDINAL) * 86400


@contextlib.contextmanager
def _gc_paused() -> Iterator[None]:
    # bulk loads allocate millions of acyclic objects; generational passes over
    # them dominate runtime otherwise
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


@contextlib.contextmanager
def _lines(src: Source) -> Iterator[tuple[str | None, Iterable[str]]]:
    if isinstance(src, (str, os.PathLike)):
        with open(src, newline="", encoding="utf-8") as fh:
            yield os.fspath(src), fh
    else:
        yield getattr(src, "name", None), src


# -- transactions ---------------------------------------------------------


def _parse_legs(raw, what: str) -> tuple[tuple[str, int], ...]:
    if not isinstance(raw, list):
        raise ValueError(f"{what} must be a list")
    legs = []
    for leg in raw:
        if not isinstance(leg, dict):
            raise ValueError(f"{what} entries must be objects")
        address = leg.get("address")
        value = leg.get("value")
        if not isinstance(address, str) or not address:
            raise ValueError(f"{what} entry has no address")
        if not isinstance(value, int) or isinstance(value, bool):
            raise ValueError(f"{what} value for {address} is not an integer")
        if value < 0:
            raise ValueError(f"negative value {value} for {address}")
        legs.append((address, value))
    return tuple(legs)


def parse_transaction_line(line: str) -> TxRecord:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("transaction line is not a JSON object")
    txid = obj.get("txid")
    timestamp = obj.get("timestamp")
    if not isinstance(txid, str) or not txid:
        raise ValueError("missing txid")
    if not isinstance(timestamp, int) or isinstance(timestamp, bool) or timestamp < 0:
        raise ValueError(f"bad timestamp {timestamp!r}")
    inputs = _parse_legs(obj.get("inputs"), "inputs")
    outputs = _parse_legs(obj.get("outputs"), "outputs")
    if not outputs:
        raise ValueError("transaction has no outputs")
    if inputs:
        fee = sum(v for _, v in inputs) - sum(v for _, v in outputs)
        if fee < 0:
            raise ValueError(f"negative fee {fee}")
    return TxRecord(txid, timestamp, inputs, outputs)


def parse_transactions(src: Source) -> list[TxRecord]:
    """Parse line-delimited JSON transactions, validating every record."""
    records: list[TxRecord] = []
    seen: set[str] = set()
    with _gc_paused(), _lines(src) as (name, lines):
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                record = parse_transaction_line(line.rstrip("\r\n"))
            except (ValueError, TypeError) as exc:
                raise IngestError(str(exc), lineno, name) from None
            if record.txid in seen:
                raise IngestError(f"duplicate txid {record.txid}", lineno, name)
            seen.add(record.txid)
            records.append(record)
    return records


def serialize_transaction(record: TxRecord) -> str:
    return json.dumps(
        {
            "txid": record.txid,
            "timestamp": record.timestamp,
            "inputs": [{"address": a, "value": v} for a, v in record.inputs],
            "outputs": [{"address": a, "value": v} for a, v in record.outputs],
        },
        separators=(",", ":"),
    )


def serialize_transactions(records: Iterable[TxRecord]) -> str:
    return "".join(serialize_transaction(r) + "\n" for r in records)


def build_index(records: Iterable[TxRecord], freeze: bool = True) -> TxIndex:
    """Index records by txid and by address.

    With `freeze`, everything allocated so far is moved out of the cyclic
    garbage collector's view (``gc.freeze``); the index is immutable and
    acyclic, and later traversals then avoid rescanning it.
    """
    by_txid: dict[str, TxRecord] = {}
    by_address: dict[str, list[IndexEntry]] = defaultdict(list)
    with _gc_paused():
        for record in records:
            by_txid[record.txid] = record
            ts, txid = record.timestamp, record.txid
            for role, legs in ((Role.INPUT, record.inputs), (Role.OUTPUT, record.outputs)):
                if len(legs) == 1:
                    address, value = legs[0]
                    by_address[address].append(IndexEntry(ts, txid, role, value))
                    continue
                for address, value in merge_legs(legs).items():
                    by_address[address].append(IndexEntry(ts, txid, role, value))
        for entries in by_address.values():
            entries.sort()
        index = TxIndex(by_txid, dict(by_address))
    if freeze:
        gc.freeze()
    return index


# -- sanctions list ---------------------------------------------------------

SDN_COLUMNS = ("entity_id", "name", "kind", "country", "sanction_date", "violation", "currency", "address")
BTC_CURRENCY = "XBT"


def _check_header(reader: csv.DictReader, expected: tuple[str, ...], name: str | None) -> None:
    header = reader.fieldnames
    if header is None:
        return
    missing = [c for c in expected if c not in header]
    if missing:
        raise IngestError(f"missing columns {', '.join(missing)}", 1, name)


def parse_sdn_list(src: Source) -> list[SanctionedEntity]:
    """Group BTC rows of an SDN-style CSV into sanctioned entities.

    Rows whose currency is not ``XBT`` are ignored.  Violations and
    addresses are unioned across the rows of one ``entity_id``.
    """
    groups: dict[str, dict] = {}
    owner: dict[str, str] = {}
    with _lines(src) as (name, lines):
        reader = csv.DictReader(lines)
        _check_header(reader, SDN_COLUMNS, name)
        for row in reader:
            lineno = reader.line_num
            if (row.get("currency") or "").strip() != BTC_CURRENCY:
                continue
            entity_id = (row["entity_id"] or "").strip()
            address = (row["address"] or "").strip()
            if not entity_id or not address:
                raise IngestError("empty entity_id or address", lineno, name)
            try:
                violation = ViolationCode.parse(row["violation"] or "")
                kind = EntityKind.parse(row["kind"] or "")
            except ValueError as exc:
                raise IngestError(str(exc), lineno, name) from None
            try:
                sanction_date = date.fromisoformat((row["sanction_date"] or "").strip())
            except ValueError:
                raise IngestError(f"unparseable sanction date {row['sanction_date']!r}", lineno, name) from None
            previous = owner.setdefault(address, entity_id)
            if previous != entity_id:
                raise IngestError(f"address {address} assigned to both {previous} and {entity_id}", lineno, name)
            attrs = (row["name"].strip(), kind, row["country"].strip(), sanction_date)
            group = groups.get(entity_id)
            if group is None:
                groups[entity_id] = {"attrs": attrs, "violations": {violation}, "addresses": {address}}
                continue
            if group["attrs"] != attrs:
                raise IngestError(f"inconsistent attributes for entity {entity_id}", lineno, name)
            group["violations"].add(violation)
            group["addresses"].add(address)
    entities = []
    for entity_id, group in groups.items():
        ent_name, kind, country, sanction_date = group["attrs"]
        entities.append(
            SanctionedEntity(
                entity_id=entity_id,
                name=ent_name,
                kind=kind,
                country=country,
                sanction_date=sanction_date,
                violations=frozenset(group["violations"]),
                addresses=frozenset(group["addresses"]),
            )
        )
    return entities


def sdn_currency_stats(src: Source) -> dict[str, tuple[int, int]]:
    """Per currency, (distinct entities, distinct addresses) over all SDN rows."""
    entities: dict[str, set[str]] = defaultdict(set)
    addresses: dict[str, set[str]] = defaultdict(set)
    with _lines(src) as (name, lines):
        reader = csv.DictReader(lines)
        _check_header(reader, SDN_COLUMNS, name)
        for row in reader:
            currency = (row["currency"] or "").strip()
            entities[currency].add((row["entity_id"] or "").strip())
            addresses[currency].add((row["address"] or "").strip())
    return {c: (len(entities[c]), len(addresses[c])) for c in sorted(entities)}


def sdn_fixture_path() -> Path:
    """Bundled sanctions list reproducing the February 2024 BTC composition."""
    return Path(__file__).with_name("data") / "sdn_feb2024.csv"


# -- prices ---------------------------------------------------------------


def parse_price_table(src: Source) -> PriceTable:
    """Load daily prices; interior gaps are filled with the previous day's price."""
    raw: dict[date, Decimal] = {}
    with _lines(src) as (name, lines):
        reader = csv.DictReader(lines)
        _check_header(reader, ("date", "usd_per_btc"), name)
        for row in reader:
            lineno = reader.line_num
            try:
                day = date.fromisoformat((row["date"] or "").strip())
                price = Decimal((row["usd_per_btc"] or "").strip())
            except (ValueError, InvalidOperation):
                raise IngestError(f"unparseable price row {row}", lineno, name) from None
            if not price.is_finite() or price <= 0:
                raise IngestError(f"non-positive price {price} on {day}", lineno, name)
            if day in raw:
                raise IngestError(f"duplicate date {day}", lineno, name)
            raw[day] = price
    if not raw:
        return PriceTable({})
    prices: dict[date, Decimal] = {}
    filled: list[date] = []
    day, last = min(raw), max(raw)
    current = raw[day]
    while day <= last:
        if day in raw:
            current = raw[day]
        else:
            filled.append(day)
        prices[day] = current
        day += timedelta(days=1)
    return PriceTable(prices, filled)


# -- labels ---------------------------------------------------------------


def parse_labels(src: Source, sanctioned: Iterable[SanctionedEntity] = ()) -> LabelSet:
    """Load an address tagpack.

    Addresses that also appear in `sanctioned` are kept, recategorised as
    :attr:`BehaviourCategory.OFAC_SANCTIONED`, and reported in ``overlaps``.
    """
    labels: dict[str, Label] = {}
    with _lines(src) as (name, lines):
        reader = csv.DictReader(lines)
        _check_header(reader, ("address", "entity", "category"), name)
        for row in reader:
            lineno = reader.line_num
            address = (row["address"] or "").strip()
            if not address:
                raise IngestError("empty address", lineno, name)
            try:
                label = Label((row["entity"] or "").strip(), BehaviourCategory.parse(row["category"] or ""))
            except ValueError as exc:
                raise IngestError(str(exc), lineno, name) from None
            known = labels.get(address)
            if known is not None and known != label:
                raise IngestError(
                    f"conflicting labels for {address}: "
                    f"{known.entity}/{known.category.value} vs {label.entity}/{label.category.value}",
                    lineno,
                    name,
                )
            labels[address] = label
    overlaps = []
    for entity in sanctioned:
        for address in entity.addresses:
            known = labels.get(address)
            if known is not None:
                overlaps.append(address)
                labels[address] = Label(known.entity, BehaviourCategory.OFAC_SANCTIONED)
    return LabelSet(labels, sorted(overlaps))
