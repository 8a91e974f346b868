"""
Pre/post-sanction flow metrics.

Each sanctioned entity gets four half-open windows anchored at 00:00 UTC of
its sanction date.  Metrics are computed per address from the index and
then aggregated per entity, per violation code and across entities.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date
from decimal import Decimal, localcontext
from enum import Enum
from typing import Iterable, Sequence

from .ingest import (
    SATOSHI_PER_BTC,
    PriceTable,
    Role,
    SanctionedEntity,
    TxIndex,
    ViolationCode,
    day_start,
)

DAY = 86400
# wide enough that sat * price never rounds
_USD_PRECISION = 60


class WindowLabel(str, Enum):
    PRE_SANCTION = "PreSanction"
    POST7 = "Post7"
    POST30 = "Post30"
    UP_TO_DATE = "UpToDate"


POST_WINDOWS = (WindowLabel.POST7, WindowLabel.POST30, WindowLabel.UP_TO_DATE)


@dataclass(frozen=True)
class TimeWindow:
    """Half-open interval [start, end) of Unix timestamps."""

    start: int
    end: int
    label: WindowLabel | None = None

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"window end {self.end} precedes start {self.start}")

    def __contains__(self, timestamp: int) -> bool:
        return self.start <= timestamp < self.end


class CorpusInconsistencyError(ValueError):
    """The ledger implies a negative balance for some address."""

    def __init__(self, address: str, balance: int, timestamp: int):
        self.address = address
        self.balance = balance
        super().__init__(f"address {address} has negative balance {balance} before t={timestamp}")


class SanctionAfterDatasetEnd(ValueError):
    pass


@dataclass
class FlowMetrics:
    n_tx_in: int = 0
    n_tx_out: int = 0
    received_sat: int = 0
    sent_sat: int = 0
    received_usd: Decimal = Decimal(0)
    sent_usd: Decimal = Decimal(0)
    balance_end_sat: int = 0

    @property
    def volume_usd(self) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = _USD_PRECISION
            return self.received_usd + self.sent_usd


class BalanceBucket(str, Enum):
    ZERO = "0"
    UP_TO_0_1 = "(0, 0.1]"
    UP_TO_1 = "(0.1, 1]"
    UP_TO_10 = "(1, 10]"
    BELOW_50 = "(10, 50)"
    FROM_50 = "[50, inf)"

    @classmethod
    def of(cls, balance_sat: int) -> "BalanceBucket":
        if balance_sat < 0:
            raise ValueError("negative balance")
        if balance_sat == 0:
            return cls.ZERO
        if balance_sat <= SATOSHI_PER_BTC // 10:
            return cls.UP_TO_0_1
        if balance_sat <= SATOSHI_PER_BTC:
            return cls.UP_TO_1
        if balance_sat <= 10 * SATOSHI_PER_BTC:
            return cls.UP_TO_10
        if balance_sat < 50 * SATOSHI_PER_BTC:
            return cls.BELOW_50
        return cls.FROM_50


@dataclass
class ViolationRow:
    violation: ViolationCode
    n_entities: int = 0
    tx_count_pre: int = 0
    tx_count_uptodate: int = 0
    usd_volume_pre: Decimal = Decimal(0)
    usd_volume_uptodate: Decimal = Decimal(0)


def window_bounds(sanction_date: date, dataset_end: int, corpus_start: int = 0) -> dict[WindowLabel, TimeWindow]:
    s = day_start(sanction_date)
    if s >= dataset_end:
        raise SanctionAfterDatasetEnd(
            f"sanction date {sanction_date.isoformat()} is not before dataset end {dataset_end}"
        )
    if corpus_start > s:
        raise ValueError("corpus start after sanction date")
    return {
        WindowLabel.PRE_SANCTION: TimeWindow(corpus_start, s, WindowLabel.PRE_SANCTION),
        WindowLabel.POST7: TimeWindow(s, min(s + 7 * DAY, dataset_end), WindowLabel.POST7),
        WindowLabel.POST30: TimeWindow(s, min(s + 30 * DAY, dataset_end), WindowLabel.POST30),
        WindowLabel.UP_TO_DATE: TimeWindow(s, dataset_end, WindowLabel.UP_TO_DATE),
    }


def balance_at(address: str, t: int, index: TxIndex) -> int:
    """Satoshi held by `address` from all transactions strictly before `t`."""
    balance = 0
    for entry in index.entries(address, end=t):
        if entry.role is Role.OUTPUT:
            balance += entry.value
        else:
            balance -= entry.value
    if balance < 0:
        raise CorpusInconsistencyError(address, balance, t)
    return balance


def _accumulate(
    addresses: Iterable[str], window: TimeWindow, index: TxIndex, prices: PriceTable
) -> FlowMetrics:
    txs_in: set[str] = set()
    txs_out: set[str] = set()
    m = FlowMetrics()
    received_usd = sent_usd = Decimal(0)
    with localcontext() as ctx:
        ctx.prec = _USD_PRECISION
        for address in addresses:
            for entry in index.entries(address, window.start, window.end):
                usd = entry.value * prices.price_at(entry.timestamp) / SATOSHI_PER_BTC
                if entry.role is Role.OUTPUT:
                    txs_in.add(entry.txid)
                    m.received_sat += entry.value
                    received_usd += usd
                else:
                    txs_out.add(entry.txid)
                    m.sent_sat += entry.value
                    sent_usd += usd
            m.balance_end_sat += balance_at(address, window.end, index)
    m.n_tx_in = len(txs_in)
    m.n_tx_out = len(txs_out)
    m.received_usd = received_usd
    m.sent_usd = sent_usd
    return m


def address_flow_metrics(address: str, window: TimeWindow, index: TxIndex, prices: PriceTable) -> FlowMetrics:
    """Flow of one address in `window`.

    A transaction counts towards ``n_tx_in`` when the address is among its
    outputs and towards ``n_tx_out`` when it is among its inputs; a
    transaction doing both counts in both.
    """
    return _accumulate((address,), window, index, prices)


def entity_flow_metrics(
    entity: SanctionedEntity, window: TimeWindow, index: TxIndex, prices: PriceTable
) -> FlowMetrics:
    """Aggregate flow over all addresses of an entity.

    Transaction counts are deduplicated by txid per direction; value sums and
    balances add up across addresses.
    """
    return _accumulate(sorted(entity.addresses), window, index, prices)


def _map(fn, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class EntityFlow:
    entity: SanctionedEntity
    windows: dict[WindowLabel, TimeWindow]
    metrics: dict[WindowLabel, FlowMetrics]


def entity_flows(
    entities: Sequence[SanctionedEntity],
    index: TxIndex,
    prices: PriceTable,
    dataset_end: int,
    labels: Iterable[WindowLabel] = tuple(WindowLabel),
    threads: int = 1,
) -> list[EntityFlow]:
    """Metrics for every entity and window, ordered by entity_id."""
    labels = tuple(labels)

    def one(entity: SanctionedEntity) -> EntityFlow:
        windows = window_bounds(entity.sanction_date, dataset_end)
        metrics = {lab: entity_flow_metrics(entity, windows[lab], index, prices) for lab in labels}
        return EntityFlow(entity, windows, metrics)

    return _map(one, sorted(entities, key=lambda e: e.entity_id), threads)


def activity_counts(
    entities: Sequence[SanctionedEntity],
    index: TxIndex,
    prices: PriceTable,
    dataset_end: int,
    threads: int = 1,
) -> dict[WindowLabel, tuple[int, int]]:
    """Per window, (entities that received, entities that sent)."""
    flows = entity_flows(entities, index, prices, dataset_end, threads=threads)
    counts = {}
    for label in WindowLabel:
        receiving = sum(1 for f in flows if f.metrics[label].n_tx_in > 0)
        sending = sum(1 for f in flows if f.metrics[label].n_tx_out > 0)
        counts[label] = (receiving, sending)
    return counts


def balance_histogram(
    entities: Sequence[SanctionedEntity],
    stage: WindowLabel,
    index: TxIndex,
    dataset_end: int,
) -> dict[BalanceBucket, int]:
    """Entity count per balance bucket, measured at the end of `stage`."""
    hist = {bucket: 0 for bucket in BalanceBucket}
    for entity in entities:
        end = window_bounds(entity.sanction_date, dataset_end)[stage].end
        balance = sum(balance_at(a, end, index) for a in entity.addresses)
        hist[BalanceBucket.of(balance)] += 1
    return hist


def violation_aggregate(
    entities: Sequence[SanctionedEntity],
    index: TxIndex,
    prices: PriceTable,
    dataset_end: int,
    threads: int = 1,
) -> dict[ViolationCode, ViolationRow]:
    """Per violation code, distinct transactions and USD volume before and after sanction.

    An entity contributes to every code it carries.  Transactions shared by
    several entities of one code are counted once; USD volume is the sum of
    received and sent legs.
    """
    flows = entity_flows(
        entities,
        index,
        prices,
        dataset_end,
        labels=(WindowLabel.PRE_SANCTION, WindowLabel.UP_TO_DATE),
        threads=threads,
    )
    rows = {code: ViolationRow(code) for code in ViolationCode}
    txids: dict[tuple[ViolationCode, WindowLabel], set[str]] = {}
    for flow in flows:
        touched = {}
        for label in (WindowLabel.PRE_SANCTION, WindowLabel.UP_TO_DATE):
            window = flow.windows[label]
            touched[label] = {
                e.txid for a in flow.entity.addresses for e in index.entries(a, window.start, window.end)
            }
        with localcontext() as ctx:
            ctx.prec = _USD_PRECISION
            for code in flow.entity.violations:
                row = rows[code]
                row.n_entities += 1
                row.usd_volume_pre += flow.metrics[WindowLabel.PRE_SANCTION].volume_usd
                row.usd_volume_uptodate += flow.metrics[WindowLabel.UP_TO_DATE].volume_usd
                for label, ids in touched.items():
                    txids.setdefault((code, label), set()).update(ids)
    for (code, label), ids in txids.items():
        if label is WindowLabel.PRE_SANCTION:
            rows[code].tx_count_pre = len(ids)
        else:
            rows[code].tx_count_uptodate = len(ids)
    return rows
