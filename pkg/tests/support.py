"""Helpers shared by the test modules."""

from __future__ import annotations

import io
from dataclasses import dataclass

from sanctionflow.ingest import (
    LabelSet,
    PriceTable,
    SanctionedEntity,
    TxIndex,
    TxRecord,
    build_index,
    parse_labels,
    parse_price_table,
    parse_sdn_list,
    parse_transactions,
)
from sanctionflow.synth import Bundle, ScenarioConfig, generate_chain


@dataclass
class Loaded:
    bundle: Bundle
    records: list[TxRecord]
    index: TxIndex
    prices: PriceTable
    entities: list[SanctionedEntity]
    labels: LabelSet
    dataset_end: int


def load(bundle: Bundle) -> Loaded:
    records = parse_transactions(io.StringIO(bundle.transactions))
    entities = parse_sdn_list(io.StringIO(bundle.sdn))
    return Loaded(
        bundle=bundle,
        records=records,
        index=build_index(records, freeze=False),
        prices=parse_price_table(io.StringIO(bundle.prices)),
        entities=entities,
        labels=parse_labels(io.StringIO(bundle.labels), entities),
        dataset_end=max(r.timestamp for r in records) + 1,
    )


def scenario(config: ScenarioConfig) -> Loaded:
    return load(generate_chain(config))


def tx_line(txid: str, timestamp: int, inputs=(), outputs=()) -> str:
    import json

    return json.dumps(
        {
            "txid": txid,
            "timestamp": timestamp,
            "inputs": [{"address": a, "value": v} for a, v in inputs],
            "outputs": [{"address": a, "value": v} for a, v in outputs],
        }
    )


def corpus(*lines: str) -> list[TxRecord]:
    return parse_transactions(io.StringIO("\n".join(lines) + "\n"))


# -- hypothesis strategies ---------------------------------------------------

from hypothesis import strategies as st  # noqa: E402


@st.composite
def ledgers(draw, max_txs: int = 40, n_addresses: int = 8, span: int = 40 * 86400) -> list[TxRecord]:
    """A valid corpus: every spend is covered by earlier receipts, timestamps non-decreasing."""
    pool = [f"A{i}" for i in range(n_addresses)]
    balance = dict.fromkeys(pool, 0)
    records = []
    t = draw(st.integers(0, 86400))
    for k in range(draw(st.integers(1, max_txs))):
        t += draw(st.sampled_from([0, 1, 3600, 86400, 3 * 86400]))
        t = min(t, span)
        funded = [a for a in pool if balance[a] > 0]
        if funded and draw(st.booleans()):
            spenders = draw(st.lists(st.sampled_from(funded), min_size=1, max_size=3, unique=True))
            inputs = [(a, draw(st.integers(1, balance[a]))) for a in spenders]
            total = sum(v for _, v in inputs)
            fee = draw(st.integers(0, total - 1)) if total > 1 else 0
        else:
            inputs, total, fee = [], draw(st.integers(1, 10**9)), 0
        payees = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3))
        remaining = total - fee
        outputs = []
        for i, a in enumerate(payees):
            v = remaining if i == len(payees) - 1 else draw(st.integers(0, remaining))
            outputs.append((a, v))
            remaining -= v
        for a, v in inputs:
            balance[a] -= v
        for a, v in outputs:
            balance[a] += v
        records.append(TxRecord(f"t{k:04d}", t, tuple(inputs), tuple(outputs)))
    return records
