"""
Deterministic synthetic chains and brute-force oracles.

The generator emits the four ingest formats for a scripted scenario:
random background traffic over a small address universe plus scripted
activity for sanctioned entities on exact days and amounts.  The oracles
recompute balances, reachability and flow metrics by scanning raw records
with no index and no code shared with the analysis modules.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import random
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Union

from .flow import FlowMetrics, TimeWindow
from .graph import Direction
from .ingest import BehaviourCategory, PriceTable, TxRecord, _gc_paused

ORACLE_MAX_TXS = 10_000
BUNDLE_FILES = {
    "transactions": "transactions.ndjson",
    "sdn": "sdn.csv",
    "prices": "prices.csv",
    "labels": "labels.csv",
    "truth": "truth.json",
}


class SynthError(ValueError):
    pass


class OracleRefused(RuntimeError):
    pass


@dataclass(frozen=True)
class Constant:
    value: Decimal


@dataclass(frozen=True)
class Walk:
    start: Decimal
    step: Decimal


PriceModel = Union[Constant, Walk]


@dataclass
class ScriptedEvent:
    """One scripted transfer for an entity.

    `counterparty` is ``"Category:Entity"`` for a fresh address carrying that
    label, ``"@<entity_id>:<i>"`` for the i-th address of another scripted
    entity, or None for a fresh unlabelled address.  With ``hops=2`` a send is
    routed through a fresh unlabelled intermediary.
    """

    day: int
    direction: str
    amount: int
    counterparty: str | None = None
    address: int = 0
    hops: int = 1


@dataclass
class ScriptedEntity:
    entity_id: str
    sanction_date: date
    name: str = ""
    kind: str = "Individual"
    country: str = "Unknown"
    violations: tuple[str, ...] = ("CYBER2",)
    n_addresses: int = 1
    events: list[ScriptedEvent] = field(default_factory=list)


@dataclass
class ScenarioConfig:
    rng_seed: int = 0
    n_background_txs: int = 0
    entities: list[ScriptedEntity] = field(default_factory=list)
    price_model: PriceModel = field(default_factory=lambda: Constant(Decimal("10000")))
    n_addresses: int = 500
    start_date: date = date(2020, 1, 1)
    n_days: int = 365
    # probability that a background output pays a sanctioned address
    entity_exposure: float = 0.0
    n_background_labels: int = 0
    label_repeat_rate: float = 0.0
    script_fee: int = 1000

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        raw = dict(raw)
        entities = []
        for ent in raw.pop("entities", []):
            ent = dict(ent)
            events = [ScriptedEvent(**ev) for ev in ent.pop("events", [])]
            ent["sanction_date"] = date.fromisoformat(ent["sanction_date"])
            ent["violations"] = tuple(ent.get("violations", ("CYBER2",)))
            entities.append(ScriptedEntity(events=events, **ent))
        price = raw.pop("price_model", None)
        if price is not None:
            kind = price.get("kind", "constant")
            if kind == "constant":
                raw["price_model"] = Constant(Decimal(str(price["value"])))
            elif kind == "walk":
                raw["price_model"] = Walk(Decimal(str(price["start"])), Decimal(str(price["step"])))
            else:
                raise SynthError(f"unknown price model {kind!r}")
        if "start_date" in raw:
            raw["start_date"] = date.fromisoformat(raw["start_date"])
        return cls(entities=entities, **raw)


@dataclass
class Bundle:
    transactions: str
    sdn: str
    prices: str
    labels: str
    truth: dict

    def write(self, directory: str | Path) -> dict[str, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = {}
        for key, filename in BUNDLE_FILES.items():
            path = directory / filename
            if key == "truth":
                text = json.dumps(self.truth, indent=2, sort_keys=True) + "\n"
            else:
                text = getattr(self, key)
            path.write_text(text, encoding="utf-8", newline="")
            paths[key] = path
        return paths


def _ts(d: date) -> int:
    return int(datetime(d.year, d.month, d.day, tzinfo=timezone.utc).timestamp())


class _Ledger:
    """Balances plus an O(1)-sampleable set of funded background addresses."""

    def __init__(self):
        self.balance: dict[str, int] = {}
        self.funded: list[str] = []
        self._pos: dict[str, int] = {}

    def credit(self, address: str, value: int, pool: bool) -> None:
        self.balance[address] = self.balance.get(address, 0) + value
        if pool and address not in self._pos and self.balance[address] > 0:
            self._pos[address] = len(self.funded)
            self.funded.append(address)

    def debit(self, address: str, value: int) -> None:
        bal = self.balance.get(address, 0) - value
        if bal < 0:
            raise SynthError(f"overspend on {address}")
        self.balance[address] = bal
        if bal == 0 and address in self._pos:
            i = self._pos.pop(address)
            last = self.funded.pop()
            if last != address:
                self.funded[i] = last
                self._pos[last] = i


def _split(rng: random.Random, total: int, parts: int) -> list[int]:
    if parts == 1:
        return [total]
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


class _Generator:
    def __init__(self, config: ScenarioConfig):
        self.cfg = config
        self.rng = random.Random(config.rng_seed)
        self.salt = f"{config.rng_seed}"
        self.ledger = _Ledger()
        self.records: list[dict] = []
        self.n_tx = 0
        self.n_fresh = 0
        self.labels: dict[str, tuple[str, str]] = {}
        self.events_log: list[dict] = []
        self.background = [self._address("bg", i) for i in range(config.n_addresses)]
        self.entity_addresses = {
            ent.entity_id: [self._address(f"sdn:{ent.entity_id}", i) for i in range(ent.n_addresses)]
            for ent in config.entities
        }
        self.sanctioned = [a for addrs in self.entity_addresses.values() for a in addrs]

    def _address(self, tag: str, i: int) -> str:
        return "bc1q" + hashlib.sha256(f"{self.salt}:{tag}:{i}".encode()).hexdigest()[:38]

    def _fresh(self) -> str:
        self.n_fresh += 1
        return self._address("fresh", self.n_fresh)

    def _emit(self, timestamp: int, inputs: list[tuple[str, int]], outputs: list[tuple[str, int]]) -> str:
        self.n_tx += 1
        txid = hashlib.sha256(f"{self.salt}:tx:{self.n_tx}".encode()).hexdigest()
        for address, value in inputs:
            self.ledger.debit(address, value)
        for address, value in outputs:
            self.ledger.credit(address, value, pool=address not in self._entity_set)
        self.records.append(
            {
                "txid": txid,
                "timestamp": timestamp,
                "inputs": [{"address": a, "value": v} for a, v in inputs],
                "outputs": [{"address": a, "value": v} for a, v in outputs],
            }
        )
        return txid

    def _background_tx(self, t: int) -> None:
        rng = self.rng
        ledger = self.ledger
        if not ledger.funded or rng.random() < 0.05:
            payee = self.background[rng.randrange(len(self.background))]
            self._emit(t, [], [(payee, rng.randint(10**8, 50 * 10**8))])
            return
        k = min(len(ledger.funded), rng.choice((1, 1, 2, 3)))
        spenders = set()
        while len(spenders) < k:
            spenders.add(ledger.funded[rng.randrange(len(ledger.funded))])
        inputs = []
        for address in sorted(spenders):
            bal = ledger.balance[address]
            inputs.append((address, bal if rng.random() < 0.5 else rng.randint(1, bal)))
        total = sum(v for _, v in inputs)
        fee = rng.randint(0, min(total // 100, 20_000))
        m = rng.choice((1, 2, 2, 3))
        payees = []
        for _ in range(m):
            if self.sanctioned and rng.random() < self.cfg.entity_exposure:
                payees.append(self.sanctioned[rng.randrange(len(self.sanctioned))])
            elif rng.random() < 0.1:
                payees.append(inputs[0][0])
            else:
                payees.append(self.background[rng.randrange(len(self.background))])
        self._emit(t, inputs, list(zip(payees, _split(rng, total - fee, m))))

    def _counterparty(self, spec: str | None) -> str:
        if spec is None:
            return self._fresh()
        if spec.startswith("@"):
            entity_id, _, i = spec[1:].rpartition(":")
            try:
                return self.entity_addresses[entity_id][int(i)]
            except (KeyError, ValueError, IndexError):
                raise SynthError(f"unknown entity address reference {spec!r}") from None
        category, sep, entity = spec.partition(":")
        if not sep or not entity:
            raise SynthError(f"counterparty {spec!r} is not Category:Entity")
        BehaviourCategory.parse(category)
        address = self._fresh()
        self.labels[address] = (entity, category)
        return address

    def _scripted(self, t: int, ent: ScriptedEntity, k: int, ev: ScriptedEvent) -> None:
        name = f"{ent.entity_id} event {k} (day {ev.day}, {ev.direction} {ev.amount})"
        if ev.amount <= 0:
            raise SynthError(f"{name}: amount must be positive")
        try:
            own = self.entity_addresses[ent.entity_id][ev.address]
        except IndexError:
            raise SynthError(f"{name}: entity has no address {ev.address}") from None
        fee = self.cfg.script_fee
        if ev.direction == "receive":
            payer = self._counterparty(ev.counterparty)
            funding = self._emit(t - 1, [], [(payer, ev.amount + fee)])
            txids = [funding, self._emit(t, [(payer, ev.amount + fee)], [(own, ev.amount)])]
        elif ev.direction == "send":
            if ev.hops not in (1, 2):
                raise SynthError(f"{name}: hops must be 1 or 2")
            need = ev.amount + fee * ev.hops
            if self.ledger.balance.get(own, 0) < need:
                raise SynthError(
                    f"{name}: spend of {need} exceeds balance {self.ledger.balance.get(own, 0)}"
                )
            payee = self._counterparty(ev.counterparty)
            if ev.hops == 1:
                txids = [self._emit(t, [(own, need)], [(payee, ev.amount)])]
            else:
                mid = self._fresh()
                txids = [
                    self._emit(t, [(own, need)], [(mid, ev.amount + fee)]),
                    self._emit(t + 60, [(mid, ev.amount + fee)], [(payee, ev.amount)]),
                ]
        else:
            raise SynthError(f"{name}: direction must be 'receive' or 'send'")
        self.events_log.append(
            {"entity_id": ent.entity_id, "event": k, "timestamp": t, "direction": ev.direction, "txids": txids}
        )

    def run(self) -> Bundle:
        cfg = self.cfg
        self._entity_set = set(self.sanctioned)
        start = _ts(cfg.start_date)
        span = cfg.n_days * 86400
        # (timestamp, order, payload); order keeps scripted events ahead of background at equal times
        agenda: list[tuple[int, int, object]] = []
        for i in range(cfg.n_background_txs):
            agenda.append((start + self.rng.randrange(span), 1, i))
        for ent in cfg.entities:
            for k, ev in enumerate(ent.events):
                t = _ts(ent.sanction_date + timedelta(days=ev.day)) + 43200 + 300 * k
                agenda.append((t, 0, (ent, k, ev)))
        agenda.sort(key=lambda item: (item[0], item[1], item[2] if item[1] else 0))
        for t, kind, payload in agenda:
            if kind:
                self._background_tx(t)
            else:
                self._scripted(t, *payload)
        self._label_background()
        transactions = "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in self.records)
        return Bundle(
            transactions=transactions,
            sdn=self._sdn_csv(),
            prices=self._prices_csv(),
            labels=self._labels_csv(),
            truth={},
        )

    def _label_background(self) -> None:
        if not self.cfg.n_background_labels:
            return
        rng = random.Random(f"{self.salt}:labels")
        categories = [c.value for c in BehaviourCategory if c is not BehaviourCategory.OFAC_SANCTIONED]
        pool = [a for a in self.background if a not in self.labels]
        chosen = rng.sample(pool, min(len(pool), self.cfg.n_background_labels))
        for address in chosen:
            category = rng.choice(categories)
            self.labels[address] = (f"{category}-{rng.randrange(20):02d}", category)

    def _sdn_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("entity_id", "name", "kind", "country", "sanction_date", "violation", "currency", "address"))
        for ent in self.cfg.entities:
            for address in self.entity_addresses[ent.entity_id]:
                for code in ent.violations:
                    w.writerow(
                        (
                            ent.entity_id,
                            ent.name or ent.entity_id,
                            ent.kind,
                            ent.country,
                            ent.sanction_date.isoformat(),
                            code,
                            "XBT",
                            address,
                        )
                    )
        return buf.getvalue()

    def _labels_csv(self) -> str:
        rng = random.Random(f"{self.salt}:repeat")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("address", "entity", "category"))
        for address, (entity, category) in self.labels.items():
            w.writerow((address, entity, category))
            if rng.random() < self.cfg.label_repeat_rate:
                w.writerow((address, entity, category))
        return buf.getvalue()

    def _prices_csv(self) -> str:
        cfg = self.cfg
        if self.records:
            stamps = [r["timestamp"] for r in self.records]
            first = datetime.fromtimestamp(min(stamps), timezone.utc).date()
            last = datetime.fromtimestamp(max(stamps), timezone.utc).date()
        else:
            first = last = cfg.start_date
        first = min(first, cfg.start_date)
        last = max(last, cfg.start_date + timedelta(days=cfg.n_days - 1))
        rng = random.Random(f"{self.salt}:prices")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("date", "usd_per_btc"))
        model = cfg.price_model
        price = model.value if isinstance(model, Constant) else model.start
        day = first
        while day <= last:
            w.writerow((day.isoformat(), str(price)))
            if isinstance(model, Walk):
                delta = Decimal(rng.randint(-100, 100)) * model.step / 100
                price = max((price + delta).quantize(Decimal("0.01")), Decimal("1.00"))
            day += timedelta(days=1)
        return buf.getvalue()


def generate_chain(config: ScenarioConfig, with_truth: bool = True) -> Bundle:
    """Generate the four input files (plus a ground-truth sidecar) for `config`.

    Identical configs produce byte-identical output.  A scripted send that
    exceeds the available balance raises :class:`SynthError`.
    """
    gen = _Generator(config)
    with _gc_paused():
        bundle = gen.run()
    if with_truth:
        bundle.truth = _ground_truth(gen, bundle)
    return bundle


# -- oracles ----------------------------------------------------------------
# Everything below scans plain records; none of it touches TxIndex or the
# traversal/accounting code it is used to check.


def _check_size(records: list) -> None:
    if len(records) > ORACLE_MAX_TXS:
        raise OracleRefused(f"corpus of {len(records)} txs exceeds oracle limit {ORACLE_MAX_TXS}")


def oracle_balance(records: Iterable[TxRecord], address: str, t: int) -> int:
    total = 0
    for r in records:
        if r.timestamp >= t:
            continue
        for a, v in r.outputs:
            if a == address:
                total += v
        for a, v in r.inputs:
            if a == address:
                total -= v
    return total


def oracle_reachable(
    records: list[TxRecord],
    seeds: Iterable[str],
    n: int,
    window: TimeWindow,
    direction: Direction = Direction.FORWARD,
) -> set[str]:
    return set(oracle_reachable_depths(records, seeds, n, window, direction))


def oracle_reachable_depths(
    records: list[TxRecord],
    seeds: Iterable[str],
    n: int,
    window: TimeWindow,
    direction: Direction = Direction.FORWARD,
) -> dict[str, int]:
    """Minimum transaction count over all enumerated paths to each reachable address.

    Every alternating address/transaction path of at most `n` transaction
    nodes is walked explicitly (no visited-set pruning).
    """
    records = list(records)
    _check_size(records)
    inside = [r for r in records if window.start <= r.timestamp < window.end]
    # address -> transactions it can step into
    steps: dict[str, list[TxRecord]] = {}
    for r in inside:
        entry = set()
        if direction in (Direction.FORWARD, Direction.BOTH):
            entry |= {a for a, _ in r.inputs}
        if direction in (Direction.BACKWARD, Direction.BOTH):
            entry |= {a for a, _ in r.outputs}
        for a in entry:
            steps.setdefault(a, []).append(r)

    def exits(r: TxRecord) -> set[str]:
        out = set()
        if direction in (Direction.FORWARD, Direction.BOTH):
            out |= {a for a, _ in r.outputs}
        if direction in (Direction.BACKWARD, Direction.BOTH):
            out |= {a for a, _ in r.inputs}
        return out

    best: dict[str, int] = {}

    def walk(address: str, used: int, on_path: set[str]) -> None:
        if used < best.get(address, n + 1):
            best[address] = used
        if used == n:
            return
        for r in steps.get(address, ()):
            if r.txid in on_path:
                continue
            on_path.add(r.txid)
            for nxt in exits(r):
                walk(nxt, used + 1, on_path)
            on_path.remove(r.txid)

    for seed in seeds:
        walk(seed, 0, set())
    return best


def _day(timestamp: int) -> date:
    return datetime.fromtimestamp(timestamp, timezone.utc).date()


def _to_decimal(value: Fraction) -> Decimal:
    # denominators here are products of 2s and 5s, so the expansion terminates
    num, den = value.numerator, value.denominator
    scale = 0
    while den % 10 == 0:
        den //= 10
        scale += 1
    while den % 2 == 0:
        den //= 2
        num *= 5
        scale += 1
    while den % 5 == 0:
        den //= 5
        num *= 2
        scale += 1
    if den != 1:
        raise ValueError(f"{value} has no finite decimal expansion")
    return Decimal(num).scaleb(-scale)


def oracle_flow(
    records: Iterable[TxRecord],
    subjects: Iterable[str],
    window: TimeWindow,
    prices: PriceTable,
) -> FlowMetrics:
    subjects = set(subjects)
    n_in = n_out = recv = sent = balance = 0
    recv_usd = sent_usd = Fraction(0)
    for r in records:
        got = sum(v for a, v in r.outputs if a in subjects)
        gave = sum(v for a, v in r.inputs if a in subjects)
        touched_out = any(a in subjects for a, _ in r.outputs)
        touched_in = any(a in subjects for a, _ in r.inputs)
        if r.timestamp < window.end:
            balance += got - gave
        if not window.start <= r.timestamp < window.end:
            continue
        if not (touched_in or touched_out):
            continue
        rate = Fraction(prices.prices[_day(r.timestamp)]) / 100_000_000
        if touched_out:
            n_in += 1
            recv += got
            recv_usd += got * rate
        if touched_in:
            n_out += 1
            sent += gave
            sent_usd += gave * rate
    return FlowMetrics(
        n_tx_in=n_in,
        n_tx_out=n_out,
        received_sat=recv,
        sent_sat=sent,
        received_usd=_to_decimal(recv_usd),
        sent_usd=_to_decimal(sent_usd),
        balance_end_sat=balance,
    )


def oracle_windows(sanction_date: date, dataset_end: int) -> dict[str, TimeWindow]:
    s = _ts(sanction_date)
    return {
        "PreSanction": TimeWindow(0, s),
        "Post7": TimeWindow(s, min(_ts(sanction_date + timedelta(days=7)), dataset_end)),
        "Post30": TimeWindow(s, min(_ts(sanction_date + timedelta(days=30)), dataset_end)),
        "UpToDate": TimeWindow(s, dataset_end),
    }


def metrics_to_json(m: FlowMetrics) -> dict:
    return {
        "n_tx_in": m.n_tx_in,
        "n_tx_out": m.n_tx_out,
        "received_sat": m.received_sat,
        "sent_sat": m.sent_sat,
        "received_usd": str(m.received_usd),
        "sent_usd": str(m.sent_usd),
        "balance_end_sat": m.balance_end_sat,
    }


def _ground_truth(gen: _Generator, bundle: Bundle) -> dict:
    from .ingest import parse_price_table, parse_transactions

    records = parse_transactions(io.StringIO(bundle.transactions))
    prices = parse_price_table(io.StringIO(bundle.prices))
    dataset_end = max((r.timestamp for r in records), default=0) + 1
    flows: dict[str, dict] = {}
    activity = {w: [0, 0] for w in ("PreSanction", "Post7", "Post30", "UpToDate")}
    for ent in gen.cfg.entities:
        addresses = gen.entity_addresses[ent.entity_id]
        if _ts(ent.sanction_date) >= dataset_end:
            continue
        per_window = {}
        for label, window in oracle_windows(ent.sanction_date, dataset_end).items():
            m = oracle_flow(records, addresses, window, prices)
            per_window[label] = metrics_to_json(m)
            activity[label][0] += m.n_tx_in > 0
            activity[label][1] += m.n_tx_out > 0
        flows[ent.entity_id] = per_window
    return {
        "rng_seed": gen.cfg.rng_seed,
        "dataset_end": dataset_end,
        "n_transactions": len(records),
        "entity_addresses": gen.entity_addresses,
        "flow_metrics": flows,
        "activity_counts": activity,
        "scripted_events": gen.events_log,
    }


# -- canned scenarios -------------------------------------------------------


def random_config(rng_seed: int, n_background_txs: int = 500, n_addresses: int | None = None) -> ScenarioConfig:
    """A randomized but always-feasible scenario for equivalence testing."""
    rng = random.Random(f"random-config:{rng_seed}")
    n_days = 120
    start = date(2021, 1, 1)
    entities = []
    for e in range(rng.randint(1, 5)):
        sanction = start + timedelta(days=rng.randint(20, n_days - 10))
        n_addr = rng.randint(1, 5)
        events = []
        held = [0] * n_addr
        for _ in range(rng.randint(0, 12)):
            day = rng.randint(-20, 40)
            i = rng.randrange(n_addr)
            events.append((day, i))
        events.sort()
        scripted = []
        for day, i in events:
            if held[i] > 10_000 and rng.random() < 0.5:
                amount = rng.randint(1, held[i] - 5_000)
                scripted.append(ScriptedEvent(day, "send", amount, address=i, hops=rng.choice((1, 1, 2))))
                held[i] -= amount + 1000 * scripted[-1].hops
            else:
                amount = rng.randint(10_000, 5 * 10**8)
                scripted.append(ScriptedEvent(day, "receive", amount, address=i))
                held[i] += amount
        entities.append(
            ScriptedEntity(
                entity_id=f"E{e}",
                sanction_date=sanction,
                violations=tuple(rng.sample(["CYBER2", "RUSSIA", "IFSR", "SDGT"], rng.randint(1, 2))),
                n_addresses=n_addr,
                events=scripted,
            )
        )
    return ScenarioConfig(
        rng_seed=rng_seed,
        n_background_txs=n_background_txs,
        entities=entities,
        price_model=Walk(Decimal("9000.00"), Decimal("250.00")),
        n_addresses=n_addresses or max(20, n_background_txs // 2),
        start_date=start,
        n_days=n_days,
        entity_exposure=0.05,
        n_background_labels=10,
    )


def exchange_share_config(rng_seed: int = 7) -> ScenarioConfig:
    """One entity whose post-sanction payees are 331 Exchange, 5 Service, 1 Mixer
    and 3 other-sanctioned addresses (340 labelled) plus 25 unlabelled."""
    payees: list[str | None] = []
    for i in range(9):
        payees += [f"Exchange:Exchange-{i + 1}"] * (37 if i < 8 else 35)
    payees += ["Service:Service-1", "Service:Service-1", "Service:Service-2", "Service:Service-3", "Service:Service-3"]
    payees += ["Mixer:Mixer-1"]
    payees += ["@S2:0", "@S2:1", "@S3:0"]
    payees += [None] * 25
    sends = [ScriptedEvent(1 + i // 50, "send", 1_000_000, counterparty=p) for i, p in enumerate(payees)]
    main = ScriptedEntity(
        entity_id="S1",
        sanction_date=date(2022, 3, 1),
        violations=("CYBER2",),
        events=[ScriptedEvent(-30, "receive", 10 * 10**8)] + sends,
    )
    others = [
        ScriptedEntity(entity_id="S2", sanction_date=date(2022, 1, 10), violations=("RUSSIA",), n_addresses=2),
        ScriptedEntity(entity_id="S3", sanction_date=date(2021, 11, 5), violations=("SDGT",), n_addresses=1),
    ]
    return ScenarioConfig(
        rng_seed=rng_seed,
        n_background_txs=200,
        entities=[main] + others,
        n_addresses=100,
        start_date=date(2021, 10, 1),
        n_days=240,
    )


def mixer_hop2_config(rng_seed: int = 11) -> ScenarioConfig:
    """An entity paying an exchange directly and a mixer only through an intermediary."""
    ent = ScriptedEntity(
        entity_id="M1",
        sanction_date=date(2021, 6, 1),
        events=[
            ScriptedEvent(-5, "receive", 5 * 10**8),
            ScriptedEvent(2, "send", 10**8, counterparty="Exchange:Exchange-A"),
            ScriptedEvent(3, "send", 10**8, counterparty="Mixer:Mixer-Z", hops=2),
        ],
    )
    return ScenarioConfig(
        rng_seed=rng_seed,
        n_background_txs=100,
        entities=[ent],
        n_addresses=60,
        start_date=date(2021, 4, 1),
        n_days=120,
    )
