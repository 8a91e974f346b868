"""
Label-enriched behavioural analysis of post-sanction counterparties.

Every entity is expanded 1 or 2 steps from its sanctioned addresses over
[sanction day, dataset end).  Reached addresses are attributed to behaviour
categories through the label set; addresses sanctioned under another entity
count as OfacSanctioned.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .flow import TimeWindow
from .graph import Direction, ExpansionSpec, Subgraph, expand_n_step, reached_addresses
from .ingest import BehaviourCategory, Label, LabelSet, SanctionedEntity, TxIndex, day_start


class NoLabelledAddresses(ValueError):
    pass


@dataclass
class CategoryCount:
    entities: set[str] = field(default_factory=set)
    addresses: set[str] = field(default_factory=set)

    @property
    def distinct_entities(self) -> int:
        return len(self.entities)

    @property
    def distinct_addresses(self) -> int:
        return len(self.addresses)


@dataclass
class BehaviourReport:
    steps: int
    direction: Direction
    categories: dict[BehaviourCategory, CategoryCount]
    unlabelled: set[str]
    # supplementary per-entity breakdown: entity_id -> category -> counts
    per_entity: dict[str, dict[BehaviourCategory, CategoryCount]] = field(default_factory=dict)
    subgraphs: dict[str, Subgraph] = field(default_factory=dict)

    @property
    def labelled_total(self) -> int:
        return sum(c.distinct_addresses for c in self.categories.values())

    @property
    def unlabelled_total(self) -> int:
        return len(self.unlabelled)

    @property
    def reached_total(self) -> int:
        return self.labelled_total + self.unlabelled_total

    @property
    def distinct_label_entities(self) -> int:
        return sum(c.distinct_entities for c in self.categories.values())


def attribution_map(labels: LabelSet | None, entities: Sequence[SanctionedEntity]) -> dict[str, Label]:
    """Address -> label, with sanctioned addresses forced to OfacSanctioned."""
    attribution = dict(labels.labels) if labels is not None else {}
    for entity in entities:
        for address in entity.addresses:
            known = attribution.get(address)
            name = known.entity if known is not None else entity.name
            attribution[address] = Label(name, BehaviourCategory.OFAC_SANCTIONED)
    return attribution


def behavioural_report(
    entities: Sequence[SanctionedEntity],
    steps: int,
    labels: LabelSet | None,
    index: TxIndex,
    dataset_end: int,
    direction: Direction = Direction.FORWARD,
    threads: int = 1,
) -> BehaviourReport:
    """Attribute every address reached from the sanctioned entities.

    Each entity excludes its own sanctioned addresses from what it reaches;
    the union over entities is then split by category.  A sanctioned address
    of a different entity that gets reached is reported as OfacSanctioned.
    """
    if steps not in (1, 2):
        raise ValueError("steps must be 1 or 2")
    entities = sorted(entities, key=lambda e: e.entity_id)
    attribution = attribution_map(labels, entities)

    def expand(entity: SanctionedEntity) -> Subgraph | None:
        start = day_start(entity.sanction_date)
        if start >= dataset_end:
            return None
        spec = ExpansionSpec(entity.addresses, steps, TimeWindow(start, dataset_end), direction)
        return expand_n_step(index, spec)

    if threads > 1 and len(entities) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            subgraphs = list(pool.map(expand, entities))
    else:
        subgraphs = [expand(e) for e in entities]

    report = BehaviourReport(steps, direction, {c: CategoryCount() for c in BehaviourCategory}, set())
    for entity, sub in zip(entities, subgraphs):
        mine = {c: CategoryCount() for c in BehaviourCategory}
        report.per_entity[entity.entity_id] = mine
        if sub is None:
            continue
        report.subgraphs[entity.entity_id] = sub
        for address in reached_addresses(sub, exclude_seeds=True):
            label = attribution.get(address)
            if label is None:
                report.unlabelled.add(address)
                continue
            for counts in (report.categories[label.category], mine[label.category]):
                counts.entities.add(label.entity)
                counts.addresses.add(address)
    return report


def category_share(report: BehaviourReport) -> dict[BehaviourCategory, float]:
    """Fraction of labelled reached addresses falling in each non-empty category."""
    total = report.labelled_total
    if total == 0:
        raise NoLabelledAddresses("report has no labelled addresses")
    return {
        cat: counts.distinct_addresses / total
        for cat, counts in report.categories.items()
        if counts.distinct_addresses
    }
