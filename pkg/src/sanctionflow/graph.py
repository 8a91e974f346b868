"""
Bipartite address-transaction graphs and n-step expansion.

Address nodes point to the transactions that spend from them; transaction
nodes point to the addresses they pay.  An n-step expansion from a set of
seed addresses keeps every node reachable through at most n transaction
nodes, so paths from a seed have length at most 2n.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

from .flow import TimeWindow
from .ingest import Role, TxIndex


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BOTH = "both"


class Edge(NamedTuple):
    src: str
    dst: str
    kind: Role
    value: int


@dataclass
class AddressTxGraph:
    address_nodes: set[str] = field(default_factory=set)
    # txid -> timestamp
    tx_nodes: dict[str, int] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


@dataclass(frozen=True)
class ExpansionSpec:
    seeds: frozenset[str]
    n: int
    window: TimeWindow
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("step count must be >= 1")
        if not self.seeds:
            raise ValueError("at least one seed address is required")


@dataclass
class Subgraph:
    spec: ExpansionSpec
    graph: AddressTxGraph
    address_depth: dict[str, int]
    tx_depth: dict[str, int]

    @property
    def seeds(self) -> frozenset[str]:
        return self.spec.seeds


def build_graph(index: TxIndex, window: TimeWindow) -> AddressTxGraph:
    """All transactions inside `window` with their incident addresses and edges."""
    g = AddressTxGraph()
    for txid in index.txids_between(window.start, window.end):
        g.tx_nodes[txid] = index.by_txid[txid].timestamp
        inputs, outputs = index.legs(txid)
        for address, value in inputs.items():
            g.address_nodes.add(address)
            g.edges.append(Edge(address, txid, Role.INPUT, value))
        for address, value in outputs.items():
            g.address_nodes.add(address)
            g.edges.append(Edge(txid, address, Role.OUTPUT, value))
    return g


def _step_roles(direction: Direction) -> tuple[set[Role], bool, bool]:
    """Roles an address plays in the txs it expands into, and which tx sides are followed."""
    if direction is Direction.FORWARD:
        return {Role.INPUT}, False, True
    if direction is Direction.BACKWARD:
        return {Role.OUTPUT}, True, False
    return {Role.INPUT, Role.OUTPUT}, True, True


def expand_n_step(index: TxIndex, spec: ExpansionSpec) -> Subgraph:
    """Layered breadth-first expansion from the seeds.

    Each layer moves from the current address frontier into the window's
    transactions (as spender for forward, as payee for backward, either for
    both) and from those transactions to their payees (forward), spenders
    (backward) or all participants (both).  Nodes keep the smallest layer at
    which they were reached; visited addresses are not expanded again.
    """
    roles, take_inputs, take_outputs = _step_roles(spec.direction)
    start, end = spec.window.start, spec.window.end
    address_depth = {a: 0 for a in spec.seeds}
    tx_depth: dict[str, int] = {}
    frontier = sorted(spec.seeds)
    for step in range(1, spec.n + 1):
        if not frontier:
            break
        reached = []
        for address in frontier:
            for entry in index.entries(address, start, end):
                if entry.role not in roles or entry.txid in tx_depth:
                    continue
                tx_depth[entry.txid] = step
                record = index.by_txid[entry.txid]
                sides = []
                if take_inputs:
                    sides.append(record.inputs)
                if take_outputs:
                    sides.append(record.outputs)
                for legs in sides:
                    for other, _ in legs:
                        if other not in address_depth:
                            address_depth[other] = step
                            reached.append(other)
        frontier = reached
    return Subgraph(spec, _layered_edges(index, spec.direction, address_depth, tx_depth), address_depth, tx_depth)


def _layered_edges(
    index: TxIndex, direction: Direction, address_depth: dict[str, int], tx_depth: dict[str, int]
) -> AddressTxGraph:
    # only edges that advance one layer are kept, which bounds every
    # seed-rooted path by the step count
    forward = direction is not Direction.BACKWARD
    backward = direction is not Direction.FORWARD
    as_input, as_output = Role.INPUT, Role.OUTPUT
    g = AddressTxGraph(address_nodes=set(address_depth))
    edges = g.edges
    depth_of = address_depth.get
    for txid, depth in tx_depth.items():
        g.tx_nodes[txid] = index.by_txid[txid].timestamp
        inputs, outputs = index.legs(txid)
        for address, value in inputs.items():
            d = depth_of(address)
            if d is not None and ((forward and d == depth - 1) or (backward and d == depth)):
                edges.append(Edge(address, txid, as_input, value))
        for address, value in outputs.items():
            d = depth_of(address)
            if d is not None and ((forward and d == depth) or (backward and d == depth - 1)):
                edges.append(Edge(txid, address, as_output, value))
    return g


def reached_addresses(sub: Subgraph, exclude_seeds: bool = True) -> set[str]:
    nodes = set(sub.graph.address_nodes)
    if exclude_seeds:
        nodes -= sub.seeds
    return nodes


EDGE_COLUMNS = ("src", "dst", "kind", "value", "timestamp", "depth")


def edge_rows(sub: Subgraph) -> list[tuple]:
    rows = []
    for e in sub.graph.sorted_edges():
        txid = e.dst if e.kind is Role.INPUT else e.src
        rows.append((e.src, e.dst, e.kind.value, e.value, sub.graph.tx_nodes[txid], sub.tx_depth[txid]))
    return rows


def export_edge_list(sub: Subgraph, out: io.TextIOBase | None = None) -> str:
    """Write the subgraph as CSV (src,dst,kind,value,timestamp,depth); return the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EDGE_COLUMNS)
    writer.writerows(edge_rows(sub))
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def union_reached(subgraphs: Iterable[Subgraph], exclude_seeds: bool = True) -> set[str]:
    reached: set[str] = set()
    for sub in subgraphs:
        reached |= reached_addresses(sub, exclude_seeds)
    return reached
