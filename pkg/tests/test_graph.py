import csv
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sanctionflow.flow import TimeWindow
from sanctionflow.graph import (
    EDGE_COLUMNS,
    Direction,
    Edge,
    ExpansionSpec,
    build_graph,
    expand_n_step,
    export_edge_list,
    reached_addresses,
)
from sanctionflow.ingest import Role, build_index
from sanctionflow.synth import oracle_reachable, oracle_reachable_depths, random_config
from support import corpus, ledgers, scenario, tx_line

EVERYTHING = TimeWindow(0, 10**12)


@pytest.fixture(scope="module")
def fig5():
    records = corpus(
        tx_line("T0", 100, outputs=[("X1", 10)]),
        tx_line("T1", 200, inputs=[("X1", 10)], outputs=[("X2", 6), ("X3", 3)]),
    )
    return records, build_index(records, freeze=False)


@pytest.fixture(scope="module")
def chain():
    return scenario(random_config(21, n_background_txs=500))


def expand(index, seeds, n, window=EVERYTHING, direction=Direction.FORWARD):
    return expand_n_step(index, ExpansionSpec(frozenset(seeds), n, window, direction))


def test_fig5_one_step(fig5):
    _, index = fig5
    sub = expand(index, {"X1"}, 1)
    assert sub.graph.address_nodes == {"X1", "X2", "X3"}
    assert set(sub.graph.tx_nodes) == {"T1"}
    assert sorted(sub.graph.edges) == [
        Edge("T1", "X2", Role.OUTPUT, 6),
        Edge("T1", "X3", Role.OUTPUT, 3),
        Edge("X1", "T1", Role.INPUT, 10),
    ]
    assert reached_addresses(sub) == {"X2", "X3"}


def test_fig5_oracle(fig5):
    records, _ = fig5
    assert oracle_reachable(records, {"X1"}, 1, EVERYTHING) == {"X1", "X2", "X3"}


def test_seed_without_transactions(fig5):
    _, index = fig5
    sub = expand(index, {"nobody"}, 1)
    assert sub.graph.address_nodes == {"nobody"}
    assert not sub.graph.tx_nodes
    assert reached_addresses(sub, exclude_seeds=False) == {"nobody"}
    assert reached_addresses(sub) == set()


def test_oracle_with_no_edges():
    records = corpus(tx_line("T0", 0, outputs=[("Z", 1)]))
    assert oracle_reachable(records, {"Q"}, 3, EVERYTHING) == {"Q"}


def test_spec_validation():
    with pytest.raises(ValueError):
        ExpansionSpec(frozenset({"a"}), 0, EVERYTHING)
    with pytest.raises(ValueError):
        ExpansionSpec(frozenset(), 1, EVERYTHING)


def test_build_graph_empty():
    empty = build_index([], freeze=False)
    g = build_graph(empty, EVERYTHING)
    assert not g.address_nodes and not g.tx_nodes and not g.edges


def test_build_graph_window_excluding_everything(fig5):
    _, index = fig5
    g = build_graph(index, TimeWindow(1000, 2000))
    assert not g.address_nodes and not g.tx_nodes and not g.edges


def test_build_graph_matches_filter():
    data = scenario(random_config(2, n_background_txs=200))
    stamps = sorted(r.timestamp for r in data.records)
    window = TimeWindow(stamps[0], stamps[len(stamps) // 2])
    g = build_graph(data.index, window)
    inside = [r for r in data.records if window.start <= r.timestamp < window.end]
    assert g.tx_nodes == {r.txid: r.timestamp for r in inside}
    assert g.address_nodes == {a for r in inside for a, _ in r.inputs + r.outputs}
    expected = set()
    for r in inside:
        for a in {a for a, _ in r.inputs}:
            expected.add((a, r.txid, Role.INPUT, sum(v for b, v in r.inputs if b == a)))
        for a in {a for a, _ in r.outputs}:
            expected.add((r.txid, a, Role.OUTPUT, sum(v for b, v in r.outputs if b == a)))
    assert set(g.edges) == expected
    assert len(g.edges) == len(expected)
    for e in g.edges:
        # bipartite: one end is always a transaction
        assert (e.src in g.tx_nodes) != (e.dst in g.tx_nodes)


def test_oracle_equivalence_on_synth_chain(chain):
    rng = random.Random(1)
    addresses = sorted(chain.index.by_address)
    for _ in range(10):
        seeds = frozenset(rng.sample(addresses, rng.randint(1, 4)))
        lo = rng.randrange(chain.index.first_timestamp, chain.dataset_end)
        window = TimeWindow(lo, rng.randrange(lo, chain.dataset_end + 1))
        for direction in Direction:
            for n in (1, 2, 3):
                sub = expand(chain.index, seeds, n, window, direction)
                assert sub.address_depth == oracle_reachable_depths(chain.records, seeds, n, window, direction)


def _longest_tx_path(sub) -> int:
    out: dict[str, list[str]] = {}
    for e in sub.graph.edges:
        out.setdefault(e.src, []).append(e.dst)
    memo: dict[str, int] = {}

    def longest(node: str) -> int:
        if node not in memo:
            own = 1 if node in sub.graph.tx_nodes else 0
            memo[node] = own + max((longest(nxt) for nxt in out.get(node, ())), default=0)
        return memo[node]

    return max((longest(s) for s in sub.seeds), default=0)


windows = st.tuples(st.integers(0, 45 * 86400), st.integers(0, 45 * 86400)).map(
    lambda p: TimeWindow(min(p), max(p))
)


@settings(max_examples=60, deadline=None)
@given(ledgers(), st.data(), windows, st.sampled_from(list(Direction)))
def test_expansion_properties(records, data, window, direction):
    index = build_index(records, freeze=False)
    pool = sorted({a for r in records for a, _ in r.outputs})
    seeds = frozenset(data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3)))
    previous = None
    for n in (1, 2, 3):
        sub = expand(index, seeds, n, window, direction)
        # oracle equivalence
        assert sub.address_depth == oracle_reachable_depths(records, seeds, n, window, direction)
        # depth bound
        assert max(sub.address_depth.values()) <= n
        assert all(1 <= d <= n for d in sub.tx_depth.values())
        # window soundness
        assert all(window.start <= t < window.end for t in sub.graph.tx_nodes.values())
        if direction is not Direction.BOTH:
            assert _longest_tx_path(sub) <= n
        # monotonicity
        if previous is not None:
            assert previous.graph.address_nodes <= sub.graph.address_nodes
            assert set(previous.graph.tx_nodes) <= set(sub.graph.tx_nodes)
        previous = sub


def test_reach_grows_with_steps_for_every_seed(chain):
    for address in sorted(chain.index.by_address)[:60]:
        one = reached_addresses(expand(chain.index, {address}, 1))
        two = reached_addresses(expand(chain.index, {address}, 2))
        assert one <= two
        assert two == oracle_reachable(chain.records, {address}, 2, EVERYTHING) - {address}


def test_expansion_independent_of_seed_order(chain):
    seeds = sorted(chain.index.by_address)[:5]
    a = expand(chain.index, seeds, 2, direction=Direction.BOTH)
    b = expand(chain.index, list(reversed(seeds)), 2, direction=Direction.BOTH)
    assert a.address_depth == b.address_depth
    assert export_edge_list(a) == export_edge_list(b)


def test_edge_export(fig5):
    _, index = fig5
    text = export_edge_list(expand(index, {"X1"}, 1))
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == EDGE_COLUMNS
    assert rows[1:] == [
        ["T1", "X2", "output", "6", "200", "1"],
        ["T1", "X3", "output", "3", "200", "1"],
        ["X1", "T1", "input", "10", "200", "1"],
    ]
    buf = io.StringIO()
    export_edge_list(expand(index, {"X1"}, 1), buf)
    assert buf.getvalue() == text
