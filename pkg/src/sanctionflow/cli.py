"""Command-line front end: validate, flow, behaviour, synth, report."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal
from pathlib import Path
from typing import Sequence

from . import synth
from .behaviour import BehaviourReport, behavioural_report
from .flow import (
    CorpusInconsistencyError,
    SanctionAfterDatasetEnd,
    WindowLabel,
    activity_counts,
    balance_histogram,
    entity_flows,
    violation_aggregate,
)
from .graph import Direction
from .ingest import (
    IngestError,
    LabelSet,
    MissingPriceError,
    PriceTable,
    SanctionedEntity,
    TxIndex,
    TxRecord,
    build_index,
    day_start,
    parse_labels,
    parse_price_table,
    parse_sdn_list,
    parse_transactions,
    sdn_currency_stats,
)
from .report import Analyses, EmitError, dataset_stats, emit_all, emit_tables
from .synth import metrics_to_json

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class InvariantViolation(RuntimeError):
    pass


class InputError(ValueError):
    pass


@dataclass
class Inputs:
    records: list[TxRecord]
    index: TxIndex
    entities: list[SanctionedEntity]
    prices: PriceTable | None
    labels: LabelSet | None
    dataset_end: int
    warnings: list[str] = field(default_factory=list)


def _parse_dataset_end(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return day_start(date.fromisoformat(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a timestamp or ISO date: {text!r}") from None


def _require(path: str | None, flag: str) -> Path:
    if path is None:
        raise InputError(f"{flag} is required")
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{flag}: no such file {path}")
    return p


def load_inputs(args, need_prices: bool) -> Inputs:
    """Parse every input up front so analyses never start on bad data."""
    records = parse_transactions(_require(args.txs, "--txs"))
    entities = parse_sdn_list(_require(args.sdn, "--sdn"))
    prices = None
    if args.prices is not None or need_prices:
        prices = parse_price_table(_require(args.prices, "--prices"))
    labels = parse_labels(_require(args.labels, "--labels"), entities) if args.labels else None
    if args.dataset_end is not None:
        dataset_end = args.dataset_end
    else:
        dataset_end = max((r.timestamp for r in records), default=0) + 1
    inputs = Inputs(records, build_index(records), entities, prices, labels, dataset_end)
    if prices is not None:
        if prices.filled:
            inputs.warnings.append(
                f"prices: {len(prices.filled)} missing day(s) carried forward "
                f"({', '.join(d.isoformat() for d in prices.filled[:5])}{', ...' if len(prices.filled) > 5 else ''})"
            )
        missing = prices.missing_days(records)
        if missing:
            inputs.warnings.append(
                f"prices: {len(missing)} transaction day(s) without a price, first {missing[0].isoformat()}"
            )
    if labels is not None and labels.overlaps:
        inputs.warnings.append(f"labels: {len(labels.overlaps)} address(es) also sanctioned, treated as OfacSanctioned")
    for e in entities:
        if day_start(e.sanction_date) >= dataset_end:
            inputs.warnings.append(f"sdn: entity {e.entity_id} sanctioned on or after the dataset end")
    return inputs


def _check_strict(inputs: Inputs, strict: bool) -> None:
    for w in inputs.warnings:
        print(f"warning: {w}")
    if strict and inputs.warnings:
        raise InputError(f"{len(inputs.warnings)} warning(s) with --strict")


def _print_manifest(manifest, out) -> None:
    print(f"wrote {len(manifest)} file(s) to {out}")
    for m in manifest:
        print(f"  {m.filename}\t{m.rows} rows\t{m.sha256[:16]}")


# -- analyses -------------------------------------------------------------------


def run_flow(inputs: Inputs, windows: Sequence[WindowLabel], threads: int) -> Analyses:
    entities = inputs.entities
    if not entities:
        return Analyses()
    if not windows:
        windows = tuple(WindowLabel)
    try:
        flows = entity_flows(entities, inputs.index, inputs.prices, inputs.dataset_end, windows, threads)
        violations = violation_aggregate(entities, inputs.index, inputs.prices, inputs.dataset_end, threads)
        activity = activity_counts(entities, inputs.index, inputs.prices, inputs.dataset_end, threads)
        histograms = {
            stage: balance_histogram(entities, stage, inputs.index, inputs.dataset_end) for stage in windows
        }
    except SanctionAfterDatasetEnd as exc:
        raise InputError(str(exc)) from exc
    activity = {label: activity[label] for label in windows}
    return Analyses(flows=flows, violations=violations, histograms=histograms, activity=activity)


def run_behaviour(inputs: Inputs, steps: Sequence[int], direction: Direction, threads: int) -> list[BehaviourReport]:
    return [
        behavioural_report(inputs.entities, s, inputs.labels, inputs.index, inputs.dataset_end, direction, threads)
        for s in steps
    ]


def compare_truth(analyses: Analyses, truth: dict) -> list[str]:
    """Differences between computed flow metrics and a synth ground-truth sidecar."""
    problems = []
    expected = truth.get("flow_metrics", {})
    got = {f.entity.entity_id: f for f in analyses.flows}
    for entity_id, per_window in sorted(expected.items()):
        flow = got.get(entity_id)
        if flow is None:
            problems.append(f"{entity_id}: missing from results")
            continue
        for label, want in per_window.items():
            m = flow.metrics.get(WindowLabel(label))
            if m is None:
                continue
            have = metrics_to_json(m)
            for key, value in want.items():
                if key.endswith("_usd"):
                    same = Decimal(have[key]) == Decimal(value)
                else:
                    same = have[key] == value
                if not same:
                    problems.append(f"{entity_id} {label} {key}: expected {value}, got {have[key]}")
    return problems


# -- commands -------------------------------------------------------------------


def cmd_validate(args) -> int:
    inputs = load_inputs(args, need_prices=False)
    n_addresses = sum(len(e.addresses) for e in inputs.entities)
    print(f"transactions: {len(inputs.records)}")
    print(f"addresses indexed: {len(inputs.index.by_address)}")
    print(f"entities: {len(inputs.entities)}")
    print(f"sanctioned addresses: {n_addresses}")
    print(f"price days: {len(inputs.prices) if inputs.prices is not None else 0}")
    print(f"labels: {len(inputs.labels) if inputs.labels is not None else 0}")
    print(f"dataset end: {inputs.dataset_end}")
    _check_strict(inputs, args.strict)
    print("ok")
    return EXIT_OK


def cmd_flow(args) -> int:
    inputs = load_inputs(args, need_prices=True)
    _check_strict(inputs, args.strict)
    analyses = run_flow(inputs, args.window, args.threads)
    if args.expect:
        truth = json.loads(Path(args.expect).read_text(encoding="utf-8"))
        problems = compare_truth(analyses, truth)
        if problems:
            for p in problems:
                print(f"mismatch: {p}")
            raise InvariantViolation(f"{len(problems)} metric(s) differ from {args.expect}")
        print(f"flow metrics match {args.expect}")
    tables = [t for t in analyses.tables() if not t.name.startswith(("dataset_stats", "behaviour"))]
    _print_manifest(emit_tables(tables, args.out, args.formats), args.out)
    return EXIT_OK


def cmd_behaviour(args) -> int:
    inputs = load_inputs(args, need_prices=False)
    _check_strict(inputs, args.strict)
    reports = run_behaviour(inputs, args.steps, args.direction, args.threads)
    tables = [t for t in Analyses(behaviour=reports).tables() if t.name.startswith(("behaviour", "subgraphs/"))]
    for r in reports:
        print(f"{r.steps}-step: {r.labelled_total} labelled, {r.unlabelled_total} unlabelled reached addresses")
    _print_manifest(emit_tables(tables, args.out, args.formats), args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    inputs = load_inputs(args, need_prices=True)
    _check_strict(inputs, args.strict)
    analyses = run_flow(inputs, args.window, args.threads)
    analyses.stats = dataset_stats(inputs.entities, sdn_currency_stats(args.sdn))
    analyses.behaviour = run_behaviour(inputs, args.steps, args.direction, args.threads)
    _print_manifest(emit_all(analyses, args.out, args.formats), args.out)
    return EXIT_OK


PRESETS = {
    "exchange-share": synth.exchange_share_config,
    "mixer-hop2": synth.mixer_hop2_config,
}


def cmd_synth(args) -> int:
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read scenario {args.config}: {exc}") from exc
        config = synth.ScenarioConfig.from_dict(raw)
    elif args.preset == "random":
        config = synth.random_config(args.seed, args.background)
    elif args.preset:
        config = PRESETS[args.preset](args.seed)
    else:
        raise InputError("give a scenario config file or --preset")
    bundle = synth.generate_chain(config)
    paths = bundle.write(args.out)
    for key, path in paths.items():
        print(f"{key}: {path}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _windows(text: str) -> list[WindowLabel]:
    try:
        return [WindowLabel(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError:
        choices = ", ".join(w.value for w in WindowLabel)
        raise argparse.ArgumentTypeError(f"windows must be among {choices}") from None


def _steps(text: str) -> list[int]:
    try:
        steps = sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad steps {text!r}") from None
    if not steps or any(s not in (1, 2) for s in steps):
        raise argparse.ArgumentTypeError("steps must be 1 and/or 2")
    return steps


def _formats(text: str) -> list[str]:
    formats = [part.strip() for part in text.split(",") if part.strip()]
    if not formats or any(f not in ("csv", "json") for f in formats):
        raise argparse.ArgumentTypeError("formats must be csv and/or json")
    return formats


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--txs", help="transactions.ndjson")
    common.add_argument("--sdn", help="sanctions list CSV")
    common.add_argument("--prices", help="daily BTC/USD prices CSV")
    common.add_argument("--labels", help="address tagpack CSV")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--dataset-end", type=_parse_dataset_end, help="timestamp or ISO date (default: last tx + 1s)")
    common.add_argument("--direction", type=Direction, default=Direction.FORWARD, choices=list(Direction))
    common.add_argument("--steps", type=_steps, default=[1, 2], help="comma list of 1,2 (default 1,2)")
    common.add_argument("--window", type=_windows, default=[], help="comma list of windows (default all)")
    common.add_argument("--formats", type=_formats, default=["csv"], help="csv,json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--strict", action="store_true", help="treat warnings as errors")

    parser = argparse.ArgumentParser(prog="sanctionflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="parse and check all inputs").set_defaults(func=cmd_validate)
    sub.add_parser("flow", parents=[common], help="pre/post-sanction flow metrics").set_defaults(func=cmd_flow)
    sub.choices["flow"].add_argument("--expect", help="truth.json sidecar to compare against")
    sub.add_parser("behaviour", parents=[common], help="1/2-step behavioural analysis").set_defaults(
        func=cmd_behaviour
    )
    sub.add_parser("report", parents=[common], help="all analyses plus dataset statistics").set_defaults(
        func=cmd_report
    )
    p = sub.add_parser("synth", help="write a synthetic input bundle")
    p.add_argument("config", nargs="?", help="scenario JSON file")
    p.add_argument("--preset", choices=["random", *PRESETS])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--background", type=int, default=500, help="background txs for --preset random")
    p.add_argument("--out", default="bundle")
    p.add_argument("--threads", type=int, default=1, help="accepted for uniformity; generation is sequential")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, IngestError, MissingPriceError, CorpusInconsistencyError, synth.SynthError, EmitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
