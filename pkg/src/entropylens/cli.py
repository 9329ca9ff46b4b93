"""Command-line interface.

Subcommands: ``analyze``, ``plan {hide,separate,minimize,abstract}``,
``whatif``, ``link``, ``serve``. Defaults can be overridden through
``ENTROPYLENS_*`` environment variables (e.g. ``ENTROPYLENS_EPSILON0``).

Exit codes: 0 success, 2 when ``analyze --fail-on-risk`` finds a risky
combination, 64 usage errors, 65 data errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .analysis import analyze
from .dataset import Dataset, load_dataset, load_schema_file
from .entropy import AuxModel
from .errors import EntropyLensError
from .linkage import attach_linked_table, link_spec_from_config
from .report import (
    abstraction_plan_doc,
    hiding_plan_doc,
    minimization_plan_doc,
    render_report,
    separation_plan_doc,
)
from .risky import RiskPolicy, find_risky_combinations
from .strategies import (
    apply_abstraction,
    apply_generalization,
    apply_hiding,
    apply_minimization,
    plan_hiding,
    plan_minimization,
    plan_separation,
    recommend_abstraction,
    verify_separation,
)

EXIT_OK = 0
EXIT_RISKY = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _env(name: str, default, cast=str):
    raw = os.environ.get(f"ENTROPYLENS_{name}")
    if raw is None:
        return default
    return cast(raw)


def _add_io_args(p: _Parser):
    p.add_argument("--input", required=True, help="input CSV path")
    p.add_argument("--schema", required=True, help="schema-config JSON path")


def _add_policy_args(p: _Parser):
    p.add_argument("--epsilon0", type=float,
                   default=_env("EPSILON0", 0.5, float),
                   help="risk threshold in (0, 1] (default 0.5)")
    p.add_argument("--k-max", type=int, default=_env("K_MAX", 4, int),
                   help="largest combination size examined (default 4)")
    p.add_argument("--aux", nargs="*", default=[],
                   help="columns assumed known to the adversary")
    p.add_argument("--trigger", choices=["any_record", "fraction_at_least"],
                   default=_env("TRIGGER", "any_record"))
    p.add_argument("--fraction", type=float, default=None,
                   help="fraction for the fraction_at_least trigger")
    p.add_argument("--log-base", type=float, default=_env("LOG_BASE", 2.0, float))


def _add_output_args(p: _Parser):
    p.add_argument("--format", choices=["table", "json"],
                   default=_env("FORMAT", "table"))
    p.add_argument("--output", default=None, help="write output here instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="entropylens",
                     description="entropy-based identifiability analysis "
                                 "and privacy-aware schema planning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a dataset for risky combinations")
    _add_io_args(p)
    _add_policy_args(p)
    _add_output_args(p)
    p.add_argument("--fail-on-risk", action="store_true",
                   help="exit 2 if any minimal risky combination is found")

    p = sub.add_parser("plan", help="produce a strategy plan")
    p.add_argument("strategy", choices=["hide", "separate", "minimize", "abstract"])
    _add_io_args(p)
    _add_policy_args(p)
    _add_output_args(p)
    p.add_argument("--apply", action="store_true",
                   help="also write the transformed CSV(s)")
    p.add_argument("--output-dir", default=".",
                   help="directory for --apply outputs")
    p.add_argument("--seed", type=int, default=0, help="surrogate seed for hide")

    p = sub.add_parser("whatif", help="apply one transform, re-analyze, "
                                      "and print before/after risk")
    _add_io_args(p)
    _add_policy_args(p)
    _add_output_args(p)
    p.add_argument("--transform", required=True,
                   choices=["generalize", "minimize", "hide"])
    p.add_argument("--column", default=None, help="column for generalize")
    p.add_argument("--level", type=int, default=None, help="level for generalize")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("link", help="attach a linked table, then analyze")
    _add_io_args(p)
    _add_policy_args(p)
    _add_output_args(p)
    p.add_argument("--linked-input", required=True, help="linked table CSV")
    p.add_argument("--linked-schema", required=True,
                   help="linked table schema-config with a 'link' section")
    p.add_argument("--fail-on-risk", action="store_true")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8600)
    p.add_argument("--max-rows", type=int, default=1_000_000)
    p.add_argument("--max-columns", type=int, default=64)
    return parser


def _validate_policy(parser: _Parser, args) -> RiskPolicy:
    if not 0.0 < args.epsilon0 <= 1.0:
        parser.error(f"--epsilon0 must be in (0, 1], got {args.epsilon0}")
    if args.k_max < 1:
        parser.error(f"--k-max must be >= 1, got {args.k_max}")
    if args.trigger == "fraction_at_least" and args.fraction is None:
        parser.error("--fraction is required with --trigger fraction_at_least")
    return RiskPolicy(epsilon0=args.epsilon0, max_subset_size=args.k_max,
                      trigger=args.trigger, fraction=args.fraction)


def _load(args) -> Dataset:
    schema = load_schema_file(args.schema)
    return load_dataset(args.input, schema, name=Path(args.input).stem)


def _emit(data: bytes, output: str | None):
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(dataset.column_names)
    for row in dataset.iter_rows():
        writer.writerow(row)
    return buf.getvalue()


def _min_risky_epsilon(dataset, aux, policy):
    report = find_risky_combinations(dataset, aux, policy)
    mins = [report.evaluated[s].min_epsilon for s in report.evaluated]
    return (min(mins) if mins else 1.0), report


def _cmd_analyze(args, parser) -> int:
    policy = _validate_policy(parser, args)
    dataset = _load(args)
    aux = AuxModel.of(dataset, args.aux)
    bundle = analyze(dataset, aux, policy, log_base=args.log_base)
    _emit(render_report(bundle, args.format), args.output)
    if args.fail_on_risk and bundle.minimal_risky:
        return EXIT_RISKY
    return EXIT_OK


def _cmd_plan(args, parser) -> int:
    policy = _validate_policy(parser, args)
    dataset = _load(args)
    aux = AuxModel.of(dataset, args.aux)
    outputs: dict[str, Dataset] = {}
    if args.strategy == "hide":
        plan = plan_hiding(dataset)
        doc = hiding_plan_doc(plan)
        if args.apply:
            vault, working = apply_hiding(dataset, plan, seed=args.seed)
            outputs = {"vault": vault, "working": working}
    elif args.strategy == "separate":
        report = find_risky_combinations(dataset, aux, policy)
        plan = plan_separation(report.minimal_risky, dataset.quasi_columns)
        doc = separation_plan_doc(plan, verify_separation(plan, report.minimal_risky))
        if args.apply:
            non_quasi = [c for c in dataset.column_names
                         if c not in dataset.quasi_columns]
            for i, group in enumerate(plan.groups):
                outputs[f"group_{i}"] = dataset.select_columns(list(group))
            if non_quasi:
                outputs["other_columns"] = dataset.select_columns(non_quasi)
    elif args.strategy == "minimize":
        plan = plan_minimization(dataset, aux, policy)
        doc = minimization_plan_doc(plan)
        if args.apply:
            stripped = apply_minimization(dataset, plan.strip_columns)
            if stripped is not None:
                outputs = {"minimized": stripped}
    else:
        plan = recommend_abstraction(dataset, aux, policy)
        doc = abstraction_plan_doc(plan)
        if args.apply:
            outputs = {"abstracted": apply_abstraction(dataset, plan)}
    _emit((json.dumps(doc, indent=2) + "\n").encode(), args.output)
    out_dir = Path(args.output_dir)
    for label, ds in outputs.items():
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{Path(args.input).stem}.{label}.csv"
        path.write_text(dataset_to_csv(ds), encoding="utf-8")
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_whatif(args, parser) -> int:
    policy = _validate_policy(parser, args)
    dataset = _load(args)
    aux = AuxModel.of(dataset, args.aux)
    if args.transform == "generalize":
        if args.column is None or args.level is None:
            parser.error("--transform generalize requires --column and --level")
        transformed = apply_generalization(dataset, args.column, args.level)
    elif args.transform == "minimize":
        plan = plan_minimization(dataset)
        transformed = apply_minimization(dataset, plan.strip_columns)
        if transformed is None:
            parser.error("minimization would strip every column")
    else:
        plan = plan_hiding(dataset)
        _, transformed = apply_hiding(dataset, plan, seed=args.seed)
    before, _ = _min_risky_epsilon(dataset, aux, policy)
    after_aux = AuxModel.of(transformed,
                            [c for c in aux.known_columns
                             if c in transformed.column_names])
    after, _ = _min_risky_epsilon(transformed, after_aux, policy)
    doc = {
        "transform": args.transform,
        "before": {"min_epsilon": before},
        "after": {"min_epsilon": after},
    }
    _emit((json.dumps(doc, indent=2) + "\n").encode(), args.output)
    return EXIT_OK


def _cmd_link(args, parser) -> int:
    policy = _validate_policy(parser, args)
    dataset = _load(args)
    linked_schema = load_schema_file(args.linked_schema)
    linked = load_dataset(args.linked_input, linked_schema,
                          name=Path(args.linked_input).stem)
    if "link" not in linked_schema:
        parser.error("linked schema-config must contain a 'link' section")
    spec = link_spec_from_config(linked_schema["link"])
    widened = attach_linked_table(dataset, linked, spec)
    aux = AuxModel.of(widened, args.aux)
    bundle = analyze(widened, aux, policy, log_base=args.log_base)
    _emit(render_report(bundle, args.format), args.output)
    if args.fail_on_risk and bundle.minimal_risky:
        return EXIT_RISKY
    return EXIT_OK


def _cmd_serve(args, parser) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(max_rows=args.max_rows, max_columns=args.max_columns)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "plan": _cmd_plan,
        "whatif": _cmd_whatif,
        "link": _cmd_link,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args, parser)
    except EntropyLensError as exc:
        print(f"entropylens: {exc.name}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
