"""Command-line front end.

Every command is a pure function of (config, seed, flags); outputs land in
``--out`` together with a ``manifest_<command>.json`` whose only
run-dependent field is ``duration_s``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .dataset import (RECEIVER_FEATURES, SEVERITY_LOSSES_DB, default_cases, dumps_csv, from_csv,
                      generate_dataset, select_features, standardize)
from .clustering import bisect_kmeans
from .errors import ConfigError, DataFormatError
from .evaluation import (PLAN_GROUPS, PlanRun, coarse_labels, default_plans, detection_experiment, evaluate,
                         localization_experiment, points_to_csv, reports_to_csv)
from .linkmodel import LinkConfig, load_config

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_CONTRACT = 5


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _losses(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid loss list {text!r}") from None
    if not values or any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError("losses must be a non-empty comma list of values > 0 dB")
    return values


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


class Run:
    """Collects outputs of one command and writes its manifest."""

    def __init__(self, command: str, out: Path, config: LinkConfig | None, seed: int | None, flags: dict):
        self.command = command
        self.out = out
        self.config = config
        self.seed = seed
        self.flags = flags
        self.outputs: list[str] = []
        self.start = time.perf_counter()
        out.mkdir(parents=True, exist_ok=True)

    def write(self, relpath: str, text: str) -> Path:
        path = self.out / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.outputs.append(relpath)
        return path

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "version": __version__,
            "seed": self.seed,
            "config": None if self.config is None else self.config.to_dict(),
            "flags": self.flags,
            "outputs": self.outputs,
            "duration_s": round(time.perf_counter() - self.start, 6),
        }
        path = self.out / f"manifest_{self.command}.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _config(args) -> LinkConfig:
    return load_config(args.config) if args.config else LinkConfig()


def cmd_generate(args) -> None:
    config = _config(args)
    run = Run("generate", Path(args.out), config, args.seed, {"samples_per_case": args.samples_per_case})
    data = generate_dataset(config, default_cases(config.n_spans), args.samples_per_case, args.seed)
    run.write("dataset.csv", dumps_csv(data))
    run.finish()
    print(f"wrote {len(data)} samples to {run.out / 'dataset.csv'}")


def _detect(run: Run, config: LinkConfig, args) -> str:
    runs = detection_experiment(config, args.losses, args.samples_per_case, args.seed)
    for d in runs:
        run.write(f"points/detect_{d.loss_db:g}dB.csv", points_to_csv(d.run))
    table = reports_to_csv([d.report for d in runs], {"loss_db": [d.loss_db for d in runs]})
    run.write("detect_report.csv", table)
    return table


def _select_plans(config: LinkConfig, selection: list[str] | None):
    plans = default_plans(config.n_spans)
    if not selection:
        return plans
    known = set(PLAN_GROUPS) | {p.name for p in plans}
    unknown = [s for s in selection if s not in known]
    if unknown:
        raise ValueError(f"unknown plans: {', '.join(unknown)}")
    return [p for p in plans if p.group in selection or p.name in selection]


def _localize(run: Run, config: LinkConfig, args) -> str:
    plans = _select_plans(config, args.plans)
    runs: list[PlanRun] = localization_experiment(config, args.samples_per_case, args.seed, plans)
    for r in runs:
        run.write(f"points/localize_{r.report.name}.csv", points_to_csv(r))
    table = reports_to_csv([r.report for r in runs])
    run.write("localize_report.csv", table)
    return table


def cmd_detect(args) -> None:
    config = _config(args)
    run = Run("detect", Path(args.out), config, args.seed,
              {"samples_per_case": args.samples_per_case, "losses": args.losses})
    sys.stdout.write(_detect(run, config, args))
    run.finish()


def cmd_localize(args) -> None:
    config = _config(args)
    run = Run("localize", Path(args.out), config, args.seed,
              {"samples_per_case": args.samples_per_case, "plans": args.plans})
    sys.stdout.write(_localize(run, config, args))
    run.finish()


def cmd_cluster(args) -> None:
    data = from_csv(args.data)
    run = Run("cluster", Path(args.out), None, None,
              {"data": str(args.data), "features": args.features, "k": args.k, "labels": args.labels})
    matrix = standardize(select_features(data, args.features))
    result = bisect_kmeans(matrix, args.k)
    labels = coarse_labels(data) if args.labels == "coarse" else data.labels
    report = evaluate("cluster", matrix, result, labels)
    lines = ["row,case_label,cluster"]
    lines += [f"{i},{lab},{c}" for i, (lab, c) in enumerate(zip(data.labels, result.assignments))]
    run.write("assignments.csv", "\n".join(lines) + "\n")
    table = reports_to_csv([report])
    run.write("cluster_report.csv", table)
    run.finish()
    sys.stdout.write(table)


def _markdown(csv_text: str) -> str:
    rows = [line.split(",") for line in csv_text.strip().split("\n")]
    out = ["| " + " | ".join(rows[0]) + " |", "|" + "---|" * len(rows[0])]
    for row in rows[1:]:
        cells = [f"{float(c):.4g}" if _is_float(c) and "." in c else c for c in row]
        out.append("| " + " | ".join(cells) + " |")
    return "\n".join(out) + "\n"


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def cmd_report(args) -> None:
    config = _config(args)
    run = Run("report", Path(args.out), config, args.seed,
              {"samples_per_case": args.samples_per_case, "losses": args.losses, "plans": args.plans})
    detect = _detect(run, config, args)
    localize = _localize(run, config, args)
    text = (f"# Tap detection and localization report\n\nseed {args.seed}, "
            f"{args.samples_per_case} samples per case\n\n"
            f"## Detection (receiver features, k = 2)\n\n{_markdown(detect)}\n"
            f"## Localization\n\n{_markdown(localize)}")
    run.write("report.md", text)
    run.finish()
    sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tapwatch", description="Simulate OPM telemetry under fiber taps "
                                     "and detect/localize taps with bisecting k-means.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("--out", default="out", help="output directory (default: out)")
        if seeded:
            p.add_argument("--config", help="JSON link configuration (default: built-in)")
            p.add_argument("--seed", type=_seed, default=0)
            p.add_argument("--samples-per-case", type=_positive_int, default=200)

    p = sub.add_parser("generate", help="write the seven-case dataset as CSV")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", help="severity sweep of pre-booster taps, k = 2")
    common(p)
    p.add_argument("--losses", type=_losses, default=list(SEVERITY_LOSSES_DB), help="comma list, dB")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("localize", help="localization plans over the seven-case dataset")
    common(p)
    p.add_argument("--plans", type=_names, default=None,
                   help=f"comma list of plan groups ({', '.join(PLAN_GROUPS)}) or plan names")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("cluster", help="cluster an existing dataset CSV")
    common(p, seeded=False)
    p.add_argument("--data", required=True, help="dataset CSV in canonical format")
    p.add_argument("--features", type=_names, default=list(RECEIVER_FEATURES))
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--labels", choices=("case", "coarse"), default="case",
                   help="score against case labels or the normal/before/after grouping")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("report", help="run detect and localize, write report.md")
    common(p)
    p.add_argument("--losses", type=_losses, default=list(SEVERITY_LOSSES_DB))
    p.add_argument("--plans", type=_names, default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, DataFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
