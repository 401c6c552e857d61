"""Detection sweep: matching rate and SSE against tap loss, one seed."""

import argparse

from tapwatch.evaluation import detection_experiment
from tapwatch.linkmodel import LinkConfig, load_config


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples-per-case", type=int, default=200)
    ap.add_argument("--log-ber", action="store_true")
    args = ap.parse_args()

    config = load_config(args.config) if args.config else LinkConfig()
    runs = detection_experiment(config, n_per_case=args.samples_per_case, seed=args.seed, log_ber=args.log_ber)
    print(f"{'loss_db':>8} {'rate':>6} {'sse':>10}")
    for d in runs:
        print(f"{d.loss_db:8.2f} {d.report.label_matching_rate:6.3f} {d.report.sse_total:10.3f}")


if __name__ == "__main__":
    main()
