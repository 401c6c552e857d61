"""Localization table for one seed, optionally on a link with a different span count."""

import argparse
import dataclasses

from tapwatch.evaluation import default_plans, localization_experiment, span_subset_plans
from tapwatch.linkmodel import LinkConfig, load_config


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--n-spans", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples-per-case", type=int, default=200)
    ap.add_argument("--smaller-subsets", action="store_true",
                    help="also run every (N-2)-combination of span powers")
    args = ap.parse_args()

    config = load_config(args.config) if args.config else LinkConfig()
    if args.n_spans:
        config = dataclasses.replace(config, n_spans=args.n_spans, span_loss_db=None)
    plans = default_plans(config.n_spans)
    if args.smaller_subsets and config.n_spans > 2:
        plans += span_subset_plans(config.n_spans, config.n_spans - 2)

    runs = localization_experiment(config, args.samples_per_case, args.seed, plans)
    print(f"{'plan':<22} {'k':>2} {'rate':>6} {'sse':>10} {'sse/dim':>9}  features")
    for r in runs:
        rep = r.report
        print(f"{rep.name:<22} {rep.k:>2} {rep.label_matching_rate:6.3f} {rep.sse_total:10.2f} "
              f"{rep.sse_per_dimension:9.2f}  {'+'.join(rep.feature_subset)}")


if __name__ == "__main__":
    main()
