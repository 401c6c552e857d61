"""Worst-case matching rates over seeds and noise figures.

Prints, per noise figure, the minimum detection rate, whether SSE fell
strictly with loss for every seed, and the min/max rate of each
localization plan.
"""

import argparse
from collections import defaultdict

from tapwatch.evaluation import detection_experiment, localization_experiment
from tapwatch.linkmodel import LinkConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--nf", type=float, nargs="+", default=[4.0, 5.0, 7.0])
    ap.add_argument("--samples-per-case", type=int, default=200)
    args = ap.parse_args()

    for nf in args.nf:
        config = LinkConfig(noise_figure_db=nf)
        det_min, monotone = 1.0, True
        plan_rates = defaultdict(list)
        for seed in range(args.seeds):
            runs = detection_experiment(config, n_per_case=args.samples_per_case, seed=seed)
            det_min = min(det_min, *(d.report.label_matching_rate for d in runs))
            sse = [d.report.sse_total for d in runs]
            monotone &= all(b < a for a, b in zip(sse, sse[1:]))
            for r in localization_experiment(config, args.samples_per_case, seed):
                plan_rates[r.report.name].append(r.report.label_matching_rate)
        print(f"NF {nf:g} dB: detection min rate {det_min:.3f}, SSE strictly decreasing: {monotone}")
        for name, rates in plan_rates.items():
            print(f"  {name:<22} min {min(rates):.3f}  max {max(rates):.3f}")


if __name__ == "__main__":
    main()
