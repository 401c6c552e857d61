import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tapwatch.dataset import Dataset, default_cases, generate_dataset, select_features
from tapwatch.evaluation import (REPORT_HEADER, contingency, default_plans, detection_experiment,
                                 label_matching_rate, localization_experiment, points_to_csv,
                                 reports_to_csv, run_plan)
from tapwatch.linkmodel import LinkConfig, TapEvent, propagate

from oracles import brute_matching_rate


# -- matching rate -------------------------------------------------------------

def test_matching_rate_perfect_under_relabeling():
    assert label_matching_rate([0, 0, 1, 1], ["a", "a", "b", "b"])[0] == 1.0
    assert label_matching_rate([1, 1, 0, 0], ["a", "a", "b", "b"])[0] == 1.0
    rate, mapping = label_matching_rate([7, 7, 3], ["x", "x", "y"])
    assert rate == 1.0 and mapping == {7: "x", 3: "y"}


def test_matching_rate_example():
    a = [0, 0, 0, 1, 1, 1, 1, 1]
    lab = ["a", "a", "b", "b", "b", "b", "b", "a"]
    rate, _ = label_matching_rate(a, lab)
    assert rate == pytest.approx(0.75) == brute_matching_rate(a, lab)


def test_matching_rate_rectangular_tables():
    # more clusters than labels: the surplus cluster is unmatched
    assert label_matching_rate([0, 1, 2, 2], ["a", "a", "b", "b"])[0] == 0.75
    # one cluster: the largest label share
    assert label_matching_rate([0] * 5, list("aabbb"))[0] == 0.6


def test_matching_rate_rejects_bad_input():
    with pytest.raises(ValueError):
        label_matching_rate([0, 1], ["a"])
    with pytest.raises(ValueError):
        label_matching_rate([], [])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from("abcd")), min_size=1, max_size=25))
def test_matching_rate_equals_brute_force(pairs):
    a, lab = zip(*pairs)
    assert label_matching_rate(a, lab)[0] == pytest.approx(brute_matching_rate(a, lab))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=30),
       st.permutations(range(4)), st.permutations(range(4)))
def test_matching_rate_permutation_invariant(pairs, pc, pl):
    a, lab = zip(*pairs)
    base = label_matching_rate(a, lab)[0]
    assert label_matching_rate([pc[x] for x in a], lab)[0] == base
    assert label_matching_rate(a, [f"L{pl[y]}" for y in lab])[0] == base


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=30))
def test_rate_one_iff_permutation_structure(pairs):
    a, lab = zip(*pairs)
    table, _, _ = contingency(a, lab)
    # each label sits in exactly one cluster and vice versa
    permutation_like = (np.all((table > 0).sum(axis=0) == 1) and np.all((table > 0).sum(axis=1) == 1))
    assert (label_matching_rate(a, lab)[0] == 1.0) == bool(permutation_like)


def test_random_assignment_on_four_balanced_labels():
    rng = np.random.default_rng(0)
    lab = np.repeat(list("abcd"), 250)
    rate, _ = label_matching_rate(rng.integers(0, 4, 1000), lab)
    assert 0.25 <= rate < 0.4


# -- detection -------------------------------------------------------------------

@pytest.fixture(scope="module")
def detection():
    return detection_experiment(LinkConfig(), seed=0)


def test_detection_separates_every_loss(detection):
    assert [d.loss_db for d in detection] == [0.5, 0.8, 1.0, 1.5, 2.0, 3.0]
    assert all(d.report.label_matching_rate == 1.0 for d in detection)
    assert all(d.report.k == 2 and d.report.n_rows == 400 for d in detection)


def test_detection_sse_strictly_decreasing(detection):
    sse = [d.report.sse_total for d in detection]
    assert all(b < a for a, b in zip(sse, sse[1:]))


def test_detection_without_a_tap_is_uninformative():
    data = generate_dataset(LinkConfig(), [("a", TapEvent.none()), ("b", TapEvent.none())], 200, seed=0)
    run = run_plan("null", data, ["osnr_db", "ber", "p_rx_dbm"], 2, data.labels)
    assert run.report.label_matching_rate < 0.7


def test_detection_rejects_bad_losses():
    with pytest.raises(ValueError):
        detection_experiment(LinkConfig(), loss_levels=[0.5, 0.0])
    with pytest.raises(ValueError):
        detection_experiment(LinkConfig(), loss_levels=[])


# -- localization ------------------------------------------------------------

@pytest.fixture(scope="module")
def localization():
    return {r.report.name: r.report for r in localization_experiment(LinkConfig(), seed=0)}


def test_localization_plan_set(localization):
    assert list(localization) == [
        "rough_osnr_ber_prx", "rough_osnr_prx", "rough_k4_spans", "before_ptx", "before_plink",
        "before_osnr_prx_ptx", "after_all_spans", "after_spans_123", "after_spans_124",
        "after_spans_134", "after_spans_234"]
    assert localization["rough_osnr_ber_prx"].n_rows == 1400
    assert localization["rough_k4_spans"].n_rows == 800
    assert localization["after_all_spans"].n_rows == 800


def test_localization_expected_outcomes(localization):
    assert localization["rough_osnr_ber_prx"].label_matching_rate == 1.0
    assert localization["rough_osnr_prx"].label_matching_rate == 1.0
    assert localization["rough_k4_spans"].label_matching_rate < 0.9
    assert localization["before_ptx"].label_matching_rate == 1.0
    assert localization["before_plink"].label_matching_rate < 0.75
    assert localization["after_all_spans"].label_matching_rate == 1.0
    assert localization["after_spans_123"].label_matching_rate == 1.0


def test_sse_per_dimension_uses_feature_count(localization):
    r = localization["rough_osnr_ber_prx"]
    assert r.sse_per_dimension == pytest.approx(r.sse_total / 3)


def noiseless_dataset(config, copies=3):
    samples, labels, events = [], [], []
    for label, event in default_cases(config.n_spans):
        for _ in range(copies):
            samples.append(propagate(config, event))
            labels.append(label)
            events.append(event)
    return Dataset(samples, labels, events)


def run_named_plan(data, plan):
    sub = data if plan.rows is None else data.subset(plan.rows(data))
    mask = None if plan.score_rows is None else plan.score_rows(sub)
    return run_plan(plan.name, sub, plan.features, plan.k, plan.labeler(sub), mask)


NOISELESS_PLANS = [p for p in default_plans(4)
                   if p.name in ("rough_osnr_ber_prx", "rough_osnr_prx", "before_ptx", "before_osnr_prx_ptx")
                   or p.group == "after"]


@pytest.mark.parametrize("plan", NOISELESS_PLANS, ids=lambda p: p.name)
def test_noiseless_model_separates_every_plan(plan):
    data = noiseless_dataset(LinkConfig())
    assert run_named_plan(data, plan).report.label_matching_rate == 1.0


@pytest.mark.parametrize("n_spans", [3, 4, 5])
def test_cumulative_span_monitors_merge_neighbours_outside_prefix(n_spans):
    # a tap in span j lowers every monitor from j onward, so without monitor j
    # the taps in spans j and j + 1 read identically
    config = LinkConfig(n_spans=n_spans)
    for j in range(1, n_spans):
        kept = [i for i in range(1, n_spans + 1) if i != j]
        a = propagate(config, TapEvent.in_span(j, 0.8)).p_span_dbm
        b = propagate(config, TapEvent.in_span(j + 1, 0.8)).p_span_dbm
        assert [a[i - 1] for i in kept] == [b[i - 1] for i in kept]


def test_constant_column_changes_nothing():
    data = generate_dataset(LinkConfig(), default_cases(), 40, seed=3)
    flat = Dataset([s.__class__(s.osnr_db, s.ber, s.p_rx_dbm, 1.0, s.p_link_dbm, s.p_span_dbm)
                    for s in data.samples], data.labels, data.events)
    a = run_plan("a", flat, ["osnr_db", "p_rx_dbm"], 3, data.labels)
    b = run_plan("b", flat, ["osnr_db", "p_rx_dbm", "p_tx_dbm"], 3, data.labels)
    assert b.matrix.zero_variance.tolist() == [False, False, True]
    assert np.array_equal(a.result.assignments, b.result.assignments)
    assert a.report.label_matching_rate == b.report.label_matching_rate


def test_measured_ber_is_zero_at_default_osnr():
    # 2**23 bits cannot resolve an error rate near 1e-279
    data = generate_dataset(LinkConfig(), default_cases(), 20, seed=0)
    assert set(select_features(data, ["ber"]).values[:, 0]) == {0.0}


# -- serialization ------------------------------------------------------------

def test_report_csv_format(detection):
    text = reports_to_csv([d.report for d in detection], {"loss_db": [d.loss_db for d in detection]})
    lines = text.splitlines()
    assert lines[0].split(",") == ["loss_db", *REPORT_HEADER]
    assert len(lines) == 7
    fields = lines[1].split(",")
    assert fields[0] == "0.5" and fields[2] == "osnr_db+ber+p_rx_dbm"
    assert float(fields[6]) == detection[0].report.sse_total
    assert float(fields[6]) == float(f"{detection[0].report.sse_total:.17g}")


def test_points_csv(detection):
    lines = points_to_csv(detection[0].run).splitlines()
    assert lines[0] == "osnr_db,ber,p_rx_dbm,cluster,label"
    assert len(lines) == 401
    assert lines[1].split(",")[3] in ("0", "1")


@pytest.mark.parametrize("nf_db", [4.0, 7.0])
def test_outcomes_hold_across_noise_figures(nf_db):
    config = LinkConfig(noise_figure_db=nf_db)
    detect = detection_experiment(config, seed=1)
    assert all(d.report.label_matching_rate == 1.0 for d in detect)
    sse = [d.report.sse_total for d in detect]
    assert all(b < a for a, b in zip(sse, sse[1:]))
    rates = {r.report.name: r.report.label_matching_rate for r in localization_experiment(config, seed=1)}
    assert rates["rough_osnr_ber_prx"] == rates["rough_osnr_prx"] == 1.0
    assert rates["rough_k4_spans"] < 0.9
    assert rates["before_ptx"] == 1.0 and rates["before_plink"] < 0.75
    assert rates["after_all_spans"] == rates["after_spans_123"] == 1.0
