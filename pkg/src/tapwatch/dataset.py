"""Labeled OPM datasets: generation, CSV persistence and feature matrices."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataFormatError
from .linkmodel import LinkConfig, Location, OpmSample, TapEvent, sample_opm

BASE_FEATURES = ("osnr_db", "ber", "p_rx_dbm", "p_tx_dbm", "p_link_dbm")
RECEIVER_FEATURES = ("osnr_db", "ber", "p_rx_dbm")
CSV_PREFIX = ("case_label", "location", "loss_db")

DEFAULT_TAP_LOSS_DB = 0.8
SEVERITY_LOSSES_DB = (0.5, 0.8, 1.0, 1.5, 2.0, 3.0)


def feature_names(n_spans: int) -> list[str]:
    return [*BASE_FEATURES, *(f"p_span{i}_dbm" for i in range(1, n_spans + 1))]


def span_features(n_spans: int) -> list[str]:
    return [f"p_span{i}_dbm" for i in range(1, n_spans + 1)]


@dataclass
class Dataset:
    """Samples with parallel case labels and the events that produced them."""

    samples: list[OpmSample]
    labels: list[str]
    events: list[TapEvent]

    def __post_init__(self):
        if not self.samples:
            raise ValueError("a dataset needs at least one sample")
        if not (len(self.samples) == len(self.labels) == len(self.events)):
            raise ValueError("samples, labels and events must have equal length")
        n = len(self.samples[0].p_span_dbm)
        if n < 1 or any(len(s.p_span_dbm) != n for s in self.samples):
            raise ValueError("all samples must carry the same number (>= 1) of span powers")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def n_spans(self) -> int:
        return len(self.samples[0].p_span_dbm)

    @property
    def feature_names(self) -> list[str]:
        return feature_names(self.n_spans)

    def to_array(self) -> np.ndarray:
        return np.array([s.as_vector() for s in self.samples], dtype=float)

    def subset(self, mask: Sequence[bool] | np.ndarray) -> "Dataset":
        idx = np.flatnonzero(np.asarray(mask, dtype=bool))
        return Dataset([self.samples[i] for i in idx], [self.labels[i] for i in idx],
                       [self.events[i] for i in idx])


@dataclass
class FeatureMatrix:
    values: np.ndarray
    feature_subset: list[str]
    means: np.ndarray | None = None
    stds: np.ndarray | None = None
    zero_variance: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.feature_subset):
            raise ValueError("values must be a 2-D array with one column per feature")
        if self.zero_variance is None:
            self.zero_variance = np.zeros(len(self.feature_subset), dtype=bool)

    @property
    def standardized(self) -> bool:
        return self.means is not None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


# -- generation -------------------------------------------------------------

def default_cases(n_spans: int = 4, loss_db: float = DEFAULT_TAP_LOSS_DB) -> list[tuple[str, TapEvent]]:
    """No tap, transmitter tap, pre-booster tap and one tap per span."""
    cases = [("normal", TapEvent.none()),
             ("tx", TapEvent.transmitter(loss_db)),
             ("prebooster", TapEvent.prebooster(loss_db))]
    cases += [(f"span{i}", TapEvent.in_span(i, loss_db)) for i in range(1, n_spans + 1)]
    return cases


def severity_cases(loss_db: float) -> list[tuple[str, TapEvent]]:
    """The no-tap reference paired with a pre-booster tap of ``loss_db``."""
    return [("normal", TapEvent.none()), (f"prebooster_{loss_db:g}dB", TapEvent.prebooster(loss_db))]


def coarse_label(event: TapEvent) -> str:
    """Three-way grouping used by rough localization."""
    if event.location is Location.NONE:
        return "normal"
    if event.location in (Location.TRANSMITTER, Location.PREBOOSTER):
        return "before_booster"
    return "after_booster"


def case_stream(seed: int, case_index: int) -> np.random.Generator:
    """Independent random stream for the case at ``case_index``.

    Streams depend only on (seed, position), so appending cases never changes
    the draws of earlier ones.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(case_index),)))


def generate_dataset(config: LinkConfig, cases: Sequence[tuple[str, TapEvent]],
                     n_per_case: int, seed: int) -> Dataset:
    if n_per_case < 1:
        raise ValueError("n_per_case must be >= 1")
    if not cases:
        raise ValueError("at least one case is required")
    labels = [label for label, _ in cases]
    if len(set(labels)) != len(labels):
        raise ValueError("case labels must be distinct")
    for _, event in cases:
        event.check_against(config)

    samples, out_labels, events = [], [], []
    for index, (label, event) in enumerate(cases):
        rng = case_stream(seed, index)
        for _ in range(n_per_case):
            samples.append(sample_opm(config, event, rng))
            out_labels.append(label)
            events.append(event)
    return Dataset(samples, out_labels, events)


# -- feature matrices ---------------------------------------------------------

def select_features(dataset: Dataset, subset: Sequence[str], *, log_ber: bool = False,
                    ber_floor: float = 1e-12) -> FeatureMatrix:
    """Raw feature columns in ``subset`` order.

    With ``log_ber`` the BER column is replaced by log10(max(ber, ber_floor)).
    """
    subset = list(subset)
    if not subset:
        raise ValueError("feature subset must not be empty")
    names = dataset.feature_names
    unknown = [s for s in subset if s not in names]
    if unknown:
        raise ValueError(f"unknown features: {', '.join(unknown)}")
    if len(set(subset)) != len(subset):
        raise ValueError("duplicate feature in subset")
    full = dataset.to_array()
    values = full[:, [names.index(s) for s in subset]]
    if log_ber and "ber" in subset:
        j = subset.index("ber")
        values[:, j] = np.log10(np.maximum(values[:, j], ber_floor))
    return FeatureMatrix(values, subset)


def standardize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Column-wise z-score with the population standard deviation.

    Constant columns become zeros and are flagged in ``zero_variance``.
    """
    x = matrix.values
    if x.shape[0] < 2:
        raise ValueError("standardization needs at least 2 rows")
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    flat = (np.ptp(x, axis=0) == 0) | ~(stds > 0)
    out = np.zeros_like(x)
    live = ~flat
    out[:, live] = (x[:, live] - means[live]) / stds[live]
    stds = np.where(flat, 0.0, stds)
    return FeatureMatrix(out, list(matrix.feature_subset), means, stds, flat)


# -- CSV -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def csv_header(n_spans: int) -> list[str]:
    return [*CSV_PREFIX, *feature_names(n_spans)]


def dumps_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(dataset.n_spans))
    for sample, label, event in zip(dataset.samples, dataset.labels, dataset.events):
        writer.writerow([label, event.token, _fmt(event.loss_db), *map(_fmt, sample.as_vector())])
    return buf.getvalue()


def to_csv(dataset: Dataset, destination: str | Path) -> None:
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_csv(dataset))


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"line {line}: non-numeric {column} {text!r}") from None
    if not math.isfinite(value):
        raise DataFormatError(f"line {line}: non-finite {column} {text!r}")
    return value


def loads_csv(text: str) -> Dataset:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataFormatError("empty file")
    header = rows[0]
    n_spans = len(header) - len(CSV_PREFIX) - len(BASE_FEATURES)
    if n_spans < 1 or header != csv_header(n_spans):
        raise DataFormatError(f"malformed header: {','.join(header)}")
    samples, labels, events = [], [], []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataFormatError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        label, token = row[0], row[1]
        loss = _parse_float(row[2], line, "loss_db")
        try:
            event = TapEvent.from_token(token, loss)
        except ValueError as exc:
            raise DataFormatError(f"line {line}: {exc}") from None
        if event.location is Location.SPAN and event.span > n_spans:
            raise DataFormatError(f"line {line}: unknown location token {token!r}")
        vals = [_parse_float(v, line, name) for v, name in zip(row[3:], header[3:])]
        if not 0.0 <= vals[1] <= 1.0:
            raise DataFormatError(f"line {line}: ber {vals[1]} outside [0, 1]")
        samples.append(OpmSample(vals[0], vals[1], vals[2], vals[3], vals[4], tuple(vals[5:])))
        labels.append(label)
        events.append(event)
    if not samples:
        raise DataFormatError("file holds a header but no samples")
    return Dataset(samples, labels, events)


def from_csv(source: str | Path) -> Dataset:
    with open(source, encoding="utf-8", newline="") as fh:
        return loads_csv(fh.read())


def concat(datasets: Iterable[Dataset]) -> Dataset:
    samples, labels, events = [], [], []
    for d in datasets:
        samples += d.samples
        labels += d.labels
        events += d.events
    return Dataset(samples, labels, events)
