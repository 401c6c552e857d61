"""Fiber-tap detection and localization from optical performance monitoring data."""

__version__ = "0.1.0"

from .clustering import ClusteringResult, bisect_kmeans, sse, two_means
from .dataset import (Dataset, FeatureMatrix, default_cases, from_csv, generate_dataset,
                      select_features, severity_cases, standardize, to_csv)
from .evaluation import (EvalReport, detection_experiment, label_matching_rate,
                         localization_experiment)
from .linkmodel import LinkConfig, Location, OpmSample, TapEvent, propagate, sample_opm

__all__ = [
    "ClusteringResult", "Dataset", "EvalReport", "FeatureMatrix", "LinkConfig", "Location",
    "OpmSample", "TapEvent", "bisect_kmeans", "default_cases", "detection_experiment",
    "from_csv", "generate_dataset", "label_matching_rate", "localization_experiment",
    "propagate", "sample_opm", "select_features", "severity_cases", "sse", "standardize",
    "to_csv", "two_means",
]
