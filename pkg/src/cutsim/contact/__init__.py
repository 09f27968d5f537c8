"""Instrumented-knife contact detection.

Sensor logs (proximity + 9-DoF IMU at 100 Hz with a ground-truth contact
button) are ingested, standardized per replicate, split by one of three
protocols, and classified with a from-scratch random forest.  A synthetic
stream generator stands in for the physical knife so the whole pipeline runs
at desk scale.
"""

from .data import (
    FEATURE_NAMES,
    IntegrityError,
    ParseError,
    InfeasibleSplitError,
    Replicate,
    SampleSet,
    SplitScheme,
    build_split,
    ingest_replicates,
    label_approaching,
    parse_replicate_csv,
    preprocess,
    replicate_to_csv,
)
from .forest import (
    ConfusionStats,
    DegenerateModelError,
    ForestModel,
    evaluate,
    load_model,
    oob_error,
    predict,
    save_model,
    train_forest,
    tune_mtry,
)
from .synth import SynthSpec, make_corpus, synth_sensor_stream

__all__ = [
    "FEATURE_NAMES",
    "IntegrityError",
    "ParseError",
    "InfeasibleSplitError",
    "Replicate",
    "SampleSet",
    "SplitScheme",
    "build_split",
    "ingest_replicates",
    "label_approaching",
    "parse_replicate_csv",
    "preprocess",
    "replicate_to_csv",
    "ConfusionStats",
    "DegenerateModelError",
    "ForestModel",
    "evaluate",
    "load_model",
    "oob_error",
    "predict",
    "save_model",
    "train_forest",
    "tune_mtry",
    "SynthSpec",
    "make_corpus",
    "synth_sensor_stream",
]
