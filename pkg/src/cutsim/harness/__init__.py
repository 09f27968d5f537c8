"""End-to-end orchestration: scenes, pipeline runs, metrics, persistence, service."""

from .scenegen import (
    BoardGeometry,
    GroundTruth,
    MeatSpec,
    generate_scene,
    random_meat_spec,
    render_pieces,
)
from .pipeline import (
    ConsistencyReport,
    PieceRecord,
    PipelineStageError,
    RunLog,
    TrimAccuracy,
    compare_fat_removal,
    consistency_report,
    load_runlog_text,
    proctor_markers,
    run_pipeline,
    save_runlog,
    trim_accuracy,
)

__all__ = [
    "BoardGeometry",
    "GroundTruth",
    "MeatSpec",
    "generate_scene",
    "random_meat_spec",
    "render_pieces",
    "ConsistencyReport",
    "PieceRecord",
    "PipelineStageError",
    "RunLog",
    "TrimAccuracy",
    "compare_fat_removal",
    "consistency_report",
    "load_runlog_text",
    "proctor_markers",
    "run_pipeline",
    "save_runlog",
    "trim_accuracy",
]
