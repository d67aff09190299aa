"""Ordered metro-line edge bundling."""
from .pipeline import PipelineResult, run_ordering_only, run_pipeline
from .settings import PipelineConfig, load_settings

__all__ = ["PipelineConfig", "PipelineResult", "load_settings", "run_ordering_only", "run_pipeline"]
