"""Command-line surface and the end-to-end pipeline."""

from .corpus import CorpusEntry, CorpusManifest, EmptyCorpusError, ingest_corpus, iter_source_files
from .main import build_parser, main
from .pipeline import JobSpec, PipelineResult, collect_inputs, run_pipeline

__all__ = [
    "CorpusEntry",
    "CorpusManifest",
    "EmptyCorpusError",
    "JobSpec",
    "PipelineResult",
    "build_parser",
    "collect_inputs",
    "ingest_corpus",
    "iter_source_files",
    "main",
    "run_pipeline",
]
