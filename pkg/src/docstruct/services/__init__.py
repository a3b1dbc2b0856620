"""
Service modules for the structure recovery pipeline
"""

from .corpus_service import BookmarkMapping, CorpusService
from .pipeline_service import DocumentResult, ModelBundle, PipelineReport, PipelineService
from .semantic_service import SemanticClassifier, SemanticService, SequenceModel
from .structure_service import StructurePipeline, StructureResult, StructureService
from .summary_service import SummaryService
from .topic_service import TopicModel, TopicService

__all__ = [
    "CorpusService",
    "BookmarkMapping",
    "StructureService",
    "StructurePipeline",
    "StructureResult",
    "SemanticService",
    "SemanticClassifier",
    "SequenceModel",
    "TopicService",
    "TopicModel",
    "SummaryService",
    "PipelineService",
    "ModelBundle",
    "DocumentResult",
    "PipelineReport",
]
