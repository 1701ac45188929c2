"""Service layer: one service per pipeline stage."""

from .centrality_service import CentralityService, centrality_service
from .coaffiliation_service import CoAffiliationService, coaffiliation_service
from .corpus_service import CorpusService, ValidationReport, corpus_service
from .flow_service import FlowService, flow_service
from .impact_service import ImpactService, impact_service
from .mobility_service import MobilityService, mobility_service
from .pipeline_service import PipelineService, RunConfig, StageResult, pipeline_service
from .synth_service import SCENARIO_PRESETS, GroundTruth, ScenarioConfig, SynthService, synth_service

__all__ = [
    "SCENARIO_PRESETS",
    "CentralityService",
    "CoAffiliationService",
    "CorpusService",
    "FlowService",
    "GroundTruth",
    "ImpactService",
    "MobilityService",
    "PipelineService",
    "RunConfig",
    "ScenarioConfig",
    "StageResult",
    "SynthService",
    "ValidationReport",
    "centrality_service",
    "coaffiliation_service",
    "corpus_service",
    "flow_service",
    "impact_service",
    "mobility_service",
    "pipeline_service",
    "synth_service",
]
