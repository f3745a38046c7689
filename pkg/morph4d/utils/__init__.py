"""
Utility Modules for morph4d

LOCATION: morph4d/utils/
PURPOSE: Shared utilities following OTE principles
    - Observability: logging with timestamps and key=value context
    - Traceability: trace markers through solvers and pipeline steps
    - Evaluation: per-operation run metrics

Modules:
    - ote_logger: OTE-compliant logging
    - metrics: run metrics tracking
    - decorators: reusable decorators for OTE compliance
"""

from morph4d.utils.ote_logger import OTELogger, configure_logging, get_logger
from morph4d.utils.metrics import RunMetrics, run_metrics
from morph4d.utils.decorators import evaluate, observe, traceable

__all__ = [
    'OTELogger',
    'get_logger',
    'configure_logging',
    'RunMetrics',
    'run_metrics',
    'observe',
    'traceable',
    'evaluate',
]
