"""
OTE Logger - Observability, Traceability, Evaluation

LOCATION: morph4d/utils/ote_logger.py
PURPOSE: Structured logging shared by every numeric module and the CLI

PRINCIPLES:
    O - Observability: operations logged with timestamps and context
    T - Traceability: trace markers along solver and pipeline paths
    E - Evaluation: per-operation timings and convergence figures

USAGE:
    from morph4d.utils import get_logger

    logger = get_logger(__name__)
    logger.info("Encoding sequence", frames=30, landmarks=68)
    logger.trace("KARCHER", "iteration done", step=3, residual=1e-10)
    logger.observe("srvf_encode", duration=0.002, success=True)
"""

import logging
import sys
from typing import Any, Dict, Optional

LOG_FORMAT = '[%(asctime)s] %(levelname)s [%(name)s] %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


class OTELogger:
    """
    Logger implementing OTE principles.

    Wraps a stdlib logger and renders keyword context as
    ``key=value`` pairs after the message.

    Attributes:
        name (str): Logger name (usually module name)
        logger (logging.Logger): Underlying Python logger
        trace_enabled (bool): Whether to log trace messages

    Example:
        >>> logger = OTELogger("morph4d.trajectory.sphere")
        >>> logger.trace("LOG_MAP", "small angle branch", theta=3e-13)
        [2026-01-05 10:12:01] DEBUG [morph4d.trajectory.sphere] TRACE:LOG_MAP → small angle branch | theta=3e-13
    """

    def __init__(self, name: str, level: Optional[int] = None):
        self.name = name
        self.logger = logging.getLogger(name)
        if level is not None:
            self.logger.setLevel(level)
        self.trace_enabled = True

    def debug(self, message: str, **context):
        if not self.logger.isEnabledFor(logging.DEBUG):
            return
        self.logger.debug(self._with_context(message, context))

    def info(self, message: str, **context):
        self.logger.info(self._with_context(message, context))

    def warning(self, message: str, **context):
        self.logger.warning(self._with_context(message, context))

    def error(self, message: str, **context):
        self.logger.error(self._with_context(message, context))

    def trace(self, trace_point: str, message: str, **context):
        """
        Log a trace message for following a code path.

        Format: TRACE:{trace_point} → {message}

        Args:
            trace_point: Name of trace point (e.g., "KARCHER", "FIT")
            message: What happened at this trace point
            **context: Additional context
        """
        if not (self.trace_enabled and self.logger.isEnabledFor(logging.DEBUG)):
            return
        self.logger.debug(self._with_context(f"TRACE:{trace_point} → {message}", context))

    def observe(self, operation: str, duration: Optional[float] = None,
                success: Optional[bool] = None, **metrics):
        """
        Log operation metrics for evaluation.

        Args:
            operation: Operation name
            duration: Execution duration in seconds
            success: Whether operation succeeded
            **metrics: Additional figures (iterations, residual, ...)

        Example:
            >>> logger.observe("karcher_mean", duration=0.012, success=True, iterations=4)
            [2026-01-05 10:12:01] INFO [module] OBSERVE:karcher_mean | duration=0.012s | success=True | iterations=4
        """
        context: Dict[str, Any] = {}
        if duration is not None:
            context['duration'] = f"{duration:.3f}s"
        if success is not None:
            context['success'] = success
        context.update(metrics)
        self.logger.info(self._with_context(f"OBSERVE:{operation}", context))

    @staticmethod
    def _with_context(message: str, context: Dict[str, Any]) -> str:
        if not context:
            return message
        return f"{message} | " + " | ".join(f"{k}={v}" for k, v in context.items())


# Global logger registry
_loggers: Dict[str, OTELogger] = {}


def get_logger(name: str, level: Optional[int] = None) -> OTELogger:
    """
    Get or create the OTE logger for a module.

    The same instance is returned for the same module name.

    Args:
        name: Module name (use __name__)
        level: Optional level override for this logger

    Returns:
        OTELogger instance
    """
    if name not in _loggers:
        _loggers[name] = OTELogger(name, level)
    return _loggers[name]


def configure_logging(level: int = logging.INFO,
                      log_file: Optional[str] = None):
    """
    Configure the root handlers once per process.

    The CLI calls this at start-up; library use leaves handler setup to the
    host application.

    Args:
        level: Global logging level
        log_file: Optional file to write logs to
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        datefmt=DATE_FORMAT,
        handlers=handlers,
        force=True,
    )
