"""
OTE Decorators

LOCATION: morph4d/utils/decorators.py
PURPOSE: Apply OTE logging and run metrics to numeric operations

DECORATORS:
    @observe: entry/exit logging with timing (pipeline steps, CLI commands)
    @traceable: ENTER/EXIT/ERROR trace markers
    @evaluate: duration and outcome recorded in ``run_metrics``

USAGE:
    from morph4d.utils.decorators import evaluate, traceable

    @evaluate()
    @traceable()
    def srvf_encode(seq):
        ...
"""

import functools
import logging
import time
from typing import Any, Callable, Optional

from morph4d.utils.metrics import run_metrics
from morph4d.utils.ote_logger import get_logger


def observe(operation_name: Optional[str] = None, log_args: bool = False):
    """
    Decorator for observability (O in OTE).

    Logs function entry, exit, duration and exceptions at INFO level.

    Args:
        operation_name: Name for operation (defaults to function name)
        log_args: Whether to log call arguments
    """
    def decorator(func: Callable) -> Callable:
        op_name = operation_name or func.__name__
        logger = get_logger(func.__module__)

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start = time.perf_counter()
            if log_args:
                logger.info(f"⏱️  START {op_name}", args=args, kwargs=kwargs)
            else:
                logger.info(f"⏱️  START {op_name}")
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.error(
                    f"❌ FAILED {op_name} (Duration: {time.perf_counter() - start:.3f}s)",
                    error=e,
                )
                raise
            logger.info(f"✅ END {op_name} (Duration: {time.perf_counter() - start:.3f}s)")
            return result

        return wrapper
    return decorator


def traceable(trace_points: bool = True):
    """
    Decorator for traceability (T in OTE).

    Adds DEBUG trace markers at entry, exit and failure.
    """
    def decorator(func: Callable) -> Callable:
        logger = get_logger(func.__module__)
        func_name = func.__name__

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            if trace_points:
                logger.trace(f"ENTER:{func_name}", "Starting execution")
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                if trace_points:
                    logger.trace(f"ERROR:{func_name}", f"Failed with error: {e}")
                raise
            if trace_points:
                logger.trace(f"EXIT:{func_name}", "Completed successfully")
            return result

        return wrapper
    return decorator


def evaluate(track_performance: bool = True, detect_anomalies: bool = False):
    """
    Decorator for evaluation (E in OTE).

    Records duration and success of every call in ``run_metrics`` and logs an
    OBSERVE line at DEBUG level.

    Args:
        track_performance: Whether to record metrics
        detect_anomalies: Whether to warn about anomalies after each call
    """
    def decorator(func: Callable) -> Callable:
        func_name = func.__name__
        logger = get_logger(func.__module__)

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start = time.perf_counter()
            success = False
            try:
                result = func(*args, **kwargs)
                success = True
                return result
            finally:
                if track_performance:
                    duration = time.perf_counter() - start
                    run_metrics.record(func_name, duration, success)
                    if logger.logger.isEnabledFor(logging.DEBUG):
                        logger.debug(f"OBSERVE:{func_name}", duration=f"{duration:.6f}s", success=success)
                    if detect_anomalies:
                        for anomaly in run_metrics.detect_anomalies():
                            if func_name in anomaly:
                                logger.warning(f"ANOMALY DETECTED: {anomaly}")

        return wrapper
    return decorator
