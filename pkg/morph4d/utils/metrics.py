"""
Run Metrics - Evaluation Component

LOCATION: morph4d/utils/metrics.py
PURPOSE: Track how numeric operations behave across a run

PRINCIPLE: Evaluation (E in OTE)
    - Record duration and outcome of every decorated operation
    - Keep solver counters (iterations, residuals) next to timings
    - Flag operations that fail often or run slow

Only running aggregates are stored per operation, so memory does not grow
with the number of calls. All updates go through one lock; the tracker can
be shared by worker threads.

USAGE:
    from morph4d.utils import run_metrics

    run_metrics.record("karcher_mean", duration=0.01, success=True, iterations=5)
    report = run_metrics.get_report()
    anomalies = run_metrics.detect_anomalies()

Not to be confused with ``morph4d.evaluation``, which holds the
reconstruction and specificity measures reported on generated data.
"""

import math
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class OperationMetrics:
    """
    Metrics for one operation name.

    Attributes:
        operation: Operation name
        count: Total executions
        failures: Failed executions
        total_time: Sum of execution times in seconds
        total_sq_time: Sum of squared execution times
        max_time: Longest execution in seconds
        counters: Summed extra figures (e.g. iterations)
    """
    operation: str
    count: int = 0
    failures: int = 0
    total_time: float = 0.0
    total_sq_time: float = 0.0
    max_time: float = 0.0
    counters: Dict[str, float] = field(default_factory=dict)

    def add(self, duration: float, success: bool):
        self.count += 1
        if not success:
            self.failures += 1
        self.total_time += duration
        self.total_sq_time += duration * duration
        self.max_time = max(self.max_time, duration)

    @property
    def avg_time(self) -> float:
        return self.total_time / self.count if self.count else 0.0

    @property
    def std_time(self) -> Optional[float]:
        """Sample standard deviation of the durations; None below two calls."""
        if self.count < 2:
            return None
        var = (self.total_sq_time - self.count * self.avg_time ** 2) / (self.count - 1)
        return math.sqrt(max(var, 0.0))

    @property
    def success_rate(self) -> float:
        if self.count == 0:
            return 0.0
        return 100.0 * (self.count - self.failures) / self.count

    def to_dict(self) -> Dict[str, Any]:
        """Convert metrics to a JSON-friendly dictionary."""
        std = self.std_time
        return {
            'operation': self.operation,
            'calls': self.count,
            'failures': self.failures,
            'avg_time': f"{self.avg_time:.6f}s",
            'max_time': f"{self.max_time:.6f}s" if self.count else "N/A",
            'std_dev': f"{std:.6f}s" if std is not None else "N/A",
            'success_rate': f"{self.success_rate:.1f}%",
            **dict(self.counters),
        }


class RunMetrics:
    """
    Per-process tracker of operation timings and solver counters.

    Example:
        >>> tracker = RunMetrics()
        >>> tracker.record("fit_coefficients", duration=0.004, success=True)
        >>> tracker.get_report()["fit_coefficients"]["calls"]
        1
    """

    def __init__(self):
        self.metrics: Dict[str, OperationMetrics] = {}
        self._lock = threading.Lock()

    def _get(self, operation: str) -> OperationMetrics:
        m = self.metrics.get(operation)
        if m is None:
            m = self.metrics[operation] = OperationMetrics(operation=operation)
        return m

    def record(self, operation: str, duration: float, success: bool = True,
               **counters: float):
        """
        Record one execution.

        Args:
            operation: Operation name
            duration: Execution time in seconds
            success: Whether the operation returned normally
            **counters: Numeric figures summed per operation
        """
        with self._lock:
            m = self._get(operation)
            m.add(duration, success)
            for key, value in counters.items():
                m.counters[key] = m.counters.get(key, 0) + value

    def add_counters(self, operation: str, **counters: float):
        """Add solver counters to an operation without recording a call."""
        with self._lock:
            m = self._get(operation)
            for key, value in counters.items():
                m.counters[key] = m.counters.get(key, 0) + value

    def get_report(self, operation: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
        """
        Get the metrics report, for one operation or all of them.
        """
        with self._lock:
            if operation:
                if operation not in self.metrics:
                    return {}
                return {operation: self.metrics[operation].to_dict()}
            return {op: m.to_dict() for op, m in self.metrics.items()}

    def detect_anomalies(self,
                         error_threshold: float = 0.25,
                         slow_threshold: float = 5.0,
                         min_samples: int = 5) -> List[str]:
        """
        List operations with a high failure rate or a slow average.

        Args:
            error_threshold: Failure fraction above which an operation is flagged
            slow_threshold: Average duration (s) above which an operation is flagged
            min_samples: Calls required before an operation is judged

        Returns:
            Human-readable anomaly descriptions
        """
        anomalies = []
        with self._lock:
            snapshot = list(self.metrics.items())
        for operation, m in snapshot:
            if m.count < min_samples:
                continue
            error_rate = m.failures / m.count
            if error_rate > error_threshold:
                anomalies.append(
                    f"⚠️  HIGH ERROR RATE in {operation}: {error_rate*100:.1f}% "
                    f"[{m.failures}/{m.count} failures]"
                )
            if m.avg_time > slow_threshold:
                anomalies.append(
                    f"🐌 SLOW OPERATION {operation}: {m.avg_time:.2f}s "
                    f"(threshold: {slow_threshold:.0f}s)"
                )
        return anomalies

    def reset(self):
        """Reset all metrics."""
        with self._lock:
            self.metrics.clear()


# Global tracker instance
run_metrics = RunMetrics()
