"""Per-sweep run metrics."""

import threading
import time
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional


class MetricType(Enum):
    """Metric types."""
    COUNTER = "counter"  # Monotonically increasing
    GAUGE = "gauge"      # Current value
    TIMER = "timer"      # Duration, ms


@dataclass
class Metric:
    """Single measurement."""
    name: str
    value: float
    metric_type: MetricType
    labels: Dict[str, str] = field(default_factory=dict)


class RunMetrics:
    """Counters, gauges and timers collected while a sweep runs.

    Sweep workers record concurrently, so every write takes a lock.
    """

    def __init__(self, max_history: int = 100_000):
        self.metrics: Dict[str, deque] = {}
        self.max_history = max_history
        self._lock = threading.Lock()

    def record(self, metric: Metric) -> None:
        with self._lock:
            if metric.name not in self.metrics:
                self.metrics[metric.name] = deque(maxlen=self.max_history)
            self.metrics[metric.name].append(metric)

    def counter(self, name: str, value: float = 1.0, labels: Optional[Dict] = None) -> None:
        self.record(Metric(name, value, MetricType.COUNTER, labels or {}))

    def gauge(self, name: str, value: float, labels: Optional[Dict] = None) -> None:
        self.record(Metric(name, value, MetricType.GAUGE, labels or {}))

    def timer(self, name: str, duration_ms: float, labels: Optional[Dict] = None) -> None:
        self.record(Metric(name, duration_ms, MetricType.TIMER, labels or {}))

    @contextmanager
    def timed(self, name: str, labels: Optional[Dict] = None) -> Iterator[None]:
        """Record the wall time of the enclosed block as a timer."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timer(name, (time.perf_counter() - start) * 1000.0, labels)

    def get_stats(self, name: str) -> Optional[Dict[str, Any]]:
        """count/min/max/avg/latest of one metric, or None if never recorded."""
        with self._lock:
            metrics_list = list(self.metrics.get(name, []))
        if not metrics_list:
            return None

        values = [m.value for m in metrics_list]
        stats = {
            "count": len(values),
            "min": min(values),
            "max": max(values),
            "avg": sum(values) / len(values),
            "latest": values[-1],
            "metric_type": metrics_list[-1].metric_type.value,
        }
        if metrics_list[-1].metric_type == MetricType.COUNTER:
            stats["total"] = sum(values)
        return stats

    def summary(self) -> List[Dict[str, Any]]:
        """One stats row per metric, sorted by name."""
        with self._lock:
            names = sorted(self.metrics)
        rows = []
        for name in names:
            stats = self.get_stats(name)
            if stats:
                rows.append({"metric": name, **stats})
        return rows
