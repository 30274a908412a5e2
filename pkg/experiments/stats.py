"""
Integration Statistics Module

Tracks integrator effort across sweep points.
Thread-safe for async/parallel processing.
"""

from dataclasses import dataclass, field
from typing import Optional
import threading


@dataclass
class PointRecord:
    """Record of a single sweep point."""
    index: int
    value: float
    rhs_evaluations: int
    duration_ms: float
    status: str


@dataclass
class IntegrationTracker:
    """Track integrator effort across a sweep.

    Thread-safe: Uses a reentrant lock to protect concurrent access during async processing.
    """

    records: list[PointRecord] = field(default_factory=list)

    # Totals
    total_rhs_evaluations: int = 0
    total_duration_ms: float = 0.0
    failures: int = 0

    # Thread safety lock (RLock allows nested locking from same thread)
    _lock: threading.RLock = field(default_factory=threading.RLock)

    def add_point(
        self,
        index: int,
        value: float,
        rhs_evaluations: int,
        duration_ms: float,
        status: str = "ok",
    ):
        """Record a finished sweep point (thread-safe)."""
        record = PointRecord(
            index=index,
            value=value,
            rhs_evaluations=rhs_evaluations,
            duration_ms=duration_ms,
            status=status,
        )

        with self._lock:
            self.records.append(record)
            self.total_rhs_evaluations += rhs_evaluations
            self.total_duration_ms += duration_ms
            if status != "ok":
                self.failures += 1

    def slowest(self, count: int = 3) -> list[PointRecord]:
        """Points with the most right-hand side evaluations (thread-safe)."""
        with self._lock:
            return sorted(self.records, key=lambda r: r.rhs_evaluations, reverse=True)[:count]

    def format_summary(self) -> str:
        """Format a human-readable summary."""
        with self._lock:
            points = len(self.records)
            mean = self.total_rhs_evaluations / points if points else 0
            lines = [
                f"Points: {points} ({self.failures} failed)",
                f"RHS evaluations: {self.total_rhs_evaluations:,} (mean {mean:,.0f} per point)",
                f"Worker time: {self.total_duration_ms / 1000:.1f}s",
            ]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        """Export as dictionary for JSON serialization (thread-safe)."""
        with self._lock:
            return {
                "points": len(self.records),
                "failures": self.failures,
                "total_rhs_evaluations": self.total_rhs_evaluations,
                "total_duration_ms": round(self.total_duration_ms, 2),
                "records": [
                    {
                        "index": r.index,
                        "value": r.value,
                        "rhs_evaluations": r.rhs_evaluations,
                        "duration_ms": round(r.duration_ms, 2),
                        "status": r.status,
                    }
                    for r in sorted(self.records, key=lambda r: r.index)
                ],
            }


# Global tracker instance
_global_tracker: Optional[IntegrationTracker] = None


def get_tracker() -> IntegrationTracker:
    """Get or create the global integration tracker."""
    global _global_tracker
    if _global_tracker is None:
        _global_tracker = IntegrationTracker()
    return _global_tracker


def reset_tracker() -> IntegrationTracker:
    """Reset the global integration tracker."""
    global _global_tracker
    _global_tracker = IntegrationTracker()
    return _global_tracker
