"""Check registry behind `relaybc validate`."""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

logger = logging.getLogger(__name__)


class CheckStatus(str, Enum):
    """Outcome of a validation suite."""

    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


@dataclass
class CheckResult:
    """Result of running one suite."""

    name: str
    status: CheckStatus
    message: str = ""
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None
    duration_ms: Optional[float] = None

    def is_success(self) -> bool:
        return self.status == CheckStatus.PASSED


class ValidationSuite(ABC):
    """A named invariant check.

    Subclasses implement execute(); run() adds timing and turns exceptions into
    ERROR results.
    """

    name: str = ""
    description: str = ""
    slow: bool = False

    @abstractmethod
    def execute(self, rng: np.random.Generator) -> CheckResult:
        """Run the check.

        Args:
            rng: Seeded generator for randomised instances

        Returns:
            CheckResult
        """
        pass

    def run(self, rng: np.random.Generator) -> CheckResult:
        start = time.perf_counter()
        try:
            result = self.execute(rng)
        except Exception as e:
            logger.exception(f"suite {self.name} raised")
            result = CheckResult(
                name=self.name,
                status=CheckStatus.ERROR,
                message=f"Suite failed: {self.name}",
                error=str(e),
            )
        result.duration_ms = (time.perf_counter() - start) * 1000.0
        logger.info(f"suite {self.name}: {result.status.value} ({result.duration_ms:.0f} ms)")
        return result

    def verdict(self, ok: bool, message: str, **details: Any) -> CheckResult:
        return CheckResult(
            name=self.name,
            status=CheckStatus.PASSED if ok else CheckStatus.FAILED,
            message=message,
            details=details,
        )


class SuiteRegistry:
    """Registry of validation suites."""

    def __init__(self):
        self.suites: Dict[str, ValidationSuite] = {}

    def register(self, suite: ValidationSuite) -> None:
        self.suites[suite.name] = suite

    def get(self, name: str) -> Optional[ValidationSuite]:
        return self.suites.get(name)

    def list_suites(self, include_slow: bool = True) -> List[str]:
        return [n for n, s in self.suites.items() if include_slow or not s.slow]

    def run(self, names: List[str], seed: int = 0) -> List[CheckResult]:
        """Run suites in the given order; unknown names give ERROR results.

        Each suite gets its own generator seeded from (seed, position).
        """
        results = []
        for i, name in enumerate(names):
            suite = self.get(name)
            if suite is None:
                results.append(
                    CheckResult(
                        name=name,
                        status=CheckStatus.ERROR,
                        message=f"Unknown suite: {name}",
                        error=f"Suite not found: {name}",
                    )
                )
                continue
            results.append(suite.run(np.random.default_rng([seed, i])))
        return results
